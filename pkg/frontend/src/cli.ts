#!/usr/bin/env node
// Usage: nolb-plot <kind> <inputs...> --out <path> [--semilog-y]
//        [--title T] [--x-label L] [--y-label L]
//        [--x-min V] [--x-max V] [--y-min V] [--y-max V]
import { FigureKind, FigureRecipe, plot } from "./recipe.js";

const KINDS: FigureKind[] = ["trajectories", "quantile-fan", "tau-sweep", "comparison"];

export function parseArgs(argv: string[]): FigureRecipe {
  if (argv.length === 0) {
    throw new Error(`usage: nolb-plot <${KINDS.join("|")}> <inputs...> --out <path>`);
  }
  const kind = argv[0] as FigureKind;
  if (!KINDS.includes(kind)) {
    throw new Error(`unknown figure kind "${argv[0]}"; expected one of ${KINDS.join(", ")}`);
  }
  const inputs: string[] = [];
  let out: string | undefined;
  let semilogY = false;
  let title: string | undefined;
  let xLabel: string | undefined;
  let yLabel: string | undefined;
  const limits: Record<string, number> = {};
  for (let i = 1; i < argv.length; i += 1) {
    const arg = argv[i];
    const next = (): string => {
      i += 1;
      if (i >= argv.length) {
        throw new Error(`flag ${arg} needs a value`);
      }
      return argv[i];
    };
    switch (arg) {
      case "--out":
        out = next();
        break;
      case "--semilog-y":
        semilogY = true;
        break;
      case "--title":
        title = next();
        break;
      case "--x-label":
        xLabel = next();
        break;
      case "--y-label":
        yLabel = next();
        break;
      case "--x-min":
      case "--x-max":
      case "--y-min":
      case "--y-max": {
        const value = Number(next());
        if (!Number.isFinite(value)) {
          throw new Error(`flag ${arg} needs a number`);
        }
        limits[arg] = value;
        break;
      }
      default:
        if (arg.startsWith("--")) {
          throw new Error(`unknown flag ${arg}`);
        }
        inputs.push(arg);
    }
  }
  if (!out) {
    throw new Error("--out <path> is required");
  }
  if (inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  const recipe: FigureRecipe = { kind, inputs, out, semilogY, title, xLabel, yLabel };
  for (const [loFlag, hiFlag, field] of [
    ["--x-min", "--x-max", "xLim"],
    ["--y-min", "--y-max", "yLim"],
  ] as const) {
    const hasLo = loFlag in limits;
    const hasHi = hiFlag in limits;
    if (hasLo !== hasHi) {
      throw new Error(`${loFlag} and ${hiFlag} must be given together`);
    }
    if (hasLo && hasHi) {
      recipe[field] = [limits[loFlag], limits[hiFlag]];
    }
  }
  return recipe;
}

export function main(argv: string[]): number {
  try {
    const recipe = parseArgs(argv);
    plot(recipe);
    console.log(`wrote ${recipe.out}`);
    return 0;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
