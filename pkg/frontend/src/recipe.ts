import { writeFileSync } from "fs";
import {
  AxisOptions,
  comparisonFigure,
  quantileFanFigure,
  tauSweepFigure,
  trajectoriesFigure,
} from "./figures.js";

export type FigureKind = "trajectories" | "quantile-fan" | "tau-sweep" | "comparison";

export interface FigureRecipe extends AxisOptions {
  kind: FigureKind;
  inputs: string[];
  out: string;
}

const BUILDERS: Record<FigureKind, (inputs: string[], options: AxisOptions) => string> = {
  "trajectories": trajectoriesFigure,
  "quantile-fan": quantileFanFigure,
  "tau-sweep": tauSweepFigure,
  "comparison": comparisonFigure,
};

export function render(recipe: FigureRecipe): string {
  const builder = BUILDERS[recipe.kind];
  if (!builder) {
    throw new Error(`unknown figure kind "${recipe.kind}"`);
  }
  if (recipe.inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  return builder(recipe.inputs, recipe);
}

/** Render the recipe and write the image; inputs are never modified. */
export function plot(recipe: FigureRecipe): void {
  writeFileSync(recipe.out, render(recipe), "utf8");
}
