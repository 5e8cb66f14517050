/** The stress-strain colour legend, anchored exactly at the engine stops. */

import type { RGB } from "./types.js";

export interface LegendStop {
  label: string;
  strain: number;
  color: RGB;
}

export const DEFAULT_YIELD_STRAIN = 0.2;
export const DEFAULT_NECKING_STRAIN = 0.6;

export function legendStops(
  yieldStrain = DEFAULT_YIELD_STRAIN,
  neckingStrain = DEFAULT_NECKING_STRAIN,
): LegendStop[] {
  return [
    { label: "elastic", strain: 0, color: [255, 0, 0] },
    { label: "yield", strain: yieldStrain, color: [0, 160, 0] },
    { label: "necking", strain: neckingStrain, color: [128, 0, 128] },
    { label: "failed", strain: 2 * neckingStrain, color: [32, 0, 32] },
  ];
}

export const NEUTRAL: RGB = [200, 200, 200];

export function cssColor(rgb: RGB): string {
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}
