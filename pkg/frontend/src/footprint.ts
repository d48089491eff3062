// Gaussian finger footprint rasterized onto the 9x9 taxel grid.
//
// Pad coordinates: x grows rightward, y grows upward from the bottom edge,
// both in taxel units (0..9).  Storage is row-major with row 0 at the top,
// matching the sensor's frame layout, so the cell (r, c) has its center at
// x = c + 0.5, y = (8 - r) + 0.5.

import { GRID_N, TAXELS } from "./protocol";

export const SIGMA_MIN = 0.6;
export const SIGMA_MAX = 1.2;
export const DEFAULT_SIGMA = 0.8;
export const DEFAULT_AMPLITUDE = 0.8;
// second finger sits a fixed offset to the right, within the 2..3 taxel
// separation band the two-finger gestures are defined over
export const TWO_FINGER_OFFSET = 2.5;

export interface Touch {
  x: number;
  y: number;
  amplitude: number;
}

export function mirrorTouch(touch: Touch): Touch {
  return { x: touch.x + TWO_FINGER_OFFSET, y: touch.y, amplitude: touch.amplitude };
}

export function renderFootprint(
  touches: readonly Touch[],
  sigma: number,
): Float64Array<ArrayBuffer> {
  const values = new Float64Array(TAXELS);
  if (touches.length === 0) return values;
  const twoSigmaSq = 2 * sigma * sigma;
  for (let r = 0; r < GRID_N; r++) {
    const ty = GRID_N - 1 - r + 0.5;
    for (let c = 0; c < GRID_N; c++) {
      const tx = c + 0.5;
      let v = 0;
      for (const touch of touches) {
        const dx = tx - touch.x;
        const dy = ty - touch.y;
        v += touch.amplitude * Math.exp(-(dx * dx + dy * dy) / twoSigmaSq);
      }
      values[r * GRID_N + c] = v < 0 ? 0 : v > 1 ? 1 : v;
    }
  }
  return values;
}

export function footprintMass(values: ArrayLike<number>): number {
  let mass = 0;
  for (let i = 0; i < values.length; i++) mass += values[i]!;
  return mass;
}
