/** Slice geometry: percents -> angular spans, hit testing, drag targets. */

import type { PieSector } from "./types.js";

const TAU = Math.PI * 2;
/** Slices start at 12 o'clock and run clockwise. */
export const START_ANGLE = -Math.PI / 2;

export interface Slice {
  sector: PieSector;
  start: number; // radians
  end: number;
}

export function layoutSlices(ring: PieSector[]): Slice[] {
  const out: Slice[] = [];
  let angle = START_ANGLE;
  for (const sector of ring) {
    const sweep = (sector.percent / 100) * TAU;
    out.push({ sector, start: angle, end: angle + sweep });
    angle += sweep;
  }
  return out;
}

/** Angle of (x, y) relative to the centre, normalized into the wheel. */
export function pointAngle(
  x: number, y: number, cx: number, cy: number,
): number {
  let a = Math.atan2(y - cy, x - cx);
  while (a < START_ANGLE) a += TAU;
  while (a >= START_ANGLE + TAU) a -= TAU;
  return a;
}

export function distance(
  x: number, y: number, cx: number, cy: number,
): number {
  return Math.hypot(x - cx, y - cy);
}

export function sliceAt(
  slices: Slice[], x: number, y: number,
  cx: number, cy: number, radius: number,
): Slice | null {
  if (distance(x, y, cx, cy) > radius) return null;
  const a = pointAngle(x, y, cx, cy);
  for (const slice of slices) {
    if (a >= slice.start && a < slice.end) return slice;
  }
  return slices.length ? slices[slices.length - 1] : null;
}

/**
 * Index of the boundary (between slice i and i+1) within `tolerance`
 * radians of the pointer, or -1. The wrap-around boundary at 12 o'clock is
 * not draggable: it is the ring's fixed origin.
 */
export function boundaryAt(
  slices: Slice[], x: number, y: number,
  cx: number, cy: number, radius: number, tolerance = 0.06,
): number {
  if (slices.length < 2) return -1;
  if (distance(x, y, cx, cy) > radius) return -1;
  const a = pointAngle(x, y, cx, cy);
  for (let i = 0; i < slices.length - 1; i++) {
    if (Math.abs(a - slices[i].end) <= tolerance) return i;
  }
  return -1;
}

/**
 * Reallocate percent across the boundary between ring[i] and ring[i+1] so
 * the boundary lands on `angle`. Only the two adjacent slices change; both
 * keep at least `floor` percent. Returns the new percents for the ring.
 */
export function dragBoundary(
  ring: PieSector[], boundary: number, angle: number, floor = 0.01,
): number[] {
  const slices = layoutSlices(ring);
  const left = slices[boundary];
  const right = slices[boundary + 1];
  const pair = left.sector.percent + right.sector.percent;
  let leftShare = ((angle - left.start) / TAU) * 100;
  leftShare = Math.max(floor, Math.min(pair - floor, leftShare));
  const percents = ring.map((s) => s.percent);
  percents[boundary] = round2(leftShare);
  percents[boundary + 1] = round2(pair - leftShare);
  return percents;
}

export function round2(x: number): number {
  return Math.round(x * 100) / 100;
}
