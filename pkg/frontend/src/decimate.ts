/** Client-side stroke decimation.
 *
 * The service caps sketch payloads; regardless of pointer event rate the
 * stroke we send holds at most `cap` samples. Decimation keeps both
 * endpoints and picks the remaining samples uniformly along the capture
 * order, so timestamps stay monotone and the trace shape is preserved.
 */

import type { StrokePayload, Vec3 } from "./types.js";

export const SKETCH_POINT_CAP = 2048;

export function decimateIndices(n: number, cap: number): number[] {
  if (cap < 2) {
    throw new Error(`decimation cap must be >= 2, got ${cap}`);
  }
  if (n <= cap) {
    return Array.from({ length: n }, (_, i) => i);
  }
  const indices: number[] = [];
  let last = -1;
  for (let k = 0; k < cap; k++) {
    const idx = Math.round((k * (n - 1)) / (cap - 1));
    if (idx !== last) {
      indices.push(idx);
      last = idx;
    }
  }
  return indices;
}

export function decimateStroke(
  points: number[][],
  timestamps: number[],
  viewDir: Vec3,
  cap: number = SKETCH_POINT_CAP,
): StrokePayload {
  if (points.length !== timestamps.length) {
    throw new Error("points and timestamps must have equal length");
  }
  const indices = decimateIndices(points.length, cap);
  return {
    points: indices.map((i) => points[i]!),
    timestamps: indices.map((i) => timestamps[i]!),
    view_dir: viewDir,
  };
}
