import { describe, expect, it } from "vitest";

import {
  decimateIndices,
  decimateStroke,
  SKETCH_POINT_CAP,
} from "../src/decimate.js";

function wavyStroke(n: number): { points: number[][]; timestamps: number[] } {
  const points: number[][] = [];
  const timestamps: number[] = [];
  for (let i = 0; i < n; i++) {
    const t = i / (n - 1);
    points.push([0.1 + 0.05 * Math.sin(9 * t), 0.5 * t, 0]);
    timestamps.push(1.5 * t);
  }
  return { points, timestamps };
}

describe("stroke decimation", () => {
  it("leaves short strokes untouched", () => {
    const { points, timestamps } = wavyStroke(100);
    const stroke = decimateStroke(points, timestamps, [0, 0, 1]);
    expect(stroke.points).toEqual(points);
    expect(stroke.timestamps).toEqual(timestamps);
  });

  it("caps the payload regardless of pointer rate", () => {
    for (const n of [2049, 5000, 100_000]) {
      const { points, timestamps } = wavyStroke(n);
      const stroke = decimateStroke(points, timestamps, [0, 0, 1]);
      expect(stroke.points.length).toBeLessThanOrEqual(SKETCH_POINT_CAP);
      expect(stroke.points.length).toBe(stroke.timestamps.length);
    }
  });

  it("keeps both endpoints and monotone timestamps", () => {
    const { points, timestamps } = wavyStroke(10_000);
    const stroke = decimateStroke(points, timestamps, [0, 0, 1]);
    expect(stroke.points[0]).toEqual(points[0]);
    expect(stroke.points[stroke.points.length - 1]).toEqual(
      points[points.length - 1],
    );
    for (let i = 1; i < stroke.timestamps.length; i++) {
      expect(stroke.timestamps[i]!).toBeGreaterThan(stroke.timestamps[i - 1]!);
    }
  });

  it("indices are strictly increasing and unique", () => {
    const indices = decimateIndices(9999, 128);
    expect(indices.length).toBeLessThanOrEqual(128);
    for (let i = 1; i < indices.length; i++) {
      expect(indices[i]!).toBeGreaterThan(indices[i - 1]!);
    }
  });

  it("rejects mismatched points/timestamps", () => {
    expect(() => decimateStroke([[0, 0, 0]], [0, 1], [0, 0, 1])).toThrow();
  });
});
