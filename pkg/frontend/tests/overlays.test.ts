import { describe, expect, it } from "vitest";

import {
  base64ToBytes,
  buildLightingOverlay,
  buildStabilityOverlay,
  decodePgm,
} from "../src/overlays.js";
import type { LightingReportJson, StabilityReportJson } from "../src/types.js";

function makePgm(width: number, height: number, fill: number): Uint8Array {
  const header = `P5\n${width} ${height}\n255\n`;
  const bytes = new Uint8Array(header.length + width * height);
  for (let i = 0; i < header.length; i++) {
    bytes[i] = header.charCodeAt(i);
  }
  bytes.fill(fill, header.length);
  return bytes;
}

describe("PGM decoding", () => {
  it("parses a binary PGM header and pixel block", () => {
    const raster = decodePgm(makePgm(16, 8, 200));
    expect(raster.width).toBe(16);
    expect(raster.height).toBe(8);
    expect(raster.pixels.length).toBe(128);
    expect(raster.pixels[0]).toBe(200);
  });

  it("rejects non-P5 and truncated data", () => {
    const ascii = new TextEncoder().encode("P2\n2 2\n255\n0 0 0 0\n");
    expect(() => decodePgm(ascii)).toThrow(/not a binary PGM/);
    expect(() => decodePgm(makePgm(16, 8, 0).subarray(0, 20))).toThrow(
      /truncated/,
    );
  });

  it("round-trips through base64", () => {
    const pgm = makePgm(4, 4, 17);
    const b64 = Buffer.from(pgm).toString("base64");
    expect([...base64ToBytes(b64)]).toEqual([...pgm]);
  });
});

describe("overlay builders", () => {
  it("stability: verdict, margin, and ghost pose", () => {
    const report: StabilityReportJson = {
      toppled: true,
      settled: true,
      settled_pose: {
        position: [0.1, 0.0, 0.2],
        rotation: [
          [1, 0, 0],
          [0, 1, 0],
          [0, 0, 1],
        ],
      },
      quasi_static_margin: -0.002,
      contact_points: [[0, 0, 0]],
      trace: [
        { t: 0, position: [0, 0, 0], up_deviation_deg: 0 },
        { t: 1.5, position: [0.1, 0, 0.2], up_deviation_deg: 88 },
      ],
    };
    const overlay = buildStabilityOverlay(report);
    expect(overlay.verdict).toBe("toppled");
    expect(overlay.marginMeters).toBeCloseTo(-0.002, 9);
    expect(overlay.ghostPosition).toEqual([0.1, 0.0, 0.2]);
    expect(overlay.traceSeconds).toBe(1.5);
  });

  it("lighting: coverage readout plus decoded raster geometry", () => {
    const report: LightingReportJson = {
      shadow_coverage: 0.125,
      mean_illuminance: 0.4,
      raster_extent: 1.0,
      raster_center: [0.2, -0.1],
      floor_height: 0.0,
      raster_size: 8,
      sample_count: 100,
      occluded_count: 12,
      raster_pgm_base64: Buffer.from(makePgm(8, 8, 255)).toString("base64"),
    };
    const overlay = buildLightingOverlay(report);
    expect(overlay.coverage).toBe(0.125);
    expect(overlay.raster.width).toBe(8);
    expect(overlay.centerX).toBe(0.2);
    expect(overlay.centerZ).toBe(-0.1);
    expect(overlay.extent).toBe(1.0);
  });
});
