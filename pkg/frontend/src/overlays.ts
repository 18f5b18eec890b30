/** Estimation overlays: view-ready models built from estimator reports.
 *
 * Stability renders as a verdict banner plus a settled-pose ghost of the
 * design mesh; lighting renders the shadow raster projected onto the
 * floor with a coverage readout. The PGM decoder exists so the raster
 * can be drawn without the browser touching the base64 payload format.
 */

import type {
  LightingReportJson,
  StabilityReportJson,
  Vec3,
} from "./types.js";

export interface StabilityOverlay {
  verdict: "stable" | "toppled";
  marginMeters: number;
  settled: boolean;
  ghostPosition: Vec3;
  ghostRotation: number[][];
  contactPoints: Vec3[];
  traceSeconds: number;
}

export function buildStabilityOverlay(
  report: StabilityReportJson,
): StabilityOverlay {
  const p = report.settled_pose.position;
  const lastTrace = report.trace[report.trace.length - 1];
  return {
    verdict: report.toppled ? "toppled" : "stable",
    marginMeters: report.quasi_static_margin,
    settled: report.settled,
    ghostPosition: [p[0]!, p[1]!, p[2]!],
    ghostRotation: report.settled_pose.rotation,
    contactPoints: report.contact_points.map((c) => [c[0]!, c[1]!, c[2]!]),
    traceSeconds: lastTrace === undefined ? 0 : lastTrace.t,
  };
}

export interface ShadowRaster {
  width: number;
  height: number;
  /** Row-major 8-bit gray; shadowed cells are dark. */
  pixels: Uint8Array;
}

export function decodePgm(data: Uint8Array): ShadowRaster {
  // Binary PGM: "P5\n<w> <h>\n<maxval>\n" then w*h bytes.
  let offset = 0;
  const token = (): string => {
    while (offset < data.length && isSpace(data[offset]!)) {
      offset += 1;
    }
    const start = offset;
    while (offset < data.length && !isSpace(data[offset]!)) {
      offset += 1;
    }
    return String.fromCharCode(...data.subarray(start, offset));
  };
  const magic = token();
  if (magic !== "P5") {
    throw new Error(`not a binary PGM (magic ${magic})`);
  }
  const width = Number(token());
  const height = Number(token());
  const maxval = Number(token());
  if (!(width > 0 && height > 0 && maxval === 255)) {
    throw new Error("unsupported PGM header");
  }
  offset += 1; // the single whitespace byte after maxval
  const pixels = data.subarray(offset, offset + width * height);
  if (pixels.length !== width * height) {
    throw new Error("truncated PGM pixel data");
  }
  return { width, height, pixels: new Uint8Array(pixels) };
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x0a || byte === 0x0d || byte === 0x09;
}

export function base64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const binary = atob(b64);
    const bytes = new Uint8Array(binary.length);
    for (let i = 0; i < binary.length; i++) {
      bytes[i] = binary.charCodeAt(i);
    }
    return bytes;
  }
  // Node (vitest) path.
  return new Uint8Array(Buffer.from(b64, "base64"));
}

export interface LightingOverlay {
  coverage: number;
  meanIlluminance: number;
  raster: ShadowRaster;
  /** World-space square the raster maps onto: center (x, z) and extent. */
  centerX: number;
  centerZ: number;
  extent: number;
  floorHeight: number;
}

export function buildLightingOverlay(
  report: LightingReportJson,
): LightingOverlay {
  return {
    coverage: report.shadow_coverage,
    meanIlluminance: report.mean_illuminance,
    raster: decodePgm(base64ToBytes(report.raster_pgm_base64)),
    centerX: report.raster_center[0]!,
    centerZ: report.raster_center[1]!,
    extent: report.raster_extent,
    floorHeight: report.floor_height,
  };
}
