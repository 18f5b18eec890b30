/** Minimal canvas-2D wireframe viewport.
 *
 * Catalog meshes are a few thousand triangles, so projecting edges onto
 * a 2D canvas is plenty for preview, ghosts, and overlays — no GPU
 * dependency, and the math stays inspectable.
 */

import type { MeshJson, Vec3 } from "./types.js";
import type { CameraPose } from "./viewstate.js";
import type { LightingOverlay, StabilityOverlay } from "./overlays.js";

export function cameraPosition(camera: CameraPose): Vec3 {
  const cosE = Math.cos(camera.elevation);
  return [
    camera.target[0] + camera.distance * cosE * Math.sin(camera.azimuth),
    camera.target[1] + camera.distance * Math.sin(camera.elevation),
    camera.target[2] + camera.distance * cosE * Math.cos(camera.azimuth),
  ];
}

/** Project a world point to canvas pixels (simple look-at + pinhole). */
export function project(
  camera: CameraPose,
  point: Vec3,
  width: number,
  height: number,
): [number, number] | null {
  const eye = cameraPosition(camera);
  // Camera basis: forward to target, world-up cross products.
  const f = normalize([
    camera.target[0] - eye[0],
    camera.target[1] - eye[1],
    camera.target[2] - eye[2],
  ]);
  const r = normalize(cross(f, [0, 1, 0]));
  const u = cross(r, f);
  const d: Vec3 = [point[0] - eye[0], point[1] - eye[1], point[2] - eye[2]];
  const z = dot(d, f);
  if (z <= 1e-6) {
    return null;
  }
  const focal = 1.2 * Math.min(width, height);
  return [
    width / 2 + (focal * dot(d, r)) / z,
    height / 2 - (focal * dot(d, u)) / z,
  ];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]) || 1;
  return [v[0] / n, v[1] / n, v[2] / n];
}

export interface Pose {
  position: number[];
  yaw: number;
}

function posed(vertex: number[], pose: Pose): Vec3 {
  const c = Math.cos(pose.yaw);
  const s = Math.sin(pose.yaw);
  const x = vertex[0]!;
  const z = vertex[2]!;
  return [
    c * x + s * z + pose.position[0]!,
    vertex[1]! + pose.position[1]!,
    -s * x + c * z + pose.position[2]!,
  ];
}

export function drawMesh(
  ctx: CanvasRenderingContext2D,
  mesh: MeshJson,
  pose: Pose,
  camera: CameraPose,
  style: string,
): void {
  const { width, height } = ctx.canvas;
  ctx.strokeStyle = style;
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (const tri of mesh.triangles) {
    const pts = tri.map((i) =>
      project(camera, posed(mesh.vertices[i!]!, pose), width, height),
    );
    if (pts.some((p) => p === null)) {
      continue;
    }
    const [a, b, c] = pts as [number, number][];
    ctx.moveTo(a![0], a![1]);
    ctx.lineTo(b![0], b![1]);
    ctx.lineTo(c![0], c![1]);
    ctx.closePath();
  }
  ctx.stroke();
}

export function drawStabilityGhost(
  ctx: CanvasRenderingContext2D,
  mesh: MeshJson,
  overlay: StabilityOverlay,
  camera: CameraPose,
): void {
  const { width, height } = ctx.canvas;
  ctx.strokeStyle =
    overlay.verdict === "toppled" ? "rgba(220,60,40,0.6)" : "rgba(60,160,60,0.6)";
  ctx.beginPath();
  const rot = overlay.ghostRotation;
  for (const tri of mesh.triangles) {
    const pts = tri.map((i) => {
      const v = mesh.vertices[i!]!;
      const w: Vec3 = [
        rot[0]![0]! * v[0]! + rot[0]![1]! * v[1]! + rot[0]![2]! * v[2]! + overlay.ghostPosition[0],
        rot[1]![0]! * v[0]! + rot[1]![1]! * v[1]! + rot[1]![2]! * v[2]! + overlay.ghostPosition[1],
        rot[2]![0]! * v[0]! + rot[2]![1]! * v[1]! + rot[2]![2]! * v[2]! + overlay.ghostPosition[2],
      ];
      return project(camera, w, width, height);
    });
    if (pts.some((p) => p === null)) {
      continue;
    }
    const [a, b, c] = pts as [number, number][];
    ctx.moveTo(a![0], a![1]);
    ctx.lineTo(b![0], b![1]);
    ctx.lineTo(c![0], c![1]);
    ctx.closePath();
  }
  ctx.stroke();
}

export function drawShadowRaster(
  ctx: CanvasRenderingContext2D,
  overlay: LightingOverlay,
  camera: CameraPose,
): void {
  // Project the raster's world square and paint shadowed cells as a
  // coarse scatter; perceptually adequate for a coverage preview.
  const { width, height } = ctx.canvas;
  const n = overlay.raster.width;
  const step = Math.max(1, Math.floor(n / 64));
  ctx.fillStyle = "rgba(40,40,80,0.45)";
  const cell = (2 * overlay.extent) / n;
  for (let row = 0; row < n; row += step) {
    for (let col = 0; col < n; col += step) {
      const value = overlay.raster.pixels[row * n + col]!;
      if (value > 128) {
        continue; // lit
      }
      const x = overlay.centerX - overlay.extent + (col + 0.5) * cell;
      const z = overlay.centerZ - overlay.extent + (row + 0.5) * cell;
      const p = project(camera, [x, overlay.floorHeight, z], width, height);
      if (p !== null) {
        ctx.fillRect(p[0] - 1, p[1] - 1, 3, 3);
      }
    }
  }
}
