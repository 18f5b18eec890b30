/** End-to-end UI loop against the real service.
 *
 * Spawns the paramcad service, then drives the full lampshade scenario
 * through the store and tools exactly as the browser would: select the
 * design, place it on a detected plane, sketch a profile, bind a 0.32 m
 * measurement to the diameter, run both estimations, export STL — and
 * verify the final committed values equal the service's session state.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildLightingOverlay, buildStabilityOverlay } from "../src/overlays.js";
import { DragController } from "../src/panel.js";
import { SessionStore } from "../src/store.js";
import { MeasureTool, PlaceTool, SketchTool } from "../src/tools.js";
import { ViewState } from "../src/viewstate.js";
import { MeshPoller } from "../src/meshPoller.js";

const PORT = 8972;
const BASE = `http://127.0.0.1:${PORT}`;

const FLOOR_OBJ = "v -2 0 -2\nv 2 0 -2\nv 2 0 2\nv -2 0 2\nf 1 2 3 4\n";

let server: ChildProcess;

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "paramcad.service:app", "--host", "127.0.0.1", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 45_000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/designs`);
      if (response.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error("paramcad service did not come up");
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("lampshade scenario", () => {
  it(
    "completes the full loop with final values equal to the service state",
    { timeout: 240_000 },
    async () => {
      const api = new ApiClient(BASE);
      const store = new SessionStore(api);

      // 1. Select the design and open a session.
      await store.open("lampshade_cone");
      expect(store.design.generator).toBe("lathe");
      const view = new ViewState(store.design);
      view.camera.elevation = 0; // look along -z: sketch plane is x/y

      // 2. Upload a scan, attach it, and place on the detected plane.
      const scene = await api.uploadEnvironment(FLOOR_OBJ, "obj");
      expect(scene.planes.length).toBeGreaterThan(0);
      const floor = scene.planes[0]!;
      expect(floor.height).toBeCloseTo(0.0, 6);
      await store.attachScene(scene.scene_id);

      const place = new PlaceTool(store);
      await place.placeOn(floor, 0.3, 0.2);
      await place.rotateTo(Math.PI / 4);
      expect(store.state.pose.position[0]).toBeCloseTo(0.3, 12);
      expect(store.state.pose.position[1]).toBeCloseTo(0.0, 6);
      expect(store.state.pose.position[2]).toBeCloseTo(0.2, 12);
      expect(store.state.pose.yaw).toBeCloseTo(Math.PI / 4, 12);

      // 3. Mesh polling sees every committed change exactly once.
      const poller = new MeshPoller(api, store.sessionId, () => undefined);
      expect(await poller.tick()).toBe(true);
      expect(poller.version).toBe(store.state.mesh_version);
      expect(await poller.tick()).toBe(false);

      // 4. A slider drag: previews during, commit on release.
      const drag = new DragController(store);
      drag.dragTo("height", 0.3);
      drag.dragTo("height", 0.32);
      const heightOutcome = await drag.endDrag("height", 0.32);
      expect(heightOutcome.kind).toBe("committed");
      expect(await poller.tick()).toBe(true);

      // 5. Sketch a profile stroke on the view plane (jittered taper).
      view.selectParam("profile");
      expect(view.setMode("sketch")).toBe(true);
      const sketch = new SketchTool(store, view);
      sketch.begin();
      const n = 5000; // pointer-rate oversampling; decimation caps it
      for (let i = 0; i < n; i++) {
        const t = i / (n - 1);
        const y = 0.35 * t;
        const r = 0.15 - 0.06 * t + 0.01 * Math.sin(7 * t);
        sketch.addSample([r, y, 0], 1.6 * t);
      }
      const fit = await sketch.finish();
      expect(fit.snapped_back).toBe(false);
      expect(fit.fit.path.length).toBeGreaterThan(0);
      expect(fit.fit.max_deviation).toBeLessThan(0.01);

      // 6. Measure 0.32 m between two floor picks and bind to diameter.
      view.setMode("measure");
      view.selectParam("diameter");
      const measure = new MeasureTool(store);
      expect(measure.pick([0.1, 0, 0.4])).toBeNull();
      const measurement = measure.pick([0.42, 0, 0.4]);
      expect(measurement!.distance).toBeCloseTo(0.32, 12);
      const bound = await measure.assignTo("diameter");
      expect(bound.kind).toBe("committed");
      expect(store.state.values["diameter"]).toBeCloseTo(0.32, 12);

      // 7. Run both estimations and build their overlays.
      const stability = buildStabilityOverlay(
        await api.estimateStability(store.sessionId),
      );
      expect(["stable", "toppled"]).toContain(stability.verdict);
      expect(Number.isFinite(stability.marginMeters)).toBe(true);

      const lighting = buildLightingOverlay(
        await api.estimateLighting(store.sessionId, [0.3, 1.5, 0.2]),
      );
      expect(lighting.coverage).toBeGreaterThan(0);
      expect(lighting.coverage).toBeLessThan(1);
      expect(lighting.raster.width).toBe(256);
      expect(lighting.floorHeight).toBeCloseTo(0.0, 6);

      // 8. Export STL; byte size matches the 84 + 50*n binary layout.
      const stl = await api.exportStl(store.sessionId);
      const meshResult = await api.getMesh(store.sessionId);
      expect(meshResult.kind).toBe("mesh");
      if (meshResult.kind === "mesh") {
        expect(stl.byteLength).toBe(84 + 50 * meshResult.mesh.triangles.length);
      }

      // 9. Quiescence: the UI state equals GET /sessions exactly.
      const settled = await store.quiesce();
      const authoritative = await api.getSession(store.sessionId);
      expect(settled.values).toEqual(authoritative.values);
      expect(settled.mesh_version).toBe(authoritative.mesh_version);
      expect(authoritative.previewing).toBe(false);
      expect(authoritative.values["height"]).toBe(0.32);
      // The bound diameter is the picked distance bit-for-bit (0.42 - 0.1
      // in binary floating point, a hair under 0.32).
      expect(authoritative.values["diameter"]).toBe(0.42 - 0.1);
      expect(authoritative.values["diameter"]).toBeCloseTo(0.32, 12);
    },
  );
});
