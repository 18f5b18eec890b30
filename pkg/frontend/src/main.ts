/** Browser entry point: wires the DOM to the session store.
 *
 * Layout: a design picker, the grouped parameter panel on the left, the
 * wireframe viewport in the middle with a mode toolbar, estimation
 * readouts and a notice feed on the right. All service traffic flows
 * through the SessionStore's request queue.
 */

import { ApiClient } from "./api.js";
import { MeshPoller } from "./meshPoller.js";
import {
  buildLightingOverlay,
  buildStabilityOverlay,
  type LightingOverlay,
  type StabilityOverlay,
} from "./overlays.js";
import { DragController, panelGroups } from "./panel.js";
import {
  cameraPosition,
  drawMesh,
  drawShadowRaster,
  drawStabilityGhost,
} from "./render.js";
import { SessionStore } from "./store.js";
import { MeasureTool, PlaceTool, SketchTool } from "./tools.js";
import type { MeshJson, PlaneSummary, Vec3 } from "./types.js";
import { ViewState, type Mode } from "./viewstate.js";

const API_BASE =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";

const MODES: Mode[] = ["navigate", "drag_handle", "sketch", "measure", "place"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  parent: HTMLElement,
  className = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  parent.appendChild(node);
  return node;
}

class App {
  readonly api = new ApiClient(API_BASE);
  store: SessionStore | null = null;
  view: ViewState | null = null;
  drag: DragController | null = null;
  poller: MeshPoller | null = null;
  sketchTool: SketchTool | null = null;
  measureTool: MeasureTool | null = null;
  placeTool: PlaceTool | null = null;

  mesh: MeshJson | null = null;
  planes: PlaneSummary[] = [];
  stability: StabilityOverlay | null = null;
  lighting: LightingOverlay | null = null;

  readonly canvas: HTMLCanvasElement;
  readonly panelRoot: HTMLElement;
  readonly noticeRoot: HTMLElement;
  readonly toolbar: HTMLElement;
  readonly sidebar: HTMLElement;

  constructor(root: HTMLElement) {
    const top = el("div", root, "topbar");
    const picker = el("select", top);
    const openBtn = el("button", top);
    openBtn.textContent = "open session";

    const body = el("div", root, "columns");
    this.panelRoot = el("div", body, "panel");
    const middle = el("div", body, "viewport");
    this.toolbar = el("div", middle, "toolbar");
    this.canvas = el("canvas", middle);
    this.canvas.width = 720;
    this.canvas.height = 540;
    this.sidebar = el("div", body, "sidebar");
    this.noticeRoot = el("div", root, "notices");

    void this.api.listDesigns().then((designs) => {
      for (const d of designs) {
        const option = el("option", picker);
        option.value = d.id;
        option.textContent = `${d.name} (${d.parameters.length} params)`;
      }
    });
    openBtn.addEventListener("click", () => {
      void this.open(picker.value);
    });
    this.bindPointer();
  }

  async open(designId: string): Promise<void> {
    this.poller?.stop();
    const store = new SessionStore(this.api);
    await store.open(designId);
    this.store = store;
    this.view = new ViewState(store.design);
    this.drag = new DragController(store);
    this.sketchTool = new SketchTool(store, this.view);
    this.measureTool = new MeasureTool(store);
    this.placeTool = new PlaceTool(store);
    this.poller = new MeshPoller(this.api, store.sessionId, (mesh) => {
      this.mesh = mesh;
      this.draw();
    });
    this.poller.start();
    await this.poller.tick();
    store.subscribe(() => {
      this.renderPanel();
      this.renderNotices();
    });
    this.renderToolbar();
    this.renderSidebar();
    this.renderPanel();
  }

  // -- parameter panel ----------------------------------------------------

  renderPanel(): void {
    if (this.store === null || this.drag === null) {
      return;
    }
    const store = this.store;
    const drag = this.drag;
    this.panelRoot.replaceChildren();
    for (const group of panelGroups(store.design, store.state)) {
      const box = el("fieldset", this.panelRoot, "group");
      el("legend", box).textContent = group.group;
      for (const control of group.controls) {
        const row = el("label", box, "control");
        row.textContent = control.schema.name;
        if (control.clamped) {
          el("span", row, "clamped").textContent = " (clamped)";
        }
        const schema = control.schema;
        if (schema.kind === "continuous") {
          const slider = el("input", row);
          slider.type = "range";
          slider.min = String(schema.lo);
          slider.max = String(schema.hi);
          slider.step = "0.001";
          slider.value = String(control.value);
          if (control.band !== null) {
            // Recommended range as a highlighted band on the track.
            const lo = schema.lo!;
            const hi = schema.hi!;
            const a = (100 * (control.band.lo - lo)) / (hi - lo);
            const b = (100 * (control.band.hi - lo)) / (hi - lo);
            slider.style.background = `linear-gradient(to right, #ddd ${a}%, orange ${a}%, orange ${b}%, #ddd ${b}%)`;
            slider.title = `recommended ${control.band.lo.toFixed(3)}–${control.band.hi.toFixed(3)} m`;
          }
          slider.addEventListener("input", () => {
            this.poller?.setDragging(true);
            drag.dragTo(schema.name, Number(slider.value));
          });
          slider.addEventListener("change", () => {
            this.poller?.setDragging(false);
            void drag.endDrag(schema.name, Number(slider.value)).then(() => {
              this.playSnapBack();
            });
          });
        } else if (schema.kind === "discrete") {
          const select = el("select", row);
          for (const level of schema.levels ?? []) {
            const option = el("option", select);
            option.value = String(level);
            option.textContent = String(level);
          }
          select.value = String(control.value);
          select.addEventListener("change", () => {
            void store.commitParam(schema.name, Number(select.value));
          });
        } else if (schema.kind === "option") {
          const select = el("select", row);
          for (const label of schema.labels ?? []) {
            const option = el("option", select);
            option.value = label;
            option.textContent = label;
          }
          select.value = String(control.value);
          select.addEventListener("change", () => {
            void store.commitParam(schema.name, select.value);
          });
        } else if (schema.kind === "boolean") {
          const box2 = el("input", row);
          box2.type = "checkbox";
          box2.checked = Boolean(control.value);
          box2.addEventListener("change", () => {
            void store.commitParam(schema.name, box2.checked);
          });
        } else if (schema.kind === "text") {
          const input = el("input", row);
          input.type = "text";
          input.value = String(control.value);
          input.addEventListener("change", () => {
            void store.commitParam(schema.name, input.value);
          });
        } else {
          const btn = el("button", row);
          btn.textContent = "sketch…";
          btn.addEventListener("click", () => {
            this.view?.selectParam(schema.name);
            this.view?.setMode("sketch");
            this.renderToolbar();
          });
        }
        row.addEventListener("click", () => {
          this.view?.selectParam(schema.name);
        });
      }
    }
  }

  playSnapBack(): void {
    const animation = this.drag?.takeSnapBack();
    if (!animation) {
      return;
    }
    // Snap-back animation stand-in: flash the viewport border and show
    // the violated constraint as a tooltip-style notice.
    this.canvas.style.outline = "3px solid orange";
    setTimeout(() => {
      this.canvas.style.outline = "";
    }, 400);
    this.renderNotices();
  }

  // -- toolbar / sidebar ---------------------------------------------------

  renderToolbar(): void {
    this.toolbar.replaceChildren();
    for (const mode of MODES) {
      const btn = el("button", this.toolbar);
      btn.textContent = mode.replace("_", " ");
      btn.disabled = this.view?.mode === mode;
      btn.addEventListener("click", () => {
        if (this.view?.setMode(mode) === false) {
          this.store?.notices.push({
            level: "info",
            message: "sketch mode needs a curve parameter selected",
          });
          this.renderNotices();
        }
        this.renderToolbar();
      });
    }
  }

  renderSidebar(): void {
    this.sidebar.replaceChildren();
    const store = this.store;
    if (store === null) {
      return;
    }

    const scan = el("div", this.sidebar, "block");
    el("h3", scan).textContent = "environment";
    const file = el("input", scan);
    file.type = "file";
    file.addEventListener("change", () => {
      const f = file.files?.[0];
      if (!f) {
        return;
      }
      void f.arrayBuffer().then(async (data) => {
        const format = f.name.toLowerCase().endsWith(".ply") ? "ply" : "obj";
        const scene = await this.api.uploadEnvironment(data, format);
        this.planes = scene.planes;
        await store.attachScene(scene.scene_id);
        this.renderSidebar();
      });
    });
    if (this.planes.length > 0) {
      const list = el("ul", scan);
      for (const p of this.planes) {
        el("li", list).textContent = `plane at y=${p.height.toFixed(3)} m (${p.inlier_count} inliers)`;
      }
    }

    const ergo = el("div", this.sidebar, "block");
    el("h3", ergo).textContent = "body profiles";
    const stature = el("input", ergo);
    stature.type = "number";
    stature.step = "0.01";
    stature.placeholder = "stature (m)";
    const apply = el("button", ergo);
    apply.textContent = "apply";
    apply.addEventListener("click", () => {
      const s = Number(stature.value);
      if (Number.isFinite(s) && s > 0) {
        void store.setProfiles([{ stature: s }]);
      }
    });

    const est = el("div", this.sidebar, "block");
    el("h3", est).textContent = "estimations";
    const stabBtn = el("button", est);
    stabBtn.textContent = "stability";
    const stabOut = el("div", est, "readout");
    stabBtn.addEventListener("click", () => {
      stabOut.textContent = "simulating…";
      void this.api
        .estimateStability(store.sessionId)
        .then((report) => {
          this.stability = buildStabilityOverlay(report);
          stabOut.textContent = `${this.stability.verdict}, margin ${(this.stability.marginMeters * 1000).toFixed(1)} mm`;
          this.draw();
        })
        .catch((error: unknown) => {
          stabOut.textContent = String(error);
        });
    });
    const lightBtn = el("button", est);
    lightBtn.textContent = "lighting";
    const lightOut = el("div", est, "readout");
    lightBtn.addEventListener("click", () => {
      lightOut.textContent = "sampling…";
      const eye = cameraPosition(this.view!.camera);
      void this.api
        .estimateLighting(store.sessionId, [eye[0], eye[1] + 0.5, eye[2]])
        .then((report) => {
          this.lighting = buildLightingOverlay(report);
          lightOut.textContent = `shadow coverage ${(100 * this.lighting.coverage).toFixed(1)} %`;
          this.draw();
        })
        .catch((error: unknown) => {
          lightOut.textContent = String(error);
        });
    });

    const exportBtn = el("button", this.sidebar);
    exportBtn.textContent = "export STL";
    exportBtn.addEventListener("click", () => {
      void this.api.exportStl(store.sessionId).then((data) => {
        const a = document.createElement("a");
        a.href = URL.createObjectURL(new Blob([data]));
        a.download = `${store.design.id}.stl`;
        a.click();
      });
    });
  }

  renderNotices(): void {
    const notices = this.store?.notices ?? [];
    this.noticeRoot.replaceChildren();
    for (const notice of notices.slice(-5)) {
      el("div", this.noticeRoot, `notice ${notice.level}`).textContent =
        notice.message;
    }
  }

  // -- viewport ------------------------------------------------------------

  private unprojectOnPlane(
    px: number,
    py: number,
    planePoint: Vec3,
    planeNormal: Vec3,
  ): Vec3 | null {
    const camera = this.view!.camera;
    const eye = cameraPosition(camera);
    const f: Vec3 = [
      camera.target[0] - eye[0],
      camera.target[1] - eye[1],
      camera.target[2] - eye[2],
    ];
    const fn = Math.hypot(f[0], f[1], f[2]) || 1;
    const fwd: Vec3 = [f[0] / fn, f[1] / fn, f[2] / fn];
    const right: Vec3 = [
      fwd[1] * 0 - fwd[2] * 1,
      fwd[2] * 0 - fwd[0] * 0,
      fwd[0] * 1 - fwd[1] * 0,
    ];
    const rn = Math.hypot(right[0], right[1], right[2]) || 1;
    const r: Vec3 = [right[0] / rn, right[1] / rn, right[2] / rn];
    const u: Vec3 = [
      r[1] * fwd[2] - r[2] * fwd[1],
      r[2] * fwd[0] - r[0] * fwd[2],
      r[0] * fwd[1] - r[1] * fwd[0],
    ];
    const { width, height } = this.canvas;
    const focal = 1.2 * Math.min(width, height);
    const sx = (px - width / 2) / focal;
    const sy = (height / 2 - py) / focal;
    const dir: Vec3 = [
      fwd[0] + sx * r[0] + sy * u[0],
      fwd[1] + sx * r[1] + sy * u[1],
      fwd[2] + sx * r[2] + sy * u[2],
    ];
    const denom =
      dir[0] * planeNormal[0] + dir[1] * planeNormal[1] + dir[2] * planeNormal[2];
    if (Math.abs(denom) < 1e-9) {
      return null;
    }
    const t =
      ((planePoint[0] - eye[0]) * planeNormal[0] +
        (planePoint[1] - eye[1]) * planeNormal[1] +
        (planePoint[2] - eye[2]) * planeNormal[2]) /
      denom;
    if (t <= 0) {
      return null;
    }
    return [eye[0] + t * dir[0], eye[1] + t * dir[1], eye[2] + t * dir[2]];
  }

  private bindPointer(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    this.canvas.addEventListener("pointerdown", (event) => {
      if (this.view === null) {
        return;
      }
      dragging = true;
      lastX = event.offsetX;
      lastY = event.offsetY;
      const mode = this.view.mode;
      if (mode === "sketch") {
        this.sketchTool?.begin();
      } else if (mode === "measure") {
        const hit = this.unprojectOnPlane(
          event.offsetX,
          event.offsetY,
          [0, this.planes[0]?.height ?? 0, 0],
          [0, 1, 0],
        );
        if (hit !== null) {
          const m = this.measureTool?.pick(hit);
          if (m && this.view.selectedParam) {
            void this.measureTool?.assignTo(this.view.selectedParam);
          }
        }
      }
    });
    this.canvas.addEventListener("pointermove", (event) => {
      if (!dragging || this.view === null) {
        return;
      }
      const mode = this.view.mode;
      if (mode === "navigate") {
        this.view.camera.azimuth -= (event.offsetX - lastX) * 0.01;
        this.view.camera.elevation = Math.max(
          -1.4,
          Math.min(1.4, this.view.camera.elevation + (event.offsetY - lastY) * 0.01),
        );
        this.draw();
      } else if (mode === "sketch") {
        const fwd = this.view.viewDir();
        const hit = this.unprojectOnPlane(
          event.offsetX,
          event.offsetY,
          this.view.camera.target,
          fwd,
        );
        if (hit !== null) {
          this.sketchTool?.addSample(hit, performance.now() / 1000);
        }
      } else if (mode === "place") {
        const plane = this.planes[0];
        if (plane !== undefined) {
          const hit = this.unprojectOnPlane(
            event.offsetX,
            event.offsetY,
            [0, plane.height, 0],
            [0, 1, 0],
          );
          if (hit !== null) {
            void this.placeTool?.placeOn(plane, hit[0], hit[2]);
          }
        }
      }
      lastX = event.offsetX;
      lastY = event.offsetY;
    });
    this.canvas.addEventListener("pointerup", () => {
      dragging = false;
      if (this.view?.mode === "sketch" && (this.sketchTool?.sampleCount ?? 0) > 4) {
        void this.sketchTool?.finish().then(() => this.renderNotices());
      }
    });
    this.canvas.addEventListener("wheel", (event) => {
      if (this.view === null) {
        return;
      }
      event.preventDefault();
      this.view.camera.distance = Math.max(
        0.2,
        this.view.camera.distance * (event.deltaY > 0 ? 1.1 : 0.9),
      );
      this.draw();
    });
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null || this.view === null) {
      return;
    }
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.lighting !== null) {
      drawShadowRaster(ctx, this.lighting, this.view.camera);
    }
    if (this.mesh !== null && this.store !== null) {
      drawMesh(ctx, this.mesh, this.store.state.pose, this.view.camera, "#333");
    }
    if (this.stability !== null && this.mesh !== null) {
      drawStabilityGhost(ctx, this.mesh, this.stability, this.view.camera);
    }
  }
}

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app root element");
}
new App(root);
