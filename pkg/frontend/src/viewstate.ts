/** Viewport interaction state.
 *
 * Exactly one mode is active at a time; sketch mode is only reachable
 * while a curve parameter is selected (the fitted path has to land
 * somewhere). The camera is a simple orbit rig — its forward vector is
 * what sketch strokes report as `view_dir`.
 */

import type { DesignSummary, Vec3 } from "./types.js";

export type Mode = "navigate" | "drag_handle" | "sketch" | "measure" | "place";

export interface CameraPose {
  target: Vec3;
  distance: number;
  /** Orbit angles in radians. */
  azimuth: number;
  elevation: number;
}

export function cameraForward(camera: CameraPose): Vec3 {
  const cosE = Math.cos(camera.elevation);
  return [
    -cosE * Math.sin(camera.azimuth),
    -Math.sin(camera.elevation),
    -cosE * Math.cos(camera.azimuth),
  ];
}

export class ViewState {
  camera: CameraPose = {
    target: [0, 0.2, 0],
    distance: 1.5,
    azimuth: 0,
    elevation: 0.3,
  };
  private _mode: Mode = "navigate";
  private _selected: string | null = null;

  constructor(private readonly design: DesignSummary) {}

  get mode(): Mode {
    return this._mode;
  }

  get selectedParam(): string | null {
    return this._selected;
  }

  selectParam(name: string | null): void {
    if (name !== null && !this.design.parameters.some((p) => p.name === name)) {
      throw new Error(`unknown parameter ${name}`);
    }
    this._selected = name;
    if (this._mode === "sketch" && !this.sketchAvailable()) {
      this._mode = "navigate";
    }
  }

  sketchAvailable(): boolean {
    const schema = this.design.parameters.find(
      (p) => p.name === this._selected,
    );
    return schema !== undefined && schema.kind === "curve";
  }

  /** Returns false (and stays put) when the mode is not available. */
  setMode(mode: Mode): boolean {
    if (mode === "sketch" && !this.sketchAvailable()) {
      return false;
    }
    this._mode = mode;
    return true;
  }

  viewDir(): Vec3 {
    return cameraForward(this.camera);
  }
}
