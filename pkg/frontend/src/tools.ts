/** Interaction tools: sketch capture, measurement binding, placement.
 *
 * Each tool is a small state machine over 3D points the viewport hands
 * it (pointer rays intersected with the sketch plane, design geometry,
 * or a detected support plane). They never talk to the DOM.
 */

import { decimateStroke, SKETCH_POINT_CAP } from "./decimate.js";
import type { SessionStore, CommitOutcome } from "./store.js";
import type {
  PlaneSummary,
  SessionState,
  SketchResult,
  Vec3,
} from "./types.js";
import type { ViewState } from "./viewstate.js";

/** Captures a freehand stroke on a view-aligned plane and submits it
 * against the selected curve parameter. */
export class SketchTool {
  private points: number[][] = [];
  private timestamps: number[] = [];

  constructor(
    private readonly store: SessionStore,
    private readonly view: ViewState,
    private readonly cap: number = SKETCH_POINT_CAP,
  ) {}

  get sampleCount(): number {
    return this.points.length;
  }

  begin(): void {
    this.points = [];
    this.timestamps = [];
  }

  addSample(point: Vec3, timeSec: number): void {
    this.points.push([point[0], point[1], point[2]]);
    this.timestamps.push(timeSec);
  }

  /** Decimate to the payload cap and submit; the camera forward vector
   * rides along as the stroke's view direction. */
  async finish(): Promise<SketchResult> {
    const param = this.view.selectedParam;
    if (param === null || !this.view.sketchAvailable()) {
      throw new Error("sketch mode needs a selected curve parameter");
    }
    const stroke = decimateStroke(
      this.points,
      this.timestamps,
      this.view.viewDir(),
      this.cap,
    );
    return this.store.submitSketch(stroke, param);
  }
}

export interface Measurement {
  a: Vec3;
  b: Vec3;
  distance: number;
}

/** Two picks on environment or design geometry give a distance that can
 * be assigned to the selected length parameter in one click. */
export class MeasureTool {
  private first: Vec3 | null = null;
  private _measurement: Measurement | null = null;

  get measurement(): Measurement | null {
    return this._measurement;
  }

  constructor(private readonly store: SessionStore) {}

  pick(point: Vec3): Measurement | null {
    if (this.first === null) {
      this.first = point;
      this._measurement = null;
      return null;
    }
    const a = this.first;
    const d = Math.hypot(
      point[0] - a[0],
      point[1] - a[1],
      point[2] - a[2],
    );
    this.first = null;
    this._measurement = { a, b: point, distance: d };
    return this._measurement;
  }

  clear(): void {
    this.first = null;
    this._measurement = null;
  }

  /** Bind the measured distance to a parameter (a commit, so the usual
   * snap-back contract applies). */
  assignTo(param: string): Promise<CommitOutcome> {
    if (this._measurement === null) {
      throw new Error("no measurement to assign: pick two points first");
    }
    return this.store.commitParam(param, this._measurement.distance);
  }
}

/** Drag on a detected plane to position the design; a single-axis ring
 * rotates it about the vertical. */
export class PlaceTool {
  constructor(private readonly store: SessionStore) {}

  placeOn(
    plane: PlaneSummary,
    x: number,
    z: number,
    yaw?: number,
  ): Promise<SessionState> {
    const currentYaw = yaw ?? this.store.state.pose.yaw;
    return this.store.setPose([x, plane.height, z], currentYaw);
  }

  rotateTo(yaw: number): Promise<SessionState> {
    const p = this.store.state.pose.position;
    return this.store.setPose([p[0]!, p[1]!, p[2]!], yaw);
  }
}
