/** Session store: the single source of truth the views render from.
 *
 * Every mutation goes through one RequestQueue so the service observes
 * interaction order. The store only ever displays state the service
 * returned; after `quiesce()` the committed values are re-read from
 * GET /sessions, so the UI can never keep showing a committed value the
 * service disagrees with. Errors become non-modal notices, and a stale
 * `expected_version` conflict (409) triggers a refetch instead of a
 * retry.
 */

import { ApiClient, ApiError } from "./api.js";
import { RequestQueue } from "./queue.js";
import type {
  BodyProfile,
  DesignSummary,
  PatchResult,
  SessionState,
  SketchResult,
  StrokePayload,
  Vec3,
  Violation,
} from "./types.js";

export interface Notice {
  level: "info" | "error";
  message: string;
}

export interface SnapBackEvent {
  parameter: string;
  attempted: unknown;
  restored: unknown;
  violation: Violation | undefined;
}

export type CommitOutcome =
  | { kind: "committed"; state: SessionState }
  | { kind: "snapped_back"; state: SessionState; event: SnapBackEvent }
  | { kind: "conflict"; state: SessionState }
  | { kind: "error"; notice: Notice };

type Listener = (store: SessionStore) => void;

export class SessionStore {
  readonly queue = new RequestQueue();
  readonly notices: Notice[] = [];

  private _design: DesignSummary | null = null;
  private _state: SessionState | null = null;
  private listeners: Listener[] = [];
  private snapBackListeners: ((event: SnapBackEvent) => void)[] = [];

  constructor(readonly api: ApiClient) {}

  get design(): DesignSummary {
    if (this._design === null) {
      throw new Error("store not initialized: call open() first");
    }
    return this._design;
  }

  get state(): SessionState {
    if (this._state === null) {
      throw new Error("store not initialized: call open() first");
    }
    return this._state;
  }

  get sessionId(): string {
    return this.state.session_id;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  onSnapBack(listener: (event: SnapBackEvent) => void): void {
    this.snapBackListeners.push(listener);
  }

  private apply(state: SessionState): SessionState {
    this._state = state;
    for (const listener of this.listeners) {
      listener(this);
    }
    return state;
  }

  private notify(notice: Notice): Notice {
    this.notices.push(notice);
    for (const listener of this.listeners) {
      listener(this);
    }
    return notice;
  }

  async open(designId: string): Promise<SessionState> {
    const designs = await this.api.listDesigns();
    const design = designs.find((d) => d.id === designId);
    if (design === undefined) {
      throw new Error(`unknown design ${designId}`);
    }
    this._design = design;
    return this.queue.enqueue(async () =>
      this.apply(await this.api.createSession(designId)),
    );
  }

  /** Re-read the authoritative session state from the service. */
  refetch(): Promise<SessionState> {
    return this.queue.enqueue(async () =>
      this.apply(await this.api.getSession(this.sessionId)),
    );
  }

  /** Wait for every in-flight mutation, then reconcile with the service. */
  async quiesce(): Promise<SessionState> {
    await this.queue.whenIdle();
    return this.refetch();
  }

  private handlePatch(
    name: string,
    value: unknown,
    result: PatchResult,
  ): CommitOutcome {
    if (result.snapped_back) {
      const event: SnapBackEvent = {
        parameter: name,
        attempted: value,
        restored: result.values[name],
        violation: result.violation,
      };
      this.apply(result);
      for (const listener of this.snapBackListeners) {
        listener(event);
      }
      this.notify({
        level: "error",
        message:
          result.violation?.message ?? `commit of ${name} snapped back`,
      });
      return { kind: "snapped_back", state: result, event };
    }
    return { kind: "committed", state: this.apply(result) };
  }

  private async guarded(
    run: () => Promise<CommitOutcome>,
  ): Promise<CommitOutcome> {
    try {
      return await run();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        const state = this.apply(await this.api.getSession(this.sessionId));
        this.notify({
          level: "error",
          message: "edit raced another change; refreshed from the service",
        });
        return { kind: "conflict", state };
      }
      const message = error instanceof Error ? error.message : String(error);
      return { kind: "error", notice: this.notify({ level: "error", message }) };
    }
  }

  commitParam(
    name: string,
    value: unknown,
    options: { guard?: boolean } = {},
  ): Promise<CommitOutcome> {
    return this.queue.enqueue(() =>
      this.guarded(async () => {
        const expected = options.guard ? this.state.mesh_version : undefined;
        const result = await this.api.patchParam(
          this.sessionId,
          name,
          value,
          "commit",
          expected,
        );
        return this.handlePatch(name, value, result);
      }),
    );
  }

  previewParam(name: string, value: unknown): Promise<CommitOutcome> {
    return this.queue.enqueue(() =>
      this.guarded(async () => {
        const result = await this.api.patchParam(
          this.sessionId,
          name,
          value,
          "preview",
        );
        return this.handlePatch(name, value, result);
      }),
    );
  }

  setPose(position: Vec3, yaw: number): Promise<SessionState> {
    return this.queue.enqueue(async () =>
      this.apply(await this.api.putPose(this.sessionId, position, yaw)),
    );
  }

  setProfiles(profiles: BodyProfile[]): Promise<SessionState> {
    return this.queue.enqueue(async () =>
      this.apply(await this.api.putProfiles(this.sessionId, profiles)),
    );
  }

  attachScene(sceneId: string): Promise<SessionState> {
    return this.queue.enqueue(async () =>
      this.apply(await this.api.attachEnvironment(this.sessionId, sceneId)),
    );
  }

  submitSketch(
    stroke: StrokePayload,
    param: string,
  ): Promise<SketchResult> {
    return this.queue.enqueue(async () => {
      const result = await this.api.postSketch(this.sessionId, stroke, param);
      this.handlePatch(param, "<sketch>", result);
      if (result.fit.modified_by_constraints) {
        this.notify({
          level: "info",
          message: "fitted curve was adjusted to satisfy constraints",
        });
      }
      return result;
    });
  }
}
