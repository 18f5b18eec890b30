/** Versioned mesh polling.
 *
 * The service bumps `mesh_version` exactly when the displayed mesh
 * changes; the poller asks with the version it already has and treats
 * 304 as "nothing to do". During drags the UI polls at 10 Hz; idle
 * polling is slower, and the poller never overlaps requests.
 */

import type { ApiClient } from "./api.js";
import type { MeshJson } from "./types.js";

export const DRAG_POLL_MS = 100;
export const IDLE_POLL_MS = 500;

export class MeshPoller {
  private _mesh: MeshJson | null = null;
  private _version: number | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private ticking = false;
  private intervalMs = IDLE_POLL_MS;

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
    private readonly onMesh: (mesh: MeshJson) => void,
  ) {}

  get mesh(): MeshJson | null {
    return this._mesh;
  }

  get version(): number | null {
    return this._version;
  }

  /** One poll round-trip; resolves true when a new mesh arrived. */
  async tick(): Promise<boolean> {
    if (this.ticking) {
      return false;
    }
    this.ticking = true;
    try {
      const result = await this.api.getMesh(
        this.sessionId,
        this._version ?? undefined,
      );
      if (result.kind === "not_modified") {
        return false;
      }
      this._mesh = result.mesh;
      this._version = result.mesh.mesh_version;
      this.onMesh(result.mesh);
      return true;
    } finally {
      this.ticking = false;
    }
  }

  setDragging(dragging: boolean): void {
    this.intervalMs = dragging ? DRAG_POLL_MS : IDLE_POLL_MS;
    if (this.timer !== null) {
      this.stop();
      this.start();
    }
  }

  start(): void {
    if (this.timer !== null) {
      return;
    }
    const loop = () => {
      this.timer = setTimeout(loop, this.intervalMs);
      void this.tick().catch(() => undefined);
    };
    this.timer = setTimeout(loop, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}
