/** Parameter panel model: one control per parameter, grouped as the
 * design declares, with recommended ergonomic ranges as highlighted
 * slider bands.
 *
 * Interaction contract: dragging sends preview PATCHes (coalesced so at
 * most one preview per parameter is in flight — the latest pointer value
 * wins), release sends the commit. A snap-back reverts the control to
 * the prior committed value and records an animation descriptor the view
 * plays back.
 */

import type { SessionStore } from "./store.js";
import type {
  DesignSummary,
  ParamSchema,
  RecommendedRange,
  SessionState,
} from "./types.js";
import type { CommitOutcome } from "./store.js";

export interface Control {
  schema: ParamSchema;
  value: unknown;
  /** Ergonomic band to highlight on the slider, if any. */
  band: RecommendedRange | null;
  clamped: boolean;
}

export interface PanelGroup {
  group: string;
  controls: Control[];
}

export function panelGroups(
  design: DesignSummary,
  state: SessionState,
): PanelGroup[] {
  const groups = new Map<string, Control[]>();
  for (const schema of design.parameters) {
    const control: Control = {
      schema,
      value: state.values[schema.name],
      band: state.recommended_ranges[schema.name] ?? null,
      clamped: state.clamped.includes(schema.name),
    };
    const list = groups.get(schema.group);
    if (list === undefined) {
      groups.set(schema.group, [control]);
    } else {
      list.push(control);
    }
  }
  return [...groups.entries()].map(([group, controls]) => ({
    group,
    controls,
  }));
}

export interface SnapBackAnimation {
  parameter: string;
  from: unknown;
  to: unknown;
  message: string;
}

export class DragController {
  /** Latest not-yet-sent pointer value per dragged parameter. */
  private latest = new Map<string, unknown>();
  private pumps = new Map<string, Promise<void>>();
  private _lastSnapBack: SnapBackAnimation | null = null;

  constructor(private readonly store: SessionStore) {
    store.onSnapBack((event) => {
      this._lastSnapBack = {
        parameter: event.parameter,
        from: event.attempted,
        to: event.restored,
        message: event.violation?.message ?? "constraint violated",
      };
    });
  }

  /** The animation the viewport should play, cleared on read. */
  takeSnapBack(): SnapBackAnimation | null {
    const animation = this._lastSnapBack;
    this._lastSnapBack = null;
    return animation;
  }

  dragTo(name: string, value: unknown): void {
    this.latest.set(name, value);
    if (!this.pumps.has(name)) {
      const pump = this.pump(name).finally(() => {
        this.pumps.delete(name);
      });
      this.pumps.set(name, pump);
    }
  }

  private async pump(name: string): Promise<void> {
    while (this.latest.has(name)) {
      const value = this.latest.get(name);
      this.latest.delete(name);
      await this.store.previewParam(name, value);
    }
  }

  async endDrag(name: string, value: unknown): Promise<CommitOutcome> {
    this.latest.delete(name);
    const pump = this.pumps.get(name);
    if (pump !== undefined) {
      await pump;
    }
    return this.store.commitParam(name, value, { guard: true });
  }
}
