/** Typed fetch client for the paramcad service.
 *
 * Every method maps to exactly one endpoint; the client adds no caching
 * or retries of its own — ordering and coalescing live in RequestQueue.
 */

import type {
  BodyProfile,
  CheckReportJson,
  DesignSummary,
  LightingReportJson,
  MeshJson,
  PatchResult,
  RequirementSpecJson,
  SceneSummary,
  SessionState,
  SketchResult,
  StabilityReportJson,
  StrokePayload,
  Vec3,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export type MeshResult =
  | { kind: "mesh"; mesh: MeshJson }
  | { kind: "not_modified" };

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body && body.detail !== undefined) {
      detail = String(body.detail);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  private async json<T>(
    path: string,
    init?: RequestInit,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      await fail(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  private put<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listDesigns(): Promise<DesignSummary[]> {
    return this.json("/designs");
  }

  createSession(designId: string): Promise<SessionState> {
    return this.post("/sessions", { design_id: designId });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.json(`/sessions/${sessionId}`);
  }

  patchParam(
    sessionId: string,
    name: string,
    value: unknown,
    mode: "commit" | "preview" = "commit",
    expectedVersion?: number,
  ): Promise<PatchResult> {
    const body: Record<string, unknown> = { name, value, mode };
    if (expectedVersion !== undefined) {
      body["expected_version"] = expectedVersion;
    }
    return this.json(`/sessions/${sessionId}/params`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  putPose(
    sessionId: string,
    position: Vec3,
    yaw: number,
  ): Promise<SessionState> {
    return this.put(`/sessions/${sessionId}/pose`, { position, yaw });
  }

  putProfiles(
    sessionId: string,
    profiles: BodyProfile[],
  ): Promise<SessionState> {
    return this.put(`/sessions/${sessionId}/profiles`, profiles);
  }

  postSketch(
    sessionId: string,
    stroke: StrokePayload,
    param: string,
  ): Promise<SketchResult> {
    return this.post(`/sessions/${sessionId}/sketch`, { stroke, param });
  }

  uploadEnvironment(
    data: string | ArrayBuffer | Uint8Array,
    format: "obj" | "ply",
    axisUp: "y" | "z" = "y",
  ): Promise<SceneSummary> {
    const body =
      data instanceof Uint8Array
        ? (data.slice().buffer as ArrayBuffer)
        : data;
    return this.json(`/environment?format=${format}&axis_up=${axisUp}`, {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body,
    });
  }

  attachEnvironment(
    sessionId: string,
    sceneId: string,
  ): Promise<SessionState> {
    return this.put(`/sessions/${sessionId}/environment`, {
      scene_id: sceneId,
    });
  }

  estimateStability(
    sessionId: string,
    releaseTiltDeg?: number,
  ): Promise<StabilityReportJson> {
    const body =
      releaseTiltDeg === undefined
        ? {}
        : { release_tilt_deg: releaseTiltDeg };
    return this.post(`/sessions/${sessionId}/estimate/stability`, body);
  }

  estimateLighting(
    sessionId: string,
    position: Vec3,
    intensity = 1.0,
  ): Promise<LightingReportJson> {
    return this.post(`/sessions/${sessionId}/estimate/lighting`, {
      light: { position, intensity },
    });
  }

  check(
    sessionId: string,
    spec: RequirementSpecJson,
  ): Promise<CheckReportJson> {
    return this.post(`/sessions/${sessionId}/check`, spec);
  }

  async getMesh(sessionId: string, version?: number): Promise<MeshResult> {
    const query = version === undefined ? "" : `?version=${version}`;
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/mesh${query}`,
    );
    if (response.status === 304) {
      return { kind: "not_modified" };
    }
    if (!response.ok) {
      await fail(response);
    }
    return { kind: "mesh", mesh: (await response.json()) as MeshJson };
  }

  async exportStl(sessionId: string): Promise<ArrayBuffer> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/export.stl`,
    );
    if (!response.ok) {
      await fail(response);
    }
    return response.arrayBuffer();
  }
}
