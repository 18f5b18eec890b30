/** JSON payload shapes of the paramcad HTTP service.
 *
 * These mirror the service responses one-to-one; the UI never invents
 * fields of its own on top of them.
 */

export type Vec3 = [number, number, number];

/** Control points of one cubic segment: [p0, p1, p2, p3], each [x, y]. */
export type CurveSegment = [number, number][];
export type CurvePath = CurveSegment[];

export type ParamKind =
  | "continuous"
  | "discrete"
  | "option"
  | "boolean"
  | "text"
  | "curve";

export interface ParamSchema {
  name: string;
  group: string;
  ergonomic_tag: string | null;
  has_handle: boolean;
  default: unknown;
  kind: ParamKind;
  lo?: number;
  hi?: number;
  unit?: string;
  levels?: number[];
  labels?: string[];
  max_len?: number;
  segment_budget?: number;
  plane?: string;
}

export interface DesignSummary {
  id: string;
  name: string;
  generator: string;
  groups: string[];
  parameters: ParamSchema[];
  constraints: string[];
}

export interface Violation {
  parameter: string;
  message: string;
}

export interface RecommendedRange {
  lo: number;
  hi: number;
  compromise: boolean;
}

export interface SessionState {
  session_id: string;
  design_id: string;
  values: Record<string, unknown>;
  pose: { position: number[]; yaw: number };
  valid: boolean;
  violations: Violation[];
  invalid_preview: boolean;
  clamped: string[];
  previewing: boolean;
  recommended_ranges: Record<string, RecommendedRange>;
  env_id: string | null;
  mesh_version: number;
}

export interface PatchResult extends SessionState {
  snapped_back: boolean;
  violation?: Violation;
}

export interface FitSummary {
  path: CurvePath;
  max_deviation: number;
  modified_by_constraints: boolean;
}

export interface SketchResult extends PatchResult {
  fit: FitSummary;
}

export interface StrokePayload {
  points: number[][];
  timestamps: number[];
  view_dir: Vec3;
}

export interface PlaneSummary {
  height: number;
  inlier_count: number;
  normal: number[];
}

export interface SceneSummary {
  scene_id: string;
  triangle_count: number;
  planes: PlaneSummary[];
}

export interface BodyProfile {
  stature: number;
  build?: "slim" | "average" | "broad";
}

export interface RigidTransformJson {
  position: number[];
  rotation: number[][];
}

export interface StabilityReportJson {
  toppled: boolean;
  settled: boolean;
  settled_pose: RigidTransformJson;
  quasi_static_margin: number;
  contact_points: number[][];
  trace: { t: number; position: number[]; up_deviation_deg: number }[];
}

export interface LightingReportJson {
  shadow_coverage: number;
  mean_illuminance: number;
  raster_extent: number;
  raster_center: number[];
  floor_height: number;
  raster_size: number;
  sample_count: number;
  occluded_count: number;
  raster_pgm_base64: string;
}

export interface RequirementSpecJson {
  clauses: Record<string, unknown>[];
}

export interface ClauseResultJson {
  clause: Record<string, unknown>;
  passed: boolean;
  measured: number | null;
  detail: string;
}

export interface CheckReportJson {
  passed: boolean;
  results: ClauseResultJson[];
}

export interface MeshJson {
  vertices: number[][];
  triangles: number[][];
  parts: Record<string, [number, number]>;
  mesh_version: number;
}
