"""Session-oriented HTTP facade over the design kernel.

Sessions hold a committed configuration (always commit-valid between
requests) plus an optional transient preview. Snap-backs are domain outcomes,
reported as HTTP 200 with `snapped_back: true`. Mesh delivery is polled with
a monotonically increasing `mesh_version`.
"""

from __future__ import annotations

import base64
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import core, dsl, environment, ergonomics, estimators, sketch
from .core import Configuration, Design, EditMode, SnapBackResult
from .curves import R_MIN, path_from_lists, path_to_lists
from .errors import ParamCadError
from .geometry import diagnose, export_stl, generate_mesh, mesh_to_json


@dataclass
class Session:
    session_id: str
    design: Design
    committed: Configuration
    preview: Optional[Configuration] = None
    env_id: Optional[str] = None
    mesh_version: int = 1
    profiles: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    sim_lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def current(self) -> Configuration:
        return self.preview if self.preview is not None else self.committed


# --------------------------------------------------------------------------
# JSON codecs
# --------------------------------------------------------------------------

def value_to_json(kind, value) -> Any:
    if isinstance(kind, core.Curve):
        return {"curve": path_to_lists(value)}
    return value


def value_from_json(kind, raw) -> Any:
    if isinstance(kind, core.Curve):
        if isinstance(raw, dict) and "curve" in raw:
            raw = raw["curve"]
        try:
            return path_from_lists(raw)
        except (ValueError, TypeError) as exc:
            raise HTTPException(422, f"malformed curve value: {exc}")
    if isinstance(raw, list) or isinstance(raw, dict):
        raise HTTPException(422, "malformed parameter value")
    return raw


def kind_schema(kind) -> dict:
    if isinstance(kind, core.Continuous):
        return {"kind": "continuous", "lo": kind.lo, "hi": kind.hi, "unit": kind.unit}
    if isinstance(kind, core.Discrete):
        return {"kind": "discrete", "levels": list(kind.levels), "unit": kind.unit}
    if isinstance(kind, core.Option):
        return {"kind": "option", "labels": list(kind.labels)}
    if isinstance(kind, core.Boolean):
        return {"kind": "boolean"}
    if isinstance(kind, core.Text):
        return {"kind": "text", "max_len": kind.max_len}
    return {"kind": "curve", "segment_budget": kind.segment_budget,
            "plane": kind.plane}


def design_summary(design: Design) -> dict:
    return {
        "id": design.design_id,
        "name": design.name,
        "generator": design.generator.generator,
        "groups": sorted({p.group for p in design.parameters}),
        "parameters": [
            {
                "name": p.name,
                "group": p.group,
                "ergonomic_tag": p.ergonomic_tag,
                "has_handle": p.handle is not None,
                "default": value_to_json(p.kind, p.default),
                **kind_schema(p.kind),
            }
            for p in design.parameters
        ],
        "constraints": [c.describe() for c in design.constraints],
    }


def session_state(s: Session) -> dict:
    config = s.current
    report = core.validate(s.design, config)
    ranges = {}
    if s.profiles:
        for p in s.design.parameters:
            if p.ergonomic_tag is None:
                continue
            try:
                r = ergonomics.reconcile(p.ergonomic_tag, s.profiles)
            except ParamCadError:
                continue
            ranges[p.name] = {"lo": r.lo, "hi": r.hi, "compromise": r.compromise}
    return {
        "session_id": s.session_id,
        "design_id": s.design.design_id,
        "values": {k: value_to_json(s.design.parameter(k).kind, v)
                   for k, v in config.values.items()},
        "pose": {"position": list(config.pose.position), "yaw": config.pose.yaw},
        "valid": report.valid,
        "violations": [{"parameter": v.parameter, "message": v.message}
                       for v in report.violations],
        "invalid_preview": config.invalid_preview,
        "clamped": list(config.clamped),
        "previewing": s.preview is not None,
        "recommended_ranges": ranges,
        "env_id": s.env_id,
        "mesh_version": s.mesh_version,
    }


# --------------------------------------------------------------------------
# App
# --------------------------------------------------------------------------

def create_app() -> FastAPI:
    app = FastAPI(title="paramcad", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    scenes: dict[str, environment.EnvironmentScene] = {}
    app.state.sessions = sessions
    app.state.scenes = scenes

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return s

    def get_scene(s: Session) -> environment.EnvironmentScene:
        if s.env_id is None or s.env_id not in scenes:
            raise HTTPException(422, "session has no environment scan attached")
        return scenes[s.env_id]

    def domain_error(exc: ParamCadError) -> HTTPException:
        return HTTPException(422, f"{type(exc).__name__}: {exc}")

    def session_mesh(s: Session):
        config = s.current
        if core.validate(s.design, config).valid:
            return generate_mesh(s.design, config)
        return generate_mesh(s.design, s.committed)

    @app.get("/designs")
    def list_designs():
        return [design_summary(d) for d in dsl.list_builtin()]

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        design_id = body.get("design_id")
        try:
            design = dsl.get_builtin(design_id)
        except ParamCadError:
            raise HTTPException(404, f"unknown design {design_id!r}")
        s = Session(uuid.uuid4().hex, design, core.default_configuration(design))
        sessions[s.session_id] = s
        return session_state(s)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return session_state(get_session(session_id))

    @app.patch("/sessions/{session_id}/params")
    def patch_param(session_id: str, body: dict):
        s = get_session(session_id)
        name = body.get("name")
        mode = body.get("mode", EditMode.COMMIT)
        if mode not in (EditMode.COMMIT, EditMode.PREVIEW):
            raise HTTPException(422, f"unknown edit mode {mode!r}")
        if "value" not in body or not isinstance(name, str):
            raise HTTPException(422, "params patch needs name and value")
        with s.lock:
            expected = body.get("expected_version")
            if expected is not None and expected != s.mesh_version:
                raise HTTPException(409, "stale mesh_version precondition")
            try:
                p = s.design.parameter(name)
                value = value_from_json(p.kind, body["value"])
                result = core.set_parameter(s.design, s.committed, name,
                                            value, mode)
            except ParamCadError as exc:
                raise domain_error(exc)
            if isinstance(result, SnapBackResult):
                if s.preview is not None:
                    s.preview = None
                    s.mesh_version += 1  # displayed mesh reverts to committed
                out = session_state(s)
                out["snapped_back"] = True
                out["violation"] = {"parameter": result.violation.parameter,
                                    "message": result.violation.message}
                return out
            if mode == EditMode.PREVIEW:
                s.preview = result
            else:
                s.committed = result
                s.preview = None
            s.mesh_version += 1
            out = session_state(s)
            out["snapped_back"] = False
            return out

    @app.put("/sessions/{session_id}/pose")
    def put_pose(session_id: str, body: dict):
        s = get_session(session_id)
        try:
            position = [float(x) for x in body["position"]]
            yaw = float(body["yaw"])
            if len(position) != 3:
                raise ValueError
        except (KeyError, TypeError, ValueError):
            raise HTTPException(422, "pose needs position [x,y,z] and yaw")
        with s.lock:
            s.committed = core.set_pose(s.committed, position, yaw)
            s.preview = None
            s.mesh_version += 1
            return session_state(s)

    @app.put("/sessions/{session_id}/profiles")
    async def put_profiles(session_id: str, request: Request):
        s = get_session(session_id)
        try:
            body = await request.json()
        except ValueError:
            raise HTTPException(422, "profiles must be a JSON array")
        if not isinstance(body, list):
            raise HTTPException(422, "profiles must be a JSON array")
        try:
            profiles = [ergonomics.BodyProfile(float(p["stature"]),
                                               p.get("build", "average"))
                        for p in body]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"malformed body profiles: {exc}")
        except ParamCadError as exc:
            raise domain_error(exc)
        with s.lock:
            s.profiles = profiles
            return session_state(s)

    @app.post("/sessions/{session_id}/sketch")
    def post_sketch(session_id: str, body: dict):
        s = get_session(session_id)
        try:
            stroke = sketch.Stroke(np.asarray(body["stroke"]["points"], dtype=float),
                                   np.asarray(body["stroke"]["timestamps"], dtype=float),
                                   tuple(body["stroke"]["view_dir"]))
            name = body["param"]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"malformed sketch payload: {exc}")
        with s.lock:
            try:
                p = s.design.parameter(name)
                if not isinstance(p.kind, core.Curve):
                    raise HTTPException(422, f"parameter {name!r} is not a curve")
                pts = sketch.project_stroke(stroke)
                pts[:, 0] += R_MIN - pts[:, 0].min()  # axis convention
                fit = sketch.fit_bezier_path(pts, p.kind.segment_budget)
                result, fit = sketch.apply_curve(s.design, s.committed, name, fit)
            except ParamCadError as exc:
                raise domain_error(exc)
            snapped = isinstance(result, SnapBackResult)
            if not snapped:
                s.committed = result
                s.preview = None
                s.mesh_version += 1
            elif s.preview is not None:
                s.preview = None
                s.mesh_version += 1
            out = session_state(s)
            out["snapped_back"] = snapped
            if snapped:
                out["violation"] = {"parameter": result.violation.parameter,
                                    "message": result.violation.message}
            out["fit"] = {"path": path_to_lists(fit.path),
                          "max_deviation": fit.max_deviation,
                          "modified_by_constraints": fit.modified_by_constraints}
            return out

    @app.post("/environment", status_code=201)
    async def post_environment(request: Request,
                               format: str = Query("obj"),
                               axis_up: str = Query("y")):
        data = await request.body()
        try:
            scene = environment.load_scene(data, format, axis_up)
        except ParamCadError as exc:
            raise domain_error(exc)
        scene_id = uuid.uuid4().hex
        scenes[scene_id] = scene
        return {
            "scene_id": scene_id,
            "triangle_count": int(len(scene.mesh.triangles)),
            "planes": [{"height": p.height(), "inlier_count": p.inlier_count,
                        "normal": list(p.normal)} for p in scene.planes],
        }

    @app.put("/sessions/{session_id}/environment")
    def put_environment(session_id: str, body: dict):
        s = get_session(session_id)
        scene_id = body.get("scene_id")
        if scene_id not in scenes:
            raise HTTPException(404, f"unknown scene {scene_id!r}")
        with s.lock:
            s.env_id = scene_id
            return session_state(s)

    @app.post("/sessions/{session_id}/estimate/stability")
    def post_stability(session_id: str, body: Optional[dict] = None):
        s = get_session(session_id)
        scene = get_scene(s)
        if not s.sim_lock.acquire(blocking=False):
            raise HTTPException(409, "a simulation is already running for this session")
        try:
            with s.lock:
                mesh = generate_mesh(s.design, s.committed)
            plane = _plane_under(scene, mesh)
            tilt = float((body or {}).get("release_tilt_deg",
                                          estimators.RELEASE_TILT_DEG))
            try:
                report = estimators.estimate_stability(mesh, scene, plane,
                                                       release_tilt_deg=tilt)
            except ParamCadError as exc:
                raise domain_error(exc)
            return report.to_json()
        finally:
            s.sim_lock.release()

    @app.post("/sessions/{session_id}/estimate/lighting")
    def post_lighting(session_id: str, body: dict):
        s = get_session(session_id)
        scene = get_scene(s)
        try:
            light = body["light"]
            position = [float(x) for x in light["position"]]
            intensity = float(light.get("intensity", 1.0))
        except (KeyError, TypeError, ValueError):
            raise HTTPException(422, "lighting needs light.position [x,y,z]")
        with s.lock:
            mesh = generate_mesh(s.design, s.committed)
        try:
            report = estimators.estimate_lighting(mesh, scene, position, intensity)
        except ParamCadError as exc:
            raise domain_error(exc)
        out = report.to_json()
        out["raster_pgm_base64"] = base64.b64encode(
            estimators.raster_to_pgm(report.shadow_raster)).decode("ascii")
        return out

    @app.post("/sessions/{session_id}/check")
    def post_check(session_id: str, body: dict):
        s = get_session(session_id)
        try:
            spec = estimators.RequirementSpec.from_json(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"malformed requirement spec: {exc}")
        scene = scenes.get(s.env_id) if s.env_id else None
        with s.lock:
            mesh = generate_mesh(s.design, s.committed)
            try:
                report = estimators.check_requirements(s.design, s.committed,
                                                       mesh, scene, spec)
            except ParamCadError as exc:
                raise domain_error(exc)
        return report.to_json()

    @app.get("/sessions/{session_id}/mesh")
    def get_mesh(session_id: str, version: Optional[int] = Query(None)):
        s = get_session(session_id)
        with s.lock:
            if version is not None and version == s.mesh_version:
                return Response(status_code=304)
            mesh = session_mesh(s)
            out = mesh_to_json(mesh)
            out["mesh_version"] = s.mesh_version
            return out

    @app.get("/sessions/{session_id}/export.stl")
    def get_stl(session_id: str):
        s = get_session(session_id)
        with s.lock:
            mesh = generate_mesh(s.design, s.committed)
        data = export_stl(mesh)
        return Response(content=data, media_type="model/stl",
                        headers={"Content-Disposition":
                                 f'attachment; filename="{s.design.design_id}.stl"'})

    return app


def _plane_under(scene: environment.EnvironmentScene, mesh) -> environment.SupportPlane:
    min_y = float(mesh.vertices[:, 1].min())
    below = [p for p in scene.planes if p.height() <= min_y + 1e-6]
    if not below:
        if scene.planes:
            return min(scene.planes, key=lambda p: p.height())
        raise HTTPException(422, "no support plane detected in the scan")
    return max(below, key=lambda p: p.height())


app = create_app()


def run(host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)
