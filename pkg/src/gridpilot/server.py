"""HTTP session service: the full pipeline behind a small JSON API.

Endpoints:
    POST   /sessions                    {scenario_name|scenario_text, strategy, backend}
    GET    /sessions/{id}/state
    POST   /sessions/{id}/instruction   {text}
    POST   /sessions/{id}/step          {ticks}
    POST   /sessions/{id}/event         {kind, ...}
    DELETE /sessions/{id}
    GET    /...                         static console files, when present

Occupancy and cost layers travel as run-length-encoded arrays; BLOCKED
encodes as the string "BLOCKED". Every mutation of a session happens
under its lock, so interleaved requests can never tear the state.
"""

import json
import os
import re
import secrets
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .actions import encode_action
from .data import list_bundled, read_bundled, resolve_scenario
from .episode import EpisodeRunner, episode_log_records
from .errors import GridPilotError, UnknownSession
from .grid import BLOCKED, CostLayer, GridState, OccupancyGrid, Region
from .instructions import RemoteBackend, ReplayBackend, RuleBasedBackend
from .landmarks import LANDMARK_KINDS
from .profiles import select_profile
from .world import ScenarioEvent, apply_event, load_scenario, step


def rle_encode(values):
    """[[value, run length], ...] with BLOCKED spelled out for JSON."""
    out = []
    for v in values:
        v = "BLOCKED" if v == BLOCKED else v
        if out and out[-1][0] == v:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def rle_decode(pairs):
    values = []
    for v, n in pairs:
        if v == "BLOCKED":
            v = BLOCKED
        values.extend([v] * n)
    return values


def grid_state_from_payload(payload):
    """Rebuild a GridState from a /state response (round-trip check helper)."""
    width, height = payload["width"], payload["height"]
    occ = OccupancyGrid(width, height, tuple(rle_decode(payload["occupancy"])))
    costs = CostLayer(width, height, tuple(float(v) for v in rle_decode(payload["cost_layer"])))
    goal = tuple(payload["goal"]) if payload.get("goal") else None
    return GridState(base=occ, occupancy=occ, costs=costs, goal=goal)


def make_backend(spec):
    spec = (spec or "rule").strip()
    if spec == "rule":
        return RuleBasedBackend()
    if spec == "remote":
        return RemoteBackend()
    if spec.startswith("replay:"):
        return ReplayBackend.from_file(spec.split(":", 1)[1])
    from .data import bundled_path

    bundled = bundled_path(f"replay_{spec}.json")
    if os.path.exists(bundled):
        return ReplayBackend.from_file(bundled, name=spec)
    raise GridPilotError(f"unknown backend spec {spec!r}", spec=spec)


class Session:
    def __init__(self, session_id, world, profile, backend, scenario_text):
        self.id = session_id
        self.world = world
        self.profile = profile
        self.backend = backend
        self.scenario_text = scenario_text
        self.runner = None
        self.lock = threading.Lock()
        self.journal = []

    def state_payload(self):
        world = self.runner.world if self.runner else self.world
        gs = world.grid_state
        landmarks = []
        for lm in world.registry:
            entry = {"name": lm.name, "kind": lm.kind, "cells": [list(c) for c in lm.region.cells()]}
            if lm.access:
                entry["access"] = list(lm.access)
            landmarks.append(entry)
        payload = {
            "tick": world.tick,
            "pose": {"x": world.pose.x, "y": world.pose.y, "theta": world.pose.theta},
            "width": gs.width,
            "height": gs.height,
            "occupancy": rle_encode(gs.occupancy.cells),
            "cost_layer": rle_encode(gs.costs.values),
            "goal": list(gs.goal) if gs.goal else None,
            "landmarks": landmarks,
            "pedestrians": [{"id": p.id, "pos": list(p.pos)} for p in world.pedestrians],
            "current_path": None,
            "metrics": None,
            "instruction": None,
            "outcome": None,
        }
        if self.runner:
            r = self.runner
            payload["instruction"] = r.instruction
            payload["outcome"] = r.log.outcome
            if r.path is not None:
                payload["current_path"] = [list(c) for c in r.path[r.path_index:]]
            if r.log.plans:
                p = r.log.plans[-1]
                payload["metrics"] = {
                    "nodes_expanded": p.nodes_expanded,
                    "search_time_s": p.search_time,
                    "path_cost": p.path_cost,
                    "path_length": p.path_length,
                    "turns": p.turns,
                }
        return payload


class SessionStore:
    def __init__(self, state_dir=None):
        self.sessions = {}
        self.lock = threading.Lock()
        self.state_dir = state_dir or os.environ.get("GRIDPILOT_STATE_DIR")

    def create(self, scenario_text, strategy, backend_spec):
        world = load_scenario(scenario_text)
        profile = select_profile(strategy or "Balance")
        backend = make_backend(backend_spec)
        session_id = secrets.token_hex(8)
        session = Session(session_id, world, profile, backend, scenario_text)
        with self.lock:
            self.sessions[session_id] = session
        self._persist(session)
        return session

    def get(self, session_id):
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"unknown session {session_id!r}", session_id=session_id)
        return session

    def delete(self, session_id):
        with self.lock:
            if session_id not in self.sessions:
                raise UnknownSession(f"unknown session {session_id!r}", session_id=session_id)
            del self.sessions[session_id]

    def _persist(self, session):
        if not self.state_dir:
            return
        os.makedirs(self.state_dir, exist_ok=True)
        doc = {
            "scenario_text": session.scenario_text,
            "strategy": session.profile.name,
            "backend": getattr(session.backend, "name", "rule"),
            "journal": session.journal,
        }
        with open(os.path.join(self.state_dir, f"{session.id}.json"), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)


def _event_from_json(doc):
    kind = doc.get("kind")
    if kind not in ("add_obstacle", "remove_obstacle", "add_landmark", "move_pedestrian"):
        raise GridPilotError(f"unknown event kind {kind!r}", kind=kind)
    region = None
    if "rect" in doc:
        x0, y0, x1, y1 = doc["rect"]
        region = Region.from_rect(x0, y0, x1, y1, name=doc.get("name"))
    elif "cells" in doc:
        region = Region.from_cells([tuple(c) for c in doc["cells"]], name=doc.get("name"))
    if kind == "add_landmark":
        lkind = doc.get("landmark_kind", "custom")
        if lkind not in LANDMARK_KINDS:
            raise GridPilotError(f"unknown landmark kind {lkind!r}", kind=lkind)
        return ScenarioEvent(0, kind, region=region, name=doc.get("name"),
                             landmark_kind=lkind,
                             access=tuple(doc["access"]) if doc.get("access") else None)
    if kind == "move_pedestrian":
        return ScenarioEvent(0, kind, ped_id=doc.get("id"),
                             waypoint=tuple(doc["waypoint"]))
    if region is None:
        raise GridPilotError("event needs a rect or cells field")
    return ScenarioEvent(0, kind, region=region)


_SESSION_ROUTE = re.compile(
    r"^/sessions/([0-9a-f]+)(?:/(state|instruction|step|event|strategy))?$"
)


class GridPilotHandler(BaseHTTPRequestHandler):
    server_version = "gridpilot"

    def log_message(self, fmt, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    # -- plumbing -----------------------------------------------------------

    def _send_json(self, status, doc):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status, err):
        if isinstance(err, GridPilotError):
            doc = err.to_dict()
        else:
            doc = {"code": "internal", "message": str(err), "detail": {}}
        self._send_json(status, {"error": doc})

    def _read_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            doc = json.loads(raw.decode("utf-8"))
        except ValueError as e:
            raise GridPilotError(f"request body is not valid JSON: {e}") from e
        if not isinstance(doc, dict):
            raise GridPilotError("request body must be a JSON object")
        return doc

    def _locked_session(self, session_id):
        session = self.server.store.get(session_id)
        if not session.lock.acquire(timeout=5.0):
            raise TimeoutError
        return session

    # -- routes -------------------------------------------------------------

    def do_POST(self):
        try:
            if self.path == "/sessions":
                self._create_session()
                return
            m = _SESSION_ROUTE.match(self.path)
            if not m or m.group(2) not in ("instruction", "step", "event", "strategy"):
                self._send_error(404, GridPilotError(f"no such route {self.path}"))
                return
            session_id, action = m.group(1), m.group(2)
            try:
                session = self._locked_session(session_id)
            except UnknownSession as e:
                self._send_error(404, e)
                return
            except TimeoutError:
                self._send_error(409, GridPilotError("session is busy"))
                return
            try:
                body = self._read_body()
                if action == "instruction":
                    self._post_instruction(session, body)
                elif action == "step":
                    self._post_step(session, body)
                elif action == "strategy":
                    self._post_strategy(session, body)
                else:
                    self._post_event(session, body)
            finally:
                session.lock.release()
        except GridPilotError as e:
            self._send_error(422, e)
        except Exception as e:  # pragma: no cover - last resort
            self._send_error(500, e)

    def _create_session(self):
        body = self._read_body()
        if "scenario_text" in body:
            scenario_text = body["scenario_text"]
        elif "scenario_name" in body:
            scenario_text = resolve_scenario(body["scenario_name"])
        else:
            raise GridPilotError("need scenario_name or scenario_text")
        session = self.server.store.create(
            scenario_text, body.get("strategy"), body.get("backend")
        )
        self._send_json(200, {"session_id": session.id})

    def _post_instruction(self, session, body):
        text = body.get("text")
        if not text:
            raise GridPilotError("instruction body needs a text field")
        world = session.runner.world if session.runner else session.world
        runner = EpisodeRunner(world, text, session.profile, backend=session.backend)
        runner.start()
        if runner.log.error is not None:
            err = GridPilotError(runner.log.error["message"])
            err.code = runner.log.error["code"]
            err.detail = runner.log.error["detail"]
            self._send_error(422, err)
            return
        session.runner = runner
        session.journal.append({"instruction": text, "tick": runner.world.tick})
        self.server.store._persist(session)
        seq = runner.log.action_sequences[-1]
        plan = runner.log.plans[-1]
        self._send_json(200, {
            "actions": [encode_action(a) for a in seq.actions],
            "pedestrian_buffer": seq.pedestrian_buffer,
            "plan": {
                "path": [list(c) for c in plan.path],
                "nodes_expanded": plan.nodes_expanded,
                "search_time_s": plan.search_time,
                "path_cost": plan.path_cost,
                "path_length": plan.path_length,
                "turns": plan.turns,
            },
            "diagnostics": [],
            "state": session.state_payload(),
        })

    def _post_step(self, session, body):
        ticks = int(body.get("ticks", 1))
        if ticks < 1:
            raise GridPilotError("ticks must be >= 1")
        replans = []
        for _ in range(ticks):
            if session.runner:
                if session.runner.done:
                    break
                before = len(session.runner.log.replan_records)
                session.runner.tick()
                for rec in session.runner.log.replan_records[before:]:
                    replans.append({"tick": rec.tick, "reason": rec.reason,
                                    "actions": json.loads(rec.actions_payload)})
            else:
                session.world, _ = step(session.world)
        self._send_json(200, {"state": session.state_payload(), "replans": replans})

    def _post_strategy(self, session, body):
        name = body.get("name")
        if not name:
            raise GridPilotError("strategy body needs a name field")
        profile = select_profile(name)
        if session.runner is None:
            session.profile = profile
            self._send_json(200, {"ok": True, "state": session.state_payload()})
            return
        # re-ground the active instruction under the new profile before
        # committing the switch
        runner = EpisodeRunner(session.runner.world, session.runner.instruction,
                               profile, backend=session.backend)
        runner.start()
        if runner.log.error is not None:
            err = GridPilotError(runner.log.error["message"])
            err.code = runner.log.error["code"]
            self._send_error(422, err)
            return
        session.profile = profile
        session.runner = runner
        self._send_json(200, {"ok": True, "state": session.state_payload()})

    def _post_event(self, session, body):
        event = _event_from_json(body)
        if session.runner:
            session.runner.world = apply_event(session.runner.world, event)
        else:
            session.world = apply_event(session.world, event)
        session.journal.append({"event": body})
        self.server.store._persist(session)
        self._send_json(200, {"ok": True, "state": session.state_payload()})

    def do_GET(self):
        try:
            if self.path == "/scenarios":
                self._send_json(200, {"scenarios": list_bundled()})
                return
            if self.path == "/corpus":
                lines = read_bundled("instruction_corpus.tsv").strip().split("\n")
                self._send_json(200, {"instructions": [l.split("\t")[0] for l in lines]})
                return
            m = _SESSION_ROUTE.match(self.path)
            if m and m.group(2) == "state":
                try:
                    session = self.server.store.get(m.group(1))
                except UnknownSession as e:
                    self._send_error(404, e)
                    return
                with session.lock:
                    self._send_json(200, session.state_payload())
                return
            if m and m.group(2) is None:
                try:
                    session = self.server.store.get(m.group(1))
                except UnknownSession as e:
                    self._send_error(404, e)
                    return
                with session.lock:
                    records = (
                        episode_log_records(session.runner.log) if session.runner else []
                    )
                self._send_json(200, {"session_id": session.id, "log": records})
                return
            self._serve_static()
        except Exception as e:  # pragma: no cover
            self._send_error(500, e)

    def do_DELETE(self):
        m = _SESSION_ROUTE.match(self.path)
        if not m or m.group(2) is not None:
            self._send_error(404, GridPilotError(f"no such route {self.path}"))
            return
        try:
            self.server.store.delete(m.group(1))
        except UnknownSession as e:
            self._send_error(404, e)
            return
        self._send_json(200, {"ok": True})

    def _serve_static(self):
        root = getattr(self.server, "static_dir", None)
        if not root:
            self._send_error(404, GridPilotError("no static console built"))
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(root, rel))
        if not full.startswith(os.path.realpath(root)) or not os.path.isfile(full):
            self._send_error(404, GridPilotError(f"not found: {self.path}"))
            return
        import mimetypes

        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            body = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def default_static_dir():
    candidates = [
        os.path.join(os.path.dirname(__file__), "static"),
        os.path.join(os.getcwd(), "frontend", "dist"),
    ]
    for c in candidates:
        if os.path.isdir(c) and os.path.isfile(os.path.join(c, "index.html")):
            return c
    return None


def make_server(host="127.0.0.1", port=8080, state_dir=None, static_dir=None, verbose=False):
    server = ThreadingHTTPServer((host, port), GridPilotHandler)
    server.store = SessionStore(state_dir=state_dir)
    server.static_dir = static_dir if static_dir is not None else default_static_dir()
    server.verbose = verbose
    return server


def serve(host="127.0.0.1", port=8080, state_dir=None, static_dir=None, verbose=True):
    server = make_server(host, port, state_dir, static_dir, verbose)
    print(f"gridpilot serving on http://{host}:{port}/ "
          f"(static: {server.static_dir or 'none'})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
