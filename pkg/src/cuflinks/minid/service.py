"""HTTP resolution API in front of a registry.

Routes (JSON bodies, UTF-8):
    GET  /healthz          liveness probe
    POST /minid            mint; 201 with the new record
    GET  /minid/<suffix>   200 record; 404 unknown; 410 tombstoned with
                           the record still in the body; 400 malformed
    PATCH /minid/<suffix>  location updates, plus administrative state
                           changes ("tombstone": true, "supersede_by")

Writes require a bearer token when the server is given one. Reads never
do. Threaded server: resolution keeps working while a mint is in flight,
and the registry serializes writers internally.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from cuflinks.errors import (CuflinksError, CycleError, IdentifierError,
                             NotFoundError, RegistryError)
from cuflinks.minid.model import TOMBSTONED, Checksum
from cuflinks.minid.registry import Registry
from cuflinks.version import USER_AGENT


class _Handler(BaseHTTPRequestHandler):
    server_version = USER_AGENT
    registry: Registry
    token: str | None
    quiet: bool

    # --- plumbing -------------------------------------------------------

    def log_message(self, format: str, *args) -> None:
        if not self.quiet:
            super().log_message(format, *args)

    def _send(self, status: int, body: dict) -> None:
        payload = json.dumps(body, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _error(self, status: int, code: str, detail: str) -> None:
        self._send(status, {"error": code, "detail": detail})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        body = json.loads(raw.decode("utf-8"))
        if not isinstance(body, dict):
            raise ValueError("request body must be a JSON object")
        return body

    def _authorized(self) -> bool:
        if self.token is None:
            return True
        header = self.headers.get("Authorization") or ""
        return header == f"Bearer {self.token}"

    def _suffix_from_path(self) -> str | None:
        prefix = "/minid/"
        if not self.path.startswith(prefix):
            return None
        return self.path[len(prefix):]

    # --- methods ---------------------------------------------------------

    def do_GET(self) -> None:
        if self.path == "/healthz":
            self._send(200, {"status": "ok",
                             "identifiers": len(self.registry)})
            return
        suffix = self._suffix_from_path()
        if suffix is None:
            self._error(404, "no-route", f"no route for {self.path}")
            return
        try:
            record = self.registry.resolve_suffix(suffix)
        except IdentifierError as exc:
            self._error(400, "malformed-identifier", str(exc))
            return
        except NotFoundError as exc:
            self._error(404, "not-found", str(exc))
            return
        status = 410 if record.status == TOMBSTONED else 200
        self._send(status, record.to_json())

    def do_POST(self) -> None:
        if self.path not in ("/minid", "/minid/"):
            self._error(404, "no-route", f"no route for {self.path}")
            return
        if not self._authorized():
            self._error(401, "unauthorized", "write requires a bearer token")
            return
        try:
            body = self._read_body()
            record = self.registry.mint(
                author=body.get("author", ""),
                title=body.get("title", ""),
                locations=tuple(body.get("locations", ())),
                checksum=Checksum.from_json(body["checksum"]),
            )
        except (KeyError, TypeError, ValueError,
                json.JSONDecodeError) as exc:
            self._error(400, "bad-request", f"unusable mint request: {exc}")
            return
        except CuflinksError as exc:
            self._error(500, "registry-error", str(exc))
            return
        self._send(201, record.to_json())

    def do_PATCH(self) -> None:
        suffix = self._suffix_from_path()
        if suffix is None:
            self._error(404, "no-route", f"no route for {self.path}")
            return
        if not self._authorized():
            self._error(401, "unauthorized", "write requires a bearer token")
            return
        try:
            body = self._read_body()
        except (ValueError, json.JSONDecodeError) as exc:
            self._error(400, "bad-request", str(exc))
            return
        identifier = f"minid:{suffix}"
        actor = str(body.get("actor", ""))
        try:
            if body.get("tombstone"):
                record = self.registry.tombstone(identifier, actor=actor)
            elif "supersede_by" in body:
                record = self.registry.supersede(
                    identifier, str(body["supersede_by"]), actor=actor)
            else:
                record = self.registry.update_locations(
                    identifier,
                    add=tuple(body.get("add", ())),
                    remove=tuple(body.get("remove", ())),
                    actor=actor)
        except IdentifierError as exc:
            self._error(400, "malformed-identifier", str(exc))
            return
        except NotFoundError as exc:
            self._error(404, "not-found", str(exc))
            return
        except (RegistryError, CycleError) as exc:
            self._error(409, "conflict", str(exc))
            return
        except (TypeError, ValueError) as exc:
            self._error(400, "bad-request", str(exc))
            return
        self._send(200, record.to_json())


class RegistryServer:
    """A registry bound to a listening socket, run on a daemon thread."""

    def __init__(self, registry: Registry, host: str = "127.0.0.1",
                 port: int = 0, *, token: str | None = None,
                 quiet: bool = True) -> None:
        handler = type("BoundHandler", (_Handler,), {
            "registry": registry, "token": token, "quiet": quiet})
        self.registry = registry
        self._server = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    @property
    def base_url(self) -> str:
        """Resolver base: identifier minid:<s> maps to <base_url>/<s>."""
        host, port = self.address
        return f"http://{host}:{port}/minid"

    def start(self) -> "RegistryServer":
        thread = threading.Thread(target=self._server.serve_forever,
                                  name="cuflinks-registry", daemon=True)
        thread.start()
        self._thread = thread
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "RegistryServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()
