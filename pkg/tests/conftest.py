"""Shared fixtures: fixed clock, fixture trees, a local file server."""

from __future__ import annotations

import functools
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

FIXED_INSTANT = datetime(2026, 1, 15, 12, 0, 0, tzinfo=timezone.utc)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fixed_clock():
    return lambda: FIXED_INSTANT


@pytest.fixture
def fig3_tree(tmp_path):
    """The two-payload-file, one-annotation fixture tree."""
    source = tmp_path / "source"
    source.mkdir()
    (source / "file1").write_bytes(b"first payload file\n")
    (source / "file2").write_bytes(b"second payload file, longer\n")
    metadata = tmp_path / "extra-metadata"
    metadata.mkdir()
    (metadata / "annotations.txt").write_text(
        "sample: zebrafish embryo\nstage: prim-5\n", encoding="utf-8")
    return source, metadata


class FileServer:
    """In-process HTTP server over a dict of {path: bytes}.

    Useful knobs for tests: replace content to simulate tampering, set
    fail_next to refuse a number of requests, and read requests to see
    exactly what was asked for.
    """

    def __init__(self) -> None:
        self.content: dict[str, bytes] = {}
        self.requests: list[str] = []
        self.headers_seen: list[dict] = []
        self.fail_next: dict[str, int] = {}
        self._lock = threading.Lock()

        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, format: str, *args) -> None:
                pass

            def do_GET(self) -> None:
                with server._lock:
                    server.requests.append(self.path)
                    server.headers_seen.append(dict(self.headers))
                    failures = server.fail_next.get(self.path, 0)
                    if failures > 0:
                        server.fail_next[self.path] = failures - 1
                        self.send_error(503, "synthetic failure")
                        return
                    body = server.content.get(self.path)
                if body is None:
                    self.send_error(404, "no such fixture")
                    return
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Content-Type",
                                 "application/octet-stream")
                self.end_headers()
                self.wfile.write(body)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True)
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def url(self, path: str) -> str:
        return self.base_url + path

    def add(self, path: str, body: bytes) -> str:
        self.content[path] = body
        return self.url(path)

    def close(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()


@pytest.fixture
def file_server():
    server = FileServer()
    yield server
    server.close()


@pytest.fixture
def acceptance(request):
    """Record one acceptance line; failing the check fails the test."""
    def _record(criterion: int, ok: bool, detail: str = "") -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  ({detail})"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
