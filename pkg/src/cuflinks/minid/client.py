"""HTTP client for a resolver, plus identifier-to-bytes retrieval.

The resolver base URL maps ``minid:<suffix>`` to ``<base>/<suffix>``.
A tombstoned identifier still resolves (the service answers 410 but
returns the record); unknown and malformed identifiers raise distinct
errors.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Protocol

import requests

from cuflinks.errors import (IdentifierError, IntegrityError, NotFoundError,
                             RegistryError, TransferError)
from cuflinks.hashing import digest_bytes, digest_file
from cuflinks.minid.model import ACTIVE, Checksum, MinidRecord, \
    parse_identifier
from cuflinks.minid.registry import VerifyResult
from cuflinks.transfer import DEFAULT_TIMEOUT, SchemeRegistry
from cuflinks.version import USER_AGENT

RESOLVER_URL_VAR = "CUFLINKS_RESOLVER_URL"
REGISTRY_TOKEN_VAR = "CUFLINKS_REGISTRY_TOKEN"


class Resolver(Protocol):
    """Anything that can turn an identifier into its record."""

    def resolve(self, identifier: str) -> MinidRecord: ...


class RegistryClient:
    """Speaks the resolution API; duck-compatible with Registry reads."""

    def __init__(self, base_url: str, *, token: str | None = None,
                 timeout: float = DEFAULT_TIMEOUT) -> None:
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.timeout = timeout
        self._session = requests.Session()
        self._session.headers["User-Agent"] = USER_AGENT

    def _headers(self) -> dict[str, str]:
        if self.token is None:
            return {}
        return {"Authorization": f"Bearer {self.token}"}

    def _request(self, method: str, url: str, body: dict | None = None):
        try:
            return self._session.request(method, url, json=body,
                                         headers=self._headers(),
                                         timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransferError(f"{method} {url} failed: {exc}") from exc

    def _record_or_raise(self, response, identifier: str) -> MinidRecord:
        if response.status_code in (200, 201, 410):
            return MinidRecord.from_json(response.json())
        try:
            detail = response.json().get("detail", "")
        except ValueError:
            detail = response.text[:200]
        if response.status_code == 400:
            raise IdentifierError(detail or f"{identifier} is malformed")
        if response.status_code == 404:
            raise NotFoundError(detail or f"{identifier} not found")
        raise RegistryError(
            f"resolver answered {response.status_code} for {identifier}: "
            f"{detail}")

    def resolve(self, identifier: str) -> MinidRecord:
        suffix = parse_identifier(identifier)
        response = self._request("GET", f"{self.base_url}/{suffix}")
        return self._record_or_raise(response, identifier)

    def mint(self, author: str, title: str,
             locations: tuple[str, ...] | list[str],
             checksum: Checksum) -> MinidRecord:
        body = {"author": author, "title": title,
                "locations": list(locations),
                "checksum": checksum.to_json()}
        response = self._request("POST", self.base_url, body)
        return self._record_or_raise(response, "<new>")

    def update_locations(self, identifier: str, add: tuple[str, ...] = (),
                         remove: tuple[str, ...] = (), *,
                         actor: str = "") -> MinidRecord:
        suffix = parse_identifier(identifier)
        body = {"add": list(add), "remove": list(remove), "actor": actor}
        response = self._request("PATCH", f"{self.base_url}/{suffix}", body)
        return self._record_or_raise(response, identifier)

    def tombstone(self, identifier: str, *, actor: str = "") -> MinidRecord:
        suffix = parse_identifier(identifier)
        response = self._request("PATCH", f"{self.base_url}/{suffix}",
                                 {"tombstone": True, "actor": actor})
        return self._record_or_raise(response, identifier)

    def supersede(self, identifier: str, by: str, *,
                  actor: str = "") -> MinidRecord:
        suffix = parse_identifier(identifier)
        response = self._request("PATCH", f"{self.base_url}/{suffix}",
                                 {"supersede_by": by, "actor": actor})
        return self._record_or_raise(response, identifier)

    def healthy(self) -> bool:
        base = self.base_url.rsplit("/", 1)[0]
        try:
            response = self._request("GET", f"{base}/healthz")
        except TransferError:
            return False
        return response.status_code == 200


def resolve_to_bytes(identifier: str, resolver: Resolver,
                     schemes: SchemeRegistry,
                     destination: Path | None = None
                     ) -> tuple[bytes | None, VerifyResult]:
    """Fetch the content behind an active identifier and verify it.

    Locations are tried in order, one attempt each. A location that
    transfers but fails the record's checksum is an integrity error and
    stops the walk: the identifier's fixity claim is wrong somewhere,
    and quietly serving bytes from a sibling location would hide
    that. Only transfer failures fall through to the next location.

    With a destination the verified bytes are left on disk there and the
    returned content is None; otherwise the bytes come back in memory.
    """
    record = resolver.resolve(identifier)
    if record.status != ACTIVE:
        raise RegistryError(
            f"{identifier} is {record.status}"
            + (f" (successor {record.superseded_by})"
               if record.superseded_by else ""))
    failures: list[str] = []
    for location in record.locations:
        fetcher = schemes.for_url(location)
        buffer = io.BytesIO()
        try:
            fetcher.fetch(location, buffer)
        except TransferError as exc:
            failures.append(str(exc))
            continue
        content = buffer.getvalue()
        verdict = _verify_bytes(record, content)
        if not verdict.match:
            raise IntegrityError(
                f"{identifier}: content at {location} does not match the "
                f"registered checksum",
                expected=verdict.expected, actual=verdict.actual)
        if destination is not None:
            Path(destination).write_bytes(content)
            return None, verdict
        return content, verdict
    raise TransferError(
        f"{identifier}: every location failed: " + " | ".join(failures))


def _verify_bytes(record: MinidRecord, content: bytes) -> VerifyResult:
    actual = digest_bytes(content, record.checksum.algorithm)
    return VerifyResult(match=(actual == record.checksum.digest),
                        expected=record.checksum.digest,
                        actual=actual,
                        algorithm=record.checksum.algorithm,
                        tombstoned=False)


def checksum_of_file(path: Path) -> Checksum:
    """The sha256 checksum used when minting an identifier for a file."""
    return Checksum(algorithm="sha256", digest=digest_file(Path(path),
                                                           "sha256"))


class MinidFetcher:
    """Transfer scheme for identifier URLs inside fetch.txt.

    Resolution turns the identifier into its location list; the verified
    bytes are then streamed into the sink. The identifier's own checksum
    is enforced here, independently of any bag manifest the caller may
    additionally check.
    """

    def __init__(self, resolver: Resolver, schemes: SchemeRegistry) -> None:
        self.resolver = resolver
        self.schemes = schemes

    def fetch(self, url: str, sink) -> int:
        content, _ = resolve_to_bytes(url, self.resolver, self.schemes)
        sink.write(content)
        return len(content)
