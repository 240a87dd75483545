"""The resolution API over real sockets, exercised through the client."""

import json
import urllib.request

import pytest

from cuflinks.errors import (IdentifierError, NotFoundError, RegistryError,
                             TransferError)
from cuflinks.minid import (Checksum, Registry, RegistryClient,
                            RegistryServer)

from conftest import FIXED_INSTANT

SHA = "1" * 64
URL = "http://127.0.0.1:1/content"


@pytest.fixture
def server(tmp_path):
    registry = Registry.open(tmp_path / "registry.log",
                             clock=lambda: FIXED_INSTANT)
    with RegistryServer(registry) as running:
        yield running
    registry.close()


@pytest.fixture
def client(server):
    return RegistryClient(server.base_url)


def mint(client) -> str:
    record = client.mint("tester", "content", (URL,),
                         Checksum("sha256", SHA))
    return record.identifier


def http_get(url: str):
    try:
        with urllib.request.urlopen(url) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as error:
        return error.code, json.loads(error.read())


def test_healthz(server):
    status, body = http_get(server.base_url.rsplit("/", 1)[0] + "/healthz")
    assert status == 200
    assert body == {"status": "ok", "identifiers": 0}


def test_mint_and_resolve(client):
    identifier = mint(client)
    record = client.resolve(identifier)
    assert record.identifier == identifier
    assert record.status == "active"
    assert record.created == "2026-01-15T12:00:00Z"


def test_resolve_unknown_is_404(client, server):
    with pytest.raises(NotFoundError):
        client.resolve("minid:fPTs86M7VTyb")
    status, body = http_get(f"{server.base_url}/fPTs86M7VTyb")
    assert status == 404
    assert body["error"] == "not-found"


def test_resolve_malformed_is_400(client, server):
    with pytest.raises(IdentifierError):
        client.resolve("minid:nope")
    status, body = http_get(f"{server.base_url}/nope")
    assert status == 400
    assert body["error"] == "malformed-identifier"


def test_tombstoned_is_410_with_record(client, server):
    identifier = mint(client)
    client.tombstone(identifier, actor="tester")
    record = client.resolve(identifier)  # still resolves via the client
    assert record.status == "tombstoned"
    status, body = http_get(
        f"{server.base_url}/{identifier.removeprefix('minid:')}")
    assert status == 410
    assert body["status"] == {"state": "tombstoned"}
    assert body["checksum"]["digest"] == SHA


def test_update_locations_via_patch(client):
    identifier = mint(client)
    record = client.update_locations(identifier,
                                     add=("https://mirror.org/x",),
                                     actor="tester")
    assert record.locations == (URL, "https://mirror.org/x")
    record = client.update_locations(identifier, remove=(URL,),
                                     actor="tester")
    assert record.locations == ("https://mirror.org/x",)


def test_supersede_via_patch(client):
    old = mint(client)
    new = mint(client)
    record = client.supersede(old, new, actor="tester")
    assert record.status == "superseded"
    assert record.superseded_by == new
    with pytest.raises(RegistryError):  # 409: cycle
        client.supersede(new, old, actor="tester")


def test_conflict_states_are_409(client):
    identifier = mint(client)
    client.tombstone(identifier, actor="t")
    with pytest.raises(RegistryError):
        client.update_locations(identifier, add=("https://e.org/x",),
                                actor="t")


def test_healthy_probe(client, server):
    assert client.healthy()
    unreachable = RegistryClient("http://127.0.0.1:1/minid", timeout=0.2)
    assert not unreachable.healthy()


def test_client_wraps_connection_errors():
    client = RegistryClient("http://127.0.0.1:1/minid", timeout=0.2)
    with pytest.raises(TransferError):
        client.resolve("minid:fPTs86M7VTyb")


def test_write_token_enforced(tmp_path):
    registry = Registry.open(tmp_path / "registry.log")
    with RegistryServer(registry, token="sesame") as server:
        anonymous = RegistryClient(server.base_url)
        with pytest.raises(RegistryError) as excinfo:
            anonymous.mint("t", "c", (URL,), Checksum("sha256", SHA))
        assert "401" in str(excinfo.value) or "unauthorized" in str(
            excinfo.value)
        trusted = RegistryClient(server.base_url, token="sesame")
        identifier = trusted.mint("t", "c", (URL,),
                                  Checksum("sha256", SHA)).identifier
        # reads stay open
        assert anonymous.resolve(identifier).identifier == identifier
        with pytest.raises(RegistryError):
            anonymous.tombstone(identifier, actor="t")
    registry.close()


def test_post_with_bad_body_is_400(server):
    request = urllib.request.Request(
        server.base_url, data=b"not json",
        headers={"Content-Type": "application/json"}, method="POST")
    try:
        urllib.request.urlopen(request)
        status = 200
    except urllib.error.HTTPError as error:
        status = error.code
        body = json.loads(error.read())
    assert status == 400
    assert body["error"] == "bad-request"


def test_concurrent_mints_over_http(server):
    import threading
    client = RegistryClient(server.base_url)
    minted: list[str] = []
    errors: list[Exception] = []

    def work():
        try:
            local = RegistryClient(server.base_url)
            for _ in range(10):
                minted.append(mint_one(local))
        except Exception as exc:  # noqa: BLE001 - surface in main thread
            errors.append(exc)

    def mint_one(local):
        return local.mint("t", "c", (URL,),
                          Checksum("sha256", SHA)).identifier

    threads = [threading.Thread(target=work) for _ in range(4)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert not errors
    assert len(set(minted)) == 40
    assert client.resolve(minted[0]).status == "active"
