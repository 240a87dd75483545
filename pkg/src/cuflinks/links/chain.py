"""Provenance chain traversal and verification.

walk_chain builds the produced-from DAG behind one identifier.
verify_chain resolves every node and, at full depth, re-fetches and
re-hashes every node's bytes. ci_verify sweeps every terminal output so
the whole ledger is re-checked the way continuous integration re-runs a
test suite: frequently, mechanically, and loudly on regression.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from cuflinks.errors import (CycleError, IdentifierError, IntegrityError,
                             NotFoundError, NotInLedgerError, RegistryError,
                             SchemeError, TransferError)
from cuflinks.links.ledger import Ledger, LedgerView
from cuflinks.minid.client import resolve_to_bytes
from cuflinks.minid.model import ACTIVE, TOMBSTONED
from cuflinks.transfer import SchemeRegistry

RESOLVE_ONLY = "resolve-only"
FULL_FIXITY = "full-fixity"

FIXITY_MATCH = "match"
FIXITY_MISMATCH = "mismatch"
FIXITY_UNVERIFIABLE = "unverifiable"

INTACT = "intact"
BROKEN = "broken"


@dataclass(frozen=True)
class ChainGraph:
    start: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]     # (output, input) pairs
    roots: tuple[str, ...]                 # nodes with no producing record
    declared_roots: tuple[str, ...]


@dataclass(frozen=True)
class NodeResult:
    identifier: str
    resolved: bool
    fixity: str
    record_present: bool
    declared_root: bool
    detail: str = ""

    @property
    def failing(self) -> bool:
        return (not self.resolved
                or self.fixity == FIXITY_MISMATCH
                or not (self.record_present or self.declared_root))

    def to_json(self) -> dict:
        return {
            "identifier": self.identifier,
            "resolved": self.resolved,
            "fixity": self.fixity,
            "record_present": self.record_present,
            "declared_root": self.declared_root,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ChainReport:
    start: str
    depth: str
    nodes: tuple[NodeResult, ...]
    edges: tuple[tuple[str, str], ...]
    verdict: str
    failing: tuple[str, ...]
    diagnostics: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "depth": self.depth,
            "verdict": self.verdict,
            "failing": list(self.failing),
            "nodes": [node.to_json() for node in self.nodes],
            "edges": [list(edge) for edge in self.edges],
            "diagnostics": list(self.diagnostics),
        }


def walk_chain(ledger: Ledger | LedgerView, start: str) -> ChainGraph:
    """Transitive closure over inputs, with cross-record cycle detection."""
    view = ledger.load() if isinstance(ledger, Ledger) else ledger
    if start not in view.linkages and start not in view.roots:
        raise NotInLedgerError(
            f"{start} appears in no linkage record and is not a declared "
            f"root")

    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    # iterative DFS with colors; a gray node seen again closes a cycle
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack: list[tuple[str, bool]] = [(start, False)]
    trail: list[str] = []
    while stack:
        node, leaving = stack.pop()
        if leaving:
            color[node] = BLACK
            if trail and trail[-1] == node:
                trail.pop()
            continue
        state = color.get(node, WHITE)
        if state == BLACK:
            continue
        if state == GRAY:
            continue
        color[node] = GRAY
        trail.append(node)
        nodes.add(node)
        stack.append((node, True))
        record = view.linkages.get(node)
        if record is None:
            continue
        for input_id in record.inputs:
            edges.add((node, input_id))
            state = color.get(input_id, WHITE)
            if state == GRAY:
                cycle_start = trail.index(input_id)
                raise CycleError(
                    "provenance records form a cycle: "
                    + " -> ".join(trail[cycle_start:] + [input_id]),
                    members=tuple(trail[cycle_start:]))
            if state == WHITE:
                stack.append((input_id, False))

    roots = tuple(sorted(n for n in nodes if n not in view.linkages))
    return ChainGraph(start=start,
                      nodes=tuple(sorted(nodes)),
                      edges=tuple(sorted(edges)),
                      roots=roots,
                      declared_roots=tuple(sorted(
                          set(roots) & view.roots)))


def verify_chain(ledger: Ledger | LedgerView, start: str, depth: str,
                 resolver, schemes: SchemeRegistry | None = None
                 ) -> ChainReport:
    """Check that every node of the chain still holds its promises.

    resolve-only asks the registry about each identifier; full-fixity
    additionally fetches each node's bytes and re-hashes them, which
    needs a scheme registry. Failures are report content, never raises:
    an unreachable location makes a node unverifiable, not an exception.
    """
    if depth not in (RESOLVE_ONLY, FULL_FIXITY):
        raise ValueError(f"unknown verification depth {depth!r}")
    if depth == FULL_FIXITY and schemes is None:
        raise ValueError("full-fixity verification needs a scheme registry")
    view = ledger.load() if isinstance(ledger, Ledger) else ledger
    graph = walk_chain(view, start)

    results: list[NodeResult] = []
    for identifier in graph.nodes:
        record_present = identifier in view.linkages
        declared_root = identifier in view.roots
        detail_parts: list[str] = []
        resolved = False
        status = None
        try:
            record = resolver.resolve(identifier)
            status = record.status
            if status == TOMBSTONED:
                detail_parts.append("identifier is tombstoned")
            else:
                resolved = True
                if status != ACTIVE:
                    detail_parts.append(f"identifier is {status}")
        except (NotFoundError, IdentifierError) as exc:
            detail_parts.append(f"does not resolve: {exc}")
        except (TransferError, RegistryError) as exc:
            detail_parts.append(f"resolver unreachable: {exc}")

        fixity = FIXITY_UNVERIFIABLE
        if depth == RESOLVE_ONLY:
            detail_parts.append("fixity not checked at resolve-only depth")
        elif resolved and status == ACTIVE:
            try:
                resolve_to_bytes(identifier, resolver, schemes)
                fixity = FIXITY_MATCH
            except IntegrityError as exc:
                fixity = FIXITY_MISMATCH
                detail_parts.append(str(exc))
            except (TransferError, SchemeError, RegistryError) as exc:
                detail_parts.append(f"content unreachable: {exc}")
        elif resolved:
            detail_parts.append(
                "content not fetched: identifier is not active")
        if not (record_present or declared_root):
            detail_parts.append("no linkage record and not a declared root")
        results.append(NodeResult(
            identifier=identifier, resolved=resolved, fixity=fixity,
            record_present=record_present, declared_root=declared_root,
            detail="; ".join(detail_parts)))

    failing = tuple(sorted(r.identifier for r in results if r.failing))
    return ChainReport(
        start=start, depth=depth,
        nodes=tuple(sorted(results, key=lambda r: r.identifier)),
        edges=graph.edges,
        verdict=BROKEN if failing else INTACT,
        failing=failing,
        diagnostics=view.diagnostics)


def ci_verify(ledger: Ledger, resolver, schemes: SchemeRegistry,
              report_path: Path | None = None) -> tuple[int, dict]:
    """Full-fixity verification of every terminal output in the ledger.

    Returns (exit status, report). The report is stable-sorted so two
    runs over the same ledger state diff cleanly.
    """
    view = ledger.load()
    chains: list[dict] = []
    all_intact = True
    for output in view.terminal_outputs():
        try:
            report = verify_chain(view, output, FULL_FIXITY, resolver,
                                  schemes)
            chains.append(report.to_json())
            if report.verdict != INTACT:
                all_intact = False
        except CycleError as exc:
            chains.append({
                "start": output,
                "depth": FULL_FIXITY,
                "verdict": BROKEN,
                "failing": sorted(exc.members),
                "nodes": [],
                "edges": [],
                "diagnostics": [str(exc)],
            })
            all_intact = False
    report_body = {
        "verdict": INTACT if all_intact else BROKEN,
        "chains": chains,
        "ledger_diagnostics": list(view.diagnostics),
    }
    if report_path is not None:
        text = json.dumps(report_body, sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"
        Path(report_path).write_text(text, encoding="utf-8")
    return (0 if all_intact else 1), report_body
