"""Provenance linkage: records, the hash-chained ledger, chain checks."""

from cuflinks.links.chain import (ChainGraph, ChainReport, NodeResult,
                                  ci_verify, verify_chain, walk_chain)
from cuflinks.links.ledger import Ledger, declare_root, record_linkage
from cuflinks.links.records import (EnvironmentRef, LinkageRecord, MethodRef,
                                    RootRecord, capture_environment)

__all__ = [
    "ChainGraph",
    "ChainReport",
    "EnvironmentRef",
    "Ledger",
    "LinkageRecord",
    "MethodRef",
    "NodeResult",
    "RootRecord",
    "capture_environment",
    "ci_verify",
    "declare_root",
    "record_linkage",
    "verify_chain",
    "walk_chain",
]
