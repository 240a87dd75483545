"""Bag packaging: model, tag-file codecs, build, read/write, validation."""

from cuflinks.bag.archive import extract, serialize
from cuflinks.bag.build import create_bag
from cuflinks.bag.io import read_bag, write_bag
from cuflinks.bag.model import Bag, BagDeclaration, Entry, FetchEntry
from cuflinks.bag.validate import Finding, ValidationReport, validate_bag

__all__ = [
    "Bag",
    "BagDeclaration",
    "Entry",
    "FetchEntry",
    "Finding",
    "ValidationReport",
    "create_bag",
    "extract",
    "read_bag",
    "serialize",
    "validate_bag",
    "write_bag",
]
