"""Research-data packaging: bags, persistent identifiers, linkage.

The pieces compose but stand alone: `cuflinks.bag` packages and checks
directory trees, `cuflinks.minid` mints and resolves content-bound
identifiers, `cuflinks.links` keeps a verifiable chain of derivation
records, `cuflinks.terms` guards the descriptive vocabulary, and
`cuflinks.rometa` writes the research-object manifest that ties a bag's
contents to that vocabulary.
"""

from cuflinks.version import __version__

__all__ = ["__version__"]
