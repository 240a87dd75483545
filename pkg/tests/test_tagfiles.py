"""Codec round trips and strictness rules for the tag files."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuflinks.bag.model import BagDeclaration, FetchEntry
from cuflinks.bag.tagfiles import (encode_manifest_path, parse_bag_info,
                                   parse_bagit, parse_fetch, parse_manifest,
                                   render_bag_info, render_bagit,
                                   render_fetch, render_manifest,
                                   split_manifest_filename)
from cuflinks.errors import FormatError

SHA = "a" * 64


def test_bagit_round_trip():
    decl = BagDeclaration()
    data = render_bagit(decl)
    assert data == (b"BagIt-Version: 1.0\n"
                    b"Tag-File-Character-Encoding: UTF-8\n")
    assert parse_bagit(data) == decl


@pytest.mark.parametrize("data", [
    b"BagIt-Version: 1.0\n",
    b"Tag-File-Character-Encoding: UTF-8\nBagIt-Version: 1.0\n",
    b"BagIt-Version:1.0\nTag-File-Character-Encoding: UTF-8\n",
    b"BagIt-Version: 1.0\nTag-File-Character-Encoding: latin-1\n",
    b"BagIt-Version: one\nTag-File-Character-Encoding: UTF-8\n",
    b"\xff\xfe\n\n",
])
def test_bagit_rejects(data):
    with pytest.raises(FormatError) as excinfo:
        parse_bagit(data)
    assert excinfo.value.path == "bagit.txt"


def test_bag_info_round_trip_with_folding():
    pairs = (("Contact-Name", "Kyle Chard"),
             ("External-Description", "two\nlines"),
             ("Empty", ""))
    data = render_bag_info(pairs)
    assert b"External-Description: two\n lines\n" in data
    assert parse_bag_info(data) == pairs


def test_bag_info_continuation_strips_one_leading_char():
    parsed = parse_bag_info(b"Label: a\n\t  indented\n")
    assert parsed == (("Label", "a\n  indented"),)


def test_bag_info_rejections():
    with pytest.raises(FormatError):
        parse_bag_info(b" leading continuation\n")
    with pytest.raises(FormatError):
        parse_bag_info(b"no colon here\n")
    with pytest.raises(FormatError):
        parse_bag_info(b"label : space before colon\n")


_LABELS = st.text(
    st.characters(min_codepoint=33, max_codepoint=126,
                  blacklist_characters=":"),
    min_size=1, max_size=12)
_VALUES = st.text(
    st.characters(blacklist_characters="\r",
                  blacklist_categories=("Cs",)),
    max_size=40)


@settings(max_examples=150)
@given(st.lists(st.tuples(_LABELS, _VALUES), max_size=6))
def test_bag_info_round_trip_property(pairs):
    pairs = tuple(pairs)
    assert parse_bag_info(render_bag_info(pairs)) == pairs


def test_manifest_round_trip_and_escapes():
    entries = {"data/plain": SHA,
               "data/with space": "b" * 64,
               "data/new\nline": "c" * 64,
               "data/per%cent": "d" * 64,
               "data/car\rriage": "e" * 64}
    data = render_manifest(entries, "sha256")
    assert b"%0A" in data and b"%25" in data and b"%0D" in data
    assert parse_manifest(data, "sha256", "manifest-sha256.txt") == entries
    assert parse_manifest(data, "sha256", "tagmanifest-sha256.txt",
                          strict=True) == entries


def test_percent_encode_order():
    # percent must be escaped first or %0A would round-trip wrongly
    assert encode_manifest_path("%0A") == "%250A"


def test_manifest_lenient_accepts_variations():
    data = (f"{SHA.upper()}\tdata/one\n\n"
            f"{'b' * 64}   data/галактика\n").encode("utf-8")
    parsed = parse_manifest(data, "sha256", "manifest-sha256.txt")
    assert parsed == {"data/one": SHA, "data/галактика": "b" * 64}
    lower_escape = f"{SHA}  data/a%0ab\n".encode()
    assert parse_manifest(lower_escape, "sha256",
                          "manifest-sha256.txt") == {"data/a\nb": SHA}


@pytest.mark.parametrize("line", [
    f"{SHA} data/one\n",            # single space
    f"{SHA}\tdata/one\n",           # tab separator
    f"{SHA.upper()}  data/one\n",   # uppercase hex
    f"{SHA}  data/a%0ab\n",         # lowercase escape
    f"{SHA}  data/a%2fb\n",         # escape outside the allowed set
    f"{SHA}  data/one",             # missing trailing newline
    f"\n{SHA}  data/one\n",         # blank line
    f"{'a' * 63}  data/one\n",      # short digest
])
def test_manifest_strict_rejects(line):
    with pytest.raises(FormatError) as excinfo:
        parse_manifest(line.encode(), "sha256", "tagmanifest-sha256.txt",
                       strict=True)
    assert excinfo.value.path == "tagmanifest-sha256.txt"


def test_manifest_duplicate_entry_rejected():
    data = f"{SHA}  data/one\n{'b' * 64}  data/one\n".encode()
    with pytest.raises(FormatError) as excinfo:
        parse_manifest(data, "sha256", "manifest-sha256.txt")
    assert excinfo.value.line == 2


def test_split_manifest_filename():
    assert split_manifest_filename("manifest-sha256.txt") == (False, "sha256")
    assert split_manifest_filename("tagmanifest-md5.txt") == (True, "md5")
    assert split_manifest_filename("manifest.txt") is None
    assert split_manifest_filename("data") is None


_PATH_CHARS = st.text(
    st.characters(min_codepoint=32, max_codepoint=1000,
                  blacklist_characters="/\\\x7f"),
    min_size=1, max_size=10)


@settings(max_examples=150)
@given(st.lists(_PATH_CHARS, min_size=1, max_size=4, unique=True))
def test_manifest_round_trip_property(names):
    entries = {f"data/{name}": SHA for name in names}
    data = render_manifest(entries, "sha256")
    assert parse_manifest(data, "sha256", "m") == entries
    assert parse_manifest(data, "sha256", "t", strict=True) == entries


def test_fetch_round_trip():
    entries = (FetchEntry(url="http://example.org/a", length=12,
                          path="data/a"),
               FetchEntry(url="https://example.org/b%20c", length=None,
                          path="data/with space"),
               FetchEntry(url="minid:fPTs86M7VTyb", length=3,
                          path="data/minted"))
    data = render_fetch(entries)
    assert b"http://example.org/a 12 data/a\n" in data
    assert b"- data/with space\n" in data
    assert parse_fetch(data) == entries


@pytest.mark.parametrize("data", [
    b"http://e.org/a 12\n",                  # missing path
    b"http://e.org/a twelve data/a\n",       # unparseable length
    b"http://e.org/a -3 data/a\n",           # negative length
    b"/relative/no-scheme 3 data/a\n",       # relative URL
    b"http://e.org/a 3 notdata/a\n",         # outside the payload
    b"http://e.org/a 3 data/a\nhttp://e.org/b 4 data/a\n",  # dup target
])
def test_fetch_rejects(data):
    with pytest.raises(FormatError):
        parse_fetch(data)


def test_fetch_blank_lines_skipped():
    data = b"\nhttp://e.org/a 3 data/a\n\n"
    assert parse_fetch(data) == (
        FetchEntry(url="http://e.org/a", length=3, path="data/a"),)
