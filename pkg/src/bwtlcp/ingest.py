"""Reading sequence collections from FASTA, FASTQ and plain line files."""
from __future__ import annotations

import os
from typing import Iterable, Iterator

from .errors import ParseError
from .model import DNA, Alphabet, SequenceCollection, validate_collection

FORMATS = ("fasta", "fastq", "lines", "auto")
EXTENSIONS = {
    ".fa": "fasta",
    ".fasta": "fasta",
    ".fna": "fasta",
    ".fq": "fastq",
    ".fastq": "fastq",
    ".txt": "lines",
}


def detect_format(path) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    try:
        return EXTENSIONS[ext]
    except KeyError:
        raise ParseError(
            f"cannot infer the format from extension {ext!r}; pass --format", path
        ) from None


def _check_sequence(text: str, path, lineno: int) -> str:
    if any(ch.isspace() for ch in text):
        raise ParseError("whitespace inside a sequence", path, lineno)
    return text.upper()


def _lines(path):
    with open(path, encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            yield lineno, line.rstrip("\r\n")


def read_lines(path) -> Iterator[str]:
    for lineno, line in _lines(path):
        if not line:
            raise ParseError("empty line", path, lineno)
        yield _check_sequence(line, path, lineno)


def read_fasta(path) -> Iterator[str]:
    parts = None
    for lineno, line in _lines(path):
        if line.startswith(">"):
            if parts is not None:
                yield "".join(parts)
            parts = []
        elif not line.strip():
            continue
        elif parts is None:
            raise ParseError("sequence data before the first '>' header", path, lineno)
        else:
            parts.append(_check_sequence(line.rstrip(), path, lineno))
    if parts is not None:
        yield "".join(parts)


def read_fastq(path) -> Iterator[str]:
    record = []
    for lineno, line in _lines(path):
        if not record and not line.strip():
            continue
        record.append((lineno, line))
        if len(record) < 4:
            continue
        (hl, header), (sl, seq), (pl, plus), (ql, qual) = record
        if not header.startswith("@"):
            raise ParseError("FASTQ header must start with '@'", path, hl)
        if not plus.startswith("+"):
            raise ParseError("FASTQ separator must start with '+'", path, pl)
        if len(qual) != len(seq):
            raise ParseError("quality and sequence lengths differ", path, ql)
        yield _check_sequence(seq, path, sl)
        record = []
    if record:
        raise ParseError("truncated FASTQ record", path, record[0][0])


READERS = {"fasta": read_fasta, "fastq": read_fastq, "lines": read_lines}


def read_sequences(paths: Iterable, fmt: str = "auto") -> Iterator[str]:
    for path in paths:
        kind = detect_format(path) if fmt == "auto" else fmt
        if kind not in READERS:
            raise ValueError(f"unknown format {kind!r}")
        yield from READERS[kind](path)


def ingest(paths: Iterable, fmt: str = "auto", alphabet: Alphabet = DNA) -> SequenceCollection:
    """Load every sequence of ``paths`` in file order and validate them."""
    return validate_collection(list(read_sequences(paths, fmt)), alphabet)
