"""Final output files.

``<prefix>.bwt``   one byte per suffix, the marker rendered as ``$``
``<prefix>.lcp``   fixed-width little-endian unsigned integers
``<prefix>.gsa``   optional, (pos, seq) as two little-endian uint32 each
``<prefix>.json``  manifest with the collection shape and run statistics
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import IoFailure
from .model import MARKER, Alphabet, SequenceCollection
from .oracle import OracleResult
from .segio import GSA_DTYPE, lcp_dtype

GSA_WIDTH = GSA_DTYPE.itemsize


def output_paths(prefix) -> dict[str, Path]:
    prefix = str(prefix)
    return {ext: Path(f"{prefix}.{ext}") for ext in ("bwt", "lcp", "gsa", "json")}


def emit_outputs(chunks: Iterable, prefix, alphabet: Alphabet, lcp_width: int,
                 emit_gsa: bool = False, manifest: Optional[dict] = None) -> dict:
    """Write the concatenated ``(B, L, G)`` chunks and the manifest."""
    paths = output_paths(prefix)
    paths["bwt"].parent.mkdir(parents=True, exist_ok=True)
    ldtype = lcp_dtype(lcp_width)
    render = alphabet.rendering
    total = 0
    try:
        with open(paths["bwt"], "wb") as fb, open(paths["lcp"], "wb") as fl:
            fg = open(paths["gsa"], "wb") if emit_gsa else None
            try:
                for b, l, g in chunks:
                    fb.write(render[b].data)
                    fl.write(np.ascontiguousarray(l, dtype=ldtype).data)
                    if fg is not None:
                        fg.write(np.ascontiguousarray(g, dtype=GSA_DTYPE).data)
                    total += len(b)
            finally:
                if fg is not None:
                    fg.close()
        info = {
            "records": total,
            "alphabet": alphabet.symbols,
            "sigma": alphabet.sigma,
            "marker": MARKER,
            "lcp_width": lcp_width,
            "gsa": emit_gsa,
            "gsa_width": GSA_WIDTH if emit_gsa else None,
        }
        info.update(manifest or {})
        paths["json"].write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return info


@dataclass
class Outputs:
    bwt: bytes
    lcp: np.ndarray
    gsa: Optional[np.ndarray]
    manifest: dict = field(default_factory=dict)


def load_outputs(prefix) -> Outputs:
    paths = output_paths(prefix)
    manifest = json.loads(paths["json"].read_text())
    lcp = np.fromfile(paths["lcp"], dtype=lcp_dtype(manifest["lcp_width"]))
    gsa = None
    if manifest.get("gsa"):
        gsa = np.fromfile(paths["gsa"], dtype=GSA_DTYPE).reshape(-1, 2)
    return Outputs(paths["bwt"].read_bytes(), lcp, gsa, manifest)


def oracle_outputs(c: SequenceCollection, ref: OracleResult):
    """The oracle's arrays rendered exactly as the output files store them."""
    bwt = c.alphabet.rendering[ref.bwt].tobytes()
    gsa = np.array([(e.pos, e.seq) for e in ref.gsa], dtype=GSA_DTYPE).reshape(-1, 2)
    return bwt, ref.lcp, gsa


def first_difference(a, b) -> Optional[int]:
    """Index of the first differing element, or None when equal."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = min(len(a), len(b))
    diff = np.nonzero(a[:n] != b[:n])[0]
    if diff.size:
        return int(diff[0])
    if len(a) != len(b):
        return n
    return None
