"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification mismatch.
"""
from __future__ import annotations

import argparse
import logging
import string
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .engine import EngineConfig, run
from .errors import BwtLcpError, CapExceeded
from .ingest import FORMATS, ingest
from .model import DNA, Alphabet, SequenceCollection
from .oracle import oracle_run
from .outputs import emit_outputs, first_difference, load_outputs, oracle_outputs

log = logging.getLogger("bwtlcp")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MISMATCH = 0, 1, 2, 3
DEFAULT_VERIFY_CAP = 10**6
_SYNTH_POOL = string.ascii_uppercase + string.ascii_lowercase + string.digits


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    fmt: str = "auto"
    output_prefix: Optional[Path] = None
    tmp_dir: Optional[Path] = None
    alphabet: Optional[Alphabet] = None
    lcp_width: int = 4
    emit_gsa: bool = False
    verify: bool = False
    verify_cap: int = DEFAULT_VERIFY_CAP
    synth: Optional[tuple] = None


def synth_alphabet(sigma: int) -> Alphabet:
    """DNA letters (ACGNT order) up to five symbols, then letters and digits."""
    if sigma <= 5:
        return Alphabet.from_string("ACGTN"[:sigma])
    if sigma > len(_SYNTH_POOL):
        raise ValueError(f"synthetic alphabets hold at most {len(_SYNTH_POOL)} symbols")
    return Alphabet.from_string(_SYNTH_POOL[:sigma])


def synth(seed: int, m: int, length: int, sigma: int, path) -> Path:
    """Write ``m`` pseudorandom strings of ``length`` symbols, one per line."""
    if m < 1 or length < 1:
        raise ValueError("synthetic collections need m >= 1 and length >= 1")
    symbols = np.frombuffer(synth_alphabet(sigma).symbols.encode("latin-1"), dtype=np.uint8)
    rng = np.random.default_rng(seed)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    block = max(1, (1 << 22) // (length + 1))
    with open(path, "wb") as fh:
        done = 0
        while done < m:
            rows = min(block, m - done)
            out = np.empty((rows, length + 1), dtype=np.uint8)
            out[:, :length] = symbols[rng.integers(0, sigma, size=(rows, length))]
            out[:, length] = ord("\n")
            fh.write(out.data)
            done += rows
    return path


@dataclass
class VerifyReport:
    ok: bool
    mismatches: dict
    checked: tuple

    def lines(self):
        for name in self.checked:
            index = self.mismatches.get(name)
            if index is None:
                yield f"PASS {name}"
            else:
                yield f"FAIL {name}: first divergence at index {index}"


def verify_outputs(c: SequenceCollection, prefix, cap: int = DEFAULT_VERIFY_CAP) -> VerifyReport:
    """Compare the files under ``prefix`` with the brute-force oracle."""
    if c.N > cap:
        raise CapExceeded(c.N, cap)
    out = load_outputs(prefix)
    bwt, lcp, gsa = oracle_outputs(c, oracle_run(c))
    mismatches = {}
    checked = ["bwt", "lcp"]
    index = first_difference(np.frombuffer(out.bwt, dtype=np.uint8),
                             np.frombuffer(bwt, dtype=np.uint8))
    if index is not None:
        mismatches["bwt"] = index
    index = first_difference(out.lcp.astype(np.int64), lcp)
    if index is not None:
        mismatches["lcp"] = index
    if out.gsa is not None:
        checked.append("gsa")
        index = first_difference(out.gsa, gsa)
        if index is not None:
            mismatches["gsa"] = index
    return VerifyReport(not mismatches, mismatches, tuple(checked))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="bwtlcp",
        description="Compute the BWT and LCP array of a string collection "
                    "with sequential scans of external files.",
    )
    p.add_argument("--input", nargs="+", action="extend", default=[], metavar="PATH",
                   help="input files, read in the order given")
    p.add_argument("--format", choices=FORMATS, default="auto",
                   help="input format; auto uses the file extension")
    p.add_argument("--output-prefix", required=True, type=Path,
                   help="write <prefix>.bwt, <prefix>.lcp, <prefix>.json (and .gsa)")
    p.add_argument("--tmp-dir", type=Path, help="directory for segment files")
    p.add_argument("--lcp-width", type=int, choices=(1, 2, 4), default=4,
                   help="bytes per LCP value on disk (default 4)")
    p.add_argument("--emit-gsa", action="store_true", help="also write <prefix>.gsa")
    p.add_argument("--verify", action="store_true",
                   help="cross-check the outputs against the brute-force oracle")
    p.add_argument("--verify-cap", type=int, default=DEFAULT_VERIFY_CAP, metavar="N",
                   help="largest total length accepted by --verify")
    p.add_argument("--synth", metavar="SEED,M,LEN,SIGMA",
                   help="generate a random collection and use it as input")
    p.add_argument("--alphabet", help="symbols of the alphabet, case-insensitive (default ACGNT)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _parse_synth(text: str) -> tuple:
    try:
        seed, m, length, sigma = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--synth expects SEED,M,LEN,SIGMA, got {text!r}") from None
    if m < 1 or length < 1 or not 1 <= sigma <= len(_SYNTH_POOL):
        raise UsageError(f"--synth values out of range: {text!r}")
    return seed, m, length, sigma


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        inputs=list(args.input),
        fmt=args.format,
        output_prefix=args.output_prefix,
        tmp_dir=args.tmp_dir,
        lcp_width=args.lcp_width,
        emit_gsa=args.emit_gsa,
        verify=args.verify,
        verify_cap=args.verify_cap,
    )
    if args.alphabet:
        try:
            # sequences are uppercased on ingest, so the alphabet is too
            cfg.alphabet = Alphabet.from_string(args.alphabet.upper())
        except ValueError as exc:
            raise UsageError(f"--alphabet: {exc}") from None
    if args.synth:
        cfg.synth = _parse_synth(args.synth)
    if not cfg.inputs and cfg.synth is None:
        raise UsageError("give --input files or --synth")
    if cfg.synth is not None and len(cfg.inputs) > 1:
        raise UsageError("--synth writes a single input file")
    if cfg.synth is None:
        missing = [str(p) for p in cfg.inputs if not Path(p).is_file()]
        if missing:
            raise UsageError(f"input not found: {', '.join(missing)}")
    return cfg


def execute(cfg: RunConfig) -> int:
    started = time.perf_counter()
    alphabet = cfg.alphabet
    if cfg.synth is not None:
        seed, m, length, sigma = cfg.synth
        target = cfg.inputs[0] if cfg.inputs else f"{cfg.output_prefix}.reads.txt"
        path = synth(seed, m, length, sigma, target)
        log.info("wrote synthetic collection %s", path)
        cfg.inputs = [path]
        if alphabet is None:
            alphabet = synth_alphabet(sigma)
    alphabet = alphabet or DNA
    c = ingest(cfg.inputs, cfg.fmt, alphabet)
    log.info("collection: m=%d N=%d K=%d sigma=%d", c.m, c.N, c.K, alphabet.sigma)
    if cfg.verify and c.N > cfg.verify_cap:
        raise CapExceeded(c.N, cfg.verify_cap)

    engine_cfg = EngineConfig(tmp_dir=None, lcp_width=cfg.lcp_width, emit_gsa=cfg.emit_gsa)
    tmp_parent = None
    if cfg.tmp_dir is not None:
        cfg.tmp_dir.mkdir(parents=True, exist_ok=True)
        tmp_parent = tempfile.mkdtemp(prefix="bwtlcp-", dir=cfg.tmp_dir)
        engine_cfg.tmp_dir = Path(tmp_parent)
    result = run(c, engine_cfg)
    try:
        if tmp_parent is not None:
            result.owns_directory = True
        manifest = {
            "m": c.m,
            "N": c.N,
            "K": c.K,
            "engine_seconds": result.stats["seconds"],
            "us_per_base": result.stats["us_per_base"],
            "memory": result.stats["memory"],
        }
        emit_outputs(result.chunks(), cfg.output_prefix, alphabet, cfg.lcp_width,
                     cfg.emit_gsa, manifest)
    finally:
        result.close()
    log.info("engine %.2fs, %.3f us per input base", result.stats["seconds"],
             result.stats["us_per_base"])

    if cfg.verify:
        report = verify_outputs(c, cfg.output_prefix, cfg.verify_cap)
        for line in report.lines():
            print(line)
        if not report.ok:
            return EXIT_MISMATCH
    log.info("done in %.2fs", time.perf_counter() - started)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return execute(cfg)
    except UsageError as exc:
        print(f"bwtlcp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BwtLcpError, ValueError, OSError) as exc:
        print(f"bwtlcp: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
