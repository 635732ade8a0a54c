"""Command-line entry point: ``symspin {decompose,verify,complex,geometry}``.

JSON goes to ``--out`` (or stdout); a plain table with timings goes to stderr.
Exit status: 0 when no record FAILs, 1 when one does, 2 for configuration
errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from . import checks
from .decomposition import IsotypicDecomposition, SpanningFailure, XiIndex
from .fedosov import ConnectionError_, load_connection
from .forms import RicciLikeTensor
from .reports import build_report, dumps, exit_code, render_table
from .results import CheckResult
from .scalars import Scalar

SUITES = {
    "decompose": ("all",),
    "verify": ("all", "clifford", "squares", "sigma-relations", "sigma-relations-blocks", "equivariance", "decomposition",
               "injectivity", "neighbours"),
    "complex": ("all", "edges", "closed-form"),
    "geometry": ("all",),
}
DEFAULT_N = {2: 10, 3: 8}


class ConfigError(ValueError):
    """Invalid run configuration; reported before any computation."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    l: int
    N: int
    B: int
    seed: int
    suite: str
    sigma: str
    sigma_samples: int
    connection: Optional[str]

    def __post_init__(self):
        if self.l < 2:
            raise ConfigError(f"l must be >= 2, got {self.l}")
        if self.B < 0:
            raise ConfigError(f"buffer must be >= 0, got {self.B}")
        if self.N < self.B + 4:
            raise ConfigError(f"max degree N={self.N} must be at least buffer + 4 = {self.B + 4}")
        if self.suite not in SUITES[self.command]:
            raise ConfigError(f"unknown suite {self.suite!r} for {self.command}; choose from {SUITES[self.command]}")
        if self.sigma_samples < 1:
            raise ConfigError("sigma-samples must be positive")
        if self.command == "geometry" and not self.connection:
            raise ConfigError("geometry needs --connection FILE")

    def echo(self) -> dict:
        out = asdict(self)
        if self.connection:
            out["connection_sha256"] = _sha256(self.connection)
        if self.sigma not in ("zero", "random"):
            out["sigma_sha256"] = _sha256(self.sigma)
        return out

    def rng(self, stream: str) -> random.Random:
        """Independent seeded stream per suite, so threading cannot reorder draws."""
        return random.Random(f"{self.seed}:{stream}")


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_sigma(path: str, l: int) -> RicciLikeTensor:
    """Read ``{"l": l, "sigma": [[...]]}``; entries are ints or exact scalar strings."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read sigma file {path}: {exc}") from exc
    if data.get("l") != l:
        raise ConfigError(f"sigma file is for l={data.get('l')}, run has l={l}")
    rows = data.get("sigma")
    if not isinstance(rows, list) or len(rows) != 2 * l or any(len(r) != 2 * l for r in rows):
        raise ConfigError(f"sigma must be a {2 * l}x{2 * l} matrix")
    try:
        mat = [[x if isinstance(x, int) else Scalar.parse(str(x)) for x in r] for r in rows]
        return RicciLikeTensor(mat)
    except ValueError as exc:
        raise ConfigError(f"bad sigma: {exc}") from exc


def threads() -> int:
    raw = os.environ.get("SSL_THREADS")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SSL_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError("SSL_THREADS must be positive")
    return n


Unit = Callable[[], List[CheckResult]]


def run_units(units: Sequence[Unit], n_threads: int) -> Tuple[List[CheckResult], List[float]]:
    """Run independent units, concatenating their records in declared order."""
    def timed(u):
        t = time.perf_counter()
        recs = u()
        return recs, (time.perf_counter() - t) / max(len(recs), 1)

    if n_threads <= 1 or len(units) <= 1:
        results = [timed(u) for u in units]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(timed, units))
    records, timings = [], []
    for recs, per in results:
        records.extend(recs)
        timings.extend([per] * len(recs))
    return records, timings


def _sigmas(cfg: RunConfig) -> List[RicciLikeTensor]:
    if cfg.sigma == "zero":
        return checks.sigma_samples(cfg.l, cfg.rng("sigma"), 1, "zero")
    if cfg.sigma == "random":
        return checks.sigma_samples(cfg.l, cfg.rng("sigma"), cfg.sigma_samples)
    return [load_sigma(cfg.sigma, cfg.l)]


def _units(cfg: RunConfig, decomp: IsotypicDecomposition, sigmas) -> Tuple[List[Unit], dict]:
    l, N = cfg.l, cfg.N
    artifacts = {}
    if cfg.command == "decompose":
        artifacts = {"adjacency": XiIndex(l).adjacency(), "dimension_table": decomp.dimension_table()}
        return [lambda: checks.decomposition_suite(decomp)], artifacts
    if cfg.command == "verify":
        table = {
            "clifford": lambda: checks.clifford_suite(l, N),
            "squares": lambda: checks.closed_form_suite(l, N),
            "sigma-relations": lambda: checks.sigma_relations_suite(l, N, cfg.rng("sigma-relations"), sigmas),
            "sigma-relations-blocks": lambda: [r for s in sigmas for r in checks.sigma_relations_block_suite(l, N, s)],
            "equivariance": lambda: checks.equivariance_suite(l, N, cfg.rng("equivariance")),
            "decomposition": lambda: checks.decomposition_suite(decomp),
            "injectivity": lambda: checks.injectivity_suite(decomp),
            "neighbours": lambda: checks.neighbour_suite(decomp, sigmas),
        }
        names = [k for k in table if k != "sigma-relations-blocks"] if cfg.suite == "all" else [cfg.suite]
        return [table[k] for k in names], artifacts
    if cfg.command == "complex":
        units = []
        if cfg.suite in ("all", "edges"):
            units += [(lambda s=s, n=n: _renumber(checks.complex_suite(decomp, [s]), n))
                      for n, s in enumerate(sigmas)]
        if cfg.suite in ("all", "closed-form"):
            units.append(lambda: checks.closed_curvature_suite(l, N, sigmas))
        return units, artifacts
    conn = load_connection(cfg.connection)
    if conn.l != l:
        raise ConfigError(f"connection is for l={conn.l}, run has l={l}")
    return [lambda: checks.geometry_suite(conn, decomp, cfg.rng("geometry"))], artifacts


def _renumber(records: List[CheckResult], n: int) -> List[CheckResult]:
    for r in records:
        r.name = r.name.replace("[sigma 0]", f"[sigma {n}]")
    return records


def run(cfg: RunConfig) -> dict:
    """Execute a validated configuration and return the report dictionary."""
    sigmas = _sigmas(cfg)
    decomp = IsotypicDecomposition(cfg.l, cfg.N, cfg.B)
    units, artifacts = _units(cfg, decomp, sigmas)
    records, timings = run_units(units, threads())
    report = build_report(cfg.command, cfg.echo(), records, artifacts)
    report["_timings"] = timings
    return report


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symspin", description="Exact checks on symplectic spinor forms.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("decompose", "dimension table and triangle adjacency"),
                        ("verify", "algebraic identity suites"),
                        ("complex", "curvature edge projections and the middle-gap probe"),
                        ("geometry", "checks on a polynomial connection from a config file")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--l", type=int, default=2, help="half the dimension of the symplectic space")
        s.add_argument("--max-deg", type=int, dest="N", default=None, help="polynomial cap N")
        s.add_argument("--buffer", type=int, dest="B", default=3, help="guard band B")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES[name])}")
        s.add_argument("--sigma", default="random", help="zero | random | FILE")
        s.add_argument("--sigma-samples", type=int, default=5, help="number of random sigma samples")
        s.add_argument("--connection", default=None, help="connection config file")
        s.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.N is None:
        args.N = DEFAULT_N.get(args.l, 8)
    if args.sigma not in ("zero", "random") and not Path(args.sigma).is_file():
        raise ConfigError(f"sigma file not found: {args.sigma}")
    if args.connection and not Path(args.connection).is_file():
        raise ConfigError(f"connection file not found: {args.connection}")
    return RunConfig(args.command, args.l, args.N, args.B, args.seed, args.suite, args.sigma,
                     args.sigma_samples, args.connection)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except (ConfigError, ConnectionError_, SpanningFailure) as exc:
        print(f"symspin: error: {exc}", file=sys.stderr)
        return 2
    timings = report.pop("_timings")
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(render_table(report, timings), file=sys.stderr)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
