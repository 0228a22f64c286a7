"""Command line driver: convergence tables and solution snapshots as CSV.

Examples::

    cwenonet --scenario recon-smooth --params sigma1 --n-max 14 --out smooth.csv
    cwenonet --scenario traffic-smooth --params sigma2 --n-min 0 --n-max 4
    cwenonet --scenario dam-break-a --emit snapshot --times 0.35,0.6 --out dam/
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .cweno import PARAM_SETS, ParamSet, get_param_set, validate_conditions
from .harness import (SCENARIOS, ConvergenceTable, convergence_study,
                      reconstruction_study, run_scenario)

__all__ = ["CliConfig", "parse_args", "emit_table_csv", "emit_snapshot_csv", "main"]

RECON_CASES = {"recon-smooth": "smooth", "recon-disc-i25": "disc_I25",
               "recon-disc-i15": "disc_I15"}
SCENARIO_NAMES = {name.replace("_", "-"): name for name in SCENARIOS}
CUSTOM_FLAGS = ("K", "q", "p", "K0", "gamma0", "K1", "gamma1", "eps")


@dataclass
class CliConfig:
    scenario: str
    param_set: str
    params: ParamSet
    n_min: int
    n_max: int
    out: str | None
    emit: str
    times: tuple
    warnings: tuple = ()

    @property
    def is_reconstruction(self) -> bool:
        return self.scenario in RECON_CASES


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="cwenonet",
        description="CWENO3 finite volume schemes on networks: convergence tables "
                    "and solution snapshots.")
    ap.add_argument("--scenario", required=True,
                    choices=list(RECON_CASES) + list(SCENARIO_NAMES))
    ap.add_argument("--params", default="sigma1",
                    choices=list(PARAM_SETS) + ["custom"])
    ap.add_argument("--n-min", type=int, default=None)
    ap.add_argument("--n-max", type=int, default=None)
    ap.add_argument("--out", default=None,
                    help="CSV file for tables, directory for snapshots (default stdout / .)")
    ap.add_argument("--emit", choices=("table", "snapshot"), default="table")
    ap.add_argument("--times", default=None,
                    help="comma separated snapshot times")
    custom = ap.add_argument_group("custom parameters (with --params custom)")
    custom.add_argument("--K", type=float, default=1.0)
    custom.add_argument("--q", type=float, default=None)
    custom.add_argument("--p", type=int, default=2)
    custom.add_argument("--K0", type=float, default=1.0)
    custom.add_argument("--gamma0", type=float, default=None)
    custom.add_argument("--K1", type=float, default=None)
    custom.add_argument("--gamma1", type=float, default=None)
    custom.add_argument("--eps", type=float, default=None,
                        help="constant epsilon instead of K h^q")
    return ap


def _custom_params(ap, a) -> ParamSet:
    missing = [f"--{f}" for f in ("gamma0", "K1", "gamma1") if getattr(a, f) is None]
    if a.q is None and a.eps is None:
        missing.append("--q or --eps")
    if missing:
        ap.error("--params custom needs " + ", ".join(missing))
    try:
        return ParamSet(K=a.K, q=0.0 if a.q is None else a.q, p=a.p, K0=a.K0,
                        gamma0=a.gamma0, K1=a.K1, gamma1=a.gamma1, eps_const=a.eps,
                        name="custom")
    except ValueError as exc:
        ap.error(str(exc))


def parse_args(argv) -> CliConfig:
    """Parse ``argv`` (without the program name); exits with status 2 on misuse."""
    ap = _build_parser()
    argv = list(argv)
    if not argv:
        ap.print_usage(sys.stderr)
        ap.exit(2, f"{ap.prog}: error: no arguments given\n")
    a = ap.parse_args(argv)
    given = {f for f in CUSTOM_FLAGS if any(s == f"--{f}" or s.startswith(f"--{f}=")
                                            for s in argv)}
    if a.params == "custom":
        params = _custom_params(ap, a)
    else:
        if given:
            ap.error(f"--{sorted(given)[0]} requires --params custom")
        params = get_param_set(a.params)

    recon = a.scenario in RECON_CASES
    if recon and a.emit == "snapshot":
        ap.error("reconstruction studies only emit tables")
    if recon:
        n_min = 1 if a.n_min is None else a.n_min
        n_max = 14 if a.n_max is None else a.n_max
    else:
        spec = SCENARIOS[SCENARIO_NAMES[a.scenario]]
        n_min = (0 if a.emit == "table" else spec.default_n) if a.n_min is None else a.n_min
        n_max = (4 if a.emit == "table" else n_min) if a.n_max is None else a.n_max
    if n_min < 0 or n_min > n_max:
        ap.error(f"need 0 <= n-min <= n-max, got {n_min}, {n_max}")

    times = ()
    if a.times is not None:
        if a.emit != "snapshot":
            ap.error("--times only applies to --emit snapshot")
        try:
            times = tuple(float(s) for s in a.times.split(",") if s.strip())
        except ValueError:
            ap.error(f"bad --times list {a.times!r}")
        if not times or any(not (t > 0 and math.isfinite(t)) for t in times):
            ap.error("snapshot times must be positive")

    warnings = ()
    report = validate_conditions(params)
    if not report.ok:
        warnings = tuple(report.failures())
        print(f"warning: parameter set {params.name} violates the convergence "
              f"conditions: {'; '.join(warnings)}", file=sys.stderr)
    return CliConfig(a.scenario, a.params, params, n_min, n_max, a.out, a.emit,
                     times, warnings)


def _fmt_eoc(e):
    return "" if e is None or not math.isfinite(e) else f"{e:.2f}"


def emit_table_csv(table: ConvergenceTable, path) -> None:
    """Write ``n,h,error,eoc``; ``path`` may be a file name or an open text stream."""
    lines = ["n,h,error,eoc"]
    for n, h, err, eoc in table.rows:
        lines.append(f"{n},{h:.2e},{err:.6e},{_fmt_eoc(eoc)}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def read_table_csv(path) -> list:
    """Rows ``(n, h, error, eoc)`` of a file written by :func:`emit_table_csv`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "n,h,error,eoc":
            raise ValueError(f"unexpected header {header!r}")
        rows = []
        for line in fh:
            n, h, err, eoc = line.rstrip("\n").split(",")
            rows.append((int(n), float(h), float(err), float(eoc) if eoc else None))
    return rows


def emit_snapshot_csv(edges, path, prefix="") -> list:
    """One CSV per edge, ``x_center,<components>``; returns the written paths.

    ``edges`` is an iterable of :class:`~cwenonet.fv.EdgeState` (or a
    :class:`~cwenonet.network.Network`) whose ``ubar`` is written.
    """
    if hasattr(edges, "edges"):
        edges = edges.edges.values()
    os.makedirs(path, exist_ok=True)
    written = []
    for es in edges:
        fname = os.path.join(path, f"{prefix}{es.name}.csv")
        cols = np.column_stack([es.grid.centers, es.ubar])
        with open(fname, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x_center," + ",".join(es.model.components) + "\n")
            for row in cols:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        written.append(fname)
    return written


def _run(cfg: CliConfig):
    if cfg.is_reconstruction:
        table = reconstruction_study(RECON_CASES[cfg.scenario], cfg.params,
                                     range(cfg.n_min, cfg.n_max + 1))
        return _write_table(table, cfg.out)
    name = SCENARIO_NAMES[cfg.scenario]
    if cfg.emit == "table":
        spec = SCENARIOS[name]
        if spec.exact is None and spec.reference_n is None:
            raise ValueError(f"scenario {cfg.scenario} has no exact or reference solution; "
                             "use --emit snapshot")
        table = convergence_study(spec, cfg.params, range(cfg.n_min, cfg.n_max + 1))
        return _write_table(table, cfg.out)
    out = cfg.out or "."
    written = []
    for n in range(cfg.n_min, cfg.n_max + 1):
        if cfg.times:
            res = run_scenario(name, cfg.params, n, t_final=max(cfg.times),
                               snapshot_times=cfg.times)
        else:
            res = run_scenario(name, cfg.params, n)
        multi = cfg.n_max > cfg.n_min
        for t, states in sorted(res.snapshots.items()):
            tag = f"n{n}_t{t:g}_" if multi else f"t{t:g}_"
            written += _emit_states(res, states, out, tag)
    for f in written:
        print(f)
    return 0


def _emit_states(res, states, out, prefix):
    edges = list(res.network.edges.values())
    if states is not None:
        saved = [es.ubar for es in edges]
        for es in edges:
            es.ubar = states[es.name]
    try:
        return emit_snapshot_csv(edges, out, prefix)
    finally:
        if states is not None:
            for es, u in zip(edges, saved):
                es.ubar = u


def _write_table(table, out):
    if out is None:
        emit_table_csv(table, sys.stdout)
    else:
        emit_table_csv(table, out)
    return 0


def main(argv=None) -> int:
    cfg = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return _run(cfg)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"cwenonet: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
