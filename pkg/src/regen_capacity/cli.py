"""Command-line front end.

Subcommands: ideal-sweep, sine-sweep, analytic, optimize, figure.  Sweeps
emit CSV or JSON tables with a fixed column schema; `figure` bundles named
reproduction recipes with documented parameter choices.  Config files are
flat key=value text mirroring the flags; explicit flags win.

Exit codes: 0 success, 2 config error, 3 numeric/convergence error, 4 IO
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .capacity import optimize_scalar
from .errors import AccuracyError, ConfigError, ConvergenceError
from .ideal_regen import IdealChannelSpec, optimal_cell
from .sweeps import (SweepRecord, analytic_records, ideal_sweep_records,
                     sine_point_capacity, sine_sweep_records)

__all__ = ["RunConfig", "main", "emit", "run_ideal_sweep", "run_sine_sweep",
           "run_analytic", "run_optimize", "run_figure"]

COMMANDS = ("ideal-sweep", "sine-sweep", "analytic", "optimize", "figure")
FORMATS = ("csv", "json")
CONSTELLATIONS = ("rect", "ring", "binary")

ANALYTIC_FIELDS = ("R", "delta", "d_opt", "snr_opt", "gain_bits",
                   "sine_gain_q0.5", "sine_gain_q1")


@dataclasses.dataclass
class RunConfig:
    """Validated run parameters; see `validate` for the field domains."""

    command: str
    R: int = 10
    N: float = 1.0
    n: int = 2
    alpha: float | None = None
    beta: float | None = None
    q: float | None = None
    constellation: str = "rect"
    M: int | None = None
    snr_db_min: float = -10.0
    snr_db_max: float = 40.0
    snr_points: int = 51
    snr_db: float | None = None       # single point for `optimize`
    grid_points: int | None = None    # scan resolution override
    tol: float | None = None
    seed: int = 0
    threads: int = 1
    name: str | None = None           # figure preset name
    out: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        def bad(field: str, why: str):
            raise ConfigError(f"invalid {field}: {why}")

        if self.command not in COMMANDS:
            bad("command", f"must be one of {COMMANDS}")
        if not isinstance(self.R, int) or self.R < 1:
            bad("R", "must be an integer >= 1")
        if not self.N > 0:
            bad("N", "must be positive")
        if self.n not in (1, 2):
            bad("n", "must be 1 or 2")
        if self.format not in FORMATS:
            bad("format", f"must be one of {FORMATS}")
        if self.constellation not in CONSTELLATIONS:
            bad("constellation", f"must be one of {CONSTELLATIONS}")
        if self.M is not None and (not isinstance(self.M, int) or self.M < 2):
            bad("M", "must be an integer >= 2")
        if not self.snr_db_min < self.snr_db_max:
            bad("snr_db_min", "SNR grid must be ascending (snr_db_min < snr_db_max)")
        if not isinstance(self.snr_points, int) or self.snr_points < 1:
            bad("snr_points", "must be an integer >= 1")
        if self.grid_points is not None and (not isinstance(self.grid_points, int)
                                             or self.grid_points < 4):
            bad("grid_points", "must be an integer >= 4")
        if self.tol is not None and not self.tol > 0:
            bad("tol", "must be positive")
        if not isinstance(self.seed, int) or self.seed < 0:
            bad("seed", "must be a nonnegative integer")
        if not isinstance(self.threads, int) or self.threads < 1:
            bad("threads", "must be an integer >= 1")
        if self.alpha is not None and not self.alpha > 0:
            bad("alpha", "must be positive")
        if self.beta is not None and not self.beta > 0:
            bad("beta", "must be positive")
        if self.command in ("sine-sweep",) or (self.command == "optimize"
                                               and self.q is not None):
            q = self.stability_index()
            if q is None:
                bad("q", "sine commands need q or both alpha and beta")
            if not (0.0 < q <= 1.0):
                bad("q", "stability index alpha*beta must lie in (0, 1]")

    def stability_index(self) -> float | None:
        if self.q is not None:
            return self.q
        if self.alpha is not None and self.beta is not None:
            return self.alpha * self.beta
        return None

    def rho_grid(self) -> np.ndarray:
        db = np.linspace(self.snr_db_min, self.snr_db_max, self.snr_points)
        return 10.0 ** (db / 10.0)


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment, blank lines ignored."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"invalid config: cannot read {path}: {exc}") from exc
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"invalid config: line {ln} is not key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in {f.name for f in dataclasses.fields(RunConfig)}:
            raise ConfigError(f"invalid config: unknown key {key!r} (line {ln})")
        out[key] = _parse_scalar(val)
    return out


# ---------------------------------------------------------------------------
# output


def record_rows(records: list[SweepRecord]) -> list[dict]:
    return [{f: getattr(r, f) for f in SweepRecord.FIELDS} for r in records]


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def emit(rows: list[dict], fieldnames, fmt: str, path: str | None) -> None:
    """Write the table as CSV (fixed column order, LF) or a JSON array."""
    if fmt == "csv":
        lines = [",".join(fieldnames)]
        for row in rows:
            lines.append(",".join(_csv_cell(row.get(f)) for f in fieldnames))
        text = "\n".join(lines) + "\n"
    else:
        ordered = [{f: row.get(f) for f in fieldnames} for row in rows]
        text = json.dumps(ordered, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def run_ideal_sweep(cfg: RunConfig) -> list[dict]:
    spec = IdealChannelSpec(R=cfg.R, N=cfg.N, n=cfg.n)
    recs = ideal_sweep_records(cfg.rho_grid(), spec, cfg.constellation,
                               M=cfg.M, ba_tol=cfg.tol or 1e-7,
                               threads=cfg.threads)
    return record_rows(recs)


def run_sine_sweep(cfg: RunConfig) -> list[dict]:
    q = cfg.stability_index()
    beta = cfg.beta if (cfg.alpha is not None and cfg.beta is not None) else None
    recs = sine_sweep_records(cfg.rho_grid(), cfg.R, cfg.N, cfg.n, q,
                              beta=beta, ba_tol=cfg.tol or 1e-5,
                              threads=cfg.threads)
    return record_rows(recs)


def run_analytic(cfg: RunConfig) -> list[dict]:
    r_values = range(1, cfg.R + 1) if cfg.R > 1 else [1]
    return analytic_records(r_values, cfg.n)


def run_optimize(cfg: RunConfig) -> list[dict]:
    """Optimize one scalar at a single SNR: filter pitch (sine) or spacing (ideal)."""
    if cfg.snr_db is None:
        raise ConfigError("invalid snr_db: optimize needs a single SNR point")
    rho = 10.0 ** (cfg.snr_db / 10.0)
    q = cfg.stability_index()
    if q is not None:
        d_ref = optimal_cell(IdealChannelSpec(R=cfg.R, N=cfg.N / 2.0, n=cfg.n)).d_opt

        def objective(pitch: float) -> float:
            r = sine_point_capacity(rho, cfg.R, cfg.N, cfg.n, q, pitch)
            return -math.inf if r is None else r.capacity_bits

        opt = optimize_scalar(objective, (d_ref / 4.0, 4.0 * d_ref),
                              tol=cfg.tol or 1e-3,
                              grid_points=cfg.grid_points or 16)
        return [{"snr_db": cfg.snr_db, "parameter": "pitch",
                 "best_value": opt.best_parameter,
                 "best_beta": 2.0 * math.pi / opt.best_parameter,
                 "best_capacity_bits": opt.best_capacity, "flat": opt.flat}]

    from .sweeps import ideal_lattice_capacity
    spec = IdealChannelSpec(R=cfg.R, N=cfg.N, n=cfg.n)
    m = cfg.M or 4
    S = rho * cfg.N

    def objective(d: float) -> float:
        from .constellation import make_rectangular
        from .capacity import blahut_arimoto
        from .ideal_regen import chain_matrix, segment_matrix
        lattice = make_rectangular(m, d)
        w = chain_matrix(segment_matrix(lattice, spec), spec.R)
        try:
            res = blahut_arimoto(w, lattice.points**2, S, tol=cfg.tol or 1e-6)
        except ValueError:
            return -math.inf
        return spec.n * res.capacity_bits

    d_opt = optimal_cell(spec).d_opt
    opt = optimize_scalar(objective, (d_opt / 4.0, 4.0 * math.sqrt(S)),
                          tol=cfg.tol or 1e-3,
                          grid_points=cfg.grid_points or 16)
    best_all, m_best = ideal_lattice_capacity(rho, spec, ba_tol=cfg.tol or 1e-6)
    return [{"snr_db": cfg.snr_db, "parameter": "spacing",
             "best_value": opt.best_parameter,
             "best_capacity_bits": opt.best_capacity, "flat": opt.flat,
             "best_over_sizes_bits": best_all, "best_M": m_best}]


FIGURE_PRESETS = {
    # gain of the ideal regenerative line vs SNR, binary and adaptive lattices
    "ideal-gain": dict(command="ideal-sweep", R=20, constellation="rect",
                       snr_db_min=-8.0, snr_db_max=20.0, snr_points=15),
    # 16-point ring vs 16-point (4 per quadrature) rectangular at R=10
    "constellation-compare": dict(command="ideal-sweep", R=10,
                                  snr_db_min=0.0, snr_db_max=24.0,
                                  snr_points=13),
    # sine-filter line, superstable q=1, pitch-optimized
    "sine-gain": dict(command="sine-sweep", R=10, q=1.0,
                      snr_db_min=0.0, snr_db_max=30.0, snr_points=11),
}


def run_figure(cfg: RunConfig) -> list[dict]:
    if cfg.name not in FIGURE_PRESETS:
        raise ConfigError(
            f"invalid name: figure preset must be one of {sorted(FIGURE_PRESETS)}")
    preset = dict(FIGURE_PRESETS[cfg.name])
    command = preset.pop("command")
    sub = dataclasses.replace(cfg, command=command, **preset)
    if cfg.name == "constellation-compare":
        rect = dataclasses.replace(sub, constellation="rect", M=4)
        ring = dataclasses.replace(sub, constellation="ring", M=16)
        rows = run_ideal_sweep(rect) + run_ideal_sweep(ring)
        _crossover_diagnostic(rows)
        return rows
    sub.validate()
    if command == "ideal-sweep":
        return run_ideal_sweep(sub)
    return run_sine_sweep(sub)


def _crossover_diagnostic(rows: list[dict]) -> None:
    """Report where the ring and rectangular capacity curves cross, if they do."""
    rect = {r["snr_db"]: r["capacity_bits"] for r in rows
            if r["constellation"] == "rect" and r["capacity_bits"] is not None}
    ring = {r["snr_db"]: r["capacity_bits"] for r in rows
            if r["constellation"] == "ring" and r["capacity_bits"] is not None}
    shared = sorted(set(rect) & set(ring))
    diffs = [rect[s] - ring[s] for s in shared]
    for (s0, d0), (s1, d1) in zip(zip(shared, diffs), zip(shared[1:], diffs[1:])):
        if d0 * d1 < 0:
            print(f"# crossover: rect-ring capacity difference changes sign "
                  f"between {s0:g} and {s1:g} dB", file=sys.stderr)
            return
    winner = "rect" if diffs and diffs[-1] > 0 else "ring"
    print(f"# no crossover on this grid; {winner} leads at the top",
          file=sys.stderr)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="regen-capacity",
        description="Capacity sweeps for cascaded regenerative channels.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--R", type=int)
    p.add_argument("--N", type=float)
    p.add_argument("--n", type=int, choices=(1, 2))
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--constellation", choices=CONSTELLATIONS)
    p.add_argument("--M", type=int)
    p.add_argument("--snr-db-min", type=float)
    p.add_argument("--snr-db-max", type=float)
    p.add_argument("--snr-points", type=int)
    p.add_argument("--snr-db", type=float, help="single SNR for `optimize`")
    p.add_argument("--grid-points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--name", help="figure preset name")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=FORMATS)
    return p


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["command"] = args.command
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        np.random.seed(cfg.seed % (2**32))  # seed any library-level RNG use
        if cfg.command == "ideal-sweep":
            rows, fields = run_ideal_sweep(cfg), SweepRecord.FIELDS
        elif cfg.command == "sine-sweep":
            rows, fields = run_sine_sweep(cfg), SweepRecord.FIELDS
        elif cfg.command == "analytic":
            rows, fields = run_analytic(cfg), ANALYTIC_FIELDS
        elif cfg.command == "optimize":
            rows = run_optimize(cfg)
            fields = tuple(rows[0].keys())
        else:
            rows, fields = run_figure(cfg), SweepRecord.FIELDS
        emit(rows, fields, cfg.format, cfg.out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, AccuracyError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
