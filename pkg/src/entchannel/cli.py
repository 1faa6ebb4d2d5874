"""
Batch front end.

Subcommands map onto the engines: `spectrum` and `purity` drive the exact
and low-rank channels, `trajectory` the stochastic unraveling, `scan` the
spatial min-entropy sweep, `kicked-ising-check` and `xxz` the two model
studies, and `validate` the internal cross-check suite. Every run writes
one or more flat tables (csv or json) plus a manifest echoing the fully
resolved configuration, so a run can be reproduced from its artifacts.

Configuration precedence: command-line flags > --config file > defaults.
The --config file is either an INI file with a [run] section or a
manifest emitted by an earlier run. Realizations are distributed over a
process pool sized by the ENTCHANNEL_WORKERS environment variable
(default 1); outputs are ordered by realization index either way.
"""

import argparse
import configparser
import csv
import functools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analysis import EIG_FLOOR, EntropySeries, power_spectrum, renyi
from .exact import apply_channel, corner_bond_state, init_ancilla, run_exact, run_purity
from .gates import GATE_FAMILIES, make_gate_sampler, make_product_state
from .kraus import (
    SliceSource,
    check_bistochastic,
    check_dual_unitarity,
    check_left_canonical,
    check_right_canonical,
)
from .linalg import eigvals_hermitian, realization_rng
from .lowrank import apply_channel_lowrank, calibrate_rank, run_lowrank, truncate
from .oracle import bond_cut, central_slice_index, evolve_brickwork, reduced_spectrum, slice_grid
from .trajectory import estimate_purity_pairs

SCHEMA_VERSION = 1

_ENGINES = ("exact", "lowrank", "trajectory")


def _parse_depths(text):
    """Depth lists: '8', '2,4,6', or '2..8' (inclusive)."""
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _parse_h(text):
    return None if str(text) == "random" else float(text)


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes"):
        return True
    if str(text).lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text):
    if isinstance(text, (list, tuple)):
        return list(text)
    return [x.strip() for x in str(text).split(",") if x.strip()]


# one converter per config key; INI values arrive as strings and must agree
# with what the flags produce
_CONVERTERS = {
    "q": int,
    "depth": int,
    "depths": _parse_depths,
    "model": str,
    "engine": str,
    "K": int,
    "adaptive": _parse_bool,
    "n_pairs": int,
    "init": str,
    "steps": int,
    "burn_in": int,
    "realizations": int,
    "cuts": int,
    "seed": int,
    "out": str,
    "format": str,
    "observables": _parse_list,
    "units": str,
    "J": float,
    "b": float,
    "h": _parse_h,
    "eta": complex,
    "lam": float,
    "reuse_gates": _parse_bool,
    "tol": float,
}


@dataclass
class RunConfig:
    """Fully resolved parameters of one run; every field is picklable so
    realization tasks can ship to worker processes."""

    command: str
    q: int = 2
    depth: int = 4
    depths: list = field(default_factory=list)
    model: str = "haar"
    engine: str = "exact"
    K: int = 0  # 0 = pick min(D, 128) at run time
    adaptive: bool = False
    n_pairs: int = 100
    init: str = "zeros"
    steps: int = 64
    burn_in: int = -1  # -1 = twice the depth in question
    realizations: int = 1
    cuts: int = 5000
    seed: int = 0
    out: str = ""
    format: str = "csv"
    observables: list = field(default_factory=lambda: ["spectrum"])
    units: str = "nats"
    J: float = math.pi / 4
    b: float = math.pi / 4
    h: float = None
    eta: complex = 1.5j
    lam: float = 0.7
    reuse_gates: bool = False
    tol: float = 1e-10

    def validate(self):
        if self.q < 2:
            raise ValueError("q must be >= 2")
        for t in [self.depth] + list(self.depths):
            if t < 1:
                raise ValueError("depth must be >= 1")
            if self.command in ("spectrum", "purity", "trajectory", "scan") and self.steps <= self.burn_in_for(t):
                raise ValueError(f"steps ({self.steps}) must exceed burn_in ({self.burn_in_for(t)}) at depth {t}")
            # refuse before allocating: the exact engine holds dense D x D
            # ancillas, the vector engines hold D-vectors in blocks
            D = self.q ** (t - 1)
            runs_engine = self.command in ("spectrum", "purity", "scan", "xxz")
            if runs_engine and self.engine == "exact" and D > 4096:
                raise ValueError(f"exact engine caps the bond dimension at 4096, got D = {D} at depth {t}; use lowrank or trajectory")
            if D * max(self.q ** 2 * self.rank_for(t), 2 * self.n_pairs) > 2 ** 28:
                raise ValueError(f"depth {t} wants more than 2^28 bond amplitudes; reduce depth, K, or pairs")
        if self.model not in GATE_FAMILIES:
            raise ValueError(f"model must be one of {GATE_FAMILIES}")
        if self.engine not in _ENGINES:
            raise ValueError(f"engine must be one of {_ENGINES}")
        if self.realizations < 1 or self.n_pairs < 1:
            raise ValueError("realizations and n_pairs must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.units not in ("nats", "bits"):
            raise ValueError("units must be nats or bits")
        if self.adaptive and self.engine != "lowrank":
            raise ValueError("--adaptive only applies to the lowrank engine")
        if not self.out:
            self.out = f"entchannel-{self.command}"
        return self

    def rank_for(self, t):
        return self.K if self.K else min(self.q ** (t - 1), 128)

    def burn_in_for(self, t):
        return 2 * t if self.burn_in < 0 else self.burn_in

    def sampler(self, rng):
        return make_gate_sampler(
            self.model, self.q, rng,
            J=self.J, b=self.b, h=self.h, eta=self.eta, lam=self.lam,
        )

    def source(self, rng, t=None):
        t = self.depth if t is None else t
        state = make_product_state(self.init, self.q, 2, rng)
        return SliceSource(self.sampler(rng), t, state, reuse_gates=self.reuse_gates)


def _resolve(command, defaults, namespace):
    """Command defaults < config file < explicit flags."""
    merged = dict(defaults)
    path = getattr(namespace, "config", None)
    if path:
        merged.update(_load_config_file(path))
    for key, value in vars(namespace).items():
        if key not in ("config", "func", "command"):
            merged[key] = value
    cfg = RunConfig(command=command)
    for key, value in merged.items():
        if key not in _CONVERTERS:
            raise SystemExit(f"unknown config key {key!r}")
        # defaults and argparse values arrive typed; only config-file text
        # still needs conversion
        setattr(cfg, key, _CONVERTERS[key](value) if isinstance(value, str) else value)
    return cfg.validate()


def _load_config_file(path):
    if path.endswith(".json"):
        with open(path) as f:
            doc = json.load(f)
        return doc["config"] if "config" in doc else doc
    parser = configparser.ConfigParser()
    with open(path) as f:
        parser.read_file(f)
    if not parser.has_section("run"):
        raise SystemExit(f"{path} has no [run] section")
    return dict(parser.items("run"))


def _config_echo(cfg):
    doc = asdict(cfg)
    doc["eta"] = str(cfg.eta)
    doc["h"] = "random" if cfg.h is None else cfg.h
    return doc


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_table(path, fmt, columns, rows):
    name = f"{path}.{fmt}"
    if fmt == "csv":
        with open(name, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
    else:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "columns": list(columns),
            "rows": [[x if isinstance(x, str) else (int(x) if isinstance(x, (int, np.integer)) else float(x)) for x in row] for row in rows],
        }
        with open(name, "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
    return name


def _write_manifest(cfg, artifacts, extra, t0):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "package_version": __version__,
        "config": _config_echo(cfg),
        "artifacts": artifacts,
        "wall_clock_s": round(time.monotonic() - t0, 3),
    }
    doc.update(extra)
    name = f"{cfg.out}.manifest.json"
    with open(name, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
    return name


def _workers():
    return max(1, int(os.environ.get("ENTCHANNEL_WORKERS", "1")))


def _pool_map(fn, tasks):
    """Order-preserving map over realization tasks."""
    n = _workers()
    if n == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def _order_label(n):
    return "inf" if math.isinf(n) else _fmt(n) if not float(n).is_integer() else str(int(n))


# ---------------------------------------------------------------- spectrum

def _spectrum_realization(cfg, index):
    rng = realization_rng(cfg.seed, index)
    source = cfg.source(rng)
    D = cfg.q ** (cfg.depth - 1)
    r0 = init_ancilla("maximally-mixed", D)
    burn_in = cfg.burn_in_for(cfg.depth)
    if cfg.engine == "lowrank":
        K = cfg.rank_for(cfg.depth)
        records, _ = run_lowrank(source, truncate(r0, K), cfg.steps, burn_in, K=K)
    else:
        records, _ = run_exact(source, r0, cfg.steps, burn_in)
    return records


def cmd_spectrum(cfg):
    tasks = list(range(cfg.realizations))
    per_run = _pool_map(functools.partial(_spectrum_realization, cfg), tasks)
    artifacts = []
    if "spectrum" in cfg.observables:
        rows = []
        for i, records in enumerate(per_run):
            for r in records:
                for rank, lam in enumerate(r.eigenvalues):
                    energy = -math.log(lam) if lam >= EIG_FLOOR else math.inf
                    rows.append((i, r.step, rank, lam, energy))
        artifacts.append(_write_table(cfg.out, cfg.format, ("realization", "step", "rank_index", "eigenvalue", "energy"), rows))
    if "entropy" in cfg.observables:
        orders = (1, 2, math.inf)
        rows = []
        for i, records in enumerate(per_run):
            series = EntropySeries.from_records(records, orders).in_units(cfg.units)
            for step, values in zip(series.steps, series.values):
                for n, v in zip(series.orders, values):
                    rows.append((i, int(step), _order_label(n), v, series.units))
        artifacts.append(_write_table(f"{cfg.out}-entropy", cfg.format, ("realization", "step", "n", "value", "units"), rows))
    if not artifacts:
        raise SystemExit("observables must include spectrum and/or entropy")
    return artifacts, {}


# ------------------------------------------------------------------ purity

def _purity_realization(cfg, task):
    t, index = task
    rng = realization_rng(cfg.seed, index)
    source = cfg.source(rng, t)
    burn_in = cfg.burn_in_for(t)
    D = cfg.q ** (t - 1)
    if cfg.engine == "trajectory":
        psi0 = np.zeros(D, dtype=complex)
        psi0[0] = 1.0
        est = estimate_purity_pairs(source, psi0, cfg.steps, cfg.n_pairs, rng)
        return est.averaged(burn_in)[0]
    if cfg.engine == "lowrank":
        K = cfg.rank_for(t)
        r0 = truncate(init_ancilla("maximally-mixed", D), K)
        records, _ = run_lowrank(source, r0, cfg.steps, burn_in, K=K)
        return float(np.mean([(r.eigenvalues ** 2).sum() for r in records]))
    values, _ = run_purity(source, init_ancilla("maximally-mixed", D), cfg.steps, burn_in)
    return float(values.mean())


def cmd_purity(cfg):
    depths = cfg.depths or [cfg.depth]
    extra = {}
    rows = []
    for t in depths:
        if cfg.adaptive:
            reference = (4 / 5) ** (t - 1)
            if cfg.model != "haar" or cfg.q != 2:
                raise SystemExit("--adaptive calibrates against the q=2 haar closed form only")

            def evaluate(K, t=t):
                sub = [_purity_realization_with_K(cfg, (t, i), K) for i in range(cfg.realizations)]
                return float(np.mean(sub))

            K, value, history = calibrate_rank(evaluate, reference, K0=max(2, cfg.K or 8))
            extra[f"calibration_t{t}"] = {"K": K, "history": [[k, v] for k, v in history]}
            cfg_K_saved, cfg.K = cfg.K, K
        values = _pool_map(functools.partial(_purity_realization, cfg), [(t, i) for i in range(cfg.realizations)])
        if cfg.adaptive:
            cfg.K = cfg_K_saved
        values = np.asarray(values)
        stderr = values.std(ddof=1) / math.sqrt(values.size) if values.size > 1 else 0.0
        closed = (4 / 5) ** (t - 1) if (cfg.model == "haar" and cfg.q == 2) else ""
        rows.append((t, cfg.engine, values.size, float(values.mean()), float(stderr), closed))
    artifact = _write_table(cfg.out, cfg.format, ("t", "engine", "realizations", "mean_purity", "stderr", "closed_form"), rows)
    return [artifact], extra


def _purity_realization_with_K(cfg, task, K):
    saved, cfg.K = cfg.K, K
    try:
        return _purity_realization(cfg, task)
    finally:
        cfg.K = saved


# -------------------------------------------------------------- trajectory

def _trajectory_realization(cfg, index):
    rng = realization_rng(cfg.seed, index)
    source = cfg.source(rng)
    D = cfg.q ** (cfg.depth - 1)
    psi0 = np.zeros(D, dtype=complex)
    psi0[0] = 1.0
    est = estimate_purity_pairs(source, psi0, cfg.steps, cfg.n_pairs, rng)
    return est


def cmd_trajectory(cfg):
    ests = _pool_map(functools.partial(_trajectory_realization, cfg), list(range(cfg.realizations)))
    rows = []
    for i, est in enumerate(ests):
        for length, m, s in zip(est.lengths, est.mean, est.stderr):
            rows.append((i, int(length), m, s))
    artifact = _write_table(cfg.out, cfg.format, ("realization", "length", "mean_fidelity", "stderr"), rows)
    averaged = [est.averaged(cfg.burn_in_for(cfg.depth))[0] for est in ests]
    extra = {"purity_mean": float(np.mean(averaged))}
    if len(averaged) > 1:
        extra["purity_stderr"] = float(np.std(averaged, ddof=1) / math.sqrt(len(averaged)))
    return [artifact], extra


# -------------------------------------------------------------------- scan

def cmd_scan(cfg):
    rng = realization_rng(cfg.seed, 0)
    source = cfg.source(rng)
    D = cfg.q ** (cfg.depth - 1)
    burn_in = cfg.burn_in_for(cfg.depth)
    steps = burn_in + cfg.cuts
    series = np.empty(cfg.cuts)
    if cfg.engine == "lowrank":
        K = cfg.rank_for(cfg.depth)
        state = truncate(init_ancilla("maximally-mixed", D), K)
        for j in range(steps):
            state = apply_channel_lowrank(source(j), state, K)
            if j >= burn_in:
                series[j - burn_in] = -math.log(state.eigenvalues[0])
    else:
        state = init_ancilla("maximally-mixed", D)
        for j in range(steps):
            state = apply_channel(source(j), state)
            if j >= burn_in:
                series[j - burn_in] = -math.log(eigvals_hermitian(state.R)[0])
    spec = power_spectrum(series)
    artifacts = [
        _write_table(cfg.out, cfg.format, ("k", "power"), list(zip(spec.k, spec.power))),
        _write_table(f"{cfg.out}-series", cfg.format, ("cut", "s_inf", "units"), [(i, v, "nats") for i, v in enumerate(series)]),
    ]
    extra = {"xi": spec.xi, "series_mean": float(series.mean()), "series_std": float(series.std())}
    return artifacts, extra


# ---------------------------------------------------- kicked-ising-check

def cmd_kicked_ising_check(cfg):
    t = cfg.depth
    rng = realization_rng(cfg.seed, 0)
    sampler = make_gate_sampler("kicked-ising", cfg.q, rng, J=cfg.J, b=cfg.b, h=cfg.h)
    state = make_product_state(cfg.init, cfg.q, 2, rng)
    source = SliceSource(sampler, t, state)
    sl = source(0)
    target = (t - 1) * math.log(2)
    checks = [
        ("left_canonical", check_left_canonical(sl)),
        ("bistochastic", check_bistochastic(sl)),
        ("dual_unitarity", max(check_dual_unitarity(g) for g in sl.gates)),
    ]
    records, _ = run_exact(source, init_ancilla("maximally-mixed", sl.D), cfg.steps, 0)
    for n in (1, 2, math.inf):
        dev = max(abs(renyi(r, n) - target) for r in records)
        checks.append((f"entropy_S{_order_label(n)}_error", dev))
    rows = [(name, value, cfg.tol, "PASS" if value <= cfg.tol else "FAIL") for name, value in checks]
    artifact = _write_table(cfg.out, cfg.format, ("check", "value", "threshold", "status"), rows)
    failed = [r for r in rows if r[3] == "FAIL"]
    for name, value, tol, status in rows:
        print(f"{status:4s} {name}: {value:.3e} (tol {tol:g})")
    return [artifact], {"failed": len(failed)}, 1 if failed else 0


# --------------------------------------------------------------------- xxz

def cmd_xxz(cfg):
    t = cfg.depth
    rng = realization_rng(cfg.seed, 0)
    sampler = cfg.sampler(rng)
    state = make_product_state(cfg.init, cfg.q, 2, rng)
    source = SliceSource(sampler, t, state, reuse_gates=True)
    # start from the bond state at the edge of the covered region, so step j
    # is the entanglement j slices in from the edge: the convergence
    # transient is physical, not an artifact of the ancilla seed
    r0 = corner_bond_state(*state.pair(0), t)
    rows = []
    if cfg.engine == "lowrank":
        K = cfg.rank_for(t)
        # the corner state is pure: pass the cap or the first truncation
        # would pin the rank at 1
        st = truncate(r0, K)
        for j in range(cfg.steps):
            st = apply_channel_lowrank(source(j), st, K)
            rows.append((0, j, "inf", _to_units(-math.log(st.eigenvalues[0]), cfg.units), cfg.units))
    else:
        st = r0
        for j in range(cfg.steps):
            st = apply_channel(source(j), st)
            rows.append((0, j, "inf", _to_units(-math.log(eigvals_hermitian(st.R)[0]), cfg.units), cfg.units))
    artifact = _write_table(cfg.out, cfg.format, ("realization", "step", "n", "value", "units"), rows)
    values = [r[3] for r in rows]
    quarter = values[-max(1, len(values) // 4):]
    extra = {"max_s_inf": max(values), "final_s_inf": values[-1], "plateau_s_inf": sum(quarter) / len(quarter)}
    return [artifact], extra


def _to_units(x, units):
    return x / math.log(2) if units == "bits" else x


# ---------------------------------------------------------------- validate

def _validate_checks(seed):
    """Desk-scale cross-checks: canonical forms, middle-out vs materialized
    Kraus sum, finite-circuit spectra, low-rank at full rank."""
    from .gates import gate_haar  # local import keeps the module graph flat

    rng = realization_rng(seed, 0)
    checks = []

    dev = 0.0
    for t in (2, 3, 4, 5):
        for model in GATE_FAMILIES:
            sampler = make_gate_sampler(model, 2, rng)
            state = make_product_state("random-product", 2, 2, rng)
            sl = SliceSource(sampler, t, state)(0)
            dev = max(dev, check_left_canonical(sl))
    checks.append(("left_canonical_all_families", dev, 1e-10))

    dev = 0.0
    for t in (2, 3, 4):
        sampler = make_gate_sampler("haar", 2, rng)
        state = make_product_state("random-product", 2, 2, rng)
        sl = SliceSource(sampler, t, state, orientation="se-nw")(0)
        dev = max(dev, check_right_canonical(sl))
    checks.append(("right_canonical_se_nw", dev, 1e-10))

    dev = 0.0
    for trial in range(5):
        sampler = make_gate_sampler("haar", 2, rng)
        state = make_product_state("zeros", 2, 2, rng)
        sl = SliceSource(sampler, 3, state)(0)
        a = sl.materialize().reshape(4, sl.D, sl.D)
        r = init_ancilla("random-pure", sl.D, rng)
        direct = np.einsum("sij,jk,slk->il", a, r.R, a.conj())
        dev = max(dev, float(np.abs(direct - apply_channel(sl, r).R).max()))
    checks.append(("middle_out_vs_kraus_sum", dev, 1e-10))

    dev = 0.0
    for t in (2, 3):
        sampler = make_gate_sampler("haar", 2, rng)
        state = make_product_state("random-product", 2, 2, rng)
        source = SliceSource(sampler, t, state)
        width = 4 * t
        n_slices = (width - t + 1) // 2
        slices = [source(j) for j in range(n_slices)]
        psi = evolve_brickwork(*slice_grid(slices, width), t)
        # the channel walks the cut leftward, so slices are consumed in
        # reverse starting from the pure bond state at the right edge
        records, _ = run_exact(
            lambda j: slices[n_slices - 1 - j],
            init_ancilla("given", 2 ** (t - 1), given=_pure_bond(t)),
            n_slices,
            0,
        )
        for i, rec in enumerate(records):
            cut = bond_cut(t, n_slices - 1 - i)
            if not 1 <= cut <= width - 1:
                continue
            ref = reduced_spectrum(psi, cut)
            n = min(rec.eigenvalues.size, ref.size)
            dev = max(dev, float(np.abs(rec.eigenvalues[:n] - ref[:n]).max()))
    checks.append(("oracle_spectral_equivalence", dev, 1e-8))

    sampler = make_gate_sampler("haar", 2, rng)
    state = make_product_state("zeros", 2, 2, rng)
    source = SliceSource(sampler, 3, state)
    slices = [source(j) for j in range(6)]
    r = init_ancilla("maximally-mixed", 4)
    lr = truncate(r, 4)
    dev = 0.0
    for j in range(6):
        r = apply_channel(slices[j], r)
        lr = apply_channel_lowrank(slices[j], lr)
        exact_spec = eigvals_hermitian(r.R)
        pad = np.zeros(4)
        pad[: lr.eigenvalues.size] = lr.eigenvalues
        dev = max(dev, float(np.abs(exact_spec - pad).max()))
    checks.append(("lowrank_full_rank_vs_exact", dev, 1e-8))

    g = gate_haar(2, rng)
    checks.append(("haar_gate_unitarity", g.unitarity_deviation(), 1e-12))
    return checks


def _pure_bond(t):
    r = np.zeros((2 ** (t - 1), 2 ** (t - 1)), dtype=complex)
    r[0, 0] = 1.0
    return r


def cmd_validate(cfg):
    checks = _validate_checks(cfg.seed)
    rows = [(name, value, tol, "PASS" if value <= tol else "FAIL") for name, value, tol in checks]
    for name, value, tol, status in rows:
        print(f"{status:4s} {name}: {value:.3e} (tol {tol:g})")
    artifact = _write_table(cfg.out, cfg.format, ("check", "value", "threshold", "status"), rows)
    failed = sum(1 for r in rows if r[3] == "FAIL")
    return [artifact], {"failed": failed}, 1 if failed else 0


# -------------------------------------------------------------------- main

def _add_common(p):
    p.add_argument("--config", help="INI file with a [run] section, or a manifest json")
    for flag, kw in [
        ("--q", dict(type=int)),
        ("--depth", dict(type=int)),
        ("--model", dict(choices=GATE_FAMILIES)),
        ("--init", dict()),
        ("--steps", dict(type=int)),
        ("--burn-in", dict(type=int, dest="burn_in")),
        ("--seed", dict(type=int)),
        ("--out", dict()),
        ("--format", dict(choices=("csv", "json"))),
        ("--units", dict(choices=("nats", "bits"))),
        ("--J", dict(type=float)),
        ("--b", dict(type=float)),
        ("--h", dict(type=_parse_h, help="longitudinal field; 'random' draws fresh per gate")),
        ("--eta", dict(type=complex)),
        ("--lam", dict(type=float)),
        ("--reuse-gates", dict(action="store_true", dest="reuse_gates")),
    ]:
        p.add_argument(flag, default=argparse.SUPPRESS, **kw)


def build_parser():
    parser = argparse.ArgumentParser(prog="entchannel", description="Entanglement channels of finite-depth brickwork circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="per-step ancilla spectra (exact or lowrank engine)")
    _add_common(p)
    p.add_argument("--engine", choices=("exact", "lowrank"), default=argparse.SUPPRESS)
    p.add_argument("--K", type=int, default=argparse.SUPPRESS)
    p.add_argument("--realizations", type=int, default=argparse.SUPPRESS)
    p.add_argument("--observables", type=_parse_list, default=argparse.SUPPRESS, help="comma list: spectrum,entropy")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("purity", help="stationary purity vs closed form, any engine")
    _add_common(p)
    p.add_argument("--depths", type=_parse_depths, default=argparse.SUPPRESS, help="e.g. 2..8 or 2,4,8")
    p.add_argument("--engine", choices=_ENGINES, default=argparse.SUPPRESS)
    p.add_argument("--K", type=int, default=argparse.SUPPRESS)
    p.add_argument("--adaptive", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("--n-pairs", type=int, dest="n_pairs", default=argparse.SUPPRESS)
    p.add_argument("--realizations", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_purity)

    p = sub.add_parser("trajectory", help="pairwise-fidelity purity estimation")
    _add_common(p)
    p.add_argument("--n-pairs", type=int, dest="n_pairs", default=argparse.SUPPRESS)
    p.add_argument("--realizations", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("scan", help="min-entropy across many cuts + power spectrum")
    _add_common(p)
    p.add_argument("--cuts", type=int, default=argparse.SUPPRESS)
    p.add_argument("--engine", choices=("exact", "lowrank"), default=argparse.SUPPRESS)
    p.add_argument("--K", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("kicked-ising-check", help="self-dual identities: canonical, dual-unitary, flat spectrum")
    _add_common(p)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_kicked_ising_check)

    p = sub.add_parser("xxz", help="min-entropy convergence of the Floquet XXZ chain")
    _add_common(p)
    p.add_argument("--engine", choices=("exact", "lowrank"), default=argparse.SUPPRESS)
    p.add_argument("--K", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_xxz)

    p = sub.add_parser("validate", help="internal cross-check suite; nonzero exit on failure")
    _add_common(p)
    p.set_defaults(func=cmd_validate)
    return parser


_COMMAND_DEFAULTS = {
    "spectrum": {},
    "purity": dict(realizations=100),
    "trajectory": dict(steps=1000, realizations=10),
    "scan": {},
    "kicked-ising-check": dict(depth=6, steps=8, model="kicked-ising"),
    "xxz": dict(model="xxz", init="neel", depth=8, steps=48, engine="lowrank"),
    "validate": {},
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.command, _COMMAND_DEFAULTS[args.command], args)
    except (ValueError, OSError) as err:
        parser.error(str(err))
    t0 = time.monotonic()
    try:
        result = args.func(cfg)
    except (ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    artifacts, extra, status = result if len(result) == 3 else (*result, 0)
    manifest = _write_manifest(cfg, artifacts, extra, t0)
    for name in artifacts + [manifest]:
        print(f"wrote {name}")
    return status


if __name__ == "__main__":
    sys.exit(main())
