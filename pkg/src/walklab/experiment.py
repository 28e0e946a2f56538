"""Reproducible Monte Carlo trials over connectivity-conditioned G(n, p).

Trial ``t`` draws everything from ``derive_seed(master_seed, t)``: the graph
(by rejection until connected) and its vertex pairs.  Trials run in a process
pool and are collected in trial order, so output is identical for any worker
count.  Floats are rounded to 12 significant digits when a record is built,
which makes the CSV a lossless serialization of the records.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .analysis import RegimeWarning, concentration_interval, default_f, regime_lower
from .electrical import LaplacianSolver, resistance_lower_bound, resistance_upper_bound_formula
from .errors import ParameterError, SamplingExhausted, WalklabError
from .graph import DEFAULT_MAX_ATTEMPTS, derive_seed, sample_connected_gnp
from .mbfs import b_event_holds, check_strong_k_path, prune, recommended_k, run_mbfs, scan_k
from .paths import paths2_bracket
from .walks import WalkPotentials

INDICES = ("R", "h", "kappa", "K", "cc", "ccbar", "Hi", "H", "T", "paths2")
CHECKS = ("exthm", "concentration-f", "resconc-i", "resconc-ii", "resconc-iii", "bolthom")
DENSE_INDICES = frozenset({"h", "kappa", "K", "cc", "ccbar", "Hi", "H", "T"})

CSV_COLUMNS = (
    "trial", "seed", "attempts", "m", "i", "j", "gamma1_i", "gamma1_j", "psi1_i", "psi1_j",
    "k_used", "skp_flag", "b_flag", "R_exact", "R_lower", "R_lemma", "h_ij", "h_ji", "kappa",
    "K", "cc_i", "ccbar", "H_i", "H", "T", "paths2_lower", "paths2_menger", "paths2_gamma2",
    "in_resconc_i", "in_resconc_ii", "in_resconc_iii", "in_conc_f",
)

# record column -> (index name, theoretical centre as a function of n, p)
CENTRES = {
    "R_exact": ("R", lambda n, p: 2.0 / (n * p)),
    "h_ij": ("h", lambda n, p: float(n)),
    "kappa": ("kappa", lambda n, p: 2.0 * n),
    "K": ("K", lambda n, p: n / p),
    "cc_i": ("cc", lambda n, p: float(n)),
    "ccbar": ("ccbar", lambda n, p: float(n)),
    "H_i": ("Hi", lambda n, p: float(n)),
    "H": ("H", lambda n, p: float(n)),
    "T": ("T", lambda n, p: float(n)),
}
CONC_COLUMNS = ("h_ij", "kappa", "K", "cc_i", "ccbar", "H_i", "H", "T")


def round12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p: float | None = None
    np_: float | None = None
    trials: int = 1
    master_seed: int = 0
    pairs_per_trial: int = 1
    d: int = 1
    k_mode: str = "recommended"
    regime: str = "sparse"
    indices: tuple[str, ...] = ("R",)
    theorem_checks: tuple[str, ...] = ()
    f: float | str = "loglog"
    resconc_ii_form: str = "displayed"
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if (self.p is None) == (self.np_ is None):
            raise ParameterError("set exactly one of p and np")
        if self.n < 2:
            raise ParameterError("n must be at least 2")
        if self.trials < 1 or self.pairs_per_trial < 1:
            raise ParameterError("trials and pairs_per_trial must be at least 1")
        if not 0.0 <= self.edge_p <= 1.0:
            raise ParameterError(f"edge probability {self.edge_p} outside [0, 1]")
        bad = set(self.indices) - set(INDICES)
        if bad:
            raise ParameterError(f"unknown indices {sorted(bad)}")
        bad = set(self.theorem_checks) - set(CHECKS)
        if bad:
            raise ParameterError(f"unknown theorem checks {sorted(bad)}")
        if self.k_mode not in ("recommended", "scan"):
            raise ParameterError("k_mode must be recommended or scan")
        if self.regime not in ("sparse", "dense"):
            raise ParameterError("regime must be sparse or dense")
        if self.format not in ("csv", "json"):
            raise ParameterError("format must be csv or json")
        if self.resconc_ii_form not in ("displayed", "proof"):
            raise ParameterError("resconc_ii_form must be displayed or proof")
        if self.workers < 1 or self.max_attempts < 1 or self.d < 1:
            raise ParameterError("workers, max_attempts and d must be at least 1")
        if isinstance(self.f, str) and self.f != "loglog":
            raise ParameterError("f must be a positive number or 'loglog'")
        if not isinstance(self.f, str) and not self.f > 0:
            raise ParameterError("f must be positive")

    @property
    def edge_p(self) -> float:
        return self.p if self.p is not None else self.np_ / self.n

    @property
    def f_value(self) -> float:
        return default_f(self.n, self.edge_p) if self.f == "loglog" else float(self.f)

    @property
    def needed(self) -> frozenset[str]:
        """Indices computed: the requested ones plus those the checks read."""
        need = set(self.indices)
        checks = set(self.theorem_checks)
        if checks & {"resconc-i", "resconc-ii", "resconc-iii"}:
            need.add("R")
        if "bolthom" in checks:
            need.add("paths2")
        return frozenset(need)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["np"] = out.pop("np_")
        out["indices"] = list(self.indices)
        out["theorem_checks"] = list(self.theorem_checks)
        return out


@dataclass
class TrialRecord:
    trial: int
    seed: int
    attempts: int
    m: int
    i: int
    j: int
    gamma1_i: int
    gamma1_j: int
    psi1_i: int
    psi1_j: int
    k_used: int | None = None
    skp_flag: bool = False
    b_flag: bool = False
    R_exact: float | None = None
    R_lower: float | None = None
    R_lemma: float | None = None
    h_ij: float | None = None
    h_ji: float | None = None
    kappa: float | None = None
    K: float | None = None
    cc_i: float | None = None
    ccbar: float | None = None
    H_i: float | None = None
    H: float | None = None
    T: float | None = None
    paths2_lower: int | None = None
    paths2_menger: int | None = None
    paths2_gamma2: int | None = None
    in_resconc_i: bool | None = None
    in_resconc_ii: bool | None = None
    in_resconc_iii: bool | None = None
    in_conc_f: bool | None = None


_FIELD_TYPES = {f.name: f.type for f in fields(TrialRecord)}
assert tuple(_FIELD_TYPES) == CSV_COLUMNS


def _kind(name: str) -> str:
    t = str(_FIELD_TYPES[name])
    for k in ("bool", "float", "int"):
        if t.startswith(k):
            return k
    raise AssertionError(t)


def pick_pairs(n: int, count: int, seed: int) -> list[tuple[int, int]]:
    """Uniform ordered pairs ``i != j``, drawn with replacement from ``seed``'s stream."""
    rng = np.random.default_rng(derive_seed(seed, 1))
    out = []
    for _ in range(count):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        out.append((i, j + 1 if j >= i else j))
    return out


def _r(x):
    return None if x is None else round12(float(x))


def paths2_length(n: int, p: float) -> int:
    """``floor(log n / log np + 9)``."""
    return int(math.floor(math.log(n) / math.log(n * p) + 9))


def run_trial(config: ExperimentConfig, t: int) -> tuple[list[TrialRecord], int | None]:
    """Records of trial ``t`` and its attempt count (``None`` when sampling was exhausted)."""
    n, p = config.n, config.edge_p
    seed = derive_seed(config.master_seed, t)
    try:
        sample = sample_connected_gnp(n, p, seed, config.max_attempts)
    except SamplingExhausted:
        return [], None
    g = sample.graph
    need = config.needed
    checks = set(config.theorem_checks)
    pot = WalkPotentials(g) if need & DENSE_INDICES else None
    solver = None
    graph_vals = {}
    if pot is not None:
        if "K" in need:
            graph_vals["K"] = pot.kirchhoff
        if "ccbar" in need:
            graph_vals["ccbar"] = pot.uniform_cover
        if "H" in need:
            graph_vals["H"] = pot.kemeny
        if "T" in need:
            graph_vals["T"] = pot.mean_hitting
        covers = pot.cover_costs() if "cc" in need else None
        targets = pot.random_targets() if "Hi" in need else None
    deg = g.degrees
    f_val = config.f_value if "concentration-f" in checks else None
    records = []
    for i, j in pick_pairs(n, config.pairs_per_trial, seed):
        trace = run_mbfs(g, (i, j))
        pruned = prune(trace, config.d)
        b = b_event_holds(pruned)[2]
        if config.k_mode == "scan":
            k, res = scan_k(g, trace, pruned, p)
        else:
            k = recommended_k(n, p, config.regime)
            res = check_strong_k_path(g, trace, pruned, k)
        skp = bool(res is not None and res.ok and not res.vacuous)
        rec = TrialRecord(
            trial=t, seed=seed, attempts=sample.attempts, m=g.m, i=i, j=j,
            gamma1_i=int(deg[i]), gamma1_j=int(deg[j]),
            psi1_i=pruned.psi1_count(i), psi1_j=pruned.psi1_count(j),
            k_used=k, skp_flag=skp, b_flag=b,
        )
        if "R" in need:
            if pot is not None:
                r = pot.resistance(i, j)
            else:
                solver = solver or LaplacianSolver(g)
                r = solver.resistance(i, j).value
            rec.R_exact = _r(r)
            rec.R_lower = _r(resistance_lower_bound(g, i, j))
            if skp and b:
                rec.R_lemma = _r(resistance_upper_bound_formula(pruned, k))
        if pot is not None:
            if "h" in need:
                rec.h_ij = _r(pot.hitting(i, j))
                rec.h_ji = _r(pot.hitting(j, i))
            if "kappa" in need:
                rec.kappa = _r(2.0 * g.m * pot.resistance(i, j))
            if covers is not None:
                rec.cc_i = _r(covers[i])
            if targets is not None:
                rec.H_i = _r(targets[i])
            for key, val in graph_vals.items():
                setattr(rec, key, _r(val))
        if "paths2" in need:
            br = paths2_bracket(g, i, j, paths2_length(n, p),
                                witness=res if skp else None, pruned=pruned)
            rec.paths2_lower = br.lower
            rec.paths2_menger = br.upper_menger
            rec.paths2_gamma2 = br.upper_gamma2
        if rec.R_exact is not None:
            if "resconc-i" in checks and deg[i] > 0 and deg[j] > 0:
                iv = concentration_interval("resconc-i", n=n, p=p,
                                            gamma_i=int(deg[i]), gamma_j=int(deg[j]))
                rec.in_resconc_i = iv.contains(rec.R_exact)
            if "resconc-ii" in checks:
                iv = concentration_interval("resconc-ii", n=n, p=p, form=config.resconc_ii_form)
                rec.in_resconc_ii = iv.contains(rec.R_exact)
            if "resconc-iii" in checks:
                iv = concentration_interval("resconc-iii", n=n, p=p)
                rec.in_resconc_iii = iv.contains(rec.R_exact)
        if f_val is not None:
            flags = []
            for col in CONC_COLUMNS:
                val = getattr(rec, col)
                if val is not None:
                    centre = CENTRES[col][1](n, p)
                    iv = concentration_interval("concentration-f", n=n, p=p, center=centre, f=f_val)
                    flags.append(iv.contains(val))
            rec.in_conc_f = all(flags) if flags else None
        records.append(rec)
    return records, sample.attempts


def _trial_job(args):
    config, t = args
    return run_trial(config, t)


@dataclass
class ExperimentSummary:
    config: dict
    records: int
    trials_completed: int
    trials_skipped: int
    total_rejections: int
    quantities: dict[str, dict]
    coverage: dict[str, float | None]
    targets: dict[str, float]
    runtime_seconds: float
    backend: str
    regime_warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["config", "records", "trials_completed", "trials_skipped", "total_rejections",
                 "quantities", "coverage", "targets", "runtime_seconds", "backend"],
    "properties": {
        "config": {"type": "object"},
        "records": {"type": "integer", "minimum": 0},
        "trials_completed": {"type": "integer", "minimum": 0},
        "trials_skipped": {"type": "integer", "minimum": 0},
        "total_rejections": {"type": "integer", "minimum": 0},
        "quantities": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["count", "mean", "std", "stderr"],
                "properties": {
                    "count": {"type": "integer", "minimum": 1},
                    "mean": {"type": "number"},
                    "std": {"type": "number", "minimum": 0},
                    "stderr": {"type": "number", "minimum": 0},
                    "target": {"type": ["number", "null"]},
                    "ratio": {"type": ["number", "null"]},
                },
            },
        },
        "coverage": {
            "type": "object",
            "additionalProperties": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        },
        "targets": {"type": "object", "additionalProperties": {"type": "number"}},
        "runtime_seconds": {"type": "number", "minimum": 0},
        "backend": {"enum": ["compiled", "pure"]},
        "regime_warnings": {"type": "array", "items": {"type": "string"}},
    },
}

NUMERIC_COLUMNS = ("R_exact", "R_lower", "R_lemma", "h_ij", "h_ji", "kappa", "K", "cc_i",
                   "ccbar", "H_i", "H", "T", "paths2_lower", "paths2_menger", "paths2_gamma2",
                   "gamma1_i", "psi1_i", "attempts")
FLAG_COLUMNS = ("skp_flag", "b_flag", "in_resconc_i", "in_resconc_ii", "in_resconc_iii",
                "in_conc_f")


def _stats(values: Sequence[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return {"count": int(arr.size), "mean": float(arr.mean()), "std": std,
            "stderr": std / math.sqrt(arr.size)}


def summarize(records: Sequence[TrialRecord], config: ExperimentConfig | None = None, *,
              runtime: float = 0.0, skipped: int = 0) -> ExperimentSummary:
    """Means, standard deviations, coverage of every flag and interval."""
    if not records:
        raise ParameterError("cannot summarize an empty record set")
    quantities = {}
    for col in NUMERIC_COLUMNS:
        vals = [getattr(r, col) for r in records if getattr(r, col) is not None]
        if vals:
            quantities[col] = _stats(vals)
    coverage: dict[str, float | None] = {}
    for col in FLAG_COLUMNS:
        vals = [getattr(r, col) for r in records if getattr(r, col) is not None]
        coverage[col] = (sum(vals) / len(vals)) if vals else None
    targets = {}
    warns = []
    if config is not None:
        n, p = config.n, config.edge_p
        for col, (_, fn) in CENTRES.items():
            if col in quantities:
                t = fn(n, p)
                quantities[col]["target"] = t
                quantities[col]["ratio"] = quantities[col]["mean"] / t
                targets[col] = t
        checks = set(config.theorem_checks)
        if "concentration-f" in checks:
            f_val = config.f_value
            targets["f"] = f_val
            for col in CONC_COLUMNS + ("R_exact",):
                if col in quantities:
                    iv = concentration_interval("concentration-f", n=n, p=p,
                                                center=quantities[col]["mean"], f=f_val)
                    vals = [getattr(r, col) for r in records if getattr(r, col) is not None]
                    coverage[f"conc_f_empirical:{col}"] = (
                        sum(iv.contains(v) for v in vals) / len(vals))
        if "bolthom" in checks and "paths2_lower" in quantities:
            np_ = n * p
            iv_c, iv_hw = np_ ** 2, 3.0 * np_ ** 1.5 * math.sqrt(math.log(np_))
            targets["paths2_center"] = iv_c
            targets["paths2_half_width"] = iv_hw
            for col in ("paths2_lower", "paths2_menger"):
                vals = [getattr(r, col) for r in records if getattr(r, col) is not None]
                coverage[f"bolthom:{col}"] = sum(abs(v - iv_c) <= iv_hw for v in vals) / len(vals)
            cons = [r.paths2_lower <= r.paths2_menger for r in records
                    if r.paths2_lower is not None]
            coverage["bolthom:bracket_consistent"] = sum(cons) / len(cons)
        if "exthm" in checks:
            for col in CENTRES:
                if col in quantities:
                    coverage[f"exthm:{col}"] = float(abs(quantities[col]["ratio"] - 1.0) <= 0.1)
        np_ = n * p
        if np_ < regime_lower(n):
            warns.append(f"np={np_:g} below log n + log log log n = {regime_lower(n):g}")
        if np_ > n ** 0.1:
            warns.append(f"np={np_:g} above n^(1/10) = {n ** 0.1:g}")
    by_trial = {}
    for r in records:
        by_trial[r.trial] = r.attempts
    return ExperimentSummary(
        config=config.to_dict() if config is not None else {},
        records=len(records),
        trials_completed=len(by_trial),
        trials_skipped=skipped,
        total_rejections=sum(a - 1 for a in by_trial.values()),
        quantities=quantities,
        coverage=coverage,
        targets=targets,
        runtime_seconds=runtime,
        backend=kernels.BACKEND,
        regime_warnings=warns,
    )


def run_experiment(config: ExperimentConfig) -> tuple[list[TrialRecord], ExperimentSummary]:
    """Run every trial, in a process pool when ``workers > 1``."""
    start = time.perf_counter()
    jobs = [(config, t) for t in range(config.trials)]
    if config.workers == 1:
        results = [_trial_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_trial_job, jobs, chunksize=1))
    records = [r for recs, _ in results for r in recs]
    skipped = sum(1 for _, a in results if a is None)
    if not records:
        raise WalklabError(f"all {config.trials} trials exhausted their sampling attempts")
    summary = summarize(records, config, runtime=time.perf_counter() - start, skipped=skipped)
    for msg in summary.regime_warnings:
        warnings.warn(msg, RegimeWarning, stacklevel=2)
    return records, summary


# --- serialization ---------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _parse_cell(name: str, text: str):
    if text == "":
        return None
    kind = _kind(name)
    if kind == "bool":
        if text not in ("0", "1"):
            raise ParameterError(f"bad flag {text!r} in column {name}")
        return text == "1"
    if kind == "int":
        return int(text)
    return float(text)


def parse_csv(text: str) -> list[TrialRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ParameterError("CSV header does not match the record schema")
    return [TrialRecord(**{c: _parse_cell(c, v) for c, v in zip(CSV_COLUMNS, row)})
            for row in rows[1:]]


def records_to_json(records: Iterable[TrialRecord]) -> str:
    return json.dumps([dataclasses.asdict(r) for r in records], indent=1) + "\n"


def emit(records: Sequence[TrialRecord], summary: ExperimentSummary, format: str,
         path: str | os.PathLike) -> tuple[Path, Path]:
    """Write ``records.csv`` (or ``records.json``) and ``summary.json`` into ``path``."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            rec_path = out / "records.csv"
            rec_path.write_text(records_to_csv(records))
        elif format == "json":
            rec_path = out / "records.json"
            rec_path.write_text(records_to_json(records))
        else:
            raise ParameterError(f"unknown format {format!r}")
        sum_path = out / "summary.json"
        sum_path.write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise WalklabError(f"cannot write results to {out}: {exc}") from exc
    return rec_path, sum_path


# --- config files ----------------------------------------------------------

_CONFIG_KEYS = {
    "n": ("n", int),
    "p": ("p", float),
    "np": ("np_", float),
    "trials": ("trials", int),
    "pairs": ("pairs_per_trial", int),
    "seed": ("master_seed", int),
    "d": ("d", int),
    "k_mode": ("k_mode", str),
    "regime": ("regime", str),
    "indices": ("indices", lambda s: tuple(x.strip() for x in s.split(",") if x.strip())),
    "checks": ("theorem_checks", lambda s: tuple(x.strip() for x in s.split(",") if x.strip())),
    "f": ("f", lambda s: s if s == "loglog" else float(s)),
    "resconc_ii_form": ("resconc_ii_form", str),
    "out": ("output", str),
    "format": ("format", str),
    "workers": ("workers", int),
    "max_attempts": ("max_attempts", int),
}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines (``#`` comments) into config keyword arguments."""
    cp = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                   delimiters=("=",))
    try:
        cp.read_string("[walklab]\n" + text)
    except configparser.Error as exc:
        raise ParameterError(f"malformed config: {exc}") from exc
    out = {}
    for key, raw in cp["walklab"].items():
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ParameterError(f"unknown config key {key!r}")
        name, conv = _CONFIG_KEYS[key]
        try:
            out[name] = conv(raw.strip())
        except ValueError as exc:
            raise ParameterError(f"bad value for {key}: {raw!r}") from exc
    return out


def load_config(path: str | os.PathLike, **overrides) -> ExperimentConfig:
    kwargs = parse_config_text(Path(path).read_text())
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    if "n" not in kwargs:
        raise ParameterError("config must set n")
    return ExperimentConfig(**kwargs)
