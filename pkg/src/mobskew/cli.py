"""Batch driver: ``mobskew run <experiment>`` and ``mobskew verify``.

Configuration is a flat ``key = value`` file (``#`` comments) plus ``--key value``
overrides.  Every run writes summary.json, curves.csv and manifest.json into the
output directory (``--out``, else $MOBSKEW_OUTPUT_DIR, else ./mobskew-out/<experiment>).

Exit codes: 0 success, 1 usage or config error (nothing written), 2 invariant
failure (artifacts written, failing check named), 3 precision exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, _numeric, arith, cfrac, correlate, estimates, fourier, skew
from .errors import MobskewError, PrecisionExhausted

OUTPUT_ENV = "MOBSKEW_OUTPUT_DIR"


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# config values


def _int(v: str) -> int:
    try:
        return int(v)
    except ValueError:
        f = float(v)  # accepts 1e6
        if not f.is_integer():
            raise ValueError(f"not an integer: {v}")
        return int(f)


def _bool(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v}")


def _int_list(v: str) -> list[int]:
    return [_int(x) for x in v.split(",") if x.strip()]


def _alpha(v: str) -> str:
    _parse_alpha(v, 1.0, 64)
    return v


def _parse_alpha(v: str, tau: float, bits: int) -> tuple[cfrac.IrrationalSpec, cfrac.ContinuedFraction | None]:
    """golden | pi-3 | liouville | surd:a,b,d,c | decimal:<literal> | quotients:a1,a2,..."""
    if v == "golden":
        return cfrac.golden(), None
    if v == "pi-3":
        return cfrac.pi_minus_3(bits), None
    if v == "liouville":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return cfrac.construct_liouville(tau, 10)
    kind, _, rest = v.partition(":")
    if kind == "surd":
        a, b, d, c = (int(x) for x in rest.split(","))
        return cfrac.IrrationalSpec.from_surd(a, b, d, c), None
    if kind == "decimal":
        return cfrac.IrrationalSpec.from_decimal(rest, bits), None
    if kind == "quotients":
        return cfrac.IrrationalSpec.from_quotients([int(x) for x in rest.split(",")]), None
    raise ValueError(f"unknown alpha spec {v!r}")


def _h_spec(v: str) -> str:
    if v in ("zero", "random", "furstenberg") or v.startswith("file:"):
        return v
    raise ValueError("h must be zero, random, furstenberg or file:<csv>")


KEYS = {
    "alpha": (_alpha, "liouville"),
    "beta": (_alpha, "golden"),
    "h": (_h_spec, "furstenberg"),
    "tau": (float, 1.0),
    "m_max": (_int, 200),
    "seed": (_int, 0),
    "xi1": (_int, 0),
    "xi2": (_int, 1),
    "x0": (float, 0.0),
    "y0": (float, 0.0),
    "limit": (_int, 10**6),
    "checkpoints": (_int_list, None),
    "eta": (float, None),
    "S": (_int, 1),
    "delta": (float, 0.1),
    "b1": (_int, 1),
    "b2": (_int, 1),
    "p1": (_int, 2),
    "p2": (_int, 3),
    "s": (_int, 1),
    "k": (_int, None),
    "ks": (_int_list, None),
    "a": (_int, None),
    "A": (_int, None),
    "K": (_int, 20),
    "bits": (_int, 128),
    "grid": (_int, None),
    "points": (_int, 64),
    "floor": (float, 1e-30),
    "Q": (_int, 12),
    "L": (_int, 0),
    "cases": (_int, 1),
    "q": (_int, 4),
    "nu": (str, "mu"),
    "X": (_int, 10**6),
    "l": (_int_list, [10, 100, 1000]),
    "stride": (_int, 1),
    "compute_m": (_bool, True),
    "grid_step": (float, 0.1),
    "rule": (str, "exp"),
    "threads": (_int, 1),
}

COMMON = {"threads"}
SYSTEM = {"alpha", "h", "tau", "m_max", "seed", "bits"}
EXPERIMENT_KEYS = {
    "sieve": {"limit", "checkpoints"},
    "cfrac": {"alpha", "tau", "K", "bits"},
    "resonant-set": {"alpha", "tau", "b1", "b2", "m_max", "bits"},
    "coboundary": SYSTEM | {"b1", "b2", "grid", "floor"},
    "cocycle-deviation": SYSTEM | {"ks", "grid", "b1", "b2"},
    "almost-period": SYSTEM | {"k", "A", "points", "eta", "S", "delta"},
    "davenport": {"beta", "limit", "checkpoints", "bits"},
    "main-sum": SYSTEM | {"xi1", "xi2", "x0", "y0", "limit", "checkpoints"},
    "bsz": SYSTEM | {"xi1", "xi2", "x0", "y0", "p1", "p2", "limit", "checkpoints"},
    "dirichlet-decompose": {"Q", "L", "A", "seed", "cases"},
    "short-interval": {"nu", "X", "l", "stride", "compute_m", "grid_step"},
    "mu-chi": {"q", "limit", "checkpoints"},
    "furstenberg-demo": {"tau", "m_max", "xi1", "xi2", "limit", "checkpoints", "rule"},
}
EXPERIMENTS = tuple(EXPERIMENT_KEYS)


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key = value")
        k, v = (t.strip() for t in line.split("=", 1))
        out[k] = v
    return out


def parse_overrides(tokens: list[str]) -> dict[str, str]:
    out = {}
    i = 0
    while i < len(tokens):
        t = tokens[i]
        if not t.startswith("--") or i + 1 >= len(tokens):
            raise UsageError(f"expected --key value, got {t!r}")
        out[t[2:].replace("-", "_")] = tokens[i + 1]
        i += 2
    return out


def resolve(experiment: str, raw: dict[str, str]) -> dict:
    """Validate keys for ``experiment`` and fill defaults (only keys the experiment uses)."""
    if experiment not in EXPERIMENT_KEYS:
        raise UsageError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    allowed = EXPERIMENT_KEYS[experiment] | COMMON
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise UsageError(f"unknown key(s) for {experiment}: {', '.join(unknown)}")
    cfg = {}
    for key in sorted(allowed):
        parse, default = KEYS[key]
        if key in raw:
            try:
                cfg[key] = parse(raw[key])
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise UsageError(f"bad value for {key}: {exc}") from None
        else:
            cfg[key] = default
    if cfg["threads"] < 1:
        raise UsageError("threads must be >= 1")
    if "tau" in cfg and not cfg["tau"] > 0:
        raise UsageError("tau must be positive")
    if "limit" in cfg and cfg["limit"] < 1:
        raise UsageError("limit must be >= 1")
    return cfg


def config_text(experiment: str, cfg: dict) -> str:
    lines = [f"# mobskew run {experiment}"]
    for k in sorted(cfg):
        v = cfg[k]
        if v is None:
            continue
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# experiment outputs


@dataclass
class Outcome:
    summary: dict
    header: list[str]
    rows: list[list]
    failures: list[str]


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def curves_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, int) and abs(v) > 2**53:
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _checkpoints(cfg, limit) -> list[int]:
    cps = cfg.get("checkpoints") or correlate.log_checkpoints(limit)
    if max(cps) > limit or min(cps) < 1:
        raise UsageError("checkpoints must lie in [1, limit]")
    return sorted(set(cps))


def _system(cfg):
    spec, cf = _parse_alpha(cfg["alpha"], cfg["tau"], cfg["bits"])
    if cf is None:
        cf = cfrac.expand_cf(spec, 40 if spec.kind == "surd" else 25)
    h = cfg["h"]
    if h == "zero":
        hf = fourier.AnalyticCircleFunction.zero(cfg["tau"])
    elif h == "random":
        hf = fourier.random_analytic(cfg["m_max"], cfg["tau"], cfg["seed"])
    elif h == "furstenberg":
        hf = fourier.furstenberg_like(cf, cfg["tau"], cfg["m_max"])
    else:
        hf = fourier.AnalyticCircleFunction.from_csv(Path(h[5:]).read_text(), cfg["tau"])
    return spec, cf, hf, skew.SkewProduct(spec, hf)


def exp_sieve(cfg):
    N = cfg["limit"]
    mu = arith.mobius_sieve(N)
    cps = _checkpoints(cfg, N)
    rows = [[n, mu.mertens(n), mu.mertens(n) / n] for n in cps]
    n_check = min(N, 10**4)
    bad = [n for n in range(1, n_check + 1) if mu[n] != arith.mobius_from_factorization(n)]
    fails = [f"sieve disagrees with factorization at n={bad[0]}"] if bad else []
    summary = {"values": {"mertens": {str(n): m for n, m, _ in rows}, "squarefree": int(np.count_nonzero(mu.values[1:]))},
               "residuals": {"factorization_mismatches": len(bad), "checked_up_to": n_check}}
    return Outcome(summary, ["N", "mertens", "mertens_over_N"], rows, fails)


def exp_cfrac(cfg):
    spec, cf = _parse_alpha(cfg["alpha"], cfg["tau"], cfg["bits"])
    if cf is None:
        cf = cfrac.expand_cf(spec, cfg["K"])
    rows, fails = [], []
    for k in range(1, cf.K + 1):
        try:
            r = cfrac.qnorm_check(cf, spec, k, assert_holds=False)
            lo, val, hi, ok = float(r.lower), r.value, float(r.upper), r.holds
        except MobskewError:
            lo = val = hi = math.nan
            ok = None
        if ok is False:
            fails.append(f"convergent bound fails at k={k}")
        det = cfrac.determinant(cf, k)
        if det != (-1) ** (k - 1):
            fails.append(f"determinant identity fails at k={k}")
        rows.append([k, cf.a(k), cf.p[k], cf.q[k], lo, val, hi, "" if ok is None else ok])
    summary = {"values": {"quotients": list(cf.quotients), "convergents": [[str(p), str(q)] for p, q in zip(cf.p, cf.q)],
                          "resonant_indices": cfrac.resonant_indices(cf, cfg["tau"])},
               "residuals": {"failed_bounds": len(fails)}}
    return Outcome(summary, ["k", "a_k", "p_k", "q_k", "lower", "qk_norm", "upper", "holds"], rows, fails)


def exp_resonant(cfg):
    spec, cf = _parse_alpha(cfg["alpha"], cfg["tau"], cfg["bits"])
    if cf is None:
        cf = cfrac.expand_cf(spec, 40)
    M = fourier.resonant_set(cf, cfg["tau"], cfg["b1"], cfg["b2"], cfg["m_max"])
    gaps = fourier.nonresonant_gap_witness(cf, cfg["m_max"]) if cfg["b1"] == 1 and cfg["b2"] == 1 else []
    rows = []
    for k in range(1, cf.K):
        rows.append([k, cf.q[k], cf.q[k + 1], cfrac.exceeds_exp(cf.q[k + 1], cfg["tau"], cf.q[k]), k in M.indices])
    fails = [f"gap bound fails at m={m}" for m, _ in gaps[:3]]
    summary = {"values": {"members": list(M.members), "indices": list(M.indices), "size": len(M)},
               "residuals": {"gap_violations": len(gaps)}}
    return Outcome(summary, ["k", "q_k", "q_k1", "resonant", "contributes"], rows, fails)


def exp_coboundary(cfg):
    spec, cf, h, T = _system(cfg)
    M = fourier.resonant_set(cf, cfg["tau"], cfg["b1"], cfg["b2"], h.M_max)
    h1, h2 = fourier.split_resonant(h, M)
    phi = fourier.coboundary_phi(h2, spec, cfg["floor"])
    res = fourier.coboundary_residual(phi, h2, spec, cfg["grid"] or 10_000)
    Mm = phi.M_max
    rows = [[m, phi.coef[m + Mm].real, phi.coef[m + Mm].imag] for m in range(-Mm, Mm + 1) if phi.coef[m + Mm] != 0]
    fails = [f"coboundary residual {res:.3e} > 1e-10"] if res > 1e-10 else []
    summary = {"values": {"resonant_size": len(M), "h1_l1": h1.l1(), "h2_l1": h2.l1(), "phi_l1": phi.l1()},
               "residuals": {"coboundary": res}}
    return Outcome(summary, ["m", "re", "im"], rows, fails)


def exp_cocycle_deviation(cfg):
    spec, cf, h, T = _system(cfg)
    ks = cfg["ks"] or cfrac.resonant_indices(cf, cfg["tau"])
    ks = [k for k in ks if k < cf.K]
    if not ks:
        raise UsageError("no resonant index available")
    reps = estimates.deviation_series(h, cf, ks, cfg["tau"], cfg["grid"], cfg["b1"], cfg["b2"])
    rows = [[r.k, r.q_k, r.sup_deviation, r.bound, r.C, r.passed] for r in reps]
    fails = [f"deviation exceeds bound at k={r.k}" for r in reps if not r.passed]
    summary = {"values": {"C": reps[0].C, "reports": [json.loads(r.to_json()) for r in reps]}, "residuals": {}}
    return Outcome(summary, ["k", "q_k", "sup_deviation", "bound", "C", "pass"], rows, fails)


def exp_almost_period(cfg):
    spec, cf, h, T = _system(cfg)
    ecfg = estimates.EstimateConfig(cfg["tau"], cfg["eta"], cfg["S"], cfg["delta"])
    k = cfg["k"] if cfg["k"] is not None else cfrac.resonant_indices(cf, cfg["tau"])[-1]
    A = cfg["A"] if cfg["A"] is not None else min(ecfg.a_limit(cf.q[k]), 16)
    pts = np.arange(cfg["points"]) / cfg["points"]
    rows, fails = [], []
    for a in range(1, A + 1):
        r = estimates.almost_period_deviation(T, ecfg, cf, k, a, pts)
        rows.append([a, r.shift, r.x_part, r.y_part, r.total, r.chain_rhs, r.chain_ok, r.below_delta])
        if not r.chain_ok:
            fails.append(f"telescoped bound fails at a={a}")
    rr = estimates.rotation_resonance(_fraction_mean(h), ecfg, cf, k, A)
    if not rr.triangle_ok:
        fails.append("||a theta|| <= a ||theta|| fails")
    summary = {"values": {"k": k, "q_k": cf.q[k], "A": A, "max_total": max(r[4] for r in rows), "rotation_max": rr.max_norm},
               "residuals": {"chain_failures": len(fails)}}
    return Outcome(summary, ["a", "shift", "x_part", "y_part", "total", "chain_rhs", "chain_ok", "below_delta"], rows, fails)


def _fraction_mean(h) -> Fraction:
    return Fraction(float(h.mean))


def exp_davenport(cfg):
    spec, _ = _parse_alpha(cfg["beta"], 1.0, cfg["bits"])
    N = cfg["limit"]
    mu = arith.mobius_sieve(N)
    cps = _checkpoints(cfg, N)
    s = correlate.davenport_series(spec, cps, mu)
    summary = {"values": {"averages": {str(n): v for n, v in s.checkpoints}}, "residuals": {}}
    return Outcome(summary, ["N", "re", "im", "abs"], [[n, v.real, v.imag, abs(v)] for n, v in s.checkpoints], [])


def exp_main_sum(cfg):
    spec, cf, h, T = _system(cfg)
    N = cfg["limit"]
    mu = arith.mobius_sieve(N)
    cps = _checkpoints(cfg, N)
    s = correlate.mobius_orbit_average(T, skew.Observable(cfg["xi1"], cfg["xi2"]), skew.TorusPoint(cfg["x0"], cfg["y0"]), cps, mu)
    res = s.metadata.get("davenport_residual")
    fails = [f"xi2=0 reduction residual {res:.2e}"] if res is not None and res > 1e-10 else []
    summary = {"values": {"averages": {str(n): v for n, v in s.checkpoints}}, "residuals": {"davenport": res}}
    return Outcome(summary, ["N", "re", "im", "abs"], [[n, v.real, v.imag, abs(v)] for n, v in s.checkpoints], fails)


def exp_bsz(cfg):
    spec, cf, h, T = _system(cfg)
    cps = _checkpoints(cfg, cfg["limit"])
    f = skew.Observable(cfg["xi1"], cfg["xi2"])
    p0 = skew.TorusPoint(cfg["x0"], cfg["y0"])
    rows, worst = [], 0.0
    for n in cps:
        r = correlate.bsz_correlation(T, f, p0, cfg["p1"], cfg["p2"], n)
        worst = max(worst, r.route_residual, r.geometric_residual or 0.0)
        rows.append([n, r.direct.real, r.direct.imag, abs(r.direct), r.route_residual])
    fails = [f"two routes differ by {worst:.2e}"] if worst > 1e-8 else []
    summary = {"values": {"correlations": {str(r[0]): complex(r[1], r[2]) for r in rows}}, "residuals": {"route": worst}}
    return Outcome(summary, ["N", "re", "im", "abs", "route_residual"], rows, fails)


def exp_dirichlet(cfg):
    rng = np.random.default_rng(cfg["seed"])
    cases = []
    for i in range(cfg["cases"]):
        if i == 0:
            cases.append((cfg["Q"], cfg["L"], cfg["A"] or 10))
        else:
            cases.append((int(rng.integers(1, 61)), int(rng.integers(0, 10**5)), int(rng.integers(1, 51))))
    need = max(L + A * Q for Q, L, A in cases) + 1
    mu = arith.mobius_sieve(need)
    rows, fails = [], []
    for Q, L, A in cases:
        F = correlate.PeriodicObservable.random_unimodular(Q, rng)
        r = correlate.dirichlet_decompose(F, L, A, mu)
        rows.append([Q, L, A, r.lhs, r.rhs_all, r.rhs_primitive, r.identity_residual, r.holds_all, r.holds_primitive])
        if r.identity_residual > 1e-10 or not r.holds_all:
            fails.append(f"decomposition fails at Q={Q}, L={L}, A={A}")
    summary = {"values": {"cases": len(rows), "primitive_variant_failures": sum(not r[8] for r in rows)},
               "residuals": {"identity": max(r[6] for r in rows)}}
    return Outcome(summary, ["Q", "L", "A", "lhs", "rhs_all", "rhs_primitive", "identity_residual", "holds_all", "holds_primitive"], rows, fails)


def _nu(name: str, mu):
    base = arith.mobius_function(mu)
    if name == "mu":
        return base
    if name.startswith("mu-chi"):
        Q = int(name[6:] or 4)
        chi = next(c for c in arith.character_group(Q) if not c.principal)
        return base * arith.character_function(chi)
    raise UsageError("nu must be mu or mu-chi<Q>")


def exp_short(cfg):
    X, ls = cfg["X"], cfg["l"]
    if any(not X >= l >= 10 for l in ls):
        raise UsageError("requires X >= l >= 10")
    mu = arith.mobius_sieve(2 * X + max(ls))
    nu = _nu(cfg["nu"], mu)
    M = None
    if cfg["compute_m"]:
        M = arith.m_nonpretentious(nu, X, arith.PretentiousConfig(X, grid_step=cfg["grid_step"]))
    rows = []
    for l in ls:
        r = correlate.short_interval_avg(nu, X, l, M_value=M, stride=cfg["stride"], compute_M=False)
        rows.append([l, r.lhs, "" if r.lhs_exact is None else str(r.lhs_exact), r.rhs if r.rhs is not None else "", r.ratio if r.ratio is not None else ""])
    summary = {"values": {"M": M, "lhs": {str(r[0]): r[1] for r in rows}}, "residuals": {}}
    return Outcome(summary, ["l", "lhs", "lhs_exact", "rhs", "ratio"], rows, [])


def exp_mu_chi(cfg):
    N, q = cfg["limit"], cfg["q"]
    mu = arith.mobius_sieve(N)
    cps = _checkpoints(cfg, N)
    rows = []
    for chi in arith.character_group(q):
        for n, v in correlate.mu_chi_sum(chi, N, mu, cps):
            rows.append([chi.index, chi.conductor, n, v.real, v.imag, abs(v) / n])
    env = correlate.rho_envelope(q, cps, mu)
    summary = {"values": {"rho_envelope": {str(n): v for n, v in env}}, "residuals": {}}
    return Outcome(summary, ["chi", "conductor", "N", "re", "im", "abs_over_N"], rows, [])


def exp_furstenberg(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec, cf = cfrac.construct_liouville(cfg["tau"], 10, rule=cfg["rule"])
    h = fourier.furstenberg_like(cf, cfg["tau"], cfg["m_max"])
    T = skew.SkewProduct(spec, h)
    ks = cfrac.resonant_indices(cf, cfg["tau"])
    reps = estimates.deviation_series(h, cf, ks, cfg["tau"])
    N = cfg["limit"]
    mu = arith.mobius_sieve(N)
    cps = _checkpoints(cfg, N)
    s = correlate.mobius_orbit_average(T, skew.Observable(cfg["xi1"], cfg["xi2"]), skew.TorusPoint(0, 0), cps, mu)
    fails = [f"deviation exceeds bound at k={r.k}" for r in reps[1:] if not r.passed]
    summary = {"values": {"quotients": list(cf.quotients), "deviation": [json.loads(r.to_json()) for r in reps],
                          "averages": {str(n): v for n, v in s.checkpoints}}, "residuals": {}}
    return Outcome(summary, ["N", "re", "im", "abs"], [[n, v.real, v.imag, abs(v)] for n, v in s.checkpoints], fails)


RUNNERS = {
    "sieve": exp_sieve, "cfrac": exp_cfrac, "resonant-set": exp_resonant, "coboundary": exp_coboundary,
    "cocycle-deviation": exp_cocycle_deviation, "almost-period": exp_almost_period, "davenport": exp_davenport,
    "main-sum": exp_main_sum, "bsz": exp_bsz, "dirichlet-decompose": exp_dirichlet, "short-interval": exp_short,
    "mu-chi": exp_mu_chi, "furstenberg-demo": exp_furstenberg,
}


# --------------------------------------------------------------------------


def _versions() -> dict:
    import finufft
    import mpmath
    import numba

    return {"mobskew": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "numba": numba.__version__, "mpmath": mpmath.__version__, "finufft": getattr(finufft, "__version__", "unknown")}


def _write_atomic(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.")
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out / name)


def run_experiment(experiment: str, raw: dict[str, str], out: Path | None) -> int:
    cfg = resolve(experiment, raw)
    out = out or Path(os.environ.get(OUTPUT_ENV) or Path("mobskew-out")) / experiment
    start = time.perf_counter()
    with _numeric.threads(cfg["threads"]):
        result = RUNNERS[experiment](cfg)
    wall = time.perf_counter() - start
    echo = {k: v for k, v in cfg.items() if k != "threads"}
    summary = {"experiment": experiment, "params": _jsonable(echo), "values": _jsonable(result.summary["values"]),
               "residuals": _jsonable(result.summary["residuals"]), "failures": result.failures}
    manifest = {"experiment": experiment, "config": config_text(experiment, cfg), "threads": cfg["threads"],
                "versions": _versions(), "wall_seconds": wall,
                "artifacts": ["summary.json", "curves.csv", "manifest.json"]}
    _write_atomic(out, {
        "summary.json": json.dumps(summary, indent=2, sort_keys=True) + "\n",
        "curves.csv": curves_csv(result.header, result.rows),
        "manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    })
    print(f"{experiment}: wrote {out} in {wall:.2f}s")
    for f in result.failures:
        print(f"INVARIANT FAILED: {f}", file=sys.stderr)
    return 2 if result.failures else 0


def _cmd_run(args, extra) -> int:
    raw = {}
    if args.manifest:
        m = json.loads(Path(args.manifest).read_text())
        if args.experiment and args.experiment != m["experiment"]:
            raise UsageError("experiment does not match the manifest")
        args.experiment = m["experiment"]
        fd, tmp = tempfile.mkstemp(suffix=".cfg")
        with os.fdopen(fd, "w") as fh:
            fh.write(m["config"])
        raw.update(read_config_file(tmp))
        os.unlink(tmp)
    if not args.experiment:
        raise UsageError("an experiment name (or --manifest) is required")
    if args.config:
        raw.update(read_config_file(args.config))
    raw.update(parse_overrides(extra))
    return run_experiment(args.experiment, raw, Path(args.out) if args.out else None)


def _cmd_verify(args, extra) -> int:
    from . import verify

    if extra:
        raise UsageError(f"unexpected arguments {extra}")
    res = verify.run_suite(
        limit=args.limit, corrupt_character=args.corrupt_character, determinism=not args.no_determinism,
        echo=lambda r: print(verify.format_result(r), flush=True),
    )
    failed = [r for r in res if r.passed is False]
    skipped = [r for r in res if r.passed is None]
    print(f"{len(res) - len(failed) - len(skipped)} passed, {len(failed)} failed, {len(skipped)} skipped")
    for r in failed:
        print(f"FAILED {r.key}: {r.detail}", file=sys.stderr)
    return 2 if failed else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mobskew", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run one experiment and write artifacts", allow_abbrev=False)
    r.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    r.add_argument("--config", help="flat key = value file")
    r.add_argument("--manifest", help="rerun from a manifest.json")
    r.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV}/<experiment>)")
    v = sub.add_parser("verify", help="run the acceptance and invariant suite")
    v.add_argument("--limit", type=lambda s: _int(s), default=10**7, help="sieve limit; smaller limits run a scaled subset")
    v.add_argument("--no-determinism", action="store_true", help="skip the thread-count reruns")
    v.add_argument("--corrupt-character", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, extra = build_parser().parse_known_args(argv)
        if args.command == "run":
            return _cmd_run(args, extra)
        return _cmd_verify(args, extra)
    except UsageError as exc:
        print(f"mobskew: error: {exc}", file=sys.stderr)
        return 1
    except PrecisionExhausted as exc:
        print(f"mobskew: precision exhausted: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"mobskew: error: {exc}", file=sys.stderr)
        return 1
    except MobskewError as exc:
        print(f"mobskew: invariant failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
