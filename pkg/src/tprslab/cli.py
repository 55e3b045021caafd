"""Command-line harness producing reproducible machine-readable reports.

Subcommands: build, distance, gap, sweep, hybrid, negl-check, advise,
prop-check. Reports are CSV rows or a JSON document; identical config + seed
gives byte-identical CSV regardless of --threads (JSON differs only in the
wall_time_s field). Exit codes: 0 success, 2 validation, 3 resource or
budget, 4 bound-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .config import DEFAULT_BUDGET_CONSTANT, DEFAULT_KAPPA, dim_cap
from .errors import (
    DimensionCapExceeded,
    DomainCapExceeded,
    DomainOverflow,
    EnumerationBudgetExceeded,
    TprsError,
)
from .bounds import empirical_prop_check, verify_distance_bound
from .distinguishers import hybrid_experiment
from .ensembles import (
    ENSEMBLE_KINDS,
    EnsembleSpec,
    SubsetSpec,
    advise_copies,
    advise_subset_size,
    build_subset_phase_state,
    build_subset_state,
    sample_state,
)
from .growth import GrowthClass, check_closure, check_repetition_consistency, is_negligible, parse_bound_expr, table_lower_bound
from .linalg import PartitionSpec
from .randprims import PhaseFunction, RngSeed
from .resources import (
    MEASURE_NAMES,
    ResourceMeasure,
    estimate_gap,
    haar_expected,
    measure_pure_amps,
)
from .sampling import paired_value_means

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_BOUND_FAIL = 4

GLOBAL_DEFAULTS = {
    "seed": 0,
    "samples": 10000,
    "threads": 1,
    "format": "csv",
    "out": None,
    "kappa": DEFAULT_KAPPA,
    "budget_constant": DEFAULT_BUDGET_CONSTANT,
    "alpha": 3,
}

_MEASURE_ALIASES = {"magic": "stabilizer-renyi", "entanglement": "entanglement-entropy"}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v + 0.0, ".12g")  # +0.0 normalizes negative zero
    return str(v)


def _write_report(resolved: dict, columns: list[str], rows: list[dict], wall_time: float) -> str:
    if resolved["format"] == "json":
        doc = {
            "config": {k: v for k, v in resolved.items() if k != "out"},
            "version": __version__,
            "rows": rows,
            "wall_time_s": wall_time,
        }
        return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_partition(text: str | None, n: int) -> PartitionSpec:
    if text is None:
        return PartitionSpec(n // 2, n - n // 2) if n >= 2 else PartitionSpec(1, 1)
    a, b = text.split(":")
    return PartitionSpec(int(a), int(b))


def _parse_measure(name: str, n: int, partition: str | None, alpha: int) -> ResourceMeasure:
    name = _MEASURE_ALIASES.get(name, name)
    if name not in MEASURE_NAMES:
        raise TprsError(f"unknown measure {name!r}; choose from {MEASURE_NAMES}")
    if name in ("entanglement-entropy", "collision-entanglement"):
        return ResourceMeasure(name, partition=_parse_partition(partition, n))
    if name == "stabilizer-renyi":
        return ResourceMeasure(name, alpha=alpha)
    return ResourceMeasure(name)


def _parse_ensemble(text: str, n: int, t: int, seed: int) -> EnsembleSpec:
    """kind[:m=VALUE], e.g. 'haar' or 'subset-phase-true-random:m=4'."""
    kind, _, rest = text.partition(":")
    m = None
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if key.strip() == "m":
                m = int(val)
            else:
                raise TprsError(f"unknown ensemble parameter {key!r}")
    if kind not in ENSEMBLE_KINDS:
        raise TprsError(f"unknown ensemble kind {kind!r}; choose from {ENSEMBLE_KINDS}")
    return EnsembleSpec(kind, n, m=m, t=t, seed=RngSeed(seed))


def _int_list(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


# ---------------------------------------------------------------------------
# Subcommand implementations (each returns (columns, rows, exit_code))


def _cmd_build(resolved: dict) -> tuple[list[str], list[dict], int]:
    n = resolved.get("n")
    kind = resolved["kind"]
    seed = RngSeed(resolved["seed"])
    if resolved.get("members"):
        spec = SubsetSpec.from_bitstrings(resolved["members"].split(","))
        if n and spec.n != n:
            raise TprsError("member width disagrees with --n")
    else:
        if not resolved.get("m") or not n:
            raise TprsError("provide --members, or both --n and --m")
        rng = seed.generator(0)
        members = rng.choice(2**n, size=resolved["m"], replace=False)
        spec = SubsetSpec(n, tuple(int(x) for x in members))
    if kind == "subset":
        state = build_subset_state(spec)
    elif kind == "subset-phase":
        phase_kind = resolved.get("phase", "zero")
        if phase_kind == "zero":
            f = PhaseFunction.zero(spec.n)
        elif phase_kind == "table":
            f = PhaseFunction.random_table(spec.n, seed.generator(1))
        else:
            f = PhaseFunction.keyed_from_rng(spec.n, seed.generator(1))
        state = build_subset_phase_state(spec, f)
    else:
        raise TprsError("kind must be subset or subset-phase")
    rows = []
    for idx in np.flatnonzero(np.abs(state.amps) > 0):
        amp = state.amps[idx]
        rows.append(
            {
                "index": int(idx),
                "bitstring": format(int(idx), f"0{spec.n}b"),
                "re": float(amp.real),
                "im": float(amp.imag),
            }
        )
    norm = float(np.linalg.norm(state.amps))
    for row in rows:
        row["norm"] = norm
        row["support"] = len(rows)
    return ["index", "bitstring", "re", "im", "norm", "support"], rows, EXIT_OK


def _cmd_distance(resolved: dict) -> tuple[list[str], list[dict], int]:
    kind = resolved["kind"]
    n, t = resolved["n"], resolved["t"]
    if kind == "subset-phase":
        sizes = [2**e for e in _int_list(resolved["mexp"])] if resolved.get("mexp") else _int_list(resolved["m"])
    else:
        sizes = _int_list(resolved["m"])
    report = verify_distance_bound(kind, n, sizes, t)
    rows = []
    for r in report.rows:
        rows.append(
            {
                "kind": kind,
                "n": n,
                "t": t,
                "size": r.size,
                "lhs": r.lhs,
                "rhs": r.rhs,
                "margin": r.margin,
                "passed": r.passed,
                "fitted": r.fitted,
                "c1": report.constants.get("c1", report.constants.get("c")),
                "c2": report.constants.get("c2"),
                "overall_slope": report.overall_slope,
                "dominated_slope": report.dominated_slope,
            }
        )
    code = EXIT_OK if report.all_passed else EXIT_BOUND_FAIL
    columns = ["kind", "n", "t", "size", "lhs", "rhs", "margin", "passed", "fitted", "c1", "c2", "overall_slope", "dominated_slope"]
    return columns, rows, code


def _cmd_gap(resolved: dict) -> tuple[list[str], list[dict], int]:
    n, t, seed = resolved["n"], 1, resolved["seed"]
    measure = _parse_measure(resolved["measure"], n, resolved.get("partition"), resolved["alpha"])
    e1 = _parse_ensemble(resolved["e1"], n, t, seed)
    e2 = _parse_ensemble(resolved["e2"], n, t, seed)
    rep = estimate_gap(measure, e1, e2, resolved["samples"], seed=RngSeed(seed), threads=resolved["threads"])
    table_bound = None
    if resolved.get("T"):
        try:
            table_bound = table_lower_bound(
                GrowthClass.parse(resolved["T"]),
                _SWEEP_MEASURE_KEY[measure.name],
                n,
                kappa=resolved["kappa"],
                alpha=resolved["alpha"],
            )
        except TprsError:
            table_bound = None
    row = {
        "measure": rep.measure,
        "n": n,
        "T": resolved.get("T") or "",
        "e1": resolved["e1"],
        "e2": resolved["e2"],
        "mean_high": rep.e_high[0],
        "se_high": rep.e_high[1],
        "mean_low": rep.e_low[0],
        "se_low": rep.e_low[1],
        "delta": rep.delta,
        "stderr": rep.stderr,
        "table_bound": table_bound,
        "samples": rep.samples,
        "seed": seed,
    }
    columns = list(row.keys())
    return columns, [row], EXIT_OK


_SWEEP_CLASS_ORDER = ("log", "polylog", "linear", "linearithmic", "poly")
_SWEEP_MEASURE_KEY = {
    "coherence-re": "coherence",
    "coherence-hs": "coherence",
    "entanglement-entropy": "entanglement",
    "collision-entanglement": "entanglement",
    "stabilizer-renyi": "magic",
}
MAX_MEASURED_N = 12


def _sweep_measured(measure: ResourceMeasure, T: GrowthClass, n: int, seed: int, samples: int, threads: int):
    """Mean measured resource of the advised low ensemble, when computable."""
    if n > MAX_MEASURED_N:
        return None, None
    if measure.name == "stabilizer-renyi" and n > 4:
        return None, None
    advice = advise_subset_size(T, n)
    if advice.m < 1:
        return None, None
    spec = EnsembleSpec("subset-phase-true-random", n, m=advice.m, t=1, seed=RngSeed(seed))

    def fn(rng):
        return measure_pure_amps(measure, sample_state(spec, rng), n)

    (acc,) = paired_value_means(RngSeed(seed), samples, (fn,), threads=threads)
    from .resources import aggregate_measure

    return aggregate_measure(measure, acc)


def _cmd_sweep(resolved: dict) -> tuple[list[str], list[dict], int]:
    classes = [c.strip() for c in resolved["classes"].split(",")]
    ns = _int_list(resolved["n"])
    kappa, alpha = resolved["kappa"], resolved["alpha"]
    samples = min(resolved["samples"], 2000)
    rows = []
    chain_ok = True
    for n in ns:
        measure = _parse_measure(resolved["measure"], n, resolved.get("partition"), alpha)
        table_key = _SWEEP_MEASURE_KEY[measure.name]
        prev = None
        ordered = [c for c in _SWEEP_CLASS_ORDER if c in classes] + [c for c in classes if c not in _SWEEP_CLASS_ORDER]
        for cname in ordered:
            T = GrowthClass.parse(cname)
            bound = table_lower_bound(T, table_key, n, kappa=kappa, alpha=alpha)
            if prev is not None and cname in _SWEEP_CLASS_ORDER and bound < prev - 1e-12:
                chain_ok = False
            if cname in _SWEEP_CLASS_ORDER:
                prev = bound
            measure_n_guard(measure, n)
            measured = se = None
            try:
                measured, se = _sweep_measured(measure, T, n, resolved["seed"], samples, resolved["threads"])
            except TprsError:
                measured = se = None
            ref = haar_expected(measure.name, n, part=measure.partition, alpha=measure.alpha)
            ref_value = ref.value / math.log(2) if ref.units.startswith("harmonic") else ref.value
            delta = None if measured is None else abs(ref_value - measured)
            rows.append(
                {
                    "measure": measure.label(),
                    "T": cname,
                    "n": n,
                    "bound": bound,
                    "measured": measured,
                    "measured_se": se,
                    "haar_ref": ref_value,
                    "haar_ref_units": "bits" if ref.units.startswith("harmonic") else ref.units,
                    "delta": delta,
                    "kappa": kappa,
                    "alpha": alpha if table_key == "magic" else None,
                }
            )
    columns = ["measure", "T", "n", "bound", "measured", "measured_se", "haar_ref", "haar_ref_units", "delta", "kappa", "alpha"]
    return columns, rows, EXIT_OK if chain_ok else EXIT_BOUND_FAIL


def measure_n_guard(measure: ResourceMeasure, n: int) -> int:
    # partition-carrying measures need a partition matching each sweep n
    if measure.partition is not None and measure.partition.n != n:
        raise TprsError(f"partition {measure.partition.n_a}:{measure.partition.n_b} does not match n={n}")
    return n


def _cmd_hybrid(resolved: dict) -> tuple[list[str], list[dict], int]:
    names = None
    if resolved.get("distinguishers"):
        names = tuple(s.strip() for s in resolved["distinguishers"].split(","))
    rep = hybrid_experiment(
        n=resolved["n"],
        m=resolved["m"],
        t=resolved["t"],
        seed=RngSeed(resolved["seed"]),
        samples=resolved["samples"],
        names=names,
        threads=resolved["threads"],
    )
    rows = []
    for leg in rep.legs:
        rows.append(
            {
                "n": rep.n,
                "m": rep.m,
                "t": rep.t,
                "distinguisher": leg.report.distinguisher,
                "pair": leg.pair,
                "adv": leg.report.adv,
                "stderr": leg.report.stderr,
                "p1": leg.report.p1,
                "p2": leg.report.p2,
                "budget_ok": leg.report.budget_ok,
                "threshold": leg.report.threshold,
                "samples": leg.report.samples,
                "triangle_ok": rep.triangle_ok,
            }
        )
    columns = list(rows[0].keys())
    return columns, rows, EXIT_OK if rep.triangle_ok else EXIT_BOUND_FAIL


def _cmd_negl_check(resolved: dict) -> tuple[list[str], list[dict], int]:
    eta = parse_bound_expr(resolved["eta"])
    T = GrowthClass.parse(resolved["T"])
    rep = is_negligible(eta, T)
    rows = [
        {
            "check": "negligible",
            "subject": f"eta={resolved['eta']} vs T={resolved['T']}",
            "verdict": rep.verdict,
            "rule": rep.rule,
        }
    ]
    if resolved.get("repeats"):
        R = GrowthClass.parse(resolved["repeats"])
        cl = check_closure(T, R)
        rows.append(
            {
                "check": "closure",
                "subject": f"negl_{resolved['T']} with repeats {resolved['repeats']}",
                "verdict": "holds" if cl.holds else "fails",
                "rule": cl.rule if cl.holds else f"{cl.rule}; {cl.counterexample}",
            }
        )
        co = check_repetition_consistency(T, R)
        rows.append(
            {
                "check": "consistency",
                "subject": f"T={resolved['T']} with repeats {resolved['repeats']}",
                "verdict": "holds" if co.holds else "fails",
                "rule": co.rule if co.holds else f"{co.rule}; {co.counterexample}",
            }
        )
    return ["check", "subject", "verdict", "rule"], rows, EXIT_OK


def _cmd_advise(resolved: dict) -> tuple[list[str], list[dict], int]:
    T = GrowthClass.parse(resolved["T"])
    n = resolved["n"]
    advice = advise_subset_size(T, n)
    t = advise_copies(T, n)
    row = {"T": resolved["T"], "n": n, "m": advice.m, "m_exp": advice.m_exp, "t": t, "dim_cap": dim_cap()}
    return list(row.keys()), [row], EXIT_OK


def _cmd_prop_check(resolved: dict) -> tuple[list[str], list[dict], int]:
    n, seed = resolved["n"], resolved["seed"]
    T = GrowthClass.parse(resolved["T"])
    e_high = _parse_ensemble(resolved["e1"], n, 1, seed)
    e_low = _parse_ensemble(resolved["e2"], n, 1, seed)
    part = _parse_partition(resolved.get("partition"), n) if resolved.get("partition") else None
    rep = empirical_prop_check(
        resolved["prop"], e_high, e_low, T, resolved["samples"],
        seed=RngSeed(seed), part=part, alpha=resolved["alpha"], threads=resolved["threads"],
    )
    row = {
        "prop": rep.prop,
        "measure": rep.measure,
        "eta_hat": rep.eta_hat,
        "eta_stderr": rep.eta_stderr,
        "sandwich": rep.sandwich,
        "bound": rep.bound,
        "measured": rep.measured,
        "measured_stderr": rep.measured_stderr,
        "margin": rep.margin,
        "verdict": rep.verdict,
        "threshold": rep.threshold,
        "samples": rep.samples,
    }
    code = EXIT_OK if rep.verdict in ("passed", "non-binding", "premise-violated") else EXIT_BOUND_FAIL
    return list(row.keys()), [row], code


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's re-parse from clobbering values given
    # before the subcommand name; flags are accepted in either position
    shared.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--out", default=argparse.SUPPRESS)
    shared.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    shared.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file; flags override")
    shared.add_argument(
        "--print-config", action="store_true", default=argparse.SUPPRESS,
        help="print the resolved config and exit",
    )
    shared.add_argument("--kappa", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--budget-constant", dest="budget_constant", type=float, default=argparse.SUPPRESS)
    shared.add_argument("--alpha", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="tprslab", description=__doc__, parents=[shared])
    sub = parser.add_subparsers(dest="command")

    def add_sub(name: str, help_text: str):
        return sub.add_parser(name, help=help_text, parents=[shared])

    p = add_sub("build", "build a state and print amplitudes")
    p.add_argument("--kind", default="subset", choices=("subset", "subset-phase"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--members", default=None, help="comma-separated bit strings")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--phase", default="zero", choices=("zero", "table", "keyed"))

    p = add_sub("distance", "exact moment-to-Haar distances vs bound")
    p.add_argument("--kind", required=True, choices=("subset", "subset-phase"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--m", default=None, help="comma list or lo..hi of subset sizes")
    p.add_argument("--mexp", default=None, help="comma list of size exponents (phase kind)")

    p = add_sub("gap", "resource gap between two ensembles")
    p.add_argument("--measure", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e1", required=True)
    p.add_argument("--e2", required=True)
    p.add_argument("--partition", default=None)
    p.add_argument("--T", default=None, help="runtime-class label echoed into the report rows")

    p = add_sub("sweep", "table of bounds across runtime classes")
    p.add_argument("--measure", required=True)
    p.add_argument("--classes", default=",".join(_SWEEP_CLASS_ORDER))
    p.add_argument("--n", required=True, help="comma list or lo..hi")
    p.add_argument("--partition", default=None)

    p = add_sub("hybrid", "pairwise advantages keyed/true-random/Haar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--distinguishers", default=None, help="comma list of registry names (default: all two-copy)")

    p = add_sub("negl-check", "negligibility / closure / consistency verdicts")
    p.add_argument("--eta", required=True)
    p.add_argument("--T", required=True)
    p.add_argument("--repeats", default=None)

    p = add_sub("advise", "advised subset size and copy count")
    p.add_argument("--T", required=True)
    p.add_argument("--n", type=int, required=True)

    p = add_sub("prop-check", "empirical resource-bound pipeline check")
    p.add_argument("--prop", type=int, required=True, choices=(7, 8, 9))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", required=True)
    p.add_argument("--e1", required=True, help="high-resource ensemble")
    p.add_argument("--e2", required=True, help="low-resource ensemble")
    p.add_argument("--partition", default=None)
    return parser


_COMMANDS = {
    "build": _cmd_build,
    "distance": _cmd_distance,
    "gap": _cmd_gap,
    "sweep": _cmd_sweep,
    "hybrid": _cmd_hybrid,
    "negl-check": _cmd_negl_check,
    "advise": _cmd_advise,
    "prop-check": _cmd_prop_check,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit CLI flags."""
    resolved = dict(GLOBAL_DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            resolved.update(json.load(fh))
    for key, value in vars(args).items():
        if key in ("config", "print_config"):
            continue
        if value is not None:
            resolved[key] = value
    resolved.setdefault("command", None)
    resolved["dim_cap"] = dim_cap()
    return resolved


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = resolve_config(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if getattr(args, "print_config", False):
        print(json.dumps(resolved, sort_keys=True, indent=2, default=str))
        return EXIT_OK
    command = resolved.get("command")
    if not command:
        parser.print_help()
        return EXIT_VALIDATION
    start = time.perf_counter()
    try:
        columns, rows, code = _COMMANDS[command](resolved)
    except (DimensionCapExceeded, EnumerationBudgetExceeded, DomainCapExceeded) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (TprsError, DomainOverflow, ValueError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    wall = time.perf_counter() - start
    _emit(_write_report(resolved, columns, rows, wall), resolved.get("out"))
    return code


if __name__ == "__main__":
    sys.exit(main())
