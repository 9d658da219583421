"""Command-line harness: ``python -m fsparse <subcommand> ...``.

Exit codes: 0 ok, 2 usage or malformed input, 3 a checked bound failed,
4 a precondition failed (posterior too concentrated).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import query_learner as ql
from .boolfourier import random_sparse_function
from .chang_verifier import CHECKS, scan_all
from .errors import FSparseError, TooConcentrated, TooLarge
from .sparse_learner import LearnerConfig, phase1_reference, run_planted

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_PRECONDITION = 0, 2, 3, 4
PHASE2_ALIASES = {"estimate": "estimate_round", "coupon": "coupon_collector",
                  "estimate_round": "estimate_round", "coupon_collector": "coupon_collector"}
RUN_COLUMNS = ["row", "seed", "n", "k", "r_true", "r_found", "phase1_quantum_examples",
               "phase1_reference", "phase2_classical_examples", "exact_match", "mode", "status"]


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """CSV cell: exact p/q for rationals, 12 significant digits for floats."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([fmt(c) for c in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < --config JSON < explicit flags."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}")
        unknown = set(extra) - set(defaults)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(extra)
    for key in defaults:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _default_seed() -> int:
    env = os.environ.get("FSPARSE_SEED")
    try:
        return int(env) if env else 0
    except ValueError:
        raise UsageError("FSPARSE_SEED must be an integer")


# -- learn-sparse -----------------------------------------------------------


@dataclass
class ExperimentConfig:
    n: int = 8
    k: int = 8
    r_core: int = 3
    trials: int = 1
    seed: int = 0
    delta: float = 1 / 3
    phase2: str = "estimate"
    stall_factor: float = 3.0
    exact_dim: bool = False
    jobs: int = 1
    format: str = "csv"
    out: str | None = None

    def validate(self):
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if self.phase2 not in PHASE2_ALIASES:
            raise UsageError(f"--phase2 must be one of {sorted(PHASE2_ALIASES)}")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if not 0 < self.delta < 1:
            raise UsageError("--delta must lie in (0, 1)")
        if self.n < 1 or self.n > 62 or self.r_core < 0 or self.r_core > self.n:
            raise UsageError("need 1 <= n <= 62 and 0 <= r-core <= n")


def _one_trial(args) -> dict:
    cfg, seed = args
    lc = LearnerConfig(k=cfg.k, delta=cfg.delta, phase2_mode=PHASE2_ALIASES[cfg.phase2],
                       stall_factor=cfg.stall_factor)
    rec = run_planted(cfg.n, cfg.k, cfg.r_core, seed, lc, exact_dim=cfg.exact_dim)
    rec["phase1_reference"] = phase1_reference(cfg.k, rec["r_true"])
    return rec


def learn_sparse_records(cfg: ExperimentConfig) -> list[dict]:
    tasks = [(cfg, cfg.seed + i) for i in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            recs = list(ex.map(_one_trial, tasks))
    else:
        recs = [_one_trial(t) for t in tasks]
    return sorted(recs, key=lambda r: r["seed"])


def summarize_runs(recs: list[dict]) -> dict:
    q1 = np.array([r["phase1_quantum_examples"] for r in recs], dtype=float)
    q2 = np.array([r["phase2_classical_examples"] for r in recs], dtype=float)
    ref = np.array([r["phase1_reference"] for r in recs], dtype=float)
    return {
        "trials": len(recs),
        "exact_match_rate": sum(r["exact_match"] for r in recs) / len(recs),
        "phase1_mean": float(q1.mean()),
        "phase1_p50": float(np.percentile(q1, 50)),
        "phase1_p90": float(np.percentile(q1, 90)),
        "phase1_reference_mean": float(ref.mean()),
        "phase2_mean": float(q2.mean()),
        "phase2_p50": float(np.percentile(q2, 50)),
        "phase2_p90": float(np.percentile(q2, 90)),
    }


def learn_sparse_csv(recs: list[dict], summary: dict) -> str:
    rows = [RUN_COLUMNS]
    for r in recs:
        rows.append(["run"] + [r[c] for c in RUN_COLUMNS[1:]])
    mode = recs[0]["mode"]
    for stat in ("mean", "p50", "p90"):
        rows.append([f"summary_{stat}", "", "", "", "", "", summary[f"phase1_{stat}"],
                     summary["phase1_reference_mean"], summary[f"phase2_{stat}"],
                     summary["exact_match_rate"], mode, ""])
    return _csv(rows)


def cmd_learn_sparse(args) -> int:
    defaults = asdict(ExperimentConfig())
    defaults["seed"] = _default_seed()
    cfg = ExperimentConfig(**_merge_config(args, defaults))
    cfg.validate()
    recs = learn_sparse_records(cfg)
    summary = summarize_runs(recs)
    if cfg.format == "json":
        text = json.dumps({"runs": recs, "summary": summary}, sort_keys=True, indent=2) + "\n"
    else:
        text = learn_sparse_csv(recs, summary)
    _emit(text, cfg.out)
    print(f"exact_match_rate={fmt(summary['exact_match_rate'])} "
          f"phase1_mean={fmt(summary['phase1_mean'])}", file=sys.stderr)
    return EXIT_OK


# -- chang-scan ---------------------------------------------------------------


def cmd_chang_scan(args) -> int:
    cfg = _merge_config(args, {"n": 4, "which": "improved", "jobs": 1, "format": "json", "out": None})
    if cfg["which"] != "all" and cfg["which"] not in CHECKS:
        raise UsageError(f"--which must be one of {CHECKS + ('all',)}")
    try:
        report = scan_all(int(cfg["n"]), cfg["which"], jobs=int(cfg["jobs"]))
    except TooLarge as exc:
        print(f"TooLarge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_csv() if cfg["format"] == "csv" else report.dumps() + "\n"
    _emit(text, cfg["out"])
    print(f"functions_checked={report.functions_checked} violations={len(report.violations)}",
          file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VIOLATION


# -- concept classes ------------------------------------------------------------


def _parse_mu(text: str) -> list[float]:
    try:
        return [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed --mu {text!r}")


def load_concept_class(cfg: dict) -> ql.ConceptClass:
    if cfg.get("class_file"):
        try:
            cc = ql.load_class(cfg["class_file"])
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed class file: {exc}")
    else:
        name = cfg.get("class")
        try:
            if name == "point":
                cc = ql.point_class(int(cfg["N"]))
            elif name == "linear":
                cc = ql.linear_class(int(cfg["n"]))
            elif name == "subspace":
                cc = ql.subspace_class(int(cfg["n"]), int(cfg["k"]))
            else:
                raise UsageError("give --class {point,linear,subspace} or --class-file")
        except (TypeError, ValueError, TooLarge) as exc:
            raise UsageError(f"cannot build class {name!r}: {exc}")
    if cfg.get("mu"):
        mu = _parse_mu(cfg["mu"])
        if len(mu) != cc.size or any(m < 0 for m in mu) or sum(mu) <= 0:
            raise UsageError(f"--mu needs {cc.size} nonnegative weights")
        cc = cc.with_mu(mu)
    return cc


CLASS_DEFAULTS = {"class": None, "class_file": None, "N": None, "n": None, "k": None, "mu": None}


def query_summary(cc: ql.ConceptClass, trs: dict) -> dict:
    queries = [tr.queries for tr in trs.values()]
    correct = [tr.final_concept == c for c, tr in trs.items()]
    out = {
        "class_size": cc.size,
        "N": cc.N,
        "max_queries": max(queries),
        "mean_queries": float(np.mean(queries)),
        "correctness_rate": sum(correct) / len(correct),
        "initial_entropy": ql.entropy(cc.mu_array),
    }
    if cc.size >= 2:
        A = ql.spectral_ratio(cc)
        out["spectral_ratio"] = A
        out["query_reference"] = ql.query_reference(A, cc.size)
        try:
            out["certificate"] = ql.certify_split(cc).to_json()
        except TooConcentrated:
            out["certificate"] = None
    return out


def cmd_query_learn(args) -> int:
    cfg = _merge_config(args, {**CLASS_DEFAULTS, "format": "csv", "out": None})
    cc = load_concept_class(cfg)
    trs = ql.learn_all_targets(cc)
    energies = ql.energy_trace(cc, trs)
    summary = query_summary(cc, trs)
    if cfg["format"] == "json":
        body = {
            "summary": summary,
            "energy": energies,
            "transcripts": [
                {"target": c, "final_concept": tr.final_concept,
                 "steps": [asdict(st) for st in tr.steps]}
                for c, tr in trs.items()
            ],
        }
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    else:
        text = ql.transcripts_csv(trs, energies)
    _emit(text, cfg["out"])
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_adv_cert(args) -> int:
    cfg = _merge_config(args, {**CLASS_DEFAULTS, "out": None})
    cc = load_concept_class(cfg)
    try:
        cert = ql.certify_split(cc)
    except TooConcentrated as exc:
        print(f"TooConcentrated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _emit(json.dumps(cert.to_json(), sort_keys=True) + "\n", cfg["out"])
    return EXIT_OK if cert.holds else EXIT_VIOLATION


def cmd_gen_function(args) -> int:
    cfg = _merge_config(args, {"n": 8, "k": 8, "r_core": 3, "seed": _default_seed(),
                               "exact_dim": False, "out": None})
    s = random_sparse_function(int(cfg["n"]), int(cfg["k"]), int(cfg["r_core"]),
                               int(cfg["seed"]), exact_dim=bool(cfg["exact_dim"]))
    _emit(json.dumps(s.to_json(), sort_keys=True, indent=2) + "\n", cfg["out"])
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_class_flags(p):
    p.add_argument("--class", dest="class", choices=["point", "linear", "subspace"])
    p.add_argument("--class-file", dest="class_file")
    p.add_argument("--N", type=int, dest="N", help="string length for the point class")
    p.add_argument("--n", type=int, help="variables for linear/subspace classes")
    p.add_argument("--k", type=int, help="codimension 2^(n-dim) for the subspace class")
    p.add_argument("--mu", help="comma-separated weights, e.g. 9/10,1/10")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsparse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("learn-sparse", help="planted sparse-function learning runs")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r-core", type=int, dest="r_core")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--phase2", choices=sorted(PHASE2_ALIASES))
    p.add_argument("--stall-factor", type=float, dest="stall_factor")
    p.add_argument("--exact-dim", action="store_true", default=None, dest="exact_dim")
    p.set_defaults(func=cmd_learn_sparse)

    p = sub.add_parser("chang-scan", help="exhaustive bound checks for n <= 4")
    p.add_argument("--n", type=int)
    p.add_argument("--which", choices=list(CHECKS) + ["all"])
    p.set_defaults(func=cmd_chang_scan)

    p = sub.add_parser("query-learn", help="entropy-greedy learner over every target")
    _add_class_flags(p)
    p.set_defaults(func=cmd_query_learn)

    p = sub.add_parser("adv-cert", help="adversary split certificate")
    _add_class_flags(p)
    p.set_defaults(func=cmd_adv_cert)

    p = sub.add_parser("gen-function", help="emit a planted sparse spectrum as JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r-core", type=int, dest="r_core")
    p.add_argument("--seed", type=int)
    p.add_argument("--exact-dim", action="store_true", default=None, dest="exact_dim")
    p.set_defaults(func=cmd_gen_function)

    for name, sp in sub.choices.items():
        sp.add_argument("--config", help="JSON file of defaults; flags override")
        sp.add_argument("--out", help="output path (default stdout)")
        if name in ("learn-sparse", "chang-scan"):
            sp.add_argument("--jobs", type=int)
        if name in ("learn-sparse", "chang-scan", "query-learn"):
            sp.add_argument("--format", choices=["csv", "json"])
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FSparseError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
