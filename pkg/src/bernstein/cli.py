"""Command-line driver.

Exit codes: 0 success, 1 verdict failure under ``--expect-pass``, 2 usage
errors (bad arguments, malformed state files, dimension caps).

Defaults can be overridden by a JSON config file named in ``BERNSTEIN_CONFIG``
with any of the keys ``probability_tol``, ``eigenvalue_tol``,
``residual_tol``, ``output_format`` and ``seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import constructions, mermin, phase_torus, separability, stats
from .qstate import EIG_TOL, read_state, state_to_json

CONFIG_ENV = "BERNSTEIN_CONFIG"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    probability_tol: float = stats.PROB_TOL
    eigenvalue_tol: float = EIG_TOL
    residual_tol: float = separability.RESIDUAL_TOL
    output_format: str = "json"
    seed: int = 0

    def __post_init__(self):
        for name in ("probability_tol", "eigenvalue_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.output_format not in ("json", "table"):
            raise UsageError("output_format must be 'json' or 'table'")


def load_config(environ=os.environ) -> CliConfig:
    path = environ.get(CONFIG_ENV)
    if not path:
        return CliConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(CliConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return CliConfig(**data)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pi_list(text: str) -> np.ndarray:
    """Comma-separated angles or a JSON array, in units of pi."""
    text = text.strip()
    try:
        values = json.loads(text) if text.startswith("[") else [float(x) for x in text.split(",") if x.strip()]
        return np.pi * np.asarray(values, dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse angle list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--prob-tol", type=float, default=None)
    common.add_argument("--eig-tol", type=float, default=None)
    common.add_argument("--residual-tol", type=float, default=None)
    common.add_argument("--expect-pass", action="store_true", help="exit 1 when the verdict fails")

    p = _Parser(prog="bernstein", description="Bernstein states, fragility and Mermin relations")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("construct", parents=[common])
    c.add_argument("family", choices=("bernstein", "general-bernstein", "ghz", "inhomogeneous"))
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--phases", help="term phases in units of pi (general-bernstein); random if omitted")
    c.add_argument("--axis", choices=("x", "z"), default="z")
    c.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    c.add_argument("--q", type=float, default=0.5)
    c.add_argument("--out")

    for name in ("stats", "independence", "fragility"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--state", required=True)
        if name == "independence":
            s.add_argument("--axes", default="z")
            s.add_argument("--max-k", type=int)
        if name == "stats":
            s.add_argument("--query", help="outcome pattern such as '+•+'")
            s.add_argument("--axes", default="z")
        if name == "fragility":
            s.add_argument("--splits", choices=("all", "single"), default="all")

    o = sub.add_parser("orbit", parents=[common])
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--phases", required=True, help="JSON array of 2^(N-1) term phases in units of pi")

    m = sub.add_parser("mermin", parents=[common])
    m.add_argument("--n", type=int, default=3)
    m.add_argument("--max-size", type=int, default=4)
    m.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    return p


def _config(args, base: CliConfig) -> CliConfig:
    updates = {
        "output_format": args.format,
        "seed": args.seed,
        "probability_tol": args.prob_tol,
        "eigenvalue_tol": args.eig_tol,
        "residual_tol": args.residual_tol,
    }
    return replace(base, **{k: v for k, v in updates.items() if v is not None})


def _load(path: str):
    try:
        state, renormalized = read_state(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return state, renormalized


def _cmd_construct(args, cfg):
    n = args.n
    if args.family == "bernstein":
        s = constructions.special_bernstein(n)
    elif args.family == "general-bernstein":
        if args.phases:
            t = constructions.TermPhaseVector(n, _pi_list(args.phases))
        else:
            t = constructions.TermPhaseVector.random(n, np.random.default_rng(cfg.seed))
        s = constructions.general_bernstein(n, t)
    elif args.family == "ghz":
        s = constructions.ghz(n, args.axis, args.sign)
    else:
        s = constructions.inhomogeneous_bernstein3(args.q)
    obj = state_to_json(s, threshold=1e-15)
    if args.out:
        Path(args.out).write_text(json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
        return {"wrote": args.out, "n": s.n_particles, "terms": len(obj["amps"])}, True, lambda _: s.ket()
    return obj, True, lambda _: s.ket()


def _report_table(report: stats.IndependenceReport) -> str:
    lines = [f"{'size':>4}  {'independent':>11}  {'worst dev':>10}  witness"]
    for size in sorted(report.verdicts):
        v = report.verdicts[size]
        lines.append(f"{size:>4}  {str(v.independent):>11}  {v.worst_deviation:>10.3g}  {v.witness or ''}")
    lines.append(f"all-up joint {report.n_wise_joint:.6g} vs product {report.n_wise_product:.6g}")
    return "\n".join(lines)


def _arrow_label(index: int, n: int) -> str:
    return "".join("↓" if (index >> (n - k)) & 1 else "↑" for k in range(1, n + 1))


def _cmd_independence(args, cfg):
    s, _ = _load(args.state)
    report = stats.kwise_independence_report(s, args.axes, args.max_k, cfg.probability_tol)
    ok = all(v.independent for v in report.verdicts.values())
    return report.to_json(), ok, lambda _: _report_table(report)


def _cmd_stats(args, cfg):
    s, renorm = _load(args.state)
    report = stats.kwise_independence_report(s, "z", None, cfg.probability_tol)
    out = {"n": s.n_particles, "renormalized": renorm}
    probs = stats.outcome_distribution(s)
    out["distribution"] = {
        _arrow_label(i, s.n_particles): float(p) for i, p in enumerate(probs) if p > 1e-15
    }
    out["singles_up"] = [float(x) for x in report.singles[:, 0]]
    ok = True
    if s.n_particles >= 3:
        try:
            cert = stats.bernstein_certificate(s, cfg.probability_tol)
            out["certificate"] = {
                "is_bernstein": cert.is_bernstein,
                "reason": None if cert.reason is None else cert.reason.value,
            }
            ok = cert.is_bernstein
        except stats.CertificateInconsistency as exc:
            out["certificate"] = {"is_bernstein": None, "error": str(exc)}
            ok = False
    if args.query:
        q = stats.OutcomeQuery.parse(args.query, args.axes)
        out["query"] = {"pattern": args.query, "axes": args.axes, "probability": stats.joint_probability(s, q)}
    out["report"] = report.to_json()

    def table(_):
        lines = [f"N = {s.n_particles}"]
        lines += [f"  P({label}) = {p:.6g}" for label, p in out["distribution"].items()]
        if "certificate" in out:
            lines.append(f"Bernstein certificate: {out['certificate']}")
        if "query" in out:
            lines.append(f"P({args.query}) = {out['query']['probability']:.6g}")
        lines.append(_report_table(report))
        return "\n".join(lines)

    return out, ok, table


def _cmd_fragility(args, cfg):
    s, _ = _load(args.state)
    try:
        report = separability.fragility_report(s, args.splits, cfg.eigenvalue_tol, cfg.residual_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = report.to_json()
    ok = all(r["verdict"] == "separable" for r in rows)

    def table(_):
        lines = []
        for r in rows:
            worst = min((x["ppt_min"] for x in r["splits"]), default=0.0)
            lines.append(f"trace out {r['traced']}: min PPT eig {worst:+.3g}, residual {r['residual']}, {r['verdict']}")
        return "\n".join(lines)

    return rows, ok, table


def _cmd_orbit(args, cfg):
    phases = _pi_list(args.phases)
    try:
        t = constructions.TermPhaseVector(args.n, phases)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = phase_torus.orbit_membership(args.n, t)
    lattice = phase_torus.period_lattice(args.n)
    gap = phase_torus.dimension_gap(args.n)
    out = {
        "membership": res.to_json(),
        "period_lattice_over_pi": [[str(x) for x in g] for g in lattice.generators],
        "dimension_gap": gap._asdict(),
    }

    def table(_):
        lines = [f"reachable: {res.reachable} (max residual {res.max_residual_mod_2pi:.3g})"]
        if res.deltas is not None:
            lines.append("deltas / pi: " + ", ".join(f"{d / np.pi:.6g}" for d in res.deltas))
        lines.append("period lattice generators (units of pi):")
        lines += ["  (" + ", ".join(str(x) for x in g) + ")" for g in lattice.generators]
        lines.append(f"orbit dim {gap.orbit_dim}, Bernstein torus dim {gap.bernstein_dim}")
        return "\n".join(lines)

    return out, res.reachable, table


def _cmd_mermin(args, cfg):
    if args.n < 3:
        raise UsageError("mermin needs --n >= 3")
    check = mermin.verify_relation_table(args.n, args.sign)
    rels = mermin.mermin_observables(args.n)
    try:
        sets = mermin.find_contradictions(args.n, args.max_size, rels)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = {
        "n": args.n,
        "ghz_sign": args.sign,
        "relations": [
            {"axes": r.relation.axes, "predicted": r.relation.sign, "measured": r.measured} for r in check.rows
        ],
        "all_match": check.all_match,
        "contradictions": [[rels[i].axes for i in c.relation_indices] for c in sets],
        "contradiction_count": len(sets),
    }

    def table(_):
        lines = [f"{'axes':<{args.n + 2}} predicted  measured"]
        for r in check.rows:
            lines.append(f"{r.relation.axes:<{args.n + 2}} {r.relation.sign:>+9d}  {r.measured if r.measured is None else f'{r.measured:+.0f}':>8}")
        lines.append(f"{len(sets)} contradiction sets up to size {args.max_size}")
        lines += ["  " + " ".join(rels[i].axes for i in c.relation_indices) for c in sets]
        return "\n".join(lines)

    return out, check.all_match, table


COMMANDS = {
    "construct": _cmd_construct,
    "stats": _cmd_stats,
    "independence": _cmd_independence,
    "fragility": _cmd_fragility,
    "orbit": _cmd_orbit,
    "mermin": _cmd_mermin,
}


def run(argv=None, stdout=None, environ=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    environ = os.environ if environ is None else environ
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args, load_config(environ))
        payload, ok, table = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # builder range checks and dimension caps
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output_format == "table":
        stdout.write(table(payload) + "\n")
    else:
        stdout.write(json.dumps(payload, ensure_ascii=False, indent=1) + "\n")
    return 1 if (args.expect_pass and not ok) else 0


def main() -> None:
    sys.exit(run())
