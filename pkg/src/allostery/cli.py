"""Batch command-line front end.

Subcommands: forge | verify | simulate | compare | audit | report.
JSON goes to stdout (or files under --out); human summaries go to stderr so
stdout stays machine-readable.  Exit codes: 0 valid, 1 failed check,
2 malformed input or exceeded budget.  Output is deterministic for a fixed
config and seed — no timestamps anywhere.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from .certificates import (
    Castle,
    audit_castle,
    check_castle_audit,
    check_comparison_certificate,
    check_criterion_certificate,
    check_non_af_report,
    comparison_certificate,
    frac_str,
    non_af_report,
    parse_castle_file,
    verify_criterion,
    window_from_records,
)
from .config import ENV_BUDGET, RunConfig, apply_env, load_config, parse_epsilon_mode
from .dynamics import Window
from .errors import (
    AllosteryError,
    BudgetExceededError,
    CertificateError,
    DatumInvariantError,
    ForgeError,
    MalformedCastleError,
    MeasureConditionError,
    RankMismatchError,
    TextParseError,
    WindowError,
)
from .forge import SubgroupDatum, default_epsilon, forge
from .wreath import WreathElement, WreathGroup

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_MALFORMED = 2


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _emit_json(obj: dict, cfg: RunConfig, name: str) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        target = out_dir / f"{name}.json"
        target.write_text(text, encoding="utf-8")
        print(str(target))
    else:
        sys.stdout.write(text)


def _emit_text(text: str, cfg: RunConfig, name: str) -> None:
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        target = out_dir / name
        target.write_text(text, encoding="utf-8")
        print(str(target))
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise TextParseError(f"{path}: {exc}") from None


def _load_window(path: str) -> Window:
    rec = _load_json(path)
    if isinstance(rec, list):
        records = rec
    elif isinstance(rec, dict) and "window" in rec:
        records = rec["window"]
    else:
        raise TextParseError(f"{path}: no window data found")
    return window_from_records(records)


def _window_gammas(cfg: RunConfig) -> List[WreathElement]:
    group = WreathGroup(cfg.d, cfg.m)
    return [
        entry.element
        for entry in group.ball(cfg.radius, max_radius=cfg.max_word_length)
        if not entry.element.is_identity()
    ]


def _parse_states(window: Window, spec: str, rng: random.Random) -> frozenset:
    """State-set specs: ``idx:0,1,2`` (flat indices) or ``random:k``."""
    kind, _, rest = spec.partition(":")
    if kind == "idx":
        try:
            flats = [int(tok) for tok in rest.split(",") if tok.strip() != ""]
        except ValueError:
            raise TextParseError(f"bad index list {rest!r}") from None
        if not flats:
            raise TextParseError("empty index list")
        for i in flats:
            if not 0 <= i < window.size:
                raise TextParseError(f"state index {i} out of range 0..{window.size - 1}")
        return frozenset(window.state_at(i) for i in flats)
    if kind == "random":
        try:
            count = int(rest)
        except ValueError:
            raise TextParseError(f"bad random count {rest!r}") from None
        if not 1 <= count <= window.size:
            raise TextParseError(f"random count {count} out of range")
        return frozenset(window.state_at(i) for i in rng.sample(range(window.size), count))
    raise TextParseError(f"state spec must be idx:... or random:k, got {spec!r}")


def cmd_forge(args: argparse.Namespace, cfg: RunConfig) -> int:
    group = WreathGroup(cfg.d, cfg.m)
    gamma = group.parse_element(args.gamma)
    epsilon = cfg.epsilon_arg() or default_epsilon(0)
    datum = forge(gamma, args.p, epsilon, cfg.d, cfg.m)
    _emit_json(datum.to_dict(), cfg, "datum")
    _say(
        f"forged: p={datum.p} k={datum.k} l={datum.l} index={datum.index()} "
        f"fixed fraction {frac_str(datum.fixed_fraction())}"
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.check:
        ok = check_criterion_certificate(_load_json(args.check), cfg.budget_states)
        _say(f"criterion certificate: {'valid' if ok else 'invalid'}")
        return EXIT_OK if ok else EXIT_FAILED
    gammas = _window_gammas(cfg)
    cert = verify_criterion(
        gammas,
        cfg.d,
        cfg.m,
        epsilon=cfg.epsilon_arg(),
        budget=cfg.budget_states,
        witness_radius=cfg.radius,
    )
    _emit_json(cert.to_dict(), cfg, "criterion")
    for rec in cert.records:
        _say(
            f"gamma {rec.gamma_text}: p={rec.prime} index={rec.index} "
            f"fixed {frac_str(rec.fixed_fraction)} "
            f"{'ok' if rec.ok else 'FAILED'}"
        )
    _say(
        f"window fraction {frac_str(cert.window_s_fixed_fraction)} >= "
        f"{frac_str(cert.product_lower_bound)}; "
        f"transitivity {cert.transitivity.status} ({cert.transitivity.method}); "
        f"verdict {cert.verdict}"
    )
    return EXIT_OK if cert.valid else EXIT_FAILED


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.window:
        window = _load_window(args.window)
    elif args.datum:
        window = Window([SubgroupDatum.from_dict(_load_json(args.datum))])
    else:
        raise TextParseError("simulate needs --window or --datum")
    group = window.group
    try:
        element = group.parse_element(args.element)
    except TextParseError:
        element = group.word_element(group.parse_word(args.element))
    if args.steps < 0:
        raise TextParseError("steps must be nonnegative")
    prepared = window.prepare(element)
    state = window.identity_thread()
    rows = ["step,state"]
    rows.append(f"0,{window.state_text(state)}")
    for step in range(1, args.steps + 1):
        state = prepared.apply(state)
        rows.append(f"{step},{window.state_text(state)}")
    _emit_text("\n".join(rows) + "\n", cfg, "trajectory.csv")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.check:
        ok = check_comparison_certificate(_load_json(args.check), cfg.budget_states)
        _say(f"comparison certificate: {'valid' if ok else 'invalid'}")
        return EXIT_OK if ok else EXIT_FAILED
    if not args.window or not args.a_spec or not args.b_spec:
        raise TextParseError("compare needs --window, --a and --b (or --check)")
    window = _load_window(args.window)
    rng = random.Random(cfg.seed)
    a_set = _parse_states(window, args.a_spec, rng)
    b_set = _parse_states(window, args.b_spec, rng)
    cert = comparison_certificate(a_set, b_set, window, cfg.budget_states)
    _emit_json(cert.to_dict(), cfg, "comparison")
    _say(f"comparison: {len(cert.pieces)} pieces moved disjointly into B")
    return EXIT_OK


def cmd_audit(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.check:
        ok = check_castle_audit(_load_json(args.check), cfg.budget_states)
        _say(f"castle audit: {'ok' if ok else 'failed'}")
        return EXIT_OK if ok else EXIT_FAILED
    if not args.castle or not args.window or not args.gamma:
        raise TextParseError("audit needs a castle file, --window and --gamma (or --check)")
    window = _load_window(args.window)
    with open(args.castle, "r", encoding="utf-8") as fh:
        castle = parse_castle_file(fh.read(), window)
    if args.tolerance:
        castle = replace(castle, epsilon=Fraction(args.tolerance))
    gamma = window.group.parse_element(args.gamma)
    if gamma.is_identity():
        raise TextParseError("audit needs a nontrivial element")
    try:
        audit = audit_castle(castle, gamma, window, cfg.budget_states)
    except MalformedCastleError as exc:
        _emit_json(
            {
                "kind": "castle-audit",
                "v": 1,
                "well_formed": False,
                "error": str(exc),
                "witness": exc.witness,
            },
            cfg,
            "audit",
        )
        _say(f"malformed castle: {exc}")
        return EXIT_FAILED
    _emit_json(audit.to_dict(), cfg, "audit")
    _say(
        f"audit: fix measure {frac_str(audit.fix_measure)} <= bound "
        f"{frac_str(audit.bound)}: {'ok' if audit.inequality_ok else 'VIOLATED'}"
    )
    return EXIT_OK if audit.ok else EXIT_FAILED


def _report_markdown(report_dict: dict) -> str:
    lines = [
        "| gamma | prime | index | fixed fraction | lower bound |",
        "| --- | --- | --- | --- | --- |",
    ]
    for rec in report_dict["criterion"]["records"]:
        one_minus = 1 - Fraction(rec["epsilon"])
        lines.append(
            f"| `{rec['gamma']}` | {rec['prime']} | {rec['index']} "
            f"| {rec['fixed_fraction']} | {frac_str(one_minus)} |"
        )
    lines.append("")
    lines.append(f"Window bound: **{report_dict['bound']}**; {report_dict['conclusion']}.")
    return "\n".join(lines) + "\n"


def cmd_report(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.check:
        ok = check_non_af_report(_load_json(args.check), cfg.budget_states)
        _say(f"report: {'valid' if ok else 'invalid'}")
        return EXIT_OK if ok else EXIT_FAILED
    gammas = _window_gammas(cfg)
    cert = verify_criterion(
        gammas,
        cfg.d,
        cfg.m,
        epsilon=cfg.epsilon_arg(),
        budget=cfg.budget_states,
        witness_radius=cfg.radius,
    )
    if not cert.valid:
        _emit_json(cert.to_dict(), cfg, "criterion")
        _say(f"criterion certificate verdict {cert.verdict}; no report emitted")
        return EXIT_FAILED
    report = non_af_report(cert, cfg.budget_states)
    rec = report.to_dict()
    if cfg.out:
        _emit_json(rec, cfg, "report")
        _emit_text(_report_markdown(rec), cfg, "report.md")
    elif cfg.format == "md":
        sys.stdout.write(_report_markdown(rec))
    else:
        sys.stdout.write(json.dumps(rec, indent=2) + "\n")
    _say(f"bound {rec['bound']}; {rec['conclusion']}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--d", type=int, help="lamp rank")
    common.add_argument("--m", type=int, help="shift rank")
    common.add_argument("--radius", type=int, help="word-metric ball radius")
    common.add_argument("--epsilon", help="'schedule' or a rational like 1/2")
    common.add_argument("--prime-strategy", dest="prime_strategy")
    common.add_argument("--budget-states", dest="budget_states", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="directory for output files")
    common.add_argument("--format", choices=("json", "csv", "md"))

    parser = argparse.ArgumentParser(
        prog="allostery",
        description="forge congruence-style subgroups of lamplighter-like groups "
        "and certify freeness, comparison, and castle bounds on their finite quotients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forge", parents=[common], help="forge one subgroup datum")
    p.add_argument("gamma", help="element text, e.g. '{(0):(1)};(0)'")
    p.add_argument("--p", type=int, required=True, help="prime")
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("verify", parents=[common], help="criterion certificate for a ball window")
    p.add_argument("--check", help="re-verify an existing certificate JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="trajectory of one element")
    p.add_argument("element", help="element text or dotted word like s1.t1")
    p.add_argument("--window", help="window JSON (list of data or a certificate)")
    p.add_argument("--datum", help="single datum JSON")
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common], help="comparison certificate")
    p.add_argument("--window", help="window JSON")
    p.add_argument("--a", dest="a_spec", help="A spec: idx:0,1 or random:k")
    p.add_argument("--b", dest="b_spec", help="B spec: idx:2,3,4 or random:k")
    p.add_argument("--check", help="re-verify an existing certificate JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("audit", parents=[common], help="audit a castle file")
    p.add_argument("castle", nargs="?", help="castle file: V=<states>; S=<words>")
    p.add_argument("--window", help="window JSON")
    p.add_argument("--gamma", help="element text to test")
    p.add_argument("--tolerance", help="optional defect tolerance (rational)")
    p.add_argument("--check", help="re-verify an existing audit JSON")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("report", parents=[common], help="assembled negative report")
    p.add_argument("--check", help="re-verify an existing report JSON")
    p.set_defaults(func=cmd_report)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    for key in ("d", "m", "radius", "prime_strategy", "budget_states", "seed", "out", "format"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "epsilon", None) is not None:
        cfg.epsilon = parse_epsilon_mode(args.epsilon)
    try:
        cfg.validate()
    except ValueError as exc:
        raise TextParseError(str(exc)) from None
    return apply_env(cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return args.func(args, cfg)
    except (
        TextParseError,
        ForgeError,
        DatumInvariantError,
        RankMismatchError,
        WindowError,
        MeasureConditionError,
        CertificateError,
        FileNotFoundError,
    ) as exc:
        _say(f"error: {exc}")
        return EXIT_MALFORMED
    except BudgetExceededError as exc:
        _say(f"error: {exc}")
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
