"""Command-line front end: generate scenarios, run policies, compare them.

Exit codes: 0 success, 2 malformed config or input file, 3 infeasible
scenario, 4 exact search too large. Output files are written atomically and
contain nothing nondeterministic, so identical invocations produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import (
    EmptyCoverageError,
    InfeasibleError,
    OracleTooLargeError,
    ParseError,
    RoundingFailedError,
    ScenarioError,
    UncoverableAreaError,
)
from .generator import GeneratorConfig, generate
from .model import Scenario
from .optimizer import DEFAULT_CONFIG, SolverConfig
from .policy import POLICY_KINDS, Policy, SlotOutcome, run_policy
from .scenario_io import load_scenario, save_scenario, scenario_digest, write_text_atomic

__all__ = ["main", "cmd_generate", "cmd_run", "cmd_compare", "CSV_HEADER"]

CSV_HEADER = (
    "slot,policy,beta,migrated,forced,switching,queuing,communication,"
    "non_switching,total,cum_total"
)

_CONFIG_SECTIONS = {"generator", "solver", "controller", "output"}
_SOLVER_KEYS = {"max_iters", "tol", "margin", "max_attempts"}
_CONTROLLER_KEYS = {"beta", "policy"}
_OUTPUT_KEYS = {"dir"}


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise ParseError("config document must be a mapping of sections")
    unknown = set(doc) - _CONFIG_SECTIONS
    if unknown:
        raise ParseError(f"unknown config section: {sorted(unknown)[0]}")
    for section, keys in (
        ("solver", _SOLVER_KEYS),
        ("controller", _CONTROLLER_KEYS),
        ("output", _OUTPUT_KEYS),
    ):
        body = doc.get(section, {})
        if not isinstance(body, Mapping):
            raise ParseError(f"config section {section} must be a mapping")
        bad = set(body) - keys
        if bad:
            raise ParseError(f"unknown field: {section}.{sorted(bad)[0]}")
    return dict(doc)


def _solver_config(config: Mapping[str, Any], args: argparse.Namespace) -> SolverConfig:
    solver = config.get("solver", {})
    cfg = DEFAULT_CONFIG
    if "max_iters" in solver:
        cfg = replace(cfg, max_iters=int(solver["max_iters"]))
    if "tol" in solver:
        cfg = replace(cfg, tol=float(solver["tol"]))
    if "margin" in solver:
        cfg = replace(cfg, margin=float(solver["margin"]))
    if "max_attempts" in solver:
        cfg = replace(cfg, max_attempts=int(solver["max_attempts"]))
    if getattr(args, "max_iters", None) is not None:
        cfg = replace(cfg, max_iters=args.max_iters)
    if getattr(args, "tol", None) is not None:
        cfg = replace(cfg, tol=args.tol)
    if getattr(args, "margin", None) is not None:
        cfg = replace(cfg, margin=args.margin)
    if cfg.max_iters < 1 or cfg.tol <= 0 or cfg.margin < 0 or cfg.max_attempts < 1:
        raise ParseError("solver settings out of range")
    return cfg


def _out_dir(config: Mapping[str, Any], args: argparse.Namespace) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(config.get("output", {}).get("dir", "out"))


def _beta_str(policy: Policy) -> str:
    if policy.kind != "threshold":
        return ""
    return "inf" if math.isinf(policy.beta) else repr(policy.beta)


def _run_stem(policy: Policy, seed: int) -> str:
    if policy.kind == "threshold":
        return f"threshold_beta{_beta_str(policy)}_seed{seed}"
    return f"{policy.kind}_seed{seed}"


def _rows_csv(policy: Policy, outcomes: Sequence[SlotOutcome]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    beta = _beta_str(policy)
    cum = 0.0
    for o in outcomes:
        cum += o.delay.total
        writer.writerow(
            [
                o.slot,
                policy.kind,
                beta,
                int(o.migrated),
                int(o.forced),
                repr(float(o.delay.switching)),
                repr(float(o.delay.queuing)),
                repr(float(o.delay.communication)),
                repr(float(o.delay.non_switching)),
                repr(float(o.delay.total)),
                repr(float(cum)),
            ]
        )
    return buf.getvalue()


def _summary_doc(
    policy: Policy,
    seed: int,
    scenario_path: str,
    digest: str,
    outcomes: Sequence[SlotOutcome],
    solver: SolverConfig,
) -> dict[str, Any]:
    beta: Any = None
    if policy.kind == "threshold":
        beta = "inf" if math.isinf(policy.beta) else policy.beta
    run_id = hashlib.sha256(
        f"{digest}|{policy.kind}|{beta}|{seed}".encode()
    ).hexdigest()[:16]
    totals = {
        "switching": sum(o.delay.switching for o in outcomes),
        "queuing": sum(o.delay.queuing for o in outcomes),
        "communication": sum(o.delay.communication for o in outcomes),
        "non_switching": sum(o.delay.non_switching for o in outcomes),
        "total": sum(o.delay.total for o in outcomes),
    }
    return {
        "run_id": run_id,
        "scenario": scenario_path,
        "scenario_sha256": digest,
        "policy": policy.kind,
        "beta": beta,
        "seed": seed,
        "num_slots": len(outcomes),
        "migrations": sum(1 for o in outcomes if o.migrated),
        "forced_migrations": sum(1 for o in outcomes if o.forced),
        "totals": totals,
        "config": {
            "solver": {
                "max_iters": solver.max_iters,
                "tol": solver.tol,
                "margin": solver.margin,
                "max_attempts": solver.max_attempts,
            },
            "controller": {"policy": policy.kind, "beta": beta},
        },
    }


def _parse_policy(config: Mapping[str, Any], args: argparse.Namespace) -> Policy:
    controller = config.get("controller", {})
    kind = getattr(args, "policy", None) or controller.get("policy", "threshold")
    if kind not in POLICY_KINDS:
        raise ParseError(f"unknown policy: {kind!r}")
    if kind != "threshold":
        return Policy(kind=kind)
    beta = getattr(args, "beta", None)
    if beta is None:
        beta = controller.get("beta", 1.0)
    try:
        beta = float(beta)
    except (TypeError, ValueError):
        raise ParseError(f"beta must be a number, got {beta!r}") from None
    if math.isnan(beta) or beta < 0:
        raise ParseError("beta must be nonnegative")
    return Policy.threshold(beta)


def cmd_generate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if "generator" not in config:
        raise ParseError("missing required config section: generator")
    gen_cfg = GeneratorConfig.from_mapping(config["generator"])
    scenario = generate(gen_cfg)
    save_scenario(scenario, args.out)
    print(
        f"wrote {args.out}: {scenario.num_clouds} clouds, "
        f"{scenario.num_users} users, {scenario.num_slots} slots"
    )
    return 0


def _run_one(
    scenario: Scenario,
    scenario_path: str,
    policy: Policy,
    seed: int,
    out_dir: Path,
    solver: SolverConfig,
) -> dict[str, Any]:
    outcomes = run_policy(scenario, policy, seed, solver)
    digest = scenario_digest(scenario_path)
    stem = _run_stem(policy, seed)
    csv_path = out_dir / f"{stem}.csv"
    summary_path = out_dir / f"{stem}.json"
    write_text_atomic(csv_path, _rows_csv(policy, outcomes))
    summary = _summary_doc(policy, seed, scenario_path, digest, outcomes, solver)
    write_text_atomic(
        summary_path,
        json.dumps(summary, indent=2, sort_keys=True, allow_nan=False) + "\n",
    )
    return summary


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    solver = _solver_config(config, args)
    policy = _parse_policy(config, args)
    scenario = load_scenario(args.scenario)
    out_dir = _out_dir(config, args)
    summary = _run_one(scenario, args.scenario, policy, args.seed, out_dir, solver)
    stem = _run_stem(policy, args.seed)
    print(
        f"wrote {out_dir / stem}.csv and .json "
        f"(total {summary['totals']['total']:.6g}, "
        f"{summary['migrations']} migrations)"
    )
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    solver = _solver_config(config, args)
    scenario = load_scenario(args.scenario)
    out_dir = _out_dir(config, args)

    betas: list[float] = []
    if args.beta:
        for chunk in str(args.beta).split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                value = float(chunk)
            except ValueError:
                raise ParseError(f"beta list entry is not a number: {chunk!r}") from None
            if math.isnan(value) or value < 0:
                raise ParseError("beta must be nonnegative")
            betas.append(value)

    policies = [Policy.threshold(b) for b in betas]
    policies.append(Policy.always())
    policies.append(Policy.never())
    oracle_policy = Policy.oracle()

    rows = []
    for policy in policies:
        summary = _run_one(scenario, args.scenario, policy, args.seed, out_dir, solver)
        rows.append(summary)
    try:
        rows.append(
            _run_one(scenario, args.scenario, oracle_policy, args.seed, out_dir, solver)
        )
    except OracleTooLargeError:
        pass  # comparison table simply omits the oracle row

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["policy", "beta", "total", "migrations", "forced_migrations"])
    for summary in rows:
        beta = summary["beta"]
        writer.writerow(
            [
                summary["policy"],
                "" if beta is None else beta,
                repr(float(summary["totals"]["total"])),
                summary["migrations"],
                summary["forced_migrations"],
            ]
        )
    table_path = out_dir / "comparison.csv"
    write_text_atomic(table_path, buf.getvalue())
    print(f"wrote {table_path} ({len(rows)} runs)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecsim",
        description="Service placement and station selection over discrete slots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a scenario file from a config")
    g.add_argument("--config", required=True, help="JSON config with a generator section")
    g.add_argument("--out", required=True, help="scenario file to write")
    g.set_defaults(func=cmd_generate)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True, help="scenario file to load")
        p.add_argument("--config", help="JSON config file (solver/controller/output)")
        p.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
        p.add_argument("--out", help="output directory (default: config output.dir or ./out)")
        p.add_argument("--max-iters", type=int, dest="max_iters", help="descent iteration cap")
        p.add_argument("--tol", type=float, help="relative convergence gap")
        p.add_argument("--margin", type=float, help="station capacity safety margin")

    r = sub.add_parser("run", help="run one policy over a scenario")
    add_common(r)
    r.add_argument("--policy", choices=list(POLICY_KINDS), help="policy (default threshold)")
    r.add_argument("--beta", type=float, help="threshold multiplier (accepts inf)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run threshold betas plus baselines")
    add_common(c)
    c.add_argument("--beta", help="comma-separated beta list, e.g. 0,0.5,1,inf")
    c.set_defaults(func=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EmptyCoverageError as exc:
        print(f"error: infeasible scenario: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ScenarioError, UncoverableAreaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, RoundingFailedError) as exc:
        print(f"error: infeasible scenario: {exc}", file=sys.stderr)
        return 3
    except OracleTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
