"""Command-line front end.

Three subcommands:

  verify    rebuild each swap rewrite as its outcome sum on the dense
            engine and report the worst amplitude deviation
  protocol  run secret-sharing rounds, check every recovery identity,
            and tally the key distribution
  collude   exact first-dit posteriors for colluding subsets, with an
            optional exhaustive dense-engine confirmation

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or cap error.
`--json PATH` (or `-` for stdout) writes a machine report; identical flags
plus seed reproduce it byte for byte, so no timings go into the JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
import time
from fractions import Fraction
from itertools import product
from statistics import NormalDist

import numpy as np

from .core import MAX_AMPLITUDES, validate_dimension
from .protocol import (ProtocolConfig, collusion_posterior,
                       enumerate_oracle_branches, run_round,
                       transcript_to_json_dict)
from .swapcalc import verify_swap_identity

MAX_ORACLE_BRANCHES = 1 << 16

RULES = ("bell", "black", "white")


def chi_square_critical(dof: int, alpha: float) -> float:
    """Upper-tail chi-square critical value (Wilson-Hilferty approximation)."""
    z = NormalDist().inv_cdf(1.0 - alpha)
    c = 2.0 / (9.0 * dof)
    return dof * (1.0 - c + z * math.sqrt(c)) ** 3


def _emit(report: dict, json_target: str | None, human_lines: list[str]) -> None:
    """Print the human table unless JSON goes to stdout; write JSON if asked."""
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if json_target == "-":
        sys.stdout.write(text)
        return
    for line in human_lines:
        print(line)
    if json_target:
        with open(json_target, "w", encoding="utf-8") as handle:
            handle.write(text)


def _pick_seed(args) -> int:
    if args.seed is not None:
        return args.seed % (1 << 64)
    return secrets.randbits(64)


def _usage_fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_verify(args) -> int:
    try:
        validate_dimension(args.d)
    except ValueError as exc:
        return _usage_fail(str(exc))
    d, n = args.d, args.n
    rules = RULES if args.rule == "all" else (args.rule,)
    if any(r in ("black", "white") for r in rules) and n < 3:
        return _usage_fail("cat rules need --n of at least 3")

    needed = max(d**4 if r == "bell" else d ** (n + 2) for r in rules)
    if needed > MAX_AMPLITUDES:
        return _usage_fail(
            f"refusing: the dense check needs {needed} amplitudes "
            f"(cap {MAX_AMPLITUDES}); lower --d or --n")

    seed = _pick_seed(args)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    checks = []
    for rule in rules:
        worst = 0.0
        cases = 0
        if rule == "bell":
            shapes = [2, 2]
        else:
            shapes = [n, 2]
        if args.samples is None:
            space = [range(d)] * sum(shapes)
            tuples = product(*space)
        else:
            tuples = (tuple(int(x) for x in rng.integers(0, d, sum(shapes)))
                      for _ in range(args.samples))
        for flat in tuples:
            labels = (tuple(flat[:shapes[0]]), tuple(flat[shapes[0]:]))
            if rule == "white":
                if args.samples is None:
                    positions = range(2, n + 1)
                else:
                    positions = (int(rng.integers(2, n + 1)),)
                for m in positions:
                    worst = max(worst, verify_swap_identity(rule, d, labels, m=m))
                    cases += 1
            else:
                worst = max(worst, verify_swap_identity(rule, d, labels))
                cases += 1
        checks.append({"rule": rule, "cases": cases, "max_deviation": worst,
                       "tol": args.tol, "pass": worst < args.tol})
    elapsed = time.perf_counter() - start

    ok = all(check["pass"] for check in checks)
    mode = "exhaustive" if args.samples is None else f"samples={args.samples}"
    report = {
        "command": "verify",
        "parameters": {"d": d, "n": n, "rule": args.rule, "mode": mode,
                       "tol": args.tol, "seed": seed},
        "checks": checks,
        "ok": ok,
    }
    lines = [f"verify: d={d} n={n} mode={mode} seed={seed}"]
    for check in checks:
        status = "PASS" if check["pass"] else "FAIL"
        lines.append(f"  rule {check['rule']:<5} {check['cases']:>6} cases   "
                     f"max deviation {check['max_deviation']:.3e} "
                     f"(tol {check['tol']:.1e})   {status}")
    lines.append(f"{'all checks passed' if ok else 'CHECKS FAILED'} "
                 f"({elapsed:.2f}s)")
    _emit(report, args.json, lines)
    return 0 if ok else 1


def _load_labels(args, d: int, n: int, rng):
    """Per-round label source for the protocol command."""
    if args.labels == "zero":
        fixed = ((0,) * n, ((0, 0),) * n)
        return lambda: fixed
    if args.labels == "random":
        def draw():
            cat = tuple(int(x) for x in rng.integers(0, d, n))
            bells = tuple((int(v), int(vp))
                          for v, vp in rng.integers(0, d, (n, 2)))
            return cat, bells
        return draw
    with open(args.labels, encoding="utf-8") as handle:
        data = json.load(handle)
    cat = tuple(int(x) for x in data["cat_labels"])
    bells = tuple((int(v), int(vp)) for v, vp in data["bell_labels"])
    if len(cat) != n or len(bells) != n:
        raise ValueError(f"labels file must carry {n} cat labels and "
                         f"{n} Bell label pairs")
    if not all(0 <= x < d for x in cat + tuple(x for b in bells for x in b)):
        raise ValueError(f"labels file holds values outside 0..{d - 1}")
    return lambda: (cat, bells)


def _transcript_consistent(transcript) -> bool:
    """Announcement identities, checked directly on the transcript numbers."""
    config = transcript.config
    d, n = config.d, config.n
    k_total = sum(k for k, _ in transcript.outcomes)
    if transcript.announced[0] != (config.bell_labels[0][0] + k_total) % d:
        return False
    return all(
        transcript.announced[i - 1]
        == (config.bell_labels[i - 1][1] + transcript.outcomes[i - 1][1]) % d
        for i in range(2, n + 1))


def cmd_protocol(args) -> int:
    try:
        validate_dimension(args.d)
    except ValueError as exc:
        return _usage_fail(str(exc))
    d, n = args.d, args.n
    if n < 2:
        return _usage_fail("the protocol needs --n of at least 2")
    if args.rounds < 0:
        return _usage_fail("--rounds must be nonnegative")
    if args.engine == "statevector" and d ** (3 * n) > MAX_AMPLITUDES:
        return _usage_fail(
            f"refusing: the statevector engine needs d^(3n) = {d ** (3 * n)} "
            f"amplitudes (cap {MAX_AMPLITUDES}); use --engine symbolic")

    seed = _pick_seed(args)
    rng = np.random.default_rng(seed)
    try:
        next_labels = _load_labels(args, d, n, rng)
    except (OSError, ValueError, KeyError) as exc:
        return _usage_fail(f"bad labels source: {exc}")

    start = time.perf_counter()
    key_counts = np.zeros((d, d), dtype=int)
    transcripts = []
    recoveries = 0
    for _ in range(args.rounds):
        cat, bells = next_labels()
        config = ProtocolConfig(d, n, cat, bells, seed=seed)
        transcript = run_round(config, engine=args.engine, rng=rng)
        record = transcript_to_json_dict(transcript)
        good = record["ok"] and _transcript_consistent(transcript)
        recoveries += bool(good)
        key_counts[transcript.key[0], transcript.key[1]] += 1
        if args.json:
            record["ok"] = bool(good)
            transcripts.append(record)
    elapsed = time.perf_counter() - start

    success_rate = recoveries / args.rounds if args.rounds else None
    chi = None
    dof = d * d - 1
    if args.rounds >= 5 * d * d:
        expected = args.rounds / (d * d)
        statistic = float(((key_counts - expected) ** 2 / expected).sum())
        critical = chi_square_critical(dof, 0.001)
        chi = {"statistic": statistic, "critical": critical, "dof": dof,
               "alpha": 0.001, "pass": statistic < critical}

    ok = (success_rate in (None, 1.0)) and (chi is None or chi["pass"])
    report = {
        "command": "protocol",
        "parameters": {"d": d, "n": n, "rounds": args.rounds, "seed": seed,
                       "engine": args.engine, "labels": args.labels},
        "success_rate": success_rate,
        "key_counts": key_counts.tolist(),
        "chi_square": chi,
        "transcripts": transcripts,
        "ok": ok,
    }
    lines = [f"protocol: d={d} n={n} rounds={args.rounds} "
             f"engine={args.engine} labels={args.labels} seed={seed}"]
    if args.rounds:
        lines.append(f"  recovery success rate {success_rate:.4f} "
                     f"({recoveries}/{args.rounds})")
        lines.append(f"  key counts: min {key_counts.min()} "
                     f"max {key_counts.max()} over {d * d} values")
        if chi:
            lines.append(f"  key chi-square {chi['statistic']:.2f} vs "
                         f"critical {chi['critical']:.2f} "
                         f"(dof {dof}, alpha 0.001)   "
                         f"{'PASS' if chi['pass'] else 'FAIL'}")
    else:
        lines.append("  no rounds requested")
    lines.append(f"{'all checks passed' if ok else 'CHECKS FAILED'} "
                 f"({elapsed:.2f}s)")
    _emit(report, args.json, lines)
    return 0 if ok else 1


def cmd_collude(args) -> int:
    try:
        validate_dimension(args.d)
    except ValueError as exc:
        return _usage_fail(str(exc))
    d, n = args.d, args.n
    if n < 2:
        return _usage_fail("the protocol needs --n of at least 2")
    try:
        missing = sorted({int(x) for x in args.missing.split(",") if x.strip()})
    except ValueError:
        return _usage_fail(f"cannot parse --missing {args.missing!r}")
    if not missing:
        return _usage_fail("--missing must name at least one party")
    if not all(2 <= i <= n for i in missing):
        return _usage_fail(f"--missing parties must lie in 2..{n}")
    known = sorted(set(range(2, n + 1)) - set(missing))

    seed = _pick_seed(args)
    rng = np.random.default_rng(seed)
    uniform = (Fraction(1, d),) * d
    start = time.perf_counter()

    rounds_ok = True
    posterior = [str(f) for f in uniform]
    for _ in range(args.rounds):
        cat = tuple(int(x) for x in rng.integers(0, d, n))
        bells = tuple((int(v), int(vp)) for v, vp in rng.integers(0, d, (n, 2)))
        config = ProtocolConfig(d, n, cat, bells, seed=seed)
        transcript = run_round(config, engine="symbolic", rng=rng)
        result = collusion_posterior(d, transcript, known)
        posterior = [str(f) for f in result]
        rounds_ok &= result == uniform

    oracle = None
    if args.oracle:
        size = d ** (3 * n)
        branch_count = (d * d) ** n
        if size > MAX_AMPLITUDES or branch_count > MAX_ORACLE_BRANCHES:
            return _usage_fail(
                f"refusing oracle enumeration: {size} amplitudes / "
                f"{branch_count} branches exceed the caps "
                f"({MAX_AMPLITUDES} / {MAX_ORACLE_BRANCHES})")
        cat = tuple(int(x) for x in rng.integers(0, d, n))
        bells = tuple((int(v), int(vp)) for v, vp in rng.integers(0, d, (n, 2)))
        config = ProtocolConfig(d, n, cat, bells, seed=seed)
        branches = enumerate_oracle_branches(config)
        classes: dict[tuple, list[int]] = {}
        for branch in branches:
            view = (branch.announced,
                    tuple(branch.outcomes[i - 1] for i in known))
            classes.setdefault(view, []).append(branch.key[0])
        balanced = all(
            all(firsts.count(w) * d == len(firsts) for w in range(d))
            for firsts in classes.values())
        oracle = {"branches": len(branches), "view_classes": len(classes),
                  "balanced": balanced}
    elapsed = time.perf_counter() - start

    ok = rounds_ok and (oracle is None or oracle["balanced"])
    report = {
        "command": "collude",
        "parameters": {"d": d, "n": n, "missing": missing, "known": known,
                       "rounds": args.rounds, "seed": seed,
                       "oracle": bool(args.oracle)},
        "posterior": posterior,
        "uniform": rounds_ok,
        "oracle": oracle,
        "ok": ok,
    }
    lines = [f"collude: d={d} n={n} missing={missing} known={known} seed={seed}"]
    lines.append(f"  posterior over first key dit: [{', '.join(posterior)}]")
    lines.append(f"  exactly uniform across {args.rounds} random rounds: "
                 f"{'PASS' if rounds_ok else 'FAIL'}")
    if oracle:
        lines.append(f"  oracle: {oracle['branches']} branches in "
                     f"{oracle['view_classes']} view classes, balanced first "
                     f"dit: {'PASS' if oracle['balanced'] else 'FAIL'}")
    lines.append(f"{'all checks passed' if ok else 'CHECKS FAILED'} "
                 f"({elapsed:.2f}s)")
    _emit(report, args.json, lines)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditswap",
        description="Qudit entanglement-swapping toolkit: identity "
                    "verification, secret-sharing rounds, collusion analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check swap rewrites against the dense engine")
    p.add_argument("--d", type=int, default=2, help="qudit dimension (2..16)")
    p.add_argument("--n", type=int, default=3, help="cat-state size for cat rules")
    p.add_argument("--rule", choices=RULES + ("all",), default="all")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true",
                       help="all label tuples (default)")
    group.add_argument("--samples", type=int, default=None,
                       help="random label tuples instead of all of them")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", metavar="PATH", default=None,
                   help="write a machine report to PATH, or - for stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("protocol", help="run secret-sharing rounds")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=3, help="party count (>= 2)")
    p.add_argument("--rounds", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--engine", choices=("symbolic", "statevector"),
                   default="symbolic")
    p.add_argument("--labels", default="zero",
                   help="zero, random, or a JSON file with cat_labels/bell_labels")
    p.add_argument("--json", metavar="PATH", default=None,
                   help="write transcripts and stats to PATH, or - for stdout")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("collude", help="posterior of the first key dit for a subset")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--missing", required=True,
                   help="comma-separated parties (2..n) outside the collusion")
    p.add_argument("--rounds", type=int, default=10,
                   help="random rounds to evaluate the posterior on")
    p.add_argument("--oracle", action="store_true",
                   help="exhaustive dense-engine branch confirmation")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", metavar="PATH", default=None)
    p.set_defaults(func=cmd_collude)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
