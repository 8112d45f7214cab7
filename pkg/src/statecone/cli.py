"""Command-line entry point.

Every run prints a single JSON report with the command, the effective
configuration (including seeds and tolerances), the results payload and,
for suites, a pass flag.  Identical configurations reproduce identical
reports.  Exit codes: 0 success or suite pass, 1 suite failure, 2 usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import algebras as alg
from . import boxes as bx
from . import bregman as br
from . import entropy as en
from . import multipartite as mp
from . import serialize as sz
from . import states as st

LN2 = math.log(2.0)


class CliError(Exception):
    """Input or usage problem; maps to exit code 2."""


def _scrub(value):
    """Make a payload JSON-clean: tuples to lists, numpy to python,
    non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _scrub(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_scrub(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return _scrub(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _emit(report: dict, pretty: bool) -> None:
    indent = 2 if pretty else None
    print(json.dumps(_scrub(report), sort_keys=True, indent=indent))


def _report(command: str, config: dict, results, passed=None) -> dict:
    doc = {
        "command": command,
        "config": _scrub(config),
        "results": _scrub(results),
        "version": __version__,
    }
    if passed is not None:
        doc["pass"] = bool(passed)
    return doc


def _load(path: str):
    try:
        return sz.load_json(path)
    except FileNotFoundError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            f"malformed JSON in {path} at line {exc.lineno}, "
            f"column {exc.colno}: {exc.msg}"
        ) from exc


def _generator(name: str) -> br.BregmanGenerator:
    factories = {
        "neg-entropy": br.neg_entropy,
        "trace-power-2": lambda: br.trace_power(2),
        "trace-power-3": lambda: br.trace_power(3),
    }
    if name not in factories:
        raise CliError(
            f"unknown generator {name!r}; pick one of {sorted(factories)}"
        )
    return factories[name]()


def _maybe_bits(value: float, bits: bool) -> float:
    if not bits or not math.isfinite(value):
        return value
    return value / LN2


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_entropy(args) -> int:
    state = sz.state_from_json(_load(args.state))
    report = en.fine_grained_entropy_bound(
        state, n_samples=args.samples, seed=args.seed
    )
    values = report.as_dict()
    if args.bits:
        for key in ("spectral", "decomposition", "fine_grained_upper",
                    "fine_grained_lower"):
            values[key] = values[key] / LN2
    _emit(
        _report(
            "entropy",
            {"state": args.state, "samples": args.samples,
             "seed": args.seed, "bits": args.bits},
            values,
        ),
        args.pretty,
    )
    return 0


def _cmd_divergence(args) -> int:
    rho = sz.state_from_json(_load(args.rho))
    sigma = sz.state_from_json(_load(args.sigma))
    F = _generator(args.generator)
    value = br.bregman_divergence(F, rho, sigma)
    _emit(
        _report(
            "divergence",
            {"rho": args.rho, "sigma": args.sigma,
             "generator": args.generator, "bits": args.bits},
            {"divergence": _maybe_bits(value, args.bits)},
        ),
        args.pretty,
    )
    return 0


def _parse_labels(raw: str) -> list[str]:
    labels = [part.strip() for part in raw.split(",") if part.strip()]
    if not labels:
        raise CliError(f"empty label set {raw!r}")
    return labels


def _partitioned(path: str) -> mp.PartitionedState:
    state = sz.state_from_json(_load(path))
    if state.layout is None:
        raise CliError("the state file carries no composite layout")
    labels = tuple(
        chr(ord("A") + i) for i in range(len(state.layout.factors))
    )
    return mp.PartitionedState(state, labels)


def _cmd_mi(args) -> int:
    pstate = _partitioned(args.state)
    F = _generator(args.generator)
    value = mp.mutual_information(
        F, pstate, _parse_labels(args.a), _parse_labels(args.b)
    )
    _emit(
        _report(
            "mi",
            {"state": args.state, "a": args.a, "b": args.b,
             "generator": args.generator, "bits": args.bits},
            {"mutual_information": _maybe_bits(value, args.bits)},
        ),
        args.pretty,
    )
    return 0


def _cmd_cmi(args) -> int:
    pstate = _partitioned(args.state)
    F = _generator(args.generator)
    report = mp.conditional_mutual_information(
        F, pstate, _parse_labels(args.a), _parse_labels(args.b),
        _parse_labels(args.c),
    )
    payload = report.as_dict()
    if args.bits and report.defined:
        payload["value"] = payload["value"] / LN2
        payload["components"] = [c / LN2 for c in payload["components"]]
    _emit(
        _report(
            "cmi",
            {"state": args.state, "a": args.a, "b": args.b, "c": args.c,
             "generator": args.generator, "bits": args.bits},
            payload,
        ),
        args.pretty,
    )
    return 0


_SUITES = ("mono", "suff", "local", "identity", "additivity", "marginal",
           "separoid", "dpi")


def _cmd_suite(args) -> int:
    algebra, layout = sz.parse_algebra_spec(args.algebra)
    F = _generator(args.generator)
    tol = args.tol

    def need_layout(n_factors=None):
        if layout is None:
            raise CliError(
                f"property {args.property!r} needs a composite algebra "
                f"spec such as C2x2"
            )
        if n_factors is not None and len(layout.factors) != n_factors:
            raise CliError(
                f"property {args.property!r} needs {n_factors} factors"
            )

    if args.property == "mono":
        verdicts = {"monotonicity": br.check_monotonicity(
            F, algebra, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    elif args.property == "suff":
        verdicts = {"sufficiency": br.check_sufficiency(
            F, algebra, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    elif args.property == "local":
        verdicts = {"statistical-locality": br.check_statistical_locality(
            F, algebra, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    elif args.property == "identity":
        verdicts = {"bregman-identity": br.check_identity(
            F, algebra, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-9,
        )}
    elif args.property == "additivity":
        need_layout(2)
        verdicts = {"additivity": mp.run_additivity_suite(
            F, layout, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    elif args.property == "marginal":
        need_layout(2)
        verdicts = {"marginal-identity": mp.run_marginal_identity_suite(
            F, layout, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    elif args.property == "separoid":
        need_layout(4)
        verdicts = mp.check_separoid(
            F, layout.embedding, layout.sizes,
            n_trials=args.trials, seed=args.seed,
        )
    elif args.property == "dpi":
        need_layout(2)
        verdicts = {"data-processing": mp.run_dpi_suite(
            F, layout, n_trials=args.trials, seed=args.seed,
            tol=tol if tol is not None else 1e-8,
        )}
    else:
        raise CliError(f"unknown property {args.property!r}")

    passed = all(v.passed for v in verdicts.values())
    _emit(
        _report(
            "suite",
            {"property": args.property, "generator": args.generator,
             "algebra": args.algebra, "trials": args.trials,
             "seed": args.seed, "tol": tol},
            {key: v.as_dict() for key, v in verdicts.items()},
            passed=passed,
        ),
        args.pretty,
    )
    return 0 if passed else 1


def _cmd_explore(args) -> int:
    report = br.explore_additivity_conjecture(
        n_generators=args.generators,
        n_trials=args.trials,
        seed=args.seed,
    )
    _emit(
        _report(
            "explore",
            {"generators": args.generators, "trials": args.trials,
             "seed": args.seed},
            report,
        ),
        args.pretty,
    )
    return 0


def _cmd_chsh(args) -> int:
    if args.box == "pr":
        box = bx.pr_box()
        results = {"chsh": bx.chsh_value(box)}
    elif args.box == "white":
        box = bx.white_noise_box()
        results = {"chsh": bx.chsh_value(box)}
    elif args.box == "deterministic":
        import itertools

        values = [
            bx.chsh_value(bx.deterministic_box(fa, fb))
            for fa in itertools.product((0, 1), repeat=2)
            for fb in itertools.product((0, 1), repeat=2)
        ]
        box = None
        results = {"chsh": max(values), "all_values": values}
    elif args.box == "quantum-opt":
        value, strategy = bx.maximize_quantum_chsh(
            seed=args.seed, restarts=args.restarts
        )
        box = bx.box_from_quantum(strategy)
        results = {
            "chsh": value,
            "alice_angles": list(strategy.alice_angles),
            "bob_angles": list(strategy.bob_angles),
        }
    else:
        raise CliError(f"unknown box {args.box!r}")
    if box is not None:
        results["no_signaling_residual"] = box.no_signaling_residual()
        if args.table:
            results["table"] = box.table.tolist()
    _emit(
        _report(
            "chsh",
            {"box": args.box, "seed": args.seed, "restarts": args.restarts},
            results,
        ),
        args.pretty,
    )
    return 0


def _cmd_audit_example1(args) -> int:
    audit = st.real_embedding_dimension_audit(
        n_samples=args.samples, seed=args.seed
    )
    _emit(
        _report(
            "audit-example1",
            {"samples": args.samples, "seed": args.seed},
            audit,
            passed=(audit["ambient_state_dim"] == 9
                    and audit["product_slice_dim"] == 8),
        ),
        args.pretty,
    )
    return 0 if audit == {"ambient_state_dim": 9, "product_slice_dim": 8} \
        else 1


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statecone",
        description="entropy, divergences and information quantities on "
                    "Jordan-algebra state spaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", default=True,
                       help="emit a JSON report (the default)")
        p.add_argument("--pretty", action="store_true",
                       help="indent the JSON report")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("entropy", help="entropy report for a state file")
    common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--bits", action="store_true",
                   help="report in bits instead of nats")
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("divergence", help="divergence between two states")
    common(p)
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--generator", default="neg-entropy")
    p.add_argument("--bits", action="store_true")
    p.set_defaults(func=_cmd_divergence)

    p = sub.add_parser("mi", help="mutual information between label sets")
    common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--a", required=True, help="comma-separated labels")
    p.add_argument("--b", required=True)
    p.add_argument("--generator", default="neg-entropy")
    p.add_argument("--bits", action="store_true")
    p.set_defaults(func=_cmd_mi)

    p = sub.add_parser("cmi", help="conditional mutual information")
    common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--generator", default="neg-entropy")
    p.add_argument("--bits", action="store_true")
    p.set_defaults(func=_cmd_cmi)

    p = sub.add_parser("suite", help="randomized property suite")
    common(p)
    p.add_argument("--property", required=True, choices=_SUITES)
    p.add_argument("--generator", default="neg-entropy")
    p.add_argument("--algebra", default="C3",
                   help="algebra spec, e.g. C2, R4, H2, S3, P4, C2x4")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tol", type=float, default=None,
                   help="override the property's default tolerance")
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("explore", help="monotone-vs-additive generator scan")
    common(p)
    p.add_argument("--generators", type=int, default=50)
    p.add_argument("--trials", type=int, default=40)
    p.set_defaults(func=_cmd_explore)

    p = sub.add_parser("chsh", help="CHSH value of a named box")
    common(p)
    p.add_argument("--box", required=True,
                   choices=("pr", "white", "deterministic", "quantum-opt"))
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--table", action="store_true",
                   help="include the full probability table")
    p.set_defaults(func=_cmd_chsh)

    p = sub.add_parser(
        "audit-example1",
        help="affine dimensions of the 4x4 real body vs its product slice",
    )
    common(p)
    p.add_argument("--samples", type=int, default=80)
    p.set_defaults(func=_cmd_audit_example1)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except (sz.FormatError, alg.AlgebraMismatchError,
            st.StateValidationError, st.UnsupportedAlgebraError,
            mp.OverlapError, ValueError, KeyError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
