"""``nbcrit`` command line: build, ramify, nbtest, rhov, verify.

Exit codes: 0 pass, 1 mathematical violation, 2 inconclusive, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .galois import ExtensionError, validate_extension
from .localfield import FieldError
from .normalbasis import INCONCLUSIVE as NB_INCONCLUSIVE
from .normalbasis import InconclusiveError, PreconditionError, construct_rho_v, sweep_class
from .ramification import StructuralError, check_hypothesis, compute_filtration, structural_checks
from .scenario import ScenarioError, builtin_scenario, load_scenario
from .suites import FAIL, INCONCLUSIVE, PASS, aggregate, run_suite

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_INVALID = 3


def _base_report(verb, sc, N, data) -> dict:
    report = {
        "tool": "nbcrit",
        "version": __version__,
        "verb": verb,
        "scenario": sc.to_json(),
        "precision": {
            "arithmetic": "exact",
            "digits": sc.run.precision,
            "cap": sc.run.precision_cap,
        },
        "field": N.ground.describe(),
        "extension": N.describe(),
    }
    if data is not None:
        report["ramification"] = data.to_json()
    return report


def cmd_build(sc, args):
    N = sc.build()
    rep = validate_extension(N)
    out = _base_report("build", sc, N, None)
    out["validation"] = rep.to_json()
    out["uniformizer_search"] = N.uniformizer_log
    return out, PASS if rep.ok else FAIL


def cmd_ramify(sc, args):
    N = sc.build()
    data = compute_filtration(N)
    checks = structural_checks(data, N, sc.run.seed)
    out = _base_report("ramify", sc, N, data)
    out["structural_checks"] = [c.to_json() for c in checks]
    out["hypothesis"] = check_hypothesis(data).to_json()
    return out, PASS if all(c.ok for c in checks) else FAIL


def cmd_nbtest(sc, args):
    N = sc.build()
    data = compute_filtration(N)
    trials = sc.run.trials if args.trials is None else args.trials
    seed = sc.run.seed if args.seed is None else args.seed
    rep = sweep_class(N, args.valuation, trials, seed, data, sc.run.digits)
    out = _base_report("nbtest", sc, N, data)
    out["sweep"] = rep.to_json()
    out["seed"] = seed
    if rep.tallies[NB_INCONCLUSIVE]:
        verdict = INCONCLUSIVE
    elif rep.violations:
        verdict = FAIL
    else:
        verdict = PASS
    return out, verdict


def cmd_rhov(sc, args):
    N = sc.build()
    data = compute_filtration(N)
    cert = construct_rho_v(N, args.valuation, data, sc.run.precision)
    out = _base_report("rhov", sc, N, data)
    out["certificate"] = cert.to_json(sc.run.digits)
    return out, PASS if cert.ok else FAIL


def cmd_verify(sc, args):
    N = sc.build()
    data = compute_filtration(N)
    if args.suite == "lemma3" and N.n < 2:
        raise PreconditionError("lemma3 needs a noncyclic extension (n >= 2)")
    seed = sc.run.seed if args.seed is None else args.seed
    trials = sc.run.trials if args.trials is None else args.trials
    results = run_suite(args.suite, N, data, seed, trials, sc.run.digits)
    out = _base_report("verify", sc, N, data)
    out["suites"] = [r.to_json() for r in results]
    return out, aggregate(results)


COMMANDS = {
    "build": cmd_build,
    "ramify": cmd_ramify,
    "nbtest": cmd_nbtest,
    "rhov": cmd_rhov,
    "verify": cmd_verify,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nbcrit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nbcrit {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", type=Path, help="scenario .ini file or built-in scenario name")
    common.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    sub.add_parser("build", parents=[common], help="build and validate N/K")
    sub.add_parser("ramify", parents=[common], help="ramification breaks and structural checks")
    p = sub.add_parser("nbtest", parents=[common], help="normal basis sweep of one valuation class")
    p.add_argument("--valuation", type=int, required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p = sub.add_parser("rhov", parents=[common], help="trace-zero non-generator of a given valuation")
    p.add_argument("--valuation", type=int, required=True)
    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", choices=["lemma2", "lemma3", "hasse-arf", "theorem1", "all"], default="all")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    return parser


def run(argv=None) -> tuple[dict, int, Path | None]:
    """Parse ``argv``, execute, and return ``(report, exit_code, out_path)``."""
    args = make_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        sc = load_scenario(args.scenario) if args.scenario.exists() else builtin_scenario(str(args.scenario))
        if getattr(args, "trials", None) is not None and args.trials < 0:
            raise ScenarioError("--trials must be non-negative")
        report, verdict = COMMANDS[args.verb](sc, args)
        code = EXIT[verdict]
    except (ScenarioError, FieldError, ExtensionError, PreconditionError) as exc:
        report = {"tool": "nbcrit", "version": __version__, "verb": args.verb,
                  "error": {"kind": type(exc).__name__, "message": str(exc)}}
        layer = getattr(exc, "layer", None)
        if layer is not None:
            report["error"]["layer"] = layer
            report["error"]["relation"] = exc.relation
        verdict, code = "invalid", EXIT_INVALID
    except StructuralError as exc:
        report = {"tool": "nbcrit", "version": __version__, "verb": args.verb,
                  "error": {"kind": "StructuralError", "message": str(exc)}}
        verdict, code = FAIL, EXIT[FAIL]
    except InconclusiveError as exc:
        report = {"tool": "nbcrit", "version": __version__, "verb": args.verb,
                  "error": {"kind": "InconclusiveError", "message": str(exc)}}
        verdict, code = INCONCLUSIVE, EXIT[INCONCLUSIVE]
    report["verdict"] = verdict
    report["exit_code"] = code
    report["wall_time"] = round(time.perf_counter() - start, 3)
    return report, code, args.out


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str)


def main(argv=None) -> int:
    report, code, out = run(argv)
    text = dumps(report)
    if out is not None:
        out.write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
