"""Command-line entry point ``povm-realism``.

Exit status: 0 on success, 2 on invalid input, 1 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import bell, macroreal as mr, selftest, states, sweep
from .errors import ValidationError
from .macroreal import PrecessionSpec
from .states import QubitState

SEED_ENV = "POVM_REALISM_SEED"
MR_QUANTITIES = ("lgi", "wlgi1", "wlgi2", "nsit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _h(x) -> str:
    return "none" if x is None else f"{x:.6g}"


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _json_arg(text: str, name: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--{name} must be a JSON array: {exc}") from None


def _state(args) -> states.TwoQubitState:
    if args.random:
        return states.random_state(_seed(args))
    if args.rvec or args.svec or args.tmat:
        rvec = _json_arg(args.rvec or "[0,0,0]", "rvec")
        svec = _json_arg(args.svec or "[0,0,0]", "svec")
        tmat = _json_arg(args.tmat or "[[0,0,0],[0,0,0],[0,0,0]]", "tmat")
        return states.from_hilbert_schmidt(rvec, svec, tmat)
    return {
        "singlet": states.singlet,
        "mixed": states.maximally_mixed,
        "product": states.product_zero,
    }[args.state]()


def _emit(args, payload: dict, human: str) -> None:
    text = json.dumps(payload, sort_keys=True) + "\n" if args.format == "json" else human + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands -------------------------------------------------------------------


def cmd_chsh_max(args) -> int:
    st = _state(args)
    analytic = bell.chsh_analytic_max(st, args.lam, args.gamma)
    numeric = bell.chsh_numeric_max(st, args.lam, args.gamma, budget=args.budget, seed=_seed(args))
    exact = bell.chsh_exact_max(st, args.lam, args.gamma, seed=_seed(args))
    payload = {
        "lambda": args.lam, "gamma": args.gamma, "state": st.to_dict(),
        "analytic": analytic.value, "numeric": numeric.value, "exact": exact.value,
        "evaluations": numeric.evaluations, "analytic_settings": analytic.settings.to_dict(),
    }
    _emit(args, payload, f"analytic={_h(analytic.value)} numeric={_h(numeric.value)} exact={_h(exact.value)}")
    return 0


def cmd_chsh_test(args) -> int:
    st = _state(args)
    crit, violated = bell.violates_chsh(st, args.lam, args.gamma)
    payload = {"lambda": args.lam, "gamma": args.gamma, "state": st.to_dict(),
               "criterion": crit, "violated": violated}
    _emit(args, payload, f"criterion={crit:.4f}, violated={'true' if violated else 'false'}")
    return 0


def cmd_verify_corollary(args) -> int:
    t0 = time.perf_counter()
    report = bell.verify_corollary(args.samples, seed=_seed(args), step=args.step)
    print(f"scanned in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    lines = [
        f"samples={report.samples} filtered={report.filtered} cells={report.cells} "
        f"counterexamples={report.counterexamples} max_criterion={_h(report.max_criterion)}"
    ]
    lines += [f"  {name}: {count}" for name, count in report.case_counts.items()]
    _emit(args, report.to_dict(), "\n".join(lines))
    return 0


def cmd_mr(args) -> int:
    if args.quantity not in MR_QUANTITIES:
        raise ValidationError(f"--quantity must be one of {', '.join(MR_QUANTITIES)}")
    initial, spec = sweep.default_scenario(args.quantity).initial, sweep.default_scenario(args.quantity).spec
    if args.r is not None or args.theta is not None or args.phi is not None:
        initial = QubitState(
            args.r if args.r is not None else initial.r,
            args.theta if args.theta is not None else initial.theta,
            args.phi if args.phi is not None else initial.phi,
        )
    if args.omega_dt is not None:
        spec = PrecessionSpec(args.omega_dt)
    scores = mr.mr_scores(initial, spec, args.lam, args.gamma)
    value = getattr(scores, "k_" + args.quantity)
    payload = {
        "quantity": args.quantity, "lambda": args.lam, "gamma": args.gamma,
        "r": initial.r, "theta": initial.theta, "phi": initial.phi, "omega_dt": spec.omega_dt,
        "value": value, **scores.to_dict(),
    }
    _emit(args, payload, _h(value))
    return 0


def cmd_sweep(args) -> int:
    fmt = "json" if args.format == "json" else "csv"
    scenario = sweep.default_scenario(args.quantity, _state(args) if args.quantity == "chsh" else None)
    grid = sweep.sweep_region(args.quantity, scenario, args.step)
    if args.output:
        path = args.output
    else:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, sweep.default_filename(args.quantity, args.step, fmt))
    sweep.emit(grid, fmt, path)
    print(f"{path}: {int(grid.valid.sum())} valid cells, {int(grid.violated.sum())} violated")
    return 0


def cmd_threshold(args) -> int:
    scenario = sweep.default_scenario(args.quantity, _state(args) if args.quantity == "chsh" else None)
    if args.global_min:
        gm = sweep.global_min_lambda(args.quantity, scenario, gamma_step=args.gamma_step)
        payload = {"quantity": args.quantity, "lambda_star": None if gm is None else gm.lambda_star,
                   "gammas": [] if gm is None else list(gm.gammas)}
        human = "none" if gm is None else f"{_h(gm.lambda_star)} at gamma={', '.join(_h(g) for g in gm.gammas)}"
        _emit(args, payload, human)
        return 0
    if args.gamma is not None:
        gammas = [args.gamma]
    else:
        gammas = sweep.gamma_range(args.gamma_min, args.gamma_max, args.gamma_step)
    curve = sweep.threshold_curve(args.quantity, gammas, scenario)
    if args.format == "csv":
        text = sweep.render(curve, "csv")
    elif args.format == "json":
        text = sweep.render(curve, "json")
    elif len(curve.points) == 1:
        text = _h(curve.points[0].lambda_star) + "\n"
    else:
        text = "".join(f"{_h(p.gamma)} {_h(p.lambda_star)}\n" for p in curve.points)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = selftest.run_all(_seed(args))
    ok = True
    for res in results:
        print(f"{res.name}: {res.passed}/{res.total} passed")
        for label in res.failures[:5]:
            print(f"  FAIL {label}")
        ok &= not res.failures
    print(f"selftest {'passed' if ok else 'FAILED'} in {time.perf_counter() - t0:.1f}s")
    return 0 if ok else 1


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("human", "json", "csv"), default="human")
    common.add_argument("--output", default=None, help="write results here instead of stdout")

    state = _Parser(add_help=False)
    state.add_argument("--state", choices=("singlet", "mixed", "product"), default="singlet")
    state.add_argument("--rvec", help="JSON array, Alice's local Bloch vector")
    state.add_argument("--svec", help="JSON array, Bob's local Bloch vector")
    state.add_argument("--tmat", help="JSON 3x3 array, correlation matrix (row-major)")
    state.add_argument("--random", action="store_true", help="seeded random state (see --seed)")

    params = _Parser(add_help=False)
    params.add_argument("--lambda", dest="lam", type=float, required=True, help="sharpness")
    params.add_argument("--gamma", type=float, default=0.0, help="biasedness")

    quantities = [q.value for q in sweep.Quantity]

    parser = _Parser(prog="povm-realism", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("chsh-max", parents=[common, state, params], help="analytic and numeric CHSH maxima")
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_chsh_max)

    p = sub.add_parser("chsh-test", parents=[common, state, params], help="CHSH violation criterion")
    p.set_defaults(func=cmd_chsh_test)

    p = sub.add_parser("verify-corollary", parents=[common], help="random-state check of the M <= 1 corollary")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_verify_corollary)

    p = sub.add_parser("mr", parents=[common, params], help="LGI / WLGI / NSIT score")
    p.add_argument("--quantity", choices=MR_QUANTITIES, required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--omega-dt", dest="omega_dt", type=float)
    p.set_defaults(func=cmd_mr)

    p = sub.add_parser("sweep", parents=[common, state], help="violation region over (lambda, gamma)")
    p.add_argument("--quantity", choices=quantities, required=True)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", parents=[common, state], help="minimal sharpness for violation")
    p.add_argument("--quantity", choices=quantities, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma-min", type=float, default=-1.0)
    p.add_argument("--gamma-max", type=float, default=1.0)
    p.add_argument("--gamma-step", type=float, default=0.01)
    p.add_argument("--global", dest="global_min", action="store_true",
                   help="minimum over all gamma instead of a curve")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 2
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
