"""Command-line interface.

Subcommands::

    weakmeas predict <scenario.json> [--regime auto|aav|general|orthogonal]
    weakmeas exact <scenario.json> [--series-order N] [--densities FILE.csv]
    weakmeas sterngerlach [--lambdas 0.05,0.1,0.2,0.4] [--steps N]
    weakmeas figure2 --wv RE,IM --g G [--delta_q D]

Common flags: ``--grid-n`` (power-of-two working grid size),
``--series-order`` (truncated-expansion order where meaningful) and
``--out`` (write the primary output to a file instead of stdout).

Exit codes: 0 on success; 1 for unusable input (CLI usage, file or JSON
errors -- diagnostics name the offending key on stderr); 2 for scenarios
that are valid but outside the requested regime (orthogonal selections fed
to a non-orthogonal predictor, vanishing post-selection probability, ...),
reported as a machine-readable JSON error object on stdout. Runs are
deterministic: identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ParseError, WeakMeasurementError
from .oracle import evolve_postselect, series_device_state
from .pointer import GaussianPointer, gaussian_profile
from .predictor import (
    SGParams,
    predict_aav,
    predict_general,
    predict_orthogonal,
    predict_orthogonal_gaussian,
    sg_optimum,
    stern_gerlach_outcome,
)
from .qops import overlap
from .scenario import (
    load_scenario,
    scenario_with_orthogonal_weak_value,
    scenario_with_weak_value,
    validate_grid_n,
    validate_series_order,
)
from .weak_values import ORTH_THRESHOLD, orthogonal_weak_value, weak_value

__all__ = ["build_parser", "main"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _grid_n_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    try:
        return validate_grid_n(value, "value")
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _series_order_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    try:
        return validate_series_order(value, "value")
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _complex_arg(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected RE,IM (two comma-separated numbers), got {text!r}"
        )
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in RE,IM, got {text!r}")


def _lambdas_arg(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one lambda value")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="weakmeas",
        description="Weak-measurement pointer statistics: exact evolution, "
        "perturbative predictions, amplification curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument(
        "--grid-n",
        type=_grid_n_arg,
        default=None,
        help="working grid size (power of two >= 64)",
    )
    common.add_argument(
        "--out", default=None, help="write the primary output to this file"
    )

    p_predict = sub.add_parser(
        "predict",
        parents=[common],
        help="closed-form pointer-shift prediction for a scenario file",
    )
    p_predict.add_argument("scenario", help="scenario JSON file")
    p_predict.add_argument(
        "--regime",
        choices=("auto", "aav", "general", "orthogonal"),
        default="auto",
        help="which prediction formula to apply (auto routes on the overlap)",
    )
    p_predict.set_defaults(func=_cmd_predict)

    p_exact = sub.add_parser(
        "exact",
        parents=[common],
        help="exact post-selected evolution for a scenario file",
    )
    p_exact.add_argument("scenario", help="scenario JSON file")
    p_exact.add_argument(
        "--series-order",
        type=_series_order_arg,
        default=None,
        help="also evaluate the truncated expansion at this order",
    )
    p_exact.add_argument(
        "--densities",
        default=None,
        help="write outgoing q/p densities to this CSV file",
    )
    p_exact.set_defaults(func=_cmd_exact)

    p_sg = sub.add_parser(
        "sterngerlach",
        parents=[common],
        help="closed-form Stern-Gerlach amplification curves",
    )
    p_sg.add_argument(
        "--lambdas",
        type=_lambdas_arg,
        default=[0.05, 0.1, 0.2, 0.4],
        help="comma-separated coupling values (default 0.05,0.1,0.2,0.4)",
    )
    p_sg.add_argument(
        "--steps", type=int, default=400, help="number of alpha intervals over [0, pi]"
    )
    p_sg.set_defaults(func=_cmd_sterngerlach)

    p_fig = sub.add_parser(
        "figure2",
        parents=[common],
        help="outgoing pointer profiles for matched orthogonal and "
        "non-orthogonal scenarios with a requested weak value",
    )
    p_fig.add_argument(
        "--wv", type=_complex_arg, required=True, help="target weak value as RE,IM"
    )
    p_fig.add_argument("--g", type=float, required=True, help="coupling strength")
    p_fig.add_argument(
        "--delta_q", type=float, default=1.0, help="Gaussian pointer width (default 1)"
    )
    p_fig.set_defaults(func=_cmd_figure2)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _prediction_payload(pred) -> dict:
    peaks = None
    if pred.peaks_q is not None and pred.peaks_p is not None:
        peaks = {"q": list(pred.peaks_q), "p": list(pred.peaks_p)}
    return {
        "regime": pred.regime,
        "delta_q": pred.delta_q,
        "delta_p": pred.delta_p,
        "var_q_out": pred.var_q_out,
        "var_p_out": pred.var_p_out,
        "denominator_C": pred.denominator_c,
        "peaks": peaks,
        "margins": {"weak_interaction": pred.margin_weak, "aav": pred.margin_aav},
    }


def _cmd_predict(args) -> int:
    sc, options = load_scenario(args.scenario)
    orth = options.orth_threshold if options.orth_threshold is not None else ORTH_THRESHOLD
    regime = args.regime
    label = None
    if regime == "auto":
        if overlap(sc.post, sc.pre) > orth:
            pred = predict_general(
                sc.observable, sc.pre, sc.post, sc.g, sc.pointer, orth_threshold=orth
            )
            # Within linear response the second-order evaluation coincides
            # with the first-order formula; label it so callers know.
            if pred.margin_aav is not None and pred.margin_aav < 0.01:
                label = "aav-compatible general"
        else:
            pred = predict_orthogonal(
                sc.observable, sc.pre, sc.post, sc.g, sc.pointer, orth_threshold=orth
            )
    elif regime == "aav":
        pred = predict_aav(sc.observable, sc.pre, sc.post, sc.g, sc.pointer, orth_threshold=orth)
    elif regime == "general":
        pred = predict_general(
            sc.observable, sc.pre, sc.post, sc.g, sc.pointer, orth_threshold=orth
        )
    elif isinstance(sc.pointer, GaussianPointer):
        pred = predict_orthogonal_gaussian(
            sc.observable, sc.pre, sc.post, sc.g, sc.pointer.delta_q, orth_threshold=orth
        )
    else:
        pred = predict_orthogonal(
            sc.observable, sc.pre, sc.post, sc.g, sc.pointer, orth_threshold=orth
        )
    payload = _prediction_payload(pred)
    if label is not None:
        payload["regime"] = label
    _emit_json(payload, args.out)
    return 0


def _densities_csv(rec) -> str:
    """CSV of the record's densities; the orders of magnitude involved
    require full float precision (17 significant digits)."""
    lines = ["coord,q_density,p_coord,p_density"]
    q = rec.q_density.coords
    p = rec.p_density.coords
    for i in range(q.size):
        lines.append(
            f"{q[i]:.17g},{rec.q_density.values[i]:.17g},"
            f"{p[i]:.17g},{rec.p_density.values[i]:.17g}"
        )
    return "\n".join(lines) + "\n"


def _cmd_exact(args) -> int:
    sc, options = load_scenario(args.scenario)
    grid_n = args.grid_n if args.grid_n is not None else options.grid_n
    rec = evolve_postselect(sc, grid_n=grid_n)
    payload = {
        "method": rec.method,
        "success_prob": rec.success_prob,
        "delta_q": rec.delta_q,
        "delta_p": rec.delta_p,
        "var_q_out": rec.var_q_out,
        "var_p_out": rec.var_p_out,
        "grid_points": int(rec.q_density.coords.size),
    }
    series_order = (
        args.series_order if args.series_order is not None else options.series_order
    )
    if series_order is not None:
        srec = series_device_state(sc, series_order, grid_n=grid_n)
        payload["series"] = {
            "order": srec.series_order,
            "success_prob": srec.success_prob,
            "delta_q": srec.delta_q,
            "delta_p": srec.delta_p,
            "var_q_out": srec.var_q_out,
            "var_p_out": srec.var_p_out,
            "tail_estimate": srec.tail_estimate,
        }
    if args.densities is not None:
        _emit(_densities_csv(rec), args.densities)
    _emit_json(payload, args.out)
    return 0


def _cmd_sterngerlach(args) -> int:
    if args.steps < 1:
        raise ParseError(f"--steps: expected a positive integer, got {args.steps}")
    lambdas = args.lambdas
    lines = []
    for lam in lambdas:
        SGParams(alpha=0.0, lmbda=lam)  # range-check (and warn) once per lambda
        alpha_opt, outcome_max = sg_optimum(lam)
        lines.append(
            f"# lambda={lam:g} alpha_opt={alpha_opt:.17g} outcome_max={outcome_max:.17g}"
        )
    lines.append("alpha," + ",".join(f"outcome_{lam:g}" for lam in lambdas))
    steps = args.steps
    for i in range(steps + 1):
        alpha = np.pi * i / steps
        row = [f"{alpha:.17g}"]
        for lam in lambdas:
            row.append(f"{stern_gerlach_outcome(SGParams(alpha=alpha, lmbda=lam)):.17g}")
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_figure2(args) -> int:
    if not (args.delta_q > 0.0):
        raise ParseError(f"--delta_q: expected a positive width, got {args.delta_q}")
    target = args.wv
    sc_orth = scenario_with_orthogonal_weak_value(target, args.g, args.delta_q)
    sc_non = scenario_with_weak_value(target, args.g, args.delta_q)
    rec_orth = evolve_postselect(sc_orth, grid_n=args.grid_n)
    rec_non = evolve_postselect(sc_non, grid_n=args.grid_n)

    achieved_orth = orthogonal_weak_value(sc_orth.observable, sc_orth.pre, sc_orth.post).value
    achieved_non = weak_value(sc_non.observable, sc_non.pre, sc_non.post).value

    dq_w = args.delta_q
    dp_w = 1.0 / (2.0 * dq_w)
    q = rec_orth.q_density.coords
    p = rec_orth.p_density.coords
    init_q = gaussian_profile(q, dq_w) ** 2
    init_p = gaussian_profile(p, dp_w) ** 2

    lines = [
        f"# target_weak_value={target.real:.17g}{target.imag:+.17g}j",
        f"# achieved_orthogonal={achieved_orth.real:.17g}{achieved_orth.imag:+.17g}j",
        f"# achieved_nonorthogonal={achieved_non.real:.17g}{achieved_non.imag:+.17g}j",
        f"# g={args.g:.17g} delta_q={dq_w:.17g}",
        "q_over_dq,initial_q,orthogonal_q,nonorthogonal_q,"
        "p_over_dp,initial_p,orthogonal_p,nonorthogonal_p",
    ]
    for i in range(q.size):
        lines.append(
            ",".join(
                (
                    f"{q[i] / dq_w:.17g}",
                    f"{init_q[i] * dq_w:.17g}",
                    f"{rec_orth.q_density.values[i] * dq_w:.17g}",
                    f"{rec_non.q_density.values[i] * dq_w:.17g}",
                    f"{p[i] / dp_w:.17g}",
                    f"{init_p[i] * dp_w:.17g}",
                    f"{rec_orth.p_density.values[i] * dp_w:.17g}",
                    f"{rec_non.p_density.values[i] * dp_w:.17g}",
                )
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except WeakMeasurementError as exc:
        _emit_json({"error": {"code": exc.code, "message": str(exc)}}, None)
        return 2


if __name__ == "__main__":
    sys.exit(main())
