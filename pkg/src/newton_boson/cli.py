"""Command-line front end.

Subcommands: expand (Newton coefficients of an expression), hp
(Holstein-Primakoff coefficient and commutator-residual tables), moments
(counting statistics of a distribution), husimi (thermal Husimi values on a
grid), transform (normal-order transform by quadrature), fock (normal-ordered
operator matrix export).

Exit codes: 0 success, 1 computation error (a JSON error object goes to
stdout), 2 usage error.  NEWTON_BOSON_PRECISION overrides the default
precision.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from . import coherent, counting, emit, expr, fock, notransform, spinrep
from .errors import NewtonBosonError
from .findiff import newton_coefficients

PRECISION_ENV = "NEWTON_BOSON_PRECISION"


@dataclass
class RunConfig:
    precision_bits: int = 256
    cutoff: int = 0
    output_format: str = "json"
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.precision_bits < 53:
            raise ValueError("precision must be at least 53 bits")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 256
    return int(raw)


def _parse_params(text):
    """'S=1,z=0.5' -> {'S': Fraction(1), 'z': Fraction(1,2)} (strings kept
    when they are not plain decimals)."""
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"parameter '{item}' is not name=value")
        name, value = item.split("=", 1)
        name = name.strip()
        value = value.strip()
        try:
            out[name] = Fraction(value)
        except ValueError:
            out[name] = value
    return out


def _precision_arg(value: str) -> int:
    bits = int(value)
    if bits < 53:
        raise argparse.ArgumentTypeError("precision must be at least 53 bits")
    return bits


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newton-boson",
        description="Finite-difference expansions of bosonic number-operator "
                    "functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--precision-bits", type=_precision_arg,
                       default=_default_precision())
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write to file instead of stdout")
        p.add_argument("--params", default="",
                       help="comma-separated name=value parameter bindings")

    p = sub.add_parser("expand", help="Newton coefficients of an expression")
    p.add_argument("--f", required=True, help="expression in x")
    p.add_argument("--order", type=int, required=True)
    common(p)

    p = sub.add_parser("hp", help="Holstein-Primakoff coefficient/residual tables")
    p.add_argument("--two-s", type=int, required=True, dest="two_s")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--scheme", choices=spinrep.SCHEMES, required=True)
    common(p)

    p = sub.add_parser("moments", help="moment/cumulant tables of a distribution")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--binomial", nargs=2, metavar=("N", "P"))
    group.add_argument("--poisson", metavar="LAMBDA")
    group.add_argument("--pmf", metavar="P0,P1,...")
    p.add_argument("--max-k", type=int, required=True, dest="max_k")
    common(p)

    p = sub.add_parser("husimi", help="thermal Husimi values on a grid")
    p.add_argument("--beta", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--n0", default="0")
    p.add_argument("--grid", required=True,
                   help="min:max:step[,min:max:step] for Re and Im")
    common(p)

    p = sub.add_parser("transform", help="normal-order transform by quadrature")
    p.add_argument("--f", default=None, help="expression in x")
    p.add_argument("--pair", default=None, choices=notransform.pair_names(),
                   help="use a registered pair (closed form for comparison)")
    p.add_argument("--points", required=True,
                   help="comma-separated evaluation points, Re < 0")
    common(p)

    p = sub.add_parser("fock", help="normal-ordered operator matrix export")
    p.add_argument("--f", required=True, help="expression in x")
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    common(p)

    return parser


# -- handlers ------------------------------------------------------------------


def _cmd_expand(args):
    params = _parse_params(args.params)
    function = expr.compile_function(args.f, params, args.precision_bits)
    series = newton_coefficients(function, args.order, args.precision_bits)
    payload = {
        "f": args.f,
        "order": args.order,
        "precision_bits": args.precision_bits,
        "k_min": series.k_min,
        "coefficients": list(series.coefficients),
        "cancellation_loss_bits": [round(b, 2) for b in
                                   series.cancellation_loss_bits],
    }
    rows = [[k, c, round(b, 2)] for k, (c, b) in
            enumerate(zip(series.coefficients, series.cancellation_loss_bits))]
    return payload, ("k", "coefficient", "cancellation_loss_bits"), rows


def _cmd_hp(args):
    rep = spinrep.SpinRep(args.two_s, args.r, args.scheme)
    if args.scheme == "taylor":
        coefficients = spinrep.hp_taylor_coefficients(args.two_s, rep.r)
    else:
        coefficients = list(spinrep.hp_newton_coefficients(
            args.two_s, rep.r, args.precision_bits).coefficients)
    residuals = spinrep.commutator_residual(rep, args.precision_bits)
    payload = {
        "two_s": args.two_s,
        "r": rep.r,
        "scheme": args.scheme,
        "cutoff": rep.space.cutoff,
        "precision_bits": args.precision_bits,
        "coefficients": coefficients,
        "residuals": residuals,
    }
    rows = [[args.two_s, rep.r, args.scheme, "coefficient", k, c]
            for k, c in enumerate(coefficients)]
    rows += [[args.two_s, rep.r, args.scheme, "residual", n, v]
             for n, v in enumerate(residuals)]
    return payload, ("two_s", "r", "scheme", "kind", "index", "value"), rows


def _parse_probability(text):
    try:
        return Fraction(text)
    except ValueError:
        with mp.workprec(1024):
            return mp.mpf(text)


def _cmd_moments(args):
    if args.binomial is not None:
        n_text, p_text = args.binomial
        dist = counting.DiscreteDistribution.binomial(
            int(n_text), _parse_probability(p_text))
        label = {"kind": "binomial", "n": int(n_text), "p": p_text}
    elif args.poisson is not None:
        dist = counting.DiscreteDistribution.poisson(
            _parse_probability(args.poisson))
        label = {"kind": "poisson", "lambda": args.poisson}
    else:
        probs = [_parse_probability(t) for t in args.pmf.split(",")]
        dist = counting.DiscreteDistribution.from_pmf(probs)
        label = {"kind": "pmf", "n_max": dist.n_max}
    factorial = counting.factorial_moments(dist, args.max_k)
    raw = counting.raw_moments(dist, args.max_k)
    payload = {
        "distribution": label,
        "max_k": args.max_k,
        "precision_bits": args.precision_bits,
        "factorial_moments": list(factorial.values),
        "raw_moments": list(raw.values),
        "factorial_cumulants": counting.cumulants_from_moments(factorial),
        "raw_cumulants": counting.cumulants_from_moments(raw),
    }
    rows = []
    for k in range(args.max_k + 1):
        rows.append([k, factorial.values[k], raw.values[k],
                     payload["factorial_cumulants"][k],
                     payload["raw_cumulants"][k]])
    header = ("k", "factorial_moment", "raw_moment", "factorial_cumulant",
              "raw_cumulant")
    return payload, header, rows


def _parse_grid_axis(spec: str):
    pieces = spec.split(":")
    if len(pieces) != 3:
        raise ValueError(f"grid axis '{spec}' is not min:max:step")
    return pieces


def _grid_values(spec, precision_bits):
    lo, hi, step = _parse_grid_axis(spec)
    with mp.workprec(precision_bits):
        lo, hi, step = mp.mpf(lo), mp.mpf(hi), mp.mpf(step)
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(mp.floor((hi - lo) / step + mp.mpf("1e-9"))) + 1
        return [lo + j * step for j in range(count)]


def _cmd_husimi(args):
    thermal = coherent.ThermalParams(args.beta, args.omega, args.n0)
    axes = args.grid.split(",")
    if len(axes) == 1:
        axes = [axes[0], axes[0]]
    if len(axes) != 2:
        raise ValueError("grid must give one or two min:max:step axes")
    re_values = _grid_values(axes[0], args.precision_bits)
    im_values = _grid_values(axes[1], args.precision_bits)
    rows = []
    with mp.workprec(args.precision_bits):
        for re in re_values:
            for im in im_values:
                q = coherent.husimi(mp.mpc(re, im), thermal,
                                    args.precision_bits)
                rows.append([re, im, q])
    payload = {
        "beta": args.beta,
        "omega": args.omega,
        "n0": args.n0,
        "grid": {"re": axes[0], "im": axes[1]},
        "precision_bits": args.precision_bits,
        "rows": rows,
    }
    return payload, ("re_alpha", "im_alpha", "q_value"), rows


def _parse_point(text: str):
    value = complex(text.replace(" ", "").replace("i", "j"))
    if value.imag == 0:
        return mp.mpf(value.real)
    return mp.mpc(value)


def _cmd_transform(args):
    params = _parse_params(args.params)
    closed_form = None
    if args.pair is not None:
        pair = notransform.transform_pair(args.pair, **params)
        function = pair.f
        closed_form = pair.f_tilde
        f_label = pair.f.name
    elif args.f is not None:
        function = expr.compile_function(args.f, params, args.precision_bits)
        f_label = args.f
    else:
        raise ValueError("either --f or --pair is required")
    points = [_parse_point(t) for t in args.points.split(",")]
    rows = []
    json_rows = []
    for n in points:
        result = notransform.transform_quadrature(
            function, n, precision_bits=args.precision_bits)
        closed = deviation = None
        if closed_form is not None:
            with mp.workprec(args.precision_bits):
                closed = closed_form(n)
                deviation = abs(result.value - closed)
        json_rows.append({
            "n": n,
            "quadrature": result.value,
            "closed_form": closed,
            "deviation": deviation,
            "error_estimate": result.error_estimate,
        })
        rows.append([mp.re(n), mp.im(n), result.value, closed, deviation])
    payload = {
        "f": f_label,
        "pair": args.pair,
        "precision_bits": args.precision_bits,
        "rows": json_rows,
    }
    header = ("n_re", "n_im", "quadrature", "closed_form", "deviation")
    return payload, header, rows


def _cmd_fock(args):
    params = _parse_params(args.params)
    function = expr.compile_function(args.f, params, args.precision_bits)
    series = newton_coefficients(function, args.order, args.precision_bits)
    space = fock.FockSpace(args.cutoff)
    operator = fock.normal_ordered_operator(series, space, args.order).rounded()
    dim = space.dimension
    matrix = [[operator.entry(i, j) for j in range(dim)] for i in range(dim)]
    payload = {
        "f": args.f,
        "cutoff": args.cutoff,
        "order": args.order,
        "precision_bits": args.precision_bits,
        "diagonal": operator.diagonal(),
        "matrix": [[[mp.re(v), mp.im(v)] for v in row] for row in matrix],
    }
    all_real = all(mp.im(v) == 0 for row in matrix for v in row)
    rows = [[mp.re(v) for v in row] if all_real else list(row)
            for row in matrix]
    header = tuple(f"col{j}" for j in range(dim))
    return payload, header, rows


_HANDLERS = {
    "expand": _cmd_expand,
    "hp": _cmd_hp,
    "moments": _cmd_moments,
    "husimi": _cmd_husimi,
    "transform": _cmd_transform,
    "fock": _cmd_fock,
}


def _write(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")


def run_subcommand(argv) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, header, rows = _HANDLERS[args.command](args)
    except (NewtonBosonError, ValueError, KeyError, ZeroDivisionError,
            OverflowError) as exc:
        code = getattr(exc, "code", "invalid_argument")
        error = {"error": {"code": code, "message": str(exc)}}
        _write(emit.render_json(error, 64), getattr(args, "out", None))
        return 1
    if args.format == "json":
        text = emit.render_json(payload, args.precision_bits)
    else:
        text = emit.render_csv(header, rows, args.precision_bits)
    _write(text, args.out)
    return 0


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))


if __name__ == "__main__":
    main()
