"""Command-line driver: single-point evaluation, sweeps, locus fits, checks.

Outputs are plain CSV tables (locale-independent, full round-trip float
precision) and binary portable graymap (P5) heatmaps with a key=value
sidecar recording the value mapping.  Exit codes: 0 success, 2 invalid
parameters, 3 optimizer non-convergence or locus bracketing failure,
4 unwritable output.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from .compton import PolarizationPair, elliptic_polarization, spin_matrix
from .contrast import NewtonStatus, minimize_contrast
from .kinematics import ScatterConfig
from .sweep import (
    FixedParams,
    GridSpec,
    SweepTile,
    evaluate_fit,
    fit_locus,
    locus_probabilities,
    minimum_locus,
    run_sweep,
)
from .taylor import DOMAIN_LIMIT, taylor_error

_PI_TOKEN = re.compile(r"^([+-]?\d*\.?\d*)pi(?:/(\d*\.?\d+))?$")

HEATMAP_COLUMNS = ("contrast", "alpha", "phi", "prob_A", "prob_B")


def parse_angle(text: str) -> float:
    """Angle in radians from a float literal or a pi fraction like 'pi/4'."""
    token = text.strip().lower().replace(" ", "")
    try:
        return float(token)
    except ValueError:
        pass
    match = _PI_TOKEN.match(token)
    if match is None:
        raise ValueError(f"cannot parse angle {text!r} (use radians or e.g. 'pi/4', '3pi/8')")
    coef_text, denom_text = match.groups()
    if coef_text in ("", "+"):
        coef = 1.0
    elif coef_text == "-":
        coef = -1.0
    else:
        coef = float(coef_text)
    value = coef * math.pi
    if denom_text is not None:
        value /= float(denom_text)
    return value


def parse_polarization(text: str) -> np.ndarray:
    """Complex 3-vector from six comma-separated numbers re1,im1,...,re3,im3."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 6:
        raise ValueError(f"polarization needs 6 numbers (re,im pairs), got {len(parts)}")
    values = [float(p) for p in parts]
    return np.array([complex(values[2 * i], values[2 * i + 1]) for i in range(3)])


def _format(value) -> str:
    return repr(float(value))


def _polarization_from_args(args) -> PolarizationPair:
    if args.pol_l is not None or args.pol_r is not None:
        left = args.pol_l if args.pol_l is not None else elliptic_polarization(args.theta).left
        right = args.pol_r if args.pol_r is not None else np.array([0.0, 0.0, 1.0 + 0.0j])
        return PolarizationPair(left=left, right=right)
    return elliptic_polarization(args.theta)


def write_tile_csv(tile: SweepTile, stream) -> None:
    """Row-major (y outer, x inner) CSV dump of a sweep tile."""
    stream.write("x,y,contrast,alpha,phi,prob_A,prob_B,status\n")
    for j, y in enumerate(tile.y):
        for i, x in enumerate(tile.x):
            stream.write(
                ",".join(
                    (
                        _format(x),
                        _format(y),
                        _format(tile.contrast[j, i]),
                        _format(tile.alpha[j, i]),
                        _format(tile.phi[j, i]),
                        _format(tile.prob_a[j, i]),
                        _format(tile.prob_b[j, i]),
                        str(tile.status[j, i]),
                    )
                )
                + "\n"
            )


def _tile_column(tile: SweepTile, name: str) -> np.ndarray:
    return {
        "contrast": tile.contrast,
        "alpha": tile.alpha,
        "phi": tile.phi,
        "prob_A": tile.prob_a,
        "prob_B": tile.prob_b,
    }[name]


def write_heatmap_pgm(tile: SweepTile, column: str, path: Path, log_scale: bool) -> None:
    """8-bit binary P5 graymap of one tile column plus a sidecar text file.

    Image row 0 holds the first y value; the sidecar records the column,
    the linear or log10 mapping and its min/max so values can be recovered.
    """
    values = np.array(_tile_column(tile, column), dtype=float)
    finite = np.isfinite(values)
    if log_scale:
        positive = values[finite & (values > 0.0)]
        floor = float(positive.min()) if positive.size else 1.0
        values = np.log10(np.clip(values, floor, None))
        finite = np.isfinite(values)
    vmin = float(values[finite].min()) if finite.any() else 0.0
    vmax = float(values[finite].max()) if finite.any() else 0.0
    if vmax > vmin:
        scaled = (values - vmin) / (vmax - vmin) * 255.0
    else:
        scaled = np.zeros_like(values)
    scaled[~np.isfinite(scaled)] = 0.0
    pixels = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
    ny, nx = pixels.shape
    with open(path, "wb") as handle:
        handle.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        handle.write(pixels.tobytes())
    sidecar = [
        f"column={column}",
        f"scale={'log10' if log_scale else 'linear'}",
        f"min={_format(vmin)}",
        f"max={_format(vmax)}",
        f"nx={nx}",
        f"ny={ny}",
        f"x_first={_format(tile.x[0])}",
        f"x_last={_format(tile.x[-1])}",
        f"y_first={_format(tile.y[0])}",
        f"y_last={_format(tile.y[-1])}",
        "row0=y_first",
    ]
    Path(str(path) + ".txt").write_text("\n".join(sidecar) + "\n", encoding="ascii")


def cmd_point(args) -> int:
    cfg = ScatterConfig(q_l=args.ql, q2=args.q2, q3=args.q3)
    pol = _polarization_from_args(args)
    matrix = spin_matrix(cfg, pol)
    result = minimize_contrast(matrix)
    for r in range(2):
        for c in range(2):
            print(f"m{r}{c}_re={_format(matrix[r, c].real)}")
            print(f"m{r}{c}_im={_format(matrix[r, c].imag)}")
    print(f"contrast={_format(result.value)}")
    print(f"alpha={_format(result.alpha)}")
    print(f"phi={_format(result.phi)}")
    print(f"prob_A={_format(result.prob_a)}")
    print(f"prob_B={_format(result.prob_b)}")
    print(f"iterations={result.iterations}")
    print(f"status={result.status.value}")
    return 0 if result.status is NewtonStatus.CONVERGED_GRADIENT else 3


def cmd_sweep(args) -> int:
    if len(args.axes) != 2:
        raise ValueError(f"--axes needs two comma-separated names, got {','.join(args.axes)!r}")
    x_name, y_name = args.axes
    fixed = FixedParams(
        q_l=args.ql,
        q2=args.q2,
        q3=args.q3,
        theta=args.theta,
        pol=_polarization_from_args(args) if (args.pol_l is not None or args.pol_r is not None) else None,
    )
    spec = GridSpec(
        x_name=x_name,
        y_name=y_name,
        x_range=tuple(args.x_range),
        y_range=tuple(args.y_range),
        nx=args.nx,
        ny=args.ny,
        fixed=fixed,
    )
    tile = run_sweep(spec, workers=args.workers)
    out = Path(args.out)
    with open(out, "w", encoding="ascii", newline="\n") as handle:
        write_tile_csv(tile, handle)
    print(f"wrote {out} ({spec.nx * spec.ny} points)")
    if args.heatmap_column is not None:
        pgm = Path(args.heatmap_out) if args.heatmap_out else out.with_suffix(".pgm")
        write_heatmap_pgm(tile, args.heatmap_column, pgm, args.log_scale)
        print(f"wrote {pgm} and {pgm}.txt")
    return 0


def _locus_csv(points, stream) -> None:
    stream.write("q3,inv_theta,alpha\n")
    for p in points:
        stream.write(f"{_format(p.q3)},{_format(p.inv_theta)},{_format(p.alpha)}\n")


def cmd_locus_fit(args) -> int:
    fixed = FixedParams(q_l=args.ql, q2=args.q2)
    q3_values = np.linspace(args.q3_min, args.q3_max, args.q3_points)
    inv_range = (args.inv_theta_min, args.inv_theta_max)
    if args.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        task = partial(
            minimum_locus,
            inv_theta_range=inv_range,
            inv_theta_points=args.inv_theta_points,
            fixed=fixed,
        )
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            chunks = pool.map(task, [[float(v)] for v in q3_values])
        points = [p for chunk in chunks for p in chunk]
    else:
        points = minimum_locus(
            q3_values,
            inv_theta_range=inv_range,
            inv_theta_points=args.inv_theta_points,
            fixed=fixed,
        )

    prefix = args.out
    locus_path = Path(f"{prefix}_locus.csv")
    with open(locus_path, "w", encoding="ascii", newline="\n") as handle:
        _locus_csv(points, handle)
    print(f"wrote {locus_path} ({len(points)} points)")

    failed = [p for p in points if not p.bracketed]
    for p in failed:
        print(f"unbracketed: q3={_format(p.q3)}", file=sys.stderr)

    good = [(p.q3, p.inv_theta) for p in points if p.bracketed]
    try:
        left, right = fit_locus(good)
    except ValueError as exc:
        print(f"fit skipped: {exc}")
        return 0 if len(failed) <= 0.05 * len(points) else 3

    def branch_rms(model, data):
        errs = [evaluate_fit(model, q) - v for q, v in data if model.domain[0] - 1e-12 <= q <= model.domain[1] + 1e-12]
        return math.sqrt(sum(e * e for e in errs) / len(errs))

    report = [
        f"left.a1={_format(left.params[0])}",
        f"left.a2={_format(left.params[1])}",
        f"left.a3={_format(left.params[2])}",
        f"right.b1={_format(right.params[0])}",
        f"right.b2={_format(right.params[1])}",
        f"right.b3={_format(right.params[2])}",
        f"left.eval_at_0={_format(evaluate_fit(left, 0.0))}",
        f"left.eval_at_split={_format(evaluate_fit(left, left.domain[1]))}",
        f"right.eval_at_split={_format(evaluate_fit(right, right.domain[0]))}",
        f"right.eval_at_1={_format(evaluate_fit(right, 1.0))}",
        f"left.rms={_format(branch_rms(left, good))}",
        f"right.rms={_format(branch_rms(right, good))}",
    ]
    fit_path = Path(f"{prefix}_fit.txt")
    fit_path.write_text("\n".join(report) + "\n", encoding="ascii")
    for line in report:
        print(line)

    trace = locus_probabilities(left, right, [p.q3 for p in points if p.bracketed], fixed=fixed)
    prob_path = Path(f"{prefix}_probabilities.csv")
    with open(prob_path, "w", encoding="ascii", newline="\n") as handle:
        handle.write("q3,prob_A,prob_B,alpha,phi\n")
        for rec in trace:
            handle.write(
                f"{_format(rec.q3)},{_format(rec.prob_a)},{_format(rec.prob_b)},"
                f"{_format(rec.alpha)},{_format(rec.phi)}\n"
            )
    print(f"wrote {fit_path} and {prob_path}")
    return 0 if len(failed) <= 0.05 * len(points) else 3


def cmd_taylor_check(args) -> int:
    if args.scale == 0.0:
        print("scale=0.0 error=0.0")
        print("order=exact (expansion coincides with the amplitude at the origin)")
        return 0
    if args.scale < 0.0:
        raise ValueError("--scale must be nonnegative")
    pol = _polarization_from_args(args)
    if args.scale > DOMAIN_LIMIT:
        print(f"warning: scale {args.scale} exceeds the expansion domain ({DOMAIN_LIMIT})")
    scales, errors = [], []
    for k in range(args.halvings + 1):
        h = args.scale / 2.0**k
        err = taylor_error(ScatterConfig(q_l=h, q2=h, q3=h), pol)
        scales.append(h)
        errors.append(err)
        print(f"scale={_format(h)} error={_format(err)}")
    order = float(np.polyfit(np.log(scales), np.log(errors), 1)[0])
    print(f"order={_format(order)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdspin",
        description="Spin-dependent two-photon Bragg diffraction: contrast maps and fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, theta_default=math.pi / 4.0):
        p.add_argument("--ql", type=float, default=0.02, help="photon momentum q_l (default 0.02)")
        p.add_argument("--q2", type=float, default=0.0, help="transverse momentum q2")
        p.add_argument("--q3", type=float, default=0.0, help="transverse momentum q3")
        p.add_argument(
            "--theta",
            type=parse_angle,
            default=theta_default,
            help="left-beam ellipticity angle (radians or 'pi/4' style)",
        )
        p.add_argument("--pol-l", type=parse_polarization, default=None, metavar="RE,IM,...",
                       help="left amplitude as re,im pairs (overrides --theta)")
        p.add_argument("--pol-r", type=parse_polarization, default=None, metavar="RE,IM,...",
                       help="right amplitude as re,im pairs (default 0,0,0,0,1,0)")

    p_point = sub.add_parser("point", help="single configuration: matrix, contrast, angles")
    add_common(p_point)
    p_point.set_defaults(func=cmd_point)

    p_sweep = sub.add_parser("sweep", help="grid sweep to CSV (optional P5 heatmap)")
    add_common(p_sweep)
    p_sweep.add_argument("--axes", required=True, type=lambda s: tuple(s.split(",")),
                         help="axis pair: q2,q3 or q3,theta or q3,inv_theta")
    p_sweep.add_argument("--x-range", required=True, type=lambda s: [float(v) for v in s.split(",")],
                         metavar="LO,HI")
    p_sweep.add_argument("--y-range", required=True, type=lambda s: [float(v) for v in s.split(",")],
                         metavar="LO,HI")
    p_sweep.add_argument("--nx", type=int, default=201)
    p_sweep.add_argument("--ny", type=int, default=201)
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_sweep.add_argument("--heatmap-column", choices=HEATMAP_COLUMNS, default=None)
    p_sweep.add_argument("--heatmap-out", default=None, help="heatmap path (default: out with .pgm)")
    p_sweep.add_argument("--log-scale", action="store_true", help="log10 heatmap mapping")
    p_sweep.set_defaults(func=cmd_sweep)

    p_locus = sub.add_parser("locus-fit", help="minimum locus over 1/theta, two-branch fit")
    p_locus.add_argument("--ql", type=float, default=0.02)
    p_locus.add_argument("--q2", type=float, default=0.0)
    p_locus.add_argument("--q3-min", type=float, default=0.0)
    p_locus.add_argument("--q3-max", type=float, default=1.0)
    p_locus.add_argument("--q3-points", type=int, default=201)
    p_locus.add_argument("--inv-theta-min", type=float, default=1.0)
    p_locus.add_argument("--inv-theta-max", type=float, default=100.0)
    p_locus.add_argument("--inv-theta-points", type=int, default=400)
    p_locus.add_argument("--out", required=True, help="output path prefix")
    p_locus.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p_locus.set_defaults(func=cmd_locus_fit)

    p_taylor = sub.add_parser("taylor-check", help="convergence order of the expansion")
    add_common(p_taylor)
    p_taylor.add_argument("--scale", type=float, default=1e-2,
                          help="largest momentum scale of the halving ladder")
    p_taylor.add_argument("--halvings", type=int, default=4)
    p_taylor.set_defaults(func=cmd_taylor_check)

    return parser


def _join_dashed_values(argv: list[str]) -> list[str]:
    """Merge '--flag -0.05,0.05' into '--flag=-0.05,0.05' so argparse does not
    mistake leading-dash values (negative ranges, '-pi/2') for option names."""
    joined: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            token.startswith("--")
            and "=" not in token
            and nxt is not None
            and nxt.startswith("-")
            and not nxt.startswith("--")
        ):
            joined.append(f"{token}={nxt}")
            skip = True
        else:
            joined.append(token)
    return joined


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_join_dashed_values(list(argv)))
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
