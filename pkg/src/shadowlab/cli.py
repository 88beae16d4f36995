"""Command-line front end.

Every subcommand reads one matrix (from ``--matrix`` or a generator flag),
checks the postconditions of the module it calls and writes plain CSV/PGM
files into ``--out``.  Exit codes: 0 success, 2 invalid input, 3 numerical
failure.
"""

import argparse
import math
import os
import sys
import warnings

import numpy as np

from . import io
from .composition import DEFAULT_T_NODES
from .errors import DegenerateBranchWarning, InvalidInputError, NumericalFailure
from .matrix import as_matrix, jordan, read_matrix
from .sampler import DEFAULT_SEED

MAX_N = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInputError(message)


def _count(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v != int(v) or v < 1:
        raise argparse.ArgumentTypeError("count must be a positive integer")
    return int(v)


def _complex_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "").replace("i", "j")
        if not tok:
            continue
        try:
            out.append(complex(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad number {tok!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _box(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("box must be xmin,xmax,ymin,ymax") from None
    if len(vals) != 4 or not (vals[1] > vals[0] and vals[3] > vals[2]):
        raise argparse.ArgumentTypeError("box must be xmin,xmax,ymin,ymax with positive area")
    return tuple(vals)


def _add_matrix_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", dest="matrix_path", metavar="PATH",
                   help='matrix JSON {"n": N, "entries": [[re, im], ...]}')
    g.add_argument("--jordan", type=int, metavar="N", help="N x N Jordan nilpotent")
    g.add_argument("--diag", type=_complex_list, metavar="L1,L2,...", help="diagonal matrix")
    g.add_argument("--superdiag", type=_complex_list, metavar="A1,A2,...",
                   help="nilpotent matrix with the given superdiagonal")


def _matrix(args):
    if args.matrix_path is not None:
        A = read_matrix(args.matrix_path)
    elif args.jordan is not None:
        if args.jordan < 1:
            raise InvalidInputError("--jordan needs N >= 1")
        A = jordan(args.jordan)
    elif args.diag is not None:
        A = np.diag(np.array(args.diag, dtype=complex))
    else:
        a = np.array(args.superdiag, dtype=complex)
        A = np.diag(a, 1)
    A = as_matrix(A)
    if A.shape[0] > MAX_N:
        raise InvalidInputError(f"matrix dimension above {MAX_N}")
    return A


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _check(ok, invariant, detail=""):
    if not ok:
        raise NumericalFailure(invariant, detail)


def _report(msg):
    print(msg)


# ---------------------------------------------------------------------------
# subcommands

def cmd_sample(args):
    from .geometry import numerical_range_boundary
    from .sampler import histogram, sample_shadow

    A = _matrix(args)
    s = sample_shadow(A, args.count, args.kind, args.seed, args.threads)
    W = numerical_range_boundary(A)
    scale = max(1.0, float(np.max(np.abs(W.vertices))))
    _check(bool(np.all(W.contains(s.points, 1e-9 * scale))), "samples_in_numerical_range")
    g = histogram(s, args.box, args.nx, args.ny, "density", matrix=A)
    io.write_samples_csv(_out(args, "samples.csv"), s)
    io.write_grid_csv(_out(args, "histogram.csv"), g)
    io.write_grid_pgm(_out(args, "histogram.pgm"), g)
    _report(f"{len(s)} samples, overflow {g.overflow}")


def _square_box(R, c=0j):
    return (c.real - R, c.real + R, c.imag - R, c.imag + R)


def _grid_of(fn, box, nx, ny):
    from .sampler import Grid2D

    x0, x1, y0, y1 = box
    g = Grid2D(complex(x0, y0), (x1 - x0) / nx, (y1 - y0) / ny, np.zeros((nx, ny)))
    v = fn(g.centers())
    # integrable singularities on curves are blanked in the raster
    return Grid2D(g.origin, g.dx, g.dy, np.where(np.isfinite(v), v, 0.0), "density")


def cmd_density(args):
    from .cartesian import hermitian_density
    from .matrix import adjoint
    from .moments import rotation_invariant
    from .radial import density_2x2, ellipse_of_2x2, rotation_invariant_density

    A = _matrix(args)
    n = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - adjoint(A))) <= 1e-12 * scale:
        f = hermitian_density(A.real if np.all(A.imag == 0) else A)
        _check(f.residual < 1e-8, "partial_fractions", f"residual {f.residual:.3g}")
        lo, hi = f.support
        u = np.linspace(lo, hi, args.points) if hi > lo else np.array([lo])
        d = f(u)
        if not f.atomic and len(u) > 1:
            mass = float(np.sum(0.5 * (d[1:] + d[:-1]) * np.diff(u)))
            _check(abs(mass - 1) < 1e-2, "unit_mass", f"trapezoid mass {mass:.6g}")
        io.write_csv(_out(args, "density.csv"), ["u", "density", "theta"],
                     ((float(a), float(b), 0.0) for a, b in zip(u, d)))
        _report(f"hermitian density on [{lo:.17g}, {hi:.17g}]")
        return
    if rotation_invariant(A):
        f = rotation_invariant_density(A)
        if f.atomic:
            raise InvalidInputError("zero matrix: the shadow is a point mass")
        R = f.support_radius
        mass = f.radial_moment(0)
        _check(abs(mass - 1) < 1e-6, "unit_mass", f"radial mass {mass:.12g}")
        r = (np.arange(args.points) + 0.5) * R / args.points
        io.write_csv(_out(args, "radial.csv"), ["r", "f"],
                     ((float(a), float(b)) for a, b in zip(r, f(r))))
        box = args.box or _square_box(1.02 * R)
        g = _grid_of(lambda z: f(np.abs(z)), box, args.nx, args.ny)
        _report(f"rotation-invariant density, support radius {R:.17g}")
    elif n == 2:
        E = ellipse_of_2x2(A)
        if E.degenerate:
            raise InvalidInputError("normal 2 x 2 matrix: the shadow is uniform on a segment")
        box = args.box or _square_box(1.02 * E.a, E.center)
        g = _grid_of(lambda z: density_2x2(E, z), box, args.nx, args.ny)
        _report(f"elliptical shadow, semi-axes {E.a:.17g} {E.b:.17g}")
    else:
        raise InvalidInputError("no closed-form density for this matrix; "
                                "use the zernike or sample commands")
    io.write_grid_csv(_out(args, "density_grid.csv"), g)
    io.write_grid_pgm(_out(args, "density_grid.pgm"), g)


def cmd_moments(args):
    from .moments import central_moment_table, moment_table

    A = _matrix(args)
    t = central_moment_table(A, args.order) if args.central else moment_table(A, args.order)
    _check(t[0, 0] == 1, "unit_mass")
    v = t.values
    M = args.order
    herm = max((abs(v[j, k] - np.conj(v[k, j])) for j in range(M + 1) for k in range(M + 1 - j)),
               default=0.0)
    _check(herm <= 1e-12 * max(1.0, float(np.max(np.abs(v)))), "conjugate_symmetry")
    io.write_csv(_out(args, "moments.csv"), ["j", "k", "re", "im"],
                 ((j, k, c.real, c.imag) for (j, k), c in t.items()))
    _report(f"moments up to order {M}")


def cmd_equal(args):
    from .moments import shadows_equal, trace_criterion_equal

    A = read_matrix(args.a_path)
    B = read_matrix(args.b_path)
    fn = shadows_equal if args.route == "xi" else trace_criterion_equal
    rep = fn(A, B, args.tol)
    if rep.equal:
        _report("equal")
    else:
        j, k = rep.witness
        _report(f"unequal witness {j},{k} difference {rep.max_difference:.3g}")


def cmd_marginal(args):
    from .cartesian import marginal_density

    A = _matrix(args)
    if args.theta is not None:
        thetas = [args.theta]
    else:
        thetas = 2 * np.pi * np.arange(args.angles) / args.angles
    rows = []
    for th in thetas:
        f = marginal_density(A, th)
        _check(f.residual < 1e-8, "partial_fractions", f"residual {f.residual:.3g}")
        lo, hi = f.support
        u = np.linspace(lo, hi, args.points) if hi > lo else np.array([lo])
        d = f(u)
        if not f.atomic and len(u) > 1:
            mass = float(np.sum(0.5 * (d[1:] + d[:-1]) * np.diff(u)))
            _check(abs(mass - 1) < 1e-2, "unit_mass", f"theta {th:.6g}: mass {mass:.6g}")
        rows.extend((float(a), float(b), float(th)) for a, b in zip(u, d))
    io.write_csv(_out(args, "marginal.csv"), ["u", "density", "theta"], rows)
    _report(f"{len(thetas)} marginal(s)")


def cmd_critical(args):
    from .cartesian import critical_curves
    from .geometry import hausdorff, numerical_range_boundary

    A = _matrix(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBranchWarning)
        curves = critical_curves(A, args.n_theta)
    W = numerical_range_boundary(A)
    scale = max(1.0, float(np.max(np.abs(W.vertices))))
    if W.kind == "polygon":
        d = hausdorff(curves[0].z, W)
        _check(d < 1e-2 * scale, "outer_curve_is_boundary", f"Hausdorff {d:.3g}")
    rows = []
    cusp_rows = []
    for ci, c in enumerate(curves):
        per = len(c.theta) // len(c.branches)
        for i, (th, z) in enumerate(zip(c.theta, c.z)):
            b = c.branches[min(i // max(per, 1), len(c.branches) - 1)]
            rows.append((float(th), float(z.real), float(z.imag), b))
        cusp_rows.extend((float(t), float(z.real), float(z.imag), ci)
                         for t, z in zip(c.cusps, c.cusp_points))
    io.write_csv(_out(args, "critical.csv"), ["theta", "re", "im", "branch"], rows)
    io.write_csv(_out(args, "cusps.csv"), ["theta", "re", "im", "curve"], cusp_rows)
    _report(f"{len(curves)} curve(s), {len(cusp_rows)} cusp(s)")


def cmd_zernike(args):
    from .zernike import zernike_coeffs, zernike_eval

    A = _matrix(args)
    e = zernike_coeffs(A, args.order)
    _check(abs(e[0, 0] - 1) <= 1e-9, "unit_mass")
    io.write_csv(_out(args, "zernike_coeffs.csv"), ["m", "n", "re", "im"],
                 ((m, n, c.real, c.imag) for (m, n), c in e.items()))
    g = zernike_eval(e, args.box, args.nx, args.ny)
    io.write_grid_csv(_out(args, "zernike.csv"), g)
    io.write_grid_pgm(_out(args, "zernike.pgm"), g)
    _report(f"Zernike expansion of order {args.order}")


def cmd_rankk(args):
    from .geometry import rank_k_range

    A = _matrix(args)
    if not 1 <= args.k <= A.shape[0]:
        raise InvalidInputError(f"k must lie in 1..{A.shape[0]}")
    reg = rank_k_range(A, args.k, args.T)
    if args.k > 1 and not reg.empty:
        outer = rank_k_range(A, args.k - 1, args.T)
        scale = max(1.0, float(np.max(np.abs(outer.vertices))))
        _check(bool(np.all(outer.contains(reg.vertices, 1e-7 * scale))), "nesting")
    io.write_region_csv(_out(args, "rankk.csv"), reg)
    _report(f"rank-{args.k} range: {reg.kind} with {len(reg.vertices)} vertices")


def cmd_directsum(args):
    from .composition import direct_sum_density_grid, direct_sum_sample
    from .sampler import histogram, sample_shadow

    A = read_matrix(args.a_path)
    B = read_matrix(args.b_path)
    n, m = A.shape[0], B.shape[0]
    sa = sample_shadow(A, args.count, seed=args.seed, threads=args.threads)
    sb = sample_shadow(B, args.count, seed=args.seed + 1, threads=args.threads)
    s = direct_sum_sample(sa, sb, n, m, args.seed, args.count)
    C = np.zeros((n + m, n + m), dtype=complex)
    C[:n, :n] = A
    C[n:, n:] = B
    box = args.box
    if box is None:
        from .sampler import _default_box
        box = _default_box(None, C)
    ga = histogram(sa, box, args.nx, args.ny, "density")
    gb = histogram(sb, box, args.nx, args.ny, "density")
    g = direct_sum_density_grid(ga, gb, n, m, args.t_nodes, args.threads)
    _check(abs(g.mass() - 1) <= 1e-6, "unit_mass", f"mass {g.mass():.12g}")
    io.write_samples_csv(_out(args, "directsum_samples.csv"), s)
    io.write_grid_csv(_out(args, "directsum_grid.csv"), g)
    io.write_grid_pgm(_out(args, "directsum_grid.pgm"), g)
    _report(f"direct sum of {n} x {n} and {m} x {m} blocks")


# ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="shadowlab", description="Numerical shadows of complex matrices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, matrix=True):
        if matrix:
            _add_matrix_args(sp)
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=None)
        return sp

    def raster(sp, nx=200):
        sp.add_argument("--nx", type=int, default=nx)
        sp.add_argument("--ny", type=int, default=nx)
        sp.add_argument("--box", type=_box, default=None, metavar="XMIN,XMAX,YMIN,YMAX")

    sp = common(sub.add_parser("sample", help="Monte Carlo samples and histogram"))
    sp.add_argument("--count", type=_count, default=10 ** 6)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--kind", default="complex_uniform",
                    choices=["complex_uniform", "real_uniform", "simplex"])
    raster(sp)
    sp.set_defaults(func=cmd_sample)

    sp = common(sub.add_parser("density", help="closed-form density"))
    sp.add_argument("--points", type=int, default=501)
    raster(sp)
    sp.set_defaults(func=cmd_density)

    sp = common(sub.add_parser("moments", help="moment table"))
    sp.add_argument("--order", type=int, default=4)
    sp.add_argument("--central", action="store_true")
    sp.set_defaults(func=cmd_moments)

    sp = common(sub.add_parser("equal", help="decide whether two shadows coincide"), matrix=False)
    sp.add_argument("--a", dest="a_path", required=True)
    sp.add_argument("--b", dest="b_path", required=True)
    sp.add_argument("--route", choices=["xi", "trace"], default="xi")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_equal)

    sp = common(sub.add_parser("marginal", help="marginal densities"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float, default=None)
    g.add_argument("--angles", type=int, default=8)
    sp.add_argument("--points", type=int, default=501)
    sp.set_defaults(func=cmd_marginal)

    sp = common(sub.add_parser("critical", help="critical curves and cusps"))
    sp.add_argument("--n-theta", type=int, default=1024)
    sp.set_defaults(func=cmd_critical)

    sp = common(sub.add_parser("zernike", help="Zernike coefficients and partial sum"))
    sp.add_argument("--order", type=int, default=14)
    raster(sp)
    sp.set_defaults(func=cmd_zernike)

    sp = common(sub.add_parser("rankk", help="rank-k numerical range"))
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--T", type=int, default=720)
    sp.set_defaults(func=cmd_rankk)

    sp = common(sub.add_parser("directsum", help="shadow of a block-diagonal matrix"), matrix=False)
    sp.add_argument("--a", dest="a_path", required=True)
    sp.add_argument("--b", dest="b_path", required=True)
    sp.add_argument("--count", type=_count, default=10 ** 5)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--t-nodes", type=int, default=DEFAULT_T_NODES)
    raster(sp, 121)
    sp.set_defaults(func=cmd_directsum)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        for name in ("nx", "ny", "points", "order", "angles", "n_theta", "T", "t_nodes"):
            v = getattr(args, name, None)
            if v is not None and v < 1:
                raise InvalidInputError(f"--{name.replace('_', '-')} must be positive")
        if args.threads is not None and args.threads < 1:
            raise InvalidInputError("--threads must be positive")
        args.func(args)
    except InvalidInputError as exc:
        print(f"shadowlab: error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"shadowlab: numerical failure: {exc.invariant}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"shadowlab: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
