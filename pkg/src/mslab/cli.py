"""``mslab`` command line: analyze, verify, reproduce, sweep.

All commands read a JSON configuration (``--input``) describing ``theta``
and one of ``h``, ``span`` (spanning functions of ``M``), ``v`` (no ``h``;
operators on ``K_theta`` only) or ``random`` (a seeded random instance).
Exit status is 0 on success, 2 for invalid input and 3 for a numerical
failure; errors are reported under their stable class names.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings
from importlib import resources

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _json
from .blaschke import BlaschkeProduct, frostman_shift, solve_theta_eq
from .config import Tolerances, get_tolerances, use_tolerances
from .crofoot import (
    crofoot_inverse,
    crofoot_inverse_multiplier,
    crofoot_matrix,
    intertwining_check,
    invariant_subspace_lattice,
    lattice_summary,
    shifted_space,
)
from .errors import ConfigError, GridTooLarge, MslabError, UnknownExample
from .model_space import ModelSpace, conjugation_C
from .nearly_invariant import PerturbedShift, extremal_from_span, isometry_gram, make_nearly_space, random_nearly_space
from .operators import (
    av_matrix,
    bv_matrix,
    cyclicity_check,
    d_symmetry_check,
    defect_operators,
    defect_residuals,
    kernel_action_check,
    matrix_in_basis,
)
from .rational import BoundarySymbol, RationalFn, circle_nodes
from .spectral import CROSS_TOL, _cross_validate, eigenvector, full_spectrum, generalized_eigenvector, point_spectrum

EXAMPLES = ("exm-si", "z4", "degree2", "ex1", "ex2", "double-root")
MAX_GRID = 10**6


# configuration

def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    return cfg


def tolerance_overrides(cfg, args):
    over = dict(cfg.get("tolerances", {}))
    unknown = set(over) - {f for f in Tolerances.__dataclass_fields__}
    if unknown:
        raise ConfigError(f"unknown tolerance fields: {sorted(unknown)}")
    if getattr(args, "tol", None) is not None:
        over["verify_tol"] = args.tol
    if getattr(args, "quad_max", None) is not None:
        over["quad_max"] = args.quad_max
    Tolerances(**over)
    return over


def build_space(cfg, seed=0):
    """NearlySpace (or PerturbedShift) described by a configuration."""
    try:
        if "random" in cfg:
            degree = int(cfg["random"].get("degree", 3))
            return random_nearly_space(degree, np.random.default_rng(seed))
        theta = BlaschkeProduct.from_json(cfg["theta"])
        order = cfg.get("zero_order")
        order = None if order is None else _json.parse_cplx_list(order)
        if "h" in cfg:
            return make_nearly_space(RationalFn.from_json(cfg["h"]), theta, order)
        if "span" in cfg:
            h, _ = extremal_from_span([RationalFn.from_json(f) for f in cfg["span"]])
            return make_nearly_space(h, theta, order)
        if "v" in cfg:
            return PerturbedShift(ModelSpace(theta, order), _json.parse_cplx(cfg["v"]))
    except MslabError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"invalid configuration: {exc!r}") from None
    raise ConfigError("configuration needs one of 'h', 'span', 'v' or 'random'")


# analyze

def cmd_analyze(cfg, seed=0):
    ns = build_space(cfg, seed)
    report = full_spectrum(ns)
    lattice = invariant_subspace_lattice(ns)
    return {
        "dim": ns.dim,
        "theta": ns.theta.to_json(),
        "h": None if ns.h is None else ns.h.to_json(),
        "v": _json.cplx(ns.v),
        "theta_v": frostman_shift(ns.theta, ns.v).to_json(),
        "spectrum": report.to_json(),
        "lattice": lattice_summary(lattice),
    }


# verify

def _suite(name, fn, threshold):
    try:
        value, ok, detail = fn()
    except MslabError as exc:
        return {"name": name, "passed": False, "error": exc.name, "message": str(exc)}
    row = {"name": name, "residual": float(value), "threshold": threshold, "passed": bool(ok and value < threshold)}
    if detail is not None:
        row["detail"] = detail
    return row


def cmd_verify(cfg, seed=0, tol=None):
    tol = get_tolerances().verify_tol if tol is None else tol
    ns = build_space(cfg, seed)
    ms, v, n = ns.ms, ns.v, ns.dim
    rng = np.random.default_rng(seed)
    w = 0.0
    while abs(w) < 0.05:
        w = complex(0.8 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
    C = conjugation_C(ms)
    eye = np.eye(n)

    def ortho():
        return np.abs(ms.gram() - eye).max(), True, None

    def c_square():
        return np.abs(C.square() - eye).max(), True, None

    def isometry():
        if ns.h is None:
            return 0.0, True, "no h: skipped"
        return np.abs(isometry_gram(ns.h, ms) - eye).max(), True, None

    def d_symmetry():
        if ns.h is None:
            A = av_matrix(ms, v).entries
            return np.linalg.norm(C.sandwich(A) - A.conj().T, 2), True, "C A_v C = B_v"
        z = RationalFn.z()
        sigmas = {"z": z, "z+conj(z)": BoundarySymbol([(z, 1.0), (1.0, z)])}
        vals = {k: d_symmetry_check(ns, s) for k, s in sigmas.items()}
        return max(vals.values()), True, vals

    def crofoot_unitary():
        J = crofoot_matrix(ms, v)
        Ji = crofoot_inverse(J.codomain, v, ms)
        r1 = np.linalg.norm(J.entries.conj().T @ J.entries - eye, 2)
        r2 = np.linalg.norm(J.entries @ Ji.entries - eye, 2)
        return max(r1, r2), True, None

    def intertwining():
        return intertwining_check(ns), True, None

    def defects():
        d = defect_operators(ms, v)
        res = defect_residuals(ms, v, d)
        return max(res.values()), d.ranks == (1, 1), {"ranks": list(d.ranks)}

    def cyclic():
        r = cyclicity_check(ms, v)
        return 0.0, all(k == n for k in r), r._asdict()

    def kernel_actions():
        res = kernel_action_check(ms, v, w)
        return max(res.values()), True, {"w": _json.cplx(w), **res}

    def spectral():
        roots = solve_theta_eq(ns.theta, v)
        eigs = np.linalg.eigvals(av_matrix(ms, v).entries)
        count = sum(m for _, m in roots)
        return _cross_validate(roots, eigs), count == n, {"count": count}

    def lattice():
        L = invariant_subspace_lattice(ns)
        expected = math.prod(m + 1 for _, m in shifted_space(ms, v).theta.zeros)
        return max(s.residual for s in L), len(L) == expected, {"size": len(L), "expected": expected}

    suites = [
        _suite("orthonormality", ortho, tol),
        _suite("conjugation_square", c_square, tol),
        _suite("isometry", isometry, tol),
        _suite("d_symmetry", d_symmetry, tol),
        _suite("crofoot_unitary", crofoot_unitary, tol),
        _suite("intertwining", intertwining, tol),
        _suite("defect_operators", defects, tol),
        _suite("cyclicity", cyclic, tol),
        _suite("kernel_actions", kernel_actions, tol),
        _suite("spectral_consistency", spectral, CROSS_TOL),
        _suite("lattice_invariance", lattice, tol),
    ]
    return {"dim": n, "v": _json.cplx(v), "suites": suites, "passed": all(s["passed"] for s in suites)}


# reproduce

def load_golden(example_id):
    if example_id not in EXAMPLES:
        raise UnknownExample(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLES)}")
    text = resources.files("mslab").joinpath("goldens", f"{example_id}.json").read_text()
    return json.loads(text)


def _fit_residual(f, g, z):
    """``min_c ||f - c g|| / ||f||`` over sample points: zero iff proportional."""
    fz = f(z)
    gz = g(z)
    c = np.vdot(gz, fz) / np.vdot(gz, gz)
    return float(np.linalg.norm(fz - c * gz) / np.linalg.norm(fz))


def _dual_kernel_residual(matrix, basis, lam):
    """``||([A]^H - conj(lambda)) conj(f(lambda))||`` for a matrix ``[A]`` in ``basis``.

    Holds exactly when ``k_lambda`` is an eigenvector of the adjoint, in any
    basis: ``[A]^T f(lambda) = lambda f(lambda)`` expands ``<A f_j, k_lambda>``.
    """
    y = np.array([np.conj(f(lam)) for f in basis])
    return float(np.linalg.norm(matrix.conj().T @ y - np.conj(lam) * y) / np.linalg.norm(y))


def _reproduce_exm_si(g):
    theta = BlaschkeProduct.from_json(g["theta"])
    h, _ = extremal_from_span([RationalFn.from_json(f) for f in g["span"]])
    ns = make_nearly_space(h, theta)
    dev = {}
    want_h = RationalFn.from_json(g["h"])
    dev["h"] = float(np.abs(h.num.coeffs - want_h.num.coeffs).max()) if h.num.degree == want_h.num.degree else np.inf
    dev["v"] = abs(ns.v - _json.parse_cplx(g["v"]))
    got = point_spectrum(ns)
    want = _json.parse_cplx_list(g["eigenvalues"])
    dev["eigenvalues"] = max(abs(l - w) for (l, _), w in zip(got, want)) if len(got) == len(want) else np.inf
    z = circle_nodes(64)
    tv = frostman_shift(theta, ns.v)
    dev["theta_v"] = float(np.abs(tv(z) - RationalFn.from_json(g["theta_v"])(z)).max())
    for item in g["eigenvectors"]:
        lam = _json.parse_cplx(item["lambda"])
        f = eigenvector(ns, lam)
        dev[f"eigenvector({lam:.4f})"] = _fit_residual(f, RationalFn(_json.parse_cplx_list(item["num"])), z)
    jv = g["jv_inverse"]
    a = _json.parse_cplx(jv["phi_zero"])
    theta1 = BlaschkeProduct([a]).to_rational()
    img = crofoot_inverse_multiplier(tv, ns.v) * theta1 * RationalFn([1.0], [1.0, -a])
    want_img = RationalFn(_json.parse_cplx_list(jv["num"]), _json.parse_cplx_list(jv["den"])) * _json.parse_cplx(jv["scale"])
    dev["jv_inverse"] = float(np.abs(img(z) - want_img(z)).max())
    lattice = invariant_subspace_lattice(ns)
    dev["lattice_dims"] = 0.0 if [s.dim for s in lattice] == g["lattice_dims"] else np.inf
    lines = [RationalFn(_json.parse_cplx_list(item["num"])) for item in g["eigenvectors"]]
    worst = 0.0
    for s in lattice:
        if s.dim == 1:
            worst = max(worst, min(_fit_residual(s.basis_fns[0], e, z) for e in lines))
    dev["lattice_lines"] = worst
    dev["lattice_residual"] = max(s.residual for s in lattice)
    return dev


def _reproduce_z4(g):
    theta = BlaschkeProduct.from_json(g["theta"])
    ms = ModelSpace(theta)
    monomials = [RationalFn.z(k) for k in range(4)]
    dev = {}
    for k, case in enumerate(g["cases"]):
        v = _json.parse_cplx(case["v"])
        alpha = _json.parse_cplx(case["alpha"])
        B = matrix_in_basis(ms, bv_matrix(ms, v), monomials)
        dev[f"case{k}:B^4=alpha I"] = float(np.abs(np.linalg.matrix_power(B, 4) - alpha * np.eye(4)).max())
        dev[f"case{k}:corner"] = abs(B[3, 0] - alpha)
        ps = PerturbedShift(ms, v)
        got = [l for l, _ in point_spectrum(ps)]
        want = _json.parse_cplx_list(case["eigenvalues"])
        dev[f"case{k}:eigenvalues"] = max(min(abs(l - w) for l in got) for w in want)
        size = len(invariant_subspace_lattice(ps))
        dev[f"case{k}:lattice_size"] = 0.0 if size == g["lattice_size"] else np.inf
    return dev


def _reproduce_matrices(g):
    theta = BlaschkeProduct.from_json(g["theta"])
    ms = ModelSpace(theta)
    basis = [RationalFn.from_json(f) for f in g["basis"]]
    dev = {}
    for k, case in enumerate(g["cases"]):
        v = _json.parse_cplx(case["v"])
        M = matrix_in_basis(ms, av_matrix(ms, v), basis)
        dev[f"case{k}:matrix"] = float(np.abs(M - _json.parse_matrix({"entries": case["matrix"]})).max())
        roots = solve_theta_eq(theta, v)
        dev[f"case{k}:adjoint_kernel"] = max(_dual_kernel_residual(M, basis, lam) for lam, _ in roots)
    return dev


def _reproduce_double_root(g):
    theta = BlaschkeProduct.from_json(g["theta"])
    ps = PerturbedShift(ModelSpace(theta), _json.parse_cplx(g["v"]))
    roots = point_spectrum(ps)
    lam = _json.parse_cplx(g["lambda"])
    dev = {"roots": 0.0 if len(roots) == 1 and roots[0][1] == g["mult"] else np.inf}
    dev["lambda"] = min(abs(r - lam) for r, _ in roots)
    generalized_eigenvector(ps, roots[0][0], 1)
    dev["generalized_eigenvector"] = 0.0
    return dev


def cmd_reproduce(example_id, tol=None):
    tol = get_tolerances().verify_tol if tol is None else tol
    g = load_golden(example_id)
    run = {
        "exm-si": _reproduce_exm_si,
        "z4": _reproduce_z4,
        "degree2": _reproduce_matrices,
        "ex1": _reproduce_matrices,
        "ex2": _reproduce_matrices,
        "double-root": _reproduce_double_root,
    }[example_id]
    dev = {k: float(x) for k, x in run(g).items()}
    worst = max(dev.values())
    return {"example": example_id, "deviations": dev, "max_deviation": worst, "tolerance": tol,
            "passed": worst < tol}


# sweep

def sweep_grid(radial, angular, max_radius):
    if radial < 1 or angular < 1:
        raise ConfigError("grid counts must be positive")
    if radial * angular > MAX_GRID:
        raise GridTooLarge(f"{radial} x {angular} grid exceeds {MAX_GRID} points")
    if not 0 <= max_radius < 1:
        raise ConfigError("max_radius must lie in [0, 1)")
    rays = []
    for j in range(angular):
        phase = np.exp(2j * np.pi * j / angular)
        # exact axes, so that e.g. v = -1/3 is hit without a 1e-17 imaginary part
        phase = complex(np.where(abs(phase.real) < 1e-15, 0, phase.real), np.where(abs(phase.imag) < 1e-15, 0, phase.imag))
        rs = [max_radius * k / (radial - 1) for k in range(radial)] if radial > 1 else [max_radius]
        rays.append([r * phase for r in rs])
    return rays


def _match(prev, cur):
    """Reorder ``cur`` to follow ``prev`` by nearest-neighbour assignment."""
    cost = np.abs(np.asarray(prev)[:, None] - np.asarray(cur)[None, :])
    _, cols = linear_sum_assignment(cost)
    return [cur[c] for c in cols]


def cmd_sweep(cfg, radial=None, angular=None, max_radius=None):
    """Rows ``(v, lambda, mult)`` over a polar grid of ``v``, with branches
    followed along each ray."""
    theta = BlaschkeProduct.from_json(cfg["theta"]) if "theta" in cfg else build_space(cfg).theta
    grid_cfg = cfg.get("sweep", {})
    radial = int(grid_cfg.get("radial", 8) if radial is None else radial)
    angular = int(grid_cfg.get("angular", 8) if angular is None else angular)
    max_radius = float(grid_cfg.get("max_radius", 0.9) if max_radius is None else max_radius)
    rays = sweep_grid(radial, angular, max_radius)
    near = 2 * get_tolerances().cluster_tol
    rows = []
    collisions = 0
    seen_origin = False
    for ray in rays:
        prev = None
        for v in ray:
            roots = solve_theta_eq(theta, v)
            expanded = [r for r, m in roots for _ in range(m)]
            if prev is not None:
                expanded = _match(prev, expanded)
            prev = expanded
            distinct = [r for r, _ in roots]
            for i in range(len(distinct)):
                for j in range(i + 1, len(distinct)):
                    if abs(distinct[i] - distinct[j]) < near:
                        collisions += 1
            if v == 0:
                if seen_origin:
                    continue
                seen_origin = True
            mult = {}
            order = []
            for r in expanded:
                key = next((k for k in order if abs(k - r) < 1e-12), None)
                if key is None:
                    order.append(r)
                    mult[r] = 0
                    key = r
                mult[key] += 1
            for r in order:
                rows.append((v.real, v.imag, r.real, r.imag, mult[r]))
    if collisions:
        warnings.warn(f"{collisions} near-collisions of root branches (distance < {near:g}); "
                      "branch labels may swap there", RuntimeWarning, stacklevel=2)
    return rows


def sweep_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["v_re", "v_im", "lambda_re", "lambda_im", "mult"])
    for vr, vi, lr, li, m in rows:
        w.writerow([repr(float(vr)), repr(float(vi)), repr(float(lr)), repr(float(li)), m])
    return buf.getvalue()


# output

def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            val = obj[k]
            if isinstance(val, (dict, list)) and not val:
                lines.append(f"{pad}{k}: {'[]' if isinstance(val, list) else '{}'}")
            elif isinstance(val, (dict, list)) and not _is_pair(val):
                lines.append(f"{pad}{k}:")
                lines.append(_text(val, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(val)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, list) and not item:
                lines.append(f"{pad}- []")
            elif isinstance(item, (dict, list)) and not _is_pair(item):
                lines.append(f"{pad}-")
                lines.append(_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return "\n".join(lines)


def _is_pair(x):
    return isinstance(x, list) and len(x) == 2 and all(isinstance(t, float) for t in x)


def _scalar(x):
    if _is_pair(x):
        return f"{complex(*x):.12g}"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def render(obj, fmt):
    if fmt == "text":
        return _text(obj) + "\n"
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    p = argparse.ArgumentParser(prog="mslab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="JSON configuration file")
    common.add_argument("--tol", type=float, help="verification tolerance (default 1e-9)")
    common.add_argument("--quad-max", type=int, help="maximum quadrature nodes, a power of two >= 256")
    common.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="spectrum, eigenvectors and lattice")
    sub.add_parser("verify", parents=[common], help="run all identity suites")
    rp = sub.add_parser("reproduce", parents=[common], help="compare a worked example with its golden file")
    rp.add_argument("example", nargs="?", help=f"one of {', '.join(EXAMPLES)}")
    sp = sub.add_parser("sweep", parents=[common], help="CSV of eigenvalue loci over a grid of v")
    sp.add_argument("--radial", type=int)
    sp.add_argument("--angular", type=int)
    sp.add_argument("--max-radius", type=float)
    return p


def _run(args):
    cfg = load_config(args.input) if args.input else {}
    over = tolerance_overrides(cfg, args)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    with use_tolerances(**over):
        if args.command == "analyze":
            return render(cmd_analyze(_need(cfg, args), seed), args.output), 0
        if args.command == "verify":
            res = cmd_verify(_need(cfg, args), seed)
            return render(res, args.output), 0 if res["passed"] else 3
        if args.command == "reproduce":
            example = args.example or cfg.get("example")
            if example is None:
                raise ConfigError("reproduce needs an example id")
            res = cmd_reproduce(example)
            return render(res, args.output), 0 if res["passed"] else 3
        rows = cmd_sweep(_need(cfg, args), args.radial, args.angular, args.max_radius)
        if args.output == "text":
            return "".join(f"{vr:.6g}{vi:+.6g}i  {lr:.12g}{li:+.12g}i  x{m}\n" for vr, vi, lr, li, m in rows), 0
        return sweep_csv(rows), 0


def _need(cfg, args):
    if not cfg:
        raise ConfigError(f"{args.command} needs --input")
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text, code = _run(args)
    except MslabError as exc:
        err = {"error": exc.name, "message": str(exc), "exit_code": exc.exit_code}
        sys.stdout.write(render(err, args.output))
        print(f"mslab: {exc.name}: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
