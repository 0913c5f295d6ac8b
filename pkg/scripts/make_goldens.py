"""Regenerate the golden files in src/mslab/goldens/.

Values are closed forms evaluated with mpmath at 40 digits, independently of
the package's own quadrature and root finding. Run from the repository root:

    python3 scripts/make_goldens.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).resolve().parents[1] / "src" / "mslab" / "goldens"

A = mp.mpc("0.4", "0.3")
V_SAMPLES = [mp.mpc("0.3", "-0.2"), mp.mpc("-0.5", "0.1"), mp.mpc("0", "0.25")]


def c(z):
    z = mp.mpc(z)
    return [float(z.real), float(z.imag)]


def m(rows):
    return [[c(x) for x in row] for row in rows]


def poly_mul(p, q):
    out = [mp.mpc(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def sort_roots(rs):
    return sorted(rs, key=lambda r: (round(float(r.real), 12), round(float(r.imag), 12)))


def exm_si():
    s6 = mp.sqrt(6)
    h = [2 / s6, 1 / s6, -1 / s6]
    v = mp.mpf(-1) / 3
    # theta(l) = v  <=>  l^2 - l/2 - v (1 - l/2) = 0
    roots = sort_roots(mp.polyroots([1, -mp.mpf(1) / 2 + v / 2, -v]))
    a = (1 + 1j * mp.sqrt(2)) / 3
    b = mp.conj(a)
    eigvec_a = poly_mul([1, 1], [-b, 1])
    eigvec_b = poly_mul([1, 1], [-a, 1])
    return {
        "id": "exm-si",
        "span": [{"num": [c(1), c(1)]}, {"num": [c(0), c(1), c(1)]}],
        "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 1}, {"point": c(0.5), "mult": 1}]},
        "h": {"num": [c(x) for x in h], "den": [c(1)]},
        "v": c(v),
        "eigenvalues": [c(r) for r in roots],
        "theta_v": {"num": [c(1), c(-2), c(3)], "den": [c(3), c(-2), c(1)]},
        "eigenvectors": [
            {"lambda": c(a), "num": [c(x) for x in eigvec_a]},
            {"lambda": c(b), "num": [c(x) for x in eigvec_b]},
        ],
        "jv_inverse": {
            "phi_zero": c(a),
            "scale": c(3 * mp.sqrt(2) / 2),
            "num": [c(-a), c(1)],
            "den": [c(2), c(-1)],
        },
        "lattice_dims": [0, 1, 1, 2],
    }


def z4():
    cases = []
    for v in V_SAMPLES:
        alpha = mp.conj(v)
        roots = sort_roots([mp.root(v, 4, k) for k in range(4)])
        cases.append({"v": c(v), "alpha": c(alpha), "eigenvalues": [c(r) for r in roots]})
    return {"id": "z4", "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 4}]}, "cases": cases,
            "lattice_size": 16}


def degree2():
    ab = mp.conj(A)
    cases = [{"v": c(v), "matrix": m([[0, v], [1, A - v * ab]])} for v in V_SAMPLES]
    return {
        "id": "degree2",
        "a": c(A),
        "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 1}, {"point": c(A), "mult": 1}]},
        "basis": [{"num": [c(1)], "den": [c(1), c(-ab)]}, {"num": [c(0), c(1)], "den": [c(1), c(-ab)]}],
        "cases": cases,
    }


def ex1():
    ab = mp.conj(A)
    cases = [{"v": c(v), "matrix": m([[0, 0, v], [1, 0, 0], [-ab, 1, A]])} for v in V_SAMPLES]
    return {
        "id": "ex1",
        "a": c(A),
        "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 2}, {"point": c(A), "mult": 1}]},
        "basis": [
            {"num": [c(1)], "den": [c(1)]},
            {"num": [c(0), c(1)], "den": [c(1), c(-ab)]},
            {"num": [c(0), c(0), c(1)], "den": [c(1), c(-ab)]},
        ],
        "cases": cases,
    }


def ex2():
    ab = mp.conj(A)
    r = 1 - abs(A) ** 2
    cases = [
        {"v": c(v), "matrix": m([[0, -ab * v, v], [1, A + ab**2 * v, -ab * v], [0, r, A]])}
        for v in V_SAMPLES
    ]
    return {
        "id": "ex2",
        "a": c(A),
        "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 1}, {"point": c(A), "mult": 2}]},
        "basis": [
            {"num": [c(1)], "den": [c(1), c(-ab)]},
            {"num": [c(0), c(1)], "den": [c(1), c(-ab)]},
            {"num": [c(0), c(-A), c(1)], "den": [c(1), c(-2 * ab), c(ab**2)]},
        ],
        "cases": cases,
    }


def double_root():
    v = 4 * mp.sqrt(3) - 7
    lam = 2 - mp.sqrt(3)
    # l^2 - l/2 - v (1 - l/2) has discriminant zero at this v
    q = [1, -mp.mpf(1) / 2 + v / 2, -v]
    disc = q[1] ** 2 - 4 * q[0] * q[2]
    assert abs(disc) < mp.mpf(10) ** -35
    assert abs(-q[1] / 2 - lam) < mp.mpf(10) ** -35
    return {
        "id": "double-root",
        "theta": {"constant": c(1), "zeros": [{"point": c(0), "mult": 1}, {"point": c(0.5), "mult": 1}]},
        "v": c(v),
        "lambda": c(lam),
        "mult": 2,
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for build in (exm_si, z4, degree2, ex1, ex2, double_root):
        data = build()
        path = OUT / f"{data['id']}.json"
        path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
        print("wrote", path.relative_to(OUT.parents[2]))


if __name__ == "__main__":
    main()
