"""Regenerate ``frozen.json`` from closed forms in 50-digit arithmetic.

This script deliberately does not import the package under test. Run it
from the repository root::

    python3 tests/oracles/generate_oracles.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50


def f17(v):
    return float(mp.nstr(v, 25))


def vec(*vs):
    return [f17(v) for v in vs]


def pnorm_G(p, x):
    p = mp.mpf(p)
    a = [abs(mp.mpf(t)) for t in x]
    sg = [mp.sign(t) for t in x]
    fx = sum(t ** p for t in a)
    den = p * sum(t ** (2 * p - 2) for t in a)
    return [mp.mpf(t) - fx * ai ** (p - 1) * si / den for t, ai, si in zip(x, a, sg)]


def least_squares_G(A, b, eps, p, x):
    A = mp.matrix(A)
    b = mp.matrix(b)
    x = mp.matrix(x)
    r = A * x - b
    nr = mp.norm(r)
    fx = nr ** p - mp.mpf(eps) ** p
    if fx <= 0:
        return list(x)
    g = A.T * r
    step = fx / (p * nr ** (p - 2) * mp.norm(g) ** 2)
    return list(x - step * g)


def weighted_p2_G(normals, offsets, w, x):
    """Two halfspaces, p = 2 display: x - (sum w d^2)/(2||sum w (x - P x)||^2) sum w (x - P x)."""
    x = mp.matrix(x)
    fx = mp.mpf(0)
    s = mp.matrix([0, 0])
    for a, b, wi in zip(normals, offsets, w):
        a = mp.matrix(a)
        ex = (a.T * x)[0] - b
        if ex > 0:
            v = ex / mp.norm(a) ** 2 * a
            fx += wi * mp.norm(v) ** 2
            s += wi * v
    return list(x - fx / (2 * mp.norm(s) ** 2) * s)


def accelerated_G(diag, x):
    x = [mp.mpf(t) for t in x]
    r = [t - d * t for t, d in zip(x, diag)]
    fx2 = sum(t * ri for t, ri in zip(x, r))
    rr = sum(ri * ri for ri in r)
    return [t - fx2 / rr * ri for t, ri in zip(x, r)]


def main():
    s6 = mp.sqrt(6)
    out = {}

    out["pnorm_G"] = {
        "p4_(1,1)": vec(*pnorm_G(4, [1, 1])),
        "p3_(2,-1)": vec(*pnorm_G(3, [2, -1])),
        "p1.5_(0.7,-2.2)": vec(*pnorm_G(1.5, [mp.mpf("0.7"), mp.mpf("-2.2")])),
    }
    out["pnorm_nonmonotone_inner"] = {
        str(xi): f17(4 * (1 - (1 + mp.mpf(xi) ** 1.5) / (1.5 * (1 + mp.mpf(xi) ** 1.0))))
        for xi in (10, 100, 1000)
    }
    out["least_squares_G"] = {
        "A,b=(1,0,1),eps=1,p=1,x=(2,1)": vec(*least_squares_G(
            [[1, 2], [0, 1], [1, -1]], [1, 0, 1], 1, 1, [2, 1])),
        "A,b=(1,0,1),eps=0.5,p=3,x=(-1,2)": vec(*least_squares_G(
            [[1, 2], [0, 1], [1, -1]], [1, 0, 1], mp.mpf("0.5"), 3, [-1, 2])),
    }
    out["weighted_p2_G"] = {
        "x=(3,2)": vec(*weighted_p2_G([[1, 0], [0, 1]], [0, 0], [mp.mpf(1) / 2] * 2, [3, 2])),
    }
    out["accelerated_G"] = {
        "diag(1/2,2/3,3/4),x=(1,-2,3)": vec(*accelerated_G(
            [mp.mpf(1) / 2, mp.mpf(2) / 3, mp.mpf(3) / 4], [1, -2, 3])),
    }
    out["exp_abs_G"] = {str(t): f17(t - mp.sign(t) * (1 - mp.e ** (-abs(mp.mpf(t)))))
                        for t in (-2, 0.5, 1, 3)}
    # (f')^2 - f f'' for exp(t^2) - 1 at 1.3, and t^4 - 1 at 2
    t = mp.mpf("1.3")
    out["exp_sq_criterion_1.3"] = f17((2 * t * mp.e ** (t * t)) ** 2
                                      - (mp.e ** (t * t) - 1) * (2 + 4 * t * t) * mp.e ** (t * t))
    out["quartic_criterion_2"] = f17((4 * 8) ** 2 - 15 * 12 * 4)
    # prox of t^4 at 2: y + 4 y^3 = 2
    y = mp.findroot(lambda y: y + 4 * y ** 3 - 2, 0.7)
    out["prox_t4_at_2"] = f17(y)
    g = y ** 4 + (2 - y) ** 2 / 2
    out["moreau_t4_G_at_2"] = f17(2 - g / (2 - y))
    out["moreau_t4_value_at_2"] = f17(g)
    # Yamagishi-Yamada worked example
    out["yy"] = {
        "D_hi": f17(s6 / 2),
        "theta_2": f17(mp.mpf(16) / 6 - 1),
        "Z_2": f17((4 + 4 * s6) / 12),
        "Z_1.1": f17((mp.mpf("1.21") + 1) / mp.mpf("2.2")),
        "Z_closed_3": f17((9 + 2 * s6 * 3) / 18),
        "y": {str(x): f17(mp.mpf(72) ** (mp.mpf(1) / 5) / 6 * (5 * mp.mpf(x) - 2 * s6) ** (mp.mpf(6) / 5))
              for x in ("1.3", "2", "3", "5")},
        "q_minus_q2": {str(x): f17(mp.mpf(6) / 5 * (mp.log(5 * mp.mpf(x) / 6 - s6 / 3)
                                                     - mp.log(mp.mpf(10) / 6 - s6 / 3)))
                       for x in ("1.3", "3", "5")},
    }
    # rate factors along d_C^2 for the unit ball from (3, 4): d halves each step
    out["dist_sq_ball_G_(3,4)"] = vec(mp.mpf(3) / 5 * 3, mp.mpf(4) / 5 * 3)
    path = Path(__file__).with_name("frozen.json")
    path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
