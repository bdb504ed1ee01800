"""High-precision reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/compute_oracles.py
Every value is evaluated directly from closed forms with mpmath at 50 digits,
independently of the C++ implementation.
"""
import itertools

import mpmath as mp

mp.mp.dps = 50


def gauss25_log_density(x):
    grid = [0, 2, 4, 6, 8]
    var = mp.mpf(5)
    total = mp.mpf(0)
    for k, (a, b) in enumerate(itertools.product(grid, grid), start=1):
        w = mp.mpf(k) / 325
        q = ((x[0] - a) ** 2 + (x[1] - b) ** 2) / var
        total += w * mp.e ** (-q / 2) / (2 * mp.pi * var)
    return mp.log(total)


def t_log_pdf(z, loc, dof, p):
    q = (z[0] - loc[0]) ** 2 / 100 + sum((z[i] - loc[i]) ** 2 for i in range(1, p))
    log_c = (mp.loggamma((dof + p) / 2) - mp.loggamma(dof / 2)
             - (p / mp.mpf(2)) * mp.log(dof * mp.pi) - mp.log(10))
    return log_c - (dof + p) / 2 * mp.log(1 + q / dof)


def banana3_log_density(x, dof=mp.mpf(7)):
    comps = [((0, 0), mp.mpf("0.03"), mp.mpf("0.4")),
             ((0, 5), mp.mpf("0.05"), mp.mpf("0.4")),
             ((15, 15), mp.mpf("0.03"), mp.mpf("0.2"))]
    total = mp.mpf(0)
    for loc, b, w in comps:
        z = (x[0], x[1] - b * x[0] ** 2 + 100 * b)
        total += w * mp.e ** t_log_pdf(z, loc, dof, 2)
    return mp.log(total)


def sigmoid_step(e_start, e_end, max_iter, d):
    return e_start - (e_start - e_end) / (1 + mp.e ** (-mp.mpf("0.01") * (d - mp.mpf(max_iter) / 2)))


if __name__ == "__main__":
    print("gauss25 log density at (4,4):", mp.nstr(gauss25_log_density((4, 4)), 20))
    print("banana3 log density at (5,5), r=7:", mp.nstr(banana3_log_density((5, 5)), 20))
    print("t log pdf at mode, p=2, r=7:", mp.nstr(t_log_pdf((0, 0), (0, 0), mp.mpf(7), 2), 20))
    print("sigmoid step (1, 0.01, M=1000, d=0):", mp.nstr(sigmoid_step(1, mp.mpf("0.01"), 1000, 0), 20))
    print("kernel d=2 r=1 |x-y|=1:", mp.nstr(mp.e ** -1 / mp.pi, 20))
    print("kernel grad d=2 r=1 x=(1,0):", mp.nstr(-2 * mp.e ** -1 / mp.pi, 20))
    print("log N(0; 0, I2):", mp.nstr(-mp.log(2 * mp.pi), 20))
    print("log N((1,0); 0, I2):", mp.nstr(-mp.log(2 * mp.pi) - mp.mpf(1) / 2, 20))
