#!/usr/bin/env python3
"""Regenerate data/general_biquadratics.json.

The biquadratic forms B_ij of the general genus-2 Kummer surface are
recovered numerically:

  * for random sextics f = (x - r) g(x) over a prime field, the map
    x = r + 1/x', y = y'/x'^3 sends f to a quintic q, where Cantor's
    algorithm gives k(A+B), k(A-B) for random divisors A, B;
  * per curve, the 10 forms are the one-dimensional solution of
    B(k(A), k(B)) proportional to k(A+B) k(A-B)^T + k(A-B) k(A+B)^T,
    normalised by B(x, O) = x x^T with O = (0, 0, 0, 1);
  * every coefficient is a weighted-homogeneous polynomial in f0..f6,
    interpolated across curves and lifted to small rationals.

Two primes are used and the lifted tables must agree.
"""

import itertools
import json
import math
import random
import sys
from fractions import Fraction

import numpy as np

MONO2 = [m for m in itertools.product(range(3), repeat=4) if sum(m) == 2]
MONO2.sort(reverse=True)
PAIRS = [(a, b) for a in range(10) for b in range(a, 10)]
ENTRIES = [(i, j) for i in range(4) for j in range(i, 4)]
WX = (0, -1, -2, 2)
WY = (0, 0, 0, 1)


def inv(a, p):
    return pow(a % p, p - 2, p)


def sqrt_mod(a, p):
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    # p = 3 mod 4 for both primes used here
    return pow(a, (p + 1) // 4, p)


# --- univariate polynomials, low degree first -----------------------------

def trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def pneg(a, p):
    return [(-x) % p for x in a]


def psub(a, b, p):
    return padd(a, pneg(b, p), p)


def pmul(a, b, p):
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] = (r[i + j] + x * y) % p
    return trim(r)


def pdivmod(a, b, p):
    a = a[:]
    q = [0] * max(len(a) - len(b) + 1, 1)
    il = inv(b[-1], p)
    while len(a) >= len(b) and a:
        c = a[-1] * il % p
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        trim(a)
    return trim(q), a


def pmonic(a, p):
    il = inv(a[-1], p)
    return [x * il % p for x in a]


def xgcd(a, b, p):
    r0, r1 = a[:], b[:]
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1, p), p)
        t0, t1 = t1, psub(t0, pmul(q, t1, p), p)
    il = inv(r0[-1], p)
    return [x * il % p for x in r0], [x * il % p for x in s0], [x * il % p for x in t0]


def peval(a, x, p):
    r = 0
    for c in reversed(a):
        r = (r * x + c) % p
    return r


# --- Jacobian of y^2 = q(x), deg q = 5 ------------------------------------

def cantor_add(d1, d2, q, p):
    u1, v1 = d1
    u2, v2 = d2
    d0, e1, e2 = xgcd(u1, u2, p)
    d, c1, s3 = xgcd(d0, padd(v1, v2, p), p)
    s1 = pmul(c1, e1, p)
    s2 = pmul(c1, e2, p)
    u = pdivmod(pmul(u1, u2, p), pmul(d, d, p), p)[0]
    num = padd(padd(pmul(pmul(s1, u1, p), v2, p), pmul(pmul(s2, u2, p), v1, p), p),
               pmul(s3, padd(pmul(v1, v2, p), q, p), p), p)
    v = pdivmod(pdivmod(num, d, p)[0], u, p)[1]
    while len(u) - 1 > 2:
        u = pmonic(pdivmod(psub(q, pmul(v, v, p), p), u, p)[0], p)
        v = pdivmod(pneg(v, p), u, p)[1]
    return pmonic(u, p), v


def random_point(q, p, rng):
    while True:
        x = rng.randrange(p)
        y = sqrt_mod(peval(q, x, p), p)
        if y is not None and y != 0:
            return x, y


def random_divisor(q, p, rng):
    while True:
        (x1, y1), (x2, y2) = random_point(q, p, rng), random_point(q, p, rng)
        if x1 != x2:
            break
    u = pmul([-x1 % p, 1], [-x2 % p, 1], p)
    l1 = (y1 - y2) * inv(x1 - x2, p) % p
    return u, trim([(y1 - l1 * x1) % p, l1])


def kummer_on_f(d, f, r, p):
    """Kummer coordinates on y^2 = f of a divisor given on the quintic model."""
    u, v = d
    if len(u) != 3 or u[0] == 0:
        return None
    s1, p1 = (-u[1]) % p, u[0]
    b0 = v[0] if len(v) > 0 else 0
    b1 = v[1] if len(v) > 1 else 0
    disc = (s1 * s1 - 4 * p1) % p
    if disc == 0:
        return None
    ip = inv(p1, p)
    s = (2 * r + s1 * ip) % p
    pr = (r * r + r * s1 * ip + ip) % p
    yy = (b1 * b1 * p1 + b1 * b0 * s1 + b0 * b0) * pow(ip, 3, p) % p
    dd = disc * ip * ip % p
    f0 = (2 * f[0] + f[1] * s + 2 * f[2] * pr + f[3] * s * pr + 2 * f[4] * pr * pr
          + f[5] * pr * pr * s + 2 * f[6] * pr * pr * pr) % p
    return [1, s, pr, (f0 - 2 * yy) * inv(dd, p) % p]


def quintic_model(f, r, p):
    q = []
    lin = [1, r]  # r x' + 1
    for i, fi in enumerate(f):
        term = [fi]
        for _ in range(i):
            term = pmul(term, lin, p)
        term = [0] * (6 - i) + term
        q = padd(q, term, p)
    assert len(q) <= 6
    return q


# --- modular linear algebra ----------------------------------------------

def kernel_mod(m, p):
    m = np.array(m, dtype=np.int64) % p
    rows, cols = m.shape
    piv_cols = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = m[r] * inv(int(m[r, c]), p) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r]) % p) % p
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in set(piv_cols)]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(piv_cols):
            v[pc] = int(-m[i, fc]) % p
        basis.append(v)
    return basis


def per_curve_table(f, r, p, rng, samples=80):
    q = quintic_model(f, r, p)
    rows = []
    while len(rows) < 9 * samples:
        a, b = random_divisor(q, p, rng), random_divisor(q, p, rng)
        nb = (b[0], pneg(b[1], p))
        ks = [kummer_on_f(d, f, r, p) for d in (a, b, cantor_add(a, b, q, p), cantor_add(a, nb, q, p))]
        if any(k is None for k in ks):
            continue
        ka, kb, xi, ze = ks
        mx = {(i, j): (xi[i] * ze[j] + xi[j] * ze[i]) % p for i, j in ENTRIES}
        basis = []
        for al, be in PAIRS:
            ma, mb = MONO2[al], MONO2[be]
            xa = ya = xb = yb = 1
            for t in range(4):
                xa = xa * pow(ka[t], ma[t], p) % p
                ya = ya * pow(kb[t], ma[t], p) % p
                xb = xb * pow(ka[t], mb[t], p) % p
                yb = yb * pow(kb[t], mb[t], p) % p
            basis.append(xa * yb % p if al == be else (xa * yb + xb * ya) % p)
        m11 = mx[(0, 0)]
        for e, ent in enumerate(ENTRIES):
            if e == 0:
                continue
            row = [0] * (55 * 10)
            for k in range(55):
                row[55 * e + k] = basis[k] * m11 % p
                row[k] = (-basis[k] * mx[ent]) % p
            rows.append(row)
    ker = kernel_mod(rows, p)
    if len(ker) != 1:
        raise RuntimeError(f"kernel dimension {len(ker)}")
    w = ker[0]
    # normalise: coefficient of x1^2 y4^2 in B11 is 1
    i1, i4 = MONO2.index((2, 0, 0, 0)), MONO2.index((0, 0, 0, 2))
    slot = PAIRS.index((min(i1, i4), max(i1, i4)))
    s = inv(w[slot], p)
    return [x * s % p for x in w]


def f_monomials(deg, weight):
    out = []
    for e in itertools.product(range(deg + 1), repeat=7):
        if sum(e) == deg and sum(i * e[i] for i in range(7)) == weight:
            out.append(e)
    return out


def slot_grading(e, pair):
    i, j = ENTRIES[e]
    ma, mb = MONO2[pair[0]], MONO2[pair[1]]
    wx = 4 + WX[i] + WX[j] - sum(WX[t] * (ma[t] + mb[t]) for t in range(4))
    wy = 2 + WY[i] + WY[j] - sum(WY[t] * (ma[t] + mb[t]) for t in range(4))
    return wy, wx


def lift(x, p):
    # rational reconstruction with small numerator and denominator
    for den in range(1, 65):
        n = x * den % p
        if n > p // 2:
            n -= p
        if abs(n) < 1 << 20:
            return Fraction(n, den)
    raise RuntimeError("no small rational lift")


def derive(p, seed, ncurves):
    rng = random.Random(seed)
    curves, tables = [], []
    for c in range(ncurves):
        r = rng.randrange(p)
        g = [rng.randrange(1, p) for _ in range(6)]
        f = pmul([-r % p, 1], g, p)
        tables.append(per_curve_table(f, r, p, rng))
        curves.append(f)
        print(f"p={p}: curve {c + 1}/{ncurves}", file=sys.stderr)
    table = {}
    for e in range(10):
        for k, pair in enumerate(PAIRS):
            d, wt = slot_grading(e, pair)
            vals = [t[55 * e + k] for t in tables]
            mons = f_monomials(d, wt) if d >= 0 else []
            if not mons:
                if any(vals):
                    raise RuntimeError(f"slot {e},{pair} nonzero without monomials")
                continue
            rows = []
            for f, v in zip(curves, vals):
                row = []
                for m in mons:
                    z = 1
                    for t in range(7):
                        z = z * pow(f[t], m[t], p) % p
                    row.append(z)
                rows.append(row + [(-v) % p])
            ker = kernel_mod(rows, p)
            if len(ker) != 1 or ker[0][-1] != 1:
                raise RuntimeError(f"interpolation failed at slot {e},{pair}")
            for m, c in zip(mons, ker[0][:-1]):
                if c:
                    table[(e, k, m)] = lift(c, p)
    return table


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/general_biquadratics.json"
    t1 = derive(2147483647, 1, 40)
    t2 = derive(1000000007, 2, 40)
    if t1 != t2:
        raise RuntimeError("tables differ between primes")
    den = 1
    for v in t1.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    doc = {"version": 1, "scale": den, "forms": {}}
    for e, (i, j) in enumerate(ENTRIES):
        terms = []
        for k, (a, b) in enumerate(PAIRS):
            coeff = {}
            for (ee, kk, m), v in t1.items():
                if ee == e and kk == k:
                    coeff[m] = int(v * den)
            if not coeff:
                continue
            poly = [{"exponents": list(m), "integer": c} for m, c in sorted(coeff.items(), reverse=True)]
            orders = [(a, b)] if a == b else [(a, b), (b, a)]
            for x, y in orders:
                terms.append({"exp_p": list(MONO2[x]), "exp_q": list(MONO2[y]), "coeff": poly})
        doc["forms"][f"B{i + 1}{j + 1}"] = terms
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out}: {len(t1)} coefficient monomials, scale {den}", file=sys.stderr)


if __name__ == "__main__":
    main()
