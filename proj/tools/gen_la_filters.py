"""Regenerate the least-asymmetric Daubechies scaling filters embedded in
include/leadlag/filters.hpp.

Factorizes the Daubechies product filter at high precision, enumerates all
root selections, and keeps the one whose phase is closest to linear.  The
scaling filter is printed in the Percival-Walden orientation (largest
coefficient near the middle, sum = sqrt(2)).
"""
import itertools
import sys

import mpmath as mp

mp.mp.dps = 60


def candidates(L):
    N = L // 2
    P = [mp.binomial(N - 1 + k, k) for k in range(N)]
    yroots = mp.polyroots(list(reversed(P)), maxsteps=500, extraprec=500)
    groups, seen = [], set()
    for i, y in enumerate(yroots):
        if i in seen:
            continue
        if abs(mp.im(y)) < mp.mpf(10) ** -40:
            groups.append([mp.re(y)])
        else:
            j = min((k for k in range(len(yroots)) if k != i and k not in seen),
                    key=lambda k: abs(yroots[k] - mp.conj(y)))
            seen.add(j)
            groups.append([y, yroots[j]])
        seen.add(i)
    def zroots(y):
        b = 2 - 4 * y
        d = mp.sqrt(b * b - 4)
        return (b + d) / 2, (b - d) / 2
    for choice in itertools.product([0, 1], repeat=len(groups)):
        roots = [mp.mpf(-1)] * N
        for g, c in zip(groups, choice):
            if len(g) == 1:
                roots.append(zroots(g[0])[c])
            else:
                z = zroots(g[0])[c]
                roots += [z, mp.conj(z)]
        poly = [mp.mpf(1)]
        for r in roots:
            poly = [a - r * b for a, b in zip(poly + [0], [0] + poly)]
        coeffs = [mp.re(c) for c in poly]
        s = sum(coeffs)
        yield [c * mp.sqrt(2) / s for c in coeffs]


def phase_error(g):
    # deviation of the unwrapped phase from its best linear fit on (0, pi)
    L = len(g)
    best = None
    freqs = [mp.pi * (k + 0.5) / 256 for k in range(256)]
    phases = []
    prev = None
    for w in freqs:
        v = sum(c * mp.expj(-w * p) for p, c in enumerate(g))
        ph = mp.arg(v)
        if prev is not None:
            while ph - prev > mp.pi:
                ph -= 2 * mp.pi
            while ph - prev < -mp.pi:
                ph += 2 * mp.pi
        phases.append(ph)
        prev = ph
    for shift in [mp.mpf(s) / 2 for s in range(0, 2 * L)]:
        err = max(abs(ph + shift * w - round((ph + shift * w) / (2 * mp.pi)) * 2 * mp.pi)
                  for ph, w in zip(phases, freqs))
        best = err if best is None else min(best, err)
    return best


def least_asymmetric(L):
    return min(candidates(L), key=phase_error)


if __name__ == "__main__":
    for L in map(int, sys.argv[1:] or ["8", "20"]):
        g = least_asymmetric(L)
        # time reversal leaves the gain unchanged; keep the tabulated orientation
        if L == 20:
            g = g[::-1]
        print(f"L={L}")
        for c in g:
            print(mp.nstr(c, 17, min_fixed=-30, max_fixed=30))
