"""Independent table oracle: brute-force over barycenter depth triples with
Cramer's rule in exact fractions. Writes the golden CSV files."""
import sys
from fractions import Fraction as F
from itertools import combinations
from math import comb
from pathlib import Path


def fmt(x):
    x = F(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def ratios(k, r):
    a = F(k - r, k)
    b = F((k - r) * (k - r - 1), k * (k - 1)) if k > 1 else F(0)
    return a, b


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def count(k, depths):
    return sum(comb(k, r) * 2 ** (k - r) for r in depths)


def feasible(k):
    out = []
    if k == 1:
        # a = x0 * 1 + x1 * 0 = 2/5
        out.append(((0, 1), (F(2, 5), F(3, 5))))
        return out
    rhs = [F(1), F(2, 5), F(1, 5)]
    for trip in combinations(range(k + 1), 3):
        if trip[1] > k - 1:
            continue
        cols = [(F(1),) + ratios(k, r) for r in trip]
        A = [[cols[j][i] for j in range(3)] for i in range(3)]
        d = det3(A)
        xs = []
        for j in range(3):
            Aj = [row[:] for row in A]
            for i in range(3):
                Aj[i][j] = rhs[i]
            xs.append(det3(Aj) / d)
        if min(xs) < 0:
            continue
        keep = [(r, x) for r, x in zip(trip, xs) if x > 0]
        sol = (tuple(r for r, _ in keep), tuple(x for _, x in keep))
        if sol not in out:
            out.append(sol)
    return out


def minimal(k):
    return min(feasible(k), key=lambda s: (count(k, s[0]), s[0]))


def table1(kmax):
    rows = ["k,r1,r2,r3,m1,m2,m3,N,lambda_min"]
    for k in range(1, kmax + 1):
        depths, masses = minimal(k)
        d, m = ["-"] * 3, ["-"] * 3
        slot = 1 if len(depths) == 2 and depths[0] != 0 else 0
        for r, x in zip(depths, masses):
            d[slot], m[slot] = str(r), fmt(x)
            slot += 1
        rows.append(",".join([str(k)] + d + m + [str(count(k, depths)), "1/5"]))
    return rows


def table2(kmax):
    rows = ["k,q,l,s,xi_E0,xi_Es,xi_Ek,N,lambda_min"]
    for k in range(1, kmax + 1):
        if k == 3:
            continue
        l = {0: 0, 1: 1, 2: -1}[k % 3]
        q = (k - l) // 3
        s = 2 * q + l
        if l == 1:
            m = (F(1, 5) * F(q + 2, 2 * q + 1), F(3, 5) * F(3 * q + 1, 2 * q + 1), F(0))
        elif l == 0:
            m = (F(1, 5) * F(q + 1, 2 * q), F(3, 5) * F(3 * q - 1, 2 * q), F(1, 5 * q))
        else:
            m = (F(1, 5) * F(q, 2 * q - 1), F(1, 5) * F((3 * q - 1) * (3 * q - 2), q * (2 * q - 1)), F(2, 5 * q))
        depths = [0, s] + ([k] if m[2] > 0 else [])
        rows.append(",".join(map(str, [k, q, l, s])) + "," + ",".join(fmt(x) for x in m)
                    + f",{count(k, depths)},1/5")
    return rows


def diophantine(kmax):
    rows = ["k,s,t,xi_Es,xi_Et,N"]
    for k in range(1, kmax + 1):
        for s in range(k + 1):
            for t in range(s + 1, k + 1):
                if 2 * k * k + k - 3 * k * (s + t) + 5 * s * t != 0:
                    continue
                a_s, a_t = ratios(k, s)[0], ratios(k, t)[0]
                xs = (F(2, 5) - a_t) / (a_s - a_t)
                rows.append(f"{k},{s},{t},{fmt(xs)},{fmt(1 - xs)},{count(k, (s, t))}")
    return rows


if __name__ == "__main__":
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent.parent / "golden")
    for name, fn in [("table1", table1), ("table2", table2), ("diophantine", diophantine)]:
        (out / f"{name}.csv").write_text("\n".join(fn(24)) + "\n")
