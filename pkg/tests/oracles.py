"""Independent brute-force references for the set-function objectives.

Everything here is written with explicit double loops and cofactor
determinants so the reference shares no code path with the incremental
implementations it checks. Only usable at tiny sizes (n <= 8).
"""

import math

import numpy as np

from targetsel.datastore import FeatureMatrix
from targetsel.kernel import KernelConfig, build_kernel


def det_cofactor(m):
    m = [list(row) for row in m]
    n = len(m)
    if n == 0:
        return 1.0
    if n == 1:
        return m[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += ((-1) ** j) * m[0][j] * det_cofactor(minor)
    return total


def inv_adjugate(m):
    n = len(m)
    d = det_cofactor(m)
    inv = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            inv[j][i] = ((-1) ** (i + j)) * det_cofactor(minor) / d
    return inv


def _ridged(mat, idx, eps):
    return [[mat[a][b] + (eps if a == b else 0.0) for b in idx] for a in idx]


def eval_reference(kind, indices, uu=None, ut=None, tt=None,
                   eta=1.0, gamma=1.0, lam=0.5, eps=0.0):
    """Direct-formula evaluation of any objective kind on an index set."""
    a_set = list(indices)
    if not a_set:
        return 0.0
    uu = None if uu is None else [list(r) for r in uu]
    ut = None if ut is None else [list(r) for r in ut]
    tt = None if tt is None else [list(r) for r in tt]
    if kind == "gcmi":
        return 2.0 * sum(ut[i][j] for i in a_set for j in range(len(ut[0])))
    if kind == "fl1mi":
        total = 0.0
        for i in range(len(uu)):
            cover = max(uu[i][j] for j in a_set)
            rel = eta * max(ut[i][j] for j in range(len(ut[0])))
            total += min(cover, rel)
        return total
    if kind == "fl2mi":
        m = len(ut[0])
        cover = sum(max(ut[j][i] for j in a_set) for i in range(m))
        rel = sum(max(ut[i][j] for j in range(m)) for i in a_set)
        return cover + eta * rel
    if kind == "logdetmi":
        s_a = _ridged(uu, a_set, eps)
        q = _ridged(tt, range(len(tt)), eps)
        q_inv = inv_adjugate(q)
        c = [ut[i] for i in a_set]
        m = len(q)
        cond = [
            [
                s_a[r][s]
                - eta * eta * sum(c[r][p] * q_inv[p][t] * c[s][t]
                                  for p in range(m) for t in range(m))
                for s in range(len(a_set))
            ]
            for r in range(len(a_set))
        ]
        return math.log(det_cofactor(s_a)) - math.log(det_cofactor(cond))
    if kind == "gcmi_div":
        return eval_reference("gcmi", a_set, ut=ut) + gamma * eval_reference(
            "dsum", a_set, uu=uu
        )
    if kind == "fl":
        return sum(max(uu[i][j] for j in a_set) for i in range(len(uu)))
    if kind == "gc":
        cut = sum(uu[i][j] for i in range(len(uu)) for j in a_set)
        red = sum(uu[i][j] for i in a_set for j in a_set)
        return cut - lam * red
    if kind == "logdet":
        return math.log(det_cofactor(_ridged(uu, a_set, eps)))
    if kind == "dsum":
        return sum(
            1.0 - uu[a_set[i]][a_set[j]]
            for i in range(len(a_set))
            for j in range(i + 1, len(a_set))
        )
    raise ValueError(f"unknown kind {kind!r}")


def random_kernels(rng, n, m, d=6):
    """Cosine shift-scale kernels from random features: nonnegative,
    symmetric with unit diagonal, and PSD (strictly PD once ridged)."""
    pool = FeatureMatrix(rng.standard_normal((n, d)))
    target = FeatureMatrix(rng.standard_normal((m, d)))
    cfg = KernelConfig()
    return (
        build_kernel(pool, pool, cfg),
        build_kernel(pool, target, cfg),
        build_kernel(target, target, cfg),
    )
