"""Independent recomputations used as test oracles.

Everything here is deliberately naive: dense Gaussian elimination, direct
forward generation of recurrence data.  The point is to cross-check the
fast implementations against code that shares no machinery with them.
"""

import random
from fractions import Fraction


def condition_matrix(streams, bounds, sigma, p, points=None):
    """Dense matrix of the order conditions, one row per condition.

    Columns enumerate the unknown coefficients c[l][e] for e < bounds[l].
    Sequence form: row j asks sum_l p_l(x_j) * streams[l][j] == 0.
    Series form: row j asks the x^j coefficient of sum_l p_l * s_l == 0.
    """
    rows = []
    for j in range(sigma):
        row = []
        for l, b in enumerate(bounds):
            for e in range(b):
                if points is not None:
                    row.append(pow(points[j] % p, e, p) * (streams[l][j] % p) % p)
                else:
                    v = streams[l][j - e] if 0 <= j - e else 0
                    row.append(v % p)
        rows.append(row)
    return rows


def nullspace_dim(rows, ncols, p):
    """Dimension of the kernel of the column-vector map, mod p."""
    mat = [list(r) for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] % p), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [v * inv % p for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col] % p:
                c = mat[i][col]
                mat[i] = [(a - c * b) % p for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return ncols - rank


def matrix_rank(rows, p):
    if not rows:
        return 0
    ncols = len(rows[0])
    return ncols - nullspace_dim(rows, ncols, p)


def flatten_solution(poly_lists, bounds):
    """Coefficient vector of one basis column in condition_matrix order."""
    flat = []
    for comp, b in zip(poly_lists, bounds):
        flat.extend(list(comp) + [0] * (b - len(comp)))
    return flat


def apply_matrix(rows, vec, p):
    return [sum(a * b for a, b in zip(row, vec)) % p for row in rows]


def gen_prec_terms(order, deg, count, seed):
    """Exact terms of a random monic-leading linear recurrence.

    Coefficient of f(n+order) is the constant 1, the other coefficients
    are random integer polynomials in n of the given degree, so the data
    is generated forward without division.
    """
    rng = random.Random(seed)
    coeffs = [[rng.randint(-10, 10) for _ in range(deg + 1)] for _ in range(order)]
    terms = [Fraction(rng.randint(1, 5)) for _ in range(order)]
    while len(terms) < count:
        n = len(terms) - order
        acc = Fraction(0)
        for k in range(order):
            cval = sum(c * n**e for e, c in enumerate(coeffs[k]))
            acc += cval * terms[n + k]
        terms.append(-acc)
    return terms, coeffs
