"""Order-basis computation over a prime field.

Given m input streams and an order sigma, computes a basis of the
module of polynomial vectors (p_1, .., p_m) satisfying the first sigma
order conditions against the streams:

  - sequence form (`points` given): sum_l p_l(x_j) * stream_l[j] = 0
    for each sample point x_j,
  - series form (`points` omitted): the coefficients of x^0..x^(sigma-1)
    in sum_l p_l(x) * stream_l(x) all vanish.

The iteration keeps one column per row index, eliminates the order
condition j from all columns at step j using the column with the
largest defect as pivot, and multiplies the pivot by (x - x_j)
(respectively by x).  Defects are recomputed from actual component
degrees after every update, so reported values never rely on the
no-cancellation argument being airtight mod p.

Columns live in packed numpy buffers; all inner loops are vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadModulus
from .modarith import ModPrime, PackedVec, mul_add_in_place


@dataclass
class SigmaBasisResult:
    """Full order basis: every column, not only the small-defect ones."""

    columns: list[PackedVec]
    degrees: np.ndarray  # degrees[col][comp], -1 for the zero polynomial
    defects: list[int]  # min over nonzero comps of bounds[comp] - degree
    bounds: list[int]
    fp: ModPrime

    @property
    def m(self) -> int:
        return len(self.columns)

    def poly(self, col: int, comp: int) -> list[int]:
        """Dense coefficient list of one component, trailing zeros trimmed."""
        d = int(self.degrees[col][comp])
        if d < 0:
            return []
        return [int(v) for v in self.columns[col].component(comp)[: d + 1]]

    def solution_indices(self) -> list[int]:
        return [k for k, d in enumerate(self.defects) if d >= 1]


def _column_defect(degs_row, bounds) -> int:
    vals = [b - int(d) for b, d in zip(bounds, degs_row) if d >= 0]
    if not vals:
        raise ValueError("zero column in order basis")
    return min(vals)


def _recompute_degrees(col: PackedVec, out_row) -> None:
    arr = col.data.reshape(col.components, col.stride)
    nz = arr != 0
    has = nz.any(axis=1)
    rev_arg = nz[:, ::-1].argmax(axis=1)
    out_row[:] = np.where(has, col.stride - 1 - rev_arg, -1)


def _pivot_multiply(col: PackedVec, x_j: int, fp: ModPrime) -> None:
    """col <- (x - x_j) * col on every component at once.

    Safe as one whole-buffer shift: component tops are zero because the
    capacity exceeds any reachable degree by at least one slot.
    """
    s = col._ensure_scratch()
    np.multiply(col.data, (fp.p - x_j) % fp.p, out=s)
    s[1:] += col.data[:-1]
    np.remainder(s, fp.p, out=col.data)


def sigma_basis(
    streams: list,
    bounds: list[int],
    sigma: int,
    fp: ModPrime,
    points: list[int] | None = None,
    tie_break: str = "low",
) -> SigmaBasisResult:
    """Order basis of the first `sigma` conditions.

    streams[l] holds sigma residues: values at `points` in the sequence
    form, low-order series coefficients in the series form.  bounds[l]
    caps the component-l degree a column may reach while still counting
    as a solution (defect >= 1 means degree <= bounds[l] - 1 everywhere).
    """
    m = len(streams)
    if len(bounds) != m:
        raise ValueError("one degree bound per stream required")
    if any(len(s) != sigma for s in streams):
        raise ValueError("each stream must provide exactly sigma residues")
    if tie_break not in ("low", "high"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    if points is not None:
        if len(points) != sigma:
            raise ValueError("need exactly sigma sample points")
        pts = np.array([x % fp.p for x in points], dtype=np.int64)
        if len(set(pts.tolist())) != sigma:
            raise BadModulus(f"sample points collide mod {fp.p}")
    else:
        pts = None

    cap = (max(bounds) if bounds else 0) + sigma + 1
    cols = [PackedVec.zeros(m, cap) for _ in range(m)]
    degs = np.full((m, m), -1, dtype=np.int64)
    for l in range(m):
        cols[l].component(l)[0] = 1
        degs[l][l] = 0

    resid = [np.array([int(v) % fp.p for v in s], dtype=np.int64) for s in streams]

    for j in range(sigma):
        live = [k for k in range(m) if resid[k][j] != 0]
        if not live:
            continue
        defects = [_column_defect(degs[k], bounds) for k in range(m)]
        best = max(defects[k] for k in live)
        candidates = [k for k in live if defects[k] == best]
        piv = candidates[0] if tie_break == "low" else candidates[-1]
        r_inv = fp.inv(int(resid[piv][j]))
        for k in live:
            if k == piv:
                continue
            c = fp.p - (int(resid[k][j]) * r_inv) % fp.p
            c %= fp.p
            mul_add_in_place(cols[k], cols[piv], c, fp)
            resid[k] = (resid[k] + c * resid[piv]) % fp.p
            _recompute_degrees(cols[k], degs[k])
        if pts is not None:
            x_j = int(pts[j])
            _pivot_multiply(cols[piv], x_j, fp)
            resid[piv] = resid[piv] * (pts - x_j) % fp.p
        else:
            _pivot_multiply(cols[piv], 0, fp)
            shifted = np.zeros_like(resid[piv])
            shifted[1:] = resid[piv][:-1]
            resid[piv] = shifted
        degs[piv][degs[piv] >= 0] += 1

    defects = [_column_defect(degs[k], bounds) for k in range(m)]
    return SigmaBasisResult(columns=cols, degrees=degs, defects=defects, bounds=list(bounds), fp=fp)
