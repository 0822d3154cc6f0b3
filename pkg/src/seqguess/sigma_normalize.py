"""Canonical form for order bases and bad-reduction bookkeeping.

An order basis fixes the solution module but not its presentation: any
column may absorb multiples of columns with equal or larger defect
without changing what is spanned.  The normal form computed here is the
unique representative with

  * columns sorted by defect (descending), then critical index
    (ascending),
  * each column monic in its critical component,
  * no column containing the leading critical-component term of any
    other column (pairwise reduced).

Because the form is unique, its shape summary (`ReductionRecord`) is a
fingerprint of the solution module itself.  Images of the same exact
problem under two good primes produce identical records; an unlucky
prime inflates the module and produces a comparably "larger" record,
which is how bad reductions are detected without knowing the answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CheckFailed
from .hermite_pade import SigmaBasisResult
from .modarith import ModPrime

_REDUCE_CAP = 10**6  # safety valve; the reduction provably terminates


def vector_defect(vec: list[list[int]], bounds: list[int]) -> int:
    """min over nonzero components of bounds[i] - deg(vec[i])."""
    vals = [b - (len(c) - 1) for c, b in zip(vec, bounds) if c]
    if not vals:
        raise ValueError("defect of the zero vector is undefined")
    return min(vals)


def critical_index(vec: list[list[int]], bounds: list[int]) -> int:
    """Smallest component index where the defect is attained (0-based)."""
    d = vector_defect(vec, bounds)
    for i, (c, b) in enumerate(zip(vec, bounds)):
        if c and b - (len(c) - 1) == d:
            return i
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class ReductionRecord:
    """Shape fingerprint of a normalized basis, one entry per column."""

    defects: tuple[int, ...]
    crits: tuple[int, ...]
    lead_exps: tuple[int, ...]


def compare_reductions(new: ReductionRecord, old: ReductionRecord) -> str:
    """'equal', 'better' (new wins), 'worse' (old wins), or 'incompatible'.

    A modular image can only lose rank against the exact problem, so its
    solution-space dimension at every degree slack is at least the exact
    one; in terms of the records (defects sorted descending) that says
    the prefix sums of a bad image dominate the good ones.  The total is
    conserved, so dominated prefix sums = flatter profile = closer to
    generic.  At equal defects the critical indices decide componentwise;
    mixed directions mean both sides saw some bad reduction.  Equality
    requires leading exponents to match too.
    """
    if len(old.defects) != len(new.defects):
        raise ValueError("records compare only within one problem shape")
    if old == new:
        return "equal"
    new_wins, old_wins = False, False
    ns = os = 0
    for nd, od in zip(new.defects, old.defects):
        ns += nd
        os += od
        if ns < os:
            new_wins = True
        elif ns > os:
            old_wins = True
    if not new_wins and not old_wins:
        for nc, oc in zip(new.crits, old.crits):
            if nc < oc:
                new_wins = True
            elif nc > oc:
                old_wins = True
    if new_wins == old_wins:
        # both (mixed directions) or neither (only leading exponents differ)
        return "incompatible"
    return "better" if new_wins else "worse"


@dataclass
class NormalizedBasis:
    """Normal form of an order basis; columns as coefficient-list vectors."""

    columns: list[list[list[int]]]
    defects: list[int]
    crits: list[int]
    bounds: list[int]
    fp: ModPrime

    def record(self) -> ReductionRecord:
        lead = tuple(self.bounds[c] - d for d, c in zip(self.defects, self.crits))
        return ReductionRecord(tuple(self.defects), tuple(self.crits), lead)

    def solution_indices(self) -> list[int]:
        return [k for k, d in enumerate(self.defects) if d >= 1]


def _strike(q: list[list[int]], s: list[list[int]], i: int, fp: ModPrime) -> None:
    """q -= alpha * x^shift * s, killing q's leading term in component i."""
    shift = len(q[i]) - len(s[i])
    alpha = fp.div(q[i][-1], s[i][-1])
    for comp in range(len(q)):
        sc = s[comp]
        if not sc:
            continue
        need = shift + len(sc)
        if len(q[comp]) < need:
            q[comp] = q[comp] + [0] * (need - len(q[comp]))
        qc = q[comp]
        for t, cv in enumerate(sc):
            pos = shift + t
            qc[pos] = (qc[pos] - alpha * cv) % fp.p
        while qc and qc[-1] == 0:
            qc.pop()


def sigma_normalize(result: SigmaBasisResult) -> NormalizedBasis:
    """Reduce an order basis to its unique normal form.

    Repeatedly strikes, among all still-possible reductions of any
    column against any other column's critical leading term, the one
    acting on the component with the smallest remaining degree margin;
    that choice makes progress monotone.  Sorting and scaling at the
    end complete the canonical form.
    """
    fp, bounds = result.fp, result.bounds
    m = result.m
    cols = [[result.poly(k, i) for i in range(m)] for k in range(m)]

    for _round in range(_REDUCE_CAP):
        crits = [critical_index(v, bounds) for v in cols]
        best = None  # (margin, component, target, reducer)
        for k, q in enumerate(cols):
            for j, s in enumerate(cols):
                if j == k:
                    continue
                i = crits[j]
                if q[i] and len(q[i]) >= len(s[i]):
                    margin = bounds[i] - (len(q[i]) - 1)
                    cand = (margin, i, k, j)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        _, i, k, j = best
        _strike(cols[k], cols[j], i, fp)
        if not any(cols[k]):
            raise CheckFailed("order-basis column vanished during normalization")
    else:
        raise CheckFailed("normalization did not terminate")

    defects = [vector_defect(v, bounds) for v in cols]
    crits = [critical_index(v, bounds) for v in cols]
    order = sorted(range(m), key=lambda k: (-defects[k], crits[k]))
    cols = [cols[k] for k in order]
    defects = [defects[k] for k in order]
    crits = [crits[k] for k in order]
    for v, c in zip(cols, crits):
        inv = fp.inv(v[c][-1])
        if inv != 1:
            for comp in range(m):
                v[comp] = [x * inv % fp.p for x in v[comp]]
    return NormalizedBasis(columns=cols, defects=defects, crits=crits, bounds=list(bounds), fp=fp)
