"""Dense polynomial arithmetic, CRT, interpolation, rational reconstruction.

Polynomials are plain coefficient lists, lowest degree first, with no
trailing zeros; `[]` is the zero polynomial.  All routines take the
coefficient field as an explicit argument so the same code runs over
Z_p (int residues, `ModPrime`) and over the rationals (`QQ`).

Everything here is deliberately quadratic: schoolbook products, plain
extended Euclid, incremental Newton interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .modarith import ModPrime


class _RationalField:
    """Field protocol instance for exact rationals."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def inv(a):
        return 1 / Fraction(a)

    @staticmethod
    def div(a, b):
        return Fraction(a) / b

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def from_int(n):
        return Fraction(n)

    def __repr__(self):
        return "QQ"


QQ = _RationalField()


# ---------------------------------------------------------------------------
# dense univariate polynomials over an arbitrary field


def ptrim(c: list, F) -> list:
    while c and F.is_zero(c[-1]):
        c.pop()
    return c


def pdeg(c: list) -> int:
    return len(c) - 1


def padd(a: list, b: list, F) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = F.add(out[i], x)
    return ptrim(out, F)


def psub(a: list, b: list, F) -> list:
    out = list(a) + [F.zero] * (len(b) - len(a))
    for i, x in enumerate(b):
        out[i] = F.sub(out[i], x)
    return ptrim(out, F)


def pneg(a: list, F) -> list:
    return [F.neg(x) for x in a]


def pscale(a: list, s, F) -> list:
    if F.is_zero(s):
        return []
    return ptrim([F.mul(x, s) for x in a], F)


def pshift(a: list, k: int, F) -> list:
    """Multiply by x**k."""
    if not a:
        return []
    return [F.zero] * k + list(a)


def pmul(a: list, b: list, F) -> list:
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return ptrim(out, F)


def pmul_trunc(a: list, b: list, order: int, F) -> list:
    """Cauchy product of a and b through x^(order-1)."""
    out = [F.zero] * order
    for i, x in enumerate(a[:order]):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b[: order - i]):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def peval(a: list, x, F):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def pdivmod(a: list, b: list, F) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [F.zero] * max(0, len(a) - len(b) + 1)
    inv_lead = F.inv(b[-1])
    for k in range(len(a) - len(b), -1, -1):
        if len(r) < len(b) + k:
            continue
        c = F.mul(r[len(b) + k - 1], inv_lead)
        if F.is_zero(c):
            continue
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] = F.sub(r[i + k], F.mul(c, y))
    return ptrim(q, F), ptrim(r, F)


def pgcd(a: list, b: list, F) -> list:
    """Monic gcd."""
    a, b = list(a), list(b)
    while b:
        a, b = b, pdivmod(a, b, F)[1]
    if a:
        a = pscale(a, F.inv(a[-1]), F)
    return a


def pmonic(a: list, F) -> list:
    if not a:
        return []
    return pscale(a, F.inv(a[-1]), F)


# ---------------------------------------------------------------------------
# truncated power series


@dataclass(frozen=True)
class TruncSeries:
    """Coefficients c_0..c_{order-1}; nothing beyond `order` is known."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if len(self.coeffs) != self.order:
            raise ValueError("series must carry exactly `order` coefficients")


def cauchy_mul_trunc(a: TruncSeries, b: TruncSeries, order: int, F=QQ) -> TruncSeries:
    if a.order < order or b.order < order:
        raise ValueError("operands not defined to the requested order")
    return TruncSeries(tuple(pmul_trunc(list(a.coeffs), list(b.coeffs), order, F)), order)


# ---------------------------------------------------------------------------
# rational functions in one parameter over QQ


def _fpgcd(a: tuple, b: tuple) -> list:
    return pgcd(list(a), list(b), QQ)


@dataclass(frozen=True)
class RatPoly:
    """num(t)/den(t) with Fraction coefficients, den monic, gcd trimmed."""

    num: tuple
    den: tuple

    @classmethod
    def make(cls, num, den=(Fraction(1),)) -> "RatPoly":
        num = ptrim([Fraction(c) for c in num], QQ)
        den = ptrim([Fraction(c) for c in den], QQ)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return cls((), (Fraction(1),))
        g = _fpgcd(tuple(num), tuple(den))
        if pdeg(g) > 0:
            num = pdivmod(num, g, QQ)[0]
            den = pdivmod(den, g, QQ)[0]
        lead = den[-1]
        if lead != 1:
            num = pscale(num, 1 / lead, QQ)
            den = pscale(den, 1 / lead, QQ)
        return cls(tuple(num), tuple(den))

    @classmethod
    def const(cls, c) -> "RatPoly":
        return cls.make([Fraction(c)])

    @classmethod
    def coerce(cls, v) -> "RatPoly":
        if isinstance(v, RatPoly):
            return v
        return cls.const(Fraction(v))

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0] / self.den[0] if self.num else Fraction(0)

    def __add__(self, other):
        o = RatPoly.coerce(other)
        num = padd(pmul(list(self.num), list(o.den), QQ), pmul(list(o.num), list(self.den), QQ), QQ)
        return RatPoly.make(num, pmul(list(self.den), list(o.den), QQ))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        return self + (-RatPoly.coerce(other))

    def __rsub__(self, other):
        return RatPoly.coerce(other) + (-self)

    def __mul__(self, other):
        o = RatPoly.coerce(other)
        return RatPoly.make(pmul(list(self.num), list(o.num), QQ), pmul(list(self.den), list(o.den), QQ))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatPoly.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatPoly.make(pmul(list(self.num), list(o.den), QQ), pmul(list(self.den), list(o.num), QQ))

    def __rtruediv__(self, other):
        return RatPoly.coerce(other) / self

    def eval(self, x: Fraction) -> Fraction:
        den = peval(list(self.den), x, QQ)
        if den == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return peval(list(self.num), x, QQ) / den


class _RatPolyField:
    """Field protocol instance for rational functions in one parameter."""

    zero = RatPoly((), (Fraction(1),))
    one = RatPoly((Fraction(1),), (Fraction(1),))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def inv(a):
        return _RatPolyField.one / a

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def from_int(n):
        return RatPoly.const(n)

    def __repr__(self):
        return "QQ(t)"


QQ_T = _RatPolyField()
QPARAM = RatPoly((Fraction(0), Fraction(1)), (Fraction(1),))  # the parameter itself


# ---------------------------------------------------------------------------
# Chinese remaindering, block-batched


@dataclass
class CrtAccumulator:
    """Combined image under pairwise coprime moduli, batched in blocks.

    Fresh (image, modulus) pairs buffer inside a block; once `block_size`
    pairs accumulate they merge into the long-lived pair (value, modulus)
    in one step, keeping the big-integer work per prime small.
    """

    value: int = 0
    modulus: int = 1
    block: list = field(default_factory=list)
    block_size: int = 100

    def snapshot(self) -> tuple[int, int]:
        """Current combined (value, modulus) including the open block."""
        v, m = self.value, self.modulus
        for bm, bv in self.block:
            v, m = _crt_pair(v, m, bv, bm)
        return v, m


def _crt_pair(v1: int, m1: int, v2: int, m2: int) -> tuple[int, int]:
    if math.gcd(m1, m2) != 1:
        raise ValueError(f"moduli {m1} and {m2} are not coprime")
    u = (v2 - v1) * pow(m1, -1, m2) % m2
    return v1 + m1 * u, m1 * m2


def crt_combine(acc: CrtAccumulator, image: int, modulus: int) -> CrtAccumulator:
    """Absorb one congruence; merges a full block into the main pair."""
    if modulus <= 1:
        raise ValueError("modulus must exceed 1")
    if math.gcd(modulus, acc.modulus) != 1 or any(math.gcd(modulus, m) != 1 for m, _ in acc.block):
        raise ValueError(f"modulus {modulus} not coprime to absorbed moduli")
    acc.block.append((modulus, image % modulus))
    if len(acc.block) >= acc.block_size:
        bv, bm = 0, 1
        for m, v in acc.block:
            bv, bm = _crt_pair(bv, bm, v, m)
        acc.value, acc.modulus = _crt_pair(acc.value, acc.modulus, bv, bm)
        acc.block.clear()
    return acc


# ---------------------------------------------------------------------------
# incremental Newton interpolation over a prime field


@dataclass
class LagrangeAccumulator:
    """Newton-form interpolant through the points added so far."""

    fp: ModPrime
    points: list = field(default_factory=list)
    newton: list = field(default_factory=list)
    node: list = field(default_factory=lambda: [1])  # prod (t - x_i)

    def count(self) -> int:
        return len(self.points)

    def to_dense(self) -> list:
        """Monomial-basis coefficients of the interpolant."""
        fp = self.fp
        out: list = []
        basis = [1]
        for c, x in zip(self.newton, self.points):
            out = padd(out, pscale(basis, c, fp), fp)
            basis = psub(pshift(basis, 1, fp), pscale(basis, x, fp), fp)
        return out


def lagrange_add(acc: LagrangeAccumulator, point: int, value: int) -> LagrangeAccumulator:
    """Add one (point, value) pair; Newton update, O(#points)."""
    fp = acc.fp
    point, value = point % fp.p, value % fp.p
    if point in acc.points:
        raise ValueError(f"repeated interpolation point {point}")
    # evaluate current interpolant and the Newton basis product at `point`
    cur = 0
    prod = 1
    for c, x in zip(acc.newton, acc.points):
        cur = (cur + c * prod) % fp.p
        prod = prod * (point - x) % fp.p
    acc.newton.append(fp.div(value - cur, prod))
    acc.points.append(point)
    acc.node = psub(pshift(acc.node, 1, fp), pscale(acc.node, point, fp), fp)
    return acc


# ---------------------------------------------------------------------------
# rational reconstruction: scalars, vectors, polynomials


def rat_recon(M: int, modulus: int) -> Fraction | None:
    """Balanced rational reconstruction of M mod modulus.

    Returns a/b with a*inverse(b) = M (mod modulus), |a|, |b| below
    sqrt(modulus/2), gcd(b, modulus) = 1; None when no such pair exists.
    """
    if not 0 <= M < modulus:
        raise ValueError("need 0 <= M < modulus")
    if M == 0:
        return Fraction(0)
    bound = math.isqrt(modulus // 2)
    r0, t0 = modulus, 0
    r1, t1 = M, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r1 == 0 or abs(t1) > bound or t1 == 0:
        return None
    if math.gcd(r1, abs(t1)) != 1 or math.gcd(abs(t1), modulus) != 1:
        return None
    return Fraction(r1, t1)


def rat_recon_vec(images: list, modulus: int, stats: dict | None = None) -> list | None:
    """Entrywise reconstruction with an incrementally shared denominator.

    For each entry, D*M mod modulus (D = lcm of denominators seen so far)
    is tried as a small symmetric integer first; only entries introducing
    a new denominator factor pay for a full extended-Euclid run.
    """
    bound = math.isqrt(modulus // 2)
    out = []
    den = 1
    for M in images:
        M = M % modulus
        if den <= bound:
            a = den * M % modulus
            if a > modulus - a:
                a -= modulus
            if abs(a) <= bound:
                out.append(Fraction(a, den))
                if stats is not None:
                    stats["shortcut"] = stats.get("shortcut", 0) + 1
                continue
        f = rat_recon(M, modulus)
        if f is None:
            return None
        if stats is not None:
            stats["full"] = stats.get("full", 0) + 1
        out.append(f)
        den = den * f.denominator // math.gcd(den, f.denominator)
    return out


def poly_rat_recon(acc: LagrangeAccumulator, points_used: int | None = None) -> tuple[list, list] | None:
    """Cauchy interpolation: num/den through all added points.

    Balanced degree split: deg num ≤ K//2, deg den ≤ K-1-K//2 where K is
    the number of points.  The returned pair is coprime with monic
    denominator; None when no such function fits (including when the
    would-be denominator vanishes at a sample point).
    """
    fp = acc.fp
    K = acc.count()
    if points_used is not None and points_used != K:
        raise ValueError("points_used disagrees with the accumulator")
    if K < 1:
        raise ValueError("no points added yet")
    M = acc.to_dense()
    dn = K // 2
    dd = K - 1 - dn
    r0, t0 = list(acc.node), []
    r1, t1 = M, [1]
    while pdeg(r1) > dn:
        q, r = pdivmod(r0, r1, fp)
        r0, r1 = r1, r
        t0, t1 = t1, psub(t0, pmul(q, t1, fp), fp)
    num, den = r1, t1
    if not den or pdeg(den) > dd:
        return None
    g = pgcd(num, den, fp)
    if pdeg(g) > 0:
        num = pdivmod(num, g, fp)[0]
        den = pdivmod(den, g, fp)[0]
    inv_lead = fp.inv(den[-1])
    num = pscale(num, inv_lead, fp)
    den = pscale(den, inv_lead, fp)
    # decisive verification at every sample point
    for x in acc.points:
        dv = peval(den, x, fp)
        if dv == 0:
            return None
        if peval(num, x, fp) != fp.mul(dv, peval(M, x, fp)):
            return None
    return num, den
