"""Machine-word prime-field arithmetic.

Everything the modular layers touch lives here: a prime field whose
elements are plain Python ints in [0, p), packed coefficient vectors
backed by int64 numpy arrays, and the reduction homomorphisms from exact
rationals (and rational functions) into the field.

Primes are sampled with at most 31 bits so that a product of two
residues plus an accumulator stays below 2**63 and the fused
multiply-add on packed vectors never overflows int64.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BadModulus

MAX_PRIME_BITS = 31

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for everything below 3.3 * 10**24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sample_prime(bits: int, exclude: frozenset | set = frozenset(), rng: random.Random | None = None) -> int:
    """Draw a prime with exactly `bits` bits, avoiding `exclude`.

    The intended operating size is 31 bits; smaller sizes (down to the
    point where the range still contains primes) are accepted so that
    exhaustion behaviour stays testable.  Sampling is deterministic given
    `rng`; when the random search stalls the full range is scanned, so
    small ranges exhaust cleanly instead of looping.

    Raises:
        ValueError: bits out of range or no prime left to return.
    """
    if not (2 <= bits <= MAX_PRIME_BITS):
        raise ValueError(f"prime bit size must be in [2, {MAX_PRIME_BITS}], got {bits}")
    rng = rng or random.Random(0)
    lo, hi = 1 << (bits - 1), 1 << bits
    for _ in range(64 * bits):
        c = rng.randrange(lo, hi) | 1
        if c not in exclude and is_probable_prime(c):
            return c
    for c in range(lo | 1, hi, 2):
        if c not in exclude and is_probable_prime(c):
            return c
    raise ValueError(f"no unused prime of bit size {bits} remains")


@dataclass(frozen=True)
class ModPrime:
    """The field Z/pZ with elements represented as ints in [0, p)."""

    p: int

    def __post_init__(self):
        if self.p < 2 or self.p.bit_length() > MAX_PRIME_BITS or not is_probable_prime(self.p):
            raise ValueError(f"{self.p} is not a prime of at most {MAX_PRIME_BITS} bits")

    zero = 0
    one = 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    def from_int(self, n: int) -> int:
        return n % self.p

    def reduce(self, x) -> int:
        return reduce_scalar(x, self)


@dataclass
class PackedVec:
    """Contiguous int64 coefficient storage for one basis column.

    `data` holds `components` stacked coefficient rows of `stride`
    entries each, so the same fused multiply-add touches every component
    polynomial of the column in one pass.
    """

    data: np.ndarray
    components: int
    stride: int
    scratch: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    @classmethod
    def zeros(cls, components: int, stride: int) -> "PackedVec":
        return cls(np.zeros(components * stride, dtype=np.int64), components, stride)

    def component(self, i: int) -> np.ndarray:
        return self.data[i * self.stride:(i + 1) * self.stride]

    def copy(self) -> "PackedVec":
        return PackedVec(self.data.copy(), self.components, self.stride)

    def _ensure_scratch(self) -> np.ndarray:
        if self.scratch is None or self.scratch.shape != self.data.shape:
            self.scratch = np.empty_like(self.data)
        return self.scratch


def mul_add_in_place(v1: PackedVec, v2: PackedVec, c: int, fp: ModPrime) -> None:
    """v1 <- v1 + c*v2 (mod p), elementwise, without reallocating v1.

    Entries are < p < 2**31 and c < 2**31, so c*v2 + v1 < 2**63 and the
    int64 accumulation is exact before the single deferred reduction.
    """
    if v1.data.shape != v2.data.shape:
        raise ValueError("packed vectors differ in shape")
    scratch = v1._ensure_scratch()
    np.multiply(v2.data, c, out=scratch)
    np.add(v1.data, scratch, out=v1.data)
    np.remainder(v1.data, fp.p, out=v1.data)


def reduce_scalar(x, fp: ModPrime) -> int:
    """Image of the rational x in Z_p.

    Raises:
        BadModulus: p divides the denominator of x.
    """
    if isinstance(x, (int, np.integer)):
        return int(x) % fp.p
    x = Fraction(x)
    den = x.denominator % fp.p
    if den == 0:
        raise BadModulus(f"{fp.p} divides denominator of {x}")
    return x.numerator % fp.p * pow(den, -1, fp.p) % fp.p


def reduce_poly_scalar(num, den, fp: ModPrime) -> tuple[list[int], list[int]]:
    """Coefficientwise image of num(t)/den(t) in Z_p[t] x Z_p[t].

    No cancellation is attempted: (3t^2-3)/(t-1) mod 7 stays a ratio of
    two polynomials.  The denominator image must not collapse to zero.

    Raises:
        BadModulus: p divides a coefficient denominator, or den vanishes
            identically mod p.
    """
    rnum = [reduce_scalar(c, fp) for c in num]
    rden = [reduce_scalar(c, fp) for c in den]
    while rnum and rnum[-1] == 0:
        rnum.pop()
    while rden and rden[-1] == 0:
        rden.pop()
    if not rden:
        raise BadModulus(f"denominator vanishes mod {fp.p}")
    return rnum, rden


def eval_poly_at(coeffs: list[int], point: int, fp: ModPrime) -> int:
    """Horner evaluation of a Z_p[t] polynomial (ascending coefficients)."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * point + c) % fp.p
    return acc
