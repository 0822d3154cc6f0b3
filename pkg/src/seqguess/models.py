"""Equation schemas and their evaluation into order problems.

A schema is an ordered list of monomials in the unknown function: each
monomial is an integer partition whose parts name shifted/derived/
dilated/substituted copies of f, under one of four interpretation tags:

  shift       part k  ->  f(n + k - 1)          (sequences)
  derivative  part k  ->  (d/dx)^(k-1) f(x)     (series)
  qdilation   part k  ->  f(q^(k-1) x)          (series, q-mode)
  mahler      part k  ->  f(x^k)                (series)

The guessed equation is a linear combination of the schema's monomials
with polynomial coefficients; finding it is a Hermite-Pade problem whose
input streams are the monomial values (sequence classes) or monomial
series coefficients (series classes), built here either modulo a prime
or exactly for verification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadModulus, SchemaExhausted
from .modarith import ModPrime, reduce_scalar
from .rings import QPARAM, QQ, QQ_T, RatPoly, pmul_trunc

# ---------------------------------------------------------------------------
# integer partitions in the fixed enumeration order


def _partitions_of(w: int, max_part: int | None = None):
    """Partitions of w as weakly decreasing tuples."""
    if w == 0:
        yield ()
        return
    mp = w if max_part is None else min(max_part, w)
    for first in range(mp, 0, -1):
        for rest in _partitions_of(w - first, first):
            yield (first,) + rest


def partition_stream():
    """All partitions: ascending weight, ascending lex within a weight."""
    for w in itertools.count(0):
        yield from sorted(_partitions_of(w))


def partitions_lex(max_weight: int) -> list[tuple[int, ...]]:
    if max_weight < 0:
        raise ValueError("max_weight must be nonnegative")
    out: list[tuple[int, ...]] = []
    for w in range(max_weight + 1):
        out.extend(sorted(_partitions_of(w)))
    return out


# ---------------------------------------------------------------------------
# monomials and schemas


@dataclass(frozen=True)
class Monomial:
    """One product of shifted/derived/dilated/substituted copies of f.

    `mixed` is the exponent j of an extra q^(j n) factor (mixed
    q-recurrences only).
    """

    parts: tuple[int, ...]
    tag: str
    mixed: int = 0

    @property
    def loss(self) -> int:
        """Order conditions lost: shifting or differentiating by k costs k."""
        if self.tag in ("shift", "derivative") and self.parts:
            return max(self.parts) - 1
        return 0

    @property
    def degree(self) -> int:
        return len(self.parts)


# class name -> (tag, series?, linear?, part-cap source)
# part-cap "one" pins parts to 1; an options attribute name means
# parts <= attr+1 for operator tags, parts <= attr for mahler levels.
_CLASSES = {
    "rat": ("shift", False, True, "one"),
    "prec": ("shift", False, True, "max_shift"),
    "rec": ("shift", False, False, "max_shift"),
    "pade": ("mahler", True, True, "one"),
    "alg": ("mahler", True, False, "one"),
    "fe": ("mahler", True, False, "max_level"),
    "holo": ("derivative", True, True, "max_derivative"),
    "ade": ("derivative", True, False, "max_derivative"),
}

CLASS_NAMES = tuple(_CLASSES)


@dataclass(frozen=True)
class Schema:
    """Ordered monomial list plus how its order conditions are sampled."""

    monomials: tuple[Monomial, ...]
    klass: str
    q: bool
    points_kind: str  # "integer" | "qpower" | "confluent"

    @property
    def series(self) -> bool:
        return self.points_kind == "confluent"

    @property
    def loss(self) -> int:
        return max((mo.loss for mo in self.monomials), default=0)

    def __len__(self) -> int:
        return len(self.monomials)


def _resolve_caps(klass: str, opts, q: bool) -> tuple[str, int | None, int | None]:
    """(tag, part cap, count cap) for the class under the active options."""
    tag, series, linear, cap_src = _CLASSES[klass]
    if q and series:
        tag = "qdilation"
    if cap_src == "one":
        part_cap = 1
    else:
        bound = getattr(opts, cap_src)
        if bound is None:
            part_cap = None
        elif tag == "mahler":
            part_cap = bound
        else:
            part_cap = bound + 1
    count_cap = 1 if linear else opts.max_power
    return tag, part_cap, count_cap


def schema_stream(klass: str, opts, q: bool = False):
    """Monomials of the class passing every active filter, in order."""
    if klass not in _CLASSES:
        raise ValueError(f"unknown class {klass!r}")
    tag, part_cap, count_cap = _resolve_caps(klass, opts, q)
    series = _CLASSES[klass][1]
    homog = opts.homogeneous
    somos = opts.somos
    if somos is True:
        raise ValueError("somos=true must be expanded to explicit values by the caller")
    mixed_max = opts.max_mixed_degree if (q and not series) else 0

    if somos is not False:
        if homog is True or (homog is not False and not isinstance(homog, int)):
            raise ValueError("somos needs an integer homogeneous degree (default 2)")
        somos_count = homog if homog is not False else 2
        max_weight = somos + somos_count
    elif isinstance(homog, int) and homog is not True and homog is not False and part_cap is not None:
        max_weight = part_cap * homog
    elif part_cap is not None and count_cap is not None:
        max_weight = part_cap * count_cap
    else:
        max_weight = None

    def admissible(parts: tuple[int, ...]) -> bool:
        if part_cap is not None and parts and parts[0] > part_cap:
            return False
        if count_cap is not None and len(parts) > count_cap:
            return False
        if homog is True:
            if not parts:
                return False
        elif homog is not False:
            if len(parts) != homog:
                return False
        if somos is not False:
            if len(parts) != somos_count or sum(p - 1 for p in parts) != somos:
                return False
        return True

    source = partition_stream() if max_weight is None else iter(partitions_lex(max_weight))
    for parts in source:
        if admissible(parts):
            for j in range(mixed_max + 1):
                yield Monomial(parts, tag, j)


def build_schema(klass: str, opts, m: int, q: bool = False) -> Schema:
    """First m monomials of the filtered stream; SchemaExhausted if fewer."""
    if m < 2:
        raise ValueError("schemas start at two monomials")
    monos = tuple(itertools.islice(schema_stream(klass, opts, q), m))
    if len(monos) < m:
        raise SchemaExhausted(f"class {klass}: only {len(monos)} monomials under the active filters")
    series = _CLASSES[klass][1]
    if series:
        kind = "confluent"
    elif q and opts.max_mixed_degree == 0:
        kind = "qpower"
    else:
        kind = "integer"
    return Schema(monos, klass, q, kind)


# ---------------------------------------------------------------------------
# shared-subproduct plan for monomial products


@dataclass(frozen=True)
class CauchyPlan:
    """Products to perform, each combining a cached prefix with one atom.

    Steps are ascending-sorted part tuples; tuple[:-1] is already cached
    when tuple is computed, so every step costs exactly one product.
    """

    steps: tuple[tuple[int, ...], ...]

    @property
    def product_count(self) -> int:
        return len(self.steps)


def cauchy_plan(parts_list) -> CauchyPlan:
    seen = set()
    steps = []
    for parts in parts_list:
        key = tuple(sorted(parts))
        for cut in range(2, len(key) + 1):
            prefix = key[:cut]
            if prefix not in seen:
                seen.add(prefix)
                steps.append(prefix)
    return CauchyPlan(tuple(steps))


def naive_product_count(parts_list) -> int:
    return sum(max(0, len(parts) - 1) for parts in parts_list)


# ---------------------------------------------------------------------------
# order problems


@dataclass
class OrderProblem:
    """Streams and sample points for one Hermite-Pade instance."""

    streams: list
    points: list | None  # None = confluent (series coefficients)
    sigma: int


def _to_field(term, F, q_point):
    if isinstance(F, ModPrime):
        if isinstance(term, RatPoly):
            if q_point is None:
                raise ValueError("rational-function terms need a q evaluation point")

            def ev(coeffs):
                acc = 0
                for c in reversed(coeffs):
                    acc = (acc * q_point + reduce_scalar(c, F)) % F.p
                return acc

            den = ev(term.den)
            if den == 0:
                raise BadModulus(f"term denominator vanishes at q={q_point} mod {F.p}")
            return ev(term.num) * F.inv(den) % F.p
        return reduce_scalar(term, F)
    if F is QQ_T:
        return RatPoly.coerce(term)
    return Fraction(term)


def _geometric(q, count: int, F) -> list:
    out = []
    acc = F.one
    for _ in range(count):
        out.append(acc)
        acc = F.mul(acc, q)
    return out


def _atom_stream(part: int, tag: str, terms, sigma: int, F, qval) -> list:
    if tag == "shift":
        return terms[part - 1 : part - 1 + sigma]
    if tag == "derivative":
        g = terms
        for k in range(part - 1):
            g = [F.mul(F.from_int(j + 1), g[j + 1]) for j in range(len(g) - 1)]
        return g[:sigma]
    if tag == "qdilation":
        qk = F.one
        for _ in range(part - 1):
            qk = F.mul(qk, qval)
        return [F.mul(c, w) for c, w in zip(terms[:sigma], _geometric(qk, sigma, F))]
    if tag == "mahler":
        out = [F.zero] * sigma
        for j in range(len(terms)):
            if j * part >= sigma:
                break
            out[j * part] = terms[j]
        return out
    raise ValueError(f"unknown tag {tag!r}")


def _field_setup(terms, schema: Schema, F, q_point):
    """Coerce terms into F and resolve the q value, if the schema needs one."""
    needs_q = schema.q or any(mo.tag == "qdilation" or mo.mixed for mo in schema.monomials)
    if isinstance(F, ModPrime):
        qval = q_point
    elif F is QQ_T:
        qval = QPARAM
    else:
        qval = None
    if needs_q and qval is None:
        raise ValueError("schema needs a q value but none is available in this field")
    return [_to_field(t, F, q_point) for t in terms], qval


def build_images(terms, schema: Schema, F, q_point=None) -> OrderProblem:
    """Evaluate every schema monomial against the terms, in the field F.

    F is a ModPrime (terms reduced once, all further work modular) or an
    exact field (QQ, QQ_T) for verification.  q_point specializes the
    q parameter when F is modular; exact q work uses the parameter
    itself.
    """
    sigma = len(terms) - schema.loss
    if sigma < 1:
        raise ValueError("not enough terms for this schema")
    terms_f, qval = _field_setup(terms, schema, F, q_point)
    series = schema.series

    atoms: dict[int, list] = {}
    for mo in schema.monomials:
        for part in mo.parts:
            if part not in atoms:
                atoms[part] = _atom_stream(part, mo.tag, terms_f, sigma, F, qval)

    if series:
        const = [F.one] + [F.zero] * (sigma - 1)

        def mul(a, b):
            return pmul_trunc(a, b, sigma, F)

    else:
        const = [F.one] * sigma

        def mul(a, b):
            return [F.mul(x, y) for x, y in zip(a, b)]

    plan = cauchy_plan([mo.parts for mo in schema.monomials])
    memo: dict[tuple[int, ...], list] = {(): const}
    for part in atoms:
        memo[(part,)] = atoms[part]
    for prefix in plan.steps:
        memo[prefix] = mul(memo[prefix[:-1]], memo[prefix[-1:]])

    streams = []
    for mo in schema.monomials:
        base = memo[tuple(sorted(mo.parts))]
        if mo.mixed:
            qj = F.one
            for _ in range(mo.mixed):
                qj = F.mul(qj, qval)
            base = [F.mul(v, w) for v, w in zip(base, _geometric(qj, sigma, F))]
        streams.append(list(base))

    if series:
        points = None
    elif schema.points_kind == "qpower":
        points = _geometric(qval, sigma, F)
    else:
        points = [F.from_int(i) for i in range(sigma)]
    return OrderProblem(streams=streams, points=points, sigma=sigma)


def check_images(terms, schema: Schema, F, q_point=None):
    """Per-monomial images at each monomial's own natural length.

    Unlike build_images, which cuts every stream to the shared order,
    stream l here has length len(terms) - loss_l and the point list (for
    sequence kinds) covers all len(terms) indices.  This exposes every
    condition the supplied data can express, for verifying candidate
    equations beyond the order the solver used.
    """
    N = len(terms)
    if N - schema.loss < 1:
        raise ValueError("not enough terms for this schema")
    terms_f, qval = _field_setup(terms, schema, F, q_point)
    series = schema.series
    streams = []
    for mo in schema.monomials:
        L = N - mo.loss
        if series:
            acc = [F.one] + [F.zero] * (L - 1)
        else:
            acc = [F.one] * L
        for part in mo.parts:
            atom = _atom_stream(part, mo.tag, terms_f, L, F, qval)
            if series:
                acc = pmul_trunc(acc, atom, L, F)
            else:
                acc = [F.mul(x, y) for x, y in zip(acc, atom)]
        if mo.mixed:
            qj = F.one
            for _ in range(mo.mixed):
                qj = F.mul(qj, qval)
            acc = [F.mul(v, w) for v, w in zip(acc, _geometric(qj, L, F))]
        streams.append(acc)
    if series:
        points = None
    elif schema.points_kind == "qpower":
        points = _geometric(qval, N, F)
    else:
        points = [F.from_int(i) for i in range(N)]
    return streams, points
