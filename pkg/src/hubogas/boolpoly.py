"""Integer multilinear pseudo-Boolean polynomials.

A :class:`Polynomial` is a constant plus a list of :class:`FactoredTerm`s, each
a signed integer times a product of literals ``x_i`` or ``(1 - x_i)``.  Terms
are kept in factored form until :func:`expand` is called explicitly, because
negated literals map one-to-one onto X-gate sandwiches in the circuit builder.

Coefficients are Python integers restricted to the signed 64-bit range; any
arithmetic that leaves the range raises :class:`CoefficientOverflowError`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1

DEFAULT_ENUMERATION_CAP = 24


class CoefficientOverflowError(OverflowError):
    pass


class EnumerationCapError(ValueError):
    pass


def _checked(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise CoefficientOverflowError(f"coefficient {value} does not fit in int64")
    return value


@dataclass(frozen=True, order=True)
class Literal:
    """``x_var`` if not negated, ``1 - x_var`` if negated."""

    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 0:
            raise ValueError(f"variable index must be nonnegative, got {self.var}")

    def value(self, bit: int) -> int:
        return 1 - bit if self.negated else bit

    def __str__(self) -> str:
        return f"{'!' if self.negated else ''}v{self.var}"


TermKey = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class FactoredTerm:
    coefficient: int
    literals: tuple[Literal, ...] = ()

    def __post_init__(self):
        _checked(self.coefficient)
        lits = tuple(self.literals)
        object.__setattr__(self, "literals", lits)
        for a, b in zip(lits, lits[1:]):
            if a.var >= b.var:
                raise ValueError("literals must have distinct vars sorted by index; use FactoredTerm.make")

    @classmethod
    def make(cls, coefficient: int, literals: Iterable[Literal]) -> FactoredTerm | None:
        """Build a term, collapsing repeated variables.

        ``x*x = x`` and ``(1-x)(1-x) = 1-x``; ``x*(1-x)`` annihilates the term,
        in which case ``None`` is returned (as it is for a zero coefficient).
        """
        if coefficient == 0:
            return None
        seen: dict[int, bool] = {}
        for lit in literals:
            prev = seen.get(lit.var)
            if prev is None:
                seen[lit.var] = lit.negated
            elif prev != lit.negated:
                return None
        lits = tuple(Literal(v, seen[v]) for v in sorted(seen))
        return cls(coefficient, lits)

    @property
    def key(self) -> TermKey:
        return (tuple(l.var for l in self.literals), tuple(int(l.negated) for l in self.literals))

    @property
    def degree(self) -> int:
        return len(self.literals)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(l.var for l in self.literals)

    @property
    def negated_vars(self) -> tuple[int, ...]:
        return tuple(l.var for l in self.literals if l.negated)

    @property
    def pos_mask(self) -> int:
        return sum(1 << l.var for l in self.literals if not l.negated)

    @property
    def neg_mask(self) -> int:
        return sum(1 << l.var for l in self.literals if l.negated)

    def evaluate(self, assignment: Sequence[int]) -> int:
        for lit in self.literals:
            if lit.value(assignment[lit.var]) == 0:
                return 0
        return self.coefficient

    def scaled(self, factor: int) -> FactoredTerm | None:
        if factor == 0:
            return None
        return FactoredTerm(_checked(self.coefficient * factor), self.literals)

    def __mul__(self, other: FactoredTerm) -> FactoredTerm | None:
        return FactoredTerm.make(_checked(self.coefficient * other.coefficient), self.literals + other.literals)

    def __str__(self) -> str:
        if not self.literals:
            return str(self.coefficient)
        return f"{self.coefficient} * " + " ".join(str(l) for l in self.literals)


class Polynomial:
    """Immutable polynomial with merged, canonically ordered terms.

    Terms with the same literal multiset are merged on construction and
    zero coefficients dropped; terms are sorted by (variable ids, polarities).
    """

    __slots__ = ("num_vars", "terms", "constant", "_values")

    def __init__(self, num_vars: int, terms: Iterable[FactoredTerm] = (), constant: int = 0):
        acc: dict[TermKey, int] = {}
        lits: dict[TermKey, tuple[Literal, ...]] = {}
        const = _checked(int(constant))
        for t in terms:
            if t is None:
                continue
            if not t.literals:
                const = _checked(const + t.coefficient)
                continue
            if t.literals[-1].var >= num_vars:
                raise ValueError(f"term {t} references a variable outside 0..{num_vars - 1}")
            k = t.key
            acc[k] = _checked(acc.get(k, 0) + t.coefficient)
            lits[k] = t.literals
        self.num_vars = int(num_vars)
        self.terms: tuple[FactoredTerm, ...] = tuple(
            FactoredTerm(acc[k], lits[k]) for k in sorted(acc) if acc[k] != 0
        )
        self.constant = const
        self._values = None

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    @property
    def is_expanded(self) -> bool:
        return all(not l.negated for t in self.terms for l in t.literals)

    def term_map(self) -> dict[TermKey, int]:
        return {t.key: t.coefficient for t in self.terms}

    def degree_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for t in self.terms:
            hist[t.degree] = hist.get(t.degree, 0) + 1
        return dict(sorted(hist.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.constant == other.constant
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.num_vars, self.constant, self.terms))

    def __repr__(self) -> str:
        return f"Polynomial(num_vars={self.num_vars}, terms={len(self.terms)}, constant={self.constant})"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Polynomial | int) -> Polynomial:
        if isinstance(other, int):
            return Polynomial(self.num_vars, self.terms, _checked(self.constant + other))
        n = max(self.num_vars, other.num_vars)
        return Polynomial(n, self.terms + other.terms, _checked(self.constant + other.constant))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return self.scaled(-1)

    def __sub__(self, other: Polynomial | int) -> Polynomial:
        return self + (-other)

    def scaled(self, factor: int) -> Polynomial:
        return Polynomial(
            self.num_vars,
            (t.scaled(factor) for t in self.terms),
            _checked(self.constant * factor),
        )

    def __mul__(self, other: Polynomial | int) -> Polynomial:
        if isinstance(other, int):
            return self.scaled(other)
        n = max(self.num_vars, other.num_vars)
        left = list(self.terms)
        right = list(other.terms)
        if self.constant:
            left.append(FactoredTerm(self.constant))
        if other.constant:
            right.append(FactoredTerm(other.constant))
        return Polynomial(n, (a * b for a in left for b in right))

    __rmul__ = __mul__

    def with_num_vars(self, num_vars: int) -> Polynomial:
        return Polynomial(num_vars, self.terms, self.constant)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, assignment: Sequence[int]) -> int:
        return evaluate(self, assignment)

    def values(self, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
        """Objective value for every assignment, indexed by ``sum(x_j << j)``."""
        if self._values is None or len(self._values) != 1 << self.num_vars:
            if self.num_vars > cap:
                raise EnumerationCapError(
                    f"{self.num_vars} variables exceeds the enumeration cap of {cap}; "
                    "supply analytic bounds instead"
                )
            _check_accumulator(self)
            pos = np.array([t.pos_mask for t in self.terms], dtype=np.int64)
            neg = np.array([t.neg_mask for t in self.terms], dtype=np.int64)
            coeffs = np.array([t.coefficient for t in self.terms], dtype=np.int64)
            vals = kernels.eval_all(self.num_vars, pos, neg, coeffs, np.int64(self.constant))
            vals.setflags(write=False)
            self._values = vals
        return self._values


def _check_accumulator(poly: Polynomial) -> None:
    worst = abs(poly.constant) + sum(abs(t.coefficient) for t in poly.terms)
    if worst > INT64_MAX:
        raise CoefficientOverflowError("objective values may overflow int64 during evaluation")


# -- constructors -------------------------------------------------------------


def monomial(coefficient: int, *variables: int) -> FactoredTerm | None:
    return FactoredTerm.make(coefficient, (Literal(v) for v in variables))


def variable(num_vars: int, var: int, negated: bool = False) -> Polynomial:
    return Polynomial(num_vars, [FactoredTerm(1, (Literal(var, negated),))])


def constant(num_vars: int, value: int) -> Polynomial:
    return Polynomial(num_vars, (), value)


def from_mapping(num_vars: int, coeffs: Mapping[tuple[int, ...], int], const: int = 0) -> Polynomial:
    """Expanded polynomial from ``{(i, j, ...): coefficient}``."""
    return Polynomial(num_vars, (monomial(c, *vs) for vs, c in coeffs.items()), const)


# -- operations -----------------------------------------------------------------


def expand(poly: Polynomial) -> Polynomial:
    """Distribute every ``(1 - x)`` factor so only positive literals remain."""
    out: list[FactoredTerm] = []
    for t in poly.terms:
        pos = [l.var for l in t.literals if not l.negated]
        neg = [l.var for l in t.literals if l.negated]
        # (1 - x_a)(1 - x_b)... = sum over subsets S of neg of (-1)^|S| prod_S x
        for sub in range(1 << len(neg)):
            chosen = [neg[j] for j in range(len(neg)) if sub >> j & 1]
            sign = -1 if len(chosen) % 2 else 1
            out.append(FactoredTerm.make(_checked(sign * t.coefficient), (Literal(v) for v in pos + chosen)))
    return Polynomial(poly.num_vars, out, poly.constant)


def evaluate(poly: Polynomial, assignment: Sequence[int]) -> int:
    if len(assignment) != poly.num_vars:
        raise ValueError(f"assignment has length {len(assignment)}, expected {poly.num_vars}")
    total = poly.constant
    for t in poly.terms:
        total += t.evaluate(assignment)
    return _checked(total)


def bounds(poly: Polynomial, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[int, int]:
    """Exact ``(min, max)`` of the polynomial by exhaustive enumeration."""
    if poly.num_vars == 0:
        return poly.constant, poly.constant
    vals = poly.values(cap)
    return int(vals.min()), int(vals.max())


def interval_bounds(poly: Polynomial) -> tuple[int, int]:
    """Cheap sound enclosure: each term contributes either 0 or its coefficient."""
    lo = poly.constant + sum(min(0, t.coefficient) for t in poly.terms)
    hi = poly.constant + sum(max(0, t.coefficient) for t in poly.terms)
    return lo, hi


def register_width(lo: int, hi: int) -> int:
    """Smallest ``m >= 1`` with ``-2**(m-1) <= lo <= hi < 2**(m-1)``."""
    if lo > hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    m = 1
    while not (-(1 << (m - 1)) <= lo and hi < (1 << (m - 1))):
        m += 1
    return m


def fits_register(lo: int, hi: int, m: int) -> bool:
    return m >= 1 and -(1 << (m - 1)) <= lo and hi < (1 << (m - 1))


def value_register_width(
    poly: Polynomial,
    known_bounds: tuple[int, int] | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> int:
    """Two's-complement width needed to hold every value of ``poly``.

    Bounds come from exhaustive enumeration unless ``known_bounds`` is given.
    """
    lo, hi = known_bounds if known_bounds is not None else bounds(poly, cap)
    return register_width(lo, hi)


def shift(poly: Polynomial, y: int) -> Polynomial:
    """``poly - y``: the threshold-shifted objective the oracle compares to zero."""
    return Polynomial(poly.num_vars, poly.terms, _checked(poly.constant - y))


# -- text format ------------------------------------------------------------------


def dumps(poly: Polynomial) -> str:
    lines = [f"vars {poly.num_vars}"]
    lines += [str(t) for t in poly.terms]
    lines.append(f"const {poly.constant}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Polynomial:
    """Parse the line format written by :func:`dumps`.

    ``vars`` is optional; without it the variable count is inferred from the
    highest index mentioned.
    """
    num_vars = None
    const = 0
    terms: list[FactoredTerm | None] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "vars":
                num_vars = int(rest)
            elif head == "const":
                const += int(rest)
            else:
                coeff_s, star, lit_s = line.partition("*")
                if not star:
                    raise ValueError("expected '<coeff> * <literals>'")
                lits = []
                for tok in lit_s.split():
                    neg = tok.startswith("!")
                    name = tok[1:] if neg else tok
                    if not name.startswith("v"):
                        raise ValueError(f"bad literal {tok!r}")
                    lits.append(Literal(int(name[1:]), neg))
                terms.append(FactoredTerm.make(int(coeff_s), lits))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if num_vars is None:
        num_vars = 1 + max((t.literals[-1].var for t in terms if t is not None and t.literals), default=-1)
    return Polynomial(num_vars, terms, const)


def naive_bounds(poly: Polynomial) -> tuple[int, int]:
    """Pure-Python enumeration; used as an independent check on :func:`bounds`."""
    n = poly.num_vars
    vals = [evaluate(poly, [(x >> j) & 1 for j in range(n)]) for x in range(1 << n)]
    return min(vals), max(vals)


def bits_of(x: int, n: int) -> list[int]:
    return [(x >> j) & 1 for j in range(n)]


def index_of(bits: Sequence[int]) -> int:
    return sum(int(b) << j for j, b in enumerate(bits))


def log2_ceil(x: int) -> int:
    if x < 1:
        raise ValueError("log2_ceil needs a positive argument")
    return (x - 1).bit_length()


__all__ = [
    "CoefficientOverflowError",
    "EnumerationCapError",
    "FactoredTerm",
    "Literal",
    "Polynomial",
    "bits_of",
    "bounds",
    "constant",
    "dumps",
    "evaluate",
    "expand",
    "fits_register",
    "from_mapping",
    "index_of",
    "interval_bounds",
    "loads",
    "log2_ceil",
    "monomial",
    "naive_bounds",
    "register_width",
    "shift",
    "value_register_width",
    "variable",
]
