"""Index codes: how a choice among ``I`` options is spread over binary variables.

Indices are 1-based.  A binary code of width ``B`` owns ``2**B`` codeword
*slots*; slots ``1..I`` carry the real indices and the rest are penalised by
the problem builders.  Bits are listed most-significant first, so for
:attr:`Strategy.ASC` slot ``i`` is ``[i - 1]_2``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .boolpoly import FactoredTerm, Literal, log2_ceil

BitVector = tuple[int, ...]


class Strategy(str, enum.Enum):
    ONE_HOT = "onehot"
    ASC = "asc"
    DSC = "dsc"
    GRAY_PF = "pf"
    EVEN_OR = "or"

    @classmethod
    def parse(cls, name: str | Strategy) -> Strategy:
        if isinstance(name, Strategy):
            return name
        key = name.strip().lower().replace("hubo-", "").replace("_", "")
        aliases = {"qubo": cls.ONE_HOT, "onehot": cls.ONE_HOT, "gray": cls.GRAY_PF, "graypf": cls.GRAY_PF,
                   "evenor": cls.EVEN_OR, "even": cls.EVEN_OR}
        if key in aliases:
            return aliases[key]
        return cls(key)


def int_to_bits(value: int, width: int) -> BitVector:
    return tuple((value >> (width - 1 - r)) & 1 for r in range(width))


def bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def gray(k: int) -> int:
    return k ^ (k >> 1)


def inverse_gray(g: int) -> int:
    k = 0
    while g:
        k ^= g
        g >>= 1
    return k


def hamming_weight(bits: Sequence[int]) -> int:
    return sum(int(b) for b in bits)


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(int(x) != int(y) for x, y in zip(a, b))


def _slots(strategy: Strategy, width: int) -> tuple[BitVector, ...]:
    size = 1 << width
    if strategy is Strategy.ASC:
        return tuple(int_to_bits(i, width) for i in range(size))
    if strategy is Strategy.DSC:
        return tuple(int_to_bits(size - 1 - i, width) for i in range(size))
    if strategy is Strategy.GRAY_PF:
        # reflected Gray cycle, rotated so that the all-ones word comes first
        start = inverse_gray(size - 1)
        return tuple(int_to_bits(gray((start + i) % size), width) for i in range(size))
    if strategy is Strategy.EVEN_OR:
        words = [int_to_bits(v, width) for v in range(size)]
        even = [w for w in words if hamming_weight(w) % 2 == 0]
        odd = [w for w in words if hamming_weight(w) % 2 == 1]
        return tuple(even + odd)
    raise ValueError(f"{strategy} has no slot table")


def code_width(strategy: Strategy, num_indices: int) -> int:
    if strategy is Strategy.ONE_HOT:
        return num_indices
    b = log2_ceil(num_indices)
    return b + 1 if strategy is Strategy.EVEN_OR else b


@dataclass(frozen=True)
class IndexCode:
    strategy: Strategy
    num_indices: int
    width: int
    slots: tuple[BitVector, ...]

    @property
    def codewords(self) -> tuple[BitVector, ...]:
        return self.slots[: self.num_indices]

    @property
    def num_slots(self) -> int:
        return len(self.slots)

    @cached_property
    def _lookup(self) -> dict[BitVector, int]:
        return {w: i + 1 for i, w in enumerate(self.slots)}

    def codeword(self, i: int) -> BitVector:
        if not 1 <= i <= self.num_slots:
            raise IndexError(f"index {i} outside 1..{self.num_slots}")
        return self.slots[i - 1]

    def index_of(self, bits: Sequence[int]) -> int | None:
        """Slot index holding ``bits`` (1-based), or None if it is not a slot."""
        return self._lookup.get(tuple(int(b) for b in bits))

    def decode(self, bits: Sequence[int]) -> int | None:
        """Real index ``1..I`` for ``bits``, or None if unused/invalid."""
        i = self.index_of(bits)
        return i if i is not None and i <= self.num_indices else None

    def invalid_reason(self, bits: Sequence[int]) -> str | None:
        if self.decode(bits) is not None:
            return None
        if self.strategy is Strategy.ONE_HOT:
            return "not one-hot"
        if self.strategy is Strategy.EVEN_OR and hamming_weight(bits) % 2:
            return "invalid (odd parity)"
        return "unused codeword"

    @property
    def even_slot_count(self) -> int:
        """Number of even-weight slots; only meaningful for EVEN_OR."""
        return 1 << (self.width - 1)


def make_code(strategy: Strategy | str, num_indices: int) -> IndexCode:
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ONE_HOT:
        if num_indices < 1:
            raise ValueError("one-hot code needs at least one index")
        words = tuple(tuple(int(r == i) for r in range(num_indices)) for i in range(num_indices))
        return IndexCode(strategy, num_indices, num_indices, words)
    if num_indices < 2:
        raise ValueError(f"{strategy.value} code needs at least two indices (got {num_indices})")
    width = code_width(strategy, num_indices)
    return IndexCode(strategy, num_indices, width, _slots(strategy, width))


def delta(code: IndexCode, i: int, variables: Sequence[int], coefficient: int = 1) -> FactoredTerm:
    """Indicator product that is 1 exactly when ``variables`` spell codeword ``i``.

    Literal ``r`` is ``x`` where the codeword bit is 1 and ``(1 - x)`` where it
    is 0.
    """
    if len(variables) != code.width:
        raise ValueError(f"need {code.width} variables, got {len(variables)}")
    word = code.codeword(i)
    return FactoredTerm.make(coefficient, (Literal(v, not b) for v, b in zip(variables, word)))


def unused_codewords(code: IndexCode) -> list[int]:
    """Slots penalised by the range constraint.

    For EVEN_OR only the even-weight slots past ``I`` count; odd-weight words
    are handled by the parity penalty instead.
    """
    if code.strategy is Strategy.ONE_HOT:
        return []
    upper = code.even_slot_count if code.strategy is Strategy.EVEN_OR else code.num_slots
    return list(range(code.num_indices + 1, upper + 1))


def odd_parity_slots(code: IndexCode) -> list[int]:
    if code.strategy is not Strategy.EVEN_OR:
        return []
    return list(range(code.even_slot_count + 1, code.num_slots + 1))


def format_table(code: IndexCode, entity: str = "v") -> str:
    """Render the code as a slot / bits / indicator table."""
    rows = []
    for s, word in enumerate(code.slots, 1):
        label = str(s) if s <= code.num_indices else "Not used"
        factors = " ".join(f"x_{entity}{r + 1}" if b else f"(1-x_{entity}{r + 1})" for r, b in enumerate(word))
        rows.append((label, "[" + " ".join(map(str, word)) + "]", factors))
    w0 = max(len("i"), *(len(r[0]) for r in rows))
    w1 = max(len("bits"), *(len(r[1]) for r in rows))
    lines = [f"{'i':<{w0}}  {'bits':<{w1}}  delta", "-" * (w0 + w1 + 30)]
    lines += [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
    return "\n".join(lines)
