"""Symbols and the problem-wide symbol context.

Every symbolic value in the toolkit lives in a :class:`Context` that declares,
once and for all, which identifiers exist and what role they play.  The
context fixes a global symbol order (geometric first, then metric parameters,
then free constants, then the formal energy arguments) which in turn fixes the
graded-lexicographic monomial order used for canonical forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

GEOMETRIC_NAMES = ("x", "y", "z")
PARAMETER_NAMES = ("g11", "g12", "g13", "g22", "g23", "g33")
FORMAL_NAMES = ("PHI", "PSI")


class SymbolKind(enum.Enum):
    GEOMETRIC = 0
    PARAMETER = 1
    CONSTANT = 2
    FORMAL = 3


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind

    @property
    def differentiable(self) -> bool:
        """Only geometric coordinates and formal energy slots can be
        differentiated against; everything else behaves as a constant."""
        return self.kind in (SymbolKind.GEOMETRIC, SymbolKind.FORMAL)

    def __repr__(self) -> str:
        return f"Symbol({self.name})"


class KernelError(Exception):
    """Base class for symbolic-kernel errors."""


class UndeclaredSymbolError(KernelError):
    def __init__(self, name: str, position: int | None = None):
        msg = f"undeclared identifier {name!r}"
        if position is not None:
            msg += f" at position {position}"
        super().__init__(msg)
        self.name = name
        self.position = position


def _kind_of(name: str) -> SymbolKind:
    if name in GEOMETRIC_NAMES:
        return SymbolKind.GEOMETRIC
    if name in PARAMETER_NAMES:
        return SymbolKind.PARAMETER
    if name in FORMAL_NAMES:
        return SymbolKind.FORMAL
    return SymbolKind.CONSTANT


class Context:
    """A frozen table of symbols with a total order.

    The order is (kind, name): geometric ``x > y > z`` come first, then the
    six metric parameters, then free constants alphabetically, then the formal
    arguments ``PHI``, ``PSI``.  Position in this order is the position in
    every exponent vector, so two polynomials from the same context always
    agree on what their exponent tuples mean.
    """

    __slots__ = ("symbols", "_index", "_zero_exp", "_poly_cache")

    def __init__(self, constants: Iterable[str] = ()):
        consts = sorted(set(constants))
        for name in consts:
            if _kind_of(name) is not SymbolKind.CONSTANT:
                raise KernelError(f"{name!r} is a reserved identifier, not a free constant")
            if not name.isidentifier():
                raise KernelError(f"invalid constant name {name!r}")
        names = list(GEOMETRIC_NAMES) + list(PARAMETER_NAMES) + consts + list(FORMAL_NAMES)
        self.symbols: tuple[Symbol, ...] = tuple(Symbol(n, _kind_of(n)) for n in names)
        self._index = {s.name: i for i, s in enumerate(self.symbols)}
        self._zero_exp = (0,) * len(self.symbols)
        self._poly_cache: dict = {}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, sym: "Symbol | str") -> int:
        name = sym if isinstance(sym, str) else sym.name
        try:
            return self._index[name]
        except KeyError:
            raise UndeclaredSymbolError(name) from None

    def symbol(self, name: str) -> Symbol:
        return self.symbols[self.index(name)]

    @property
    def zero_exponents(self) -> tuple[int, ...]:
        return self._zero_exp

    def __repr__(self) -> str:
        return f"Context({[s.name for s in self.symbols]})"
