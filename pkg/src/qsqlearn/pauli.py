"""Pauli-string labels, wildcard prefixes and sparse coefficient containers.

Letters are encoded 2 bits each (I=0, X=1, Y=2, Z=3) and packed big-endian
into a single integer, so a string's code doubles as its index into the dense
coefficient vector produced by the Bell transform, and prefix membership is a
single shift-and-compare.
"""
from __future__ import annotations

import functools
from typing import Iterable, Iterator, Mapping

import numpy as np

LETTERS = "IXYZ"
LETTER_CODE = {c: i for i, c in enumerate(LETTERS)}

#: Largest qubit count for which dense 2^n x 2^n matrices are materialized.
DENSE_LIMIT = 12

SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionLimitError(ValueError):
    """Raised when a dense construction would exceed the configured limit."""


@functools.total_ordering
class PauliString:
    """An n-qubit Pauli label; immutable and usable as a dict key.

    ``code`` packs the letters as base-4 digits with qubit 0 most
    significant, so ``code`` is also the string's index in a dense
    length-4^n coefficient vector.
    """

    __slots__ = ("n", "code")

    def __init__(self, n: int, code: int):
        if n <= 0:
            raise ValueError("qubit count must be positive")
        if not 0 <= code < 4**n:
            raise ValueError(f"code {code} out of range for n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "code", code)

    def __setattr__(self, *_):
        raise AttributeError("PauliString is immutable")

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        code = 0
        for c in letters:
            code = (code << 2) | LETTER_CODE[c]
        return cls(len(letters), code)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0)

    def letter(self, j: int) -> str:
        if not 0 <= j < self.n:
            raise IndexError(f"qubit index {j} out of range for n={self.n}")
        return LETTERS[(self.code >> (2 * (self.n - 1 - j))) & 3]

    @property
    def letters(self) -> str:
        return "".join(self.letter(j) for j in range(self.n))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for j in range(self.n) if self.letter(j) != "I")

    def is_identity(self) -> bool:
        return self.code == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.n == other.n
            and self.code == other.code
        )

    def __lt__(self, other: "PauliString") -> bool:
        return (self.n, self.code) < (other.n, other.code)

    def __hash__(self) -> int:
        return hash((self.n, self.code))

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r})"

    def masks(self) -> tuple[int, int, int]:
        """(flip mask, phase mask, #Y) for computational-basis action.

        Bit for qubit j is ``1 << (n-1-j)``.  ``P|i> = phase(i) |i ^ flip>``
        with ``phase(i) = i**nY * (-1)**parity(i & phase_mask)``.
        """
        flip = phase = ny = 0
        for j in range(self.n):
            bit = 1 << (self.n - 1 - j)
            c = self.letter(j)
            if c in "XY":
                flip |= bit
            if c in "ZY":
                phase |= bit
            if c == "Y":
                ny += 1
        return flip, phase, ny


def all_pauli_strings(n: int) -> Iterator[PauliString]:
    for code in range(4**n):
        yield PauliString(n, code)


class PauliPrefix:
    """The set of n-qubit Pauli strings whose first k letters are fixed.

    With the big-endian packing the member codes form the contiguous block
    ``[code << 2(n-k), (code+1) << 2(n-k))``.
    """

    __slots__ = ("n", "fixed")

    def __init__(self, n: int, fixed: str):
        if len(fixed) > n:
            raise ValueError("prefix longer than the string")
        for c in fixed:
            if c not in LETTER_CODE:
                raise ValueError(f"bad letter {c!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "fixed", fixed)

    def __setattr__(self, *_):
        raise AttributeError("PauliPrefix is immutable")

    @property
    def k(self) -> int:
        return len(self.fixed)

    @property
    def size(self) -> int:
        return 4 ** (self.n - self.k)

    def block(self) -> tuple[int, int]:
        """Half-open code range [lo, hi) of the members."""
        shift = 2 * (self.n - self.k)
        code = 0
        for c in self.fixed:
            code = (code << 2) | LETTER_CODE[c]
        return code << shift, (code + 1) << shift

    def __contains__(self, p: PauliString) -> bool:
        if p.n != self.n:
            return False
        lo, hi = self.block()
        return lo <= p.code < hi

    def members(self) -> Iterator[PauliString]:
        lo, hi = self.block()
        for code in range(lo, hi):
            yield PauliString(self.n, code)

    def extend(self, letter: str) -> "PauliPrefix":
        return PauliPrefix(self.n, self.fixed + letter)

    def as_string(self) -> PauliString:
        if self.k != self.n:
            raise ValueError("prefix still has wildcards")
        return PauliString.from_letters(self.fixed)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliPrefix)
            and self.n == other.n
            and self.fixed == other.fixed
        )

    def __hash__(self) -> int:
        return hash((self.n, self.fixed))

    def __repr__(self) -> str:
        return f"PauliPrefix({self.fixed + '*' * (self.n - self.k)!r})"


class PauliExpansion:
    """Sparse map from PauliString to complex coefficient."""

    def __init__(self, n: int, coeffs: Mapping[PauliString, complex] | None = None):
        self.n = n
        self.coeffs: dict[PauliString, complex] = {}
        if coeffs:
            for p, c in coeffs.items():
                if p.n != n:
                    raise ValueError("mixed qubit counts in expansion")
                self.coeffs[p] = complex(c)

    def __getitem__(self, p: PauliString) -> complex:
        return self.coeffs.get(p, 0.0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def items(self):
        return self.coeffs.items()

    def total_mass(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def to_operator(self) -> np.ndarray:
        """Dense 2^n x 2^n reconstruction sum_P coeff(P) * P."""
        out = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for p, c in self.coeffs.items():
            out += c * pauli_matrix(p)
        return out

    def __repr__(self) -> str:
        body = ", ".join(f"{p.letters}: {c:.4g}" for p, c in sorted(self.coeffs.items()))
        return f"PauliExpansion({{{body}}})"


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of the Pauli string (tensor product of the letters)."""
    if p.n > DENSE_LIMIT:
        raise DimensionLimitError(f"n={p.n} exceeds dense limit {DENSE_LIMIT}")
    out = SINGLE_QUBIT[p.letter(0)]
    for j in range(1, p.n):
        out = np.kron(out, SINGLE_QUBIT[p.letter(j)])
    return out


def influence_subset_mass(expansion: PauliExpansion, subset: Iterable[int]) -> float:
    """Squared-coefficient mass on strings whose support meets ``subset``."""
    s = set(subset)
    for j in s:
        if not 0 <= j < expansion.n:
            raise IndexError(f"qubit index {j} out of range")
    return float(
        sum(abs(c) ** 2 for p, c in expansion.items() if p.support & s)
    )


def dj_map(expansion: PauliExpansion, j: int) -> PauliExpansion:
    """Keep exactly the terms acting non-trivially on qubit j."""
    if not 0 <= j < expansion.n:
        raise IndexError(f"qubit index {j} out of range")
    kept = {p: c for p, c in expansion.items() if p.letter(j) != "I"}
    return PauliExpansion(expansion.n, kept)
