"""
Random linear network coding over GF(q): coefficient-vector generation and
incremental rank tracking at a receiver.

Only coefficient vectors are modelled; payload symbols never matter for
whether a receiver can decode.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import InvalidArgs, LengthMismatch
from .field import FieldSpec, gf_create


@dataclass(frozen=True)
class CodeParams:
    """K source packets coded over ``field``."""

    k: int
    field: FieldSpec

    def __post_init__(self):
        if int(self.k) < 1:
            raise InvalidArgs(f"k must be >= 1, got {self.k}")

    @classmethod
    def of(cls, k: int, q: int = 2) -> "CodeParams":
        return cls(k, gf_create(q))

    @property
    def q(self) -> int:
        return self.field.order


def draw_coefficient_vector(params: CodeParams, rng: np.random.Generator) -> tuple[int, ...]:
    """K independent uniform draws from GF(q); the zero vector is allowed."""
    return tuple(int(c) for c in rng.integers(0, params.q, size=params.k))


@dataclass
class DecoderState:
    """Reduced row-echelon basis of everything a receiver has collected.

    ``basis[i]`` has its leading 1 at ``pivots[i]``, pivots are strictly
    increasing, and each pivot column is zero in every other basis row.
    """

    k: int
    field: FieldSpec
    basis: list[list[int]] = dc_field(default_factory=list)
    pivots: list[int] = dc_field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivot_columns(self) -> frozenset[int]:
        return frozenset(self.pivots)

    def complete(self) -> bool:
        return self.rank == self.k

    def _reduce(self, v: list[int]) -> list[int]:
        f = self.field
        for row, p in zip(self.basis, self.pivots):
            c = v[p]
            if c:
                v = [a ^ f.mul(c, b) for a, b in zip(v, row)]
        return v

    def absorb(self, v) -> bool:
        """Add one received coefficient vector; True iff it was innovative."""
        if len(v) != self.k:
            raise LengthMismatch(f"vector of length {len(v)} for k={self.k}")
        f = self.field
        v = [f.check(int(a)) for a in v]
        if self.complete():
            return False
        v = self._reduce(v)
        lead = next((j for j, a in enumerate(v) if a), None)
        if lead is None:
            return False
        scale = f.inv(v[lead])
        v = [f.mul(scale, a) for a in v]
        for i, row in enumerate(self.basis):
            c = row[lead]
            if c:
                self.basis[i] = [a ^ f.mul(c, b) for a, b in zip(row, v)]
        pos = sum(1 for p in self.pivots if p < lead)
        self.basis.insert(pos, v)
        self.pivots.insert(pos, lead)
        return True


def decoder_new(params: CodeParams) -> DecoderState:
    return DecoderState(params.k, params.field)


def decoder_absorb(state: DecoderState, v) -> bool:
    return state.absorb(v)


def decoder_rank(state: DecoderState) -> int:
    return state.rank


def decoder_complete(state: DecoderState) -> bool:
    return state.complete()


def matrix_rank(rows, params: CodeParams) -> int:
    """Rank of a matrix over GF(q), one row absorbed at a time."""
    state = decoder_new(params)
    for row in rows:
        state.absorb(row)
    return state.rank
