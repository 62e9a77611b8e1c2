"""Error-and-erasure decoding for the rectangular Cauchy-Vandermonde code.

A rows x width decoding matrix with rows - width = 2B generates an
MDS(rows, width) code: any width rows form an invertible square system, so the
minimum distance is 2B + 1 and up to B corrupted observations are correctable.

Decoding is subset consensus: solve each width-row square system, re-encode
over all rows, and accept the first candidate (in lexicographic subset order,
so results are reproducible) agreeing with the observations in at least
rows - B positions.  Uniqueness of an accepted candidate follows from the
minimum distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .linalg import DecodingMatrix, FieldMatrix


class DecodingFailure(Exception):
    """No candidate met the agreement threshold: more than B corruptions."""


@dataclass(frozen=True)
class RobustInstance:
    """A decoding matrix together with the observed per-row values."""

    matrix: DecodingMatrix
    observed: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "observed", tuple(v % self.matrix.field.q for v in self.observed))
        if len(self.observed) != self.matrix.rows:
            raise ValueError("one observation per matrix row required")


class RobustDecoder:
    """Reusable decoder for one DecodingMatrix; caches square-subset inverses."""

    def __init__(self, matrix: DecodingMatrix):
        self.matrix = matrix
        self._full = matrix.matrix()
        self._subset_inv: dict[tuple[int, ...], FieldMatrix] = {}

    def _inverse_for(self, subset: tuple[int, ...]) -> FieldMatrix:
        inv = self._subset_inv.get(subset)
        if inv is None:
            inv = self._full.row_submatrix(subset).inverse()
            self._subset_inv[subset] = inv
        return inv

    def candidates(self, observed):
        """Yield (subset, solution, agreement count) for every width-subset."""
        m = self.matrix
        data = self._full.data
        q = m.field.q
        for subset in combinations(range(m.rows), m.width):
            x = self._inverse_for(subset).matvec([observed[i] for i in subset])
            agree = sum(
                1
                for i, row in enumerate(data)
                if sum(a * b for a, b in zip(row, x)) % q == observed[i]
            )
            yield subset, x, agree

    def solve(self, observed, num_errors: int) -> list[int]:
        """Recover the width coefficients from observations with <= num_errors corruptions."""
        m = self.matrix
        if len(observed) != m.rows:
            raise ValueError("one observation per matrix row required")
        if num_errors < 0:
            raise ValueError("error bound must be non-negative")
        if m.rows - m.width < 2 * num_errors:
            raise ValueError(
                f"{m.rows} rows at width {m.width} cannot correct {num_errors} errors"
            )
        if num_errors == 0:
            subset = tuple(range(m.width))
            return self._inverse_for(subset).matvec([observed[i] for i in subset])
        threshold = m.rows - num_errors
        for _, x, agree in self.candidates(observed):
            if agree >= threshold:
                return x
        raise DecodingFailure(
            f"no candidate agreed on >= {threshold} of {m.rows} rows; "
            f"more than {num_errors} corrupted answers"
        )


@lru_cache(maxsize=4096)
def decoder_for(matrix: DecodingMatrix) -> RobustDecoder:
    """Memoized decoder lookup; DecodingMatrix is immutable and hashable."""
    return RobustDecoder(matrix)


def robust_solve(inst: RobustInstance, num_errors: int) -> list[int]:
    """Functional form of RobustDecoder.solve."""
    return decoder_for(inst.matrix).solve(list(inst.observed), num_errors)


def erase_and_solve(matrix: DecodingMatrix, observed) -> list[int]:
    """Exact solve from the first width responsive rows (B = 0 path).

    Erasures are handled upstream by simply not including silent servers among
    the matrix rows; any width of the remaining rows form a valid system.
    """
    observed = list(observed)
    if len(observed) != matrix.rows:
        raise ValueError("one observation per matrix row required")
    if matrix.rows < matrix.width:
        raise ValueError(
            f"need at least {matrix.width} responsive rows, have {matrix.rows}"
        )
    return decoder_for(matrix).solve(observed, 0)
