"""The model symplectic space (V, omega) in its standard symplectic basis.

Indices are 0-based in the Python API: basis vector ``e_k`` for ``k < l``
spans the Lagrangian L and ``e_{k+l}`` spans L'.  Reports translate to
1-based labels.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Dict, Tuple

from .scalars import ONE, ZERO, Scalar

__all__ = ["SymplecticSpace", "space", "Tensor"]

# sparse coordinate tensor: index tuple -> Scalar
Tensor = Dict[Tuple[int, ...], Scalar]


class SymplecticSpace:
    """(V, omega) of dimension 2l with omega(e_k, e_{k+l}) = 1."""

    def __init__(self, l: int):
        if l < 1:
            raise ValueError("l must be positive")
        self.l = l
        self.dim = 2 * l
        n = self.dim
        self.omega_matrix = tuple(tuple(self._omega(i, j) for j in range(n)) for i in range(n))
        # sum_k omega_{ik} omega^{jk} = delta_i^j; for the standard basis omega^{ij} = omega_{ij}
        self.omega_inv_matrix = self.omega_matrix
        self.partner = tuple((k + l) % n for k in range(n))

    def _omega(self, i: int, j: int) -> Scalar:
        l = self.l
        if i < l and j == i + l:
            return ONE
        if i >= l and j == i - l:
            return -ONE
        return ZERO

    def _check(self, *idx):
        for k in idx:
            if not 0 <= k < self.dim:
                raise IndexError(f"index {k} outside 0..{self.dim - 1}")

    def omega(self, i: int, j: int) -> Scalar:
        self._check(i, j)
        return self.omega_matrix[i][j]

    def omega_inv(self, i: int, j: int) -> Scalar:
        self._check(i, j)
        return self.omega_inv_matrix[i][j]

    # -- index gymnastics ------------------------------------------------
    def raise_index(self, T: Tensor, slot: int) -> Tensor:
        """Replace covariant slot ``c`` by ``omega^{ic} T_{..c..}``."""
        return self._contract(T, slot, self.omega_inv_matrix, first=True)

    def lower_index(self, T: Tensor, slot: int) -> Tensor:
        """Replace contravariant slot ``t`` by ``T^{..t..} omega_{ti}``."""
        return self._contract(T, slot, self.omega_matrix, first=False)

    def _contract(self, T: Tensor, slot: int, mat, first: bool) -> Tensor:
        out: Tensor = {}
        n = self.dim
        for idx, x in T.items():
            if not 0 <= slot < len(idx):
                raise IndexError(f"slot {slot} out of range for rank {len(idx)}")
            c = idx[slot]
            for i in range(n):
                w = mat[i][c] if first else mat[c][i]
                if not w:
                    continue
                new = idx[:slot] + (i,) + idx[slot + 1:]
                y = out.get(new)
                y = w * x if y is None else y + w * x
                if y:
                    out[new] = y
                else:
                    del out[new]
        return out

    def is_sp(self, A) -> bool:
        """``omega(Av, w) + omega(v, Aw) = 0`` on all basis pairs."""
        n, w = self.dim, self.omega_matrix
        for j, k in product(range(n), repeat=2):
            s = ZERO
            for m in range(n):
                if A[m][j]:
                    s = s + A[m][j] * w[m][k]
                if A[m][k]:
                    s = s + A[m][k] * w[j][m]
            if s:
                return False
        return True

    def __repr__(self):
        return f"SymplecticSpace(l={self.l})"


@lru_cache(maxsize=None)
def space(l: int) -> SymplecticSpace:
    """Shared immutable instance for ``l``."""
    return SymplecticSpace(l)
