"""Truncated multi-mode bosonic Fock space: basis indexing, ladder operators
and the small operator algebra everything else is built from.

Basis ordering is mixed-radix with the *last* listed mode varying fastest,
so the all-zero occupation is index 0 and ``index = sum(occ[i] * stride[i])``
with ``stride[-1] == 1``.  Truncation is hard: the creation operator
annihilates the top level instead of wrapping around, and adequacy is
certified separately through :func:`truncation_leakage`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    HermiticityError,
    LayoutMismatchError,
    OccupationError,
)

AXION_P = "axion+"
AXION_M = "axion-"
PHOTON_P = "photon+"
PHOTON_M = "photon-"

FOUR_MODES = (AXION_P, AXION_M, PHOTON_P, PHOTON_M)
REDUCED_MODES = (AXION_P, PHOTON_P)

HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class ModeLayout:
    """Ordered set of bosonic modes with per-mode occupation cutoffs."""

    modes: tuple[str, ...]
    n_max: tuple[int, ...]

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        n_max = tuple(int(n) for n in self.n_max)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "n_max", n_max)
        if len(modes) == 0:
            raise ValueError("layout needs at least one mode")
        if len(set(modes)) != len(modes):
            raise ValueError(f"mode labels must be unique, got {modes}")
        if len(n_max) != len(modes):
            raise ValueError("one n_max per mode required")
        if any(n < 1 for n in n_max):
            raise ValueError("every n_max must be >= 1")

    @classmethod
    def four_mode(cls, n_max: int | Sequence[int] = 7) -> "ModeLayout":
        """Layout holding both +k and -k axion/photon mode pairs."""
        if isinstance(n_max, int):
            n_max = (n_max,) * 4
        return cls(FOUR_MODES, tuple(n_max))

    @classmethod
    def reduced(cls, axion_n_max: int = 4, photon_n_max: int = 30) -> "ModeLayout":
        """Two-mode (axion+, photon+) layout with asymmetric truncation."""
        return cls(REDUCED_MODES, (axion_n_max, photon_n_max))

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.n_max)

    @property
    def dim(self) -> int:
        return math.prod(self.levels)

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for lv in reversed(self.levels):
            out.append(acc)
            acc *= lv
        return tuple(reversed(out))

    @property
    def is_reduced(self) -> bool:
        return self.modes == REDUCED_MODES

    def axis(self, mode: str) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise KeyError(f"unknown mode {mode!r}; layout has {self.modes}") from None

    def index(self, occupations: Sequence[int]) -> int:
        """Mixed-radix basis index of an occupation tuple."""
        if len(occupations) != len(self.modes):
            raise OccupationError(
                f"expected {len(self.modes)} occupations, got {len(occupations)}"
            )
        idx = 0
        for occ, n, stride, mode in zip(occupations, self.n_max, self.strides, self.modes):
            if not 0 <= occ <= n:
                raise OccupationError(
                    f"occupation {occ} outside [0, {n}] for mode {mode!r}"
                )
            idx += occ * stride
        return idx

    def occupations(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise OccupationError(f"basis index {index} outside [0, {self.dim})")
        occ = []
        for stride, lv in zip(self.strides, self.levels):
            occ.append((index // stride) % lv)
        return tuple(occ)

    def occupation_grid(self, mode: str) -> np.ndarray:
        """Occupation of `mode` for every basis index, as an int array."""
        ax = self.axis(mode)
        idx = np.arange(self.dim)
        return (idx // self.strides[ax]) % self.levels[ax]


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the truncated product Fock basis."""

    layout: ModeLayout
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.layout.dim,):
            raise LayoutMismatchError(
                f"amplitude length {amps.shape} != layout dimension {self.layout.dim}"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.layout, self.amplitudes / n)

    def is_normalized(self, atol: float = 1e-12) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= atol

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_layout(self, other)
        return StateVector(self.layout, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_layout(self, other)
        return StateVector(self.layout, self.amplitudes - other.amplitudes)

    def __mul__(self, c: complex) -> "StateVector":
        return StateVector(self.layout, self.amplitudes * c)

    __rmul__ = __mul__


def vacuum(layout: ModeLayout) -> StateVector:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(layout, amps)


def basis_state(layout: ModeLayout, occupations: Sequence[int]) -> StateVector:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.index(occupations)] = 1.0
    return StateVector(layout, amps)


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    _check_same_layout(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


@dataclass(frozen=True)
class LinearOperator:
    """Sparse complex operator on a layout's basis, with a Hermitian flag.

    Setting ``hermitian=True`` is verified numerically at construction
    (max |M - M^dagger| entry <= 1e-12), so downstream evolution code can
    trust the flag.
    """

    layout: ModeLayout
    matrix: sparse.csr_matrix
    hermitian: bool = False

    def __post_init__(self) -> None:
        mat = sparse.csr_matrix(self.matrix, dtype=np.complex128)
        if mat.shape != (self.layout.dim, self.layout.dim):
            raise LayoutMismatchError(
                f"matrix shape {mat.shape} != layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "matrix", mat)
        if self.hermitian:
            resid = hermiticity_residual(mat)
            if resid > HERMITIAN_ATOL:
                raise HermiticityError(
                    f"hermitian flag set but max |M - M^H| = {resid:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.layout.dim

    def apply(self, state: StateVector) -> StateVector:
        _check_same_layout(self, state)
        return StateVector(self.layout, self.matrix.dot(state.amplitudes))

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.layout, self.matrix.conjugate().transpose().tocsr(),
                              hermitian=self.hermitian)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_layout(self, other)
        return LinearOperator(self.layout, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_layout(self, other)
        return LinearOperator(self.layout, (self.matrix - other.matrix).tocsr())

    def __mul__(self, c: complex) -> "LinearOperator":
        return LinearOperator(self.layout, (self.matrix * c).tocsr())

    __rmul__ = __mul__

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_layout(self, other)
        return LinearOperator(self.layout, (self.matrix @ other.matrix).tocsr())

    def as_hermitian(self, atol: float = HERMITIAN_ATOL) -> "LinearOperator":
        """Return self with the Hermitian flag set, verifying it first."""
        resid = hermiticity_residual(self.matrix)
        if resid > atol:
            raise HermiticityError(f"max |M - M^H| = {resid:.3e} exceeds {atol:.1e}")
        return LinearOperator(self.layout, self.matrix, hermitian=True)


def hermiticity_residual(mat: sparse.spmatrix) -> float:
    diff = (mat - mat.conjugate().transpose()).tocoo()
    if diff.nnz == 0:
        return 0.0
    return float(np.max(np.abs(diff.data)))


def _check_same_layout(a, b) -> None:
    if a.layout != b.layout:
        raise LayoutMismatchError(
            f"layout mismatch: {a.layout.modes}/{a.layout.n_max} vs "
            f"{b.layout.modes}/{b.layout.n_max}"
        )


# ---------------------------------------------------------------------------
# operator constructors


def _single_mode_lowering(levels: int) -> sparse.csr_matrix:
    # <n-1| b |n> = sqrt(n); top row truncates, nothing wraps.
    data = np.sqrt(np.arange(1, levels, dtype=float))
    return sparse.diags(data, offsets=1, shape=(levels, levels), dtype=np.complex128).tocsr()


def embed_single_mode(layout: ModeLayout, mode: str,
                      block: np.ndarray | sparse.spmatrix,
                      hermitian: bool = False) -> LinearOperator:
    """Lift a single-mode operator to the full layout (identity elsewhere)."""
    ax = layout.axis(mode)
    levels = layout.levels
    left = math.prod(levels[:ax]) if ax > 0 else 1
    right = math.prod(levels[ax + 1:]) if ax + 1 < len(levels) else 1
    mat = sparse.csr_matrix(block, dtype=np.complex128)
    if mat.shape != (levels[ax], levels[ax]):
        raise LayoutMismatchError(
            f"block shape {mat.shape} != mode levels {levels[ax]}"
        )
    full = mat
    if left > 1:
        full = sparse.kron(sparse.identity(left, dtype=np.complex128, format="csr"),
                           full, format="csr")
    if right > 1:
        full = sparse.kron(full, sparse.identity(right, dtype=np.complex128, format="csr"),
                           format="csr")
    return LinearOperator(layout, full.tocsr(), hermitian=hermitian)


def annihilation_op(layout: ModeLayout, mode: str) -> LinearOperator:
    """Lowering operator b on `mode`, identity on all other modes."""
    ax = layout.axis(mode)
    return embed_single_mode(layout, mode, _single_mode_lowering(layout.levels[ax]))


def creation_op(layout: ModeLayout, mode: str) -> LinearOperator:
    """Raising operator b^dagger; annihilates the top truncated level."""
    return annihilation_op(layout, mode).adjoint()


def number_op(layout: ModeLayout, mode: str) -> LinearOperator:
    ax = layout.axis(mode)
    diag = np.arange(layout.levels[ax], dtype=np.complex128)
    return embed_single_mode(layout, mode, sparse.diags(diag), hermitian=True)


def identity_op(layout: ModeLayout) -> LinearOperator:
    return LinearOperator(layout, sparse.identity(layout.dim, dtype=np.complex128,
                                                  format="csr"), hermitian=True)


def zero_op(layout: ModeLayout) -> LinearOperator:
    return LinearOperator(layout, sparse.csr_matrix((layout.dim, layout.dim),
                                                    dtype=np.complex128), hermitian=True)


def apply(op: LinearOperator, state: StateVector) -> StateVector:
    return op.apply(state)


# ---------------------------------------------------------------------------
# truncation diagnostics


def truncation_leakage(state: StateVector, margin: int = 2) -> float:
    """Total probability in basis states with any occupation above
    n_max - margin.  The guard band should stay essentially empty for a
    trustworthy truncated simulation."""
    layout = state.layout
    if margin < 1:
        raise ValueError("margin must be >= 1")
    if margin > min(layout.n_max):
        raise ValueError(
            f"margin {margin} exceeds smallest n_max {min(layout.n_max)}"
        )
    in_guard = np.zeros(layout.dim, dtype=bool)
    for mode, n in zip(layout.modes, layout.n_max):
        in_guard |= layout.occupation_grid(mode) > (n - margin)
    return float(np.sum(np.abs(state.amplitudes[in_guard]) ** 2))


def max_occupied_level(state: StateVector, mode: str, tail_weight: float = 1e-14) -> int:
    """Highest occupation of `mode` holding more than `tail_weight` of the
    probability above it.  Used to size guard-padded layouts for exact
    series extraction."""
    occ = state.layout.occupation_grid(mode)
    probs = state.probabilities()
    per_level = np.zeros(state.layout.levels[state.layout.axis(mode)])
    np.add.at(per_level, occ, probs)
    tail = np.cumsum(per_level[::-1])[::-1]
    above = np.nonzero(tail > tail_weight)[0]
    return int(above[-1]) if above.size else 0
