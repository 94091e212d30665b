"""Constructors for coherent, squeezed and photon-added photon states.

Conventions:

* displacement D(beta) = exp(beta b^dag - beta* b), coherent state D|0>,
* squeeze S(zeta) = exp(-zeta*/2 b^2 + zeta/2 b^dag^2), zeta = r e^{i phi},
* squeezed coherent state built as S(zeta) D(beta) |0> (squeeze last);
  the D S ordering is a physically different state and only available
  behind an explicit flag,
* photon addition b^dag^N applied afterwards, by default left unnormalized
  so quoted probabilities are raw squared matrix elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import TruncationError
from .fock import (
    LinearOperator,
    ModeLayout,
    StateVector,
    embed_single_mode,
    truncation_leakage,
    vacuum,
)

DEFAULT_GUARD_MARGIN = 2
DEFAULT_LEAKAGE_THRESHOLD = 1e-10


def _wrap_phase(phi: float) -> float:
    out = math.remainder(phi, 2.0 * math.pi)
    if out <= -math.pi:
        out += 2.0 * math.pi
    return out


@dataclass(frozen=True)
class CoherentAmplitude:
    """Complex displacement amplitude beta = |beta| e^{i delta}."""

    beta: complex

    @classmethod
    def from_polar(cls, abs_value: float, phase: float = 0.0) -> "CoherentAmplitude":
        if abs_value < 0:
            raise ValueError("|beta| must be >= 0")
        return cls(abs_value * np.exp(1j * phase))

    @property
    def abs(self) -> float:
        return abs(self.beta)

    @property
    def phase(self) -> float:
        return _wrap_phase(float(np.angle(self.beta)))


@dataclass(frozen=True)
class SqueezeParam:
    """Squeeze magnitude r >= 0 and phase varphi in (-pi, pi]."""

    r: float
    varphi: float = 0.0

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("squeeze magnitude r must be >= 0")
        object.__setattr__(self, "varphi", _wrap_phase(self.varphi))

    @property
    def zeta(self) -> complex:
        return self.r * np.exp(1j * self.varphi)


@dataclass(frozen=True)
class PhotonAddition:
    """Number of photons to add and whether to renormalize afterwards."""

    n: int = 0
    normalize: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("photon addition count must be >= 0")


def recommended_photon_n_max(beta_abs: float, r: float, n_added: int = 0) -> int:
    """Truncation sizing rule for squeezed coherent states with additions.

    Squeezing stretches the occupation tail well beyond Poisson, so the
    budget scales the mean by e^{2r} and the spread by e^{r}.  The pure
    squeezed-vacuum tail decays only like tanh(r)^{2n}, so the flat +10
    spread floor is replaced by the analytic adequacy level when that is
    larger.
    """
    floor = max(10, adequate_squeeze_n_max(r) if r > 0 else 0)
    return (
        math.ceil(beta_abs**2 * math.exp(2.0 * r))
        + n_added
        + 10 * math.ceil(beta_abs * math.exp(r))
        + floor
    )


def adequate_squeeze_n_max(r: float, threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
                           margin: int = DEFAULT_GUARD_MARGIN) -> int:
    """Smallest n_max keeping the squeezed-vacuum guard band below
    `threshold` weight.  A 4x safety factor absorbs the slight weight
    redistribution the hard cutoff itself introduces."""
    if r <= 0.0:
        return 1
    n = margin + 2
    while _squeezed_vacuum_tail(r, n - margin) > 0.25 * threshold:
        n += 2
        if n > 100_000:
            raise ValueError(f"no adequate truncation found for r={r}")
    return n


# ---------------------------------------------------------------------------
# analytic tail estimates backing the pre-construction truncation checks


def _poisson_tail(mean: float, level: int) -> float:
    """P(n > level) for Poisson(mean)."""
    if mean <= 0.0:
        return 0.0
    from scipy.stats import poisson

    return float(poisson.sf(level, mean))


def _squeezed_vacuum_tail(r: float, level: int) -> float:
    """Occupation weight of S(r)|0> above `level` (only even levels hold
    weight: p_{2n} = tanh^{2n} r (2n)! / (4^n n!^2 cosh r))."""
    if r <= 0.0:
        return 0.0
    log_tanh = math.log(math.tanh(r))
    log_cosh = math.log(math.cosh(r))
    total = 0.0
    p = 0.0
    n = level // 2 + 1
    for k in range(n, n + 2000):
        log_p = (2 * k) * log_tanh + math.lgamma(2 * k + 1) \
            - k * math.log(4.0) - 2 * math.lgamma(k + 1) - log_cosh
        p = math.exp(log_p)
        total += p
        if p < 1e-30:
            break
    # close the remainder with a geometric bound at ratio tanh^2 r
    ratio = math.tanh(r) ** 2
    total += p * ratio / (1.0 - ratio)
    return total


def _mode_exponential(layout: ModeLayout, mode: str,
                      exponent_block: np.ndarray) -> LinearOperator:
    """exp(X) on one mode for anti-Hermitian X, as a unitary embedded in the
    full layout.  X = -i (iX) with iX Hermitian, so the Hermitian-exponential
    machinery applies."""
    herm = 1j * exponent_block
    w, v = np.linalg.eigh(herm)
    block = (v * np.exp(-1j * w)) @ v.conj().T
    block[np.abs(block) < 1e-300] = 0.0
    return embed_single_mode(layout, mode, sparse.csr_matrix(block))


def displacement_op(layout: ModeLayout, mode: str, beta: CoherentAmplitude, *,
                    guard_margin: int = DEFAULT_GUARD_MARGIN,
                    leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
                    check: bool = True) -> LinearOperator:
    """Unitary displacement exp(beta b^dag - beta* b) on `mode`."""
    ax = layout.axis(mode)
    n_max = layout.n_max[ax]
    if check and beta.abs > 0:
        predicted = _poisson_tail(beta.abs**2, n_max - guard_margin)
        if predicted > leakage_threshold:
            raise TruncationError(
                f"displacement |beta|={beta.abs:.3g} predicts leakage "
                f"{predicted:.3e} > {leakage_threshold:.1e} at n_max={n_max}; "
                f"need n_max >= {recommended_photon_n_max(beta.abs, 0.0)}"
            )
    levels = n_max + 1
    lower = np.diag(np.sqrt(np.arange(1, levels)), k=1)
    exponent = beta.beta * lower.conj().T - np.conj(beta.beta) * lower
    return _mode_exponential(layout, mode, exponent)


def squeeze_op(layout: ModeLayout, mode: str, zeta: SqueezeParam, *,
               guard_margin: int = DEFAULT_GUARD_MARGIN,
               leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
               check: bool = True) -> LinearOperator:
    """Unitary squeeze exp(-zeta*/2 b^2 + zeta/2 b^dag^2) on `mode`."""
    ax = layout.axis(mode)
    n_max = layout.n_max[ax]
    if check and zeta.r > 0:
        predicted = _squeezed_vacuum_tail(zeta.r, n_max - guard_margin)
        if predicted > leakage_threshold:
            raise TruncationError(
                f"squeeze r={zeta.r:.3g} predicts leakage {predicted:.3e} > "
                f"{leakage_threshold:.1e} at n_max={n_max}; need n_max >= "
                f"{adequate_squeeze_n_max(zeta.r, leakage_threshold, guard_margin)}"
            )
    levels = n_max + 1
    lower = np.diag(np.sqrt(np.arange(1, levels)), k=1)
    b2 = lower @ lower
    z = zeta.zeta
    exponent = 0.5 * z * b2.conj().T - 0.5 * np.conj(z) * b2
    return _mode_exponential(layout, mode, exponent)


def coherent_state(layout: ModeLayout, mode: str, beta: CoherentAmplitude,
                   **kwargs) -> StateVector:
    return displacement_op(layout, mode, beta, **kwargs).apply(vacuum(layout))


def squeezed_coherent(layout: ModeLayout, mode: str, zeta: SqueezeParam,
                      beta: CoherentAmplitude, *,
                      squeeze_after_displace: bool = True,
                      guard_margin: int = DEFAULT_GUARD_MARGIN,
                      leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
                      check: bool = True) -> StateVector:
    """S(zeta) D(beta) |vacuum> on `mode`, all other modes in vacuum.

    ``squeeze_after_displace=False`` selects the inequivalent D(beta)S(zeta)
    ordering for experimentation.
    """
    disp = displacement_op(layout, mode, beta, guard_margin=guard_margin,
                           leakage_threshold=leakage_threshold, check=check)
    sq = squeeze_op(layout, mode, zeta, guard_margin=guard_margin,
                    leakage_threshold=leakage_threshold, check=check)
    first, second = (disp, sq) if squeeze_after_displace else (sq, disp)
    state = second.apply(first.apply(vacuum(layout)))
    if check:
        leak = truncation_leakage(state, guard_margin)
        if leak > leakage_threshold:
            ax = layout.axis(mode)
            raise TruncationError(
                f"squeezed coherent state leaks {leak:.3e} > "
                f"{leakage_threshold:.1e} into the guard band at "
                f"n_max={layout.n_max[ax]}; suggested n_max >= "
                f"{recommended_photon_n_max(beta.abs, zeta.r)}"
            )
    return state


def add_photons(state: StateVector, mode: str, add: PhotonAddition, *,
                guard_margin: int = DEFAULT_GUARD_MARGIN,
                leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
                check: bool = True) -> tuple[StateVector, float]:
    """Apply b^dag^N on `mode`.

    Returns ``(result, norm_factor)`` with ``norm_factor = <s|b^N b^dag^N|s>``.
    The result keeps the raw (unnormalized) amplitudes unless the addition's
    normalize flag is set.
    """
    if add.n == 0:
        return state, 1.0
    layout = state.layout
    n_max = layout.n_max[layout.axis(mode)]
    if check:
        margin = min(add.n + guard_margin, min(layout.n_max))
        occupied = truncation_leakage(state, margin)
        if occupied > leakage_threshold:
            raise TruncationError(
                f"adding {add.n} photons would push {occupied:.3e} of weight "
                f"past n_max={n_max}; enlarge the photon truncation"
            )
    # raise directly on the amplitude grid: cheaper and exact
    amps = np.asarray(state.amplitudes, dtype=np.complex128).copy()
    occ = layout.occupation_grid(mode)
    stride = layout.strides[layout.axis(mode)]
    for _ in range(add.n):
        out = np.zeros_like(amps)
        keep = occ < n_max
        src = np.nonzero(keep)[0]
        out[src + stride] = np.sqrt(occ[src] + 1.0) * amps[src]
        amps = out
    result = StateVector(layout, amps)
    norm_factor = float(result.norm() ** 2)
    if add.normalize:
        result = result.normalized()
    return result, norm_factor


def coherent_overlap(alpha: complex, beta: complex) -> float:
    """|<alpha|beta>|^2 = exp(-|alpha - beta|^2) for coherent states."""
    return float(np.exp(-abs(alpha - beta) ** 2))
