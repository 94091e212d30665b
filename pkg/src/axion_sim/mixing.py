"""Physical parameters, unit conversion, classical conversion formulas, and
construction of the photon-axion mixing generator.

All internal quantities are in natural units (hbar = c = 1): energies and
masses in eV, lengths and times in 1/eV, magnetic fields in eV^2.  The
propagation length L doubles as the evolution time t for relativistic
propagation.  Modes are box-normalized single-k modes with Kronecker
commutators; the per-mode coupling is lam = g B / 2, and every reported
observable depends only on lam times a window function, so no volume
factor appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutMismatchError
from .evolve import HermitianEvolution
from .fock import (
    AXION_M,
    AXION_P,
    PHOTON_M,
    PHOTON_P,
    LinearOperator,
    ModeLayout,
    annihilation_op,
    creation_op,
)

# hbar = c = 1 conversion constants (CODATA-derived, 5 significant figures)
TESLA_TO_EV2 = 195.35          # 1 T in eV^2
METER_TO_INV_EV = 5.0677e6     # 1 m in 1/eV
GEV_INV_TO_EV_INV = 1e-9       # 1 / GeV in 1 / eV

UNIT_PROVENANCE = {
    "tesla_to_eV2": TESLA_TO_EV2,
    "meter_to_inv_eV": METER_TO_INV_EV,
    "GeV_inv_to_eV_inv": GEV_INV_TO_EV_INV,
    "note": "hbar = c = 1; CODATA-derived conversions at 5 significant figures",
}

_SINC_SERIES_CUTOFF = 5e-7  # |x| below which sin(x)/x uses its Taylor series


@dataclass(frozen=True)
class LabInputs:
    """Laboratory-unit inputs: eV, GeV^-1, tesla, meters."""

    m_eV: float
    E_gamma_eV: float
    g_GeV_inv: float
    B_T_tesla: float
    L_m: float

    def __post_init__(self) -> None:
        if self.m_eV < 0:
            raise ValueError("axion mass must be >= 0")
        for name in ("E_gamma_eV", "g_GeV_inv", "B_T_tesla", "L_m"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


def mixing_factors(omega_phi: float, omega_psi: float) -> tuple[float, float]:
    """Frequency-ratio factors (U, V) weighting the beam-splitter and
    pair-creation parts of the generator; U^2 - V^2 = 1 identically."""
    if omega_phi <= 0 or omega_psi <= 0:
        raise ValueError("frequencies must be > 0")
    ratio = math.sqrt(omega_phi / omega_psi)
    return 0.5 * (ratio + 1.0 / ratio), 0.5 * (ratio - 1.0 / ratio)


def _sinc(x: float) -> float:
    if abs(x) < _SINC_SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def window_functions(omega_phi: float, omega_psi: float, t: float) -> tuple[complex, complex]:
    """Resonant and counter-rotating time windows (f, g).

    f = sin(D- t/2)/(D-/2) e^{-i D- t/2} with D- = omega_phi - omega_psi,
    g the same at D+ = omega_phi + omega_psi.  The degenerate D- -> 0 limit
    returns f = t exactly through the series branch.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    d_minus = omega_phi - omega_psi
    d_plus = omega_phi + omega_psi
    xm = 0.5 * d_minus * t
    xp = 0.5 * d_plus * t
    f = t * _sinc(xm) * np.exp(-1j * xm)
    g = t * _sinc(xp) * np.exp(-1j * xp)
    return complex(f), complex(g)


@dataclass(frozen=True)
class MixingParams:
    """Natural-unit physical inputs plus derived mixing quantities."""

    m: float          # axion mass, eV
    k: float          # photon momentum = energy, eV
    g: float          # coupling, 1/eV
    B: float          # transverse field magnitude, eV^2
    t: float          # evolution time = propagation length, 1/eV
    omega_phi: float = field(init=False)
    omega_psi: float = field(init=False)
    U: float = field(init=False)
    V: float = field(init=False)
    delta_m: float = field(init=False)
    delta_osc: float = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("axion mass must be >= 0")
        if self.k <= 0:
            raise ValueError("photon energy must be > 0")
        if self.g < 0 or self.B < 0 or self.t < 0:
            raise ValueError("g, B, t must be >= 0")
        omega_phi = math.sqrt(self.k**2 + self.m**2)
        omega_psi = self.k
        u, v = mixing_factors(omega_phi, omega_psi)
        delta_m = 0.5 * self.g * self.B
        delta_osc = math.sqrt((self.m**2 / (2.0 * self.k)) ** 2 + 4.0 * delta_m**2)
        object.__setattr__(self, "omega_phi", omega_phi)
        object.__setattr__(self, "omega_psi", omega_psi)
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "V", v)
        object.__setattr__(self, "delta_m", delta_m)
        object.__setattr__(self, "delta_osc", delta_osc)
        object.__setattr__(self, "lam", delta_m)

    @classmethod
    def from_lab(cls, lab: LabInputs) -> "MixingParams":
        return cls(
            m=lab.m_eV,
            k=lab.E_gamma_eV,
            g=lab.g_GeV_inv * GEV_INV_TO_EV_INV,
            B=lab.B_T_tesla * TESLA_TO_EV2,
            t=lab.L_m * METER_TO_INV_EV,
        )

    def windows(self) -> tuple[complex, complex]:
        return window_functions(self.omega_phi, self.omega_psi, self.t)

    def lam_u_f_abs(self) -> float:
        """|lam * U * f|, the effective beam-splitter rotation angle."""
        f, _ = self.windows()
        return self.lam * self.U * abs(f)


def to_natural_units(lab: LabInputs) -> MixingParams:
    """Convert laboratory inputs to natural units and derive mixing data."""
    return MixingParams.from_lab(lab)


def classical_probability(params: MixingParams) -> float:
    """Classical two-level conversion probability
    P = (Delta_M L)^2 sinc^2(Delta_osc L / 2)."""
    x = 0.5 * params.delta_osc * params.t
    return (params.delta_m * params.t) ** 2 * _sinc(x) ** 2


def small_mixing_probability(params: MixingParams) -> float:
    """Small-mixing reduction P = (gBL/2)^2 sinc^2(m^2 L / 4 E)."""
    x = params.m**2 * params.t / (4.0 * params.k)
    return (params.delta_m * params.t) ** 2 * _sinc(x) ** 2


@dataclass(frozen=True)
class FactorizedCoupling:
    """Raw (U, V, f, g, lam) pack bypassing the physics derivation.

    Deliberately allows unphysical combinations; this is what the series
    verification engine probes with to isolate monomial coefficients.
    """

    U: float
    V: float
    f: complex
    g: complex
    lam: float

    @classmethod
    def from_params(cls, params: MixingParams) -> "FactorizedCoupling":
        f, g = params.windows()
        return cls(U=params.U, V=params.V, f=f, g=g, lam=params.lam)


def mixing_generator_raw(layout: ModeLayout, fac: FactorizedCoupling, *,
                         drop_pair_terms: bool = False) -> LinearOperator:
    """Hermitian mixing generator from raw coupling values.

    Q = -i lam sum_{s=+-} [ U f b_s^dag a_s - U f* a_s^dag b_s
                            + V g b_s a_{-s} - V g* a_s^dag b_{-s}^dag ]

    On the reduced (axion+, photon+) layout only the s=+ beam-splitter
    terms exist; the pair terms must then either vanish (V = 0) or be
    dropped explicitly.
    """
    if layout.is_reduced:
        if fac.V != 0.0 and not drop_pair_terms:
            raise LayoutMismatchError(
                "reduced two-mode layout cannot carry pair-creation terms; "
                "set V = 0 or pass drop_pair_terms=True"
            )
        sectors = ((AXION_P, PHOTON_P),)
        pairs = ()
    elif set(layout.modes) == {AXION_P, AXION_M, PHOTON_P, PHOTON_M}:
        sectors = ((AXION_P, PHOTON_P), (AXION_M, PHOTON_M))
        pairs = () if drop_pair_terms else (
            (PHOTON_P, AXION_M, AXION_P, PHOTON_M),
            (PHOTON_M, AXION_P, AXION_M, PHOTON_P),
        )
    else:
        raise LayoutMismatchError(
            f"mixing generator needs the four-mode or reduced layout, got {layout.modes}"
        )

    total = None
    for axion, photon in sectors:
        a = annihilation_op(layout, axion)
        b = annihilation_op(layout, photon)
        a_dag = creation_op(layout, axion)
        b_dag = creation_op(layout, photon)
        term = (fac.U * fac.f) * (b_dag @ a) - (fac.U * np.conj(fac.f)) * (a_dag @ b)
        total = term if total is None else total + term
    for photon_s, axion_ms, axion_s, photon_ms in pairs:
        b_s = annihilation_op(layout, photon_s)
        a_ms = annihilation_op(layout, axion_ms)
        a_dag_s = creation_op(layout, axion_s)
        b_dag_ms = creation_op(layout, photon_ms)
        term = (fac.V * fac.g) * (b_s @ a_ms) - (fac.V * np.conj(fac.g)) * (a_dag_s @ b_dag_ms)
        total = term if total is None else total + term
    q = (-1j * fac.lam) * total
    return q.as_hermitian()


def mixing_generator(layout: ModeLayout, params: MixingParams, *,
                     drop_pair_terms: bool = False) -> LinearOperator:
    """Hermitian mixing generator from physical parameters."""
    return mixing_generator_raw(layout, FactorizedCoupling.from_params(params),
                                drop_pair_terms=drop_pair_terms)


def one_shot_unitary(q: LinearOperator, **kwargs) -> HermitianEvolution:
    """Evolution handle applying exp(-iQ) in a single exponential."""
    return HermitianEvolution(q, **kwargs)


class TimeOrderedEvolution:
    """Left-ordered product of stepwise exponentials of the instantaneous
    interaction generator; quantifies the error of the single-exponential
    shortcut when the generator does not commute with itself across times.
    """

    def __init__(self, params: MixingParams, layout: ModeLayout, steps: int, *,
                 drop_pair_terms: bool = False, **kwargs):
        if steps < 1:
            raise ValueError("steps must be >= 1")
        self.steps = steps
        dt = params.t / steps
        d_minus = params.omega_phi - params.omega_psi
        d_plus = params.omega_phi + params.omega_psi
        self._stages = []
        for j in range(steps):
            tj = (j + 0.5) * dt  # midpoint rule within each slice
            fac = FactorizedCoupling(
                U=params.U,
                V=params.V,
                f=dt * np.exp(-1j * d_minus * tj),
                g=dt * np.exp(-1j * d_plus * tj),
                lam=params.lam,
            )
            q_j = mixing_generator_raw(layout, fac, drop_pair_terms=drop_pair_terms)
            self._stages.append(HermitianEvolution(q_j, **kwargs))

    def apply(self, state):
        out = state
        for stage in self._stages:  # t increasing; latest factor acts last
            out = stage.apply(out)
        return out

    __call__ = apply


def time_ordered_unitary(params: MixingParams, layout: ModeLayout, steps: int,
                         **kwargs) -> TimeOrderedEvolution:
    return TimeOrderedEvolution(params, layout, steps, **kwargs)
