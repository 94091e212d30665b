"""Truncated Fock-space simulator for photon-axion conversion.

Core layers:

* :mod:`axion_sim.fock` - truncated multi-mode bosonic state space
* :mod:`axion_sim.evolve` - Hermitian exponential evolution (dense/Krylov)
* :mod:`axion_sim.states` - coherent / squeezed / photon-added constructors
* :mod:`axion_sim.mixing` - units, classical formulas, mixing generator
* :mod:`axion_sim.scenarios` - end-to-end conversion probabilities
* :mod:`axion_sim.series` - perturbation-coefficient verification engine
* :mod:`axion_sim.service` - FastAPI service wrapping the above
* :mod:`axion_sim.cli` - thin command-line client
"""

__version__ = "0.1.0"

from .fock import (  # noqa: F401
    AXION_M,
    AXION_P,
    PHOTON_M,
    PHOTON_P,
    LinearOperator,
    ModeLayout,
    StateVector,
    annihilation_op,
    apply,
    basis_state,
    creation_op,
    inner_product,
    number_op,
    truncation_leakage,
    vacuum,
)
from .evolve import HermitianEvolution, evolve_exact, matrix_power_apply  # noqa: F401
from .states import (  # noqa: F401
    CoherentAmplitude,
    PhotonAddition,
    SqueezeParam,
    add_photons,
    coherent_overlap,
    coherent_state,
    displacement_op,
    squeeze_op,
    squeezed_coherent,
)
from .mixing import (  # noqa: F401
    FactorizedCoupling,
    LabInputs,
    MixingParams,
    classical_probability,
    mixing_factors,
    mixing_generator,
    mixing_generator_raw,
    one_shot_unitary,
    small_mixing_probability,
    time_ordered_unitary,
    to_natural_units,
    window_functions,
)
