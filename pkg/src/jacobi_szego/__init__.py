"""Jacobi operators with slowly decaying perturbations and their spectral
measures: Geronimus relations, the Szego mapping, OPUC tools, M-functions and
resonance surgery."""

from .errors import *  # noqa: F401,F403
from .geronimus import (
    JacobiParams,
    SolverOptions,
    VerblunskySeq,
    expanded_tails,
    forward,
    solve,
    strip_and_solve,
    verblunsky_norm,
)
from .harmonic import FourierSeries, algebra_norm, analytic_calculus, analyze, hilbert, synthesize
from .jacobi import (
    M_function,
    ResonanceData,
    SurgeryResult,
    jacobi_from_measure,
    m_contfrac,
    make_doubly_resonant,
    resonance_data,
    spectral_measure,
    strip,
    stripping_relation,
    verify_surgery_spectrum,
)
from .measures import CircleMeasure, IntervalMeasure, caratheodory, check_class_V, szego_forward, szego_inverse
from .opuc import bernstein_szego, szego_recursion, verblunsky_from_measure, verify_gi_baxter
from .seqspace import INTERSECTION, L11, L21, DecaySeq, SpaceSpec, norm, tail_product, tail_sums

__version__ = "0.1.0"
