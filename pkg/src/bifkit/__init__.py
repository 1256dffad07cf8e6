"""bifkit: numerical toolkit for torus bifurcations of planar maps.

Five layers, bottom up:

``bifkit.jets``
    Truncated complex Taylor-jet algebra for planar germs: multiplication,
    composition, inversion, conjugation, JSON round-trips, exact and
    finite-difference jet extraction from real maps, and adaptation to
    complex coordinates at elliptic fixed points.
``bifkit.normalform``
    Quadratic/cubic normal-form reduction at a unit-modulus multiplier and
    three computations of the cubic radial coefficient: a closed formula,
    the defining composition, and a documented half-composed variant kept
    for comparison tables.  The suite measures their (dis)agreements
    rather than assuming them.
``bifkit.henon``
    Complete fixed-point bifurcation analysis of the quadratic family
    ``(x, y) -> (y, m1 - m2 x - y**2)``: fixed points, multipliers,
    bifurcation curves, the exact adapted jet on the torus line, and the
    closed-form coefficient curve along it.
``bifkit.circles``
    Orbit-based detection of attracting and repelling invariant circles
    with honest verdicts (found / fixed point / escaped / inconclusive).
``bifkit.cycle``
    An exactly polynomial two-saddle heteroclinic model whose first-return
    maps provably rescale toward the quadratic family, verified through
    coordinate-invariant diagnostics, plus the closed-form parameter
    dictionary realizing requested (m1, m2) targets.

``bifkit.cli`` ties these together into reproducible command-line runs.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .jets import (
    JetError,
    DegreeMismatchError,
    NonzeroConstantTermError,
    SingularLinearPartError,
    EllipticityError,
    UnitMultiplier,
    PlanarJet,
    RealPlanarJet,
    RealPolynomialMap,
    jet_from_terms,
    identity_jet,
    zero_jet,
    jet_mul,
    conj_jet,
    compose,
    invert,
    conjugate,
    eval_jet,
    jet_to_json,
    jet_from_json,
    extract_real_jet,
    complex_adapt,
)
from .normalform import (
    ResonanceError,
    NormalizationResult,
    LyapunovValue,
    quadratic_change,
    normalize_quadratic,
    normalize_cubic,
    lc_direct,
    lc_oracle,
    lc_partial_incorrect,
    radial_check,
)
from .henon import (
    HenonParams,
    SaddleNodeBoundaryError,
    PoleError,
    FixedPointInfo,
    LociReport,
    ScanRow,
    ScanResult,
    DiagramData,
    apply,
    inverse,
    orbit,
    as_polynomial,
    fixed_points,
    psi_from_m1,
    m1_from_psi,
    elliptic_multiplier,
    bifurcation_loci,
    henon_adapted_jet,
    lc_closed_form,
    lomega_scan,
    diagram_data,
)
from .circles import (
    DetectOptions,
    CircleReport,
    SweepEntry,
    detect,
    detect_repelling,
    ns_sweep,
)
from .cycle import (
    CycleModelError,
    ItineraryError,
    PrecisionError,
    TargetBoxError,
    OrientationError,
    InadmissibleError,
    NewtonError,
    CouplingError,
    CycleModelConfig,
    ReturnSpec,
    ShilnikovPoint,
    ValidationReport,
    AdmissibilityReport,
    FixedPointResult,
    ReturnCircleResult,
    StudyRow,
    default_config,
    config_from_toml,
    validate,
    local_map,
    iterate_local,
    global_12,
    global_21,
    first_return,
    return_map_polynomial,
    rescale_params,
    params_for_target,
    admissible,
    orientation_sign,
    auto_sequence,
    find_fixed_point,
    reduced_lc_sign,
    return_circle,
    convergence_study,
)

__all__ = [name for name in dir() if not name.startswith("_")]
