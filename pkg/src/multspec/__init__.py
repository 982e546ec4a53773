"""Multiplier-spectrum invariants of rational maps on the Riemann sphere."""

__version__ = "0.1.0"

from .errors import (
    CycleBroken,
    Degenerate,
    DegreeCap,
    DomainError,
    IndeterminatePoint,
    MultspecError,
    NoConvergence,
    NotDivisible,
    NotPeriodic,
    NumericalError,
    OrbitMatchFailed,
    Overflow,
    ParseError,
    ShapeError,
    ShapeMismatch,
    SingularCurve,
    Superattracting,
)
from .forms import (
    DOUBLE,
    EXTENDED,
    HomForm2,
    Poly,
    eval_compensated,
    form_exact_divide,
    form_multiply,
    hom_resultant,
    resultant,
)
from .maps import (
    Moebius,
    ProjPoint,
    RationalMap,
    apply_map,
    conjugate_map,
    iterate_forms,
    make_map,
    multiplier_along_cycle,
)
from .dynatomic import DynatomicForm, PeriodForm, dynatomic_form, moebius_mu, nu_count, period_form
from .roots import RootCluster, projective_roots, roots_univariate
from .spectra import (
    CycleRecord,
    SigmaVector,
    SpectrumLayer,
    TauVector,
    assemble_cycles,
    delta_layer,
    formal_exact_periods,
    rho_vector,
    sigma_coords,
    spectra_distance,
    spectrum_layer,
    superattracting_in_range,
    tau_vector,
)
from .lattes import WeierstrassParams, family_sample, j_invariant, lattes_mult2
from .probes import (
    ProbeReport,
    SampleConfig,
    collision_probe,
    invariance_trial,
    isospectral_check,
    random_map,
    random_moebius,
)
from .cli import emit_report, map_document, parse_map_document, run_command, serialize_map
