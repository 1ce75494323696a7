"""Kneading theory for skew-product toy models over a Cantor base."""
from ._backend import BACKEND
from .analysis import (
    BasinReport,
    CocycleEntries,
    PeriodicOrbitRecord,
    PreconditionError,
    Stability,
    cocycle,
    find_periodic_orbits,
    jacobian_fd,
    minimum_principle_check,
    negative_schwarzian_gate,
    schwarzian,
    schwarzian_composition_check,
    singer_check,
)
from .cantor import PsiError, cantor_code, psi_extended, psi_on_cantor, verify_psi_conjugacy
from .equivalence import (
    CombinatorialInequivalenceError,
    ConjugacyTable,
    FiberPartition,
    LabeledPreimage,
    PreimageCurve,
    build_Hn,
    convergence_estimate,
    density_report,
    equicontinuity_modulus,
    pl_conjugacy,
    preimage_set,
    trace_curve,
)
from .fixtures import FIXTURE_NAMES, fixture
from .model import (
    Branch,
    CantorMapSpec,
    Point,
    SignedCoordinate,
    ToyModel,
    UnimodalFamily,
    branch_inverse,
    eval_orbit,
    eval_step,
    example3,
    quadratic,
    tent,
    validate_model,
)
from .symbolic import AddressSymbol, Itinerary, itinerary, kneading, kneading_equal

__version__ = "0.1.0"
