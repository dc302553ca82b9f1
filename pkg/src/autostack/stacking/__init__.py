from autostack.stacking.structure import (
    ComponentPhi,
    PhiComponent,
    PhiGraph,
    RelationPhi,
    StackingError,
    StackingStructure,
    degenerate_domain,
    phi_eval,
    stacking_presentation,
)
from autostack.stacking.convert import (
    check_processed_exact,
    cprs_to_stacking,
    identity_letters,
    stacking_to_cprs,
    strip_identity_letters,
)
from autostack.stacking.from_async import (
    AsyncAutomaticStructure,
    AsyncPhi,
    stacking_from_async,
)

__all__ = [
    "AsyncAutomaticStructure",
    "AsyncPhi",
    "ComponentPhi",
    "PhiComponent",
    "PhiGraph",
    "RelationPhi",
    "StackingError",
    "StackingStructure",
    "check_processed_exact",
    "cprs_to_stacking",
    "degenerate_domain",
    "identity_letters",
    "phi_eval",
    "stacking_from_async",
    "stacking_presentation",
    "stacking_to_cprs",
    "strip_identity_letters",
]
