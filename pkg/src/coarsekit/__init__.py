"""Finite generalized metric spaces, quasi-actions of finite groups, coarse
fibrations and induced quasi-actions, with every constant computed exactly."""
from .actions import (
    ConjugacyWitness,
    PermutationAction,
    QAReport,
    QuasiAction,
    coboundedness,
    conjugacy_defect,
    equivalence_defect,
    isometry_defect,
    permutation_action,
    qa_constants,
    quasi_orbit,
    restrict,
)
from .errors import (
    AmbiguousDecompositionError,
    CapExceededError,
    CertificateError,
    CoarseKitError,
    InputError,
    NoFiniteConstantError,
    NotASubgroupError,
    NotProductPreservingError,
    SpaceMismatchError,
    StructureError,
)
from .fibrations import (
    CoarseFibration,
    FiberSpace,
    FibrationReport,
    descend_action,
    descend_map,
    fiber_space,
    fibration_constants,
    orbit_fibration,
    quasi_respect_defect,
)
from .generate import generate_random_action
from .groups import (
    CosetSpace,
    FiniteGroup,
    SubgroupHandle,
    all_subgroups,
    coset_action,
    cyclic_group,
    dihedral_group,
    direct_product,
    left_cosets,
    small_groups,
    subgroup_check,
    validate_group,
)
from .induction import (
    InducedBundle,
    component_coset_map,
    extend_conjugacy,
    induce,
    induced_product_form,
    isometrize,
    restriction_conjugacy,
)
from .metric import (
    INF,
    MetricSpace,
    Subset,
    diameter,
    disjoint_union,
    finite_components,
    hausdorff_distance,
    l2_product,
    line_space,
    quotient_by_zero_distance,
    set_distance,
    validate_metric,
)
from .quasimaps import (
    ProductDecomposition,
    QIReport,
    QuasiMap,
    assemble_product_map,
    coarse_density,
    compose,
    product_to_union,
    qi_report,
    quasi_inverse,
    split_product_map,
    union_to_product,
)

__version__ = "0.1.0"

__all__ = [
    "ConjugacyWitness", "PermutationAction", "QAReport", "QuasiAction", "coboundedness",
    "conjugacy_defect", "equivalence_defect", "isometry_defect", "permutation_action",
    "qa_constants", "quasi_orbit", "restrict", "AmbiguousDecompositionError",
    "CapExceededError", "CertificateError", "CoarseKitError", "InputError",
    "NoFiniteConstantError", "NotASubgroupError", "NotProductPreservingError",
    "SpaceMismatchError", "StructureError", "CoarseFibration", "FiberSpace",
    "FibrationReport", "descend_action", "descend_map", "fiber_space",
    "fibration_constants", "orbit_fibration", "quasi_respect_defect",
    "generate_random_action", "CosetSpace", "FiniteGroup", "SubgroupHandle",
    "all_subgroups", "coset_action", "cyclic_group", "dihedral_group", "direct_product",
    "left_cosets", "small_groups", "subgroup_check", "validate_group", "InducedBundle",
    "component_coset_map", "extend_conjugacy", "induce", "induced_product_form",
    "isometrize", "restriction_conjugacy", "INF", "MetricSpace", "Subset", "diameter",
    "disjoint_union", "finite_components", "hausdorff_distance", "l2_product",
    "line_space", "quotient_by_zero_distance", "set_distance", "validate_metric",
    "ProductDecomposition", "QIReport", "QuasiMap", "assemble_product_map",
    "coarse_density", "compose", "product_to_union", "qi_report", "quasi_inverse",
    "split_product_map", "union_to_product",
]
