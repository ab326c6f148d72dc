"""Exact interventional and directed-information queries on discrete DAG models."""

from .criteria import (
    AdjustmentCertificate,
    backdoor_adjustment,
    certify_backdoor,
    direct_causes_adjustment,
    find_backdoor_sets,
)
from .distribution import (
    JointTable,
    Kernel,
    condition,
    conditional_divergence,
    conditional_mutual_information,
    kernel_of,
    kl_divergence,
    marginal,
    mutual_information,
    total_variation,
)
from .graph import (
    Dag,
    ancestors_of,
    d_separated,
    descendants_of,
    nondescendants_of,
    parents_of_set,
    surgery,
    to_dot,
    validate_dag,
)
from .information import (
    canonical_structure_report,
    chain_rule_decomposition,
    conditional_directed_information,
    directed_information,
)
from .intervention import (
    InterventionSpec,
    dsk,
    functional_surgery,
    interventional_conditional,
    interventional_global,
    interventional_marginal,
)
from .model import (
    CptModel,
    FunctionalModel,
    cpt_from_functional,
    functional_joint,
    joint_from_cpts,
    sample,
    sample_many,
    validate_model,
)

__version__ = "0.1.0"
