"""Balls, basic opens, neighborhood witnesses and the basis-axiom checker."""

from .balls import (
    BASE_VALUATION,
    DERIVATION_REFINED,
    Ball,
    BasicOpen,
    LazyDerivationFamily,
    LocalBoundednessWitness,
    TopologyDesc,
    as_basic_open,
    boundedness_witness,
    contains,
    local_boundedness_construction,
    local_boundedness_witness,
    local_boundedness_witness_many,
    nondiscreteness_witness,
    sample_in_open,
    shrink_for_group_axioms,
    shrink_for_scaling,
    shrink_open_for_group_axioms,
    shrink_open_for_scaling,
    v_topology_witness,
)
from .continuity import (
    ContinuityWitness,
    addition_witness,
    check_witness,
    inverse_witness,
    multiplication_witness,
)
