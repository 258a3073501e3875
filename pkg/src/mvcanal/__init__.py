"""Nested canalization of multivalued functions and its preservation by the Van Ham Booleanization."""

from .booleanize import (
    BooleanizedNetwork,
    BooleanNcStep,
    PartialBooleanFunction,
    VanHamCodec,
    booleanize,
    booleanize_function,
    is_nc_partial,
    transport_witness,
    verify_boolean_nc,
)
from .canalization import (
    NcWitness,
    SncStep,
    SncWitness,
    WitnessError,
    WncStep,
    WncWitness,
    generate_nc,
    generate_snc,
    is_canalizing,
    is_nc,
    is_snc,
    is_softly_canalizing,
    is_wnc,
    snc_witness_from_nc,
)
from .counting import enumerate_decompositions, up_prop_snc_by_nbvars, up_snc, weight
from .domain import (
    VACUOUS,
    IntervalBox,
    MixedRadixDomain,
    MultivaluedFunction,
    Network,
    ResourceLimitError,
    SubsetBox,
    slice_constant,
)

__version__ = "0.1.0"
