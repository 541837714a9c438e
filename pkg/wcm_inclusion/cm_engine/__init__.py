from wcm_inclusion.cm_engine.cm_sequence import cm_sequence, holds, verify_cm
from wcm_inclusion.cm_engine.extension import (
    candidate_slacks,
    continuation_holds,
    extend_exhaustive,
    extend_inertial,
    extend_support,
)
from wcm_inclusion.cm_engine.classify import (
    chain_budget,
    check_condition4,
    class_report,
    classify_cyclic_monotone,
    classify_monotone,
    classify_weakly_monotone,
    classify_wcm,
    point_sequences,
)
