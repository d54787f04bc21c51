from avjets.avmod.base import (
    AVModule,
    Sampling,
    av_axiom_check,
    diff_action,
    differentiability_check,
    minimal_differentiable_order,
)
from avjets.avmod.jet import (
    JetModule,
    JetModuleElement,
    dual_glue_check,
    family_action_closed_form,
    family_glue_closed_form,
    family_rep,
    glue_equivariance_check,
    glue_inverse_check,
    jet_action,
    jet_glue_matrix,
    p1_family_check,
    push_field,
    section_law,
    tensor_glue_check,
    transport,
)
from avjets.avmod.rudakov import (
    DeltaElement,
    DeltaModule,
    RudakovElement,
    RudakovModule,
    TensorRealization,
    delta_module_act,
    is_trace_twist,
    localize_at_point,
    localize_check,
    rudakov_act,
    rudakov_differentiability_check,
    rudakov_realization_check,
)

__all__ = [
    "AVModule", "Sampling", "av_axiom_check", "diff_action", "differentiability_check",
    "minimal_differentiable_order",
    "JetModule", "JetModuleElement", "dual_glue_check", "family_action_closed_form",
    "family_glue_closed_form", "family_rep", "glue_equivariance_check", "glue_inverse_check",
    "jet_action", "jet_glue_matrix", "p1_family_check", "push_field", "section_law",
    "tensor_glue_check", "transport",
    "DeltaElement", "DeltaModule", "RudakovElement", "RudakovModule", "TensorRealization",
    "delta_module_act", "is_trace_twist", "localize_at_point", "localize_check", "rudakov_act",
    "rudakov_differentiability_check", "rudakov_realization_check",
]
