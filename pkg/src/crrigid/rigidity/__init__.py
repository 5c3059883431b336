"""Decision procedures for Bochner and Weyl rigidity."""
from .verdict import LinearSystem, RigidityVerdict, Status
from .bochner import (
    IwataniResult,
    Lemma1Result,
    NotNormalFormError,
    PreconditionError,
    bochner_flat,
    bochner_rigid,
    gamma,
    is_skew_hermitian,
    iwatani_check,
    iwatani_normal_form,
    lemma1_solve,
    nondegenerate,
    normal_form_vectors,
    recover_skew,
    verify_witness,
)
from .conformal import (
    CurvatureElement,
    RealSymForm,
    curvature_space_basis,
    gauss_gamma,
    kulkarni_nomizu,
    ricci_and_weyl,
    weyl_rigid,
)
