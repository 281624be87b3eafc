from ._core import (
    Qcnn,
    CertifyResult,
    build_qcnn,
    certified_radius,
    certified_volume,
    certify,
    classifier_eval,
    clopper_pearson_lower,
    clopper_pearson_upper,
    gen_split,
    ground_state,
    phase_label,
    rank_utilities,
    train,
)

__all__ = [
    "Qcnn",
    "CertifyResult",
    "build_qcnn",
    "certified_radius",
    "certified_volume",
    "certify",
    "classifier_eval",
    "clopper_pearson_lower",
    "clopper_pearson_upper",
    "gen_split",
    "ground_state",
    "phase_label",
    "rank_utilities",
    "train",
]
