"""File formats, verification campaigns and the command-line interface."""

from binjl.harness.io import (
    DatasetMatrix,
    SketchManifest,
    load_code_words,
    load_codes,
    load_dataset,
    save_codes,
    save_dataset,
)
from binjl.harness.verify import (
    VerificationReport,
    error_curve,
    verify_distance_embedding,
    verify_inner_product_embedding,
)
