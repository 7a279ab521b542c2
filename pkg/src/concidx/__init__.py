"""Canonical products of unbounded genus, the concentration index, and
light/heavy covering diagnostics for discrete plane measures."""

from .concentration import (
    EULER_E,
    ResidualRow,
    bn_check,
    circle_average,
    conc_index,
    delta_of_r,
    lemma11_check,
    max_on_circle,
    nevanlinna_T,
    residual_sweep,
)
from .errors import AtomBudgetError, ConfigError, DomainError
from .kernels import BACKEND as KERNEL_BACKEND
from .lightpoints import (
    Classification,
    CoverDisk,
    CoverReport,
    besicovitch_select,
    beta_schedule,
    build_cover_report,
    clamped_envelope,
    classify_point,
    covered_by,
    default_envelope,
    heavy_cover,
    measure_multiplicity,
    radii_sum_check,
)
from .measure import (
    IntervalSet,
    PointMeasure,
    count_disk,
    generate_profile,
    integrated_counting,
    load_measure,
    log_measure,
    midgap_radius,
    n_of_r,
    nu_mixed,
    save_measure,
)
from .primary import (
    BoundWitness,
    bound13_holds,
    bound19_holds,
    genus_schedule,
    log_abs_primary,
    log_abs_primary_series,
    tail_polynomial,
)
from .product import (
    DecompositionReport,
    decompose,
    eval_v,
    eval_v_many,
    product_field,
    v1_via_parts,
)
from .profiles import make_profile

__version__ = "0.1.0"
