"""Local covariate selection for average causal effect estimation.

Learns the causal neighbourhood of a treatment variable, decides whether
its effect on an outcome is identifiable, zero, or undecidable from
observational data alone, returns a valid adjustment set when one exists,
and estimates the effect by adjusted regression - all without assuming
causal sufficiency or pretreatment covariates.
"""

from .adjustment import (
    CASE_IDENTIFIABLE,
    CASE_NON_IDENTIFIABLE,
    CASE_ZERO,
    LcsOutcome,
    RuleWitness,
    amenable,
    brute_force_adjustment_search,
    ehs_baseline,
    forb_set,
    gac_satisfied,
    lcs,
    rule_r1,
    rule_r2,
    rule_r3,
)
from .discovery import (
    LocalStructure,
    derive_sets,
    learn_local_pag,
    run_learner,
    stop_rules_met,
    total_conditioning_mb,
)
from .estimation import (
    ScmSpec,
    estimate_effect_ols,
    relative_error,
    scm_covariance,
    true_effect,
)
from .graphs import (
    Edge,
    GraphError,
    GraphKind,
    Mark,
    MixedGraph,
    PathKind,
    ancestors,
    classify_path,
    descendants,
    district,
    graph_from_json,
    graph_to_json,
    m_separated,
    markov_blanket_mag,
    possible_descendants,
    validate,
)
from .independence import (
    CiEngine,
    Dataset,
    is_independent,
    load_dataset_csv,
    reset_count,
    save_dataset_csv,
    test_count,
)
from .projection import is_visible, latent_project, mag_to_pag, visible_edges
from .simbench import (
    ExperimentConfig,
    RepResult,
    choose_latents,
    gen_er_dag,
    gen_instance,
    gen_linear_scm,
    run_experiment,
    sample,
)

__version__ = "0.1.0"
