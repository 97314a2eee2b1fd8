//! Config-driven sweeps and the acceptance verifier.
//!
//! A sweep writes three files to `out_dir`:
//!
//! * `results.csv`: one row per (model, n, seed) in that order. Columns are
//!   `model, n, seed, lscc_frac, second_frac, kn_frac, alpha1,
//!   giant_edge_frac, giant_half_degree_frac`, then `z_frac_k*`,
//!   `nk_frac_k*`, `nk2_frac_k*` for each `k` in ascending order,
//!   `census_tv_r*` for each radius, and finally
//!   `degree_mass_dev, theory_zeta, theory_scc_density`. Empty cells mean
//!   "not applicable". The file is byte-identical across reruns and thread
//!   budgets.
//! * `timings.csv`: wall time per row. Not reproducible by nature.
//! * `limits.json`: solved limit values per model.
//!
//! The graph seed of replicate `s` is `replicate_seed(base_seed, s)` and is
//! shared by all models and sizes.

mod config;
mod sweep;
mod verify;

pub use config::{
    ExperimentConfig, ModelEntry, Tolerances, DEFAULT_CENSUS_REPS, DEFAULT_PAIR_BUDGET, THREADS_ENV,
};
pub use sweep::{
    compute_row, csv_header, jobs, prepare_contexts, run_sweep, Job, ModelContext, ResultRow,
    RowFailure, SweepOutcome, DEGREE_WINDOW, THEORY_TOL,
};
pub use verify::{evaluate, verify, Check, Relation, VerifyReport};
