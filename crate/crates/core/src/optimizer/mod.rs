//! BO driver loops for every algorithm variant, acquisition maximization,
//! budget accounting, and recovered-front extraction.

pub mod drivers;
pub mod problem;
pub mod search;

pub use drivers::{
    recover_pareto_front, run_imoca, run_mesmo, run_mesmoc, run_mfosemo, run_naive_cfmo,
    run_random_search, ImocaVariant, MfVariant,
};
pub use problem::{
    run_record_header, run_records_from_csv, run_records_to_csv, Budget, Problem, RunConfig,
    RunRecord, RunResult,
};
pub use search::{initial_design, optimize_acquisition, CandidateScore, SearchOutcome};
