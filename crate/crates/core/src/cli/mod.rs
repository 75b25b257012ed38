//! Batch harness: JSON run configurations in, traces and reports out.

mod config;
mod run;

pub use config::{
    AlgorithmTag, BudgetSpec, CrabSpec, GrapeSpec, KrotovSpec, OeaSpec, OutputSpec, Preset, ProblemSpec,
    PulseSpec, ResolvedProblem, ResourcesSpec, RunConfig, StateSpec, TaeaSpec, TrotterSpec, RENORMALIZE_TOL,
    SCHEMA_VERSION,
};
pub use run::{run, BackendChoice, Command, Overrides, Report, DEFAULT_OUT_DIR};

/// Environment variable consulted for the output directory when `--out` is absent.
pub const OUT_ENV: &str = "QACONTROL_OUT";

/// `{"error": {"kind", "code", "message"}}` for stderr.
pub fn error_json(err: &crate::Error) -> String {
    serde_json::json!({
        "error": {
            "kind": err.kind(),
            "code": err.code(),
            "message": err.to_string(),
        }
    })
    .to_string()
}
