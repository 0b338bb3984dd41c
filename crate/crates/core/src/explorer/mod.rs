//! Experiments assembled from the other modules, their configuration,
//! CSV reports, and the command-line front end.

mod cli;
mod config;
mod containment;
mod l1;
mod report;
mod runners;
mod section;

pub use cli::run_cli;
pub use config::{config_file_args, config_text_args, ExperimentConfig, ExperimentKind, Functional};
pub use containment::{
    admissible_ranks, containment_factor, fact_factor, probe_directions, run_fact_check, run_global_form,
    run_projection_containment, RadialCloud, MAX_CLOUD_DIM,
};
pub use l1::{pearson, relative_spread, run_l1_compare};
pub use report::{ExperimentReport, Value, SCHEMA_VERSION};
pub use runners::{run_cover, run_estimate, run_jl};
pub use section::{run_section_diameter, section_dim, section_minima};

use crate::error::Result;

/// Validates `cfg` and runs the experiment it names.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Estimate => run_estimate(cfg),
        ExperimentKind::Cover => run_cover(cfg),
        ExperimentKind::Jl => run_jl(cfg),
        ExperimentKind::SectionDiameter => run_section_diameter(cfg),
        ExperimentKind::ProjectionContainment => run_projection_containment(cfg),
        ExperimentKind::GlobalForm => run_global_form(cfg),
        ExperimentKind::L1Compare => run_l1_compare(cfg),
        ExperimentKind::FactCheck => run_fact_check(cfg),
    }
}

#[cfg(test)]
mod tests;
