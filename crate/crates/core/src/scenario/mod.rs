//! Scenario files: parsing, orchestration and report output.

mod build;
mod config;
mod emit;
mod ini;
mod run;

pub use build::{build_data, build_operator, pointwise, Data, LinearOperator, Operator};
pub use config::{
    BarrierConfig, CheckerConfig, DataConfig, InitialData, MonitorKind, OmegaChoice, OperatorConfig, OutputConfig,
    ProblemKind, Scenario,
};
pub use emit::{csv_string, emit_csv, emit_svg, svg_string, Series};
pub use ini::{Entry, Ini, Section};
pub use run::{run, ImpulsiveSummary, RunOptions, RunReport};
