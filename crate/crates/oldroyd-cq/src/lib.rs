//! IO companion for the solver core: config files, CSV and markdown
//! emission, and the preset convergence tables behind the `oldroyd-cq`
//! command line tool.

pub mod config;
pub mod emit;
pub mod tables;

pub use config::{parse_run_config, OutputFormat, RunConfig};
pub use emit::{emit, render_csv, render_markdown};
