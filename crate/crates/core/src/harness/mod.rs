//! Experiment orchestration: configuration files, Monte-Carlo simulation,
//! figure data and CSV output.

pub mod config;
pub mod csv;
pub mod figures;
pub mod sim;

pub use config::Config;
pub use csv::{CsvTable, VERSION};
pub use figures::{fig1_data, fig2_data, fig3_data, Fig1Point, Fig2Point, Fig3Point, Fig3Search};
pub use sim::{run_simulation, simulation_table, Scheme, SimConfig, SimRecord, StopRule};
