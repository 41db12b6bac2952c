//! Experiment grid runner and rank-mean aggregation.

mod grid;
mod ranks;

pub use grid::{
    parse_density_range, parse_size_range, read_rows, run_grid, solve_with, write_rows, Algorithm,
    CsvRow, GridConfig, GridReport,
};
pub use ranks::{rank_means, write_rank_tables, Metric, RankTable};
