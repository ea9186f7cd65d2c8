//! Productivity figures, before/after comparisons and the paired
//! signed-rank test behind them.

mod compare;
mod productivity;
mod wilcoxon;

pub use compare::{
    compare_snapshots, compare_variable, split_snapshots, ComparisonReport, ComparisonRow,
    ExperimentVariable, OrdinalEncoding, UnitRecord, VariableComparison,
};
pub use productivity::{
    parse_projects_csv, productivity, productivity_table_csv, productivity_table_text,
    ProjectMetrics,
};
pub use wilcoxon::{
    wilcoxon_signed_rank, wilcoxon_signed_rank_with, Method, PairedObservation, WilcoxonRequest, WilcoxonResult,
    CONVENTIONS, EXACT_LIMIT,
};
