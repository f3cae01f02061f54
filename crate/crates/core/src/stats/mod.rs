//! Breakdowns of score records, per-kind relation accuracy, correlation
//! statistics for rating studies, and run-to-run stability.

mod correlation;
mod grouping;

pub use correlation::{
    average_ranks, kendall_tau, krippendorff_alpha, mean_ratings, pearson, sample_moments, spearman, Moments,
};
pub use grouping::{
    group_scores, relation_direction_accuracy, stability_report, DirectionAccuracy, GroupKey, GroupRow, GroupValue,
    GroupedMetrics, KindTally, StabilityReport,
};
