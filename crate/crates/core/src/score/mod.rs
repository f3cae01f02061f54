//! Alignment scoring: Bias, the Acc-maximizing injection matching, and AlignScore.

mod evaluate;
pub mod file;
mod matching;

pub use evaluate::{aggregate, align_score, compute_bias, evaluate, evaluate_raw, Aggregate, ScoreReport};
pub use file::{ScoreFile, ScoreRecord, SCORES_SCHEMA};
pub use matching::{
    best_matching, normalizer, score_matching, AccTally, ColorVerdict, Matching, RelationVerdict,
    Target, Verdicts,
};
