use crate::detect::{extract_relations, post_process, DetectionSet, PostProcessConfig, RawDetection};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::StructuredScene;

use super::matching::{best_matching, score_matching, AccTally, Matching, Verdicts};

/// Sum over prompt categories of `|n_k - m_k|`; other detected categories are ignored.
pub fn compute_bias<T: Scalar>(scene: &StructuredScene, dets: &DetectionSet<T>) -> usize {
    scene
        .category_counts()
        .into_iter()
        .map(|(category, n)| n.abs_diff(dets.count_of(category)))
        .sum()
}

/// `(acc + 1 / (bias + 1)) / 2`. `bias` may be a dataset mean.
pub fn align_score<T: Scalar>(acc: T, bias: T) -> T {
    (acc + T::one() / (bias + T::one())) / T::of(2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub bias: usize,
    pub acc: AccTally,
    pub align_score: f64,
    pub matching: Matching,
    pub verdicts: Verdicts,
}

impl ScoreReport {
    pub fn acc_value(&self) -> f64 {
        self.acc.value()
    }

    pub fn normalizer(&self) -> usize {
        self.acc.normalizer
    }

    pub fn is_perfect(&self) -> bool {
        self.bias == 0 && self.acc.hits == self.acc.normalizer
    }
}

/// Score an already post-processed detection set.
pub fn evaluate<T: Scalar>(
    scene: &StructuredScene,
    dets: &DetectionSet<T>,
    cfg: &PostProcessConfig<T>,
) -> ScoreReport {
    let relations = extract_relations(dets, cfg);
    let (matching, acc) = best_matching(scene, dets, &relations);
    let (rescored, verdicts) =
        score_matching(scene, dets, &relations, &matching).expect("search yields a valid matching");
    debug_assert_eq!(rescored, acc);
    let bias = compute_bias(scene, dets);
    ScoreReport {
        bias,
        acc,
        align_score: align_score(acc.value::<f64>(), bias as f64),
        matching,
        verdicts,
    }
}

/// Post-process raw detections, then score.
pub fn evaluate_raw<T: Scalar>(
    scene: &StructuredScene,
    raw: &[RawDetection<T>],
    cfg: &PostProcessConfig<T>,
) -> (DetectionSet<T>, ScoreReport) {
    let dets = post_process(raw, cfg);
    let report = evaluate(scene, &dets, cfg);
    (dets, report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate<T> {
    pub count: usize,
    pub mean_acc: T,
    pub mean_bias: T,
    /// AlignScore of the dataset means.
    pub align_score: T,
    /// Mean of the per-prompt AlignScores.
    pub mean_prompt_align_score: T,
}

/// Dataset-level summary of `(acc, bias)` pairs in input order.
pub fn aggregate<T: Scalar>(pairs: &[(T, T)]) -> Result<Aggregate<T>> {
    if pairs.is_empty() {
        return Err(Error::Empty("no score reports to aggregate".into()));
    }
    let n = T::of_usize(pairs.len());
    let (mut acc, mut bias, mut per_prompt) = (T::zero(), T::zero(), T::zero());
    for &(a, b) in pairs {
        acc += a;
        bias += b;
        per_prompt += align_score(a, b);
    }
    let (mean_acc, mean_bias) = (acc / n, bias / n);
    Ok(Aggregate {
        count: pairs.len(),
        mean_acc,
        mean_bias,
        align_score: align_score(mean_acc, mean_bias),
        mean_prompt_align_score: per_prompt / n,
    })
}
