mod common;

use common::{cat, detected, oracle_best_hits, oracle_bias, oracle_normalizer, random_case};
use proptest::prelude::*;
use scenebench::detect::{extract_relations, DetectionRecord, DetectionSet, PostProcessConfig};
use scenebench::score::{
    aggregate, align_score, best_matching, compute_bias, evaluate, evaluate_raw, score_matching,
    Matching, Target,
};
use scenebench::scene::{ColorName, RelationKind, SceneBuilder, StructuredScene};

fn cfg() -> PostProcessConfig<f64> {
    PostProcessConfig::default()
}

/// cat is black, left of the dog, right of the cow.
fn cat_dog_cow() -> StructuredScene {
    let mut b = SceneBuilder::new();
    let a = b.instance(&cat("cat"), Some(ColorName::Black));
    let dog = b.instance(&cat("dog"), None);
    let cow = b.instance(&cat("cow"), None);
    b.relate(&a, RelationKind::Left, &dog).unwrap();
    b.relate(&a, RelationKind::Right, &cow).unwrap();
    b.build()
}

fn two_clocks() -> StructuredScene {
    let mut b = SceneBuilder::new();
    b.instance(&cat("clock"), Some(ColorName::White));
    b.instance(&cat("clock"), Some(ColorName::Green));
    b.build()
}

#[test]
fn white_cat_correctly_placed_scores_two_thirds() {
    let record = r#"{"schema":"scenebench/detections","version":1,"image_id":0,"detections":[
      {"category":"cat","confidence":0.91,"box":[200,100,60,60],
       "color_scores":{"green":0.01,"red":0.02,"yellow":0.03,"brown":0.04,"black":0.10,"white":0.70,"blue":0.10}},
      {"category":"dog","confidence":0.88,"box":[340,100,60,60],
       "color_scores":{"green":0.1,"red":0.1,"yellow":0.1,"brown":0.4,"black":0.1,"white":0.1,"blue":0.1}},
      {"category":"cow","confidence":0.85,"box":[60,100,60,60],
       "color_scores":{"green":0.1,"red":0.1,"yellow":0.1,"brown":0.1,"black":0.4,"white":0.1,"blue":0.1}}]}"#;
    let raw = DetectionRecord::parse(record).unwrap().detections;
    let (_, report) = evaluate_raw(&cat_dog_cow(), &raw, &cfg());
    assert_eq!((report.acc.hits, report.acc.normalizer), (2, 3));
    assert_eq!(report.bias, 0);
    assert!((report.acc_value() - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(format!("{:.2}", report.acc_value()), "0.67");
    assert!(!report.verdicts.colors[0].correct);
    assert!(report.verdicts.relations.iter().all(|r| r.correct));
}

#[test]
fn bias_examples() {
    let mut b = SceneBuilder::new();
    for _ in 0..3 {
        b.instance(&cat("bench"), Some(ColorName::White));
    }
    b.instance(&cat("boat"), Some(ColorName::Green));
    let scene = b.build();
    let dets = DetectionSet::new(vec![
        detected("bench", ColorName::White, 10.0, 10.0, 20.0, 20.0),
        detected("bench", ColorName::White, 60.0, 10.0, 20.0, 20.0),
        detected("boat", ColorName::Green, 110.0, 10.0, 20.0, 20.0),
        detected("dog", ColorName::Brown, 160.0, 10.0, 20.0, 20.0),
    ]);
    assert_eq!(compute_bias(&scene, &dets), 1);
    assert_eq!(compute_bias(&two_clocks(), &DetectionSet::<f64>::new(vec![])), 2);
    let exact = DetectionSet::new(vec![
        detected("clock", ColorName::Red, 10.0, 10.0, 20.0, 20.0),
        detected("clock", ColorName::Red, 60.0, 10.0, 20.0, 20.0),
    ]);
    assert_eq!(compute_bias(&two_clocks(), &exact), 0);
}

#[test]
fn clocks_matched_in_order_score_one() {
    let scene = two_clocks();
    let dets = DetectionSet::new(vec![
        detected("clock", ColorName::White, 10.0, 10.0, 20.0, 20.0),
        detected("clock", ColorName::Green, 60.0, 10.0, 20.0, 20.0),
    ]);
    let rel = extract_relations(&dets, &cfg());
    let f = Matching::new(vec![Target::Detected(0), Target::Detected(1)]);
    let (acc, _) = score_matching(&scene, &dets, &rel, &f).unwrap();
    assert_eq!(acc.value::<f64>(), 1.0);
}

#[test]
fn clocks_listed_in_reverse_are_swapped() {
    let scene = two_clocks();
    let dets = DetectionSet::new(vec![
        detected("clock", ColorName::Green, 10.0, 10.0, 20.0, 20.0),
        detected("clock", ColorName::White, 60.0, 10.0, 20.0, 20.0),
    ]);
    let rel = extract_relations(&dets, &cfg());
    let identity = Matching::new(vec![Target::Detected(0), Target::Detected(1)]);
    assert_eq!(score_matching(&scene, &dets, &rel, &identity).unwrap().0.hits, 0);
    let (m, acc) = best_matching(&scene, &dets, &rel);
    assert_eq!(m.targets(), &[Target::Detected(1), Target::Detected(0)]);
    assert_eq!(acc.value::<f64>(), 1.0);
}

#[test]
fn blanks_score_zero() {
    let scene = cat_dog_cow();
    let empty = DetectionSet::<f64>::new(vec![]);
    let rel = extract_relations(&empty, &cfg());
    let (acc, verdicts) = score_matching(&scene, &empty, &rel, &Matching::all_blank(3)).unwrap();
    assert_eq!(acc.hits, 0);
    assert!(verdicts.relations.iter().all(|r| r.detected.is_none()));
    let report = evaluate(&scene, &empty, &cfg());
    assert_eq!(report.matching, Matching::all_blank(3));
    assert_eq!(report.acc.hits, 0);
    assert_eq!(report.bias, 3);
}

#[test]
fn invalid_matching_rejected() {
    let scene = two_clocks();
    let dets = DetectionSet::new(vec![detected("clock", ColorName::Green, 10.0, 10.0, 20.0, 20.0)]);
    let rel = extract_relations(&dets, &cfg());
    let twice = Matching::new(vec![Target::Detected(0), Target::Detected(0)]);
    assert!(score_matching(&scene, &dets, &rel, &twice).is_err());
    let short = Matching::new(vec![Target::Blank]);
    assert!(score_matching(&scene, &dets, &rel, &short).is_err());
    let out_of_range = Matching::new(vec![Target::Detected(3), Target::Blank]);
    assert!(score_matching(&scene, &dets, &rel, &out_of_range).is_err());
}

#[test]
fn published_model_rows() {
    let rows = [
        ((0.669, 1.52), 0.533),
        ((0.282, 2.98), 0.267),
        ((0.531, 2.24), 0.420),
        ((0.629, 1.43), 0.520),
    ];
    for ((acc, bias), want) in rows {
        let got: f64 = align_score(acc, bias);
        assert!((got - want).abs() <= 0.0015, "({acc}, {bias}) -> {got}, want {want}");
    }
    assert_eq!(align_score(1.0_f64, 0.0), 1.0);
}

#[test]
fn aggregate_uses_dataset_means() {
    let agg = aggregate(&[(1.0_f64, 0.0), (0.0, 2.0)]).unwrap();
    assert_eq!(agg.mean_acc, 0.5);
    assert_eq!(agg.mean_bias, 1.0);
    assert_eq!(agg.align_score, 0.5);
    assert!((agg.mean_prompt_align_score - (1.0 + 1.0 / 6.0) / 2.0).abs() < 1e-15);
    assert!(aggregate::<f64>(&[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matcher_equals_exhaustive_oracle(seed in any::<u64>()) {
        let (scene, dets) = random_case(seed);
        let report = evaluate(&scene, &dets, &cfg());
        prop_assert_eq!(report.acc.hits, oracle_best_hits(&scene, &dets));
        prop_assert_eq!(report.acc.normalizer, oracle_normalizer(&scene));
        prop_assert_eq!(report.bias, oracle_bias(&scene, &dets));
        let rel = extract_relations(&dets, &cfg());
        prop_assert!(report.matching.check(&scene, &dets).is_ok());
        prop_assert_eq!(score_matching(&scene, &dets, &rel, &report.matching).unwrap().0, report.acc);
        let a = report.align_score;
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert_eq!(a == 1.0, report.is_perfect());
    }

    #[test]
    fn relabeling_detections_changes_nothing(seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand_chacha::rand_core::SeedableRng;
        let (scene, dets) = random_case(seed);
        let mut perm = dets.instances.clone();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let a = evaluate(&scene, &dets, &cfg());
        let b = evaluate(&scene, &DetectionSet::new(perm), &cfg());
        prop_assert_eq!((a.bias, a.acc), (b.bias, b.acc));
    }

    #[test]
    fn extra_detection_never_lowers_acc(seed in any::<u64>(), extra in any::<u64>()) {
        let (scene, dets) = random_case(seed);
        let (_, more) = random_case(extra);
        let before = evaluate(&scene, &dets, &cfg()).acc.hits;
        for d in more.instances {
            let mut grown = dets.instances.clone();
            grown.push(d);
            let after = evaluate(&scene, &DetectionSet::new(grown), &cfg()).acc.hits;
            prop_assert!(after >= before);
        }
    }

    #[test]
    fn bias_ignores_the_matching(seed in any::<u64>()) {
        let (scene, dets) = random_case(seed);
        let rel = extract_relations(&dets, &cfg());
        let report = evaluate(&scene, &dets, &cfg());
        let (blank_acc, _) = score_matching(&scene, &dets, &rel, &Matching::all_blank(scene.total_number())).unwrap();
        prop_assert!(blank_acc.hits <= report.acc.hits);
        prop_assert_eq!(compute_bias(&scene, &dets), oracle_bias(&scene, &dets));
    }
}
