//! Reference implementations shared by the integration tests. Nothing here
//! calls into the scoring or geometry code it is compared against.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scenebench::detect::{BoundingBox, ColorScores, DetectedInstance, DetectionSet};
use scenebench::scene::{CategoryName, ColorName, RelationKind, SceneBuilder, StructuredScene};

pub const POOL: [&str; 3] = ["cat", "dog", "cow"];

pub fn cat(name: &str) -> CategoryName {
    CategoryName::new(name).unwrap()
}

pub fn one_hot(color: ColorName) -> ColorScores<f64> {
    ColorScores::from_fn(|c| if c == color { 0.9 } else { 0.01 })
}

pub fn detected(category: &str, color: ColorName, cx: f64, cy: f64, w: f64, h: f64) -> DetectedInstance<f64> {
    DetectedInstance {
        category: cat(category),
        confidence: 0.9,
        bbox: BoundingBox::new(cx, cy, w, h).unwrap(),
        color,
        color_scores: one_hot(color),
    }
}

/// Does `kind` describe box `s` relative to box `o`? Integer-scaled form of
/// the offset rule with c = 1/10.
pub fn oracle_holds(kind: RelationKind, s: &BoundingBox<f64>, o: &BoundingBox<f64>) -> bool {
    let span = |a: f64, b: f64| a + b;
    match kind {
        RelationKind::Right => 10.0 * s.cx > 10.0 * o.cx + span(s.w, o.w),
        RelationKind::Left => 10.0 * s.cx < 10.0 * o.cx - span(s.w, o.w),
        RelationKind::Below => 10.0 * s.cy > 10.0 * o.cy + span(s.h, o.h),
        RelationKind::Above => 10.0 * s.cy < 10.0 * o.cy - span(s.h, o.h),
    }
}

/// Satisfied checks under one assignment (`None` = blank).
fn hits(scene: &StructuredScene, dets: &DetectionSet<f64>, assign: &[Option<usize>]) -> usize {
    let insts = scene.instances();
    let mut n = 0;
    for (i, inst) in insts.iter().enumerate() {
        if let (Some(want), Some(j)) = (inst.color, assign[i]) {
            n += usize::from(dets.instances[j].color == want);
        }
    }
    for rel in scene.relations() {
        let s = insts.iter().position(|x| x.key() == rel.subject).unwrap();
        let o = insts.iter().position(|x| x.key() == rel.object).unwrap();
        if let (Some(a), Some(b)) = (assign[s], assign[o]) {
            n += usize::from(oracle_holds(rel.kind, &dets.instances[a].bbox, &dets.instances[b].bbox));
        }
    }
    n
}

/// Exhaustive maximum over every category-respecting injection.
pub fn oracle_best_hits(scene: &StructuredScene, dets: &DetectionSet<f64>) -> usize {
    fn go(
        i: usize,
        scene: &StructuredScene,
        dets: &DetectionSet<f64>,
        assign: &mut Vec<Option<usize>>,
        best: &mut usize,
    ) {
        let insts = scene.instances();
        if i == insts.len() {
            *best = (*best).max(hits(scene, dets, assign));
            return;
        }
        assign.push(None);
        go(i + 1, scene, dets, assign, best);
        assign.pop();
        for (j, d) in dets.instances.iter().enumerate() {
            if d.category == insts[i].category && !assign.contains(&Some(j)) {
                assign.push(Some(j));
                go(i + 1, scene, dets, assign, best);
                assign.pop();
            }
        }
    }
    let mut best = 0;
    go(0, scene, dets, &mut Vec::new(), &mut best);
    best
}

pub fn oracle_normalizer(scene: &StructuredScene) -> usize {
    scene.instances().iter().filter(|i| i.color.is_some()).count() + scene.relations().len()
}

pub fn oracle_bias(scene: &StructuredScene, dets: &DetectionSet<f64>) -> usize {
    let mut seen: Vec<&CategoryName> = Vec::new();
    let mut bias = 0i64;
    for inst in scene.instances() {
        if seen.contains(&&inst.category) {
            continue;
        }
        seen.push(&inst.category);
        let n = scene.instances().iter().filter(|x| x.category == inst.category).count() as i64;
        let m = dets.instances.iter().filter(|d| d.category == inst.category).count() as i64;
        bias += (n - m).abs();
    }
    bias as usize
}

/// A scene with up to five instances over a three-category pool and a
/// detection set with up to five boxes. Box sides are 1 mod 10 so no center
/// offset ever sits exactly on a relation threshold.
pub fn random_case(seed: u64) -> (StructuredScene, DetectionSet<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=5);
    let mut b = SceneBuilder::new();
    let mut refs = Vec::new();
    for _ in 0..n {
        let category = cat(POOL[rng.gen_range(0..POOL.len())]);
        let color = rng.gen_bool(0.85).then(|| *ColorName::PALETTE[..3].choose(&mut rng).unwrap());
        refs.push(b.instance(&category, color));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                let kind = *RelationKind::ALL.choose(&mut rng).unwrap();
                b.relate(&refs[i], kind, &refs[j]).unwrap();
            }
        }
    }
    let m = rng.gen_range(0..=5);
    let side = |rng: &mut ChaCha8Rng| (10 * rng.gen_range(0..6) + 11) as f64;
    let dets = (0..m)
        .map(|_| {
            let category = POOL[rng.gen_range(0..POOL.len())];
            let color = *ColorName::PALETTE[..3].choose(&mut rng).unwrap();
            let (cx, cy) = (rng.gen_range(0..60) as f64, rng.gen_range(0..60) as f64);
            let (w, h) = (side(&mut rng), side(&mut rng));
            detected(category, color, cx, cy, w, h)
        })
        .collect();
    (b.build(), DetectionSet::new(dets))
}
