use crate::detect::{DetectionSet, RelationMap, RelationSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::{ColorName, RelationKind, StructuredScene};

/// Where a prompt instance is sent by a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Detected(usize),
    Blank,
}

impl Target {
    pub fn detected(self) -> Option<usize> {
        match self {
            Target::Detected(j) => Some(j),
            Target::Blank => None,
        }
    }
}

/// Category-respecting injection from prompt instances (canonical order) to
/// detections or blanks. Blanks are distinct placeholders, so any number of
/// instances may map to them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    targets: Vec<Target>,
}

impl Matching {
    pub fn new(targets: Vec<Target>) -> Self {
        Matching { targets }
    }

    pub fn all_blank(n: usize) -> Self {
        Matching {
            targets: vec![Target::Blank; n],
        }
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn target(&self, instance: usize) -> Target {
        self.targets[instance]
    }

    pub fn check<T: Scalar>(&self, scene: &StructuredScene, dets: &DetectionSet<T>) -> Result<()> {
        if self.targets.len() != scene.total_number() {
            return Err(Error::InvalidMatching(format!(
                "maps {} instances, scene has {}",
                self.targets.len(),
                scene.total_number()
            )));
        }
        let mut used = vec![false; dets.len()];
        for (inst, target) in scene.instances().iter().zip(&self.targets) {
            let Target::Detected(j) = *target else { continue };
            let det = dets.instances.get(j).ok_or_else(|| {
                Error::InvalidMatching(format!("detection {j} does not exist"))
            })?;
            if det.category != inst.category {
                return Err(Error::InvalidMatching(format!(
                    "{} mapped to a `{}` detection",
                    inst.key(),
                    det.category
                )));
            }
            if std::mem::replace(&mut used[j], true) {
                return Err(Error::InvalidMatching(format!("detection {j} used twice")));
            }
        }
        Ok(())
    }
}

/// Exact Acc as a count of satisfied checks over the normalizer |Z|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AccTally {
    pub hits: usize,
    pub normalizer: usize,
}

impl AccTally {
    /// `hits / normalizer`; a scene with nothing to check scores 1.
    pub fn value<T: Scalar>(&self) -> T {
        if self.normalizer == 0 {
            return T::one();
        }
        T::of_usize(self.hits) / T::of_usize(self.normalizer)
    }
}

/// |Z|: specified colors plus specified relation pairs.
pub fn normalizer(scene: &StructuredScene) -> usize {
    scene.specified_colors() + scene.relations().len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorVerdict {
    pub instance: usize,
    pub required: ColorName,
    /// `None` when the instance is matched to a blank.
    pub detected: Option<ColorName>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationVerdict {
    pub subject: usize,
    pub object: usize,
    pub kind: RelationKind,
    /// `None` when either endpoint is matched to a blank.
    pub detected: Option<RelationSet>,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verdicts {
    pub colors: Vec<ColorVerdict>,
    pub relations: Vec<RelationVerdict>,
}

impl Verdicts {
    pub fn hits(&self) -> usize {
        self.colors.iter().filter(|v| v.correct).count()
            + self.relations.iter().filter(|v| v.correct).count()
    }
}

/// Acc of a fixed matching, with one verdict per specified color and per specified pair.
pub fn score_matching<T: Scalar>(
    scene: &StructuredScene,
    dets: &DetectionSet<T>,
    relations: &RelationMap,
    matching: &Matching,
) -> Result<(AccTally, Verdicts)> {
    matching.check(scene, dets)?;
    let mut verdicts = Verdicts::default();
    for (i, inst) in scene.instances().iter().enumerate() {
        let Some(required) = inst.color else { continue };
        let detected = matching.target(i).detected().map(|j| dets.instances[j].color);
        verdicts.colors.push(ColorVerdict {
            instance: i,
            required,
            detected,
            correct: detected == Some(required),
        });
    }
    for (s, o, kind) in scene.indexed_relations() {
        let detected = match (matching.target(s), matching.target(o)) {
            (Target::Detected(a), Target::Detected(b)) => Some(relations.get(a, b)),
            _ => None,
        };
        verdicts.relations.push(RelationVerdict {
            subject: s,
            object: o,
            kind,
            detected,
            correct: detected.is_some_and(|set| set.contains(kind)),
        });
    }
    let tally = AccTally {
        hits: verdicts.hits(),
        normalizer: normalizer(scene),
    };
    Ok((tally, verdicts))
}

struct Search<'a> {
    /// Same-category detections per prompt instance, in detection order.
    candidates: Vec<Vec<usize>>,
    /// Color hit per (instance, candidate position).
    color_hit: Vec<Vec<bool>>,
    /// Best achievable color hit per instance, ignoring injectivity.
    color_bound: Vec<usize>,
    /// Relations `(other endpoint, kind, instance is subject)` resolved when
    /// the higher-indexed endpoint is assigned, grouped by that endpoint.
    closing: Vec<Vec<(usize, RelationKind, bool)>>,
    /// Relations still open once instances `0..i` are assigned.
    open_after: Vec<usize>,
    relations: &'a RelationMap,
    used: Vec<bool>,
    current: Vec<Target>,
    best: Option<(usize, Vec<Target>)>,
    ceiling: usize,
}

impl Search<'_> {
    fn bound(&self, next: usize, hits: usize) -> usize {
        hits + self.color_bound[next..].iter().sum::<usize>() + self.open_after[next]
    }

    fn closing_hits(&self, i: usize, target: Target) -> usize {
        let Target::Detected(me) = target else { return 0 };
        self.closing[i]
            .iter()
            .filter(|&&(other, kind, i_is_subject)| {
                let Target::Detected(them) = self.current[other] else { return false };
                let set = if i_is_subject {
                    self.relations.get(me, them)
                } else {
                    self.relations.get(them, me)
                };
                set.contains(kind)
            })
            .count()
    }

    fn run(&mut self, i: usize, hits: usize) {
        if let Some((best, _)) = &self.best {
            if *best == self.ceiling || self.bound(i, hits) <= *best {
                return;
            }
        }
        if i == self.current.len() {
            self.best = Some((hits, self.current.clone()));
            return;
        }
        for pos in 0..=self.candidates[i].len() {
            let target = match self.candidates[i].get(pos) {
                Some(&j) if self.used[j] => continue,
                Some(&j) => Target::Detected(j),
                None => Target::Blank,
            };
            let gain = match target {
                Target::Detected(_) => usize::from(self.color_hit[i][pos]),
                Target::Blank => 0,
            };
            self.current[i] = target;
            let gain = gain + self.closing_hits(i, target);
            if let Target::Detected(j) = target {
                self.used[j] = true;
            }
            self.run(i + 1, hits + gain);
            if let Target::Detected(j) = target {
                self.used[j] = false;
            }
            self.current[i] = Target::Blank;
        }
    }
}

/// Matching with the highest Acc over all category-respecting injections.
///
/// Depth-first over prompt instances in canonical order, trying the
/// same-category detections in detection order and then a blank, pruning
/// branches whose optimistic bound cannot beat the incumbent. Among
/// optimal matchings the first one in that order is returned.
pub fn best_matching<T: Scalar>(
    scene: &StructuredScene,
    dets: &DetectionSet<T>,
    relations: &RelationMap,
) -> (Matching, AccTally) {
    let n = scene.total_number();
    let instances = scene.instances();
    let candidates: Vec<Vec<usize>> = instances
        .iter()
        .map(|inst| {
            dets.instances
                .iter()
                .enumerate()
                .filter(|(_, d)| d.category == inst.category)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let color_hit: Vec<Vec<bool>> = instances
        .iter()
        .zip(&candidates)
        .map(|(inst, cands)| {
            cands
                .iter()
                .map(|&j| inst.color == Some(dets.instances[j].color))
                .collect()
        })
        .collect();
    let color_bound = color_hit
        .iter()
        .map(|hits| usize::from(hits.iter().any(|&h| h)))
        .collect();
    let mut closing = vec![Vec::new(); n];
    let mut open_after = vec![0usize; n + 1];
    for (s, o, kind) in scene.indexed_relations() {
        let late = s.max(o);
        closing[late].push((s.min(o), kind, late == s));
        for slot in open_after.iter_mut().take(late + 1) {
            *slot += 1;
        }
    }
    let ceiling = normalizer(scene);
    let mut search = Search {
        candidates,
        color_hit,
        color_bound,
        closing,
        open_after,
        relations,
        used: vec![false; dets.len()],
        current: vec![Target::Blank; n],
        best: None,
        ceiling,
    };
    search.run(0, 0);
    let (hits, targets) = search.best.unwrap_or((0, vec![Target::Blank; n]));
    (
        Matching::new(targets),
        AccTally {
            hits,
            normalizer: ceiling,
        },
    )
}
