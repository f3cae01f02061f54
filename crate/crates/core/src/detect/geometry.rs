use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::RelationKind;

/// Axis-aligned box in pixels, stored by center and size. The y axis grows downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    pub cx: T,
    pub cy: T,
    pub w: T,
    pub h: T,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(cx: T, cy: T, w: T, h: T) -> Result<Self> {
        let finite = cx.is_finite() && cy.is_finite() && w.is_finite() && h.is_finite();
        if !finite || w <= T::zero() || h <= T::zero() {
            return Err(Error::InvalidScene(format!(
                "box ({cx}, {cy}, {w}, {h}) needs finite center and positive size"
            )));
        }
        Ok(BoundingBox { cx, cy, w, h })
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    pub fn min_side(&self) -> T {
        self.w.min(self.h)
    }

    fn span_x(&self) -> (T, T) {
        let half = self.w / T::of(2.0);
        (self.cx - half, self.cx + half)
    }

    fn span_y(&self) -> (T, T) {
        let half = self.h / T::of(2.0);
        (self.cy - half, self.cy + half)
    }

    pub fn scaled(&self, factor: T) -> Self {
        BoundingBox {
            cx: self.cx * factor,
            cy: self.cy * factor,
            w: self.w * factor,
            h: self.h * factor,
        }
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.cx, self.cy, self.w, self.h]
    }
}

/// Intersection over union.
pub fn iou<T: Scalar>(a: &BoundingBox<T>, b: &BoundingBox<T>) -> T {
    let (ax0, ax1) = a.span_x();
    let (bx0, bx1) = b.span_x();
    let (ay0, ay1) = a.span_y();
    let (by0, by1) = b.span_y();
    let iw = (ax1.min(bx1) - ax0.max(bx0)).max(T::zero());
    let ih = (ay1.min(by1) - ay0.max(by0)).max(T::zero());
    let inter = iw * ih;
    if inter <= T::zero() {
        return T::zero();
    }
    let union = a.area() + b.area() - inter;
    (inter / union).min(T::one())
}

/// Subset of the four relation kinds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);

    fn bit(kind: RelationKind) -> u8 {
        1 << RelationKind::ALL.iter().position(|k| *k == kind).expect("kind listed")
    }

    pub fn insert(&mut self, kind: RelationKind) {
        self.0 |= Self::bit(kind);
    }

    pub fn contains(&self, kind: RelationKind) -> bool {
        self.0 & Self::bit(kind) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = RelationKind> + '_ {
        RelationKind::ALL.into_iter().filter(|k| self.contains(*k))
    }

    /// The set seen from the other instance of the pair.
    pub fn inverse(&self) -> RelationSet {
        self.iter().map(RelationKind::inverse).collect()
    }
}

impl FromIterator<RelationKind> for RelationSet {
    fn from_iter<I: IntoIterator<Item = RelationKind>>(iter: I) -> Self {
        let mut set = RelationSet::EMPTY;
        for k in iter {
            set.insert(k);
        }
        set
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Kinds describing `subject` relative to `object` under offset coefficient `c`.
///
/// The subject is right of the object iff `x_s > x_o + c(w_s + w_o)`, left
/// iff `x_s < x_o - c(w_s + w_o)`, below iff `y_s > y_o + c(h_s + h_o)` and
/// above iff `y_s < y_o - c(h_s + h_o)`.
pub fn relation_between<T: Scalar>(subject: &BoundingBox<T>, object: &BoundingBox<T>, c: T) -> RelationSet {
    let mut set = RelationSet::EMPTY;
    let dx = c * (subject.w + object.w);
    let dy = c * (subject.h + object.h);
    // center differences keep the test exactly antisymmetric under swapping
    let ox = subject.cx - object.cx;
    let oy = subject.cy - object.cy;
    if ox > dx {
        set.insert(RelationKind::Right);
    } else if ox < -dx {
        set.insert(RelationKind::Left);
    }
    if oy > dy {
        set.insert(RelationKind::Below);
    } else if oy < -dy {
        set.insert(RelationKind::Above);
    }
    set
}
