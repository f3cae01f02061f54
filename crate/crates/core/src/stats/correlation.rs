use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn paired<T: Scalar>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Undefined("correlation needs at least 2 pairs".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Undefined("correlation input contains non-finite values".into()));
    }
    Ok(())
}

/// Running mean; exact when every value is equal.
pub(crate) fn mean<T: Scalar>(v: &[T]) -> T {
    let mut m = T::zero();
    for (k, &x) in v.iter().enumerate() {
        m += (x - m) / T::of_usize(k + 1);
    }
    m
}

/// Pearson's r. Constant series are an error.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    paired(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::Undefined("correlation of a constant series".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite input"));
    let mut ranks = vec![T::zero(); v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1
        let avg = T::of_usize(i + j + 2) / T::of(2.0);
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson's r of the average ranks.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    paired(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall's tau-b (tie-adjusted).
pub fn kendall_tau<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    paired(x, y)?;
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).expect("finite input");
            let dy = y[i].partial_cmp(&y[j]).expect("finite input");
            use std::cmp::Ordering::Equal;
            match (dx == Equal, dy == Equal) {
                (true, true) => {
                    tied_x += 1;
                    tied_y += 1;
                }
                (true, false) => tied_x += 1,
                (false, true) => tied_y += 1,
                (false, false) if dx == dy => concordant += 1,
                (false, false) => discordant += 1,
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let denom = ((pairs - tied_x) as f64) * ((pairs - tied_y) as f64);
    if denom == 0.0 {
        return Err(Error::Undefined("correlation of a constant series".into()));
    }
    Ok(T::of((concordant - discordant) as f64 / denom.sqrt()))
}

/// Krippendorff's alpha at the interval level.
///
/// `ratings[coder][unit]`, `None` for a missing rating. Units with fewer
/// than two ratings are not pairable and are skipped.
pub fn krippendorff_alpha<T: Scalar>(ratings: &[Vec<Option<T>>]) -> Result<T> {
    let units = ratings.first().map_or(0, Vec::len);
    for row in ratings {
        if row.len() != units {
            return Err(Error::DimensionMismatch {
                expected: units,
                got: row.len(),
            });
        }
    }
    let mut pairable: Vec<Vec<T>> = Vec::new();
    for u in 0..units {
        let values: Vec<T> = ratings.iter().filter_map(|row| row[u]).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Undefined("rating is not finite".into()));
        }
        if values.len() >= 2 {
            pairable.push(values);
        }
    }
    let n: usize = pairable.iter().map(Vec::len).sum();
    if n < 2 {
        return Err(Error::Undefined("fewer than 2 pairable ratings".into()));
    }

    // observed disagreement within units
    let mut observed = T::zero();
    for values in &pairable {
        let mut s = T::zero();
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                s += (a - b) * (a - b);
            }
        }
        observed += T::of(2.0) * s / T::of_usize(values.len() - 1);
    }
    observed /= T::of_usize(n);

    // expected disagreement over all pairable values: sum_{i != j} (v_i - v_j)^2 = 2 n sum (v_i - mean)^2
    let all: Vec<T> = pairable.iter().flatten().copied().collect();
    let m = mean(&all);
    let spread = all.iter().fold(T::zero(), |acc, &v| acc + (v - m) * (v - m));
    let expected = T::of(2.0) * T::of_usize(n) * spread / (T::of_usize(n) * T::of_usize(n - 1));
    if expected == T::zero() {
        return Err(Error::Undefined("alpha is undefined when every rating is the same".into()));
    }
    Ok(T::one() - observed / expected)
}

/// Per-item mean over the annotators who rated it.
pub fn mean_ratings<T: Scalar>(ratings: &[Vec<Option<T>>]) -> Result<Vec<Option<T>>> {
    let units = ratings.first().map_or(0, Vec::len);
    if let Some(row) = ratings.iter().find(|r| r.len() != units) {
        return Err(Error::DimensionMismatch {
            expected: units,
            got: row.len(),
        });
    }
    Ok((0..units)
        .map(|u| {
            let values: Vec<T> = ratings.iter().filter_map(|r| r[u]).collect();
            (!values.is_empty()).then(|| mean(&values))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: T,
}

pub fn sample_moments<T: Scalar>(values: &[T]) -> Result<Moments<T>> {
    if values.len() < 2 {
        return Err(Error::Undefined("standard deviation needs at least 2 runs".into()));
    }
    let m = mean(values);
    let ss = values.iter().fold(T::zero(), |acc, &v| acc + (v - m) * (v - m));
    Ok(Moments {
        mean: m,
        sd: (ss / T::of_usize(values.len() - 1)).sqrt(),
    })
}
