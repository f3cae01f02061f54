//! `z(x, c) = A x + E(c)`, `z(x, none) = A x`.
//!
//! Fixture file:
//!
//! ```json
//! {"schema":"scenebench/toy-denoiser","version":1,
//!  "matrix":[[0.5,0.0],[0.0,0.25]],
//!  "embeddings":{"king":[1.0,1.0],"man":[1.0,0.0]}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Denoiser;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scene::format::{from_document, FORMAT_VERSION};

pub const TOY_SCHEMA: &str = "scenebench/toy-denoiser";

#[derive(Debug, Clone, PartialEq)]
pub struct ToyDenoiser<T> {
    matrix: Vec<Vec<T>>,
    embeddings: BTreeMap<String, Vec<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToyFile {
    schema: String,
    version: u32,
    matrix: Vec<Vec<f64>>,
    embeddings: BTreeMap<String, Vec<f64>>,
}

impl<T: Scalar> ToyDenoiser<T> {
    pub fn new(matrix: Vec<Vec<T>>, embeddings: BTreeMap<String, Vec<T>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Config("toy denoiser matrix is empty".into()));
        }
        for row in &matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for (name, e) in &embeddings {
            if e.len() != n {
                return Err(Error::Config(format!(
                    "embedding `{name}` has dimension {}, matrix is {n}x{n}",
                    e.len()
                )));
            }
        }
        let finite = |v: &[T]| v.iter().all(|x| x.is_finite());
        if !matrix.iter().all(|r| finite(r)) || !embeddings.values().all(|e| finite(e)) {
            return Err(Error::Config("toy denoiser contains non-finite values".into()));
        }
        Ok(ToyDenoiser { matrix, embeddings })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ToyFile = from_document(text)?;
        if file.schema != TOY_SCHEMA {
            return Err(Error::parse(1, "schema", format!("expected `{TOY_SCHEMA}`")));
        }
        if file.version != FORMAT_VERSION {
            return Err(Error::parse(1, "version", format!("unsupported version {}", file.version)));
        }
        let conv = |v: Vec<f64>| v.into_iter().map(T::of).collect::<Vec<T>>();
        ToyDenoiser::new(
            file.matrix.into_iter().map(conv).collect(),
            file.embeddings.into_iter().map(|(k, v)| (k, conv(v))).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let conv = |v: &Vec<T>| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        let file = ToyFile {
            schema: TOY_SCHEMA.into(),
            version: FORMAT_VERSION,
            matrix: self.matrix.iter().map(conv).collect(),
            embeddings: self.embeddings.iter().map(|(k, v)| (k.clone(), conv(v))).collect(),
        };
        serde_json::to_string_pretty(&file).expect("toy serializes") + "\n"
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn embedding(&self, cond: &str) -> Result<&[T]> {
        self.embeddings
            .get(cond)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Config(format!("no embedding for condition `{cond}`")))
    }

    pub fn conditions(&self) -> impl Iterator<Item = &str> {
        self.embeddings.keys().map(String::as_str)
    }
}

impl<T: Scalar> Denoiser<T> for ToyDenoiser<T> {
    fn dim(&self) -> usize {
        self.matrix.len()
    }

    fn predict(&self, x: &[T], _t: usize, cond: Option<&str>) -> Result<Vec<T>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut z: Vec<T> = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect();
        if let Some(c) = cond {
            for (zi, &ei) in z.iter_mut().zip(self.embedding(c)?) {
                *zi += ei;
            }
        }
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::{denoise_loop, GuidanceSpec};

    fn toy() -> ToyDenoiser<f64> {
        ToyDenoiser::new(
            vec![vec![0.5, 0.1], vec![0.0, 0.25]],
            [("a".to_string(), vec![1.0, -2.0]), ("b".to_string(), vec![0.5, 0.5])].into(),
        )
        .unwrap()
    }

    #[test]
    fn single_cfg_step_closed_form() {
        let toy = toy();
        let x0 = [2.0, 4.0];
        let eta = 0.1;
        let states = denoise_loop(&toy, &GuidanceSpec::cfg("a", 1.0), &x0, 1, eta).unwrap();
        // x0 - eta (A x0 + E(a))
        let want = [2.0 - eta * (1.4 + 1.0), 4.0 - eta * (1.0 - 2.0)];
        assert_eq!(states.len(), 2);
        for (g, w) in states[1].iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip() {
        let t = toy();
        assert_eq!(ToyDenoiser::<f64>::from_json(&t.to_json()).unwrap(), t);
        let bad = t.to_json().replace("1.0,\n      -2.0", "1.0");
        assert!(ToyDenoiser::<f64>::from_json(&bad).is_err());
    }

    #[test]
    fn loop_errors() {
        let t = toy();
        assert!(denoise_loop(&t, &GuidanceSpec::cfg("a", 1.0), &[0.0, 0.0], 0, 0.1).is_err());
        assert!(denoise_loop(&t, &GuidanceSpec::cfg("zzz", 1.0), &[0.0, 0.0], 1, 0.1).is_err());
        assert!(matches!(
            denoise_loop(&t, &GuidanceSpec::cfg("a", 1.0), &[0.0], 1, 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            denoise_loop(&t, &GuidanceSpec::cfg("a", 1e308), &[0.0, 0.0], 3, 1e10),
            Err(Error::NonFinite { step: 1 })
        ));
    }
}
