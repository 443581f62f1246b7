use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::models::ModelKind;

/// Regression basis: a constant, normalized spot `s = S/K`, the variances,
/// their squares and cross terms.
///
/// * Heston: `[1, s, s^2, v, v^2, s v]`
/// * double Heston: `[1, s, s^2, v1, v1^2, v2, v2^2, s v1, s v2, v1 v2]`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub model_kind: ModelKind,
    /// Include `v1 v2` for the two-factor basis.
    pub variance_cross: bool,
}

impl BasisSpec {
    pub fn new(model_kind: ModelKind) -> Self {
        Self {
            model_kind,
            variance_cross: true,
        }
    }

    pub fn feature_count(&self) -> usize {
        match self.model_kind {
            ModelKind::Heston => 6,
            ModelKind::DoubleHeston if self.variance_cross => 10,
            ModelKind::DoubleHeston => 9,
        }
    }
}

/// State of a set of paths on one date.
#[derive(Clone, Copy, Debug)]
pub struct CrossSection<'a> {
    pub asset: &'a [f64],
    pub variance_1: &'a [f64],
    pub variance_2: Option<&'a [f64]>,
}

/// One row per path.
pub fn build_features(cs: &CrossSection<'_>, strike: f64, basis: &BasisSpec) -> DMatrix<f64> {
    let n = cs.asset.len();
    let p = basis.feature_count();
    let mut x = DMatrix::<f64>::zeros(n, p);
    let inv_k = 1.0 / strike;
    {
        // Column-major storage: column j occupies data[j * n .. (j + 1) * n].
        let data = x.as_mut_slice();
        let (c0, rest) = data.split_at_mut(n);
        let (c1, rest) = rest.split_at_mut(n);
        let (c2, rest) = rest.split_at_mut(n);
        c0.fill(1.0);
        for i in 0..n {
            let s = cs.asset[i] * inv_k;
            c1[i] = s;
            c2[i] = s * s;
        }
        let v1 = cs.variance_1;
        match (basis.model_kind, cs.variance_2) {
            (ModelKind::Heston, _) => {
                for i in 0..n {
                    let (s, v) = (c1[i], v1[i]);
                    rest[i] = v;
                    rest[n + i] = v * v;
                    rest[2 * n + i] = s * v;
                }
            }
            (ModelKind::DoubleHeston, Some(v2)) => {
                for i in 0..n {
                    let (s, a, b) = (c1[i], v1[i], v2[i]);
                    rest[i] = a;
                    rest[n + i] = a * a;
                    rest[2 * n + i] = b;
                    rest[3 * n + i] = b * b;
                    rest[4 * n + i] = s * a;
                    rest[5 * n + i] = s * b;
                    if basis.variance_cross {
                        rest[6 * n + i] = a * b;
                    }
                }
            }
            (ModelKind::DoubleHeston, None) => {
                panic!("two-factor basis requires a second variance column")
            }
        }
    }
    x
}
