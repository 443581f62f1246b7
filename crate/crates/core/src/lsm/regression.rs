use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Minimal-norm least-squares coefficients of `features * beta ~ targets`.
///
/// The design is reduced with a Householder QR first; the small triangular
/// factor is then solved through its SVD, which handles rank deficiency.
pub fn regress_continuation(features: &DMatrix<f64>, targets: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = features.shape();
    assert_eq!(rows, targets.len(), "feature rows and targets differ in length");
    if rows == 0 {
        return Err(Error::EmptyRegression);
    }
    let qr = features.clone().qr();
    let mut qtb = targets.clone();
    qr.q_tr_mul(&mut qtb);
    let r = qr.r();
    let k = r.nrows();
    let rhs = qtb.rows(0, k).into_owned();

    let svd = r.svd(true, true);
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(DVector::zeros(cols));
    }
    let beta = svd
        .solve(&rhs, RANK_TOLERANCE * largest)
        .expect("svd computed with both factors");
    Ok(beta)
}
