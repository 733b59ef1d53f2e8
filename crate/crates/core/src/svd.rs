//! Dense singular value decompositions, always computed sequentially so that
//! results do not depend on the thread count.

use dyn_stack::{MemBuffer, MemStack};
use faer::diag::Diag;
use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors};
use faer::{Mat, MatRef, Par};

use crate::error::{Error, Result};

/// `A = P * diag(sigma) * Q` with orthogonal `P` (rows x rows) and `Q`
/// (cols x cols); `sigma` is nonincreasing with `min(rows, cols)` entries.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub p: Mat<f64>,
    pub sigma: Vec<f64>,
    pub q: Mat<f64>,
}

impl SvdFactors {
    /// `P * diag(sigma[..keep]) * Q`, the best approximation of rank `keep`.
    pub fn truncated(&self, keep: usize) -> Mat<f64> {
        let keep = keep.min(self.sigma.len());
        let (rows, cols) = (self.p.nrows(), self.q.ncols());
        let mut scaled = Mat::<f64>::zeros(rows, keep);
        for k in 0..keep {
            for i in 0..rows {
                scaled[(i, k)] = self.p[(i, k)] * self.sigma[k];
            }
        }
        if keep == 0 {
            return Mat::zeros(rows, cols);
        }
        &scaled * self.q.as_ref().subrows(0, keep)
    }
}

fn run(a: MatRef<'_, f64>, vectors: ComputeSvdVectors) -> Result<(Vec<f64>, Mat<f64>, Mat<f64>)> {
    let (m, n) = a.shape();
    let size = m.min(n);
    let want = !matches!(vectors, ComputeSvdVectors::No);
    if size == 0 {
        let u = if want { Mat::identity(m, m) } else { Mat::zeros(0, 0) };
        let v = if want { Mat::identity(n, n) } else { Mat::zeros(0, 0) };
        return Ok((Vec::new(), u, v));
    }
    if a.col_iter().flat_map(|c| c.iter().copied()).any(|x| !x.is_finite()) {
        return Err(Error::SvdFailure);
    }
    let mut s = Diag::<f64>::zeros(size);
    let (mut u, mut v) = if want {
        (Mat::<f64>::zeros(m, m), Mat::<f64>::zeros(n, n))
    } else {
        (Mat::zeros(0, 0), Mat::zeros(0, 0))
    };
    let par = Par::Seq;
    let mut mem = MemBuffer::new(svd_scratch::<f64>(m, n, vectors, vectors, par, Default::default()));
    let outcome = svd(
        a,
        s.as_mut(),
        want.then(|| u.as_mut()),
        want.then(|| v.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    );
    outcome.map_err(|_| Error::SvdFailure)?;
    let sigma = s.column_vector().iter().copied().collect();
    Ok((sigma, u, v))
}

pub fn compute_svd(a: MatRef<'_, f64>) -> Result<SvdFactors> {
    let (sigma, u, v) = run(a, ComputeSvdVectors::Full)?;
    Ok(SvdFactors {
        p: u,
        sigma,
        q: v.transpose().to_owned(),
    })
}

/// Singular values only, in nonincreasing order.
pub fn singular_values(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    Ok(run(a, ComputeSvdVectors::No)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat<f64> {
        Mat::from_fn(4, 3, |i, j| ((i * 3 + j) as f64).sin() + if i == j { 2.0 } else { 0.0 })
    }

    #[test]
    fn factors_reconstruct_the_matrix() {
        let a = sample();
        let f = compute_svd(a.as_ref()).unwrap();
        assert_eq!(f.p.shape(), (4, 4));
        assert_eq!(f.q.shape(), (3, 3));
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        let back = f.truncated(3);
        assert!((&back - &a).norm_l2() < 1e-12);
        let sv = singular_values(a.as_ref()).unwrap();
        for (x, y) in sv.iter().zip(&f.sigma) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_error_is_next_singular_value() {
        let a = sample();
        let f = compute_svd(a.as_ref()).unwrap();
        let low = f.truncated(1);
        let rest = singular_values((&a - &low).as_ref()).unwrap();
        assert!((rest[0] - f.sigma[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_one_and_degenerate_shapes() {
        let a = Mat::from_fn(3, 3, |i, j| (i + 1) as f64 * (j + 1) as f64);
        let sv = singular_values(a.as_ref()).unwrap();
        assert!((sv[0] - 14.0).abs() < 1e-12);
        assert!(sv[1] < 1e-12 && sv[2] < 1e-12);
        assert!(singular_values(Mat::<f64>::zeros(0, 3).as_ref()).unwrap().is_empty());
        let zero = singular_values(Mat::<f64>::zeros(2, 2).as_ref()).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
        let mut bad = Mat::<f64>::zeros(2, 2);
        bad[(0, 0)] = f64::NAN;
        assert!(compute_svd(bad.as_ref()).is_err());
    }
}
