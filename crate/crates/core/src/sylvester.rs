//! Differential Sylvester matrices and their real inflations.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ore::DiffPoly;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::svd::singular_values;

/// Coefficient vector of `f` in the basis `1, D, .., D^(len-1)`.
pub fn psi<S: Scalar>(f: &DiffPoly<S>, len: usize) -> Result<Vec<Poly<S>>> {
    if f.deg_d().is_some_and(|k| k >= len) {
        return Err(Error::InvalidInput(format!(
            "operator of D-degree {} does not fit in {len} slots",
            f.deg_d().unwrap_or(0)
        )));
    }
    Ok((0..len).map(|i| f.coeff(i)).collect())
}

/// Rows `0..n` hold `D^i f`, rows `n..n+m` hold `D^j g`, where `m = deg_D f`
/// and `n = deg_D g`. Its left kernel over `R(t)` encodes the common right
/// divisors of `f` and `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SylvesterMatrix<S> {
    rows: Vec<Vec<Poly<S>>>,
    m: usize,
    n: usize,
    d: usize,
}

pub fn build_sylvester<S: Scalar>(f: &DiffPoly<S>, g: &DiffPoly<S>) -> Result<SylvesterMatrix<S>> {
    let m = f.deg_d().ok_or_else(|| Error::InvalidInput("f is zero".into()))?;
    let n = g.deg_d().ok_or_else(|| Error::InvalidInput("g is zero".into()))?;
    let size = m + n;
    let d = f.deg_t().max(g.deg_t()).unwrap_or(0);
    let mut rows = Vec::with_capacity(size);
    let mut shifted = f.clone();
    for i in 0..n {
        if i > 0 {
            shifted = shifted.d_mul();
        }
        rows.push(psi(&shifted, size)?);
    }
    let mut shifted = g.clone();
    for j in 0..m {
        if j > 0 {
            shifted = shifted.d_mul();
        }
        rows.push(psi(&shifted, size)?);
    }
    Ok(SylvesterMatrix { rows, m, n, d })
}

impl<S: Scalar> SylvesterMatrix<S> {
    /// `D`-degree of `f`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `D`-degree of `g`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m + self.n
    }

    /// Largest `t`-degree of the two inputs, which bounds every entry.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Degree bound `2 (m + n) d` on the cofactors of a GCRD.
    pub fn mu(&self) -> usize {
        2 * self.size() * self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly<S> {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Poly<S>>] {
        &self.rows
    }

    /// Tab-separated rendering, one matrix row per line.
    pub fn to_text(&self) -> String {
        self.rows
            .iter()
            .map(|row| row.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\t"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl SylvesterMatrix<f64> {
    /// Frobenius norm of the entrywise coefficient vectors.
    pub fn frobenius_norm(&self) -> f64 {
        self.rows.iter().flatten().map(Poly::norm2_squared).sum::<f64>().sqrt()
    }

    /// `rows[i][j]` lists the coefficients of entry `(i, j)` in ascending degree.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|p| p.coeffs().to_vec()).collect())
            .collect()
    }
}

/// Banded Toeplitz block of `a`: `(mu+1) x (mu+d+1)` with `a_c` at `(r, r+c)`.
/// Row `r` is the coefficient vector of `t^r a`.
pub fn gamma(a: &Poly<f64>, mu: usize, d: usize) -> Result<Mat<f64>> {
    if a.degree().is_some_and(|k| k > d) {
        return Err(Error::InvalidInput(format!(
            "entry degree {} exceeds block bound {d}",
            a.degree().unwrap_or(0)
        )));
    }
    let mut out = Mat::zeros(mu + 1, mu + d + 1);
    for r in 0..=mu {
        for (c, &v) in a.coeffs().iter().enumerate() {
            out[(r, r + c)] = v;
        }
    }
    Ok(out)
}

/// Real matrix obtained by replacing every entry of a Sylvester matrix with
/// its [`gamma`] block for a cofactor degree bound `mu`.
#[derive(Clone, Debug)]
pub struct InflatedMatrix {
    data: Mat<f64>,
    m: usize,
    n: usize,
    d: usize,
    mu: usize,
}

#[derive(Serialize)]
struct InflatedJson<'a> {
    m: usize,
    n: usize,
    d: usize,
    mu: usize,
    rows: &'a [Vec<f64>],
}

pub fn inflate(v: &SylvesterMatrix<f64>) -> InflatedMatrix {
    inflate_with_bound(v, v.mu())
}

/// Inflation with an explicit cofactor degree bound.
pub fn inflate_with_bound(v: &SylvesterMatrix<f64>, mu: usize) -> InflatedMatrix {
    let (br, bc) = (mu + 1, mu + v.d + 1);
    let size = v.size();
    let mut data = Mat::zeros(size * br, size * bc);
    for (i, row) in v.rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            for r in 0..br {
                for (c, &value) in entry.coeffs().iter().enumerate() {
                    data[(i * br + r, j * bc + r + c)] = value;
                }
            }
        }
    }
    InflatedMatrix {
        data,
        m: v.m,
        n: v.n,
        d: v.d,
        mu,
    }
}

impl InflatedMatrix {
    pub fn data(&self) -> &Mat<f64> {
        &self.data
    }

    /// Same block structure with different entries, e.g. a perturbed copy.
    pub fn with_data(&self, data: Mat<f64>) -> Result<Self> {
        if data.shape() != self.data.shape() {
            return Err(Error::InvalidInput("shape mismatch".into()));
        }
        Ok(InflatedMatrix { data, ..*self })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn block_rows(&self) -> usize {
        self.mu + 1
    }

    pub fn block_cols(&self) -> usize {
        self.mu + self.d + 1
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm_l2()
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(singular_values(self.data.as_ref())?.first().copied().unwrap_or(0.0))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    /// Row-major, whitespace-separated, one matrix row per line.
    pub fn to_text(&self) -> String {
        self.to_rows()
            .iter()
            .map(|row| row.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self.to_rows();
        serde_json::to_value(InflatedJson {
            m: self.m,
            n: self.n,
            d: self.d,
            mu: self.mu,
            rows: &rows,
        })
        .expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: &[&[f64]]) -> DiffPoly<f64> {
        DiffPoly::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn psi_pads_and_rejects_overflow() {
        let f = op(&[&[1.0], &[0.0, 1.0]]);
        let v = psi(&f, 3).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v[2].is_zero());
        assert!(psi(&f, 1).is_err());
    }

    #[test]
    fn first_order_pair() {
        // f = D + t, g = D: rows are [t, 1] and [0, 1].
        let v = build_sylvester(&op(&[&[0.0, 1.0], &[1.0]]), &op(&[&[], &[1.0]])).unwrap();
        assert_eq!(v.size(), 2);
        assert_eq!(v.entry(0, 0), &Poly::t());
        assert_eq!(v.entry(0, 1), &Poly::one());
        assert!(v.entry(1, 0).is_zero());
        assert_eq!((v.d(), v.mu()), (1, 4));
    }

    #[test]
    fn gamma_band() {
        let g = gamma(&Poly::new(vec![1.0, 2.0]), 1, 1).unwrap();
        assert_eq!(g.shape(), (2, 3));
        let expect = [[1.0, 2.0, 0.0], [0.0, 1.0, 2.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(g[(i, j)], x);
            }
        }
        assert!(gamma(&Poly::new(vec![1.0, 2.0, 3.0]), 1, 1).is_err());
        assert_eq!(gamma(&Poly::zero(), 0, 0).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn inflated_shape_and_blocks() {
        let f = op(&[&[0.0, 1.0], &[1.0]]);
        let g = op(&[&[1.0], &[0.0, 0.0, 1.0]]);
        let v = build_sylvester(&f, &g).unwrap();
        let big = inflate(&v);
        let (br, bc) = (big.block_rows(), big.block_cols());
        assert_eq!((br, bc), (9, 11));
        assert_eq!(big.nrows(), 2 * br);
        assert_eq!(big.ncols(), 2 * bc);
        for bi in 0..2 {
            for bj in 0..2 {
                let block = gamma(v.entry(bi, bj), big.mu(), v.d()).unwrap();
                for r in 0..br {
                    for c in 0..bc {
                        assert_eq!(big.data()[(bi * br + r, bj * bc + c)], block[(r, c)]);
                    }
                }
            }
        }
        assert!((big.frobenius_norm() - (br as f64 * 4.0).sqrt()).abs() < 1e-12);
    }
}
