//! Numeric GCRD: degree from the deflated rank, divisor from a structured
//! left null vector of the inflated Sylvester matrix.

use faer::Mat;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fft::approx_divide;
use crate::ore::DiffPoly;
use crate::poly::Poly;
use crate::rank::{deflated_rank, RankReport};
use crate::svd::{compute_svd, singular_values};
use crate::sylvester::{build_sylvester, inflate, inflate_with_bound, SylvesterMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContentRemoval {
    None,
    /// FFT division by the leading coefficient. Scalar coefficients below
    /// `threshold` are treated as zero.
    Fft {
        threshold: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GcrdOptions {
    pub eps: f64,
    pub content: ContentRemoval,
    /// Scale both inputs to unit norm first.
    pub normalize: bool,
}

impl Default for GcrdOptions {
    fn default() -> Self {
        GcrdOptions {
            eps: 1e-3,
            content: ContentRemoval::Fft { threshold: 1e-8 },
            normalize: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Coprime,
    Found,
}

/// Perturbed inputs that share the reported divisor, in the input scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedPair {
    pub f: DiffPoly<f64>,
    pub g: DiffPoly<f64>,
    pub perturbation_f: f64,
    pub perturbation_g: f64,
}

#[derive(Clone, Debug)]
pub struct GcrdOutcome {
    pub kind: OutcomeKind,
    pub degree: usize,
    /// The divisor; `1` for coprime inputs.
    pub gcrd: DiffPoly<f64>,
    /// Divisor before content removal.
    pub unreduced: Option<DiffPoly<f64>>,
    /// `(u, v)` with `u f + v g` agreeing with `unreduced` up to `residual`.
    pub cofactors: Option<(DiffPoly<f64>, DiffPoly<f64>)>,
    /// Largest coefficient norm of `u f + v g` above `D^degree`.
    pub residual: Option<f64>,
    /// Cofactor degree bound at which the null vector was found.
    pub bound: Option<usize>,
    /// Some coefficient division left a relative residual above one tenth.
    pub content_inexact: bool,
    pub rank: RankReport,
    pub singular_values: Vec<f64>,
    pub perturbed: Option<PerturbedPair>,
}

impl GcrdOutcome {
    fn coprime(rank: RankReport, singular_values: Vec<f64>) -> Self {
        GcrdOutcome {
            kind: OutcomeKind::Coprime,
            degree: 0,
            gcrd: DiffPoly::one(),
            unreduced: None,
            cofactors: None,
            residual: None,
            bound: None,
            content_inexact: false,
            rank,
            singular_values,
            perturbed: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "kind": self.kind,
            "degree": self.degree,
            "gcrd": diffpoly_json(&self.gcrd),
            "gcrd_text": self.gcrd.to_string(),
            "residual": self.residual,
            "perturbation_f": self.perturbed.as_ref().map(|p| p.perturbation_f),
            "perturbation_g": self.perturbed.as_ref().map(|p| p.perturbation_g),
            "singular_values": self.singular_values,
            "rank": self.rank,
            "bound": self.bound,
            "content_inexact": self.content_inexact,
        });
        if let Some(p) = &self.perturbed {
            out["f_tilde"] = diffpoly_json(&p.f);
            out["g_tilde"] = diffpoly_json(&p.g);
        }
        if let Some(u) = &self.unreduced {
            out["unreduced"] = diffpoly_json(u);
        }
        out
    }
}

/// `{"dvar": "D", "tvar": "t", "coeffs": [[..], ..]}` with `coeffs[i][j]`
/// multiplying `t^j D^i`.
pub fn diffpoly_json(f: &DiffPoly<f64>) -> Value {
    let coeffs: Vec<Vec<f64>> = f.coeffs().iter().map(|c| c.coeffs().to_vec()).collect();
    json!({ "dvar": "D", "tvar": "t", "coeffs": coeffs })
}

/// A left null vector of `V` expressed as polynomial entries.
#[derive(Clone, Debug)]
pub struct NullVector {
    /// Degree bound of the entries.
    pub bound: usize,
    /// Dimension of the numerical left kernel at that bound.
    pub nullity: usize,
    /// Unit-norm coefficient vector, one polynomial per row of `V`.
    pub entries: Vec<Poly<f64>>,
}

#[derive(Clone, Debug)]
pub struct GcrdSystemSolution {
    pub bound: usize,
    pub u: DiffPoly<f64>,
    pub v: DiffPoly<f64>,
    /// Terms `D^0 .. D^degree` of `u f + v g`, scaled so that the largest
    /// coefficient norm is one and the leading scalar of the top coefficient
    /// is positive.
    pub gcrd: DiffPoly<f64>,
    /// Largest coefficient norm of `u f + v g` above the target degree, same scale.
    pub residual: f64,
}

/// Splits a stacked coefficient vector into polynomials of `block` coefficients.
fn devectorize(w: &[f64], block: usize) -> Vec<Poly<f64>> {
    w.chunks(block).map(|c| Poly::new(c.to_vec())).collect()
}

/// `w^T V` evaluated with polynomial entries, as an operator in `D`.
fn combine(v: &SylvesterMatrix<f64>, w: &[Poly<f64>]) -> DiffPoly<f64> {
    let size = v.size();
    let mut cols = vec![Poly::zero(); size];
    for (wi, row) in w.iter().zip(v.rows()) {
        if wi.is_zero() {
            continue;
        }
        for (acc, entry) in cols.iter_mut().zip(row) {
            *acc = &*acc + &(wi * entry);
        }
    }
    DiffPoly::new(cols)
}

fn operator_from(entries: &[Poly<f64>]) -> DiffPoly<f64> {
    DiffPoly::new(entries.to_vec())
}

/// Left singular vectors of `a` whose padded singular value is at most `tol`.
fn small_left_space(a: &Mat<f64>, tol: f64) -> Result<Mat<f64>> {
    let rows = a.nrows();
    if a.ncols() == 0 {
        return Ok(Mat::identity(rows, rows));
    }
    let f = compute_svd(a.as_ref())?;
    let small: Vec<usize> = (0..rows)
        .filter(|&i| f.sigma.get(i).copied().unwrap_or(0.0) <= tol)
        .collect();
    Ok(Mat::from_fn(rows, small.len(), |i, j| f.p[(i, small[j])]))
}

/// Finds cofactors `u, v` whose combination `u f + v g` vanishes above
/// `D^degree`, scanning cofactor degree bounds `0, 1, .., mu`.
///
/// At each bound the columns of the inflated matrix are split into those for
/// `D^0 .. D^degree` and the rest. A vector in the numerical left kernel of the
/// second group that does not annihilate the first yields `c(t) * G` for the
/// GCRD `G`; the smallest bound gives the smallest content `c`.
pub fn solve_gcrd_system(v: &SylvesterMatrix<f64>, degree: usize, tol: f64) -> Result<GcrdSystemSolution> {
    let size = v.size();
    if degree >= size {
        return Err(Error::InvalidInput(format!(
            "target degree {degree} must be below {size}"
        )));
    }
    for bound in 0..=v.mu() {
        let big = inflate_with_bound(v, bound);
        let keep = (degree + 1) * big.block_cols();
        let data = big.data();
        let low = data.as_ref().subcols(0, keep).to_owned();
        let high = data.as_ref().subcols(keep, data.ncols() - keep).to_owned();
        let z = small_left_space(&high, tol)?;
        if z.ncols() == 0 {
            continue;
        }
        let y = z.transpose() * &low;
        let fy = compute_svd(y.as_ref())?;
        if fy.sigma.first().copied().unwrap_or(0.0) <= tol {
            continue;
        }
        let a = fy.p.col(0);
        let w = &z * a;
        let w: Vec<f64> = w.iter().copied().collect();
        let entries = devectorize(&w, big.block_rows());
        let full = combine(v, &entries);
        let mut g = full.truncate_d(degree);
        let residual = full
            .coeffs()
            .iter()
            .skip(degree + 1)
            .map(Poly::norm2)
            .fold(0.0, f64::max);
        let scale = g.max_coeff_norm();
        if scale <= f64::EPSILON {
            continue;
        }
        let lead = g.coeff(degree);
        let sign = match lead.leading_coeff() {
            Some(&c) if c < 0.0 => -1.0,
            _ => 1.0,
        };
        let factor = sign / scale;
        g = g.scale(&factor);
        let (u_part, v_part) = entries.split_at(v.n());
        return Ok(GcrdSystemSolution {
            bound,
            u: operator_from(u_part).scale(&factor),
            v: operator_from(v_part).scale(&factor),
            gcrd: g,
            residual: residual / scale,
        });
    }
    Err(Error::ExtractionFailure { degree })
}

/// First left null vector of the inflated matrix over increasing degree
/// bounds; its entries have the smallest possible degree.
pub fn minimal_left_nullvector(v: &SylvesterMatrix<f64>, tol: f64) -> Result<NullVector> {
    for bound in 0..=v.mu() {
        let big = inflate_with_bound(v, bound);
        let kernel = small_left_space(big.data(), tol)?;
        if kernel.ncols() > 0 {
            let w: Vec<f64> = kernel.col(0).iter().copied().collect();
            return Ok(NullVector {
                bound,
                nullity: kernel.ncols(),
                entries: devectorize(&w, big.block_rows()),
            });
        }
    }
    Err(Error::ExtractionFailure { degree: 0 })
}

/// Result of dividing a divisor by its leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ContentRemoved {
    /// Divisor with top coefficient exactly `1`.
    pub primitive: DiffPoly<f64>,
    pub inexact: bool,
}

/// Divides every coefficient of `g` by its top coefficient through FFT
/// division, setting the top coefficient to `1`.
pub fn remove_content_fft(g: &DiffPoly<f64>, threshold: f64) -> Result<ContentRemoved> {
    let degree = g.deg_d().ok_or(Error::DivisionByZero)?;
    let lead = g.coeff(degree);
    let mut inexact = false;
    let mut coeffs = Vec::with_capacity(degree + 1);
    for i in 0..degree {
        let q = approx_divide(&g.coeff(i), &lead, threshold)?;
        inexact |= q.inexact;
        coeffs.push(q.quotient);
    }
    coeffs.push(Poly::one());
    Ok(ContentRemoved {
        primitive: DiffPoly::new(coeffs),
        inexact,
    })
}

fn check_input(f: &DiffPoly<f64>, name: &str) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvalidInput(format!("{name} is zero")));
    }
    let finite = f.coeffs().iter().all(|c| c.coeffs().iter().all(|x| x.is_finite()));
    if !finite {
        return Err(Error::InvalidInput(format!("{name} has non-finite coefficients")));
    }
    Ok(())
}

/// Normalized copies of `f, g` with the norms used, or the inputs unchanged.
pub(crate) fn prepare(
    f: &DiffPoly<f64>,
    g: &DiffPoly<f64>,
    normalize: bool,
) -> Result<(DiffPoly<f64>, DiffPoly<f64>, f64, f64)> {
    check_input(f, "f")?;
    check_input(g, "g")?;
    if normalize {
        Ok((f.normalize()?, g.normalize()?, f.norm(), g.norm()))
    } else {
        Ok((f.clone(), g.clone(), 1.0, 1.0))
    }
}

/// Approximate GCRD of `f` and `g` at tolerance `opts.eps`.
pub fn numeric_gcrd(f: &DiffPoly<f64>, g: &DiffPoly<f64>, opts: &GcrdOptions) -> Result<GcrdOutcome> {
    if !(opts.eps.is_finite() && opts.eps > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let (f, g, _, _) = prepare(f, g, opts.normalize)?;
    let v = build_sylvester(&f, &g)?;
    let sigma = singular_values(inflate(&v).data().as_ref())?;
    let rank = deflated_rank(&sigma, opts.eps, v.m(), v.n(), v.d(), v.mu());
    if !rank.separation_ok {
        return Err(Error::SeparationFailure { eps: opts.eps });
    }
    if rank.full_rank {
        return Ok(GcrdOutcome::coprime(rank, sigma));
    }
    let degree = rank.gcrd_degree(v.size());
    if degree > v.m().min(v.n()) {
        return Err(Error::RejectedCandidate(format!(
            "degree {degree} exceeds min(deg f, deg g) = {}",
            v.m().min(v.n())
        )));
    }
    let sol = solve_gcrd_system(&v, degree, opts.eps)?;
    let (gcrd, inexact) = match opts.content {
        ContentRemoval::None => (sol.gcrd.clone(), false),
        ContentRemoval::Fft { threshold } => {
            // Coefficients at the noise level of the null vector are artifacts.
            let artifact = threshold.max(opts.eps / ((v.mu() + v.d() + 1) as f64).sqrt());
            let cleaned = sol.gcrd.clean(artifact);
            let lead_deg = cleaned.coeff(degree).degree();
            let too_low = cleaned.coeffs()[..degree]
                .iter()
                .any(|c| c.degree().is_some() && c.degree() < lead_deg);
            if lead_deg.is_none() || too_low {
                return Err(Error::RejectedCandidate(
                    "a lower coefficient has smaller t-degree than the leading one".into(),
                ));
            }
            let removed = remove_content_fft(&cleaned, artifact)?;
            (removed.primitive, removed.inexact)
        }
    };
    Ok(GcrdOutcome {
        kind: OutcomeKind::Found,
        degree,
        gcrd,
        unreduced: Some(sol.gcrd),
        cofactors: Some((sol.u, sol.v)),
        residual: Some(sol.residual),
        bound: Some(sol.bound),
        content_inexact: inexact,
        rank,
        singular_values: sigma,
        perturbed: None,
    })
}
