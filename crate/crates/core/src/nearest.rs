//! Nearest pair with a nontrivial GCRD via low-rank approximation of the
//! inflated Sylvester matrix.

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gcrd::{numeric_gcrd, prepare, GcrdOptions, GcrdOutcome, PerturbedPair};
use crate::ore::DiffPoly;
use crate::poly::Poly;
use crate::rank::{deflated_rank, RankReport};
use crate::svd::compute_svd;
use crate::sylvester::{build_sylvester, inflate, InflatedMatrix};

/// How polynomial coefficients are read back from a perturbed inflated matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionMode {
    /// Top row of each block.
    FirstRow,
    /// Mean over every row of the block's band.
    Weighted,
}

impl FromStr for ReconstructionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-row" | "first_row" | "firstrow" => Ok(ReconstructionMode::FirstRow),
            "weighted" => Ok(ReconstructionMode::Weighted),
            other => Err(Error::InvalidInput(format!("unknown reconstruction mode `{other}`"))),
        }
    }
}

/// Reads the operator whose `D^k` coefficients live in block row `block_row`
/// of `vtil`, keeping the support of `template`: coefficient `j` of a `D^k`
/// term survives only if `j <= deg_t template_k`, and zero terms stay zero.
fn read_operator(
    vtil: &InflatedMatrix,
    block_row: usize,
    template: &DiffPoly<f64>,
    mode: ReconstructionMode,
) -> DiffPoly<f64> {
    let (br, bc) = (vtil.block_rows(), vtil.block_cols());
    let data = vtil.data();
    let coeffs = template
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let Some(deg) = c.degree() else {
                return Poly::zero();
            };
            let values = (0..=deg)
                .map(|j| match mode {
                    ReconstructionMode::FirstRow => data[(block_row * br, k * bc + j)],
                    ReconstructionMode::Weighted => {
                        let sum: f64 = (0..br).map(|r| data[(block_row * br + r, k * bc + j + r)]).sum();
                        sum / br as f64
                    }
                })
                .collect();
            Poly::new(values)
        })
        .collect();
    DiffPoly::new(coeffs)
}

/// Recovers `(f~, g~)` from a perturbed inflated matrix: `f~` from block row
/// `0` and `g~` from block row `n`. When an operator has no rows of its own
/// (the other one has `D`-degree zero) it is returned unchanged.
pub fn reconstruct_pair(
    vtil: &InflatedMatrix,
    f: &DiffPoly<f64>,
    g: &DiffPoly<f64>,
    mode: ReconstructionMode,
) -> (DiffPoly<f64>, DiffPoly<f64>) {
    let (m, n) = (vtil.m(), vtil.n());
    let ft = if n > 0 {
        read_operator(vtil, 0, f, mode)
    } else {
        f.clone()
    };
    let gt = if m > 0 {
        read_operator(vtil, n, g, mode)
    } else {
        g.clone()
    };
    (ft, gt)
}

/// Rank-truncated inflated matrix together with the data needed to map
/// reconstructions back to the input scale.
#[derive(Clone, Debug)]
pub struct Projection {
    pub rank: RankReport,
    pub singular_values: Vec<f64>,
    deficient: Option<Deficient>,
}

#[derive(Clone, Debug)]
struct Deficient {
    truncated: InflatedMatrix,
    f: DiffPoly<f64>,
    g: DiffPoly<f64>,
    scale_f: f64,
    scale_g: f64,
}

impl Projection {
    pub fn is_coprime(&self) -> bool {
        self.deficient.is_none()
    }

    /// The truncated matrix, absent for full rank.
    pub fn truncated(&self) -> Option<&InflatedMatrix> {
        self.deficient.as_ref().map(|d| &d.truncated)
    }

    /// Reconstructed pair in the input scale, absent for full rank.
    pub fn reconstruct(&self, mode: ReconstructionMode) -> Option<(DiffPoly<f64>, DiffPoly<f64>)> {
        let def = self.deficient.as_ref()?;
        let (ft, gt) = reconstruct_pair(&def.truncated, &def.f, &def.g, mode);
        Some((ft.scale(&def.scale_f), gt.scale(&def.scale_g)))
    }
}

/// Truncates the SVD of the inflated Sylvester matrix to the deflated rank
/// `r`, keeping `r (mu + d + 1)` singular values.
pub fn project(f: &DiffPoly<f64>, g: &DiffPoly<f64>, eps: f64, normalize: bool) -> Result<Projection> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let (fn_, gn, scale_f, scale_g) = prepare(f, g, normalize)?;
    let v = build_sylvester(&fn_, &gn)?;
    let big = inflate(&v);
    let factors = compute_svd(big.data().as_ref())?;
    let rank = deflated_rank(&factors.sigma, eps, v.m(), v.n(), v.d(), v.mu());
    if !rank.separation_ok {
        return Err(Error::SeparationFailure { eps });
    }
    let deficient = if rank.full_rank {
        None
    } else {
        let keep = rank.r * big.block_cols();
        Some(Deficient {
            truncated: big.with_data(factors.truncated(keep))?,
            f: fn_,
            g: gn,
            scale_f,
            scale_g,
        })
    };
    Ok(Projection {
        rank,
        singular_values: factors.sigma,
        deficient,
    })
}

/// Finds a nearby pair with a nontrivial GCRD and computes that GCRD.
///
/// Coprime inputs (full deflated rank) are returned unchanged with zero
/// perturbation.
pub fn nearest_with_gcrd(
    f: &DiffPoly<f64>,
    g: &DiffPoly<f64>,
    opts: &GcrdOptions,
    mode: ReconstructionMode,
) -> Result<GcrdOutcome> {
    let proj = project(f, g, opts.eps, opts.normalize)?;
    finish(&proj, f, g, opts, mode)
}

/// Runs the GCRD step for one reconstruction of an existing projection.
pub fn finish(
    proj: &Projection,
    f: &DiffPoly<f64>,
    g: &DiffPoly<f64>,
    opts: &GcrdOptions,
    mode: ReconstructionMode,
) -> Result<GcrdOutcome> {
    let Some((ft, gt)) = proj.reconstruct(mode) else {
        let mut out = numeric_gcrd(f, g, opts)?;
        out.perturbed = Some(PerturbedPair {
            f: f.clone(),
            g: g.clone(),
            perturbation_f: 0.0,
            perturbation_g: 0.0,
        });
        return Ok(out);
    };
    let perturbation_f = (f - &ft).norm();
    let perturbation_g = (g - &gt).norm();
    let mut out = numeric_gcrd(&ft, &gt, opts)?;
    out.perturbed = Some(PerturbedPair {
        f: ft,
        g: gt,
        perturbation_f,
        perturbation_g,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcrd::{ContentRemoval, OutcomeKind};

    fn op(rows: &[&[f64]]) -> DiffPoly<f64> {
        DiffPoly::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn untouched_matrix_reconstructs_inputs() {
        let f = op(&[&[0.2, 0.3], &[1.0, 0.5], &[1.0]]);
        let g = op(&[&[0.0, 1.0], &[0.7]]);
        let v = build_sylvester(&f, &g).unwrap();
        let big = inflate(&v);
        for mode in [ReconstructionMode::FirstRow, ReconstructionMode::Weighted] {
            let (ft, gt) = reconstruct_pair(&big, &f, &g, mode);
            assert!((&ft - &f).norm() < 1e-15);
            assert!((&gt - &g).norm() < 1e-15);
        }
    }

    #[test]
    fn reconstruction_keeps_the_support() {
        let f = op(&[&[], &[1.0, 0.5]]);
        let g = op(&[&[1.0], &[0.0, 1.0]]);
        let v = build_sylvester(&f, &g).unwrap();
        let big = inflate(&v);
        let noisy = big
            .with_data(faer::Mat::from_fn(big.nrows(), big.ncols(), |i, j| {
                big.data()[(i, j)] + 1e-3 * ((i * 7 + j) as f64).cos()
            }))
            .unwrap();
        let (ft, _) = reconstruct_pair(&noisy, &f, &g, ReconstructionMode::Weighted);
        assert!(ft.coeff(0).is_zero());
        assert_eq!(ft.coeff(1).degree(), Some(1));
    }

    #[test]
    fn exact_common_factor_needs_no_perturbation() {
        let h = op(&[&[0.0, 1.0], &[1.0]]);
        let f = &op(&[&[0.3], &[1.0]]) * &h;
        let g = &op(&[&[0.0, 0.0, 1.0], &[-0.5]]) * &h;
        let opts = GcrdOptions {
            eps: 1e-6,
            content: ContentRemoval::Fft { threshold: 1e-8 },
            normalize: true,
        };
        let out = nearest_with_gcrd(&f, &g, &opts, ReconstructionMode::FirstRow).unwrap();
        assert_eq!(out.kind, OutcomeKind::Found);
        let p = out.perturbed.unwrap();
        assert!(p.perturbation_f <= 1e-8 && p.perturbation_g <= 1e-8);
        assert!((&out.gcrd - &h).norm() < 1e-6, "{}", out.gcrd);
    }

    #[test]
    fn coprime_inputs_are_left_alone() {
        let f = op(&[&[0.0, 1.0], &[1.0]]);
        let g = op(&[&[1.0], &[1.0]]);
        let out = nearest_with_gcrd(&f, &g, &GcrdOptions::default(), ReconstructionMode::Weighted).unwrap();
        assert_eq!(out.kind, OutcomeKind::Coprime);
        assert_eq!(out.perturbed.unwrap().perturbation_f, 0.0);
    }

    #[test]
    fn mode_names() {
        assert_eq!(
            "first-row".parse::<ReconstructionMode>().unwrap(),
            ReconstructionMode::FirstRow
        );
        assert_eq!(
            "weighted".parse::<ReconstructionMode>().unwrap(),
            ReconstructionMode::Weighted
        );
        assert!("middle".parse::<ReconstructionMode>().is_err());
    }
}
