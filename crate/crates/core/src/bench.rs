//! Randomized experiments: pairs with a planted common right factor are
//! perturbed and the nearest pair with a nontrivial GCRD is recovered.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gcrd::{ContentRemoval, GcrdOptions, OutcomeKind};
use crate::nearest::{finish, project, ReconstructionMode};
use crate::ore::DiffPoly;
use crate::poly::Poly;

/// Environment variable that caps the worker threads used by the harness.
pub const THREADS_ENV: &str = "ORE_GCRD_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Factors with unit-norm coefficient polynomials; inputs are not rescaled.
    Bounded,
    /// Products scaled to unit norm before noise is added.
    Normalized,
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bounded" => Ok(Protocol::Bounded),
            "normalized" => Ok(Protocol::Normalized),
            other => Err(Error::InvalidInput(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub trials: usize,
    /// Tolerance handed to the nearest-pair search.
    pub rho: f64,
    /// Norm of the noise added to each input.
    pub delta: f64,
    pub seed: u64,
    /// Factors have `D`-degree in `1..=max_d_degree`.
    pub max_d_degree: usize,
    /// Factors have `t`-degree in `0..=max_t_degree`.
    pub max_t_degree: usize,
    /// Whether the solver rescales its inputs to unit norm.
    pub normalize: bool,
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, rho: f64, delta: f64) -> Self {
        ExperimentConfig {
            protocol,
            trials: 100,
            rho,
            delta,
            seed: 0,
            max_d_degree: 2,
            max_t_degree: 2,
            normalize: protocol == Protocol::Normalized,
        }
    }
}

/// Outcome of one trial. Perturbations are `||f^ - f~||` and `||g^ - g~||`
/// between the noisy inputs and the reconstructed pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub planted_degree: usize,
    pub found_degree: Option<usize>,
    pub trivial: bool,
    pub first_row_f: Option<f64>,
    pub first_row_g: Option<f64>,
    pub weighted_f: Option<f64>,
    pub weighted_g: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuantityStats {
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation; zero for a single sample.
    pub stddev: f64,
}

impl QuantityStats {
    pub fn from_samples(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let stddev = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(QuantityStats { max, mean, stddev })
    }
}

/// Statistics over the non-trivial trials; `used + trivial_count = trials`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub first_row_f: Option<QuantityStats>,
    pub first_row_g: Option<QuantityStats>,
    pub weighted_f: Option<QuantityStats>,
    pub weighted_g: Option<QuantityStats>,
    pub trivial_count: usize,
    pub used: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: ExperimentConfig,
    pub stats: TrialStats,
    pub records: Vec<TrialRecord>,
}

pub const CSV_HEADER: &str = "rho,delta,reconstruction,max,mean,stddev,trivial_count,trials";

pub const TRIAL_LOG_HEADER: &str =
    "rho,delta,index,planted_degree,found_degree,trivial,first_row_f,first_row_g,weighted_f,weighted_g,error";

impl SuiteReport {
    fn quantities(&self) -> [(&'static str, Option<QuantityStats>); 4] {
        let s = &self.stats;
        [
            ("f", s.first_row_f),
            ("g", s.first_row_g),
            ("f_w", s.weighted_f),
            ("g_w", s.weighted_g),
        ]
    }

    /// One CSV line per reconstructed quantity, without the header.
    pub fn csv_rows(&self) -> Vec<String> {
        let fmt = |x: Option<f64>| x.map_or_else(|| "NaN".to_string(), |v| format!("{v:e}"));
        self.quantities()
            .iter()
            .map(|(name, q)| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    self.config.rho,
                    self.config.delta,
                    name,
                    fmt(q.map(|q| q.max)),
                    fmt(q.map(|q| q.mean)),
                    fmt(q.map(|q| q.stddev)),
                    self.stats.trivial_count,
                    self.stats.trials
                )
            })
            .collect()
    }

    pub fn text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "protocol={:?} rho={} delta={} trials={} trivial={}",
            self.config.protocol, self.config.rho, self.config.delta, self.stats.trials, self.stats.trivial_count
        );
        for (name, q) in self.quantities() {
            match q {
                Some(q) => {
                    let _ = writeln!(
                        out,
                        "  {name:<4} max {:.6}  mean {:.6}  stddev {:.6}",
                        q.max, q.mean, q.stddev
                    );
                }
                None => {
                    let _ = writeln!(out, "  {name:<4} no non-trivial trials");
                }
            }
        }
        out
    }

    /// Per-trial log lines in the [`TRIAL_LOG_HEADER`] layout, without the header.
    pub fn trial_log_csv(&self) -> String {
        let mut out = String::new();
        let fmt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:e}"));
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                self.config.rho,
                self.config.delta,
                r.index,
                r.planted_degree,
                r.found_degree.map_or_else(String::new, |d| d.to_string()),
                r.trivial,
                fmt(r.first_row_f),
                fmt(r.first_row_g),
                fmt(r.weighted_f),
                fmt(r.weighted_g),
                r.error.as_deref().unwrap_or("").replace(',', ";")
            );
        }
        out
    }
}

/// Random factor with `D`-degree uniform in `1..=max_d` and a common
/// `t`-degree uniform in `0..=max_t`; coefficients uniform in `[-1, 1]`.
pub fn random_factor<R: Rng>(rng: &mut R, max_d: usize, max_t: usize) -> DiffPoly<f64> {
    let dd = rng.random_range(1..=max_d.max(1));
    let dt = rng.random_range(0..=max_t);
    let rows = (0..=dd)
        .map(|_| (0..=dt).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    DiffPoly::from_rows(rows)
}

/// Adds noise of Euclidean norm exactly `delta`, drawn uniformly on the
/// nonzero scalar coefficients of `f`; structural zeros stay zero.
pub fn add_uniform_noise<R: Rng>(f: &DiffPoly<f64>, delta: f64, rng: &mut R) -> DiffPoly<f64> {
    let noise: Vec<Vec<f64>> = f
        .coeffs()
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .map(|&x| if x != 0.0 { rng.random_range(-1.0..=1.0) } else { 0.0 })
                .collect()
        })
        .collect();
    let norm = noise.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || delta == 0.0 {
        return f.clone();
    }
    let scale = delta / norm;
    let coeffs = f
        .coeffs()
        .iter()
        .zip(&noise)
        .map(|(c, e)| Poly::new(c.coeffs().iter().zip(e).map(|(x, y)| x + scale * y).collect()))
        .collect();
    DiffPoly::new(coeffs)
}

fn unit_coefficients(h: &DiffPoly<f64>) -> DiffPoly<f64> {
    DiffPoly::new(
        h.coeffs()
            .iter()
            .map(|c| {
                let n = c.norm2();
                if n > 0.0 {
                    c.scale(&(1.0 / n))
                } else {
                    c.clone()
                }
            })
            .collect(),
    )
}

/// Noisy pair `(f^, g^)` and the planted divisor for trial `index`.
pub fn trial_instance(config: &ExperimentConfig, index: usize) -> (DiffPoly<f64>, DiffPoly<f64>, DiffPoly<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let mut factors: Vec<DiffPoly<f64>> = (0..3)
        .map(|_| random_factor(&mut rng, config.max_d_degree, config.max_t_degree))
        .collect();
    if config.protocol == Protocol::Bounded {
        factors = factors.iter().map(unit_coefficients).collect();
    }
    let mut f = &factors[0] * &factors[2];
    let mut g = &factors[1] * &factors[2];
    if config.protocol == Protocol::Normalized {
        f = f.normalize().unwrap_or(f);
        g = g.normalize().unwrap_or(g);
    }
    let fh = add_uniform_noise(&f, config.delta, &mut rng);
    let gh = add_uniform_noise(&g, config.delta, &mut rng);
    (fh, gh, factors.swap_remove(2))
}

/// Runs one trial. A trial is trivial when the rank test finds the noisy pair
/// coprime, or when either reconstruction fails to produce a nontrivial GCRD.
pub fn run_trial(config: &ExperimentConfig, index: usize) -> TrialRecord {
    let (fh, gh, h) = trial_instance(config, index);
    let mut record = TrialRecord {
        index,
        planted_degree: h.deg_d().unwrap_or(0),
        found_degree: None,
        trivial: true,
        first_row_f: None,
        first_row_g: None,
        weighted_f: None,
        weighted_g: None,
        error: None,
    };
    let opts = GcrdOptions {
        eps: config.rho,
        content: ContentRemoval::None,
        normalize: config.normalize,
    };
    let proj = match project(&fh, &gh, config.rho, config.normalize) {
        Ok(p) => p,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    if proj.is_coprime() {
        return record;
    }
    let mut found = Vec::new();
    for mode in [ReconstructionMode::FirstRow, ReconstructionMode::Weighted] {
        match finish(&proj, &fh, &gh, &opts, mode) {
            Ok(out) => {
                let p = out.perturbed.as_ref().expect("nearest reports perturbations");
                match mode {
                    ReconstructionMode::FirstRow => {
                        record.first_row_f = Some(p.perturbation_f);
                        record.first_row_g = Some(p.perturbation_g);
                    }
                    ReconstructionMode::Weighted => {
                        record.weighted_f = Some(p.perturbation_f);
                        record.weighted_g = Some(p.perturbation_g);
                    }
                }
                if out.kind == OutcomeKind::Found {
                    found.push(out.degree);
                }
            }
            Err(e) => record.error = Some(e.to_string()),
        }
    }
    record.found_degree = found.first().copied();
    record.trivial = found.len() < 2;
    record
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

/// Runs every trial of `config` in parallel. Results do not depend on the
/// number of threads: each trial draws from its own random stream.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SuiteReport> {
    if !(config.rho.is_finite() && config.rho > 0.0) {
        return Err(Error::InvalidInput("rho must be positive".into()));
    }
    if !(config.delta.is_finite() && config.delta >= 0.0) {
        return Err(Error::InvalidInput("delta must be nonnegative".into()));
    }
    let records: Vec<TrialRecord> = thread_pool()?.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect()
    });
    let used: Vec<&TrialRecord> = records.iter().filter(|r| !r.trivial).collect();
    let collect = |get: fn(&TrialRecord) -> Option<f64>| -> Option<QuantityStats> {
        let xs: Vec<f64> = used.iter().filter_map(|r| get(r)).collect();
        QuantityStats::from_samples(&xs)
    };
    let stats = TrialStats {
        first_row_f: collect(|r| r.first_row_f),
        first_row_g: collect(|r| r.first_row_g),
        weighted_f: collect(|r| r.weighted_f),
        weighted_g: collect(|r| r.weighted_g),
        trivial_count: records.len() - used.len(),
        used: used.len(),
        trials: records.len(),
    };
    Ok(SuiteReport {
        config: *config,
        stats,
        records,
    })
}

pub fn run_bounded_suite(rho: f64, delta: f64, trials: usize, seed: u64) -> Result<SuiteReport> {
    let config = ExperimentConfig {
        trials,
        seed,
        ..ExperimentConfig::new(Protocol::Bounded, rho, delta)
    };
    run_experiment(&config)
}

pub fn run_normalized_suite(rho: f64, delta: f64, trials: usize, seed: u64) -> Result<SuiteReport> {
    let config = ExperimentConfig {
        trials,
        seed,
        ..ExperimentConfig::new(Protocol::Normalized, rho, delta)
    };
    run_experiment(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_has_exact_norm_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = DiffPoly::from_rows(vec![vec![1.0, 0.0, 2.0], vec![], vec![0.5]]);
        let fh = add_uniform_noise(&f, 0.01, &mut rng);
        assert!(((&fh - &f).norm() - 0.01).abs() < 1e-15);
        assert_eq!(fh.coeff(0).coeff(1), 0.0);
        assert!(fh.coeff(1).is_zero());
        assert_eq!(add_uniform_noise(&f, 0.0, &mut rng), f);
    }

    #[test]
    fn sample_statistics() {
        let s = QuantityStats::from_samples(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.max, s.mean, s.stddev), (3.0, 2.0, 1.0));
        assert_eq!(QuantityStats::from_samples(&[4.0]).unwrap().stddev, 0.0);
        assert!(QuantityStats::from_samples(&[]).is_none());
    }

    #[test]
    fn trials_are_reproducible() {
        let config = ExperimentConfig {
            trials: 3,
            seed: 11,
            ..ExperimentConfig::new(Protocol::Bounded, 0.5, 0.01)
        };
        assert_eq!(trial_instance(&config, 1), trial_instance(&config, 1));
        assert_ne!(trial_instance(&config, 1).0, trial_instance(&config, 2).0);
    }

    #[test]
    fn noiseless_trials_recover_the_planted_factor() {
        let config = ExperimentConfig {
            trials: 8,
            seed: 5,
            ..ExperimentConfig::new(Protocol::Normalized, 1e-6, 0.0)
        };
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.stats.trivial_count, 0, "{:?}", report.records);
        for r in &report.records {
            assert!(r.first_row_f.unwrap() <= 1e-6 && r.weighted_g.unwrap() <= 1e-6, "{r:?}");
            assert_eq!(r.found_degree, Some(r.planted_degree));
        }
        assert_eq!(report.csv_rows().len(), 4);
    }

    #[test]
    fn invalid_configuration() {
        assert!(run_bounded_suite(0.0, 0.1, 1, 0).is_err());
        assert!(run_bounded_suite(0.1, -1.0, 1, 0).is_err());
    }
}
