//! Evaluation at roots of unity and approximate polynomial division.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Values of `a` at `exp(-2 pi i j / K)` for `j = 0..K`, where `K` is the
/// smallest power of two that is at least `k` and exceeds `deg a`.
pub fn fft_eval(a: &Poly<f64>, k: usize) -> Vec<Complex64> {
    let size = k.max(a.coeffs().len()).max(1).next_power_of_two();
    let mut buf: Vec<Complex64> = a.coeffs().iter().map(|&c| Complex64::new(c, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);
    buf
}

/// Inverse of [`fft_eval`]. The values must come from a real polynomial up to
/// rounding; an imaginary residue above `1e-10 * ||values||` is rejected.
pub fn fft_interpolate(values: &[Complex64]) -> Result<Poly<f64>> {
    if values.is_empty() {
        return Ok(Poly::zero());
    }
    let size = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / size as f64;
    let residue = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) * scale;
    let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residue > 1e-10 * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::InterpolationInconsistency { residue });
    }
    Ok(Poly::new(buf.iter().map(|z| z.re * scale).collect()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub quotient: Poly<f64>,
    /// `||numer - quotient * denom|| / ||numer||`.
    pub relative_residual: f64,
    /// Set when the relative residual exceeds one tenth.
    pub inexact: bool,
}

/// Values at the `size` roots of `t^size = -1`, i.e. `exp(-i pi (2j + 1) / size)`.
/// Unlike the plain roots of unity these never include `t = 1` or `t = -1`.
fn shifted_eval(a: &Poly<f64>, size: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = (0..size)
        .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / size as f64) * a.coeff(k))
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);
    buf
}

fn shifted_interpolate(values: &[Complex64]) -> Result<Poly<f64>> {
    let size = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / size as f64;
    let coeffs: Vec<Complex64> = buf
        .iter()
        .enumerate()
        .map(|(k, z)| z * Complex64::from_polar(scale, PI * k as f64 / size as f64))
        .collect();
    let residue = coeffs.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residue > 1e-10 * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::InterpolationInconsistency { residue });
    }
    Ok(Poly::new(coeffs.iter().map(|z| z.re).collect()))
}

/// Quotient of two real polynomials through pointwise division of their
/// discrete Fourier transforms.
///
/// Coefficients below `threshold` are dropped before and after dividing, and
/// the quotient is cut to degree `deg numer - deg denom`. The sample points
/// are the `K` roots of `t^K = -1` for the smallest power of two `K` above
/// `deg numer`; fails when the divisor is smaller than `threshold` at one of
/// them.
pub fn approx_divide(numer: &Poly<f64>, denom: &Poly<f64>, threshold: f64) -> Result<Quotient> {
    let numer = numer.clean(threshold);
    let denom = denom.clean(threshold);
    let dd = denom.degree().ok_or(Error::DivisionByZero)?;
    let nd = match numer.degree() {
        Some(nd) if nd >= dd => nd,
        _ => {
            let norm = numer.norm2();
            return Ok(Quotient {
                quotient: Poly::zero(),
                relative_residual: if norm > 0.0 { 1.0 } else { 0.0 },
                inexact: norm > 0.0,
            });
        }
    };
    let size = (nd + 1).next_power_of_two();
    let top = shifted_eval(&numer, size);
    let bottom = shifted_eval(&denom, size);
    let smallest = bottom.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if smallest <= threshold {
        return Err(Error::DivisionInstability { magnitude: smallest });
    }
    let ratio: Vec<Complex64> = top.iter().zip(&bottom).map(|(a, b)| a / b).collect();
    let raw = shifted_interpolate(&ratio)?;
    let quotient = raw.truncate(nd - dd).clean(threshold);
    let residual = (&numer - &(&quotient * &denom)).norm2();
    let relative_residual = residual / numer.norm2();
    Ok(Quotient {
        quotient,
        relative_residual,
        inexact: relative_residual > 0.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly<f64> {
        Poly::new(c.to_vec())
    }

    #[test]
    fn eval_pads_to_power_of_two() {
        let v = fft_eval(&p(&[0.0, 1.0]), 2);
        assert_eq!(v.len(), 2);
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(fft_eval(&p(&[1.0, 2.0, 3.0]), 1).len(), 4);
    }

    #[test]
    fn interpolation_round_trip() {
        let a = p(&[0.3, -1.0, 2.5, 0.0, 4.0]);
        let back = fft_interpolate(&fft_eval(&a, 8)).unwrap();
        for i in 0..8 {
            assert!((back.coeff(i) - a.coeff(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolation_rejects_non_real_data() {
        let values = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(
            fft_interpolate(&values),
            Err(Error::InterpolationInconsistency { .. })
        ));
    }

    #[test]
    fn divides_exact_multiple() {
        // (t^2 - 1) / (t - 1) = t + 1
        let out = approx_divide(&p(&[-1.0, 0.0, 1.0]), &p(&[-1.0, 1.0]), 1e-8).unwrap();
        assert!((out.quotient.coeff(0) - 1.0).abs() < 1e-12);
        assert!((out.quotient.coeff(1) - 1.0).abs() < 1e-12);
        assert_eq!(out.quotient.degree(), Some(1));
        assert!(!out.inexact);
    }

    #[test]
    fn divisors_vanishing_at_plus_or_minus_one() {
        // (t^2 + t) / (t + 1) = t
        let out = approx_divide(&p(&[0.0, 1.0, 1.0]), &p(&[1.0, 1.0]), 1e-8).unwrap();
        assert!((&out.quotient - &p(&[0.0, 1.0])).norm2() < 1e-12);
        let same = approx_divide(&p(&[0.5, -2.0]), &p(&[1.0]), 1e-8).unwrap();
        assert!((&same.quotient - &p(&[0.5, -2.0])).norm2() < 1e-12);
    }

    #[test]
    fn divisor_vanishing_at_a_sample_point() {
        // t^2 - sqrt(2) t + 1 vanishes at exp(-i pi / 4), a root of t^4 = -1.
        let denom = p(&[1.0, -std::f64::consts::SQRT_2, 1.0]);
        let err = approx_divide(&denom, &denom, 1e-8).unwrap_err();
        assert!(matches!(err, Error::DivisionInstability { .. }));
    }

    #[test]
    fn non_divisible_input_is_flagged() {
        let out = approx_divide(&p(&[1.0, 0.0, 1.0]), &p(&[0.5, 1.0]), 1e-8).unwrap();
        assert!(out.inexact);
        assert!(approx_divide(&p(&[1.0]), &Poly::zero(), 1e-8).is_err());
    }
}
