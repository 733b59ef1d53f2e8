use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{rationalize, Scalar};

/// Dense univariate polynomial in `t`, coefficients in ascending degree.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and `degree()` is `None`.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Poly::monomial(S::one(), 1)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `t^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![S::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_u64(i as u64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Drops every coefficient above `t^max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        Poly::new(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    pub fn norm2_squared(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    /// Euclidean division over the coefficient field.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor.leading_coeff().ok_or(Error::DivisionByZero)?.clone();
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd].clone() / lead.clone();
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - q.clone() * d.clone();
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Scales so the leading coefficient is one. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lead) => {
                let inv = S::one() / lead.clone();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    ///
    /// Exact for rational coefficients. With floats this is the textbook
    /// Euclidean scheme and is only meaningful for exactly representable data.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_f64(&self) -> Poly<f64> {
        Poly::new(self.coeffs.iter().map(Scalar::to_f64).collect())
    }

    /// Human-readable form in descending powers of `t`.
    ///
    /// With `precision`, coefficients are printed with that many decimals and
    /// terms that round to zero are omitted.
    pub fn render(&self, var: &str, precision: Option<usize>) -> String {
        let terms = render_terms(self, var, precision);
        join_terms(&terms).unwrap_or_else(|| "0".to_string())
    }
}

impl Poly<f64> {
    pub fn norm2(&self) -> f64 {
        self.norm2_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Zeros every coefficient with magnitude below `threshold`.
    pub fn clean(&self, threshold: f64) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() < threshold { 0.0 } else { c })
                .collect(),
        )
    }

    /// Exact rational image, reading each float as its shortest decimal.
    pub fn to_rational(&self) -> Option<Poly<BigRational>> {
        self.coeffs
            .iter()
            .map(|&c| rationalize(c))
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }
}

/// Signed terms `(negative, body)` in descending degree; shared with operator rendering.
pub(crate) fn render_terms<S: Scalar>(p: &Poly<S>, var: &str, precision: Option<usize>) -> Vec<(bool, String)> {
    let mut terms = Vec::new();
    for (k, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let (negative, magnitude) = match precision {
            Some(digits) => {
                let v = c.to_f64();
                let text = format!("{:.*}", digits, v.abs());
                if text.trim_start_matches(['0', '.']).is_empty() {
                    continue;
                }
                (v < 0.0, text)
            }
            None => {
                let negative = c.is_negative();
                let abs = if negative { -c.clone() } else { c.clone() };
                let text = if abs.is_one() && k > 0 {
                    String::new()
                } else {
                    abs.render()
                };
                (negative, text)
            }
        };
        let monomial = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let body = match (magnitude.is_empty(), monomial.is_empty()) {
            (true, _) => monomial,
            (false, true) => magnitude,
            (false, false) => format!("{magnitude}*{monomial}"),
        };
        terms.push((negative, body));
    }
    terms
}

pub(crate) fn join_terms(terms: &[(bool, String)]) -> Option<String> {
    let mut out = String::new();
    for (i, (negative, body)) in terms.iter().enumerate() {
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    (!terms.is_empty()).then_some(out)
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t", None))
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;

    fn neg(self) -> Poly<S> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;

    fn neg(self) -> Poly<S> {
        -&self
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;

    fn add(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;

    fn sub(self, rhs: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;

    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl<S: Scalar> $trait for Poly<S> {
            type Output = Poly<S>;

            fn $method(self, rhs: Poly<S>) -> Poly<S> {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(c: &[f64]) -> Poly<f64> {
        Poly::new(c.to_vec())
    }

    fn q(c: &[i64]) -> Poly<BigRational> {
        Poly::new(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1.0, 0.0, 0.0]).degree(), Some(0));
        assert_eq!(p(&[0.0]).degree(), None);
        assert!(p(&[]).is_zero());
    }

    #[test]
    fn product_of_linear_factors() {
        // (t + 1)(t - 1) = t^2 - 1
        assert_eq!(&p(&[1.0, 1.0]) * &p(&[-1.0, 1.0]), p(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn derivative_of_cubic() {
        assert_eq!(p(&[0.2, 0.3, 0.06, 1.0]).derivative(), p(&[0.3, 0.12, 3.0]));
        assert!(p(&[5.0]).derivative().is_zero());
    }

    #[test]
    fn exact_division_and_gcd() {
        // (t^2 - 1) = (t - 1)(t + 1)
        let (quot, rem) = q(&[-1, 0, 1]).div_rem(&q(&[-1, 1])).unwrap();
        assert_eq!(quot, q(&[1, 1]));
        assert!(rem.is_zero());
        // gcd(t^2 - 1, t^2 + 2t + 1) = t + 1
        assert_eq!(q(&[-1, 0, 1]).gcd(&q(&[1, 2, 1])), q(&[1, 1]));
        assert!(Poly::<BigRational>::zero().gcd(&Poly::zero()).is_zero());
        assert!(q(&[1]).div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn evaluation_and_cleanup() {
        assert_eq!(p(&[1.0, 2.0, 3.0]).eval(&2.0), 17.0);
        assert_eq!(p(&[1.0, 1e-12, 2.0]).clean(1e-10), p(&[1.0, 0.0, 2.0]));
        assert!(p(&[1e-12]).clean(1e-10).is_zero());
    }

    #[test]
    fn rendering() {
        assert_eq!(p(&[0.2, 0.0, -1.0]).to_string(), "-t^2 + 0.2");
        assert_eq!(p(&[1.0, 0.5]).to_string(), "0.5*t + 1.0");
        assert_eq!(p(&[1e-9, 1.0]).render("t", Some(5)), "1.00000*t");
        assert_eq!(Poly::<f64>::zero().to_string(), "0");
        assert_eq!(q(&[0, -3]).to_string(), "-3*t");
    }
}
