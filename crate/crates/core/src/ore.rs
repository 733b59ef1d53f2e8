//! Differential polynomials in `R[t][D]` with `D a = a D + a'`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::{join_terms, render_terms, Poly};
use crate::scalar::Scalar;

/// `sum_i coeffs[i] * D^i` with coefficients written to the left of `D`.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffPoly<S> {
    coeffs: Vec<Poly<S>>,
}

/// `multiplier * f = quotient * g + remainder` with `deg_D remainder < deg_D g`.
#[derive(Clone, PartialEq, Debug)]
pub struct DivisionResult<S> {
    /// Left factor in `t` needed to keep every coefficient polynomial.
    /// It is one whenever each leading coefficient division is exact.
    pub multiplier: Poly<S>,
    pub quotient: DiffPoly<S>,
    pub remainder: DiffPoly<S>,
}

impl<S: Scalar> DiffPoly<S> {
    pub fn new(mut coeffs: Vec<Poly<S>>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        DiffPoly { coeffs }
    }

    /// Builds from nested coefficient lists: `rows[i][j]` multiplies `t^j D^i`.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        DiffPoly::new(rows.into_iter().map(Poly::new).collect())
    }

    pub fn zero() -> Self {
        DiffPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DiffPoly::from_poly(Poly::one())
    }

    /// The derivation `D`.
    pub fn d() -> Self {
        DiffPoly::new(vec![Poly::zero(), Poly::one()])
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        DiffPoly::new(vec![p])
    }

    pub fn coeffs(&self) -> &[Poly<S>] {
        &self.coeffs
    }

    /// Coefficient of `D^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Poly<S> {
        self.coeffs.get(i).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn deg_d(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest `t`-degree among the coefficients.
    pub fn deg_t(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(Poly::degree).max()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&Poly<S>> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &S) -> Self {
        DiffPoly::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// `p * self` for a coefficient polynomial `p`.
    pub fn left_mul_poly(&self, p: &Poly<S>) -> Self {
        DiffPoly::new(self.coeffs.iter().map(|c| p * c).collect())
    }

    /// `D * self`.
    pub fn d_mul(&self) -> Self {
        let mut out = vec![Poly::zero(); self.coeffs.len() + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j] = &out[j] + &c.derivative();
            out[j + 1] = &out[j + 1] + c;
        }
        DiffPoly::new(out)
    }

    /// `D^k * self`.
    pub fn d_pow_mul(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.d_mul())
    }

    /// Non-commutative product `self * rhs`.
    pub fn ore_mul(&self, rhs: &Self) -> Self {
        let mut acc = DiffPoly::zero();
        let mut shifted = rhs.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                shifted = shifted.d_mul();
            }
            if !c.is_zero() {
                acc = &acc + &shifted.left_mul_poly(c);
            }
        }
        acc
    }

    /// Applies the operator to a function of `t`: `sum_i f_i * y^(i)`.
    pub fn apply(&self, y: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        let mut derived = y.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                derived = derived.derivative();
            }
            out = &out + &(c * &derived);
        }
        out
    }

    /// Keeps the terms `D^0 .. D^max_degree`.
    pub fn truncate_d(&self, max_degree: usize) -> Self {
        DiffPoly::new(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    /// Right pseudo-division by `g`.
    ///
    /// Leading coefficients are divided exactly when possible; otherwise the
    /// running remainder is multiplied on the left by `lc(g)`, which leaves the
    /// left ideal, and therefore every right divisor, unchanged. Exact over the
    /// rationals.
    pub fn right_division(&self, g: &Self) -> Result<DivisionResult<S>> {
        let n = g.deg_d().ok_or(Error::DivisionByZero)?;
        let lead = g.leading_coeff().expect("nonzero").clone();
        let mut multiplier = Poly::one();
        let mut quotient = DiffPoly::zero();
        let mut remainder = self.clone();
        while let Some(k) = remainder.deg_d().filter(|&k| k >= n) {
            let top = remainder.leading_coeff().expect("nonzero").clone();
            let (factor, rest) = top.div_rem(&lead)?;
            let factor = if rest.is_zero() {
                factor
            } else {
                multiplier = &lead * &multiplier;
                quotient = quotient.left_mul_poly(&lead);
                remainder = remainder.left_mul_poly(&lead);
                top
            };
            let mut term = vec![Poly::zero(); k - n + 1];
            term[k - n] = factor;
            let term = DiffPoly::new(term);
            remainder = (&remainder - &term.ore_mul(g)).truncate_d_below(k);
            quotient = &quotient + &term;
        }
        Ok(DivisionResult {
            multiplier,
            quotient,
            remainder,
        })
    }

    fn truncate_d_below(&self, k: usize) -> Self {
        if k == 0 {
            DiffPoly::zero()
        } else {
            self.truncate_d(k - 1)
        }
    }

    /// Greatest common divisor in `t` of the coefficients, scaled so that the
    /// primitive part has a leading coefficient with leading term one.
    pub fn content(&self) -> Poly<S> {
        let gcd = self.coeffs.iter().fold(Poly::zero(), |acc: Poly<S>, c| acc.gcd(c));
        match self.leading_coeff().and_then(Poly::leading_coeff) {
            Some(lead) => gcd.scale(lead),
            None => Poly::zero(),
        }
    }

    pub fn primitive_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("zero operator has no primitive part".into()));
        }
        let content = self.content();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.div_rem(&content)?.0);
        }
        Ok(DiffPoly::new(coeffs))
    }

    /// Euclidean GCRD with primitive remainders, returned in primitive
    /// canonical form. Exact over the rationals.
    pub fn exact_gcrd(f: &Self, g: &Self) -> Result<Self> {
        if f.is_zero() && g.is_zero() {
            return Err(Error::InvalidInput("gcrd(0, 0) is undefined".into()));
        }
        let (mut a, mut b) = if f.deg_d() >= g.deg_d() {
            (f.clone(), g.clone())
        } else {
            (g.clone(), f.clone())
        };
        while !b.is_zero() {
            let r = a.right_division(&b)?.remainder;
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part()? };
        }
        a.primitive_part()
    }

    pub fn to_f64(&self) -> DiffPoly<f64> {
        DiffPoly::new(self.coeffs.iter().map(Poly::to_f64).collect())
    }

    /// Human-readable form with `D` terms in descending order.
    pub fn render(&self, dvar: &str, tvar: &str, precision: Option<usize>) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            let inner = render_terms(c, tvar, precision);
            if inner.is_empty() {
                continue;
            }
            let power = match k {
                0 => String::new(),
                1 => dvar.to_string(),
                _ => format!("{dvar}^{k}"),
            };
            if power.is_empty() {
                terms.extend(inner);
                continue;
            }
            if inner.len() == 1 {
                let (negative, body) = inner.into_iter().next().expect("one term");
                let lead = c.coeff(0);
                let unit = c.is_constant() && (lead.is_one() || (-lead).is_one());
                let body = if unit { power } else { format!("{body}*{power}") };
                terms.push((negative, body));
            } else {
                let inside = join_terms(&inner).expect("nonempty");
                terms.push((false, format!("({inside})*{power}")));
            }
        }
        join_terms(&terms).unwrap_or_else(|| "0".to_string())
    }
}

impl DiffPoly<f64> {
    /// Euclidean norm of the full coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Poly::norm2_squared).sum::<f64>().sqrt()
    }

    /// Largest Euclidean norm of a single coefficient polynomial.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(Poly::norm2).fold(0.0, f64::max)
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNormalization);
        }
        Ok(self.scale(&(1.0 / norm)))
    }

    /// Zeros every scalar coefficient with magnitude below `threshold`.
    pub fn clean(&self, threshold: f64) -> Self {
        DiffPoly::new(self.coeffs.iter().map(|c| c.clean(threshold)).collect())
    }

    pub fn to_rational(&self) -> Option<DiffPoly<BigRational>> {
        self.coeffs
            .iter()
            .map(Poly::to_rational)
            .collect::<Option<Vec<_>>>()
            .map(DiffPoly::new)
    }
}

impl<S: Scalar> fmt::Display for DiffPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("D", "t", None))
    }
}

impl<S: Scalar> Add for &DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn add(self, rhs: &DiffPoly<S>) -> DiffPoly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffPoly::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for &DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn sub(self, rhs: &DiffPoly<S>) -> DiffPoly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffPoly::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Neg for &DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn neg(self) -> DiffPoly<S> {
        DiffPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<S: Scalar> Mul for &DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn mul(self, rhs: &DiffPoly<S>) -> DiffPoly<S> {
        self.ore_mul(rhs)
    }
}

impl<S: Scalar> Add for DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn add(self, rhs: DiffPoly<S>) -> DiffPoly<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn sub(self, rhs: DiffPoly<S>) -> DiffPoly<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Neg for DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn neg(self) -> DiffPoly<S> {
        -&self
    }
}

impl<S: Scalar> Mul for DiffPoly<S> {
    type Output = DiffPoly<S>;

    fn mul(self, rhs: DiffPoly<S>) -> DiffPoly<S> {
        self.ore_mul(&rhs)
    }
}
