//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's rank, inflation or product code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use ore_gcrd::{DiffPoly, Poly, SylvesterMatrix};
use rand::Rng;

pub const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_294_967_291];

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qpoly(c: &[i64]) -> Poly<BigRational> {
    Poly::new(c.iter().map(|&x| q(x)).collect())
}

/// Integer-coefficient operator with `D`-degree in `1..=max_d`, independent
/// `t`-degrees in `0..=max_t` and a nonzero leading coefficient.
pub fn random_int_diffpoly<R: Rng>(rng: &mut R, max_d: usize, max_t: usize, bound: i64) -> DiffPoly<BigRational> {
    let dd = rng.random_range(1..=max_d);
    let mut coeffs: Vec<Poly<BigRational>> = (0..=dd)
        .map(|_| {
            let dt = rng.random_range(0..=max_t);
            Poly::new((0..=dt).map(|_| q(rng.random_range(-bound..=bound))).collect())
        })
        .collect();
    if coeffs[dd].is_zero() {
        let mut c = 0;
        while c == 0 {
            c = rng.random_range(-bound..=bound);
        }
        coeffs[dd] = Poly::constant(q(c));
    }
    DiffPoly::new(coeffs)
}

/// Integer polynomial of degree at most `max_t`, possibly zero.
pub fn random_int_poly<R: Rng>(rng: &mut R, max_t: usize, bound: i64) -> Poly<BigRational> {
    let dt = rng.random_range(0..=max_t);
    Poly::new((0..=dt).map(|_| q(rng.random_range(-bound..=bound))).collect())
}

pub fn random_f64_diffpoly<R: Rng>(rng: &mut R, max_d: usize, max_t: usize) -> DiffPoly<f64> {
    let dd = rng.random_range(1..=max_d);
    let rows = (0..=dd)
        .map(|_| {
            let dt = rng.random_range(0..=max_t);
            (0..=dt).map(|_| rng.random_range(-1.0..=1.0)).collect()
        })
        .collect();
    DiffPoly::from_rows(rows)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Product by the Leibniz expansion `D^i b = sum_k C(i,k) b^(k) D^(i-k)`.
pub fn ore_mul_leibniz(a: &DiffPoly<BigRational>, b: &DiffPoly<BigRational>) -> DiffPoly<BigRational> {
    let (da, db) = match (a.deg_d(), b.deg_d()) {
        (Some(x), Some(y)) => (x, y),
        _ => return DiffPoly::zero(),
    };
    let mut out = vec![Poly::<BigRational>::zero(); da + db + 1];
    for (i, ai) in a.coeffs().iter().enumerate() {
        for (j, bj) in b.coeffs().iter().enumerate() {
            for k in 0..=i {
                let c = q(binomial(i, k) as i64);
                let term = &(ai * &bj.nth_derivative(k)) * &Poly::constant(c);
                out[i - k + j] = &out[i - k + j] + &term;
            }
        }
    }
    DiffPoly::new(out)
}

pub fn rank_rational(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &pivot;
            let (top, bottom) = rows.split_at_mut(r);
            for (x, p) in bottom[0][col..].iter_mut().zip(&top[rank][col..]) {
                *x = &*x - &(p * &factor);
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the Sylvester matrix over `Q(t)`: the largest rank of its
/// evaluations at a handful of random rational points.
pub fn rank_over_rational_functions<R: Rng>(v: &SylvesterMatrix<BigRational>, rng: &mut R) -> usize {
    (0..4)
        .map(|_| {
            let x = qq(rng.random_range(-997..=997), rng.random_range(1..=89));
            let rows = v
                .rows()
                .iter()
                .map(|row| row.iter().map(|p| p.eval(&x)).collect())
                .collect();
            rank_rational(rows)
        })
        .max()
        .unwrap_or(0)
}

/// Exact inflation: block `(i, j)` has `a_c` at `(r, r + c)` for the entry `a`
/// of the Sylvester matrix.
pub fn inflate_exact(v: &SylvesterMatrix<BigRational>, mu: usize) -> Vec<Vec<BigRational>> {
    let size = v.size();
    let (br, bc) = (mu + 1, mu + v.d() + 1);
    let mut out = vec![vec![BigRational::zero(); size * bc]; size * br];
    for i in 0..size {
        for j in 0..size {
            for (c, a) in v.entry(i, j).coeffs().iter().enumerate() {
                for r in 0..br {
                    out[i * br + r][j * bc + r + c] = a.clone();
                }
            }
        }
    }
    out
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn reduce(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = ((x.numer() % &pb) + &pb) % &pb;
    let den = ((x.denom() % &pb) + &pb) % &pb;
    let den = den.to_u64()?;
    if den == 0 {
        return None;
    }
    Some(mul_mod(num.to_u64()?, mod_pow(den, p - 2, p), p))
}

/// Rank modulo the prime `p`; `None` when a denominator vanishes mod `p`.
pub fn rank_mod_p(rows: &[Vec<BigRational>], p: u64) -> Option<usize> {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| reduce(x, p)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for r in rank + 1..m.len() {
            if m[r][col] == 0 {
                continue;
            }
            let factor = mul_mod(m[r][col], inv, p);
            let (top, bottom) = m.split_at_mut(r);
            for (x, &y) in bottom[0][col..].iter_mut().zip(&top[rank][col..]) {
                *x = (*x + p - mul_mod(y, factor, p)) % p;
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Rank over `Q` as the largest rank modulo several large primes.
pub fn rank_exact(rows: &[Vec<BigRational>]) -> usize {
    PRIMES.iter().filter_map(|&p| rank_mod_p(rows, p)).max().unwrap_or(0)
}

/// Distance between the `R(t)`-lines through `a` and `b`: the largest 2x2
/// cross product `a_i b_j - a_j b_i` after scaling both to unit norm.
/// Infinite when the `D`-degrees differ.
pub fn unit_distance(a: &DiffPoly<f64>, b: &DiffPoly<f64>) -> f64 {
    if a.deg_d() != b.deg_d() || a.is_zero() {
        return f64::INFINITY;
    }
    let a = a.scale(&(1.0 / a.norm()));
    let b = b.scale(&(1.0 / b.norm()));
    let k = a.deg_d().unwrap_or(0);
    let mut worst = 0.0f64;
    for i in 0..=k {
        for j in i + 1..=k {
            let cross = &(&a.coeff(i) * &b.coeff(j)) - &(&a.coeff(j) * &b.coeff(i));
            worst = worst.max(cross.norm2());
        }
    }
    worst
}

/// Largest absolute difference between corresponding scalar coefficients.
pub fn coefficient_distance(a: &DiffPoly<f64>, b: &DiffPoly<f64>) -> f64 {
    let rows = a.coeffs().len().max(b.coeffs().len());
    let mut worst = 0.0f64;
    for i in 0..rows {
        let (x, y) = (a.coeff(i), b.coeff(i));
        let cols = x.coeffs().len().max(y.coeffs().len());
        for j in 0..cols {
            worst = worst.max((x.coeff(j) - y.coeff(j)).abs());
        }
    }
    worst
}

/// Scales `g` so that its leading coefficient's leading term is one.
pub fn lead_normalized(g: &DiffPoly<f64>) -> DiffPoly<f64> {
    let lead = g
        .leading_coeff()
        .and_then(|c| c.leading_coeff().copied())
        .unwrap_or(1.0);
    g.scale(&(1.0 / lead))
}

pub fn is_unit(x: &BigRational) -> bool {
    x.abs().is_one()
}
