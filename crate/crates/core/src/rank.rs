//! Numerical rank of an inflated Sylvester matrix, deflated to the size of
//! the underlying matrix over `R(t)`.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    /// Number of singular values kept in the inflated matrix.
    pub k: usize,
    /// Deflated rank `ceil(k / (mu + d + 1))`.
    pub r: usize,
    pub full_rank: bool,
    /// False when no index separates large from small singular values.
    pub separation_ok: bool,
}

impl RankReport {
    /// Degree of the approximate GCRD, `m + n - r`. Zero for full rank.
    pub fn gcrd_degree(&self, size: usize) -> usize {
        size.saturating_sub(self.r)
    }
}

/// Gap threshold `eps * sqrt(N (2 mu + d + 2)) / (mu + d + 1)`, where
/// `N = m + n`. A singular value of the inflated matrix above it certifies a
/// nonzero singular value of the underlying polynomial matrix.
pub fn gap_threshold(eps: f64, size: usize, d: usize, mu: usize) -> f64 {
    let block = (mu + d + 1) as f64;
    eps * ((size * (2 * mu + d + 2)) as f64).sqrt() / block
}

/// Reads the deflated rank off the singular values of an inflated matrix.
///
/// If every singular value exceeds `eps` the matrix has full rank. Otherwise
/// `k` is the largest index with `sigma_k > tau` and `sigma_(k+1) < eps`,
/// using `sigma_0 = inf` and a trailing zero. Because `tau` can exceed `eps`
/// (for instance when `d = 0`) such an index need not exist; that case is
/// reported through `separation_ok`.
pub fn deflated_rank(sigma: &[f64], eps: f64, m: usize, n: usize, d: usize, mu: usize) -> RankReport {
    let size = m + n;
    let block = mu + d + 1;
    let len = sigma.len();
    if len > 0 && sigma.iter().all(|&s| s > eps) {
        return RankReport {
            k: len,
            r: size,
            full_rank: true,
            separation_ok: true,
        };
    }
    let tau = gap_threshold(eps, size, d, mu);
    let at = |i: usize| -> f64 {
        match i {
            0 => f64::INFINITY,
            i if i > len => 0.0,
            i => sigma[i - 1],
        }
    };
    match (0..=len).rev().find(|&k| at(k) > tau && at(k + 1) < eps) {
        Some(k) => {
            let r = k.div_ceil(block).min(size);
            RankReport {
                k,
                r,
                full_rank: r == size,
                separation_ok: true,
            }
        }
        None => RankReport {
            k: 0,
            r: 0,
            full_rank: false,
            separation_ok: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_when_all_values_clear_eps() {
        let rep = deflated_rank(&[3.0, 2.0, 1.0], 0.5, 1, 1, 0, 0);
        assert!(rep.full_rank && rep.separation_ok);
        assert_eq!(rep.r, 2);
    }

    #[test]
    fn gap_determines_k() {
        // N = 2, d = 1, mu = 4: block width 6 and tau = eps * sqrt(22) / 6.
        let mut sigma = vec![1.0; 11];
        sigma.push(1e-9);
        let rep = deflated_rank(&sigma, 1e-3, 1, 1, 1, 4);
        assert!(rep.separation_ok);
        assert_eq!(rep.k, 11);
        assert_eq!(rep.r, 2);
        assert!(rep.full_rank);

        let mut sigma = vec![1.0; 5];
        sigma.extend([1e-9; 5]);
        let rep = deflated_rank(&sigma, 1e-3, 1, 1, 1, 4);
        assert_eq!((rep.k, rep.r), (5, 1));
        assert!(!rep.full_rank);
        assert_eq!(rep.gcrd_degree(2), 1);
    }

    #[test]
    fn all_zero_singular_values() {
        let rep = deflated_rank(&[0.0; 4], 1e-3, 1, 1, 1, 1);
        assert!(rep.separation_ok);
        assert_eq!((rep.k, rep.r), (0, 0));
    }

    #[test]
    fn separation_can_fail_when_tau_exceeds_eps() {
        // d = 0, mu = 0, N = 2: tau = eps * sqrt(4) = 2 eps.
        let eps = 1e-3;
        assert!(gap_threshold(eps, 2, 0, 0) > eps);
        let rep = deflated_rank(&[1.5e-3, 0.5e-3], eps, 1, 1, 0, 0);
        assert!(!rep.separation_ok);
    }
}
