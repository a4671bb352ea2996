//! Seeded synthetic rating matrices for examples, tests and benchmarks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::RatingMatrix;

/// Fully observed `n × m` matrix `R = PᵀQ` of exact rank `rank`, built from
/// factors with entries in `[0.1, 1)` so every rating is positive.
pub fn exact_low_rank(n: usize, m: usize, rank: usize, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = DMatrix::from_fn(rank, n, |_, _| rng.random_range(0.1..1.0));
    let q = DMatrix::from_fn(rank, m, |_, _| rng.random_range(0.1..1.0));
    RatingMatrix::from_dense(&(p.transpose() * q)).expect("positive entries")
}

/// Uniform random sparse matrix with integer stars 1–5; every row and column
/// gets at least one rating.
pub fn random_sparse(n: usize, m: usize, density: f64, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = DMatrix::from_fn(n, m, |_, _| {
        if rng.random::<f64>() < density {
            rng.random_range(1..=5) as f64
        } else {
            0.0
        }
    });
    for r in 0..n {
        let c = rng.random_range(0..m);
        d[(r, c)] = rng.random_range(1..=5) as f64;
    }
    for c in 0..m {
        let r = rng.random_range(0..n);
        d[(r, c)] = rng.random_range(1..=5) as f64;
    }
    RatingMatrix::from_dense(&d).expect("positive entries")
}

/// Star ratings from a planted low-rank taste model: item popularity decays
/// with index, each observed rating is the rounded latent score plus noise.
pub fn planted_tastes(n: usize, m: usize, rank: usize, density: f64, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users: DMatrix<f64> = DMatrix::from_fn(rank, n, |_, _| rng.random_range(-1.0..1.0));
    let items: DMatrix<f64> = DMatrix::from_fn(rank, m, |_, _| rng.random_range(-1.0..1.0));
    let mut d = DMatrix::zeros(n, m);
    for c in 0..m {
        let popularity = (density * 3.0 / (1.0 + 8.0 * c as f64 / m as f64)).min(0.95);
        for r in 0..n {
            if rng.random::<f64>() >= popularity {
                continue;
            }
            let score: f64 = users.column(r).dot(&items.column(c)) * 1.5 + 3.2 + rng.random_range(-0.5..0.5);
            d[(r, c)] = score.round().clamp(1.0, 5.0);
        }
    }
    for r in 0..n {
        if d.row(r).iter().all(|&x| x == 0.0) {
            d[(r, r % m)] = 3.0;
        }
    }
    for c in 0..m {
        if d.column(c).iter().all(|&x| x == 0.0) {
            d[(c % n, c)] = 3.0;
        }
    }
    RatingMatrix::from_dense(&d).expect("positive entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sorted_svd;

    #[test]
    fn exact_low_rank_has_that_rank() {
        let r = exact_low_rank(20, 15, 3, 1);
        assert_eq!(r.nnz(), 300);
        let (_, s, _) = sorted_svd(&r.to_dense());
        assert!(s[2] > 1e-6);
        assert!(s[3] < 1e-10 * s[0]);
    }

    #[test]
    fn generators_cover_every_row_and_column() {
        for r in [random_sparse(30, 20, 0.05, 2), planted_tastes(30, 20, 3, 0.1, 3)] {
            assert!((0..r.nrows()).all(|u| r.row_nnz(u) > 0));
            assert!((0..r.ncols()).all(|i| r.transpose().row_nnz(i) > 0));
        }
    }
}
