//! Slow reference implementations used as test oracles and by `verify`.
//!
//! Exhaustive searches refuse inputs beyond [`OracleConfig`] caps so a typo
//! cannot start an exponential run.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::linalg::{select_columns, sorted_svd};
use crate::maxvol::SeedSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_rank: usize,
    pub max_seed_size: usize,
    pub max_columns: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_rank: 4,
            max_seed_size: 6,
            max_columns: 10,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// `(U, σ, V)` with `A = U diag(σ) Vᵀ`, σ nonincreasing.
pub fn svd_oracle(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (u, s, vt) = sorted_svd(a);
    (u, s.as_slice().to_vec(), vt.transpose())
}

/// Moore–Penrose pseudoinverse `V Σ⁺ Uᵀ`.
pub fn pinv_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (u, s, v) = svd_oracle(a);
    let cutoff = s.first().copied().unwrap_or(0.0) * f64::EPSILON * a.nrows().max(a.ncols()) as f64;
    let mut vs = v;
    for (k, &sk) in s.iter().enumerate() {
        let inv = if sk > cutoff { 1.0 / sk } else { 0.0 };
        vs.column_mut(k).scale_mut(inv);
    }
    vs * u.transpose()
}

/// Product of singular values; `0` when `f > L`.
pub fn rectvol_oracle(s: &DMatrix<f64>) -> f64 {
    if s.nrows() > s.ncols() {
        return 0.0;
    }
    svd_oracle(s).1.iter().product()
}

/// Exhaustively volume-maximal `f × L0` submatrix; ties keep the
/// lexicographically first index set.
pub fn brute_force_max_rectvol(q: &DMatrix<f64>, seed_size: usize, cfg: &OracleConfig) -> Result<SeedSet> {
    let (f, m) = q.shape();
    if f > cfg.max_rank || seed_size > cfg.max_seed_size || m > cfg.max_columns {
        return Err(invalid(format!(
            "brute force limited to f ≤ {}, L0 ≤ {}, m ≤ {} (got {f}, {seed_size}, {m})",
            cfg.max_rank, cfg.max_seed_size, cfg.max_columns
        )));
    }
    if seed_size < f || seed_size > m {
        return Err(invalid(format!("need f ≤ L0 ≤ m, got {f}, {seed_size}, {m}")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for combo in Combinations::new(m, seed_size) {
        let vol = rectvol_oracle(&select_columns(q, &combo));
        if best.as_ref().is_none_or(|(bv, _)| vol > *bv) {
            best = Some((vol, combo));
        }
    }
    SeedSet::from_indices(q, best.expect("at least one subset").1)
}

/// Greedy extension that recomputes `sqrt(det([S, q_i][S, q_i]ᵀ))` from
/// scratch for every candidate at every step; ties go to the lowest index.
pub fn naive_greedy(q: &DMatrix<f64>, seed_size: usize, init: &[usize]) -> Result<SeedSet> {
    let m = q.ncols();
    if seed_size < init.len() || seed_size > m {
        return Err(invalid(format!(
            "need |init| ≤ L0 ≤ m, got {}, {seed_size}, {m}",
            init.len()
        )));
    }
    let mut chosen = init.to_vec();
    while chosen.len() < seed_size {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            if chosen.contains(&i) {
                continue;
            }
            chosen.push(i);
            let s = select_columns(q, &chosen);
            chosen.pop();
            let vol = (&s * s.transpose()).determinant().max(0.0).sqrt();
            if best.is_none_or(|(_, bv)| vol > bv) {
                best = Some((i, vol));
            }
        }
        chosen.push(best.expect("a candidate remains").0);
    }
    SeedSet::from_indices(q, chosen)
}

/// Largest factor by which a single swap (seed column out, outside column
/// in) changes `|det S|` for a square seed.
pub fn best_single_swap_ratio(q: &DMatrix<f64>, seed: &[usize]) -> f64 {
    let base = select_columns(q, seed).determinant().abs();
    let mut best: f64 = 0.0;
    for pos in 0..seed.len() {
        for j in 0..q.ncols() {
            if seed.contains(&j) {
                continue;
            }
            let mut trial = seed.to_vec();
            trial[pos] = j;
            best = best.max(select_columns(q, &trial).determinant().abs() / base);
        }
    }
    best
}

/// `det(AB) ≤ M/(M−N) · max_i det(A₋ᵢ B₋ᵢ) + 1e-10` for `A` (`N × M`),
/// `B` (`M × N`), `M > N`.
pub fn averaging_lemma_check(a: &DMatrix<f64>, b: &DMatrix<f64>, cfg: &OracleConfig) -> Result<bool> {
    let (n, m) = a.shape();
    if b.shape() != (m, n) {
        return Err(invalid(format!("B must be {m} × {n}, got {:?}", b.shape())));
    }
    if m <= n {
        return Err(invalid(format!("lemma needs M > N, got M = {m}, N = {n}")));
    }
    if n > cfg.max_rank || m > cfg.max_columns {
        return Err(invalid(format!(
            "lemma check limited to N ≤ {}, M ≤ {}",
            cfg.max_rank, cfg.max_columns
        )));
    }
    let full = (a * b).determinant();
    let best = (0..m)
        .map(|i| (a.clone().remove_column(i) * b.clone().remove_row(i)).determinant())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(full <= m as f64 / (m - n) as f64 * best + 1e-10)
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut pos = k;
        while pos > 0 && next[pos - 1] == self.n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            self.current = None;
        } else {
            next[pos - 1] += 1;
            for p in pos..k {
                next[p] = next[p - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;

    #[test]
    fn combinations_enumerate_all() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 3).count(), 1);
    }

    #[test]
    fn brute_force_three_columns() {
        let q = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let cfg = OracleConfig::default();
        assert_eq!(brute_force_max_rectvol(&q, 2, &cfg).unwrap().indices(), &[0, 1]);
        assert_eq!(brute_force_max_rectvol(&q, 3, &cfg).unwrap().indices(), &[0, 1, 2]);
    }

    #[test]
    fn brute_force_enforces_caps() {
        let q = DMatrix::from_element(2, 11, 1.0);
        assert!(brute_force_max_rectvol(&q, 3, &OracleConfig::default()).is_err());
    }

    #[test]
    fn pinv_identities() {
        assert!((pinv_oracle(&DMatrix::identity(3, 3)) - DMatrix::identity(3, 3)).norm() < 1e-14);
        let mut rng = OracleConfig::default().rng();
        let s = gaussian_matrix(3, 5, &mut rng);
        let p = pinv_oracle(&s);
        assert!((&p * &s * &p - &p).norm() < 1e-10);
        let closed = s.transpose() * (&s * s.transpose()).try_inverse().unwrap();
        assert!((p - closed).norm() < 1e-10);
    }

    #[test]
    fn lemma_on_identity_and_zero() {
        let cfg = OracleConfig::default();
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(averaging_lemma_check(&a, &a.transpose(), &cfg).unwrap());
        assert!(averaging_lemma_check(&a, &DMatrix::zeros(3, 2), &cfg).unwrap());
        assert!(averaging_lemma_check(&DMatrix::zeros(2, 2), &DMatrix::zeros(2, 2), &cfg).is_err());
    }

    #[test]
    fn naive_greedy_without_steps_returns_init() {
        let q = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        assert_eq!(naive_greedy(&q, 2, &[1, 0]).unwrap().indices(), &[1, 0]);
    }
}
