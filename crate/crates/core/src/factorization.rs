//! PureSVD: the best rank-`f` approximation `R ≈ PᵀQ` of the rating matrix,
//! unknown ratings taken as zeros.
//!
//! `Q` holds the top right singular vectors as orthonormal rows and `P`
//! absorbs the singular values (`P = Σ Uᵀ`). Seed selection does not depend
//! on this split, but fixing it keeps runs reproducible.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::RatingMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{gaussian_matrix, orthonormalize, sorted_svd};

/// Dense SVD is used up to this many matrix cells under [`SvdSolver::Auto`].
pub const DENSE_CELL_LIMIT: usize = 200_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SvdSolver {
    #[default]
    Auto,
    Dense,
    /// Seeded randomized block subspace iteration on the sparse matrix.
    Randomized,
}

impl SvdSolver {
    pub fn name(self) -> &'static str {
        match self {
            SvdSolver::Auto => "auto",
            SvdSolver::Dense => "dense",
            SvdSolver::Randomized => "randomized",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdOptions {
    pub solver: SvdSolver,
    /// Stopping rule for the iterative solver: `max_j ‖R v_j − σ_j u_j‖ ≤ tol·σ_1`.
    pub tol: f64,
    pub seed: u64,
    pub max_iters: usize,
    /// Extra block columns beyond the rank; `None` picks `max(10, f)`.
    pub oversampling: Option<usize>,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            solver: SvdSolver::Auto,
            tol: 1e-8,
            seed: 0,
            max_iters: 1000,
            oversampling: None,
        }
    }
}

/// How a factorization was obtained; recorded in run metadata.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdReport {
    pub solver: SvdSolver,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    user_factors: DMatrix<f64>,
    item_factors: DMatrix<f64>,
    singular_values: Vec<f64>,
    report: SvdReport,
}

impl Factorization {
    /// Wraps explicit factors `P` (`f × n`) and `Q` (`f × m`).
    pub fn from_factors(
        user_factors: DMatrix<f64>,
        item_factors: DMatrix<f64>,
        singular_values: Vec<f64>,
    ) -> Result<Self> {
        let f = user_factors.nrows();
        if item_factors.nrows() != f || singular_values.len() != f {
            return Err(invalid(format!(
                "factor ranks disagree: P has {f} rows, Q has {}, {} singular values",
                item_factors.nrows(),
                singular_values.len()
            )));
        }
        Ok(Self {
            user_factors,
            item_factors,
            singular_values,
            report: SvdReport {
                solver: SvdSolver::Dense,
                iterations: 0,
                relative_residual: 0.0,
            },
        })
    }

    pub fn rank(&self) -> usize {
        self.item_factors.nrows()
    }

    /// `P`, `f × n`; column `u` is the latent vector of user `u`.
    pub fn user_factors(&self) -> &DMatrix<f64> {
        &self.user_factors
    }

    /// `Q`, `f × m`; column `i` is the latent vector of item `i`.
    pub fn item_factors(&self) -> &DMatrix<f64> {
        &self.item_factors
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn report(&self) -> &SvdReport {
        &self.report
    }

    /// `p_uᵀ q_i`.
    pub fn predicted_rating(&self, user: usize, item: usize) -> Result<f64> {
        if user >= self.user_factors.ncols() || item >= self.item_factors.ncols() {
            return Err(invalid(format!(
                "index ({user}, {item}) out of range for {}×{} factorization",
                self.user_factors.ncols(),
                self.item_factors.ncols()
            )));
        }
        Ok(self.user_factors.column(user).dot(&self.item_factors.column(item)))
    }

    /// Keeps the leading `f` factors.
    pub fn truncated(&self, f: usize) -> Result<Self> {
        if f == 0 || f > self.rank() {
            return Err(invalid(format!("cannot truncate rank {} to {f}", self.rank())));
        }
        Ok(Self {
            user_factors: self.user_factors.rows(0, f).into_owned(),
            item_factors: self.item_factors.rows(0, f).into_owned(),
            singular_values: self.singular_values[..f].to_vec(),
            report: self.report,
        })
    }

    /// `‖R − PᵀQ‖_F`, computed row by row without forming the dense product.
    pub fn residual_norm(&self, r: &RatingMatrix) -> f64 {
        let mut total = 0.0;
        let mut row = vec![0.0; self.item_factors.ncols()];
        for u in 0..r.nrows() {
            let pu = self.user_factors.column(u);
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = pu.dot(&self.item_factors.column(i));
            }
            for (i, v) in r.row(u) {
                row[i] -= v;
            }
            total += row.iter().map(|x| x * x).sum::<f64>();
        }
        total.sqrt()
    }
}

/// Rank-`f` PureSVD of `r`.
pub fn pure_svd(r: &RatingMatrix, rank: usize, opts: &SvdOptions) -> Result<Factorization> {
    let (n, m) = (r.nrows(), r.ncols());
    if rank == 0 || rank > n.min(m) {
        return Err(invalid(format!(
            "rank {rank} must lie in [1, min(n, m) = {}]",
            n.min(m)
        )));
    }
    if r.nnz() == 0 {
        return Err(Error::EmptyDataset);
    }
    let solver = match opts.solver {
        SvdSolver::Auto if n * m <= DENSE_CELL_LIMIT => SvdSolver::Dense,
        SvdSolver::Auto => SvdSolver::Randomized,
        s => s,
    };
    let (u, sv, vt, iterations, residual) = match solver {
        SvdSolver::Dense => {
            let (u, s, vt) = sorted_svd(&r.to_dense());
            (
                u.columns(0, rank).into_owned(),
                s.as_slice()[..rank].to_vec(),
                vt.rows(0, rank).into_owned(),
                0,
                0.0,
            )
        }
        _ => randomized_svd(r, rank, opts)?,
    };
    let mut p = u.transpose();
    for (k, s) in sv.iter().enumerate() {
        p.row_mut(k).scale_mut(*s);
    }
    Ok(Factorization {
        user_factors: p,
        item_factors: vt,
        singular_values: sv,
        report: SvdReport {
            solver,
            iterations,
            relative_residual: residual,
        },
    })
}

type SvdParts = (DMatrix<f64>, Vec<f64>, DMatrix<f64>, usize, f64);

fn randomized_svd(r: &RatingMatrix, rank: usize, opts: &SvdOptions) -> Result<SvdParts> {
    let (n, m) = (r.nrows(), r.ncols());
    let extra = opts.oversampling.unwrap_or(rank.max(10));
    let block = (rank + extra).min(n.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let omega = gaussian_matrix(m, block, &mut rng);
    let mut basis = orthonormalize(r.mul_dense(&omega));
    let mut residual = f64::INFINITY;

    for iter in 1..=opts.max_iters.max(1) {
        // Rayleigh–Ritz on the current left basis: R ≈ Y (Rᵀ Y)ᵀ.
        let bt = r.tmul_dense(&basis);
        let (w, s, xt) = sorted_svd(&bt);
        let rw = r.mul_dense(&w);

        let sigma_max = s[0].max(f64::MIN_POSITIVE);
        let u_all = &basis * xt.transpose();
        residual = (0..rank)
            .map(|j| (rw.column(j) - u_all.column(j) * s[j]).norm())
            .fold(0.0, f64::max)
            / sigma_max;
        if residual <= opts.tol {
            return Ok((
                u_all.columns(0, rank).into_owned(),
                s.as_slice()[..rank].to_vec(),
                w.columns(0, rank).transpose(),
                iter,
                residual,
            ));
        }
        basis = orthonormalize(rw);
    }
    Err(Error::Convergence {
        iterations: opts.max_iters,
        residual,
    })
}

/// On-disk cache of factorizations keyed by `(dataset hash, f, solver, seed, tol)`.
#[derive(Clone, Debug)]
pub struct FactorCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct StoredFactors {
    schema_version: u32,
    rank: usize,
    users: usize,
    items: usize,
    user_factors: Vec<f64>,
    item_factors: Vec<f64>,
    singular_values: Vec<f64>,
    report: SvdReport,
}

impl FactorCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, dataset_hash: &str, rank: usize, opts: &SvdOptions) -> PathBuf {
        let short = &dataset_hash[..dataset_hash.len().min(16)];
        self.dir.join(format!(
            "{short}-f{rank}-{}-s{}-t{:e}.json",
            opts.solver.name(),
            opts.seed,
            opts.tol
        ))
    }

    pub fn load(&self, dataset_hash: &str, rank: usize, opts: &SvdOptions) -> Result<Option<Factorization>> {
        let path = self.path(dataset_hash, rank, opts);
        if !path.exists() {
            return Ok(None);
        }
        let stored: StoredFactors = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        Ok(Some(Factorization {
            user_factors: DMatrix::from_vec(stored.rank, stored.users, stored.user_factors),
            item_factors: DMatrix::from_vec(stored.rank, stored.items, stored.item_factors),
            singular_values: stored.singular_values,
            report: stored.report,
        }))
    }

    pub fn store(&self, dataset_hash: &str, opts: &SvdOptions, factors: &Factorization) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let stored = StoredFactors {
            schema_version: 1,
            rank: factors.rank(),
            users: factors.user_factors.ncols(),
            items: factors.item_factors.ncols(),
            user_factors: factors.user_factors.as_slice().to_vec(),
            item_factors: factors.item_factors.as_slice().to_vec(),
            singular_values: factors.singular_values.clone(),
            report: factors.report,
        };
        let path = self.path(dataset_hash, factors.rank(), opts);
        crate::io::write_atomic(&path, &serde_json::to_vec(&stored)?)
    }
}

/// [`pure_svd`] behind an optional [`FactorCache`].
pub fn pure_svd_cached(
    r: &RatingMatrix,
    rank: usize,
    opts: &SvdOptions,
    cache: Option<&FactorCache>,
) -> Result<Factorization> {
    let Some(cache) = cache else {
        return pure_svd(r, rank, opts);
    };
    let hash = r.content_hash();
    if let Some(found) = cache.load(&hash, rank, opts)? {
        return Ok(found);
    }
    let fresh = pure_svd(r, rank, opts)?;
    cache.store(&hash, opts, &fresh)?;
    Ok(fresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use rand::Rng;

    fn diag321() -> RatingMatrix {
        RatingMatrix::from_dense(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, 2.0, 1.0,
        ])))
        .unwrap()
    }

    fn random_sparse(n: usize, m: usize, density: f64, seed: u64) -> RatingMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = DMatrix::from_fn(n, m, |_, _| {
            if rng.random::<f64>() < density {
                rng.random_range(1..=5) as f64
            } else {
                0.0
            }
        });
        RatingMatrix::from_dense(&d).unwrap()
    }

    #[test]
    fn eckart_young_on_diagonal() {
        for solver in [SvdSolver::Dense, SvdSolver::Randomized] {
            let opts = SvdOptions {
                solver,
                ..Default::default()
            };
            let f = pure_svd(&diag321(), 2, &opts).unwrap();
            assert!((f.residual_norm(&diag321()) - 1.0).abs() < 1e-8, "{solver:?}");
            assert!((f.singular_values()[0] - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn full_rank_reconstruction() {
        let r = random_sparse(12, 9, 0.6, 4);
        let f = pure_svd(&r, 9, &SvdOptions::default()).unwrap();
        assert!(f.residual_norm(&r) <= 1e-8);
    }

    #[test]
    fn item_factors_have_orthonormal_rows() {
        let r = random_sparse(60, 40, 0.2, 5);
        for solver in [SvdSolver::Dense, SvdSolver::Randomized] {
            let opts = SvdOptions {
                solver,
                ..Default::default()
            };
            let f = pure_svd(&r, 6, &opts).unwrap();
            let q = f.item_factors();
            let gram = q * q.transpose();
            assert!((gram - DMatrix::identity(6, 6)).norm() < 1e-8, "{solver:?}");
            assert!(f.singular_values().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn randomized_matches_dense_oracle_on_random_sparse() {
        let r = random_sparse(200, 150, 0.1, 6);
        let (_, s, _) = sorted_svd(&r.to_dense());
        let expected = s.as_slice()[10..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let opts = SvdOptions {
            solver: SvdSolver::Randomized,
            ..Default::default()
        };
        let f = pure_svd(&r, 10, &opts).unwrap();
        let got = f.residual_norm(&r);
        assert!((got - expected).abs() / expected < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn residual_nonincreasing_in_rank() {
        let r = random_sparse(40, 30, 0.3, 7);
        let res: Vec<f64> = (1..=8)
            .map(|f| pure_svd(&r, f, &SvdOptions::default()).unwrap().residual_norm(&r))
            .collect();
        assert!(res.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{res:?}");
    }

    #[test]
    fn randomized_is_deterministic_per_seed() {
        let r = random_sparse(80, 50, 0.2, 8);
        let opts = SvdOptions {
            solver: SvdSolver::Randomized,
            seed: 3,
            ..Default::default()
        };
        assert_eq!(pure_svd(&r, 5, &opts).unwrap(), pure_svd(&r, 5, &opts).unwrap());
    }

    #[test]
    fn rank_out_of_range() {
        assert!(matches!(
            pure_svd(&diag321(), 4, &SvdOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            pure_svd(&diag321(), 0, &SvdOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn convergence_failure_reports_residual() {
        let r = random_sparse(100, 80, 0.2, 9);
        let opts = SvdOptions {
            solver: SvdSolver::Randomized,
            max_iters: 1,
            oversampling: Some(0),
            tol: 1e-14,
            ..Default::default()
        };
        match pure_svd(&r, 10, &opts) {
            Err(Error::Convergence { iterations, residual }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 1e-14);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn predicted_rating_is_dot_product() {
        let id = DMatrix::identity(2, 2);
        let f = Factorization::from_factors(id.clone(), id, vec![1.0, 1.0]).unwrap();
        assert_eq!(f.predicted_rating(0, 0).unwrap(), 1.0);
        assert_eq!(f.predicted_rating(0, 1).unwrap(), 0.0);
        assert!(f.predicted_rating(2, 0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = gaussian_matrix(4, 6, &mut rng);
        let q = gaussian_matrix(4, 7, &mut rng);
        let f = Factorization::from_factors(p.clone(), q.clone(), vec![1.0; 4]).unwrap();
        for u in 0..6 {
            for i in 0..7 {
                let explicit: f64 = (0..4).map(|k| p[(k, u)] * q[(k, i)]).sum();
                assert!((f.predicted_rating(u, i).unwrap() - explicit).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = FactorCache::new(dir.path());
        let r = random_sparse(30, 20, 0.3, 11);
        let opts = SvdOptions::default();
        let first = pure_svd_cached(&r, 4, &opts, Some(&cache)).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let second = pure_svd_cached(&r, 4, &opts, Some(&cache)).unwrap();
        assert_eq!(first, second);
    }
}
