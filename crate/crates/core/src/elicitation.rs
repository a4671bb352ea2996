//! Cold-start rating elicitation: pick a seed set of items, express every
//! item through the seed columns, and predict a cold user's full rating row
//! from the ratings they give to the seed items.
//!
//! Two coefficient builders are provided:
//!
//! * [`coefficients_via_ratings`]: least squares `R ≈ R(:,k) C` on the warm
//!   rating matrix (the default).
//! * [`coefficients_via_factors`]: the least-norm solution of `S C = Q`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::RatingMatrix;
use crate::error::{invalid, Error, Result};
use crate::factorization::{pure_svd_cached, FactorCache, Factorization, SvdOptions};
use crate::linalg::{least_norm_solve, select_columns};
use crate::maxvol::{initialize, rect_maxvol, rect_maxvol_auto, InitStrategy, RectMaxvolOutcome, SquareMaxvolOptions};

/// Gram matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

const PREDICTOR_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[default]
    #[serde(rename = "ratings")]
    ViaRatings,
    #[serde(rename = "factors")]
    ViaFactors,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::ViaRatings => "ratings",
            Variant::ViaFactors => "factors",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// Square Maxvol, `L0 = f`.
    Square,
    Rectangular,
}

impl Selector {
    pub fn name(self) -> &'static str {
        match self {
            Selector::Square => "square",
            Selector::Rectangular => "rectangular",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSize {
    Fixed(usize),
    /// Grow until every outside column has `w_i ≤ 1`.
    Auto,
}

impl std::fmt::Display for SeedSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedSize::Fixed(l) => write!(f, "{l}"),
            SeedSize::Auto => f.write_str("auto"),
        }
    }
}

/// Picks seed columns of `q` (`f × m`).
///
/// The square selector needs `seed_size = Fixed(f)`; it refines the LU pivots
/// with Square Maxvol, using the options from `init` when it carries any.
pub fn select_seeds(
    q: &DMatrix<f64>,
    selector: Selector,
    seed_size: SeedSize,
    init: &InitStrategy,
) -> Result<RectMaxvolOutcome> {
    let f = q.nrows();
    match (selector, seed_size) {
        (Selector::Square, SeedSize::Fixed(l)) if l == f => {
            let opts = match init {
                InitStrategy::SquareMaxvol(opts) => *opts,
                InitStrategy::LuPivots => SquareMaxvolOptions::default(),
            };
            initialize(q, &InitStrategy::SquareMaxvol(opts))
        }
        (Selector::Square, size) => Err(invalid(format!("square selector needs L0 = f = {f}, got L0 = {size}"))),
        (Selector::Rectangular, SeedSize::Fixed(l)) => rect_maxvol(q, l, init),
        (Selector::Rectangular, SeedSize::Auto) => rect_maxvol_auto(q, None, init),
    }
}

/// `C = (AᵀA)⁻¹AᵀR` with `A = R(:, k)`, the least-squares fit of every
/// column of `R` by the seed columns.
pub fn coefficients_via_ratings(r: &RatingMatrix, seeds: &[usize]) -> Result<DMatrix<f64>> {
    check_seeds(seeds, r.ncols())?;
    let a = r.column_block(seeds);
    let gram = a.transpose() * &a;
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = r.tmul_dense(&a).transpose();
    let chol = gram.cholesky().ok_or(Error::IllConditioned { condition })?;
    Ok(chol.solve(&rhs))
}

/// `C = S†Q` with `S = Q(:, k)`.
pub fn coefficients_via_factors(factors: &Factorization, seeds: &[usize]) -> Result<DMatrix<f64>> {
    let q = factors.item_factors();
    check_seeds(seeds, q.ncols())?;
    least_norm_solve(&select_columns(q, seeds), q)
}

/// `z = z′C`; unknown seed ratings are passed as `0`.
pub fn predict_cold(z_prime: &[f64], coefficients: &DMatrix<f64>) -> Result<Vec<f64>> {
    if z_prime.len() != coefficients.nrows() {
        return Err(invalid(format!(
            "{} seed ratings given for {} seed items",
            z_prime.len(),
            coefficients.nrows()
        )));
    }
    let mut z = vec![0.0; coefficients.ncols()];
    for (i, slot) in z.iter_mut().enumerate() {
        *slot = coefficients.column(i).iter().zip(z_prime).map(|(c, r)| c * r).sum();
    }
    Ok(z)
}

fn check_seeds(seeds: &[usize], m: usize) -> Result<()> {
    if seeds.is_empty() {
        return Err(invalid("empty seed set"));
    }
    let mut seen = vec![false; m];
    for &i in seeds {
        if i >= m {
            return Err(invalid(format!("seed column {i} out of range for {m} columns")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(invalid(format!("seed column {i} repeated")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictorConfig {
    pub rank: usize,
    pub seed_size: SeedSize,
    pub variant: Variant,
    pub selector: Selector,
    pub init: InitStrategy,
    pub svd: SvdOptions,
}

impl PredictorConfig {
    pub fn new(rank: usize, seed_size: SeedSize) -> Self {
        Self {
            rank,
            seed_size,
            variant: Variant::default(),
            selector: Selector::Rectangular,
            init: InitStrategy::default(),
            svd: SvdOptions::default(),
        }
    }
}

/// Seed indices plus the `L0 × m` coefficient matrix used at prediction time.
/// Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Predictor {
    seeds: Vec<usize>,
    seed_ids: Vec<i64>,
    coefficients: DMatrix<f64>,
    variant: Variant,
    rank: usize,
    dataset_hash: String,
}

#[derive(Serialize, Deserialize)]
struct PredictorHeader {
    schema_version: u32,
    variant: Variant,
    rank: usize,
    seed_size: usize,
    items: usize,
    seeds: Vec<usize>,
    seed_ids: Vec<i64>,
    dataset_hash: String,
}

impl Predictor {
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// External ids of the seed items.
    pub fn seed_ids(&self) -> &[i64] {
        &self.seed_ids
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn seed_size(&self) -> usize {
        self.seeds.len()
    }

    pub fn dataset_hash(&self) -> &str {
        &self.dataset_hash
    }

    pub fn predict(&self, z_prime: &[f64]) -> Result<Vec<f64>> {
        predict_cold(z_prime, &self.coefficients)
    }

    /// One JSON header line followed by the coefficients as CSV, one row per
    /// seed item.
    pub fn write<W: Write>(&self, mut sink: W) -> Result<()> {
        let header = PredictorHeader {
            schema_version: PREDICTOR_SCHEMA,
            variant: self.variant,
            rank: self.rank,
            seed_size: self.seeds.len(),
            items: self.coefficients.ncols(),
            seeds: self.seeds.clone(),
            seed_ids: self.seed_ids.clone(),
            dataset_hash: self.dataset_hash.clone(),
        };
        serde_json::to_writer(&mut sink, &header)?;
        sink.write_all(b"\n")?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        for row in self.coefficients.row_iter() {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut source: R) -> Result<Self> {
        let mut line = String::new();
        source.read_line(&mut line)?;
        let header: PredictorHeader = serde_json::from_str(&line)?;
        if header.schema_version != PREDICTOR_SCHEMA {
            return Err(invalid(format!(
                "unsupported predictor schema {}",
                header.schema_version
            )));
        }
        let mut values = Vec::with_capacity(header.seed_size * header.items);
        let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(source);
        for (row, record) in rd.records().enumerate() {
            let record = record?;
            if record.len() != header.items {
                return Err(Error::Parse {
                    line: row as u64 + 2,
                    message: format!("expected {} coefficients, found {}", header.items, record.len()),
                });
            }
            for field in record.iter() {
                values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                    line: row as u64 + 2,
                    message: e.to_string(),
                })?);
            }
        }
        if values.len() != header.seed_size * header.items {
            return Err(invalid(format!("expected {} coefficient rows", header.seed_size)));
        }
        Ok(Self {
            coefficients: DMatrix::from_row_slice(header.seed_size, header.items, &values),
            seeds: header.seeds,
            seed_ids: header.seed_ids,
            variant: header.variant,
            rank: header.rank,
            dataset_hash: header.dataset_hash,
        })
    }
}

/// PureSVD, seed selection and coefficients in one go.
pub fn build_predictor(r: &RatingMatrix, cfg: &PredictorConfig, cache: Option<&FactorCache>) -> Result<Predictor> {
    validate(r, cfg)?;
    let factors = pure_svd_cached(r, cfg.rank, &cfg.svd, cache)?;
    build_predictor_with_factors(r, &factors, cfg)
}

/// As [`build_predictor`] with a precomputed factorization of `r`, truncated
/// to `cfg.rank` when it is larger.
pub fn build_predictor_with_factors(
    r: &RatingMatrix,
    factors: &Factorization,
    cfg: &PredictorConfig,
) -> Result<Predictor> {
    validate(r, cfg)?;
    let truncated;
    let factors = if factors.rank() == cfg.rank {
        factors
    } else {
        truncated = factors.truncated(cfg.rank)?;
        &truncated
    };
    let outcome = select_seeds(factors.item_factors(), cfg.selector, cfg.seed_size, &cfg.init)?;
    let seeds = outcome.seed.into_indices();
    let coefficients = match cfg.variant {
        Variant::ViaRatings => coefficients_via_ratings(r, &seeds)?,
        Variant::ViaFactors => coefficients_via_factors(factors, &seeds)?,
    };
    Ok(Predictor {
        seed_ids: seeds.iter().map(|&i| r.col_ids()[i]).collect(),
        seeds,
        coefficients,
        variant: cfg.variant,
        rank: cfg.rank,
        dataset_hash: r.content_hash(),
    })
}

fn validate(r: &RatingMatrix, cfg: &PredictorConfig) -> Result<()> {
    match cfg.seed_size {
        SeedSize::Fixed(l) if l < cfg.rank => Err(invalid(format!("seed size {l} is below the rank {}", cfg.rank))),
        SeedSize::Fixed(l) if l > r.ncols() => Err(invalid(format!("seed size {l} exceeds {} items", r.ncols()))),
        SeedSize::Fixed(l) if cfg.selector == Selector::Square && l != cfg.rank => Err(invalid(format!(
            "square selector needs L0 = f, got f = {}, L0 = {l}",
            cfg.rank
        ))),
        SeedSize::Auto if cfg.selector == Selector::Square => {
            Err(invalid("automatic seed size needs the rectangular selector"))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::oracle::pinv_oracle;
    use crate::synthetic::{exact_low_rank, random_sparse};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_columns_as_seed_give_identity() {
        let r = random_sparse(20, 6, 0.7, 1);
        let c = coefficients_via_ratings(&r, &(0..6).collect::<Vec<_>>()).unwrap();
        assert!((c - DMatrix::identity(6, 6)).norm() < 1e-10);
    }

    #[test]
    fn rank_one_matrix_from_one_column() {
        let a = DMatrix::from_column_slice(5, 1, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = DMatrix::from_row_slice(1, 4, &[2.0, 1.0, 0.5, 3.0]);
        let r = RatingMatrix::from_dense(&(&a * &b)).unwrap();
        let c = coefficients_via_ratings(&r, &[2]).unwrap();
        let resid = r.column_block(&[2]) * c - r.to_dense();
        assert!(resid.norm() < 1e-12);
    }

    #[test]
    fn via_ratings_matches_normal_equations() {
        let r = random_sparse(50, 30, 0.3, 2);
        let k = [0, 4, 9, 17, 22];
        let c = coefficients_via_ratings(&r, &k).unwrap();
        let a = r.column_block(&k);
        let dense = r.to_dense();
        let reference = (a.transpose() * &a).try_inverse().unwrap() * a.transpose() * &dense;
        let res = (&a * &c - &dense).norm();
        let ref_res = (&a * &reference - &dense).norm();
        assert!((res - ref_res).abs() < 1e-8);
    }

    #[test]
    fn duplicated_column_is_ill_conditioned() {
        let d = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 2.0, 2.0, 2.0, 1.0, 3.0, 3.0, 1.0]);
        let r = RatingMatrix::from_dense(&d).unwrap();
        assert!(matches!(
            coefficients_via_ratings(&r, &[0, 1]),
            Err(Error::IllConditioned { .. })
        ));
    }

    fn factors_of(q: DMatrix<f64>) -> Factorization {
        let f = q.nrows();
        Factorization::from_factors(DMatrix::identity(f, f), q, vec![1.0; f]).unwrap()
    }

    #[test]
    fn identity_seed_returns_q() {
        let q = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.3, -0.2, 0.0, 1.0, 0.5, 0.7]);
        let c = coefficients_via_factors(&factors_of(q.clone()), &[0, 1]).unwrap();
        assert!((c - q).norm() < 1e-14);
    }

    #[test]
    fn square_seed_gives_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = gaussian_matrix(3, 9, &mut rng);
        let k = [1, 4, 7];
        let c = coefficients_via_factors(&factors_of(q.clone()), &k).unwrap();
        let direct = select_columns(&q, &k).try_inverse().unwrap() * &q;
        assert!((c - direct).norm() < 1e-10);
    }

    #[test]
    fn via_factors_matches_pinv_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = gaussian_matrix(4, 25, &mut rng);
        let k = [0, 3, 5, 8, 13, 20, 24];
        let c = coefficients_via_factors(&factors_of(q.clone()), &k).unwrap();
        let oracle = pinv_oracle(&select_columns(&q, &k)) * &q;
        assert!((c - oracle).norm() < 1e-8);
    }

    #[test]
    fn least_norm_beats_other_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = gaussian_matrix(3, 12, &mut rng);
            let k = [0, 2, 5, 7, 11];
            let s = select_columns(&q, &k);
            let c = coefficients_via_factors(&factors_of(q.clone()), &k).unwrap();
            // C + N X for N spanning the null space of S is another solution.
            let (_, _, vt) = crate::linalg::sorted_svd(&(s.transpose() * &s));
            let null = vt.rows(3, 2).transpose();
            let other = &c + &null * gaussian_matrix(2, 12, &mut rng);
            assert!((&s * &other - &q).norm() < 1e-9);
            assert!(c.norm() <= other.norm() + 1e-10);
        }
    }

    #[test]
    fn error_decomposition_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = gaussian_matrix(3, 15, &mut rng);
        let q = gaussian_matrix(3, 10, &mut rng);
        let e = gaussian_matrix(15, 10, &mut rng) * 0.1;
        let r = p.transpose() * &q + &e;
        let k = [1, 4, 6, 9];
        let c = coefficients_via_factors(&factors_of(q.clone()), &k).unwrap();
        let lhs = &r - select_columns(&r, &k) * &c;
        let rhs = &e - select_columns(&e, &k) * &c;
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn predict_zero_and_mismatch() {
        let c = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        assert_eq!(predict_cold(&[0.0, 0.0], &c).unwrap(), vec![0.0; 3]);
        assert_eq!(predict_cold(&[4.0, 2.0], &c).unwrap(), vec![4.0, 2.0, 3.0]);
        assert!(predict_cold(&[1.0], &c).is_err());
    }

    #[test]
    fn square_and_degenerate_rectangle() {
        let r = random_sparse(40, 30, 0.3, 7);
        let mut cfg = PredictorConfig::new(5, SeedSize::Fixed(5));
        cfg.selector = Selector::Square;
        assert_eq!(build_predictor(&r, &cfg, None).unwrap().seeds().len(), 5);
        cfg.seed_size = SeedSize::Fixed(6);
        assert!(build_predictor(&r, &cfg, None).is_err());

        let factors = crate::factorization::pure_svd(&r, 5, &SvdOptions::default()).unwrap();
        let lu = crate::maxvol::lu_pivot_init(factors.item_factors()).unwrap();
        let mut rect = PredictorConfig::new(5, SeedSize::Fixed(5));
        rect.variant = Variant::ViaFactors;
        let p = build_predictor_with_factors(&r, &factors, &rect).unwrap();
        assert_eq!(p.seeds(), lu.indices());
    }

    #[test]
    fn exact_rank_recovery_of_rows() {
        let r = exact_low_rank(60, 40, 5, 8);
        let mut cfg = PredictorConfig::new(5, SeedSize::Fixed(15));
        cfg.variant = Variant::ViaFactors;
        let p = build_predictor(&r, &cfg, None).unwrap();
        let dense = r.to_dense();
        for u in [0, 17, 59] {
            let z_prime: Vec<f64> = p.seeds().iter().map(|&i| dense[(u, i)]).collect();
            let z = p.predict(&z_prime).unwrap();
            for i in 0..40 {
                assert!((z[i] - dense[(u, i)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn predictor_round_trip() {
        let r = random_sparse(30, 20, 0.4, 9);
        let p = build_predictor(&r, &PredictorConfig::new(3, SeedSize::Fixed(6)), None).unwrap();
        let mut buf = Vec::new();
        p.write(&mut buf).unwrap();
        let back = Predictor::read(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.seed_ids().len(), 6);
    }

    #[test]
    fn auto_needs_rectangular() {
        let r = random_sparse(30, 20, 0.4, 10);
        let mut cfg = PredictorConfig::new(3, SeedSize::Auto);
        cfg.variant = Variant::ViaFactors;
        let p = build_predictor(&r, &cfg, None).unwrap();
        assert!(p.seed_size() >= 3);
        cfg.selector = Selector::Square;
        assert!(build_predictor(&r, &cfg, None).is_err());
    }
}
