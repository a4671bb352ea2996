//! Fold-based cold-start evaluation.
//!
//! Each fold in turn plays the cold entities; the predictor is built from the
//! remaining (warm) folds only. A cold entity reveals its known ratings on the
//! seed items, the predicted row ranks all non-seed items, and the top of that
//! list is scored against the entity's relevant items.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{FoldSplit, RatingMatrix};
use crate::elicitation::{
    coefficients_via_factors, coefficients_via_ratings, select_seeds, SeedSize, Selector, Variant,
};
use crate::error::{invalid, Result};
use crate::factorization::{pure_svd_cached, FactorCache, Factorization, SvdOptions};
use crate::maxvol::InitStrategy;

pub const REPORT_SCHEMA: u32 = 1;

pub const COVERAGE_DEFINITION: &str =
    "toolkit definition: fraction of cold entities with at least one known rating on the seed set";
pub const DIVERSITY_DEFINITION: &str = "toolkit definition: 1 - mean pairwise |cosine| of the seed latent vectors";

/// `|top-k ∩ relevant| / k`; `k` is capped at the list length. `relevant`
/// must be sorted ascending.
pub fn precision_at_k(ranked: &[usize], relevant: &[usize], k: usize) -> Result<f64> {
    let k = check_k(ranked, k)?;
    if k == 0 {
        return Ok(0.0);
    }
    Ok(hits(&ranked[..k], relevant) as f64 / k as f64)
}

/// `|top-k ∩ relevant| / |relevant|`, `0` when nothing is relevant.
pub fn recall_at_k(ranked: &[usize], relevant: &[usize], k: usize) -> Result<f64> {
    let k = check_k(ranked, k)?;
    if relevant.is_empty() {
        return Ok(0.0);
    }
    Ok(hits(&ranked[..k], relevant) as f64 / relevant.len() as f64)
}

fn check_k(ranked: &[usize], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    Ok(k.min(ranked.len()))
}

fn hits(top: &[usize], relevant: &[usize]) -> usize {
    debug_assert!(relevant.windows(2).all(|w| w[0] < w[1]));
    top.iter().filter(|i| relevant.binary_search(i).is_ok()).count()
}

/// Fraction of rows of `r` with at least one known rating in the seed columns.
pub fn coverage(r: &RatingMatrix, seeds: &[usize]) -> f64 {
    if r.nrows() == 0 {
        return 0.0;
    }
    let mut is_seed = vec![false; r.ncols()];
    for &i in seeds {
        is_seed[i] = true;
    }
    let covered = (0..r.nrows()).filter(|&u| r.row(u).any(|(i, _)| is_seed[i])).count();
    covered as f64 / r.nrows() as f64
}

/// `1 −` mean over seed pairs of `|cos(q_i, q_j)|`. A zero vector counts as
/// orthogonal to everything.
pub fn diversity(factors: &Factorization, seeds: &[usize]) -> Result<f64> {
    if seeds.len() < 2 {
        return Err(invalid("diversity needs at least two seed items"));
    }
    let q = factors.item_factors();
    if let Some(&bad) = seeds.iter().find(|&&i| i >= q.ncols()) {
        return Err(invalid(format!("seed column {bad} out of range")));
    }
    let norms: Vec<f64> = seeds.iter().map(|&i| q.column(i).norm()).collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..seeds.len() {
        for b in a + 1..seeds.len() {
            let denom = norms[a] * norms[b];
            if denom > 0.0 {
                total += (q.column(seeds[a]).dot(&q.column(seeds[b])) / denom).abs().min(1.0);
            }
            pairs += 1;
        }
    }
    Ok(1.0 - total / pairs as f64)
}

/// Which axis is cold. Item mode runs the user protocol on `Rᵀ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    User,
    Item,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankChoice {
    Fixed(usize),
    /// Chosen per fold by cross-validation over the warm folds: each warm fold
    /// is held out once and the mean Precision@`primary_k` decides, ties going
    /// to the smaller rank. Ranks above the seed size are skipped.
    Tuned(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub selector: Selector,
    pub rank: RankChoice,
    pub seed_size: SeedSize,
    pub variant: Variant,
    pub k_list: Vec<usize>,
    pub mode: Mode,
    /// Ratings at or above this value are relevant.
    pub relevance_threshold: f64,
    pub svd: SvdOptions,
    pub init: InitStrategy,
    /// The `k` used for rank validation.
    pub primary_k: usize,
}

impl EvalConfig {
    /// Square Maxvol with `f = L0 = seed_size`.
    pub fn square(seed_size: usize) -> Self {
        Self::new(
            Selector::Square,
            RankChoice::Fixed(seed_size),
            SeedSize::Fixed(seed_size),
        )
    }

    pub fn rectangular(rank: RankChoice, seed_size: SeedSize) -> Self {
        Self::new(Selector::Rectangular, rank, seed_size)
    }

    fn new(selector: Selector, rank: RankChoice, seed_size: SeedSize) -> Self {
        Self {
            selector,
            rank,
            seed_size,
            variant: Variant::default(),
            k_list: vec![5, 10, 20],
            mode: Mode::User,
            relevance_threshold: 4.0,
            svd: SvdOptions {
                tol: 1e-6,
                ..SvdOptions::default()
            },
            init: InitStrategy::default(),
            primary_k: 10,
        }
    }

    /// Largest rank any fold can use.
    pub fn max_rank(&self) -> usize {
        match &self.rank {
            RankChoice::Fixed(f) => *f,
            RankChoice::Tuned(grid) => grid.iter().copied().filter(|&f| self.admits_rank(f)).max().unwrap_or(0),
        }
    }

    fn admits_rank(&self, f: usize) -> bool {
        f > 0 && matches!(self.seed_size, SeedSize::Auto)
            || matches!(self.seed_size, SeedSize::Fixed(l) if f > 0 && f <= l)
    }

    fn candidate_ranks(&self) -> Vec<usize> {
        match &self.rank {
            RankChoice::Fixed(f) => vec![*f],
            RankChoice::Tuned(grid) => {
                let mut g: Vec<usize> = grid.iter().copied().filter(|&f| self.admits_rank(f)).collect();
                g.sort_unstable();
                g.dedup();
                g
            }
        }
    }

    fn metric_ks(&self) -> Vec<usize> {
        let mut ks = self.k_list.clone();
        ks.push(self.primary_k);
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() || self.k_list.contains(&0) || self.primary_k == 0 {
            return Err(invalid("k values must be positive and k_list nonempty"));
        }
        match (self.selector, self.seed_size, &self.rank) {
            (Selector::Square, SeedSize::Fixed(l), RankChoice::Fixed(f)) if l == *f => {}
            (Selector::Square, _, _) => return Err(invalid("square selector needs a fixed rank equal to L0")),
            (_, _, RankChoice::Fixed(f)) if !self.admits_rank(*f) => {
                return Err(invalid(format!("rank {f} does not fit seed size {}", self.seed_size)))
            }
            (_, _, RankChoice::Tuned(_)) if self.candidate_ranks().is_empty() => {
                return Err(invalid(format!(
                    "no rank in the grid fits seed size {}",
                    self.seed_size
                )))
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation, `0` for a single value.
    pub sigma: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                sigma: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sigma = if n > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, sigma }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub rank: usize,
    pub seeds: Vec<usize>,
    pub seed_ids: Vec<i64>,
    pub cold_entities: usize,
    pub precision_at_k: BTreeMap<usize, f64>,
    pub recall_at_k: BTreeMap<usize, f64>,
    pub coverage: f64,
    pub diversity: Option<f64>,
    /// Rank → validation Precision@`primary_k`, present for tuned ranks.
    pub validation: Option<BTreeMap<usize, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub precision_at_k: BTreeMap<usize, Stat>,
    pub recall_at_k: BTreeMap<usize, Stat>,
    pub coverage: Stat,
    pub diversity: Option<Stat>,
    pub coverage_definition: String,
    pub diversity_definition: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub config: EvalConfig,
    pub dataset_hash: String,
    pub fold_count: usize,
    pub fold_seed: u64,
    pub per_fold: Vec<FoldReport>,
    pub skipped_folds: Vec<usize>,
    pub aggregate: Aggregate,
}

impl EvalReport {
    pub fn mean_precision(&self, k: usize) -> Option<f64> {
        self.aggregate.precision_at_k.get(&k).map(|s| s.mean)
    }

    /// Chosen rank if every fold used the same one.
    pub fn uniform_rank(&self) -> Option<usize> {
        let first = self.per_fold.first()?.rank;
        self.per_fold.iter().all(|f| f.rank == first).then_some(first)
    }

    pub fn write_json<W: Write>(&self, sink: W) -> Result<()> {
        serde_json::to_writer_pretty(sink, self)?;
        Ok(())
    }

    /// Plot-ready rows `schema_version,selector,f,L0,k,metric,mean,sigma,best`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(CSV_HEADER)?;
        self.csv_rows(&mut w, "")?;
        w.flush()?;
        Ok(())
    }

    fn csv_rows<W: Write>(&self, w: &mut csv::Writer<W>, best: &str) -> Result<()> {
        let f = self
            .uniform_rank()
            .map(|f| f.to_string())
            .unwrap_or_else(|| "tuned".into());
        let l0 = self.config.seed_size.to_string();
        let selector = self.config.selector.name();
        let schema = REPORT_SCHEMA.to_string();
        let mut row = |k: String, metric: &str, s: &Stat| {
            w.write_record([
                &schema,
                selector,
                &f,
                &l0,
                &k,
                metric,
                &s.mean.to_string(),
                &s.sigma.to_string(),
                best,
            ])
        };
        for (k, s) in &self.aggregate.precision_at_k {
            row(k.to_string(), "precision", s)?;
        }
        for (k, s) in &self.aggregate.recall_at_k {
            row(k.to_string(), "recall", s)?;
        }
        row(String::new(), "coverage", &self.aggregate.coverage)?;
        if let Some(d) = &self.aggregate.diversity {
            row(String::new(), "diversity", d)?;
        }
        Ok(())
    }
}

const CSV_HEADER: [&str; 9] = [
    "schema_version",
    "selector",
    "f",
    "L0",
    "k",
    "metric",
    "mean",
    "sigma",
    "best",
];

/// Shared state for repeated evaluations over one dataset and fold split:
/// the oriented rating matrix and a memo of factorizations per training set.
///
/// Every training set is factorized once at `max_rank` and truncated on use,
/// so results do not depend on evaluation order.
pub struct Evaluator {
    ratings: RatingMatrix,
    mode: Mode,
    folds: FoldSplit,
    max_rank: usize,
    svd: SvdOptions,
    cache: Option<FactorCache>,
    memo: Mutex<HashMap<Vec<usize>, Arc<Factorization>>>,
}

struct SplitScore {
    seeds: Vec<usize>,
    users: usize,
    with_relevant: usize,
    precision: Vec<f64>,
    recall: Vec<f64>,
    coverage: f64,
    diversity: Option<f64>,
}

impl Evaluator {
    pub fn new(r: &RatingMatrix, mode: Mode, folds: FoldSplit, max_rank: usize, svd: SvdOptions) -> Result<Self> {
        let ratings = match mode {
            Mode::User => r.clone(),
            Mode::Item => r.transpose(),
        };
        if folds.entity_count() != ratings.nrows() {
            return Err(invalid(format!(
                "fold split covers {} entities but the cold axis has {}",
                folds.entity_count(),
                ratings.nrows()
            )));
        }
        if max_rank == 0 {
            return Err(invalid("rank must be positive"));
        }
        Ok(Self {
            ratings,
            mode,
            folds,
            max_rank,
            svd,
            cache: None,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_cache(mut self, cache: FactorCache) -> Self {
        self.cache = Some(cache);
        self
    }

    /// The matrix with cold entities as rows.
    pub fn ratings(&self) -> &RatingMatrix {
        &self.ratings
    }

    pub fn folds(&self) -> &FoldSplit {
        &self.folds
    }

    /// Factorization of the rows outside `excluded` folds at rank `f`.
    pub fn factors(&self, excluded: &[usize], f: usize) -> Result<Factorization> {
        let mut key = excluded.to_vec();
        key.sort_unstable();
        let cached = self.memo.lock().expect("memo lock").get(&key).cloned();
        let full = match cached {
            Some(full) => full,
            None => {
                let train = self.ratings.select_rows(&self.folds.members_excluding(&key));
                let rank = self.max_rank.min(train.nrows()).min(train.ncols());
                let fresh = Arc::new(pure_svd_cached(&train, rank, &self.svd, self.cache.as_ref())?);
                self.memo.lock().expect("memo lock").entry(key).or_insert(fresh).clone()
            }
        };
        if f > full.rank() {
            return Err(invalid(format!(
                "rank {f} exceeds the evaluator's rank {}",
                full.rank()
            )));
        }
        if f == full.rank() {
            Ok((*full).clone())
        } else {
            full.truncated(f)
        }
    }

    pub fn evaluate(&self, cfg: &EvalConfig) -> Result<EvalReport> {
        cfg.validate()?;
        if cfg.mode != self.mode {
            return Err(invalid("configuration mode differs from the evaluator's"));
        }
        if cfg.max_rank() > self.max_rank {
            return Err(invalid(format!(
                "rank {} exceeds the evaluator's rank {}",
                cfg.max_rank(),
                self.max_rank
            )));
        }
        if matches!(cfg.rank, RankChoice::Tuned(_)) && self.folds.fold_count() < 3 {
            return Err(invalid("rank tuning needs at least three folds"));
        }
        let ks = cfg.metric_ks();
        let folds: Vec<Option<FoldReport>> = (0..self.folds.fold_count())
            .into_par_iter()
            .map(|t| self.evaluate_fold(t, cfg, &ks))
            .collect::<Result<_>>()?;

        let skipped: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_none())
            .map(|(t, _)| t)
            .collect();
        let per_fold: Vec<FoldReport> = folds.into_iter().flatten().collect();
        if per_fold.is_empty() {
            return Err(invalid("no fold has a cold entity with relevant items"));
        }
        let stat_of = |pick: &dyn Fn(&FoldReport) -> f64| Stat::of(&per_fold.iter().map(pick).collect::<Vec<_>>());
        let precision_at_k = cfg
            .k_list
            .iter()
            .map(|&k| (k, stat_of(&|f| f.precision_at_k[&k])))
            .collect();
        let recall_at_k = cfg
            .k_list
            .iter()
            .map(|&k| (k, stat_of(&|f| f.recall_at_k[&k])))
            .collect();
        let diversities: Vec<f64> = per_fold.iter().filter_map(|f| f.diversity).collect();
        let aggregate = Aggregate {
            precision_at_k,
            recall_at_k,
            coverage: stat_of(&|f| f.coverage),
            diversity: (diversities.len() == per_fold.len()).then(|| Stat::of(&diversities)),
            coverage_definition: COVERAGE_DEFINITION.into(),
            diversity_definition: DIVERSITY_DEFINITION.into(),
        };
        Ok(EvalReport {
            schema_version: REPORT_SCHEMA,
            config: cfg.clone(),
            dataset_hash: self.ratings.content_hash(),
            fold_count: self.folds.fold_count(),
            fold_seed: self.folds.seed(),
            per_fold,
            skipped_folds: skipped,
            aggregate,
        })
    }

    fn evaluate_fold(&self, t: usize, cfg: &EvalConfig, ks: &[usize]) -> Result<Option<FoldReport>> {
        let (rank, validation) = match &cfg.rank {
            RankChoice::Fixed(f) => (*f, None),
            RankChoice::Tuned(_) => {
                let scores = self.validation_scores(t, &cfg.candidate_ranks(), cfg)?;
                let best = scores
                    .iter()
                    .fold(None, |best: Option<(usize, f64)>, (&f, &s)| match best {
                        Some((_, bs)) if s <= bs => best,
                        _ => Some((f, s)),
                    })
                    .map(|(f, _)| f)
                    .ok_or_else(|| invalid(format!("no validation split of fold {t} has relevant items")))?;
                (best, Some(scores))
            }
        };
        let factors = self.factors(&[t], rank)?;
        let cold = self.folds.members(t);
        let score = self.score_split(&self.folds.members_excluding(&[t]), &cold, &factors, cfg, ks)?;
        if score.with_relevant == 0 {
            log::warn!("fold {t}: no cold entity has relevant items; skipped");
            return Ok(None);
        }
        let pick = |v: &[f64]| {
            cfg.k_list
                .iter()
                .map(|k| (*k, v[ks.binary_search(k).expect("k listed")]))
                .collect()
        };
        Ok(Some(FoldReport {
            fold: t,
            rank,
            seed_ids: score.seeds.iter().map(|&i| self.ratings.col_ids()[i]).collect(),
            seeds: score.seeds.clone(),
            cold_entities: score.users,
            precision_at_k: pick(&score.precision),
            recall_at_k: pick(&score.recall),
            coverage: score.coverage,
            diversity: score.diversity,
            validation,
        }))
    }

    /// Rank → mean over warm folds `v ≠ t` of Precision@`primary_k` when
    /// training on the folds other than `t` and `v` and testing on `v`.
    /// Splits without relevant items are left out of the mean.
    pub fn validation_scores(&self, t: usize, ranks: &[usize], cfg: &EvalConfig) -> Result<BTreeMap<usize, f64>> {
        let ks = [cfg.primary_k];
        let inner: Vec<usize> = (0..self.folds.fold_count()).filter(|&v| v != t).collect();
        let per_split: Vec<Vec<Option<f64>>> = inner
            .par_iter()
            .map(|&v| {
                let train = self.folds.members_excluding(&[t, v]);
                let test = self.folds.members(v);
                ranks
                    .iter()
                    .map(|&f| {
                        let factors = self.factors(&[t, v], f)?;
                        let s = self.score_split(&train, &test, &factors, cfg, &ks)?;
                        Ok((s.with_relevant > 0).then(|| s.precision[0]))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut out = BTreeMap::new();
        for (j, &f) in ranks.iter().enumerate() {
            let vals: Vec<f64> = per_split.iter().filter_map(|s| s[j]).collect();
            if !vals.is_empty() {
                out.insert(f, vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
        Ok(out)
    }

    fn score_split(
        &self,
        train: &[usize],
        test: &[usize],
        factors: &Factorization,
        cfg: &EvalConfig,
        ks: &[usize],
    ) -> Result<SplitScore> {
        let r = &self.ratings;
        let m = r.ncols();
        let seed_size = match cfg.seed_size {
            SeedSize::Fixed(l) => SeedSize::Fixed(l.min(m)),
            auto => auto,
        };
        let outcome = select_seeds(factors.item_factors(), cfg.selector, seed_size, &cfg.init)?;
        let seeds = outcome.seed.into_indices();
        let coefficients = match cfg.variant {
            Variant::ViaRatings => coefficients_via_ratings(&r.select_rows(train), &seeds)?,
            Variant::ViaFactors => coefficients_via_factors(factors, &seeds)?,
        };
        let test_rows = r.select_rows(test);
        let z_prime = test_rows.column_block(&seeds);
        let scores: DMatrix<f64> = &z_prime * &coefficients;

        let mut is_seed = vec![false; m];
        for &i in &seeds {
            is_seed[i] = true;
        }
        let candidates: Vec<usize> = (0..m).filter(|&i| !is_seed[i]).collect();
        let k_max = ks.iter().copied().max().unwrap_or(1).min(candidates.len());

        let mut precision = vec![0.0; ks.len()];
        let mut recall = vec![0.0; ks.len()];
        let mut with_relevant = 0;
        let mut covered = 0;
        for u in 0..test_rows.nrows() {
            let relevant: Vec<usize> = test_rows
                .row(u)
                .filter(|&(i, v)| v >= cfg.relevance_threshold && !is_seed[i])
                .map(|(i, _)| i)
                .collect();
            if test_rows.row(u).any(|(i, _)| is_seed[i]) {
                covered += 1;
            }
            if !relevant.is_empty() {
                with_relevant += 1;
            }
            let row = scores.row(u);
            let top = top_k(&candidates, |i| row[i], k_max);
            for (j, &k) in ks.iter().enumerate() {
                precision[j] += precision_at_k(&top, &relevant, k)?;
                recall[j] += recall_at_k(&top, &relevant, k)?;
            }
        }
        let users = test_rows.nrows().max(1) as f64;
        precision.iter_mut().chain(recall.iter_mut()).for_each(|x| *x /= users);
        Ok(SplitScore {
            diversity: (seeds.len() >= 2).then(|| diversity(factors, &seeds)).transpose()?,
            seeds,
            users: test_rows.nrows(),
            with_relevant,
            precision,
            recall,
            coverage: covered as f64 / users,
        })
    }
}

/// The `k` candidates with the highest score, ties by ascending index.
fn top_k(candidates: &[usize], score: impl Fn(usize) -> f64, k: usize) -> Vec<usize> {
    let order = |a: &usize, b: &usize| score(*b).total_cmp(&score(*a)).then(a.cmp(b));
    let mut items = candidates.to_vec();
    if k == 0 {
        return Vec::new();
    }
    if k < items.len() {
        items.select_nth_unstable_by(k - 1, order);
        items.truncate(k);
    }
    items.sort_unstable_by(order);
    items
}

/// One cold-start evaluation; see [`Evaluator`] to share factorizations
/// between several configurations.
pub fn evaluate_cold_start(r: &RatingMatrix, folds: &FoldSplit, cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    Evaluator::new(r, cfg.mode, folds.clone(), cfg.max_rank(), cfg.svd)?.evaluate(cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub seed_size: usize,
    pub rank: usize,
    /// Mean validation Precision@`primary_k` over all inner splits.
    pub validation: f64,
    /// Highest validation score for this seed size (ties: smaller rank).
    pub best: bool,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub schema_version: u32,
    pub selector: Selector,
    pub cells: Vec<SweepCell>,
}

/// All `(L0, f)` cells: `f = L0` for the square selector, every `f ≤ L0`
/// from `rank_grid` for the rectangular one.
pub fn sweep(
    evaluator: &Evaluator,
    base: &EvalConfig,
    seed_sizes: &[usize],
    rank_grid: &[usize],
) -> Result<SweepTable> {
    let mut grid = Vec::new();
    for &l in seed_sizes {
        match base.selector {
            Selector::Square => grid.push((l, l)),
            Selector::Rectangular => grid.extend(rank_grid.iter().filter(|&&f| f > 0 && f <= l).map(|&f| (l, f))),
        }
    }
    if grid.is_empty() {
        return Err(invalid("sweep grid is empty"));
    }
    if evaluator.folds().fold_count() < 3 {
        return Err(invalid("sweep validation needs at least three folds"));
    }
    let mut cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(l, f)| {
            let cfg = EvalConfig {
                rank: RankChoice::Fixed(f),
                seed_size: SeedSize::Fixed(l),
                ..base.clone()
            };
            let report = evaluator.evaluate(&cfg)?;
            let mut scores = Vec::new();
            for t in 0..evaluator.folds().fold_count() {
                scores.extend(evaluator.validation_scores(t, &[f], &cfg)?.values().copied());
            }
            let validation = Stat::of(&scores).mean;
            Ok(SweepCell {
                seed_size: l,
                rank: f,
                validation,
                best: false,
                report,
            })
        })
        .collect::<Result<_>>()?;
    for &l in seed_sizes {
        let best = cells.iter().enumerate().filter(|(_, c)| c.seed_size == l).fold(
            None,
            |best: Option<(usize, f64)>, (j, c)| match best {
                Some((_, bv)) if !(c.validation > bv) => best,
                _ => Some((j, c.validation)),
            },
        );
        if let Some((j, _)) = best {
            cells[j].best = true;
        }
    }
    Ok(SweepTable {
        schema_version: REPORT_SCHEMA,
        selector: base.selector,
        cells,
    })
}

impl SweepTable {
    pub fn write_json<W: Write>(&self, sink: W) -> Result<()> {
        serde_json::to_writer_pretty(sink, self)?;
        Ok(())
    }

    /// Every cell's metric rows, `best` set per seed size.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(CSV_HEADER)?;
        for cell in &self.cells {
            cell.report.csv_rows(&mut w, if cell.best { "true" } else { "false" })?;
        }
        w.flush()?;
        Ok(())
    }

    /// `schema_version,selector,L0,f,validation` for the best rank per seed size.
    pub fn write_optimal_rank_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["schema_version", "selector", "L0", "f", "validation"])?;
        for c in self.cells.iter().filter(|c| c.best) {
            w.write_record([
                REPORT_SCHEMA.to_string(),
                self.selector.name().to_string(),
                c.seed_size.to_string(),
                c.rank.to_string(),
                c.validation.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
