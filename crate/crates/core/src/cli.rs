//! Command-line front end: `select`, `evaluate`, `sweep` and `verify`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{read_ratings_file, split_folds, HeaderMode, RatingMatrix, RatingsFormat};
use crate::elicitation::{build_predictor_with_factors, select_seeds, PredictorConfig, SeedSize, Selector, Variant};
use crate::evaluation::{sweep, EvalConfig, Evaluator, Mode, RankChoice};
use crate::factorization::{pure_svd_cached, FactorCache, SvdOptions, SvdReport, SvdSolver};
use crate::io::write_atomic;
use crate::maxvol::{log_rectangular_volume, write_weights_csv, InitStrategy, SquareMaxvolOptions};
use crate::verify::{run_verify, Fault, VerifyOptions};

pub const OUTPUT_SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "rectmaxvol",
    version,
    about = "Maximal-volume seed sets for cold-start rating elicitation"
)]
pub struct Cli {
    /// Seed for every random choice: SVD start block, fold split, verify instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory for cached factorizations.
    #[arg(long, global = true, env = "RECTMAXVOL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick a seed set and report it as JSON.
    Select(SelectArgs),
    /// Fold-based cold-start evaluation of one configuration.
    Evaluate(EvaluateArgs),
    /// Evaluate a grid of seed sizes and ranks.
    Sweep(SweepArgs),
    /// Run the oracle equivalence checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Ratings file with `user_id,item_id,rating[,timestamp]` lines.
    #[arg(long, short = 'r')]
    pub ratings: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long, value_enum, default_value_t = HeaderArg::Auto)]
    pub header: HeaderArg,
    /// Cold axis; `item` works on the transposed matrix.
    #[arg(long, value_enum, default_value_t = ModeArg::User)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = SelectorArg::Rectangular)]
    pub selector: SelectorArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Ratings)]
    pub variant: VariantArg,
    /// Initial square seed: LU pivots, or LU pivots refined by Square Maxvol.
    #[arg(long, value_enum, default_value_t = InitArg::Lu)]
    pub init: InitArg,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Relative residual target of the iterative SVD.
    #[arg(long)]
    pub svd_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Factorization rank.
    #[arg(short = 'f', long = "rank")]
    pub rank: usize,
    /// Seed set size, or `auto`; defaults to the rank.
    #[arg(short = 'L', long = "seed-size", value_parser = parse_seed_size)]
    pub seed_size: Option<SeedSize>,
    /// Seed report (JSON).
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Per-column `w` at termination (CSV).
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Serialized predictor built with `--variant`.
    #[arg(long)]
    pub predictor: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long = "k", value_delimiter = ',', default_values_t = [5, 10, 20])]
    pub k_list: Vec<usize>,
    /// `k` used to pick ranks on validation folds.
    #[arg(long, default_value_t = 10)]
    pub primary_k: usize,
    /// Ratings at or above this value are relevant.
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
    #[arg(long)]
    pub out_json: PathBuf,
    #[arg(long)]
    pub out_csv: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Fixed rank; with the square selector it must equal the seed size.
    #[arg(short = 'f', long = "rank", conflicts_with = "rank_grid")]
    pub rank: Option<usize>,
    /// Ranks to choose from per fold by validation, e.g. `2:30:2` or `5,10`.
    #[arg(long, value_parser = parse_grid)]
    pub rank_grid: Option<Grid>,
    #[arg(short = 'L', long = "seed-size", value_parser = parse_seed_size)]
    pub seed_size: SeedSize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Seed sizes, e.g. `5:100:5`.
    #[arg(long, value_parser = parse_grid)]
    pub seed_sizes: Grid,
    /// Ranks paired with each seed size (rectangular only); pairs with
    /// `f > L0` are dropped.
    #[arg(long, value_parser = parse_grid)]
    pub rank_grid: Option<Grid>,
    /// Best rank per seed size (CSV).
    #[arg(long)]
    pub out_optimal: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Corrupt the norm update on purpose; the run must then fail.
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum HeaderArg {
    Auto,
    Present,
    Absent,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    User,
    Item,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SelectorArg {
    Square,
    Rectangular,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Ratings,
    Factors,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InitArg {
    Lu,
    Maxvol,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Randomized,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FaultArg {
    NormUpdate,
}

/// Sorted, deduplicated list of positive integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

fn parse_seed_size(s: &str) -> Result<SeedSize, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(SeedSize::Auto);
    }
    match s.parse::<usize>() {
        Ok(0) => Err("seed size must be positive".into()),
        Ok(l) => Ok(SeedSize::Fixed(l)),
        Err(_) => Err(format!("expected a positive integer or `auto`, got {s:?}")),
    }
}

/// `a:b:step` (inclusive) or a comma-separated list.
fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("not a positive integer: {t:?}"))
    };
    let mut values = if let Some((range, step)) = s.rsplit_once(':').filter(|_| s.matches(':').count() == 2) {
        let (a, b) = range.split_once(':').expect("two colons");
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step == 0 || a > b {
            return Err(format!("bad range {s:?}"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.contains(&0) {
        return Err("grid values must be positive".into());
    }
    values.sort_unstable();
    values.dedup();
    Ok(Grid(values))
}

/// Parsed and cross-checked run parameters.
#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub cache: Option<FactorCache>,
    pub job: Job,
}

#[derive(Debug)]
pub enum Job {
    Select {
        dataset: DatasetSpec,
        predictor: PredictorConfig,
        out: PathBuf,
        weights: Option<PathBuf>,
        predictor_out: Option<PathBuf>,
    },
    Evaluate {
        dataset: DatasetSpec,
        config: EvalConfig,
        folds: usize,
        out_json: PathBuf,
        out_csv: PathBuf,
    },
    Sweep {
        dataset: DatasetSpec,
        base: EvalConfig,
        folds: usize,
        seed_sizes: Vec<usize>,
        rank_grid: Vec<usize>,
        out_json: PathBuf,
        out_csv: PathBuf,
        out_optimal: Option<PathBuf>,
    },
    Verify {
        options: VerifyOptions,
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: RatingsFormat,
    pub mode: Mode,
}

impl DatasetSpec {
    fn from_args(a: &DatasetArgs) -> anyhow::Result<Self> {
        if !a.delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        Ok(Self {
            path: a.ratings.clone(),
            format: RatingsFormat {
                delimiter: a.delimiter as u8,
                header: match a.header {
                    HeaderArg::Auto => HeaderMode::Auto,
                    HeaderArg::Present => HeaderMode::Present,
                    HeaderArg::Absent => HeaderMode::Absent,
                },
            },
            mode: match a.mode {
                ModeArg::User => Mode::User,
                ModeArg::Item => Mode::Item,
            },
        })
    }

    /// The matrix oriented with cold entities as rows.
    fn load(&self) -> anyhow::Result<RatingMatrix> {
        let r =
            read_ratings_file(&self.path, &self.format).with_context(|| format!("reading {}", self.path.display()))?;
        Ok(match self.mode {
            Mode::User => r,
            Mode::Item => r.transpose(),
        })
    }
}

impl ModelArgs {
    fn selector(&self) -> Selector {
        match self.selector {
            SelectorArg::Square => Selector::Square,
            SelectorArg::Rectangular => Selector::Rectangular,
        }
    }

    fn variant(&self) -> Variant {
        match self.variant {
            VariantArg::Ratings => Variant::ViaRatings,
            VariantArg::Factors => Variant::ViaFactors,
        }
    }

    fn init(&self) -> InitStrategy {
        match self.init {
            InitArg::Lu => InitStrategy::LuPivots,
            InitArg::Maxvol => InitStrategy::SquareMaxvol(SquareMaxvolOptions::default()),
        }
    }

    fn svd(&self, seed: u64, default_tol: f64) -> SvdOptions {
        SvdOptions {
            solver: match self.solver {
                SolverArg::Auto => SvdSolver::Auto,
                SolverArg::Dense => SvdSolver::Dense,
                SolverArg::Randomized => SvdSolver::Randomized,
            },
            tol: self.svd_tol.unwrap_or(default_tol),
            seed,
            ..SvdOptions::default()
        }
    }
}

fn check_pair(selector: Selector, rank: usize, seed_size: SeedSize) -> anyhow::Result<()> {
    if rank == 0 {
        bail!("rank must be positive");
    }
    match (selector, seed_size) {
        (Selector::Square, SeedSize::Auto) => bail!("`-L auto` needs the rectangular selector"),
        (Selector::Square, SeedSize::Fixed(l)) if l != rank => {
            bail!("square selector needs L0 = f (got f = {rank}, L0 = {l})")
        }
        (_, SeedSize::Fixed(l)) if rank > l => bail!("rank f = {rank} exceeds seed size L0 = {l}"),
        _ => Ok(()),
    }
}

impl EvalArgs {
    fn apply(&self, cfg: &mut EvalConfig) -> anyhow::Result<()> {
        if self.folds < 2 {
            bail!("need at least two folds");
        }
        if self.k_list.is_empty() || self.k_list.contains(&0) || self.primary_k == 0 {
            bail!("k values must be positive");
        }
        cfg.k_list = self.k_list.clone();
        cfg.primary_k = self.primary_k;
        cfg.relevance_threshold = self.threshold;
        Ok(())
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let seed = cli.seed;
        let job = match &cli.command {
            Command::Select(a) => {
                let seed_size = a.seed_size.unwrap_or(SeedSize::Fixed(a.rank));
                check_pair(a.model.selector(), a.rank, seed_size)?;
                Job::Select {
                    dataset: DatasetSpec::from_args(&a.dataset)?,
                    predictor: PredictorConfig {
                        rank: a.rank,
                        seed_size,
                        variant: a.model.variant(),
                        selector: a.model.selector(),
                        init: a.model.init(),
                        svd: a.model.svd(seed, SvdOptions::default().tol),
                    },
                    out: a.out.clone(),
                    weights: a.weights.clone(),
                    predictor_out: a.predictor.clone(),
                }
            }
            Command::Evaluate(a) => {
                let selector = a.model.selector();
                let rank = match (selector, a.rank, &a.rank_grid, a.seed_size) {
                    (Selector::Square, _, Some(_), _) => bail!("--rank-grid needs the rectangular selector"),
                    (Selector::Square, None, None, SeedSize::Fixed(l)) => RankChoice::Fixed(l),
                    (_, Some(f), None, l) => {
                        check_pair(selector, f, l)?;
                        RankChoice::Fixed(f)
                    }
                    (Selector::Rectangular, None, Some(grid), l) => {
                        if let SeedSize::Fixed(l) = l {
                            if grid.0.iter().all(|&f| f > l) {
                                bail!("every rank in --rank-grid exceeds the seed size {l}");
                            }
                        }
                        RankChoice::Tuned(grid.0.clone())
                    }
                    (Selector::Square, None, None, SeedSize::Auto) => bail!("`-L auto` needs the rectangular selector"),
                    _ => bail!("give either -f or --rank-grid"),
                };
                if matches!(rank, RankChoice::Tuned(_)) && a.eval.folds < 3 {
                    bail!("--rank-grid needs at least three folds");
                }
                let mut config = EvalConfig {
                    selector,
                    rank,
                    seed_size: a.seed_size,
                    variant: a.model.variant(),
                    init: a.model.init(),
                    svd: a.model.svd(seed, 1e-6),
                    ..EvalConfig::square(1)
                };
                a.eval.apply(&mut config)?;
                let dataset = DatasetSpec::from_args(&a.dataset)?;
                config.mode = dataset.mode;
                Job::Evaluate {
                    dataset,
                    config,
                    folds: a.eval.folds,
                    out_json: a.eval.out_json.clone(),
                    out_csv: a.eval.out_csv.clone(),
                }
            }
            Command::Sweep(a) => {
                let selector = a.model.selector();
                let rank_grid = match (selector, &a.rank_grid) {
                    (Selector::Square, Some(_)) => bail!("the square selector fixes f = L0; drop --rank-grid"),
                    (Selector::Square, None) => Vec::new(),
                    (Selector::Rectangular, Some(g)) => g.0.clone(),
                    (Selector::Rectangular, None) => bail!("rectangular sweeps need --rank-grid"),
                };
                if selector == Selector::Rectangular
                    && !a.seed_sizes.0.iter().any(|&l| rank_grid.iter().any(|&f| f <= l))
                {
                    bail!("no (L0, f) pair with f ≤ L0 in the grid");
                }
                if a.eval.folds < 3 {
                    bail!("sweep validation needs at least three folds");
                }
                let mut base = EvalConfig {
                    selector,
                    variant: a.model.variant(),
                    init: a.model.init(),
                    svd: a.model.svd(seed, 1e-6),
                    ..EvalConfig::square(1)
                };
                a.eval.apply(&mut base)?;
                let dataset = DatasetSpec::from_args(&a.dataset)?;
                base.mode = dataset.mode;
                Job::Sweep {
                    dataset,
                    base,
                    folds: a.eval.folds,
                    seed_sizes: a.seed_sizes.0.clone(),
                    rank_grid,
                    out_json: a.eval.out_json.clone(),
                    out_csv: a.eval.out_csv.clone(),
                    out_optimal: a.out_optimal.clone(),
                }
            }
            Command::Verify(a) => Job::Verify {
                options: VerifyOptions {
                    seed,
                    fault: a.inject_fault.map(|FaultArg::NormUpdate| Fault::NormUpdate),
                },
                out: a.out.clone(),
            },
        };
        Ok(Self {
            seed,
            cache: cli.cache_dir.clone().map(FactorCache::new),
            job,
        })
    }
}

#[derive(Serialize)]
struct SelectReport {
    schema_version: u32,
    dataset_hash: String,
    mode: Mode,
    selector: Selector,
    init: InitStrategy,
    f: usize,
    requested_seed_size: String,
    seed_size: usize,
    k: Vec<usize>,
    ids: Vec<i64>,
    w: Vec<f64>,
    max_w_outside: Option<f64>,
    log_rectvol: f64,
    square_swaps: usize,
    dominance: Option<Dominance>,
    svd: SvdReport,
    seed: u64,
    timings_ms: Timings,
}

#[derive(Serialize)]
struct Dominance {
    tol: f64,
    max_abs_coefficient: f64,
}

#[derive(Serialize)]
struct Timings {
    load: f64,
    factorize: f64,
    select: f64,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn write_with(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    write_atomic(path, &buf).with_context(|| format!("writing {}", path.display()))
}

/// Runs the job; `Ok(false)` means verify checks failed.
pub fn run(cfg: &RunConfig) -> anyhow::Result<bool> {
    let cache = cfg.cache.as_ref();
    match &cfg.job {
        Job::Select {
            dataset,
            predictor,
            out,
            weights,
            predictor_out,
        } => {
            let t = Instant::now();
            let r = dataset.load()?;
            let load = ms(t);
            let t = Instant::now();
            let factors = pure_svd_cached(&r, predictor.rank, &predictor.svd, cache)?;
            let factorize = ms(t);
            let t = Instant::now();
            let outcome = select_seeds(
                factors.item_factors(),
                predictor.selector,
                predictor.seed_size,
                &predictor.init,
            )?;
            let select = ms(t);

            let max_w_outside = outcome.state.argmax_norm_outside(&outcome.seed).map(|(_, w)| w);
            let dominance = (predictor.selector == Selector::Square).then(|| Dominance {
                tol: match predictor.init {
                    InitStrategy::SquareMaxvol(o) => o.tol,
                    InitStrategy::LuPivots => SquareMaxvolOptions::default().tol,
                },
                max_abs_coefficient: outcome.state.max_abs_coefficient(),
            });
            let report = SelectReport {
                schema_version: OUTPUT_SCHEMA,
                dataset_hash: r.content_hash(),
                mode: dataset.mode,
                selector: predictor.selector,
                init: predictor.init,
                f: predictor.rank,
                requested_seed_size: predictor.seed_size.to_string(),
                seed_size: outcome.seed.len(),
                k: outcome.seed.indices().to_vec(),
                ids: outcome.seed.indices().iter().map(|&i| r.col_ids()[i]).collect(),
                w: outcome.state.norms().to_vec(),
                max_w_outside,
                log_rectvol: log_rectangular_volume(outcome.seed.submatrix())?,
                square_swaps: outcome.square_swaps,
                dominance,
                svd: *factors.report(),
                seed: cfg.seed,
                timings_ms: Timings {
                    load,
                    factorize,
                    select,
                },
            };
            if let Some(path) = weights {
                write_with(path, |b| write_weights_csv(&outcome.seed, &outcome.state, b))?;
            }
            if let Some(path) = predictor_out {
                let p = build_predictor_with_factors(&r, &factors, predictor)?;
                write_with(path, |b| p.write(b))?;
            }
            write_with(out, |b| Ok(serde_json::to_writer_pretty(b, &report)?))?;
            println!(
                "selected {} items (max w outside {:.4}), report in {}",
                report.seed_size,
                max_w_outside.unwrap_or(0.0),
                out.display()
            );
            Ok(true)
        }
        Job::Evaluate {
            dataset,
            config,
            folds,
            out_json,
            out_csv,
        } => {
            let r = dataset.load()?;
            let split = split_folds(r.nrows(), *folds, cfg.seed)?;
            // Rows are already oriented, so the evaluator runs in user mode.
            let mut inner = config.clone();
            inner.mode = Mode::User;
            let mut ev = Evaluator::new(&r, Mode::User, split, config.max_rank(), config.svd)?;
            if let Some(c) = cache {
                ev = ev.with_cache(c.clone());
            }
            let mut report = ev.evaluate(&inner)?;
            report.config.mode = config.mode;
            write_with(out_json, |b| report.write_json(b))?;
            write_with(out_csv, |b| report.write_csv(b))?;
            for (k, s) in &report.aggregate.precision_at_k {
                println!("precision@{k}: {:.4} ± {:.4}", s.mean, s.sigma);
            }
            Ok(true)
        }
        Job::Sweep {
            dataset,
            base,
            folds,
            seed_sizes,
            rank_grid,
            out_json,
            out_csv,
            out_optimal,
        } => {
            let r = dataset.load()?;
            let split = split_folds(r.nrows(), *folds, cfg.seed)?;
            let max_rank = match base.selector {
                Selector::Square => seed_sizes.iter().copied().max(),
                Selector::Rectangular => rank_grid
                    .iter()
                    .copied()
                    .filter(|&f| seed_sizes.iter().any(|&l| f <= l))
                    .max(),
            }
            .unwrap_or(1);
            let mut inner = base.clone();
            inner.mode = Mode::User;
            let mut ev = Evaluator::new(&r, Mode::User, split, max_rank, base.svd)?;
            if let Some(c) = cache {
                ev = ev.with_cache(c.clone());
            }
            let mut table = sweep(&ev, &inner, seed_sizes, rank_grid)?;
            for cell in &mut table.cells {
                cell.report.config.mode = base.mode;
            }
            write_with(out_json, |b| table.write_json(b))?;
            write_with(out_csv, |b| table.write_csv(b))?;
            if let Some(path) = out_optimal {
                write_with(path, |b| table.write_optimal_rank_csv(b))?;
            }
            for c in table.cells.iter().filter(|c| c.best) {
                println!(
                    "L0 = {}: best f = {} (validation precision@{} {:.4})",
                    c.seed_size, c.rank, base.primary_k, c.validation
                );
            }
            Ok(true)
        }
        Job::Verify { options, out } => {
            let summary = run_verify(options);
            println!("{summary}");
            if let Some(path) = out {
                write_with(path, |b| Ok(serde_json::to_writer_pretty(b, &summary)?))?;
            }
            Ok(summary.all_passed())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("5:20:5").unwrap(), Grid(vec![5, 10, 15, 20]));
        assert_eq!(parse_grid("10,5,10").unwrap(), Grid(vec![5, 10]));
        assert!(parse_grid("0,1").is_err());
        assert!(parse_grid("5:1:1").is_err());
        assert_eq!(parse_seed_size("auto").unwrap(), SeedSize::Auto);
        assert!(parse_seed_size("0").is_err());
    }

    #[test]
    fn pairs_are_checked_at_parse_time() {
        let parse = |args: &[&str]| RunConfig::from_cli(&Cli::try_parse_from(args).unwrap());
        assert!(parse(&[
            "rectmaxvol",
            "select",
            "-r",
            "x.csv",
            "-f",
            "5",
            "-L",
            "3",
            "-o",
            "o.json"
        ])
        .is_err());
        assert!(parse(&[
            "rectmaxvol",
            "select",
            "-r",
            "x.csv",
            "--selector",
            "square",
            "-f",
            "5",
            "-L",
            "auto",
            "-o",
            "o.json"
        ])
        .is_err());
        assert!(parse(&[
            "rectmaxvol",
            "select",
            "-r",
            "x.csv",
            "-f",
            "5",
            "-L",
            "auto",
            "-o",
            "o.json"
        ])
        .is_ok());
        assert!(parse(&[
            "rectmaxvol",
            "select",
            "-r",
            "x.csv",
            "--selector",
            "square",
            "-f",
            "5",
            "-o",
            "o.json"
        ])
        .is_ok());
    }
}
