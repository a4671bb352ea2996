//! Five-fold cold-start evaluation on the bundled MovieLens ratings,
//! square against rectangular seeds of the same size.
use std::path::PathBuf;

use rectmaxvol::data::{read_ratings_file, split_folds, RatingsFormat};
use rectmaxvol::elicitation::SeedSize;
use rectmaxvol::evaluation::{EvalConfig, Evaluator, Mode, RankChoice};

fn main() -> rectmaxvol::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/movielens/ratings.csv"));
    let r = read_ratings_file(&path, &RatingsFormat::default())?;
    let l0 = 20;
    let square = EvalConfig::square(l0);
    let ev = Evaluator::new(&r, Mode::User, split_folds(r.nrows(), 5, 0)?, l0, square.svd)?;

    let rect = EvalConfig::rectangular(RankChoice::Tuned((2..=l0).step_by(2).collect()), SeedSize::Fixed(l0));
    for (label, cfg) in [("square", square), ("rectangular", rect)] {
        let report = ev.evaluate(&cfg)?;
        let ranks: Vec<usize> = report.per_fold.iter().map(|f| f.rank).collect();
        println!(
            "{label:<12} L0={l0} ranks={ranks:?} P@10={:.4} coverage={:.3} diversity={:.3}",
            report.mean_precision(10).unwrap_or(f64::NAN),
            report.aggregate.coverage.mean,
            report.aggregate.diversity.map_or(f64::NAN, |d| d.mean)
        );
    }
    Ok(())
}
