//! Sweep seed size against factorization rank and print the best rank per
//! seed size.
use rectmaxvol::data::split_folds;
use rectmaxvol::elicitation::SeedSize;
use rectmaxvol::evaluation::{sweep, EvalConfig, Evaluator, Mode, RankChoice};
use rectmaxvol::synthetic::planted_tastes;

fn main() -> rectmaxvol::Result<()> {
    let r = planted_tastes(300, 400, 4, 0.3, 9);
    let mut base = EvalConfig::rectangular(RankChoice::Fixed(1), SeedSize::Fixed(1));
    base.relevance_threshold = 3.5;
    let ev = Evaluator::new(&r, Mode::User, split_folds(r.nrows(), 5, 0)?, 12, base.svd)?;
    let table = sweep(&ev, &base, &[6, 12, 24], &[1, 2, 4, 8, 12])?;
    for cell in &table.cells {
        println!(
            "L0={:>2} f={:>2} validation P@10={:.4}{}",
            cell.seed_size,
            cell.rank,
            cell.validation,
            if cell.best { "  <- best" } else { "" }
        );
    }
    table.write_optimal_rank_csv(std::io::stdout())?;
    Ok(())
}
