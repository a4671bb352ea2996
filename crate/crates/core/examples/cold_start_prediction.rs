//! Build a predictor on warm users, then predict a new user's full row from
//! their answers on the seed items alone.
use rectmaxvol::data::split_folds;
use rectmaxvol::elicitation::{build_predictor, PredictorConfig, SeedSize, Variant};
use rectmaxvol::synthetic::exact_low_rank;

fn main() -> rectmaxvol::Result<()> {
    let r = exact_low_rank(200, 120, 5, 11);
    let folds = split_folds(r.nrows(), 5, 0)?;
    let warm = r.select_rows(&folds.members_excluding(&[0]));
    let cold = folds.members(0);

    // exact rank 5: the seed columns are rank deficient, so use the factor route
    let mut cfg = PredictorConfig::new(5, SeedSize::Fixed(10));
    cfg.variant = Variant::ViaFactors;
    let p = build_predictor(&warm, &cfg, None)?;
    println!("ask about items {:?}", p.seed_ids());

    let dense = r.to_dense();
    let mut worst = 0.0f64;
    for &u in &cold {
        let answers: Vec<f64> = p.seeds().iter().map(|&i| dense[(u, i)]).collect();
        let predicted = p.predict(&answers)?;
        for (j, v) in predicted.iter().enumerate() {
            worst = worst.max((v - dense[(u, j)]).abs());
        }
    }
    println!("{} cold users, worst absolute error {worst:.2e}", cold.len());
    Ok(())
}
