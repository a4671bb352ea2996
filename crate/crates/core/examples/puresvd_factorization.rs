//! Factorize a synthetic rating matrix and report the reconstruction error
//! at a few ranks.
use rectmaxvol::factorization::{pure_svd, SvdOptions};
use rectmaxvol::synthetic::planted_tastes;

fn main() -> rectmaxvol::Result<()> {
    let r = planted_tastes(400, 300, 6, 0.2, 1);
    println!("{} x {} with {} ratings", r.nrows(), r.ncols(), r.nnz());
    for f in [2, 6, 12] {
        let factors = pure_svd(&r, f, &SvdOptions::default())?;
        let rep = factors.report();
        println!(
            "f={f:>2} solver={} iters={} sigma_1={:.2} residual/||R||={:.4}",
            rep.solver.name(),
            rep.iterations,
            factors.singular_values()[0],
            factors.residual_norm(&r) / r.frobenius_norm()
        );
    }
    Ok(())
}
