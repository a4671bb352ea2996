//! Square maxvol on a random factor matrix: start from LU pivots, swap until
//! every coefficient is bounded by 1 + tol.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rectmaxvol::linalg::gaussian_matrix;
use rectmaxvol::maxvol::{log_rectangular_volume, lu_pivot_init, square_maxvol, SquareMaxvolOptions};

fn main() -> rectmaxvol::Result<()> {
    let q = gaussian_matrix(10, 500, &mut ChaCha8Rng::seed_from_u64(7));
    let init = lu_pivot_init(&q)?;
    let before = log_rectangular_volume(init.submatrix())?;
    let out = square_maxvol(&q, init, &SquareMaxvolOptions::default())?;
    println!("seed: {:?}", out.seed.indices());
    println!("swaps: {}", out.swaps);
    println!(
        "log volume {before:.3} -> {:.3}",
        log_rectangular_volume(out.seed.submatrix())?
    );
    println!("max |C_ij| = {:.4}", out.state.max_abs_coefficient());
    Ok(())
}
