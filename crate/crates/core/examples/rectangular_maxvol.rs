//! Grow a rectangular seed greedily and watch the largest coefficient norm
//! outside the seed shrink. Also shows the automatic stopping rule.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rectmaxvol::linalg::gaussian_matrix;
use rectmaxvol::maxvol::{append_column, initialize, rect_maxvol_auto, InitStrategy};

fn main() -> rectmaxvol::Result<()> {
    let f = 20;
    let q = gaussian_matrix(f, 2000, &mut ChaCha8Rng::seed_from_u64(3));
    let mut out = initialize(&q, &InitStrategy::LuPivots)?;
    while out.seed.len() < 3 * f {
        let (i, w) = out.state.argmax_norm_outside(&out.seed).expect("columns left");
        if out.seed.len() % 5 == 0 {
            println!("L0={:>3} max sqrt(w) outside = {:.3}", out.seed.len(), w.sqrt());
        }
        append_column(&mut out.state, &mut out.seed, &q, i)?;
    }

    let auto = rect_maxvol_auto(&q, None, &InitStrategy::LuPivots)?;
    let w = auto.state.argmax_norm_outside(&auto.seed).map_or(0.0, |(_, w)| w);
    println!("auto stop: L0={} with max w outside {w:.3}", auto.seed.len());
    Ok(())
}
