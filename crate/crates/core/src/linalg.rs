//! Dense helpers shared by the factorization, selection and coefficient code.

use nalgebra::{DMatrix, DVector, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Relative threshold under which a pivot or triangular diagonal counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Thin SVD `A = U diag(σ) Vᵀ` with σ sorted nonincreasing.
pub fn sorted_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&x, &y| sv[y].total_cmp(&sv[x]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    let sv = DVector::from_iterator(order.len(), order.iter().map(|&k| sv[k]));
    (u, sv, vt)
}

/// Orthonormal basis (thin Householder Q) of the columns of a tall matrix.
pub fn orthonormalize(a: DMatrix<f64>) -> DMatrix<f64> {
    a.qr().q()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Columns `cols` of `a`, in order.
pub fn select_columns(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])])
}

/// Least-norm solution `C = S†Q` of the underdetermined system `S C = Q`
/// (`S` is `f × L`, `f ≤ L`), via a QR factorization of `Sᵀ`:
/// with `Sᵀ = U T`, `C = U T⁻ᵀ Q`.
pub fn least_norm_solve(s: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (f, l) = s.shape();
    if q.nrows() != f {
        return Err(invalid(format!("S has {f} rows but Q has {}", q.nrows())));
    }
    if f > l {
        return Err(invalid(format!("least-norm system needs f ≤ L, got f = {f}, L = {l}")));
    }
    let qr = s.transpose().qr();
    let t = qr.r();
    let scale = (0..f).map(|k| t[(k, k)].abs()).fold(0.0, f64::max);
    if let Some(step) = (0..f).find(|&k| t[(k, k)].abs() <= RANK_TOL * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::RankDeficient {
            step,
            threshold: RANK_TOL,
        });
    }
    let y = t.transpose().solve_lower_triangular(q).ok_or(Error::RankDeficient {
        step: 0,
        threshold: RANK_TOL,
    })?;
    Ok(qr.q() * y)
}
