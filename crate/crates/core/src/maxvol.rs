//! Maximal-volume seed selection over the item factor matrix `Q` (`f × m`).
//!
//! * [`rectangular_volume`]: `sqrt(det(S Sᵀ))`, the product of the singular
//!   values of a wide `f × L` submatrix.
//! * [`lu_pivot_init`]: `f` columns from column-pivoted elimination.
//! * [`square_maxvol`]: swap loop towards a dominant `f × f` submatrix.
//! * [`rect_maxvol`]: greedy extension to `L0 ≥ f` columns. Appending column
//!   `i` multiplies the volume by `sqrt(1 + w_i)` with `w_i = ‖c_i‖²`, so each
//!   step takes the largest `w_i` and refreshes `C` and `w` with rank-1 updates
//!   in `O(L·m)`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{least_norm_solve, select_columns, RANK_TOL};

/// `sqrt(det(S Sᵀ))` for `S` of shape `f × L`, `f ≤ L`; equals `|det S|` when square.
pub fn rectangular_volume(s: &DMatrix<f64>) -> Result<f64> {
    Ok(triangular_diagonal(s)?.iter().map(|d| d.abs()).product())
}

/// Natural log of [`rectangular_volume`]; `-inf` for rank-deficient `S`.
pub fn log_rectangular_volume(s: &DMatrix<f64>) -> Result<f64> {
    Ok(triangular_diagonal(s)?.iter().map(|d| d.abs().ln()).sum())
}

// With Sᵀ = U T, S Sᵀ = Tᵀ T and det(S Sᵀ) = Π T_kk².
fn triangular_diagonal(s: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (f, l) = s.shape();
    if f == 0 {
        return Err(invalid("volume of a matrix with no rows"));
    }
    if f > l {
        return Err(invalid(format!("rectangular volume needs f ≤ L, got {f} × {l}")));
    }
    let t = s.transpose().qr().r();
    Ok((0..f).map(|k| t[(k, k)]).collect())
}

/// Selected columns `k` of `Q` together with `S = Q(:, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedSet {
    indices: Vec<usize>,
    submatrix: DMatrix<f64>,
    member: Vec<bool>,
}

impl SeedSet {
    pub fn from_indices(q: &DMatrix<f64>, indices: Vec<usize>) -> Result<Self> {
        let mut member = vec![false; q.ncols()];
        for &i in &indices {
            if i >= q.ncols() {
                return Err(invalid(format!("column {i} out of range for {} columns", q.ncols())));
            }
            if std::mem::replace(&mut member[i], true) {
                return Err(invalid(format!("column {i} selected twice")));
            }
        }
        Ok(Self {
            submatrix: select_columns(q, &indices),
            indices,
            member,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.member.get(i).copied().unwrap_or(false)
    }

    /// `S = Q(:, k)`.
    pub fn submatrix(&self) -> &DMatrix<f64> {
        &self.submatrix
    }

    pub fn volume(&self) -> Result<f64> {
        rectangular_volume(&self.submatrix)
    }

    fn push(&mut self, q: &DMatrix<f64>, i: usize) {
        let l = self.indices.len();
        self.submatrix = std::mem::replace(&mut self.submatrix, DMatrix::zeros(0, 0)).insert_column(l, 0.0);
        self.submatrix.set_column(l, &q.column(i));
        self.indices.push(i);
        self.member[i] = true;
    }

    fn replace(&mut self, position: usize, q: &DMatrix<f64>, j: usize) {
        let old = std::mem::replace(&mut self.indices[position], j);
        self.member[old] = false;
        self.member[j] = true;
        self.submatrix.set_column(position, &q.column(j));
    }
}

/// Least-norm coefficients `C = S†Q` (`L × m`) with cached squared column
/// norms `w_i = ‖c_i‖²`.
///
/// Columns are contiguous (stride `capacity` rows) so the per-append scan over
/// all `c_j` is a single pass over memory.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientState {
    rows: usize,
    stride: usize,
    cols: usize,
    data: Vec<f64>,
    norms: Vec<f64>,
}

impl CoefficientState {
    /// Solves `S C = Q` in the least-norm sense for the given seed.
    pub fn from_seed(q: &DMatrix<f64>, seed: &SeedSet) -> Result<Self> {
        Ok(Self::from_coefficients(&least_norm_solve(seed.submatrix(), q)?))
    }

    pub fn from_coefficients(c: &DMatrix<f64>) -> Self {
        let (rows, cols) = c.shape();
        let mut state = Self {
            rows,
            stride: rows.max(1),
            cols,
            data: c.as_slice().to_vec(),
            norms: Vec::new(),
        };
        state.norms = state.recompute_norms();
        state
    }

    /// Current seed size `L`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// `c_i`, length `L`.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.stride..i * self.stride + self.rows]
    }

    /// `w`, length `m`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn coefficients(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.data[c * self.stride + r])
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        (0..self.cols)
            .flat_map(|c| self.column(c).iter())
            .fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    /// Squared column norms computed from scratch.
    pub fn recompute_norms(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|c| self.column(c).iter().map(|x| x * x).sum())
            .collect()
    }

    /// Largest `w_i` over columns outside the seed; ties go to the lowest index.
    pub fn argmax_norm_outside(&self, seed: &SeedSet) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &w) in self.norms.iter().enumerate() {
            if seed.contains(i) {
                continue;
            }
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        best
    }

    fn reserve_row(&mut self) {
        if self.rows < self.stride {
            return;
        }
        let stride = (self.stride * 2).max(self.rows + 1);
        let mut data = vec![0.0; stride * self.cols];
        for c in 0..self.cols {
            data[c * stride..c * stride + self.rows].copy_from_slice(self.column(c));
        }
        self.data = data;
        self.stride = stride;
    }

    fn with_capacity(mut self, rows: usize) -> Self {
        if rows > self.stride {
            let mut data = vec![0.0; rows * self.cols];
            for c in 0..self.cols {
                data[c * rows..c * rows + self.rows].copy_from_slice(self.column(c));
            }
            self.data = data;
            self.stride = rows;
        }
        self
    }

    /// Test hook: corrupts the norm cache the way a wrong norm update would.
    pub(crate) fn inject_norm_fault(&mut self) {
        for w in &mut self.norms {
            *w *= 1.0 + 1e-4;
        }
    }
}

/// Multiplicative volume gain `sqrt(1 + w_i)` of appending column `i`.
pub fn volume_gain(state: &CoefficientState, i: usize) -> f64 {
    (1.0 + state.norms[i]).sqrt()
}

/// Appends column `i` of `q` to the seed and applies the rank-1 updates
///
/// ```text
/// C ← [ C − c_i (c_iᵀC) / (1 + c_iᵀc_i) ;  (c_iᵀC) / (1 + c_iᵀc_i) ]
/// w_j ← w_j − (c_iᵀc_j)² / (1 + c_iᵀc_i)
/// ```
pub fn append_column(state: &mut CoefficientState, seed: &mut SeedSet, q: &DMatrix<f64>, i: usize) -> Result<()> {
    if i >= state.cols || q.ncols() != state.cols {
        return Err(invalid(format!("column {i} out of range for {} columns", state.cols)));
    }
    if seed.contains(i) {
        return Err(invalid(format!("column {i} is already in the seed set")));
    }
    if seed.len() != state.rows {
        return Err(invalid("seed set and coefficient state disagree on L"));
    }

    state.reserve_row();
    let l = state.rows;
    let stride = state.stride;
    let ci: Vec<f64> = state.column(i).to_vec();
    let denom = 1.0 + ci.iter().map(|x| x * x).sum::<f64>();

    for (col, w) in state.data.chunks_exact_mut(stride).zip(state.norms.iter_mut()) {
        let cj = &mut col[..=l];
        let dot: f64 = ci.iter().zip(&cj[..l]).map(|(a, b)| a * b).sum();
        let scaled = dot / denom;
        for (x, a) in cj[..l].iter_mut().zip(&ci) {
            *x -= a * scaled;
        }
        cj[l] = scaled;
        *w = (*w - dot * scaled).max(0.0);
    }
    state.rows += 1;
    seed.push(q, i);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMaxvolOptions {
    /// Dominance is accepted once every `|C_ij| ≤ 1 + tol`.
    pub tol: f64,
    /// Swap budget; `None` means `2·f`.
    pub max_iters: Option<usize>,
}

impl Default for SquareMaxvolOptions {
    fn default() -> Self {
        Self {
            tol: 1e-2,
            max_iters: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareMaxvolOutcome {
    pub seed: SeedSet,
    pub state: CoefficientState,
    pub swaps: usize,
}

/// `f` column indices picked by column-pivoted Gaussian elimination of `Q`
/// (row-pivoted LU of `Qᵀ`); ties go to the lowest column index.
pub fn lu_pivot_init(q: &DMatrix<f64>) -> Result<SeedSet> {
    let (f, m) = q.shape();
    if f == 0 || f > m {
        return Err(invalid(format!("need 1 ≤ f ≤ m, got f = {f}, m = {m}")));
    }
    let scale = q.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let threshold = RANK_TOL * scale;
    let mut a = q.transpose();
    let mut perm: Vec<usize> = (0..m).collect();

    for t in 0..f {
        let mut pivot = t;
        let mut best = a[(t, t)].abs();
        for r in t + 1..m {
            let v = a[(r, t)].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if !(best > threshold) {
            return Err(Error::RankDeficient {
                step: t,
                threshold: RANK_TOL,
            });
        }
        if pivot != t {
            a.swap_rows(t, pivot);
            perm.swap(t, pivot);
        }
        let diag = a[(t, t)];
        for r in t + 1..m {
            a[(r, t)] /= diag;
        }
        for c in t + 1..f {
            let upper = a[(t, c)];
            if upper == 0.0 {
                continue;
            }
            for r in t + 1..m {
                let l = a[(r, t)];
                a[(r, c)] -= l * upper;
            }
        }
    }
    perm.truncate(f);
    SeedSet::from_indices(q, perm)
}

/// Swaps seed columns for outside columns while some `|C_ij| > 1 + tol`;
/// every accepted swap multiplies `|det S|` by `|C_ij| > 1`.
pub fn square_maxvol(q: &DMatrix<f64>, init: SeedSet, opts: &SquareMaxvolOptions) -> Result<SquareMaxvolOutcome> {
    let f = q.nrows();
    if init.len() != f {
        return Err(invalid(format!(
            "square maxvol needs {f} initial columns, got {}",
            init.len()
        )));
    }
    if !(opts.tol >= 0.0) {
        return Err(invalid("square maxvol tolerance must be nonnegative"));
    }
    let max_iters = opts.max_iters.unwrap_or(2 * f);
    let fresh = |seed: &SeedSet| -> Result<DMatrix<f64>> {
        least_norm_solve(seed.submatrix(), q).map_err(|e| match e {
            Error::RankDeficient { .. } => invalid("initial seed submatrix is singular"),
            other => other,
        })
    };

    let mut seed = init;
    let mut c = fresh(&seed)?;
    let mut swaps = 0;
    let mut refreshed = true;
    loop {
        let (r, j, v) = argmax_abs(&c);
        if v <= 1.0 + opts.tol {
            if refreshed {
                let state = CoefficientState::from_coefficients(&c);
                return Ok(SquareMaxvolOutcome { seed, state, swaps });
            }
            // Confirm on coefficients free of update drift.
            c = fresh(&seed)?;
            refreshed = true;
            continue;
        }
        if swaps == max_iters {
            return Err(Error::IterationCap {
                iterations: swaps,
                max_coefficient: v,
                indices: seed.into_indices(),
            });
        }
        // C ← C − (c_j − e_r) C(r,:) / C(r,j)
        let pivot = c[(r, j)];
        let mut colj = c.column(j).into_owned();
        colj[r] -= 1.0;
        let rowr = c.row(r).into_owned() / pivot;
        c -= colj * rowr;
        seed.replace(r, q, j);
        swaps += 1;
        refreshed = false;
    }
}

fn argmax_abs(c: &DMatrix<f64>) -> (usize, usize, f64) {
    let mut best = (0, 0, -1.0);
    for j in 0..c.ncols() {
        for (r, x) in c.column(j).iter().enumerate() {
            if x.abs() > best.2 {
                best = (r, j, x.abs());
            }
        }
    }
    best
}

/// Choice of the initial `f` columns for [`rect_maxvol`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitStrategy {
    #[default]
    LuPivots,
    /// LU pivots refined by [`square_maxvol`]. An exhausted swap budget keeps
    /// the current (still invertible) seed.
    SquareMaxvol(SquareMaxvolOptions),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RectMaxvolOutcome {
    pub seed: SeedSet,
    pub state: CoefficientState,
    /// Swaps made by the square refinement, `0` for plain LU initialization.
    pub square_swaps: usize,
}

/// Initial square seed and its coefficients.
pub fn initialize(q: &DMatrix<f64>, init: &InitStrategy) -> Result<RectMaxvolOutcome> {
    let lu = lu_pivot_init(q)?;
    match init {
        InitStrategy::LuPivots => {
            let state = CoefficientState::from_seed(q, &lu)?;
            Ok(RectMaxvolOutcome {
                seed: lu,
                state,
                square_swaps: 0,
            })
        }
        InitStrategy::SquareMaxvol(opts) => match square_maxvol(q, lu, opts) {
            Ok(out) => Ok(RectMaxvolOutcome {
                seed: out.seed,
                state: out.state,
                square_swaps: out.swaps,
            }),
            Err(Error::IterationCap {
                iterations, indices, ..
            }) => {
                let seed = SeedSet::from_indices(q, indices)?;
                let state = CoefficientState::from_seed(q, &seed)?;
                Ok(RectMaxvolOutcome {
                    seed,
                    state,
                    square_swaps: iterations,
                })
            }
            Err(e) => Err(e),
        },
    }
}

/// Greedy rectangular-volume extension to `seed_size` columns.
pub fn rect_maxvol(q: &DMatrix<f64>, seed_size: usize, init: &InitStrategy) -> Result<RectMaxvolOutcome> {
    let (f, m) = q.shape();
    if seed_size < f {
        return Err(invalid(format!("seed size {seed_size} is below the rank {f}")));
    }
    if seed_size > m {
        return Err(invalid(format!(
            "seed size {seed_size} exceeds the {m} available columns"
        )));
    }
    let mut out = initialize(q, init)?;
    out.state = out.state.with_capacity(seed_size);
    grow(q, &mut out, |_, _| false, seed_size);
    Ok(out)
}

/// Extends the seed until every outside column has `w_i ≤ 1` (all latent
/// vectors lie inside the seed ellipsoid) or `max_size` columns are taken.
pub fn rect_maxvol_auto(q: &DMatrix<f64>, max_size: Option<usize>, init: &InitStrategy) -> Result<RectMaxvolOutcome> {
    let (f, m) = q.shape();
    let cap = max_size.unwrap_or(m).min(m);
    if cap < f {
        return Err(invalid(format!("size cap {cap} is below the rank {f}")));
    }
    let mut out = initialize(q, init)?;
    grow(q, &mut out, |_, w| w <= 1.0, cap);
    Ok(out)
}

fn grow(q: &DMatrix<f64>, out: &mut RectMaxvolOutcome, stop: impl Fn(usize, f64) -> bool, size: usize) {
    let mut appended = 0usize;
    while out.seed.len() < size {
        let Some((i, w)) = out.state.argmax_norm_outside(&out.seed) else {
            break;
        };
        if stop(i, w) {
            break;
        }
        append_column(&mut out.state, &mut out.seed, q, i).expect("candidate is outside the seed");
        appended += 1;
        if cfg!(debug_assertions) && appended.is_multiple_of(64) {
            let fresh = out.state.recompute_norms();
            for (a, b) in fresh.iter().zip(out.state.norms()) {
                debug_assert!((a - b).abs() <= 1e-6 * (1.0 + a), "norm drift: {a} vs {b}");
            }
        }
    }
}

/// Writes `column,seed_position,w` for every column.
pub fn write_weights_csv<W: Write>(seed: &SeedSet, state: &CoefficientState, sink: W) -> Result<()> {
    let mut position = vec![None; state.ncols()];
    for (p, &i) in seed.indices().iter().enumerate() {
        position[i] = Some(p);
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["column", "seed_position", "w"])?;
    for (i, norm) in state.norms().iter().enumerate() {
        let pos = position[i].map(|p| p.to_string()).unwrap_or_default();
        w.write_record([i.to_string(), pos, norm.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, data.len() / rows, data)
    }

    #[test]
    fn volume_examples() {
        assert!((rectangular_volume(&DMatrix::identity(2, 2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((rectangular_volume(&mat(1, &[3.0, 4.0])).unwrap() - 5.0).abs() < 1e-14);
        assert!((log_rectangular_volume(&mat(1, &[3.0, 4.0])).unwrap() - 5f64.ln()).abs() < 1e-14);
        assert!(matches!(
            rectangular_volume(&mat(2, &[1.0, 2.0])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn lu_init_selects_identity_block() {
        let q = mat(2, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let seed = lu_pivot_init(&q).unwrap();
        let mut k = seed.indices().to_vec();
        k.sort_unstable();
        assert_eq!(k, vec![1, 3]);
    }

    #[test]
    fn lu_init_skips_repeated_column() {
        let q = mat(2, &[1.0, 0.3, 1.0, 2.0, 0.5, 2.0]);
        let seed = lu_pivot_init(&q).unwrap();
        assert!(!(seed.contains(0) && seed.contains(2)));
        assert!(seed.volume().unwrap() > 0.0);
    }

    #[test]
    fn lu_init_reports_rank_deficiency() {
        let q = mat(2, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert!(matches!(lu_pivot_init(&q), Err(Error::RankDeficient { step: 1, .. })));
        assert!(matches!(
            lu_pivot_init(&DMatrix::zeros(2, 3)),
            Err(Error::RankDeficient { step: 0, .. })
        ));
    }

    #[test]
    fn square_maxvol_three_columns() {
        let q = mat(2, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let init = lu_pivot_init(&q).unwrap();
        let opts = SquareMaxvolOptions {
            tol: 0.0,
            max_iters: None,
        };
        let out = square_maxvol(&q, init, &opts).unwrap();
        assert_eq!(out.seed.indices(), &[0, 1]);
        assert!((out.seed.volume().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_maxvol_swaps_from_bad_start() {
        // Start from {2, 1}: volume 0.5, while {0, 1} has volume 1.
        let q = mat(2, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let init = SeedSet::from_indices(&q, vec![2, 1]).unwrap();
        let out = square_maxvol(&q, init, &SquareMaxvolOptions::default()).unwrap();
        assert!(out.swaps >= 1);
        assert!((out.seed.volume().unwrap() - 1.0).abs() < 1e-12);
        assert!(out.state.max_abs_coefficient() <= 1.0 + 1e-2);
    }

    #[test]
    fn square_maxvol_identity_needs_no_swaps() {
        let q = DMatrix::identity(2, 2);
        let init = lu_pivot_init(&q).unwrap();
        let out = square_maxvol(&q, init, &SquareMaxvolOptions::default()).unwrap();
        assert_eq!(out.swaps, 0);
        assert_eq!(out.seed.indices(), &[0, 1]);
    }

    #[test]
    fn square_maxvol_rejects_singular_start() {
        let q = mat(2, &[1.0, 2.0, 0.0, 2.0, 4.0, 1.0]);
        let init = SeedSet::from_indices(&q, vec![0, 1]).unwrap();
        assert!(matches!(
            square_maxvol(&q, init, &SquareMaxvolOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn square_maxvol_iteration_cap_keeps_valid_seed() {
        let q = mat(2, &[0.1, 0.0, 5.0, 3.0, 0.0, 0.1, 4.0, -6.0]);
        let init = SeedSet::from_indices(&q, vec![0, 1]).unwrap();
        let opts = SquareMaxvolOptions {
            tol: 0.0,
            max_iters: Some(1),
        };
        match square_maxvol(&q, init, &opts) {
            Err(Error::IterationCap {
                indices,
                max_coefficient,
                ..
            }) => {
                assert_eq!(indices.len(), 2);
                assert!(max_coefficient > 1.0);
                assert!(SeedSet::from_indices(&q, indices).unwrap().volume().unwrap() > 0.01);
            }
            other => panic!("expected iteration cap, got {other:?}"),
        }
    }

    #[test]
    fn gain_of_zero_and_three() {
        // columns (0,0), (1,1), (0,1)
        let c = mat(2, &[0.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let state = CoefficientState::from_coefficients(&c);
        assert_eq!(volume_gain(&state, 0), 1.0);
        assert!((volume_gain(&state, 1) - 3.0f64.sqrt()).abs() < 1e-15);
        assert!((volume_gain(&state, 2) - 2.0f64.sqrt()).abs() < 1e-15);
        let c3 = mat(3, &[1.0, 1.0, 1.0]);
        assert!((volume_gain(&CoefficientState::from_coefficients(&c3), 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn appending_zero_column() {
        let q = mat(2, &[1.0, 0.0, 0.0, 0.6, 0.0, 1.0, 0.0, 0.8]);
        let mut seed = SeedSet::from_indices(&q, vec![0, 1]).unwrap();
        let mut state = CoefficientState::from_seed(&q, &seed).unwrap();
        let before = state.coefficients();
        let w_before = state.norms().to_vec();
        append_column(&mut state, &mut seed, &q, 2).unwrap();
        let after = state.coefficients();
        assert_eq!(after.rows(0, 2), before);
        assert!(after.row(2).iter().all(|&x| x == 0.0));
        assert_eq!(state.norms(), &w_before[..]);
    }

    #[test]
    fn orthogonal_coefficients_keep_norm_and_self_update_shrinks() {
        // S = I so C = Q: c_2 = (1, 0), c_3 = (0, 2) are orthogonal.
        let q = mat(2, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 2.0]);
        let mut seed = SeedSet::from_indices(&q, vec![0, 1]).unwrap();
        let mut state = CoefficientState::from_seed(&q, &seed).unwrap();
        append_column(&mut state, &mut seed, &q, 2).unwrap();
        assert!((state.norms()[3] - 4.0).abs() < 1e-14);
        assert!((state.norms()[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn append_rejects_seed_member() {
        let q = DMatrix::identity(2, 3);
        let mut seed = SeedSet::from_indices(&q, vec![0, 1]).unwrap();
        let mut state = CoefficientState::from_seed(&q, &seed).unwrap();
        assert!(matches!(
            append_column(&mut state, &mut seed, &q, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rect_maxvol_picks_largest_coefficient_norm() {
        let q = mat(2, &[1.0, 0.0, 0.6, 0.9, 0.0, 1.0, 0.6, 0.1]);
        let out = rect_maxvol(&q, 3, &InitStrategy::LuPivots).unwrap();
        assert_eq!(out.seed.indices(), &[0, 1, 3]);
    }

    #[test]
    fn rect_maxvol_at_rank_is_initialization() {
        let q = mat(2, &[1.0, 0.0, 0.6, 0.9, 0.0, 1.0, 0.6, 0.1]);
        let out = rect_maxvol(&q, 2, &InitStrategy::LuPivots).unwrap();
        assert_eq!(out.seed, lu_pivot_init(&q).unwrap());
    }

    #[test]
    fn rect_maxvol_size_checks() {
        let q = DMatrix::identity(2, 3);
        assert!(matches!(
            rect_maxvol(&q, 1, &InitStrategy::LuPivots),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            rect_maxvol(&q, 4, &InitStrategy::LuPivots),
            Err(Error::InvalidArgument(_))
        ));
        let deficient = mat(2, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert!(matches!(
            rect_maxvol(&deficient, 2, &InitStrategy::LuPivots),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn auto_mode_stops_inside_ellipsoid() {
        let q = mat(2, &[1.0, 0.0, 0.6, 0.9, 3.0, 0.0, 1.0, 0.6, 0.1, 3.0]);
        let out = rect_maxvol_auto(&q, None, &InitStrategy::LuPivots).unwrap();
        let worst = out.state.argmax_norm_outside(&out.seed).map_or(0.0, |(_, w)| w);
        assert!(worst <= 1.0);
    }

    #[test]
    fn weights_dump_lists_every_column() {
        let q = mat(2, &[1.0, 0.0, 0.6, 0.9, 0.0, 1.0, 0.6, 0.1]);
        let out = rect_maxvol(&q, 3, &InitStrategy::LuPivots).unwrap();
        let mut buf = Vec::new();
        write_weights_csv(&out.seed, &out.state, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(4).unwrap().starts_with("3,2,"));
    }
}
