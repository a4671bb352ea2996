//! Rating datasets: parsing, sparse storage, transposition, fold splits and
//! relevance binarization.
//!
//! Unknown ratings are never stored; an absent `(row, col)` pair reads as `0.0`.
//! External user/item ids are mapped onto dense 0-based indices in ascending
//! id order, so the same triplet multiset always produces the same matrix.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};

/// Upper bound accepted by the parser. Both target datasets use 0.5–5 stars.
pub const MAX_RATING: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingTriplet {
    pub user_id: i64,
    pub item_id: i64,
    pub rating: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeaderMode {
    Present,
    Absent,
    /// Treat the first line as a header when its first field is not an integer.
    #[default]
    Auto,
}

/// Describes how a triplet file is laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingsFormat {
    pub delimiter: u8,
    pub header: HeaderMode,
}

impl Default for RatingsFormat {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: HeaderMode::Auto,
        }
    }
}

impl RatingsFormat {
    pub fn tsv() -> Self {
        Self {
            delimiter: b'\t',
            header: HeaderMode::Auto,
        }
    }
}

/// Sparse `n × m` rating matrix in CSR layout.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    row_ids: Vec<i64>,
    col_ids: Vec<i64>,
}

impl RatingMatrix {
    /// Builds a matrix from triplets. Later duplicates of a `(user, item)` pair
    /// overwrite earlier ones.
    pub fn from_triplets<I>(triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = RatingTriplet>,
    {
        let mut cells: HashMap<(i64, i64), f64> = HashMap::new();
        for t in triplets {
            if !(t.rating.is_finite() && t.rating > 0.0) {
                return Err(invalid(format!(
                    "rating for ({}, {}) must be positive and finite, got {}",
                    t.user_id, t.item_id, t.rating
                )));
            }
            cells.insert((t.user_id, t.item_id), t.rating);
        }
        if cells.is_empty() {
            return Err(Error::EmptyDataset);
        }

        let mut row_ids: Vec<i64> = cells.keys().map(|&(u, _)| u).collect();
        row_ids.sort_unstable();
        row_ids.dedup();
        let mut col_ids: Vec<i64> = cells.keys().map(|&(_, i)| i).collect();
        col_ids.sort_unstable();
        col_ids.dedup();

        let row_of: HashMap<i64, usize> = row_ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let col_of: HashMap<i64, usize> = col_ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();

        let mut entries: Vec<(usize, usize, f64)> = cells
            .into_iter()
            .map(|((u, i), r)| (row_of[&u], col_of[&i], r))
            .collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));

        Ok(Self::from_sorted_entries(row_ids, col_ids, &entries))
    }

    /// Builds a matrix from a dense array; zeros are unknown, negative entries
    /// are rejected. Ids are the dense indices themselves.
    pub fn from_dense(dense: &DMatrix<f64>) -> Result<Self> {
        if dense.nrows() == 0 || dense.ncols() == 0 {
            return Err(invalid("rating matrix needs at least one row and column"));
        }
        let mut entries = Vec::new();
        for r in 0..dense.nrows() {
            for c in 0..dense.ncols() {
                let v = dense[(r, c)];
                if v == 0.0 {
                    continue;
                }
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("entry ({r}, {c}) = {v} is not a positive rating")));
                }
                entries.push((r, c, v));
            }
        }
        let row_ids = (0..dense.nrows() as i64).collect();
        let col_ids = (0..dense.ncols() as i64).collect();
        Ok(Self::from_sorted_entries(row_ids, col_ids, &entries))
    }

    fn from_sorted_entries(row_ids: Vec<i64>, col_ids: Vec<i64>, entries: &[(usize, usize, f64)]) -> Self {
        let nrows = row_ids.len();
        let mut row_ptr = vec![0usize; nrows + 1];
        for &(r, _, _) in entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            nrows,
            ncols: col_ids.len(),
            row_ptr,
            col_idx: entries.iter().map(|e| e.1).collect(),
            values: entries.iter().map(|e| e.2).collect(),
            row_ids,
            col_ids,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ids(&self) -> &[i64] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[i64] {
        &self.col_ids
    }

    /// Stored `(col, rating)` pairs of a row, in ascending column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    /// Rating at `(r, c)`, `0.0` when unknown.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = RatingTriplet> + '_ {
        (0..self.nrows).flat_map(move |r| {
            self.row(r).map(move |(c, v)| RatingTriplet {
                user_id: self.row_ids[r],
                item_id: self.col_ids[c],
                rating: v,
            })
        })
    }

    /// Swaps the roles of rows and columns; reduces item cold start to user cold start.
    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                let slot = next[c];
                col_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
        }
    }

    /// Submatrix with the given rows (in the given order) and every column.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            col_idx.extend_from_slice(&self.col_idx[span.clone()]);
            values.extend_from_slice(&self.values[span]);
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: rows.len(),
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
            row_ids: rows.iter().map(|&r| self.row_ids[r]).collect(),
            col_ids: self.col_ids.clone(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                out[(r, c)] = v;
            }
        }
        out
    }

    /// Dense `R(:, cols)`.
    pub fn column_block(&self, cols: &[usize]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, cols.len());
        let position: HashMap<usize, Vec<usize>> = cols.iter().enumerate().fold(HashMap::new(), |mut acc, (p, &c)| {
            acc.entry(c).or_default().push(p);
            acc
        });
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                if let Some(ps) = position.get(&c) {
                    for &p in ps {
                        out[(r, p)] = v;
                    }
                }
            }
        }
        out
    }

    /// `R · X` for a dense `m × p` matrix `X`.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.ncols, "dimension mismatch in R·X");
        let mut out = DMatrix::zeros(self.nrows, x.ncols());
        for j in 0..x.ncols() {
            let xj = x.column(j);
            let xj = xj.as_slice();
            let mut oj = out.column_mut(j);
            for r in 0..self.nrows {
                let mut acc = 0.0;
                for (c, v) in self.row(r) {
                    acc += v * xj[c];
                }
                oj[r] = acc;
            }
        }
        out
    }

    /// `Rᵀ · Y` for a dense `n × p` matrix `Y`.
    pub fn tmul_dense(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(y.nrows(), self.nrows, "dimension mismatch in Rᵀ·Y");
        let mut out = DMatrix::zeros(self.ncols, y.ncols());
        for j in 0..y.ncols() {
            let yj = y.column(j);
            let oj = out.column_mut(j);
            let oj = oj.data.into_slice_mut();
            for r in 0..self.nrows {
                let yr = yj[r];
                if yr == 0.0 {
                    continue;
                }
                for (c, v) in self.row(r) {
                    oj[c] += v * yr;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// SHA-256 over the canonical triplet listing; keys factor caches and reports.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{}\n", self.nrows, self.ncols).as_bytes());
        for t in self.triplets() {
            h.update(format!("{},{},{:016x}\n", t.user_id, t.item_id, t.rating.to_bits()).as_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Parses `user_id<d>item_id<d>rating[<d>timestamp]` lines.
pub fn parse_ratings<R: Read>(source: R, format: &RatingsFormat) -> Result<RatingMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut triplets = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            let looks_like_header = record.get(0).is_none_or(|f| f.parse::<i64>().is_err());
            match format.header {
                HeaderMode::Present => continue,
                HeaderMode::Auto if looks_like_header => continue,
                _ => {}
            }
        }
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() < 3 || record.len() > 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 or 4 fields, found {}", record.len()),
            });
        }
        let field = |k: usize, what: &str| -> Result<&str> {
            record.get(k).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {what}"),
            })
        };
        let user_id = parse_field::<i64>(field(0, "user id")?, line, "user id")?;
        let item_id = parse_field::<i64>(field(1, "item id")?, line, "item id")?;
        let rating = parse_field::<f64>(field(2, "rating")?, line, "rating")?;
        if !(rating.is_finite() && rating > 0.0 && rating <= MAX_RATING) {
            return Err(Error::RatingOutOfRange { line, value: rating });
        }
        triplets.push(RatingTriplet {
            user_id,
            item_id,
            rating,
        });
    }
    if triplets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    RatingMatrix::from_triplets(triplets)
}

fn parse_field<T: std::str::FromStr>(text: &str, line: u64, what: &str) -> Result<T> {
    text.parse::<T>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from {text:?}"),
    })
}

pub fn read_ratings_file(path: impl AsRef<Path>, format: &RatingsFormat) -> Result<RatingMatrix> {
    let file = std::fs::File::open(path)?;
    parse_ratings(std::io::BufReader::new(file), format)
}

/// Writes the canonical triplet CSV: a `user_id,item_id,rating` header, then
/// one line per stored rating ordered by dense (row, col).
pub fn write_triplets<W: Write>(matrix: &RatingMatrix, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["user_id", "item_id", "rating"])?;
    for t in matrix.triplets() {
        w.write_record([t.user_id.to_string(), t.item_id.to_string(), t.rating.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn transpose(matrix: &RatingMatrix) -> RatingMatrix {
    matrix.transpose()
}

/// Assignment of cold-axis entities (users, or items after transposition) to folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    fold_count: usize,
    assignments: Vec<usize>,
    seed: u64,
}

impl FoldSplit {
    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fold id of every entity.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn entity_count(&self) -> usize {
        self.assignments.len()
    }

    /// Entities in `fold`, ascending.
    pub fn members(&self, fold: usize) -> Vec<usize> {
        self.members_where(|f| f == fold)
    }

    /// Entities in none of `folds`, ascending.
    pub fn members_excluding(&self, folds: &[usize]) -> Vec<usize> {
        self.members_where(|f| !folds.contains(&f))
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.fold_count];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    fn members_where(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| keep(f))
            .map(|(e, _)| e)
            .collect()
    }
}

/// Random equal-size fold split; sizes differ by at most one.
pub fn split_folds(entity_count: usize, fold_count: usize, seed: u64) -> Result<FoldSplit> {
    if fold_count == 0 {
        return Err(invalid("fold count must be positive"));
    }
    if fold_count > entity_count {
        return Err(invalid(format!(
            "cannot split {entity_count} entities into {fold_count} folds"
        )));
    }
    let mut order: Vec<usize> = (0..entity_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignments = vec![0; entity_count];
    for (pos, &entity) in order.iter().enumerate() {
        assignments[entity] = pos % fold_count;
    }
    Ok(FoldSplit {
        fold_count,
        assignments,
        seed,
    })
}

/// Sparse boolean matrix marking relevant `(row, col)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceMatrix {
    ncols: usize,
    rows: Vec<Vec<usize>>,
}

impl RelevanceMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Relevant columns of row `r`, ascending.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn is_relevant(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Marks stored ratings `≥ threshold` as relevant.
pub fn binarize_relevance(matrix: &RatingMatrix, threshold: f64) -> RelevanceMatrix {
    RelevanceMatrix {
        ncols: matrix.ncols(),
        rows: (0..matrix.nrows())
            .map(|r| matrix.row(r).filter(|&(_, v)| v >= threshold).map(|(c, _)| c).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RatingMatrix> {
        parse_ratings(text.as_bytes(), &RatingsFormat::default())
    }

    #[test]
    fn parses_small_triplet_file() {
        let r = parse("1,10,5.0\n1,11,3.0\n2,10,4.0").unwrap();
        assert_eq!((r.nrows(), r.ncols(), r.nnz()), (2, 2, 3));
        assert_eq!(r.get(0, 0), 5.0);
        assert_eq!(r.get(0, 1), 3.0);
        assert_eq!(r.get(1, 0), 4.0);
        assert_eq!(r.get(1, 1), 0.0);
    }

    #[test]
    fn duplicate_pair_keeps_last_occurrence() {
        let r = parse("1,10,5.0\n1,10,2.0").unwrap();
        assert_eq!(r.nnz(), 1);
        assert_eq!(r.get(0, 0), 2.0);
    }

    #[test]
    fn movielens_header_and_timestamp() {
        let r = parse("userId,movieId,rating,timestamp\n1,31,2.5,1260759144\n7,31,4.0,1\n").unwrap();
        assert_eq!((r.nrows(), r.ncols()), (2, 1));
        assert_eq!(r.row_ids(), &[1, 7]);
        assert_eq!(r.get(1, 0), 4.0);
    }

    #[test]
    fn tab_separated_without_header() {
        let fmt = RatingsFormat {
            delimiter: b'\t',
            header: HeaderMode::Absent,
        };
        let r = parse_ratings("196\t242\t3\t881250949\n186\t302\t3\t891717742\n".as_bytes(), &fmt).unwrap();
        assert_eq!(r.nnz(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("1,10,5.0\n2,x,3.0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse("1,10\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn out_of_range_rating() {
        assert!(matches!(parse("1,1,0\n"), Err(Error::RatingOutOfRange { line: 1, .. })));
        assert!(matches!(
            parse("1,1,4\n1,2,11\n"),
            Err(Error::RatingOutOfRange { line: 2, .. })
        ));
        assert!(matches!(parse("1,1,-3\n"), Err(Error::RatingOutOfRange { .. })));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse(""), Err(Error::EmptyDataset)));
        assert!(matches!(parse("userId,movieId,rating\n"), Err(Error::EmptyDataset)));
    }

    #[test]
    fn transpose_moves_entries() {
        let mut d = DMatrix::zeros(2, 3);
        d[(0, 2)] = 4.0;
        d[(1, 0)] = 1.0;
        let r = RatingMatrix::from_dense(&d).unwrap();
        let t = r.transpose();
        assert_eq!((t.nrows(), t.ncols()), (3, 2));
        assert_eq!(t.get(2, 0), 4.0);
        assert_eq!(t.get(0, 1), 1.0);
        assert_eq!(t.nnz(), r.nnz());
        assert_eq!(t.transpose(), r);
    }

    #[test]
    fn fold_sizes_are_balanced() {
        let s = split_folds(10, 5, 3).unwrap();
        assert_eq!(s.fold_sizes(), vec![2; 5]);
        let mut sizes = split_folds(11, 5, 99).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn fold_split_is_deterministic() {
        assert_eq!(split_folds(37, 5, 7).unwrap(), split_folds(37, 5, 7).unwrap());
        assert_ne!(
            split_folds(37, 5, 7).unwrap().assignments(),
            split_folds(37, 5, 8).unwrap().assignments()
        );
    }

    #[test]
    fn too_many_folds() {
        assert!(matches!(split_folds(3, 5, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(split_folds(3, 0, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn relevance_threshold() {
        let r = parse("1,1,4.0\n1,2,3.5\n1,3,5.0").unwrap();
        let rel = binarize_relevance(&r, 4.0);
        assert_eq!(rel.row(0), &[0, 2]);
        assert!(!rel.is_relevant(0, 1));
        assert_eq!(binarize_relevance(&r, 6.0).count(), 0);
    }

    #[test]
    fn sparse_products_match_dense() {
        let r = parse("1,1,4\n1,3,2\n2,2,5\n3,1,1\n3,3,3").unwrap();
        let x = DMatrix::from_fn(3, 2, |i, j| (i as f64) - 0.5 * j as f64 + 1.0);
        let y = DMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 - 1.0);
        let d = r.to_dense();
        assert!((r.mul_dense(&x) - &d * &x).norm() < 1e-14);
        assert!((r.tmul_dense(&y) - d.transpose() * &y).norm() < 1e-14);
        assert_eq!(r.column_block(&[2, 0]).column(0), d.column(2));
    }

    #[test]
    fn select_rows_keeps_ids() {
        let r = parse("5,1,4\n6,2,5\n7,1,1").unwrap();
        let sub = r.select_rows(&[2, 0]);
        assert_eq!(sub.row_ids(), &[7, 5]);
        assert_eq!(sub.get(0, 0), 1.0);
        assert_eq!(sub.ncols(), 2);
    }
}
