//! Column-compressed complex matrices and largest-singular-value routines.
//!
//! [`spectral_norm`] splits a matrix into the connected blocks of its
//! row/column incidence graph; the norm is the largest block norm. Blocks no
//! larger than the dense threshold go through a full SVD, bigger ones through
//! power iteration on `A^H A`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unionfind::DisjointSets;

pub type C64 = Complex64;

/// Rows are sorted and entries nonzero within every column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut columns: Vec<Vec<(usize, C64)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r}, {c}) out of range");
            columns[c].push((r, v));
        }
        for column in &mut columns {
            column.sort_by_key(|&(r, _)| r);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(column.len());
            for &(r, v) in column.iter() {
                match merged.last_mut() {
                    Some((last, acc)) if *last == r => *acc += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|&(_, v)| v != C64::new(0.0, 0.0));
            *column = merged;
        }
        SparseMatrix {
            rows,
            cols: columns,
        }
    }

    pub fn diagonal_mask(keep: &[bool]) -> Self {
        let n = keep.len();
        SparseMatrix::from_triplets(
            n,
            n,
            keep.iter()
                .enumerate()
                .filter(|(_, &k)| k)
                .map(|(i, _)| (i, i, C64::new(1.0, 0.0))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn column(&self, col: usize) -> &[(usize, C64)] {
        &self.cols[col]
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let column = &self.cols[col];
        match column.binary_search_by_key(&row, |&(r, _)| r) {
            Ok(pos) => column[pos].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `(row, col, value)` in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, column)| column.iter().map(move |&(r, v)| (r, c, v)))
    }

    /// `self * rhs`.
    pub fn compose(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch in compose");
        let mut acc = vec![C64::new(0.0, 0.0); self.rows];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.rows];
        let cols = rhs
            .cols
            .iter()
            .map(|rhs_col| {
                for &(k, b) in rhs_col {
                    for &(i, a) in &self.cols[k] {
                        if !mark[i] {
                            mark[i] = true;
                            touched.push(i);
                        }
                        acc[i] += a * b;
                    }
                }
                touched.sort_unstable();
                let column = touched
                    .iter()
                    .filter_map(|&i| {
                        let v = acc[i];
                        acc[i] = C64::new(0.0, 0.0);
                        mark[i] = false;
                        (v != C64::new(0.0, 0.0)).then_some((i, v))
                    })
                    .collect();
                touched.clear();
                column
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols,
        }
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        self.linear_combination(C64::new(1.0, 0.0), rhs, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> SparseMatrix {
        self.linear_combination(C64::new(1.0, 0.0), rhs, C64::new(-1.0, 0.0))
    }

    /// `a * self + b * rhs`.
    pub fn linear_combination(&self, a: C64, rhs: &SparseMatrix, b: C64) -> SparseMatrix {
        assert_eq!(
            (self.nrows(), self.ncols()),
            (rhs.nrows(), rhs.ncols()),
            "dimension mismatch in add"
        );
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(x, y)| {
                let mut out = Vec::with_capacity(x.len() + y.len());
                let (mut i, mut j) = (0, 0);
                while i < x.len() || j < y.len() {
                    let (row, v) = match (x.get(i), y.get(j)) {
                        (Some(&(rx, vx)), Some(&(ry, vy))) if rx == ry => {
                            i += 1;
                            j += 1;
                            (rx, a * vx + b * vy)
                        }
                        (Some(&(rx, vx)), Some(&(ry, _))) if rx < ry => {
                            i += 1;
                            (rx, a * vx)
                        }
                        (Some(&(rx, vx)), None) => {
                            i += 1;
                            (rx, a * vx)
                        }
                        (_, Some(&(ry, vy))) => {
                            j += 1;
                            (ry, b * vy)
                        }
                        (None, None) => unreachable!(),
                    };
                    if v != C64::new(0.0, 0.0) {
                        out.push((row, v));
                    }
                }
                out
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols,
        }
    }

    pub fn scale(&self, factor: C64) -> SparseMatrix {
        if factor == C64::new(0.0, 0.0) {
            return SparseMatrix::zeros(self.rows, self.ncols());
        }
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|&(r, v)| (r, v * factor)).collect())
                .collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(
            self.ncols(),
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols());
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        for (c, column) in self.cols.iter().enumerate() {
            let xc = x[c];
            if xc == C64::new(0.0, 0.0) {
                continue;
            }
            for &(r, v) in column {
                y[r] += v * xc;
            }
        }
        y
    }

    pub fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        assert_eq!(y.len(), self.rows);
        self.cols
            .iter()
            .map(|column| column.iter().map(|&(r, v)| v.conj() * y[r]).sum())
            .collect()
    }

    /// Keeps entries whose row and column are both selected.
    pub fn mask(&self, keep_rows: &[bool], keep_cols: &[bool]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .enumerate()
                .map(|(c, column)| {
                    if !keep_cols[c] {
                        return Vec::new();
                    }
                    column
                        .iter()
                        .copied()
                        .filter(|&(r, _)| keep_rows[r])
                        .collect()
                })
                .collect(),
        }
    }

    /// Submatrix on the given (ascending) row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut local = vec![usize::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            local[r] = i;
        }
        let triplets = cols.iter().enumerate().flat_map(|(j, &c)| {
            let local = &local;
            self.cols[c]
                .iter()
                .filter(move |&&(r, _)| local[r] != usize::MAX)
                .map(move |&(r, v)| (local[r], j, v))
        });
        SparseMatrix::from_triplets(rows.len(), cols.len(), triplets.collect::<Vec<_>>())
    }

    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        self.sub(other)
            .entries()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut dense = DMatrix::from_element(self.rows, self.ncols(), C64::new(0.0, 0.0));
        for (r, c, v) in self.entries() {
            dense[(r, c)] = v;
        }
        dense
    }

    pub fn from_dense(dense: &DMatrix<C64>) -> SparseMatrix {
        let (rows, cols) = dense.shape();
        SparseMatrix::from_triplets(
            rows,
            cols,
            (0..cols)
                .flat_map(|c| (0..rows).map(move |r| (r, c)))
                .map(|(r, c)| (r, c, dense[(r, c)])),
        )
    }

    /// Connected blocks of the row/column incidence graph, as
    /// `(rows, cols)` index lists. Empty rows and columns are omitted.
    pub fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let rows = self.rows;
        let mut sets = DisjointSets::new(rows + self.ncols());
        for (r, c, _) in self.entries() {
            sets.union(r, rows + c);
        }
        let mut occupied_row = vec![false; rows];
        let mut occupied_col = vec![false; self.ncols()];
        for (r, c, _) in self.entries() {
            occupied_row[r] = true;
            occupied_col[c] = true;
        }
        sets.groups()
            .into_iter()
            .filter_map(|group| {
                let (mut block_rows, mut block_cols) = (Vec::new(), Vec::new());
                for node in group {
                    if node < rows {
                        if occupied_row[node] {
                            block_rows.push(node);
                        }
                    } else if occupied_col[node - rows] {
                        block_cols.push(node - rows);
                    }
                }
                (!block_cols.is_empty()).then_some((block_rows, block_cols))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    PowerIteration,
    DenseExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: NormMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Relative tolerance on successive Rayleigh quotients.
    pub tol: f64,
    pub max_iter: usize,
    /// Blocks with both sides at most this size use a dense SVD.
    pub dense_threshold: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-12,
            max_iter: 100_000,
            dense_threshold: 512,
            seed: 0xC0FFEE,
        }
    }
}

impl NormOptions {
    pub fn with_tol(tol: f64) -> Self {
        NormOptions {
            tol,
            ..NormOptions::default()
        }
    }
}

pub fn dense_spectral_norm(dense: &DMatrix<C64>) -> f64 {
    if dense.is_empty() {
        return 0.0;
    }
    dense.singular_values().max()
}

/// Largest singular value, block by block.
pub fn spectral_norm(matrix: &SparseMatrix, options: &NormOptions) -> Result<NormResult> {
    let mut result = NormResult {
        value: 0.0,
        iterations: 0,
        residual: 0.0,
        method: NormMethod::DenseExact,
    };
    for (rows, cols) in matrix.blocks() {
        let block = matrix.submatrix(&rows, &cols);
        let part = if rows.len().max(cols.len()) <= options.dense_threshold {
            NormResult {
                value: single_entry_norm(&block)
                    .unwrap_or_else(|| dense_spectral_norm(&block.to_dense())),
                iterations: 0,
                residual: 0.0,
                method: NormMethod::DenseExact,
            }
        } else {
            power_iteration_norm(&block, options)?
        };
        result.value = result.value.max(part.value);
        result.iterations += part.iterations;
        result.residual = result.residual.max(part.residual);
        if part.method == NormMethod::PowerIteration {
            result.method = NormMethod::PowerIteration;
        }
    }
    Ok(result)
}

fn single_entry_norm(block: &SparseMatrix) -> Option<f64> {
    (block.nnz() == 1).then(|| block.entries().next().map_or(0.0, |(_, _, v)| v.norm()))
}

/// Dense SVD of the whole matrix, no block splitting.
pub fn dense_norm(matrix: &SparseMatrix) -> f64 {
    dense_spectral_norm(&matrix.to_dense())
}

/// Width of the iterated block in [`power_iteration_norm`].
const POWER_BLOCK: usize = 8;

/// Block power iteration on `A^H A` with a Rayleigh-Ritz step, from a
/// seeded start block. A block converges at the rate
/// `(σ_{b+1}/σ_1)^2` instead of `(σ_2/σ_1)^2`, which matters when the top
/// singular values nearly coincide.
pub fn power_iteration_norm(matrix: &SparseMatrix, options: &NormOptions) -> Result<NormResult> {
    let n = matrix.ncols();
    let width = POWER_BLOCK.min(n);
    if width == 0 || matrix.is_zero() {
        return Ok(NormResult {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
            method: NormMethod::PowerIteration,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let start = DMatrix::from_fn(n, width, |_, _| C64::new(rng.random::<f64>() - 0.5, 0.0));
    let mut x = start.qr().q();
    let residual_tol = options.tol.sqrt();
    let mut previous = f64::NAN;
    let mut estimate = 0.0;
    for iteration in 1..=options.max_iter {
        let y = apply_columns(&x, |v| matrix.apply(v), matrix.nrows());
        let z = apply_columns(&y, |v| matrix.apply_adjoint(v), n);
        let gram = y.adjoint() * &y;
        let eigen = gram.symmetric_eigen();
        let (top, theta) = eigen
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
        if theta <= 0.0 {
            return Ok(NormResult {
                value: 0.0,
                iterations: iteration,
                residual: 0.0,
                method: NormMethod::PowerIteration,
            });
        }
        let u = eigen.eigenvectors.column(top);
        let ritz = &x * u;
        let image = &z * u;
        let residual = (image - ritz * C64::new(theta, 0.0)).norm() / theta;
        estimate = theta.sqrt();
        if (theta - previous).abs() <= options.tol * theta && residual <= residual_tol {
            return Ok(NormResult {
                value: estimate,
                iterations: iteration,
                residual,
                method: NormMethod::PowerIteration,
            });
        }
        previous = theta;
        x = z.qr().q();
    }
    Err(Error::NoConvergence {
        iterations: options.max_iter,
        estimate,
    })
}

fn apply_columns<F: Fn(&[C64]) -> Vec<C64>>(block: &DMatrix<C64>, f: F, rows: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(rows, block.ncols());
    for (j, col) in block.column_iter().enumerate() {
        let image = f(col.as_slice());
        out.column_mut(j).copy_from_slice(&image);
    }
    out
}
