//! Truncations of the weighted space on the word tree, operators on them
//! in the orthonormal basis `e_s`, and the plain `l^2(N)` example space.
//!
//! Every operator here is a compression to words of length `<= L`. Since all
//! generators raise length by one, outputs of length `L + 1` are dropped and
//! products of compressions equal compressions of products.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, C64};
use crate::semigroup::{colour_offset, Colour, DyadicWeight, Generator, Word, ENUMERATION_CAP};
use crate::tree::{stratum_indices, Component};

/// Depth cap for exact `f64` weights.
pub const MAX_EXACT_DEPTH: usize = 40;

pub trait Basis: Clone + PartialEq + fmt::Debug {
    fn dimension(&self) -> usize;
}

/// All words of length `<= max_len`, indexed in the global order.
#[derive(Clone)]
pub struct TruncatedBasis {
    tables: Arc<Tables>,
}

struct Tables {
    max_len: usize,
    depth: Vec<u8>,
    /// Index of `μ(word)`; `u32::MAX` for the unit.
    colour: Vec<u32>,
    colour_depth: Vec<u8>,
    /// Word indices grouped by colour index: `by_colour[colour_start[c]..colour_start[c + 1]]`.
    by_colour: Vec<u32>,
    colour_start: Vec<u32>,
}

impl TruncatedBasis {
    pub fn new(max_len: usize) -> Result<Self> {
        if max_len > ENUMERATION_CAP {
            return Err(Error::LengthCap {
                requested: max_len,
                cap: ENUMERATION_CAP,
            });
        }
        let dim = (1usize << (max_len + 1)) - 1;
        let mut depth = vec![0u8; dim];
        let mut colour = vec![u32::MAX; dim];
        let mut colour_depth = vec![0u8; dim];
        let mut letters = Vec::with_capacity(max_len);
        for index in 1..dim {
            word_letters(index, &mut letters);
            depth[index] = crate::semigroup::depth_of(&letters) as u8;
            let start = colour_offset(&letters);
            let c = suffix_index(index, letters.len() - start);
            colour[index] = c as u32;
            colour_depth[index] = depth[c];
        }
        let mut colour_start = vec![0u32; dim + 1];
        for &c in colour.iter().skip(1) {
            colour_start[c as usize + 1] += 1;
        }
        for i in 0..dim {
            colour_start[i + 1] += colour_start[i];
        }
        let mut fill = colour_start.clone();
        let mut by_colour = vec![0u32; dim - 1];
        for (index, &c) in colour.iter().enumerate().skip(1) {
            by_colour[fill[c as usize] as usize] = index as u32;
            fill[c as usize] += 1;
        }
        Ok(TruncatedBasis {
            tables: Arc::new(Tables {
                max_len,
                depth,
                colour,
                colour_depth,
                by_colour,
                colour_start,
            }),
        })
    }

    pub fn max_len(&self) -> usize {
        self.tables.max_len
    }

    pub fn word(&self, index: usize) -> Word {
        assert!(index < self.dimension());
        Word::from_global_index(index as u64)
    }

    pub fn index_of(&self, word: &Word) -> Option<usize> {
        (word.len() <= self.max_len()).then(|| word.global_index() as usize)
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.dimension()).map(|i| self.word(i))
    }

    pub fn depth(&self, index: usize) -> usize {
        self.tables.depth[index] as usize
    }

    /// Depth of the colour of the word; 0 for the unit.
    pub fn colour_depth(&self, index: usize) -> usize {
        self.tables.colour_depth[index] as usize
    }

    pub fn colour_index(&self, index: usize) -> Option<usize> {
        let c = self.tables.colour[index];
        (c != u32::MAX).then_some(c as usize)
    }

    pub fn length(&self, index: usize) -> usize {
        (usize::BITS - 1 - (index + 1).leading_zeros()) as usize
    }

    pub fn parent(&self, index: usize) -> Option<usize> {
        (index > 0).then(|| suffix_index(index, self.length(index) - 1))
    }

    pub fn child(&self, index: usize, gen: Generator) -> Option<usize> {
        let len = self.length(index);
        if len >= self.max_len() {
            return None;
        }
        let value = index + 1 - (1 << len);
        let bit = usize::from(gen == Generator::H) << len;
        Some((1 << (len + 1)) - 1 + value + bit)
    }

    /// Words whose colour is the word at `colour_index`.
    pub fn coloured_by(&self, colour_index: usize) -> &[u32] {
        let t = &self.tables;
        &t.by_colour[t.colour_start[colour_index] as usize..t.colour_start[colour_index + 1] as usize]
    }

    pub fn weight(&self, index: usize) -> DyadicWeight {
        DyadicWeight::from_log2(-(self.depth(index) as i64))
    }

    pub fn path_weight(&self, index: usize) -> DyadicWeight {
        self.word(index).path_weight()
    }
}

impl Basis for TruncatedBasis {
    fn dimension(&self) -> usize {
        self.tables.depth.len()
    }
}

impl PartialEq for TruncatedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.max_len() == other.max_len()
    }
}

impl fmt::Debug for TruncatedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedBasis")
            .field("max_len", &self.max_len())
            .finish()
    }
}

fn word_letters(index: usize, out: &mut Vec<Generator>) {
    out.clear();
    let len = (usize::BITS - 1 - (index + 1).leading_zeros()) as usize;
    let value = index + 1 - (1 << len);
    out.extend((0..len).rev().map(|bit| {
        if value >> bit & 1 == 1 {
            Generator::H
        } else {
            Generator::G
        }
    }));
}

/// Index of the length-`keep` suffix of the word at `index`.
fn suffix_index(index: usize, keep: usize) -> usize {
    let len = (usize::BITS - 1 - (index + 1).leading_zeros()) as usize;
    let value = index + 1 - (1 << len);
    debug_assert!(keep <= len);
    (1 << keep) - 1 + (value & ((1 << keep) - 1))
}

/// Truncated `l^2(N)` with orthonormal basis `e_1, ..., e_N` stored at
/// indices `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntroSpace {
    dimension: usize,
}

impl IntroSpace {
    pub fn new(dimension: usize) -> Self {
        IntroSpace { dimension }
    }

    /// Selects `e_i` with `i > n` (the subspace `E_n`).
    pub fn tail_mask(&self, n: usize) -> Vec<bool> {
        (1..=self.dimension).map(|i| i > n).collect()
    }

    pub fn unit_vector(&self, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dimension];
        v[i - 1] = C64::new(1.0, 0.0);
        v
    }
}

impl Basis for IntroSpace {
    fn dimension(&self) -> usize {
        self.dimension
    }
}

/// A finite matrix over a basis; `entry(row, col)` is `<T e_col, e_row>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<B: Basis = TruncatedBasis> {
    basis: B,
    matrix: SparseMatrix,
}

impl<B: Basis> SparseOperator<B> {
    pub fn new(basis: B, matrix: SparseMatrix) -> Self {
        let dim = basis.dimension();
        assert_eq!((matrix.nrows(), matrix.ncols()), (dim, dim));
        SparseOperator { basis, matrix }
    }

    pub fn from_triplets<I>(basis: B, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let dim = basis.dimension();
        SparseOperator {
            matrix: SparseMatrix::from_triplets(dim, dim, triplets),
            basis,
        }
    }

    pub fn zero(basis: B) -> Self {
        let dim = basis.dimension();
        SparseOperator {
            basis,
            matrix: SparseMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(basis: B) -> Self {
        let dim = basis.dimension();
        SparseOperator {
            basis,
            matrix: SparseMatrix::diagonal_mask(&vec![true; dim]),
        }
    }

    pub fn basis(&self) -> &B {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.compose(&other.matrix),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.add(&other.matrix),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.sub(&other.matrix),
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn adjoint(&self) -> Self {
        SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dimension() {
            return Err(Error::BasisMismatch);
        }
        Ok(self.matrix.apply(v))
    }

    /// `self^k`, with `self^0` the identity.
    pub fn power(&self, k: usize) -> Self {
        let mut result = SparseOperator::identity(self.basis.clone());
        for _ in 0..k {
            result.matrix = self.matrix.compose(&result.matrix);
        }
        result
    }

    /// Keeps the rows and columns selected by the masks.
    pub fn masked(&self, rows: &[bool], cols: &[bool]) -> Self {
        SparseOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.mask(rows, cols),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }
}

impl SparseOperator<TruncatedBasis> {
    /// `<T e_col, e_row>` addressed by words; zero outside the truncation.
    pub fn entry_at(&self, row: &Word, col: &Word) -> C64 {
        match (self.basis.index_of(row), self.basis.index_of(col)) {
            (Some(r), Some(c)) => self.entry(r, c),
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            max_len: self.basis.max_len(),
            entries: self
                .matrix
                .entries()
                .map(|(r, c, v)| {
                    (
                        self.basis.word(r).to_string(),
                        self.basis.word(c).to_string(),
                        v.re,
                        v.im,
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        let basis = TruncatedBasis::new(json.max_len)?;
        let mut triplets = Vec::with_capacity(json.entries.len());
        for (i, (row, col, re, im)) in json.entries.iter().enumerate() {
            let locate = |text: &str, field: usize| -> Result<usize> {
                let word: Word = text.parse().map_err(|e: Error| Error::Schema {
                    pointer: format!("/entries/{i}/{field}"),
                    message: e.to_string(),
                })?;
                basis.index_of(&word).ok_or_else(|| Error::Schema {
                    pointer: format!("/entries/{i}/{field}"),
                    message: format!("{word} is longer than max_len {}", json.max_len),
                })
            };
            triplets.push((locate(row, 0)?, locate(col, 1)?, C64::new(*re, *im)));
        }
        Ok(SparseOperator::from_triplets(basis, triplets))
    }
}

/// `{max_len, entries: [[row_word, col_word, re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub max_len: usize,
    pub entries: Vec<(String, String, f64, f64)>,
}

/// The compression of the weighted shift `T_c`: `e_{p(t)} -> w(t) e_t` for
/// every `t` of colour `c`.
pub fn generator_matrix(colour: &Colour, basis: &TruncatedBasis) -> SparseOperator {
    let Some(c) = basis.index_of(colour.word()) else {
        return SparseOperator::zero(basis.clone());
    };
    let triplets = basis.coloured_by(c).iter().map(|&t| {
        let t = t as usize;
        let parent = basis.parent(t).expect("coloured words are not the unit");
        let depth = basis.depth(t);
        assert!(depth <= MAX_EXACT_DEPTH, "depth {depth} exceeds exact weight cap");
        (t, parent, C64::new(basis.weight(t).to_f64(), 0.0))
    });
    SparseOperator::from_triplets(basis.clone(), triplets.collect::<Vec<_>>())
}

/// Coordinatewise projections on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionSpec {
    /// `P_n`: depth exactly `n`.
    DepthEq(usize),
    /// `P̄_n`: depth at most `n`.
    DepthLe(usize),
    /// `π_n`: length exactly `n`.
    LenEq(usize),
    /// `π̄_n`: length at most `n`.
    LenLe(usize),
    /// `P_{n,r}`.
    StratumEq { n: usize, r: usize },
    /// `P̄_{n,r}`.
    StratumLe { n: usize, r: usize },
    /// `Q_{n,K}` for a component `K`.
    ComponentMask(Component),
    /// `1 - P` for the inner projection `P`.
    Complement(Box<ProjectionSpec>),
}

impl ProjectionSpec {
    pub fn complement(self) -> ProjectionSpec {
        ProjectionSpec::Complement(Box::new(self))
    }

    pub fn mask(&self, basis: &TruncatedBasis) -> Vec<bool> {
        let dim = basis.dimension();
        match self {
            ProjectionSpec::DepthEq(n) => (0..dim).map(|i| basis.depth(i) == *n).collect(),
            ProjectionSpec::DepthLe(n) => (0..dim).map(|i| basis.depth(i) <= *n).collect(),
            ProjectionSpec::LenEq(n) => (0..dim).map(|i| basis.length(i) == *n).collect(),
            ProjectionSpec::LenLe(n) => (0..dim).map(|i| basis.length(i) <= *n).collect(),
            ProjectionSpec::StratumEq { n, r } => stratum_indices(basis, *n)
                .into_iter()
                .map(|s| s == *r)
                .collect(),
            ProjectionSpec::StratumLe { n, r } => stratum_indices(basis, *n)
                .into_iter()
                .map(|s| s <= *r)
                .collect(),
            ProjectionSpec::ComponentMask(component) => {
                let mut keep = vec![false; dim];
                for word in &component.members {
                    if let Some(i) = basis.index_of(word) {
                        keep[i] = true;
                    }
                }
                keep
            }
            ProjectionSpec::Complement(inner) => {
                inner.mask(basis).into_iter().map(|k| !k).collect()
            }
        }
    }
}

pub fn projection_matrix(spec: &ProjectionSpec, basis: &TruncatedBasis) -> SparseOperator {
    SparseOperator::new(basis.clone(), SparseMatrix::diagonal_mask(&spec.mask(basis)))
}

/// `Q · T · Q2` for coordinatewise projections.
pub fn compress(left: &ProjectionSpec, op: &SparseOperator, right: &ProjectionSpec) -> SparseOperator {
    let basis = op.basis();
    op.masked(&left.mask(basis), &right.mask(basis))
}

fn intro_operator(space: IntroSpace, sources: impl Iterator<Item = usize>) -> SparseOperator<IntroSpace> {
    let n = space.dimension();
    let triplets: Vec<_> = sources
        .filter(|&i| i < n)
        .map(|i| (i, i - 1, C64::new(1.0, 0.0)))
        .collect();
    SparseOperator::from_triplets(space, triplets)
}

/// `T_0 e_i = e_{i+1}` for odd `i`.
pub fn intro_t0(space: IntroSpace) -> SparseOperator<IntroSpace> {
    intro_operator(space, (1..=space.dimension()).filter(|i| i % 2 == 1))
}

/// The rank-one `T_n e_{2n} = e_{2n+1}`.
pub fn intro_tn(n: usize, space: IntroSpace) -> SparseOperator<IntroSpace> {
    assert!(n >= 1, "intro_tn is defined for n >= 1");
    intro_operator(space, std::iter::once(2 * n).filter(|&i| i <= space.dimension()))
}

/// `Σ_n T_n`: `e_i -> e_{i+1}` for even `i`.
pub fn intro_tsum(space: IntroSpace) -> SparseOperator<IntroSpace> {
    intro_operator(space, (1..=space.dimension()).filter(|i| i % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn col(s: &str) -> Colour {
        s.parse().unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn basis_tables_match_word_functions() {
        let basis = TruncatedBasis::new(6).unwrap();
        assert_eq!(basis.dimension(), 127);
        assert_eq!(basis.word(0), Word::unit());
        for (i, word) in basis.words().enumerate() {
            assert_eq!(basis.index_of(&word), Some(i));
            assert_eq!(basis.depth(i), word.depth());
            assert_eq!(basis.length(i), word.len());
            if i > 0 {
                let colour = word.colour().unwrap();
                assert_eq!(basis.colour_index(i), basis.index_of(colour.word()));
                assert_eq!(basis.colour_depth(i), colour.depth());
                assert_eq!(basis.word(basis.parent(i).unwrap()), word.predecessor().unwrap());
            }
            if word.len() < 6 {
                assert_eq!(
                    basis.word(basis.child(i, Generator::H).unwrap()),
                    word.prepend(Generator::H)
                );
            }
        }
    }

    #[test]
    fn generator_entries() {
        let basis = TruncatedBasis::new(2).unwrap();
        let tg = generator_matrix(&col("g"), &basis);
        assert_eq!(tg.entry_at(&w("g"), &Word::unit()), re(1.0));
        assert!(basis.index_of(&w("ghg")).is_none());
        let th = generator_matrix(&col("h"), &basis);
        assert_eq!(th.entry_at(&w("h"), &Word::unit()), re(0.5));
        // μ(ghh) = h, so T_h also sends e_hh to e_ghh with weight 1/4
        let basis3 = TruncatedBasis::new(3).unwrap();
        let th3 = generator_matrix(&col("h"), &basis3);
        assert_eq!(th3.entry_at(&w("ghh"), &w("hh")), re(0.25));
    }

    #[test]
    fn at_most_one_entry_per_column() {
        let basis = TruncatedBasis::new(7).unwrap();
        for i in 1..basis.dimension() {
            let colour = Colour::new(basis.word(i)).ok();
            if let Some(c) = colour {
                let op = generator_matrix(&c, &basis);
                for j in 0..basis.dimension() {
                    assert!(op.matrix().column(j).len() <= 1);
                }
            }
        }
    }

    #[test]
    fn projections() {
        let basis = TruncatedBasis::new(2).unwrap();
        let p0 = projection_matrix(&ProjectionSpec::DepthLe(0), &basis);
        let diag: Vec<_> = (0..7).filter(|&i| p0.entry(i, i) == re(1.0)).collect();
        assert_eq!(diag, vec![0, 1, 3]);
        let l1 = projection_matrix(&ProjectionSpec::LenLe(1), &basis);
        assert_eq!(l1.nnz(), 3);
        assert_eq!(p0.compose(&p0).unwrap(), p0);
    }

    #[test]
    fn stratum_projection_uses_stratum_index() {
        let basis = TruncatedBasis::new(2).unwrap();
        let mask = ProjectionSpec::StratumEq { n: 0, r: 2 }.mask(&basis);
        let selected: Vec<_> = (0..7).filter(|&i| mask[i]).map(|i| basis.word(i).to_string()).collect();
        // gh: edges 1->h and h->gh both have depth-1 colours; hg keeps 1->g
        assert_eq!(selected, vec!["gh", "hh"]);
    }

    #[test]
    fn compose_identities() {
        let basis = TruncatedBasis::new(6).unwrap();
        let tg = generator_matrix(&col("g"), &basis);
        assert!(tg.compose(&tg).unwrap().is_zero());
        let th = generator_matrix(&col("h"), &basis);
        assert_eq!(th.adjoint().adjoint(), th);
        let other = TruncatedBasis::new(5).unwrap();
        let tg5 = generator_matrix(&col("g"), &other);
        assert_eq!(tg.compose(&tg5), Err(Error::BasisMismatch));
    }

    #[test]
    fn compressions() {
        let basis = TruncatedBasis::new(5).unwrap();
        let th = generator_matrix(&col("h"), &basis);
        assert!(compress(&ProjectionSpec::DepthLe(0), &th, &ProjectionSpec::DepthLe(0)).is_zero());
        let full = ProjectionSpec::LenLe(5);
        assert_eq!(compress(&full, &th, &full), th);
        let tgh = generator_matrix(&col("gh"), &basis);
        let c = compress(&ProjectionSpec::DepthLe(1), &tgh, &ProjectionSpec::DepthLe(1));
        assert_eq!(c.nnz(), 1);
        assert_eq!(c.entry_at(&w("gh"), &w("h")), re(0.5));
        // mask route equals the matrix product route
        let p = projection_matrix(&ProjectionSpec::DepthLe(1), &basis);
        assert_eq!(p.compose(&tgh).unwrap().compose(&p).unwrap(), c);
    }

    #[test]
    fn intro_operators() {
        let space = IntroSpace::new(4);
        let t0 = intro_t0(space);
        assert_eq!(t0.entry(1, 0), re(1.0));
        assert_eq!(t0.entry(3, 2), re(1.0));
        assert_eq!(t0.nnz(), 2);
        let t1 = intro_tn(1, space);
        assert_eq!(t1.nnz(), 1);
        assert_eq!(t1.entry(2, 1), re(1.0));
        assert!(t0.compose(&t0).unwrap().is_zero());
        let sum = intro_tsum(space);
        assert_eq!(sum.nnz(), 1);
    }

    #[test]
    fn operator_json_round_trip() {
        let basis = TruncatedBasis::new(3).unwrap();
        let op = generator_matrix(&col("h"), &basis).scale(C64::new(1.0, -2.0));
        let json = op.to_json();
        assert_eq!(json.entries[0].0, "h");
        assert_eq!(json.entries[0].1, "1");
        let text = serde_json::to_string(&json).unwrap();
        let back: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SparseOperator::from_json(&back).unwrap(), op);
    }
}
