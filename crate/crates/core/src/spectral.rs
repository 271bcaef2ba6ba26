//! Norm-based experiments on truncated operators.
//!
//! Every routine returns the raw numbers together with a `holds` verdict at
//! the caller's tolerance; nothing here panics on a failed inequality.

use std::collections::HashMap;

use log::warn;
use nalgebra::DMatrix;
use num_complex::ComplexFloat;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::{build_witness_u, delta, lambda_extract_at, realize, FormalElement};
use crate::linalg::{dense_spectral_norm, spectral_norm, NormOptions, SparseMatrix, C64};
pub use crate::linalg::{NormMethod, NormResult};
use crate::semigroup::{colour_trace, Colour, DyadicWeight, Word};
use crate::space::{
    compress, generator_matrix, intro_t0, intro_tn, intro_tsum, Basis, IntroSpace, ProjectionSpec,
    SparseOperator, TruncatedBasis,
};
use crate::tree::{components_in, xi_word};

/// Default tolerance for norm comparisons.
pub const NORM_TOL: f64 = 1e-9;

/// Largest singular value to relative accuracy `tol`.
pub fn operator_norm<B: Basis>(op: &SparseOperator<B>, tol: f64) -> Result<NormResult> {
    spectral_norm(op.matrix(), &NormOptions::with_tol(tol))
}

fn norm_value<B: Basis>(op: &SparseOperator<B>) -> Result<f64> {
    Ok(operator_norm(op, 1e-12)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub k: usize,
    pub norm: f64,
    /// `norm^{1/k}`.
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub entries: Vec<ProfileEntry>,
    pub safe_k_max: usize,
}

/// Largest exponent whose power is reported for an element on a length-`L`
/// truncation: `L` minus the longest sequence in the element.
pub fn safe_k_max(max_len: usize, element: &FormalElement) -> usize {
    max_len.saturating_sub(element.max_sequence_len()).max(1)
}

/// `‖T^k‖` and `‖T^k‖^{1/k}` for `k = 1..=min(k_max, safe_k_max)`.
pub fn spectral_profile<B: Basis>(
    op: &SparseOperator<B>,
    k_max: usize,
    safe_k_max: usize,
) -> Result<SpectralProfile> {
    let k_max = if k_max > safe_k_max {
        warn!("k_max {k_max} clamped to the safe limit {safe_k_max}");
        safe_k_max
    } else {
        k_max
    };
    let mut entries = Vec::with_capacity(k_max);
    let mut power = op.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = op.compose(&power)?;
        }
        let norm = norm_value(&power)?;
        entries.push(ProfileEntry {
            k,
            norm,
            root: norm.powf(1.0 / k as f64),
        });
    }
    Ok(SpectralProfile {
        entries,
        safe_k_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentNorm {
    pub base: Word,
    pub steps: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNorm {
    pub value: f64,
    pub per_component: Vec<ComponentNorm>,
}

/// `max_K ‖Q_{n,K} T Q_{n,K}‖` over the components of the `n`-subgraph.
/// Fails if `T` moves mass between components.
pub fn block_norm(op: &SparseOperator, n: usize) -> Result<BlockNorm> {
    let basis = op.basis();
    let comps = components_in(basis, n)?;
    let mut owner = vec![usize::MAX; basis.dimension()];
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(comps.len());
    for (k, comp) in comps.iter().enumerate() {
        let indices: Vec<usize> = comp
            .members
            .iter()
            .map(|w| basis.index_of(w).expect("member of the basis"))
            .collect();
        for &i in &indices {
            owner[i] = k;
        }
        members.push(indices);
    }
    let off_block: f64 = op
        .matrix()
        .entries()
        .filter(|&(r, c, _)| owner[r] != owner[c])
        .map(|(_, _, v)| v.norm())
        .sum();
    if off_block > 0.0 {
        return Err(Error::Precondition(format!(
            "operator has off-block mass {off_block:e}; it uses colours deeper than {n}"
        )));
    }
    let mut touched = vec![false; comps.len()];
    for (_, c, _) in op.matrix().entries() {
        touched[owner[c]] = true;
    }
    let options = NormOptions::default();
    let mut per_component = Vec::new();
    let mut value: f64 = 0.0;
    for (k, comp) in comps.iter().enumerate() {
        let norm = if touched[k] {
            let block = op.matrix().submatrix(&members[k], &members[k]);
            spectral_norm(&block, &options)?.value
        } else {
            0.0
        };
        value = value.max(norm);
        per_component.push(ComponentNorm {
            base: comp.base.clone(),
            steps: comp.steps,
            norm,
        });
    }
    Ok(BlockNorm {
        value,
        per_component,
    })
}

/// `(‖T‖, ‖P̄_n T P̄_n‖)` for `T = realize(f)`; `f` may only use colours of
/// depth `<= n`.
pub fn compression_norm_check(
    f: &FormalElement,
    n: usize,
    basis: &TruncatedBasis,
) -> Result<(f64, f64)> {
    if f.max_depth() > n {
        return Err(Error::Precondition(format!(
            "element has colour depth {} > {n}",
            f.max_depth()
        )));
    }
    let t = realize(f, basis);
    let p = ProjectionSpec::DepthLe(n);
    let compressed = compress(&p, &t, &p);
    Ok((norm_value(&t)?, norm_value(&compressed)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedComparison {
    /// `‖M‖` in the `ω`-weighted norm.
    pub normal: f64,
    /// `‖M‖'` in the `ω'`-weighted norm.
    pub primed: f64,
    /// `Σ_k ‖M^{(k)}‖'` over the subdiagonal shift parts of `M`.
    pub shift_bound: f64,
    /// `Σ_k 2^{-k} ‖M‖`.
    pub geometric_bound: f64,
}

impl WeightedComparison {
    pub fn holds(&self, tol: f64) -> bool {
        self.primed <= self.normal + tol
            && self.primed <= self.shift_bound + tol
            && self.shift_bound <= self.geometric_bound + tol
    }
}

/// Norm of `M` for `‖x‖ = ‖diag(ω) x‖_2`, i.e. `‖D M D^{-1}‖_2`.
pub fn weighted_norm(m: &DMatrix<C64>, omega: &[f64]) -> f64 {
    let size = m.nrows();
    let similar = DMatrix::from_fn(size, size, |i, j| m[(i, j)] * (omega[i] / omega[j]));
    dense_spectral_norm(&similar)
}

pub fn weighted_comparison_check(
    m: &DMatrix<C64>,
    omega: &[f64],
    omega_primed: &[f64],
) -> Result<WeightedComparison> {
    let size = m.nrows();
    if m.ncols() != size || omega.len() != size || omega_primed.len() != size {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if omega.iter().chain(omega_primed).any(|&w| w.is_nan() || w <= 0.0) {
        return Err(Error::Precondition("weights must be positive".into()));
    }
    for i in 0..size {
        for j in i..size {
            if m[(i, j)] != C64::new(0.0, 0.0) {
                return Err(Error::Precondition(format!(
                    "entry ({i}, {j}) is on or above the diagonal"
                )));
            }
        }
    }
    for i in 0..size.saturating_sub(1) {
        let lhs = omega_primed[i + 1] / omega_primed[i];
        let rhs = 0.5 * omega[i + 1] / omega[i];
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "weight ratio condition fails at {i}: {lhs} > {rhs}"
            )));
        }
    }
    let normal = weighted_norm(m, omega);
    let primed = weighted_norm(m, omega_primed);
    let shift_bound = (1..size)
        .map(|k| {
            (0..size - k)
                .map(|i| m[(i + k, i)].norm() * omega_primed[i + k] / omega_primed[i])
                .fold(0.0, f64::max)
        })
        .sum();
    let geometric_bound = (1..size).map(|k| 0.5f64.powi(k as i32)).sum::<f64>() * normal;
    Ok(WeightedComparison {
        normal,
        primed,
        shift_bound,
        geometric_bound,
    })
}

/// A strictly lower triangular matrix with dyadic entries and two weight
/// vectors satisfying the ratio condition.
pub fn random_comparison_instance<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
) -> (DMatrix<C64>, Vec<f64>, Vec<f64>) {
    let density = rng.random_range(0.1..1.0);
    let m = DMatrix::from_fn(size, size, |i, j| {
        if i > j && rng.random_bool(density) {
            let choices = crate::formal::DYADIC_COEFFICIENTS;
            let re = choices[rng.random_range(0..choices.len())];
            let im = if rng.random_bool(0.3) {
                choices[rng.random_range(0..choices.len())]
            } else {
                0.0
            };
            C64::new(re, im)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut omega = vec![1.0; size];
    let mut omega_primed = vec![1.0; size];
    for i in 1..size {
        let ratio = 2f64.powf(rng.random_range(-2.0..2.0));
        let shrink = rng.random_range(0.05..=1.0);
        omega[i] = omega[i - 1] * ratio;
        omega_primed[i] = omega_primed[i - 1] * ratio * 0.5 * shrink;
    }
    (m, omega, omega_primed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// `‖(1 - P̄_n) T_c‖`.
    pub computed: f64,
    /// `2^{-n-1}`.
    pub bound: f64,
    /// `max{w(x) : μ(x) = c, ρ(x) > n}` inside the basis.
    pub max_weight: f64,
}

impl TailBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.computed <= self.bound + tol && (self.computed - self.max_weight).abs() <= tol
    }
}

pub fn tail_bound_check(colour: &Colour, n: usize, basis: &TruncatedBasis) -> Result<TailBound> {
    let t = generator_matrix(colour, basis);
    let everything = ProjectionSpec::LenLe(basis.max_len());
    let tail = compress(&ProjectionSpec::DepthLe(n).complement(), &t, &everything);
    let max_weight = basis
        .index_of(colour.word())
        .map(|c| {
            basis
                .coloured_by(c)
                .iter()
                .map(|&x| x as usize)
                .filter(|&x| basis.depth(x) > n)
                .map(|x| basis.weight(x).to_f64())
                .fold(0.0, f64::max)
        })
        .unwrap_or(0.0);
    Ok(TailBound {
        computed: norm_value(&tail)?,
        bound: DyadicWeight::from_log2(-(n as i64) - 1).to_f64(),
        max_weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadicalRow {
    pub k: usize,
    /// `‖(P̄_n T P̄_n)^k‖`.
    pub norm: f64,
    pub root: f64,
    /// `∏_{j<k} ε_j`, only for `n = 0`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadicalReport {
    pub n: usize,
    /// `ε_j = ‖(1 - π̄_j) P̄_0 Δ_0(T)‖`, only for `n = 0`.
    pub epsilons: Vec<f64>,
    pub rows: Vec<RadicalRow>,
    /// `max_k max |(P̄_n T P̄_n)^k - P̄_n T^k P̄_n|`.
    pub homomorphism_deviation: f64,
}

impl RadicalReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.homomorphism_deviation == 0.0
            && self
                .rows
                .iter()
                .all(|row| row.bound.is_none_or(|b| row.norm <= b + tol))
    }
}

/// Decay of the compressed powers `(P̄_n T P̄_n)^k`, with the product bound
/// `∏ ε_j` checked when `n = 0`.
pub fn radical_bound_check(
    f: &FormalElement,
    n: usize,
    basis: &TruncatedBasis,
    k_max: usize,
) -> Result<RadicalReport> {
    let k_max = k_max.min(basis.max_len());
    let t = realize(f, basis);
    let p = ProjectionSpec::DepthLe(n);
    let compressed = compress(&p, &t, &p);

    let epsilons = if n == 0 {
        let t0 = realize(&delta(f, 0), basis);
        let root_part = compress(&p, &t0, &ProjectionSpec::LenLe(basis.max_len()));
        (0..k_max)
            .map(|j| {
                let tail = compress(
                    &ProjectionSpec::LenLe(j).complement(),
                    &root_part,
                    &ProjectionSpec::LenLe(basis.max_len()),
                );
                norm_value(&tail)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(k_max);
    let mut deviation: f64 = 0.0;
    let mut compressed_power = compressed.clone();
    let mut full_power = t.clone();
    for k in 1..=k_max {
        if k > 1 {
            compressed_power = compressed.compose(&compressed_power)?;
            full_power = t.compose(&full_power)?;
        }
        let sandwiched = compress(&p, &full_power, &p);
        deviation = deviation.max(compressed_power.max_abs_diff(&sandwiched)?);
        let norm = norm_value(&compressed_power)?;
        rows.push(RadicalRow {
            k,
            norm,
            root: norm.powf(1.0 / k as f64),
            bound: (n == 0).then(|| epsilons[..k].iter().product()),
        });
    }
    Ok(RadicalReport {
        n,
        epsilons,
        rows,
        homomorphism_deviation: deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub t: Word,
    pub m: usize,
    /// `<(UT)^m e_1, e_{ξ_m}>`.
    pub inner: C64,
    /// `W(ξ_m) λ_c(T)^m`.
    pub predicted: C64,
    pub lambda: C64,
    pub norm_m: f64,
    /// `|λ_c(T)|^m 2^{-m(1+l)(1+ρ(t))}`.
    pub lower_bound: f64,
}

impl WitnessReport {
    pub fn holds(&self, tol: f64) -> bool {
        (self.inner - self.predicted).norm() <= tol && self.norm_m >= self.lower_bound - tol
    }
}

/// Builds `U = Σ_{j<=m} T_{ξ_j}` and compares `<(UT)^m e_1, e_{ξ_m}>` with
/// `W(ξ_m) λ_c(T)^m`, where `c` is the colour trace of `t`.
pub fn semisimple_witness(
    element: &FormalElement,
    t: &Word,
    m: usize,
    max_len_cap: usize,
) -> Result<WitnessReport> {
    if t.is_unit() {
        return Err(Error::UnitWord);
    }
    let l = t.len();
    let max_len = m * (l + 1);
    if max_len > max_len_cap {
        return Err(Error::Budget {
            dimension: (1usize << (max_len + 1).min(63)) - 1,
            budget: (1usize << (max_len_cap + 1)) - 1,
        });
    }
    let basis = TruncatedBasis::new(max_len)?;
    let c = colour_trace(t, l)?;
    let op = realize(element, &basis);
    let u = realize(&build_witness_u(t, m)?, &basis);
    let ut = u.compose(&op)?;
    let power = ut.power(m);
    let xi = xi_word(m, t)?;
    let inner = power.entry_at(&xi, &Word::unit());
    let lambda = lambda_extract_at(&op, &c, t)?;
    let predicted = lambda.powi(m as i32) * xi.path_weight().to_f64();
    let lower_bound = lambda.norm().powi(m as i32)
        * DyadicWeight::from_log2(-((m * (1 + l) * (1 + t.depth())) as i64)).to_f64();
    Ok(WitnessReport {
        t: t.clone(),
        m,
        inner,
        predicted,
        lambda,
        norm_m: norm_value(&power)?,
        lower_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntroRow {
    pub k: usize,
    /// `‖(T T_0)^k‖`.
    pub norm: f64,
    /// The matrix is a partial permutation with unit entries, so its norm is
    /// exactly 1.
    pub exactly_one: bool,
    /// `(T T_0)^k e_1 = e_{2k+1}`.
    pub maps_e1_correctly: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub k: usize,
    /// `‖T'^{2k}‖`.
    pub norm: f64,
    /// `∏_{j<k} δ_{2j}`.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRow {
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// `‖T'^2|_{E_n}‖`.
    pub restricted_square: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntroReport {
    pub dimension: usize,
    pub lambda: f64,
    pub rank_one_terms: usize,
    pub rows: Vec<IntroRow>,
    pub squares: Vec<SquareRow>,
    pub decay: Vec<DecayRow>,
}

impl IntroReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.exactly_one && r.maps_e1_correctly && (r.norm - 1.0).abs() <= tol)
            && self
                .squares
                .iter()
                .all(|s| s.restricted_square <= s.delta + tol)
            && self.decay.iter().all(|d| d.norm <= d.bound + tol)
    }
}

fn is_unit_partial_permutation(op: &SparseOperator<IntroSpace>) -> bool {
    let mut seen_rows = HashMap::new();
    op.matrix().entries().all(|(r, c, v)| {
        v == C64::new(1.0, 0.0) && op.matrix().column(c).len() == 1 && seen_rows.insert(r, c).is_none()
    }) && !op.is_zero()
}

/// The `l^2(N)` example: `‖(T T_0)^k‖ = 1`, plus the decay estimate for
/// `T' = λ T_0 + Σ_{n <= rank_one_terms} T_n`.
pub fn intro_counterexample(k_max: usize, lambda: f64, rank_one_terms: usize) -> Result<IntroReport> {
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    let space = IntroSpace::new(2 * k_max + 2);
    let t = intro_tsum(space);
    let t0 = intro_t0(space);
    let step = t.compose(&t0)?;
    let mut rows = Vec::with_capacity(k_max + 1);
    let mut power = SparseOperator::identity(space);
    for k in 0..=k_max {
        if k > 0 {
            power = step.compose(&power)?;
        }
        let image = power.apply(&space.unit_vector(1))?;
        rows.push(IntroRow {
            k,
            norm: norm_value(&power)?,
            exactly_one: is_unit_partial_permutation(&power),
            maps_e1_correctly: image == space.unit_vector(2 * k + 1),
        });
    }

    let mut compact = SparseOperator::zero(space);
    for n in 1..=rank_one_terms {
        compact = compact.add(&intro_tn(n, space))?;
    }
    let perturbed = t0.scale(C64::new(lambda, 0.0)).add(&compact)?;
    let square = perturbed.compose(&perturbed)?;
    let all = vec![true; space.dimension()];
    let squares = (0..space.dimension())
        .map(|n| {
            let keep = space.tail_mask(n);
            let epsilon = norm_value(&compact.masked(&all, &keep))?;
            Ok(SquareRow {
                n,
                epsilon,
                delta: 2.0 * lambda.abs() * epsilon + epsilon * epsilon,
                restricted_square: norm_value(&square.masked(&all, &keep))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut decay = Vec::with_capacity(k_max);
    let mut even_power = square.clone();
    for k in 1..=k_max {
        if k > 1 {
            even_power = square.compose(&even_power)?;
        }
        let bound = (0..k)
            .map(|j| squares.get(2 * j).map_or(0.0, |s| s.delta))
            .product();
        decay.push(DecayRow {
            k,
            norm: norm_value(&even_power)?,
            bound,
        });
    }
    Ok(IntroReport {
        dimension: space.dimension(),
        lambda,
        rank_one_terms,
        rows,
        squares,
        decay,
    })
}

/// Dense and power-iteration norms of the same matrix, for calibration.
pub fn norm_self_calibration(matrix: &SparseMatrix, options: &NormOptions) -> Result<(f64, f64)> {
    let dense = crate::linalg::dense_norm(matrix);
    let power = crate::linalg::power_iteration_norm(matrix, options)?;
    Ok((dense, power.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::ColourSequence;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn col(s: &str) -> Colour {
        s.parse().unwrap()
    }

    fn elem(terms: &[(f64, &[&str])]) -> FormalElement {
        FormalElement::from_terms(terms.iter().map(|(c, cols)| {
            (
                C64::new(*c, 0.0),
                ColourSequence::new(cols.iter().map(|s| s.parse().unwrap()).collect()).unwrap(),
            )
        }))
    }

    #[test]
    fn generator_norm_is_weight_of_colour() {
        let basis = TruncatedBasis::new(3).unwrap();
        let th = generator_matrix(&col("h"), &basis);
        assert_eq!(operator_norm(&th, 1e-12).unwrap().value, 0.5);
        let zero = SparseOperator::zero(basis.clone());
        assert_eq!(operator_norm(&zero, 1e-12).unwrap().value, 0.0);
        let p = crate::space::projection_matrix(&ProjectionSpec::DepthLe(1), &TruncatedBasis::new(4).unwrap());
        assert!((operator_norm(&p, 1e-12).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_calibrates_on_tree_operators() {
        let basis = TruncatedBasis::new(9).unwrap();
        let f = elem(&[(1.0, &["g"]), (0.5, &["h"]), (-2.0, &["gh", "h"]), (1.0, &["hg"])]);
        let t = realize(&f, &basis);
        let forced = NormOptions {
            dense_threshold: 0,
            ..NormOptions::default()
        };
        let (dense, power) = norm_self_calibration(t.matrix(), &forced).unwrap();
        assert!((dense - power).abs() <= 1e-9 * dense, "{dense} {power}");
    }

    #[test]
    fn profile_is_clamped() {
        let basis = TruncatedBasis::new(10).unwrap();
        let f = elem(&[(1.0, &["g"]), (1.0, &["h"])]);
        let op = realize(&f, &basis);
        let profile = spectral_profile(&op, 30, safe_k_max(10, &f)).unwrap();
        assert_eq!(profile.entries.len(), 9);
        for pair in profile.entries.windows(2) {
            assert!(pair[1].norm <= pair[0].norm + 1e-12);
        }
    }

    #[test]
    fn block_norm_examples() {
        let basis = TruncatedBasis::new(6).unwrap();
        let g = realize(&elem(&[(1.0, &["g"])]), &basis);
        let blocks = block_norm(&g, 0).unwrap();
        assert_eq!(blocks.per_component[0].base, Word::unit());
        assert!((blocks.per_component[0].norm - blocks.value).abs() < 1e-12);
        let h = realize(&elem(&[(1.0, &["h"])]), &basis);
        assert!(matches!(block_norm(&h, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn compression_norm_examples() {
        let basis = TruncatedBasis::new(6).unwrap();
        let (a, b) = compression_norm_check(&elem(&[(1.0, &["g"])]), 0, &basis).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let (a, b) = compression_norm_check(&elem(&[(1.0, &["h"])]), 1, &basis).unwrap();
        assert!((a - 0.5).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
        assert!(compression_norm_check(&elem(&[(1.0, &["h"])]), 0, &basis).is_err());
    }

    #[test]
    fn comparison_single_subdiagonal() {
        let mut m = DMatrix::from_element(3, 3, C64::new(0.0, 0.0));
        m[(1, 0)] = C64::new(1.0, 0.0);
        let omega = [1.0, 1.0, 1.0];
        let primed = [1.0, 0.5, 0.25];
        let result = weighted_comparison_check(&m, &omega, &primed).unwrap();
        assert!((result.normal - 1.0).abs() < 1e-12);
        assert!((result.primed - 0.5).abs() < 1e-12);
        let zero = DMatrix::from_element(3, 3, C64::new(0.0, 0.0));
        let result = weighted_comparison_check(&zero, &omega, &primed).unwrap();
        assert_eq!((result.normal, result.primed), (0.0, 0.0));
        assert!(weighted_comparison_check(&m, &omega, &omega).is_err());
    }

    #[test]
    fn tail_examples() {
        let basis = TruncatedBasis::new(6).unwrap();
        let g = tail_bound_check(&col("g"), 0, &basis).unwrap();
        assert!(g.holds(1e-10));
        assert!(g.computed <= 0.5);
        let deep = tail_bound_check(&col("hh"), 1, &basis).unwrap();
        assert_eq!(deep.computed, 0.25);
        assert!(deep.holds(1e-10));
    }

    #[test]
    fn radical_examples() {
        let basis = TruncatedBasis::new(10).unwrap();
        let g = radical_bound_check(&elem(&[(1.0, &["g"])]), 0, &basis, 8).unwrap();
        assert!(g.holds(1e-9));
        // g^k is its own colour, so T_g only moves 1 to g on the root ray
        for row in &g.rows {
            let expected = if row.k == 1 { 1.0 } else { 0.0 };
            assert_eq!(row.norm, expected);
            assert_eq!(row.bound, Some(expected));
        }
        let gh = radical_bound_check(&elem(&[(1.0, &["g"]), (1.0, &["h"])]), 0, &basis, 8).unwrap();
        assert!(gh.holds(1e-9));
        assert_eq!(gh.homomorphism_deviation, 0.0);
    }

    #[test]
    fn witness_examples() {
        let f = elem(&[(1.0, &["h"])]);
        let one = semisimple_witness(&f, &w("h"), 1, 20).unwrap();
        assert_eq!(one.inner, C64::new(0.125, 0.0));
        assert_eq!(one.predicted, C64::new(0.125, 0.0));
        let two = semisimple_witness(&f, &w("h"), 2, 20).unwrap();
        assert_eq!(two.inner, C64::new(2f64.powi(-7), 0.0));
        assert!(two.norm_m.powf(0.5) >= 2f64.powi(-4) - 1e-12);
        assert!(matches!(
            semisimple_witness(&f, &w("h"), 12, 20),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn intro_examples() {
        let report = intro_counterexample(3, 1.0, 2).unwrap();
        assert!(report.holds(1e-12));
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.rows[3].norm, 1.0);
        let space = IntroSpace::new(8);
        let step = intro_tsum(space).compose(&intro_t0(space)).unwrap();
        assert_eq!(step.apply(&space.unit_vector(1)).unwrap(), space.unit_vector(3));
    }
}
