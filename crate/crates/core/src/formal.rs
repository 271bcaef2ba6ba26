//! Finite formal sums `Σ λ_c T_c` over colour sequences, and how they meet
//! the truncated operators.
//!
//! A sequence `(c_1, ..., c_m)` stands for `T_{c_1} T_{c_2} ... T_{c_m}`:
//! position 1 is applied last. `<T_c e_s, e_t>` is nonzero exactly when
//! `s = p^m(t)` and `μ(p^{i-1} t) = c_i`, and then equals `W(t) / W(s)`.

use std::collections::{BTreeMap, HashMap};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::semigroup::{colour_trace, Colour, ColourSequence, Word};
use crate::space::{compress, generator_matrix, Basis, ProjectionSpec, SparseOperator, TruncatedBasis};
use crate::tree::{stratum_indices, xi_word};

/// A finitely supported map from colour sequences to coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormalElement {
    terms: BTreeMap<ColourSequence, C64>,
}

impl FormalElement {
    pub fn zero() -> Self {
        FormalElement::default()
    }

    pub fn monomial(coeff: C64, sequence: ColourSequence) -> Self {
        let mut f = FormalElement::zero();
        f.add_term(coeff, sequence);
        f
    }

    /// `1 · (c)` for a single colour.
    pub fn colour(colour: Colour) -> Self {
        FormalElement::monomial(C64::new(1.0, 0.0), ColourSequence::single(colour))
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C64, ColourSequence)>,
    {
        let mut f = FormalElement::zero();
        for (coeff, seq) in terms {
            f.add_term(coeff, seq);
        }
        f
    }

    pub fn add_term(&mut self, coeff: C64, sequence: ColourSequence) {
        let value = self.coefficient(&sequence) + coeff;
        if value == C64::new(0.0, 0.0) {
            self.terms.remove(&sequence);
        } else {
            self.terms.insert(sequence, value);
        }
    }

    pub fn coefficient(&self, sequence: &ColourSequence) -> C64 {
        self.terms
            .get(sequence)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ColourSequence, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FormalElement) -> FormalElement {
        let mut sum = self.clone();
        for (seq, &coeff) in other.terms() {
            sum.add_term(coeff, seq.clone());
        }
        sum
    }

    pub fn scale(&self, factor: C64) -> FormalElement {
        FormalElement::from_terms(self.terms().map(|(s, &c)| (c * factor, s.clone())))
    }

    /// Largest colour depth over all terms; 0 when empty.
    pub fn max_depth(&self) -> usize {
        self.terms.keys().map(ColourSequence::max_depth).max().unwrap_or(0)
    }

    /// Longest sequence length over all terms; each factor raises word
    /// length by one, so this is how far one application reaches.
    pub fn max_sequence_len(&self) -> usize {
        self.terms.keys().map(ColourSequence::len).max().unwrap_or(0)
    }

    /// Shortest sequence length over all terms.
    pub fn min_sequence_len(&self) -> usize {
        self.terms.keys().map(ColourSequence::len).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> FormalElementJson {
        FormalElementJson {
            terms: self
                .terms()
                .map(|(seq, c)| TermJson {
                    coeff: [c.re, c.im],
                    colours: seq.colours().iter().map(|c| c.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Parses `{terms: [{coeff: [re, im], colours: [...]}, ...]}`, reporting
    /// problems with JSON-pointer paths.
    pub fn from_json_value(value: &Value) -> Result<FormalElement> {
        let schema = |pointer: String, message: &str| Error::Schema {
            pointer,
            message: message.to_string(),
        };
        let terms = value
            .get("terms")
            .ok_or_else(|| schema(String::new(), "missing \"terms\""))?
            .as_array()
            .ok_or_else(|| schema("/terms".into(), "expected an array"))?;
        let mut f = FormalElement::zero();
        for (i, term) in terms.iter().enumerate() {
            let at = format!("/terms/{i}");
            let coeff = term
                .get("coeff")
                .ok_or_else(|| schema(at.clone(), "missing \"coeff\""))?;
            let parts = coeff
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| schema(format!("{at}/coeff"), "expected [re, im]"))?;
            let mut re_im = [0.0; 2];
            for (k, part) in parts.iter().enumerate() {
                re_im[k] = part
                    .as_f64()
                    .ok_or_else(|| schema(format!("{at}/coeff/{k}"), "expected a number"))?;
            }
            let colours = term
                .get("colours")
                .ok_or_else(|| schema(at.clone(), "missing \"colours\""))?
                .as_array()
                .ok_or_else(|| schema(format!("{at}/colours"), "expected an array"))?;
            if colours.is_empty() {
                return Err(schema(format!("{at}/colours"), "colour sequences must be nonempty"));
            }
            let mut seq = Vec::with_capacity(colours.len());
            for (k, colour) in colours.iter().enumerate() {
                let pointer = format!("{at}/colours/{k}");
                let text = colour
                    .as_str()
                    .ok_or_else(|| schema(pointer.clone(), "expected a word string"))?;
                let parsed: Colour = text.parse().map_err(|e: Error| Error::Schema {
                    pointer: pointer.clone(),
                    message: match e {
                        Error::NotAColour { word } => format!(
                            "{word} fails the colour-set test (g^k, or g^k h y with 1 + l(y) dividing k)"
                        ),
                        other => other.to_string(),
                    },
                })?;
                seq.push(parsed);
            }
            f.add_term(C64::new(re_im[0], re_im[1]), ColourSequence::new(seq)?);
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalElementJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: [f64; 2],
    pub colours: Vec<String>,
}

/// The truncated operator `Σ λ_c T_{c_1} ... T_{c_m}`.
pub fn realize(f: &FormalElement, basis: &TruncatedBasis) -> SparseOperator {
    let mut generators: HashMap<&Colour, SparseOperator> = HashMap::new();
    let mut total = SparseOperator::zero(basis.clone());
    for (seq, &coeff) in f.terms() {
        let mut product: Option<SparseOperator> = None;
        for colour in seq.colours().iter().rev() {
            let gen = generators
                .entry(colour)
                .or_insert_with(|| generator_matrix(colour, basis));
            product = Some(match product {
                None => gen.clone(),
                Some(acc) => gen.compose(&acc).expect("same basis"),
            });
        }
        let product = product.expect("sequences are nonempty");
        total = total
            .add(&product.scale(coeff))
            .expect("same basis");
    }
    total
}

/// Either the first word `t` (in the global order) with
/// `colour_trace(t, m) = c`, or none up to the searched length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportVerdict {
    Witness(Word),
    NoWitnessUpTo(usize),
}

pub fn support_test(sequence: &ColourSequence, max_len: usize) -> Result<SupportVerdict> {
    let basis = TruncatedBasis::new(max_len)?;
    Ok(support_test_in(sequence, &basis))
}

pub fn support_test_in(sequence: &ColourSequence, basis: &TruncatedBasis) -> SupportVerdict {
    let none = SupportVerdict::NoWitnessUpTo(basis.max_len());
    let Some(indices) = sequence
        .colours()
        .iter()
        .map(|c| basis.index_of(c.word()))
        .collect::<Option<Vec<_>>>()
    else {
        return none;
    };
    for &t in basis.coloured_by(indices[0]) {
        let t = t as usize;
        if basis.length(t) < sequence.len() {
            continue;
        }
        let mut node = t;
        let mut matched = true;
        for &want in &indices {
            if basis.colour_index(node) != Some(want) {
                matched = false;
                break;
            }
            node = basis.parent(node).expect("length checked");
        }
        if matched {
            return SupportVerdict::Witness(basis.word(t));
        }
    }
    none
}

/// `λ_c(T) = (W(s) / W(t)) <T e_s, e_t>` at the first witness pair in the basis.
pub fn lambda_extract(op: &SparseOperator, sequence: &ColourSequence) -> Result<C64> {
    match support_test_in(sequence, op.basis()) {
        SupportVerdict::Witness(t) => lambda_extract_at(op, sequence, &t),
        SupportVerdict::NoWitnessUpTo(_) => {
            Err(Error::NoWitnessInTruncation {
                sequence: sequence.to_string(),
                max_len: op.basis().max_len(),
            })
        }
    }
}

/// [`lambda_extract`] at a caller-chosen witness `t`.
pub fn lambda_extract_at(op: &SparseOperator, sequence: &ColourSequence, t: &Word) -> Result<C64> {
    let m = sequence.len();
    if colour_trace(t, m)? != *sequence {
        return Err(Error::Precondition(format!(
            "{t} is not a witness for {sequence}"
        )));
    }
    let s = t.iterated_predecessor(m)?;
    let ratio = s.path_weight() / t.path_weight();
    Ok(op.entry_at(t, &s) * ratio.to_f64())
}

/// Bilinear extension of concatenation, left factor outermost.
pub fn formal_product(a: &FormalElement, b: &FormalElement) -> FormalElement {
    let mut out = FormalElement::zero();
    for (d, &x) in a.terms() {
        for (e, &y) in b.terms() {
            out.add_term(x * y, d.concat(e));
        }
    }
    out
}

/// Terms whose largest colour depth is exactly `n`.
pub fn delta(f: &FormalElement, n: usize) -> FormalElement {
    FormalElement::from_terms(
        f.terms()
            .filter(|(s, _)| s.max_depth() == n)
            .map(|(s, &c)| (c, s.clone())),
    )
}

/// Terms whose largest colour depth is at most `n`.
pub fn delta_bar(f: &FormalElement, n: usize) -> FormalElement {
    FormalElement::from_terms(
        f.terms()
            .filter(|(s, _)| s.max_depth() <= n)
            .map(|(s, &c)| (c, s.clone())),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionIdentity {
    /// `max |realize(Δ̄_n f) - Σ_r P_{n,r} T P_{n,r}|`.
    pub diagonal_deviation: f64,
    /// `max |(T - realize(Δ̄_n f)) - Σ_r (1 - P̄_{n,r}) T P_{n,r}|`.
    pub off_diagonal_deviation: f64,
}

impl CompressionIdentity {
    pub fn max_deviation(&self) -> f64 {
        self.diagonal_deviation.max(self.off_diagonal_deviation)
    }
}

/// Evaluates both stratum identities for `T = realize(f)` on the basis.
pub fn compression_identity_check(
    f: &FormalElement,
    n: usize,
    basis: &TruncatedBasis,
) -> CompressionIdentity {
    let t = realize(f, basis);
    let a = realize(&delta_bar(f, n), basis);
    let max_stratum = stratum_indices(basis, n).into_iter().max().unwrap_or(0);
    let mut diagonal = SparseOperator::zero(basis.clone());
    let mut off_diagonal = SparseOperator::zero(basis.clone());
    for r in 0..=max_stratum {
        let band = ProjectionSpec::StratumEq { n, r };
        let above = ProjectionSpec::StratumLe { n, r }.complement();
        diagonal = diagonal.add(&compress(&band, &t, &band)).expect("same basis");
        off_diagonal = off_diagonal
            .add(&compress(&above, &t, &band))
            .expect("same basis");
    }
    let remainder = t.sub(&a).expect("same basis");
    CompressionIdentity {
        diagonal_deviation: a.max_abs_diff(&diagonal).expect("same basis"),
        off_diagonal_deviation: remainder.max_abs_diff(&off_diagonal).expect("same basis"),
    }
}

/// `Σ_{m=1}^{m_max} 1 · (ξ_m)`.
pub fn build_witness_u(t: &Word, m_max: usize) -> Result<FormalElement> {
    let mut u = FormalElement::zero();
    for m in 1..=m_max {
        let xi = Colour::new(xi_word(m, t)?)?;
        u.add_term(C64::new(1.0, 0.0), ColourSequence::single(xi));
    }
    Ok(u)
}

/// Coefficients used by the randomized suites; all dyadic.
pub const DYADIC_COEFFICIENTS: [f64; 6] = [1.0, -1.0, 0.5, -0.5, 2.0, -2.0];

/// A random element with up to `max_terms` terms whose sequences all have a
/// witness of length `<= basis.max_len()` and colour depth `<= max_depth`.
/// Sequences have length at most `max_seq_len`.
pub fn random_element<R: Rng + ?Sized>(
    rng: &mut R,
    basis: &TruncatedBasis,
    max_depth: usize,
    max_terms: usize,
    max_seq_len: usize,
) -> FormalElement {
    let dim = basis.dimension();
    let terms = rng.random_range(1..=max_terms.max(1));
    let mut f = FormalElement::zero();
    let mut attempts = 0;
    while f.len() < terms && attempts < 10_000 {
        attempts += 1;
        let t = rng.random_range(1..dim);
        let word = basis.word(t);
        let m = rng.random_range(1..=word.len().min(max_seq_len));
        let seq = colour_trace(&word, m).expect("m <= len");
        if seq.max_depth() > max_depth || f.coefficient(&seq) != C64::new(0.0, 0.0) {
            continue;
        }
        let coeff = *DYADIC_COEFFICIENTS.choose(rng).expect("nonempty");
        f.add_term(C64::new(coeff, 0.0), seq);
    }
    f
}
