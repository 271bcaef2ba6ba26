//! Words of the free unital semigroup on `g` and `h`, their dyadic weights,
//! the colour set and the colour map.
//!
//! Letters are stored outermost-first: `letters[0]` is the letter that the
//! predecessor map removes, so `p(s)` is `s` without its first letter and
//! every iterated predecessor is a suffix. The colour of a word is always
//! one of its suffixes, which lets the colour map work on slice offsets.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `max_len` accepted by [`enumerate_words`].
pub const ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    G,
    H,
}

impl Generator {
    pub fn symbol(self) -> char {
        match self {
            Generator::G => 'g',
            Generator::H => 'h',
        }
    }
}

/// An element of the free unital semigroup, outermost letter first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Generator>,
}

impl Word {
    pub fn unit() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Generator>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn is_unit(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of `h` letters.
    pub fn depth(&self) -> usize {
        depth_of(&self.letters)
    }

    /// Left multiplication by a generator.
    pub fn prepend(&self, gen: Generator) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(gen);
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    /// `g^k · self`.
    pub fn prepend_g_power(&self, k: usize) -> Word {
        let mut letters = vec![Generator::G; k];
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    pub fn predecessor(&self) -> Result<Word> {
        if self.is_unit() {
            return Err(Error::UnitWord);
        }
        Ok(Word {
            letters: self.letters[1..].to_vec(),
        })
    }

    pub fn iterated_predecessor(&self, steps: usize) -> Result<Word> {
        if steps > self.len() {
            return Err(Error::PredecessorOverrun {
                steps,
                len: self.len(),
            });
        }
        Ok(Word {
            letters: self.letters[steps..].to_vec(),
        })
    }

    pub fn is_colour(&self) -> bool {
        is_colour_slice(&self.letters)
    }

    pub fn colour(&self) -> Result<Colour> {
        if self.is_unit() {
            return Err(Error::UnitWord);
        }
        let start = colour_offset(&self.letters);
        Ok(Colour(Word {
            letters: self.letters[start..].to_vec(),
        }))
    }

    /// `w(s) = 2^{-depth(s)}`.
    pub fn weight(&self) -> DyadicWeight {
        DyadicWeight::from_log2(-(self.depth() as i64))
    }

    /// Product of the weights of `s, p(s), ..., p^{l-1}(s)`.
    pub fn path_weight(&self) -> DyadicWeight {
        let mut suffix_depth = 0i64;
        let mut total = 0i64;
        for &letter in self.letters.iter().rev() {
            if letter == Generator::H {
                suffix_depth += 1;
            }
            total += suffix_depth;
        }
        DyadicWeight::from_log2(-total)
    }

    /// Position of this word in the global (length, then lexicographic) order,
    /// with the unit at 0.
    pub fn global_index(&self) -> u64 {
        assert!(self.len() < 64, "word too long for a global index");
        let len = self.len() as u32;
        ((1u64 << len) - 1) + letters_value(&self.letters)
    }

    pub fn from_global_index(index: u64) -> Word {
        let len = 63 - (index + 1).leading_zeros();
        let value = index + 1 - (1u64 << len);
        let letters = (0..len)
            .rev()
            .map(|bit| {
                if value >> bit & 1 == 1 {
                    Generator::H
                } else {
                    Generator::G
                }
            })
            .collect();
        Word { letters }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        for letter in &self.letters {
            write!(f, "{}", letter.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Word::unit());
        }
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        let letters = s
            .chars()
            .enumerate()
            .map(|(offset, ch)| match ch {
                'g' => Ok(Generator::G),
                'h' => Ok(Generator::H),
                _ => Err(Error::Parse { offset, ch }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { letters })
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A member of the colour set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Colour(Word);

impl Colour {
    pub fn new(word: Word) -> Result<Self> {
        if word.is_colour() {
            Ok(Colour(word))
        } else {
            Err(Error::NotAColour {
                word: word.to_string(),
            })
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.depth()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Word> for Colour {
    type Error = Error;

    fn try_from(word: Word) -> Result<Self> {
        Colour::new(word)
    }
}

impl FromStr for Colour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Colour::new(s.parse()?)
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Colour {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Colour {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let word = Word::deserialize(deserializer)?;
        Colour::new(word).map_err(serde::de::Error::custom)
    }
}

/// A nonempty sequence of colours; position 0 is the outermost factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColourSequence(Vec<Colour>);

impl ColourSequence {
    pub fn new(colours: Vec<Colour>) -> Result<Self> {
        if colours.is_empty() {
            return Err(Error::Precondition(
                "colour sequences must be nonempty".into(),
            ));
        }
        Ok(ColourSequence(colours))
    }

    pub fn single(colour: Colour) -> Self {
        ColourSequence(vec![colour])
    }

    pub fn colours(&self) -> &[Colour] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest colour depth in the sequence.
    pub fn max_depth(&self) -> usize {
        self.0.iter().map(Colour::depth).max().unwrap_or(0)
    }

    /// Total number of letters over all colours.
    pub fn total_len(&self) -> usize {
        self.0.iter().map(Colour::len).sum()
    }

    pub fn concat(&self, other: &ColourSequence) -> ColourSequence {
        let mut colours = self.0.clone();
        colours.extend_from_slice(&other.0);
        ColourSequence(colours)
    }
}

impl fmt::Display for ColourSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, colour) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{colour}")?;
        }
        f.write_str(")")
    }
}

/// An exact power of two, stored as its base-2 exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicWeight {
    log2: i64,
}

impl DyadicWeight {
    pub const ONE: DyadicWeight = DyadicWeight { log2: 0 };

    pub fn from_log2(log2: i64) -> Self {
        DyadicWeight { log2 }
    }

    pub fn log2(self) -> i64 {
        self.log2
    }

    pub fn powi(self, exponent: i64) -> Self {
        DyadicWeight::from_log2(self.log2 * exponent)
    }

    /// Exact for exponents inside the normal `f64` range.
    pub fn to_f64(self) -> f64 {
        debug_assert!((-1022..=1023).contains(&self.log2));
        2f64.powi(self.log2 as i32)
    }
}

impl Mul for DyadicWeight {
    type Output = DyadicWeight;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: DyadicWeight) -> DyadicWeight {
        DyadicWeight::from_log2(self.log2 + rhs.log2)
    }
}

impl Div for DyadicWeight {
    type Output = DyadicWeight;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: DyadicWeight) -> DyadicWeight {
        DyadicWeight::from_log2(self.log2 - rhs.log2)
    }
}

impl fmt::Display for DyadicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.log2)
    }
}

pub(crate) fn depth_of(letters: &[Generator]) -> usize {
    letters.iter().filter(|&&l| l == Generator::H).count()
}

fn leading_gs(letters: &[Generator]) -> usize {
    letters.iter().take_while(|&&l| l == Generator::G).count()
}

fn letters_value(letters: &[Generator]) -> u64 {
    letters
        .iter()
        .fold(0u64, |acc, &l| (acc << 1) | u64::from(l == Generator::H))
}

/// Colour-set membership: `g^k` with `k >= 1`, or `g^k h y` with
/// `(1 + l(y))` dividing `k` (zero counts as divisible).
pub(crate) fn is_colour_slice(letters: &[Generator]) -> bool {
    let k = leading_gs(letters);
    if k == letters.len() {
        return k >= 1;
    }
    let tail = letters.len() - k - 1;
    k.is_multiple_of(tail + 1)
}

/// Offset of the suffix of `letters` that is its colour. `letters` must be
/// nonempty.
///
/// A non-colour `g^k h y` with `n = l(y)` and `k' = k mod (n + 1)` recurses on
/// `p^{n-k'}(y)`, which is the suffix of length `k'`; `k' <= n` keeps the
/// loop strictly shrinking.
pub(crate) fn colour_offset(letters: &[Generator]) -> usize {
    debug_assert!(!letters.is_empty());
    let mut start = 0;
    loop {
        let current = &letters[start..];
        let k = leading_gs(current);
        if k == current.len() {
            return start;
        }
        let tail = current.len() - k - 1;
        let residue = k % (tail + 1);
        if residue == 0 {
            return start;
        }
        start = letters.len() - residue;
    }
}

/// The colour map `μ`; fails on the unit.
pub fn colour_map(word: &Word) -> Result<Colour> {
    word.colour()
}

/// `(μ(t), μ(p(t)), ..., μ(p^{m-1}(t)))`.
pub fn colour_trace(t: &Word, m: usize) -> Result<ColourSequence> {
    if m == 0 {
        return Err(Error::Precondition(
            "colour trace length must be positive".into(),
        ));
    }
    if m > t.len() {
        return Err(Error::PredecessorOverrun {
            steps: m,
            len: t.len(),
        });
    }
    let letters = t.letters();
    let colours = (0..m)
        .map(|i| {
            let suffix = &letters[i..];
            let start = i + colour_offset(suffix);
            Colour(Word::from_letters(letters[start..].to_vec()))
        })
        .collect();
    Ok(ColourSequence(colours))
}

/// All words of length `<= max_len` in the global order, starting at the unit.
pub fn enumerate_words(max_len: usize) -> Result<Vec<Word>> {
    enumerate_words_capped(max_len, ENUMERATION_CAP)
}

pub fn enumerate_words_capped(max_len: usize, cap: usize) -> Result<Vec<Word>> {
    if max_len > cap {
        return Err(Error::LengthCap {
            requested: max_len,
            cap,
        });
    }
    let count = (1u64 << (max_len + 1)) - 1;
    Ok((0..count).map(Word::from_global_index).collect())
}

/// Which colour-map property a word violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditProperty {
    /// `μ(s)` is a colour.
    InColourSet,
    /// `μ(hs) = hs`.
    FixesHWords,
    /// `μ(gs) != μ(hs)`.
    SiblingsDiffer,
    /// `ρμ(s) <= ρ(s)`, with equality when `s` starts with `h`.
    DepthBound,
    /// `μ(s)` is a suffix of `s`.
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditFailure {
    pub word: Word,
    pub property: AuditProperty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourAudit {
    pub max_len: usize,
    pub words_checked: usize,
    pub failures: Vec<AuditFailure>,
}

/// Checks the basic colour-map properties on every non-unit word of length
/// `<= max_len`.
pub fn audit_colour_map(max_len: usize) -> Result<ColourAudit> {
    let words = enumerate_words(max_len)?;
    let mut failures = Vec::new();
    let mut fail = |word: &Word, property| {
        failures.push(AuditFailure {
            word: word.clone(),
            property,
        })
    };
    for s in words.iter().skip(1) {
        let mu = s.colour()?;
        if !mu.word().is_colour() {
            fail(s, AuditProperty::InColourSet);
        }
        let starts_with_h = s.letters()[0] == Generator::H;
        if starts_with_h && mu.word() != s {
            fail(s, AuditProperty::FixesHWords);
        }
        let depth_ok = if starts_with_h {
            mu.depth() == s.depth()
        } else {
            mu.depth() <= s.depth()
        };
        if !depth_ok {
            fail(s, AuditProperty::DepthBound);
        }
        if !s.letters().ends_with(mu.word().letters()) {
            fail(s, AuditProperty::Suffix);
        }
    }
    for s in words.iter().filter(|s| s.len() < max_len) {
        let gs = s.prepend(Generator::G).colour()?;
        let hs = s.prepend(Generator::H).colour()?;
        if gs == hs {
            fail(s, AuditProperty::SiblingsDiffer);
        }
    }
    Ok(ColourAudit {
        max_len,
        words_checked: words.len() - 1,
        failures,
    })
}
