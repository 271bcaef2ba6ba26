//! The word tree with edges `p(s) -> s`, its edge-deleted subgraphs, their
//! connected components, and the `ξ_m` witness words.
//!
//! In the subgraph for threshold `n` the edge into `s` survives iff the
//! colour of `s` has depth at most `n`. The component of the unit is exactly
//! the words of depth `<= n`; every other component is a run
//! `y, gy, ..., g^m y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{colour_trace, Colour, ColourSequence, Word};
use crate::space::TruncatedBasis;
use crate::unionfind::DisjointSets;

/// Whether the edge `p(s) -> s` is kept at threshold `n`.
pub fn edge_kept(s: &Word, n: usize) -> Result<bool> {
    Ok(s.colour()?.depth() <= n)
}

/// Number of deleted edges on the path from the unit to `s`.
pub fn stratum_index(s: &Word, n: usize) -> usize {
    (0..s.len())
        .filter(|&j| {
            let suffix = s.iterated_predecessor(j).expect("j < len");
            suffix.colour().expect("nonempty").depth() > n
        })
        .count()
}

/// [`stratum_index`] for every word of the basis.
pub fn stratum_indices(basis: &TruncatedBasis, n: usize) -> Vec<usize> {
    let dim = crate::space::Basis::dimension(basis);
    let mut strata = vec![0usize; dim];
    for i in 1..dim {
        let parent = basis.parent(i).expect("non-unit");
        strata[i] = strata[parent] + usize::from(basis.colour_depth(i) > n);
    }
    strata
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Root,
    GPath,
}

/// A connected component of the `n`-subgraph inside a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Shortest member: the unit for the root, `y` for a g-path.
    pub base: Word,
    /// `m` for a g-path `y, ..., g^m y`; 0 for the root.
    pub steps: usize,
    /// Members in the global word order.
    pub members: Vec<Word>,
    pub max_len: usize,
    /// The last member has length `max_len`, so the run may continue past
    /// the truncation.
    pub cut_by_truncation: bool,
}

impl Component {
    pub fn is_root(&self) -> bool {
        self.kind == ComponentKind::Root
    }

    pub fn report(&self, n: usize) -> ComponentReport {
        ComponentReport {
            kind: self.kind,
            base: self.base.clone(),
            steps: self.steps,
            members: self.members.clone(),
            checks: verify_component_structure(self, n).ok(),
        }
    }
}

/// Partition of all words of length `<= max_len` into components; the root
/// component comes first, the rest are ordered by their base word.
pub fn components(n: usize, max_len: usize) -> Result<Vec<Component>> {
    let basis = TruncatedBasis::new(max_len)?;
    components_in(&basis, n)
}

pub fn components_in(basis: &TruncatedBasis, n: usize) -> Result<Vec<Component>> {
    let dim = crate::space::Basis::dimension(basis);
    let max_len = basis.max_len();
    let mut sets = DisjointSets::new(dim);
    for i in 1..dim {
        if basis.colour_depth(i) <= n {
            sets.union(i, basis.parent(i).expect("non-unit"));
        }
    }
    sets.groups()
        .into_iter()
        .map(|group| {
            let members: Vec<Word> = group.iter().map(|&i| basis.word(i)).collect();
            if group[0] == 0 {
                return Ok(Component {
                    kind: ComponentKind::Root,
                    base: Word::unit(),
                    steps: 0,
                    cut_by_truncation: members.iter().any(|w| w.len() == max_len),
                    members,
                    max_len,
                });
            }
            let base = members[0].clone();
            for (i, member) in members.iter().enumerate() {
                if *member != base.prepend_g_power(i) {
                    return Err(Error::Precondition(format!(
                        "component based at {base} is not a g-path (member {member})"
                    )));
                }
            }
            Ok(Component {
                kind: ComponentKind::GPath,
                steps: members.len() - 1,
                cut_by_truncation: members.last().is_some_and(|w| w.len() == max_len),
                base,
                members,
                max_len,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckOutcome {
    Pass,
    Fail,
    /// The word needed for the check lies beyond the truncation.
    Unverifiable,
}

impl CheckOutcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        self == CheckOutcome::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentChecks {
    pub entry: CheckOutcome,
    pub interior: CheckOutcome,
    pub exit: CheckOutcome,
}

impl ComponentChecks {
    pub fn any_failure(&self) -> bool {
        self.entry.is_failure() || self.interior.is_failure() || self.exit.is_failure()
    }
}

/// JSON shape `{kind, base, steps, members[], checks{entry, interior, exit}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub kind: ComponentKind,
    pub base: Word,
    pub steps: usize,
    pub members: Vec<Word>,
    pub checks: Option<ComponentChecks>,
}

/// Checks the entry, interior and exit colour-depth conditions of a g-path.
pub fn verify_component_structure(component: &Component, n: usize) -> Result<ComponentChecks> {
    if component.is_root() {
        return Err(Error::WrongComponentKind);
    }
    let colour_depth = |w: &Word| w.colour().map(|c| c.depth());
    let y = &component.base;
    let entry = CheckOutcome::from_bool(colour_depth(y)? > n);
    let mut interior = true;
    for i in 1..=component.steps {
        interior &= colour_depth(&y.prepend_g_power(i))? <= n;
    }
    let next = y.prepend_g_power(component.steps + 1);
    let exit = if next.len() > component.max_len {
        CheckOutcome::Unverifiable
    } else {
        CheckOutcome::from_bool(colour_depth(&next)? > n)
    };
    Ok(ComponentChecks {
        entry,
        interior: CheckOutcome::from_bool(interior),
        exit,
    })
}

/// A path `s_0 -> ... -> s_m` of words of depth `<= n` whose colours match
/// the component's interior: `μ(s_i) = μ(g^i y)` for `i` in `1..=m`.
///
/// Writes the run as `g^{r+i} h z`; with `l = l(z)` and `r0 = r mod (l+1)`
/// the words `p^{l-r0-i}(z)` carry the same colours and are shorter. The
/// step repeats until the run lands in the root component.
pub fn mirror_path(component: &Component, n: usize) -> Result<Vec<Word>> {
    if component.is_root() {
        return Err(Error::WrongComponentKind);
    }
    if component.cut_by_truncation {
        return Err(Error::MirrorOutsideTruncation {
            max_len: component.max_len,
        });
    }
    let steps = component.steps;
    let mut path = component.members.clone();
    while path[0].depth() > n {
        let start = &path[0];
        let letters = start.letters();
        let r = letters
            .iter()
            .take_while(|&&l| l == crate::semigroup::Generator::G)
            .count();
        let z = Word::from_letters(letters[r + 1..].to_vec());
        let l = z.len();
        let r0 = r % (l + 1);
        if steps > l - r0 {
            return Err(Error::Precondition(format!(
                "run of {steps} steps from {start} crosses a colour boundary"
            )));
        }
        path = (0..=steps)
            .map(|i| z.iterated_predecessor(l - r0 - i))
            .collect::<Result<_>>()?;
    }
    Ok(path)
}

/// `ξ_m = g^{(m-1)(l+1)} h t` with `l = l(t)`.
pub fn xi_word(m: usize, t: &Word) -> Result<Word> {
    if m == 0 {
        return Err(Error::Precondition("ξ_m needs m >= 1".into()));
    }
    if t.is_unit() {
        return Err(Error::UnitWord);
    }
    let l = t.len();
    Ok(t.prepend(crate::semigroup::Generator::H)
        .prepend_g_power((m - 1) * (l + 1)))
}

/// Colour sequence of `ξ_m` from the closed form: `ξ_{m-r}` at positions
/// `r(l+1)`, and `c_j = μ(p^{j-1} t)` at offset `j` inside each block.
pub fn xi_colour_trace(m: usize, t: &Word) -> Result<ColourSequence> {
    let c = colour_trace(t, t.len())?;
    let mut colours = Vec::with_capacity(m * (t.len() + 1));
    for r in 0..m {
        let xi = Colour::new(xi_word(m - r, t)?)?;
        colours.push(xi);
        colours.extend_from_slice(c.colours());
    }
    ColourSequence::new(colours)
}
