//! The twelve acceptance criteria. Runs without the libtest harness so that
//! every criterion prints its verdict line, and exits nonzero if any fails.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use radlab::formal::{
    compression_identity_check, delta, delta_bar, random_element, realize, support_test,
    FormalElement, SupportVerdict,
};
use radlab::lab::{radical_elements, sample_colours, LabConfig};
use radlab::semigroup::{colour_trace, enumerate_words, Colour, ColourSequence, Word};
use radlab::space::{generator_matrix, TruncatedBasis};
use radlab::spectral::{
    block_norm, compression_norm_check, intro_counterexample, operator_norm, radical_bound_check,
    random_comparison_instance, semisimple_witness, tail_bound_check, weighted_comparison_check,
};
use radlab::tree::{components_in, mirror_path, xi_colour_trace, CheckOutcome};
use radlab::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    tolerance: &'static str,
    failures: Vec<String>,
    summary: String,
}

impl Verdict {
    fn new(tolerance: &'static str) -> Self {
        Verdict {
            tolerance,
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn seed() -> u64 {
    LabConfig::default().seed
}

fn word(s: &str) -> Word {
    if s.is_empty() {
        Word::unit()
    } else {
        s.parse().unwrap()
    }
}

fn colours(names: &[&str]) -> ColourSequence {
    ColourSequence::new(names.iter().map(|c| c.parse().unwrap()).collect()).unwrap()
}

fn seeded(basis: &TruncatedBasis, count: usize, depth: usize, terms: usize, salt: u64) -> Vec<FormalElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ salt);
    (0..count)
        .map(|_| random_element(&mut rng, basis, depth, terms, 3))
        .collect()
}

fn colour_map_audit() -> Verdict {
    let mut v = Verdict::new("exact; < 10 s");
    let start = Instant::now();
    let words = enumerate_words(12).unwrap();
    v.check(words.len() == (1 << 13) - 1, || format!("{} words enumerated", words.len()));
    let oracle_words = common::all_words(12);
    let mut checked = 0;
    for (w, s) in words.iter().zip(&oracle_words).skip(1) {
        checked += 1;
        v.check(w.to_string() == *s, || format!("order differs at {s}"));
        let mu = w.colour().unwrap();
        let mu_text = mu.word().to_string();
        v.check(common::is_colour(&mu_text), || format!("mu({s}) = {mu_text} is not a colour"));
        v.check(mu_text == common::mu(s), || format!("mu({s}) = {mu_text}, oracle {}", common::mu(s)));
        let d = common::depth(&mu_text);
        if s.starts_with('h') {
            v.check(mu_text == *s, || format!("mu({s}) is not {s}"));
            v.check(d == common::depth(s), || format!("depth of mu({s}) differs"));
        } else {
            v.check(d <= common::depth(s), || format!("depth of mu({s}) too large"));
            v.check(
                (0..s.len()).any(|j| common::pred(s, j) == mu_text),
                || format!("mu({s}) is not an iterated predecessor"),
            );
        }
        if s.len() < 12 {
            let g = word(&format!("g{s}")).colour().unwrap();
            let h = word(&format!("h{s}")).colour().unwrap();
            v.check(g != h, || format!("mu(g{s}) = mu(h{s})"));
        }
    }
    let unit_children = word("g").colour().unwrap() != word("h").colour().unwrap();
    v.check(unit_children, || "mu(g) = mu(h)".into());
    let elapsed = start.elapsed();
    v.check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"));
    v.summary = format!("{checked} words, {elapsed:.2?}");
    v
}

fn intro_counterexample_norms() -> Verdict {
    let mut v = Verdict::new("1e-12; < 1 s");
    let start = Instant::now();
    let report = intro_counterexample(10, 1.0, 5).unwrap();
    for row in report.rows.iter().filter(|r| r.k >= 1) {
        v.check((row.norm - 1.0).abs() <= 1e-12, || format!("||(T T_0)^{}|| = {}", row.k, row.norm));
        v.check(row.exactly_one, || format!("(T T_0)^{} is not a unit partial permutation", row.k));
        v.check(row.maps_e1_correctly, || format!("(T T_0)^{} e_1 is not e_{}", row.k, 2 * row.k + 1));
    }
    v.check(report.rows.len() == 11, || "missing powers".into());
    for s in &report.squares {
        v.check(s.restricted_square <= s.delta + 1e-12, || format!("square on E_{} exceeds delta", s.n));
        // ε_n = ||K|_{E_n}|| is 1 while a rank-one term still reaches e_n
        let expected = if s.n < 10 { 1.0 } else { 0.0 };
        v.check((s.epsilon - expected).abs() <= 1e-12, || format!("epsilon_{} = {}", s.n, s.epsilon));
    }
    for d in &report.decay {
        v.check(d.norm <= d.bound + 1e-12, || format!("||T'^{}|| above the delta product", 2 * d.k));
    }
    let elapsed = start.elapsed();
    v.check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"));
    v.summary = format!("k = 1..10, N = 22, {elapsed:.2?}");
    v
}

fn test_colours() -> Vec<Colour> {
    sample_colours(seed(), 20, 6).unwrap()
}

fn generator_norms() -> Verdict {
    let mut v = Verdict::new("1e-10");
    let colours = test_colours();
    v.check(colours.len() == 20, || "fewer than 20 colours".into());
    let mut worst: f64 = 0.0;
    for c in &colours {
        let text = c.to_string();
        v.check(common::is_colour(&text), || format!("{text} is not a colour"));
        let basis = TruncatedBasis::new(c.len() + 2).unwrap();
        let norm = operator_norm(&generator_matrix(c, &basis), 1e-12).unwrap().value;
        let expected = 2f64.powi(-(common::depth(&text) as i32));
        worst = worst.max((norm - expected).abs());
        v.check((norm - expected).abs() <= 1e-10, || format!("||T_{text}|| = {norm}, expected {expected}"));
    }
    v.summary = format!("{} colours, max error {worst:e}", colours.len());
    v
}

fn tail_bounds() -> Verdict {
    let mut v = Verdict::new("1e-10");
    let mut checks = 0;
    for c in &test_colours() {
        let basis = TruncatedBasis::new(c.len() + 2).unwrap();
        for n in 0..=2 {
            let tail = tail_bound_check(c, n, &basis).unwrap();
            checks += 1;
            v.check(tail.computed <= 2f64.powi(-(n as i32) - 1) + 1e-10, || {
                format!("||(1 - P_{n}) T_{c}|| = {}", tail.computed)
            });
            // oracle: the largest weight among words coloured c that are deeper than n
            let oracle = common::all_words(basis.max_len())
                .iter()
                .filter(|s| !s.is_empty() && common::mu(s) == c.to_string() && common::depth(s) > n)
                .map(|s| 2f64.powi(-(common::depth(s) as i32)))
                .fold(0.0, f64::max);
            v.check((tail.computed - oracle).abs() <= 1e-10, || {
                format!("tail of T_{c} at n = {n} is {}, oracle {oracle}", tail.computed)
            });
        }
    }
    v.summary = format!("{checks} (colour, n) pairs");
    v
}

fn decomposition_identities() -> Verdict {
    let mut v = Verdict::new("exact; contractivity 1e-9");
    let basis = TruncatedBasis::new(8).unwrap();
    let elements = seeded(&basis, 10, 2, 5, 5);
    let mut checks = 0;
    for (i, f) in elements.iter().enumerate() {
        v.check(!f.is_empty() && f.len() <= 5 && f.max_depth() <= 2, || format!("element {i} out of range"));
        let reassembled = (0..=2).fold(FormalElement::zero(), |acc, n| acc.add(&delta(f, n)));
        v.check(reassembled == *f, || format!("element {i}: depth parts do not reassemble"));
        let norm = operator_norm(&realize(f, &basis), 1e-12).unwrap().value;
        for n in 0..=2 {
            checks += 1;
            let identity = compression_identity_check(f, n, &basis);
            v.check(identity.max_deviation() == 0.0, || {
                format!("element {i}, n = {n}: deviation {:?}", identity)
            });
            let lower = (0..=n).fold(FormalElement::zero(), |acc, j| acc.add(&delta(f, j)));
            v.check(delta_bar(f, n) == lower, || format!("element {i}: depth-{n} part is not the partial sum"));
            let bar = operator_norm(&realize(&delta_bar(f, n), &basis), 1e-12).unwrap().value;
            v.check(bar <= norm + 1e-9, || format!("element {i}: ||depth-{n} part|| = {bar} > {norm}"));
        }
    }
    v.summary = format!("{} elements, {checks} identity checks", elements.len());
    v
}

fn norm_compression() -> Verdict {
    let mut v = Verdict::new("1e-8 relative; blocks 1e-9");
    let basis = TruncatedBasis::new(8).unwrap();
    let mut worst: f64 = 0.0;
    for n in 0..=2 {
        for (i, f) in seeded(&basis, 20, n, 5, 6 + n as u64).iter().enumerate() {
            let (norm, compressed) = compression_norm_check(f, n, &basis).unwrap();
            worst = worst.max((norm - compressed).abs() / norm.max(f64::MIN_POSITIVE));
            v.check((norm - compressed).abs() <= 1e-8 * norm, || {
                format!("n = {n}, element {i}: ||T|| = {norm}, ||P T P|| = {compressed}")
            });
            let blocks = block_norm(&realize(f, &basis), n).unwrap();
            v.check((blocks.value - norm).abs() <= 1e-9, || {
                format!("n = {n}, element {i}: block maximum {} against {norm}", blocks.value)
            });
        }
    }
    v.summary = format!("60 elements, max relative gap {worst:e}");
    v
}

fn weighted_comparison() -> Verdict {
    let mut v = Verdict::new("1e-9");
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 7);
    for i in 0..100 {
        let dim = rng.random_range(2..=32);
        let (m, omega, omega_primed) = random_comparison_instance(&mut rng, dim);
        for j in 0..dim - 1 {
            let ok = omega_primed[j + 1] / omega_primed[j] <= 0.5 * omega[j + 1] / omega[j] * (1.0 + 1e-12);
            v.check(ok, || format!("instance {i} breaks the weight condition at {j}"));
        }
        let r = weighted_comparison_check(&m, &omega, &omega_primed).unwrap();
        v.check(r.primed <= r.normal + 1e-9, || format!("instance {i}: {} > {}", r.primed, r.normal));
        v.check(r.holds(1e-9), || format!("instance {i}: shift bounds fail: {r:?}"));
    }
    v.summary = "100 instances, dimension <= 32".into();
    v
}

fn component_structure() -> Verdict {
    let mut v = Verdict::new("exact");
    let basis = TruncatedBasis::new(10).unwrap();
    let mut mirrored = 0;
    let mut total = 0;
    for n in 0..=3 {
        let comps = match components_in(&basis, n) {
            Ok(c) => c,
            Err(e) => {
                v.failures.push(format!("n = {n}: {e}"));
                continue;
            }
        };
        let mut seen = HashSet::new();
        for comp in &comps {
            for m in &comp.members {
                v.check(seen.insert(m.clone()), || format!("{m} in two components"));
            }
        }
        v.check(seen.len() == (1 << 11) - 1, || format!("n = {n}: partition misses words"));
        let root: HashSet<String> = comps[0].members.iter().map(Word::to_string).collect();
        v.check(comps[0].is_root() && root.contains("1"), || "first component is not the root".into());
        // root: exactly the words of depth <= n, by oracle
        let oracle_root = common::all_words(10)
            .into_iter()
            .filter(|s| common::depth(s) <= n)
            .map(|s| if s.is_empty() { "1".to_string() } else { s })
            .collect::<HashSet<_>>();
        v.check(root == oracle_root, || format!("n = {n}: root is not the depth-{n} words"));
        for comp in comps.iter().skip(1) {
            total += 1;
            let base = comp.base.to_string();
            for (i, m) in comp.members.iter().enumerate() {
                let expected = format!("{}{base}", "g".repeat(i));
                v.check(m.to_string() == expected, || format!("component at {base} is not a g-path"));
                let kept = i > 0 && common::depth(&common::mu(&expected)) <= n;
                v.check(i == 0 || kept, || format!("edge into {expected} should be cut at n = {n}"));
            }
            let checks = radlab::tree::verify_component_structure(comp, n).unwrap();
            v.check(!checks.any_failure(), || format!("n = {n}, component at {base}: {checks:?}"));
            v.check(
                checks.exit != CheckOutcome::Unverifiable || comp.cut_by_truncation,
                || format!("component at {base} unverifiable without being cut"),
            );
            if comp.cut_by_truncation {
                continue;
            }
            match mirror_path(comp, n) {
                Ok(path) => {
                    mirrored += 1;
                    v.check(path.len() == comp.members.len(), || format!("mirror of {base} has wrong length"));
                    for (i, s) in path.iter().enumerate() {
                        let text = s.to_string();
                        v.check(root.contains(&text), || format!("mirror of {base} leaves the root at {text}"));
                        if i > 0 {
                            let prev = path[i - 1].to_string();
                            let parent = if text.len() == 1 { "1" } else { &text[1..] };
                            v.check(parent == prev, || format!("mirror of {base} is not a path at {text}"));
                            let want = common::mu(&comp.members[i].to_string());
                            v.check(common::mu(&text) == want, || format!("mirror of {base}: colour of {text} is not {want}"));
                        }
                    }
                }
                Err(e) => v.failures.push(format!("n = {n}, mirror of {base}: {e}")),
            }
        }
    }
    v.summary = format!("{total} g-path components, {mirrored} mirrored");
    v
}

fn xi_closed_form() -> Verdict {
    let mut v = Verdict::new("exact");
    let mut cases = 0;
    for t in ["h", "gh", "hg", "hh"] {
        for m in 1..=3 {
            cases += 1;
            let xi = common::xi(m, t);
            let closed: Vec<String> = xi_colour_trace(m, &word(t))
                .unwrap()
                .colours()
                .iter()
                .map(Colour::to_string)
                .collect();
            let recursive = common::trace(&xi, m * (t.len() + 1));
            v.check(closed == recursive, || format!("t = {t}, m = {m}: {closed:?} against {recursive:?}"));
            let library = colour_trace(&word(&xi), m * (t.len() + 1)).unwrap();
            v.check(
                library == xi_colour_trace(m, &word(t)).unwrap(),
                || format!("t = {t}, m = {m}: library trace differs"),
            );
        }
    }
    v.summary = format!("{cases} cases");
    v
}

fn semisimplicity_witness() -> Verdict {
    let mut v = Verdict::new("1e-9");
    let h = FormalElement::colour("h".parse().unwrap());
    let literal = [2f64.powi(-3), 2f64.powi(-7), 2f64.powi(-11)];
    let mut lines = Vec::new();
    for m in 1..=3 {
        let r = semisimple_witness(&h, &word("h"), m, 20).unwrap();
        let oracle = 2f64.powi(common::path_weight_log2(&common::xi(m, "h")) as i32);
        v.check(oracle == literal[m - 1], || format!("oracle W(xi_{m}) = {oracle}"));
        v.check((r.inner - C64::new(oracle, 0.0)).norm() <= 1e-9, || format!("m = {m}: inner {}", r.inner));
        v.check((r.inner - r.predicted).norm() <= 1e-9, || format!("m = {m}: predicted {}", r.predicted));
        let root = r.norm_m.powf(1.0 / m as f64);
        v.check(root >= 2f64.powi(-4) - 1e-9, || format!("m = {m}: ||(UT)^m||^(1/m) = {root}"));
        lines.push(format!("m={m}: {:e}", r.inner.re));
    }
    // λ_{(h)} = 1/2 inside a mixed element
    let composite = FormalElement::from_terms([
        (C64::new(0.5, 0.0), colours(&["h"])),
        (C64::new(1.0, 0.0), colours(&["g"])),
        (C64::new(-2.0, 0.0), colours(&["gh", "h"])),
        (C64::new(0.5, 0.0), colours(&["hh"])),
    ]);
    for m in 1..=3 {
        let r = semisimple_witness(&composite, &word("h"), m, 20).unwrap();
        let oracle = 2f64.powi(common::path_weight_log2(&common::xi(m, "h")) as i32) * 0.5f64.powi(m as i32);
        v.check(r.lambda == C64::new(0.5, 0.0), || format!("composite lambda {}", r.lambda));
        v.check((r.inner - C64::new(oracle, 0.0)).norm() <= 1e-9, || {
            format!("composite m = {m}: inner {} against {oracle}", r.inner)
        });
        v.check(r.norm_m >= r.lower_bound - 1e-9, || format!("composite m = {m}: norm below bound"));
    }
    v.summary = lines.join(", ");
    v
}

fn radical_decay() -> Verdict {
    let mut v = Verdict::new("1e-9; homomorphism exact");
    let basis = TruncatedBasis::new(10).unwrap();
    let elements = radical_elements(seed(), &basis, 10, 2, 5, 3);
    let mut nonzero = 0;
    for (i, f) in elements.iter().enumerate() {
        for n in 0..=2 {
            let report = radical_bound_check(f, n, &basis, 8).unwrap();
            v.check(report.rows.len() == 8, || format!("element {i}: {} powers", report.rows.len()));
            v.check(report.homomorphism_deviation == 0.0, || {
                format!("element {i}, n = {n}: deviation {}", report.homomorphism_deviation)
            });
            if n == 0 {
                nonzero += report.rows.iter().filter(|r| r.norm > 0.0).count();
                for row in &report.rows {
                    let bound = row.bound.unwrap();
                    v.check(row.norm <= bound + 1e-9, || {
                        format!("element {i}, k = {}: {} > {bound}", row.k, row.norm)
                    });
                }
            }
        }
    }
    v.check(nonzero > 0, || "all root compressions vanish".into());
    v.summary = format!("10 elements, {nonzero} nonzero root powers");
    v
}

fn support_search() -> Verdict {
    let mut v = Verdict::new("exact");
    let hg_g = support_test(&colours(&["hg", "g"]), 6).unwrap();
    v.check(hg_g == SupportVerdict::Witness(word("hg")), || format!("(hg, g): {hg_g:?}"));
    let g_g = support_test(&colours(&["g", "g"]), 6).unwrap();
    v.check(g_g == SupportVerdict::NoWitnessUpTo(6), || format!("(g, g): {g_g:?}"));
    // exhaustive re-enumeration
    let words = common::all_words(6);
    let first = |want: &[&str]| {
        words
            .iter()
            .filter(|t| t.len() >= want.len())
            .find(|t| common::trace(t, want.len()) == want)
            .cloned()
    };
    v.check(first(&["hg", "g"]).as_deref() == Some("hg"), || "oracle disagrees on (hg, g)".into());
    v.check(first(&["g", "g"]).is_none(), || "oracle finds a witness for (g, g)".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed() ^ 12);
    for _ in 0..50 {
        let t = &words[rng.random_range(1..words.len())];
        let m = rng.random_range(1..=t.len());
        let names = common::trace(t, m);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let expected = first(&refs).map(|s| word(&s));
        let got = support_test(&colours(&refs), 6).unwrap();
        v.check(got == SupportVerdict::Witness(expected.clone().unwrap()), || {
            format!("{names:?}: {got:?} against {expected:?}")
        });
    }
    v.summary = "(hg, g) -> hg; (g, g) none up to 6; 50 random traces".into();
    v
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("colour-map audit", colour_map_audit),
        ("intro counterexample", intro_counterexample_norms),
        ("generator norms", generator_norms),
        ("tail bounds", tail_bounds),
        ("decomposition identities", decomposition_identities),
        ("norm-compression equality", norm_compression),
        ("weighted comparison", weighted_comparison),
        ("component structure", component_structure),
        ("xi closed form", xi_closed_form),
        ("semisimplicity witness", semisimplicity_witness),
        ("radical decay", radical_decay),
        ("support search", support_search),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let verdict = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name} [tol {}] {}", i + 1, v.tolerance, v.summary);
        for f in v.failures.iter().take(10) {
            println!("       {f}");
        }
        if !v.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 12 passed in {:.2?}", 12 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
