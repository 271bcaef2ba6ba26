//! String-level oracles written straight from the definitions, sharing no
//! code with the library.
#![allow(dead_code)]

/// `p^j(s)`: drop the `j` outermost letters.
pub fn pred(s: &str, j: usize) -> &str {
    &s[j..]
}

pub fn depth(s: &str) -> usize {
    s.bytes().filter(|&b| b == b'h').count()
}

/// `log2 W(s)`: minus the sum of the depths of `s, p(s), ..., p^{l-1}(s)`.
pub fn path_weight_log2(s: &str) -> i64 {
    -(0..s.len()).map(|j| depth(pred(s, j)) as i64).sum::<i64>()
}

/// Splits `g^k h y` into `(k, y)`; `None` for a pure g-power.
fn split(s: &str) -> Option<(usize, &str)> {
    let k = s.bytes().take_while(|&b| b == b'g').count();
    (k < s.len()).then(|| (k, &s[k + 1..]))
}

pub fn is_colour(s: &str) -> bool {
    match split(s) {
        None => !s.is_empty(),
        Some((k, y)) => k % (1 + y.len()) == 0,
    }
}

/// The colour map by direct recursion.
pub fn mu(s: &str) -> String {
    assert!(!s.is_empty());
    if is_colour(s) {
        return s.to_string();
    }
    let (k, y) = split(s).expect("non-colours contain h");
    let n = y.len();
    let k_prime = k % (n + 1);
    assert!((1..=n).contains(&k_prime));
    mu(pred(y, n - k_prime))
}

pub fn trace(t: &str, m: usize) -> Vec<String> {
    (0..m).map(|j| mu(pred(t, j))).collect()
}

/// All words of length `<= max_len` in (length, lexicographic) order; the
/// unit is the empty string.
pub fn all_words(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let next: Vec<String> = layer
            .iter()
            .flat_map(|w| [format!("{w}g"), format!("{w}h")])
            .collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `ξ_m = g^{(m-1)(l+1)} h t`.
pub fn xi(m: usize, t: &str) -> String {
    format!("{}h{t}", "g".repeat((m - 1) * (t.len() + 1)))
}
