//! Fixtures shared by the benchmarks.

use cuntz_core::{parse, Element, MultiIndex};

/// All `(mu, nu)` with `1 <= |mu|, |nu| <= max_len` and `|mu| != |nu|`.
pub fn unequal_pairs(n: u32, max_len: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let words: Vec<MultiIndex> = MultiIndex::words_up_to(n, max_len).filter(|w| !w.is_empty()).collect();
    let mut out = Vec::new();
    for mu in &words {
        for nu in &words {
            if mu.len() != nu.len() {
                out.push((mu.clone(), nu.clone()));
            }
        }
    }
    out
}

/// `1 - P_mu` for the all-ones word of length `depth`, which expands to
/// `n^depth - 1` terms.
pub fn deep_complement(n: u32, depth: usize) -> Element {
    let word = vec!["1"; depth].join(",");
    parse(&format!("I - S[{word}].S[{word}]'"), n).expect("valid expression")
}
