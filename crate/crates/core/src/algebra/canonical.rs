use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::{Element, Monomial, MultiIndex};
use crate::error::{CuntzError, Result};
use crate::scalar::Scalar;

pub const DEFAULT_TERM_BUDGET: usize = 100_000;
pub const TERM_BUDGET_ENV: &str = "CUNTZ_TERM_BUDGET";

/// The expansion guard: `CUNTZ_TERM_BUDGET` if set and valid, otherwise
/// [`DEFAULT_TERM_BUDGET`]. Read once per process.
pub fn default_term_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(TERM_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&b| b > 0)
            .unwrap_or(DEFAULT_TERM_BUDGET)
    })
}

impl Element {
    /// Expands every gauge-degree class to a common depth.
    ///
    /// Within degree `d`, every monomial is pushed through
    /// `S_mu S_nu^* = sum_i S_{mu i} S_{nu i}^*` until all share
    /// `min(|mu|,|nu|) = L_d`, the largest such depth among the input terms of
    /// that degree. Monomials with fixed `(|mu|,|nu|)` are linearly
    /// independent, so the result is a normal form at those depths.
    pub fn canonical_form(&self) -> Result<Element> {
        self.canonical_form_with_budget(default_term_budget())
    }

    pub fn canonical_form_with_budget(&self, budget: usize) -> Result<Element> {
        let mut target: BTreeMap<i64, usize> = BTreeMap::new();
        for m in self.terms.keys() {
            let depth = target.entry(m.degree()).or_insert(0);
            *depth = (*depth).max(m.depth());
        }

        let n = self.n as usize;
        let mut needed = 0usize;
        for m in self.terms.keys() {
            let extra = target[&m.degree()] - m.depth();
            let count = n.checked_pow(extra as u32).unwrap_or(usize::MAX);
            needed = needed.saturating_add(count);
        }
        if needed > budget {
            return Err(CuntzError::TermBudget { needed, budget });
        }

        let mut out = Element::zero_with(self.n, self.backend);
        for (m, c) in &self.terms {
            let extra = target[&m.degree()] - m.depth();
            if extra == 0 {
                out.insert(m.clone(), c.clone());
                continue;
            }
            for w in MultiIndex::all_words(self.n, extra) {
                out.insert(Monomial::new(m.mu.concat(&w), m.nu.concat(&w)), c.clone());
            }
        }
        Ok(out)
    }
}

impl Element {
    /// Zero test for exact elements without expanding: working up from the
    /// deepest level, each family `S_{mu i} S_{nu i}^*` (`i = 1..n`) with one
    /// common coefficient folds into `S_mu S_nu^*`. A term with no complete
    /// family, or whose last letters differ, keeps a nonzero coefficient at
    /// that depth in the expanded form, so the element is nonzero.
    pub(crate) fn collapses_to_zero(&self) -> bool {
        let n = self.n as usize;
        let mut levels: BTreeMap<usize, BTreeMap<Monomial, Scalar>> = BTreeMap::new();
        for (m, c) in &self.terms {
            levels.entry(m.depth()).or_default().insert(m.clone(), c.clone());
        }
        while let Some((depth, terms)) = levels.pop_last() {
            if depth == 0 {
                return terms.values().all(Scalar::is_zero);
            }
            let mut families: BTreeMap<Monomial, Vec<Scalar>> = BTreeMap::new();
            for (m, c) in terms {
                if c.is_zero() {
                    continue;
                }
                let (mu, nu) = (m.mu.letters(), m.nu.letters());
                let (a, b) = (mu[mu.len() - 1], nu[nu.len() - 1]);
                if a != b {
                    return false;
                }
                let parent = Monomial::new(
                    MultiIndex::new(mu[..mu.len() - 1].to_vec()),
                    MultiIndex::new(nu[..nu.len() - 1].to_vec()),
                );
                families.entry(parent).or_default().push(c);
            }
            let upper = levels.entry(depth - 1).or_default();
            for (parent, coeffs) in families {
                if coeffs.len() != n || coeffs.iter().any(|c| *c != coeffs[0]) {
                    return false;
                }
                let c = coeffs.into_iter().next().expect("n >= 2 coefficients");
                match upper.entry(parent) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let sum = o.get() + &c;
                        *o.get_mut() = sum;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;

    #[test]
    fn one_minus_projection_expands() {
        let a = parse("I - S[1].S[1]'", 2).unwrap();
        assert_eq!(a.canonical_form().unwrap(), parse("S[2].S[2]'", 2).unwrap());
    }

    #[test]
    fn maximal_depth_element_is_fixed() {
        let a = parse("S[1]", 2).unwrap();
        assert_eq!(a.canonical_form().unwrap(), a);
    }

    #[test]
    fn unit_relation_cancels() {
        let a = parse("S[1].S[1]' + S[2].S[2]' - I", 2).unwrap();
        assert!(a.canonical_form().unwrap().is_structurally_zero());
    }

    #[test]
    fn degrees_expand_independently() {
        // degree 1 at depth 0 stays, degree 0 expands to depth 1
        let a = parse("S[1] + I + S[2].S[1]'", 2).unwrap();
        let c = a.canonical_form().unwrap();
        let expected = parse("S[1] + S[1].S[1]' + S[2].S[2]' + S[2].S[1]'", 2).unwrap();
        assert_eq!(c, expected);
    }

    #[test]
    fn collapse_agrees_with_expansion() {
        for (text, zero) in [
            ("S[1].S[1]' + S[2].S[2]' - I", true),
            ("S[1].S[2]' - S[1,1].S[2,1]' - S[1,2].S[2,2]'", true),
            ("I - S[1,1].S[1,1]' - S[1,2].S[1,2]' - S[2].S[2]'", true),
            ("I - S[1,1].S[1,1]' - S[2].S[2]'", false),
            ("S[1].S[2]' - S[1,1].S[2,1]'", false),
            ("S[1,2].S[2,1]'", false),
            ("S[1] - S[1,1].S[1]' - S[1,2].S[2]'", true),
            ("2*I - S[1].S[1]' - S[2].S[2]' - S[1].S[1]'", false),
        ] {
            let a = parse(text, 2).unwrap();
            assert_eq!(a.collapses_to_zero(), zero, "{text}");
            assert_eq!(a.canonical_form().unwrap().is_structurally_zero(), zero, "{text}");
        }
    }

    #[test]
    fn budget_overflow_is_reported() {
        let a = parse("I + S[1,1,1,1,1].S[1,1,1,1,1]'", 3).unwrap();
        let err = a.canonical_form_with_budget(100).unwrap_err();
        assert_eq!(err, CuntzError::TermBudget { needed: 244, budget: 100 });
        assert!(a.canonical_form_with_budget(244).is_ok());
    }
}
