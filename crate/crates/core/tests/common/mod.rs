#![allow(dead_code)]

use cuntz_core::scalar::rat;
use cuntz_core::{Backend, Element, Monomial, MultiIndex, QuadRational, Scalar};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub fn word(n: u32, max_len: usize) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(1..=n, 0..=max_len).prop_map(MultiIndex::new)
}

pub fn monomial(n: u32, max_len: usize) -> impl Strategy<Value = Monomial> {
    (word(n, max_len), word(n, max_len)).prop_map(|(mu, nu)| Monomial::new(mu, nu))
}

pub fn rational_coeff() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Scalar::ratio(p, q))
}

/// `a + b sqrt(n)` with small rational parts.
pub fn quad_coeff(n: u32) -> impl Strategy<Value = Scalar> {
    ((-4i64..=4, 1i64..=3), (-2i64..=2, 1i64..=3))
        .prop_map(move |((a, b), (c, d))| Scalar::Exact(QuadRational::new(rat(a, b), rat(c, d), n)))
}

/// Elements with up to `max_terms` terms and rational coefficients.
pub fn element(n: u32, max_terms: usize, max_len: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((monomial(n, max_len), rational_coeff()), 0..=max_terms)
        .prop_map(move |terms| Element::from_terms(n, Backend::Exact, terms).unwrap())
}

/// Elements whose coefficients may carry a `sqrt(n)` part.
pub fn quad_element(n: u32, max_terms: usize, max_len: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((monomial(n, max_len), quad_coeff(n)), 0..=max_terms)
        .prop_map(move |terms| Element::from_terms(n, Backend::Exact, terms).unwrap())
}

/// Degree-0 elements.
pub fn fixed_point_element(n: u32, max_terms: usize, max_len: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec(
        (0..=max_len).prop_flat_map(move |len| {
            (
                prop::collection::vec(1..=n, len).prop_map(MultiIndex::new),
                prop::collection::vec(1..=n, len).prop_map(MultiIndex::new),
                rational_coeff(),
            )
        }),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        Element::from_terms(n, Backend::Exact, terms.into_iter().map(|(mu, nu, c)| (Monomial::new(mu, nu), c)))
            .unwrap()
    })
}

/// Rewrites each term flagged in `mask` one level deeper with
/// `S_mu S_nu^* = sum_i S_{mu i} S_{nu i}^*`, leaving the value unchanged.
pub fn expand_terms(a: &Element, mask: &[bool]) -> Element {
    let n = a.n();
    let mut terms = Vec::new();
    for (idx, (m, c)) in a.terms().enumerate() {
        if mask.get(idx).copied().unwrap_or(false) {
            for i in 1..=n {
                let letter = MultiIndex::new(vec![i]);
                terms.push((Monomial::new(m.mu.concat(&letter), m.nu.concat(&letter)), c.clone()));
            }
        } else {
            terms.push((m.clone(), c.clone()));
        }
    }
    Element::from_terms(n, a.backend(), terms).unwrap()
}

/// Pairs `(a, b)` that are equal about half the time: `b` is either an
/// independent element, a rewriting of `a`, or a rewriting of `a` plus a
/// single extra term.
pub fn element_pair(n: u32, max_terms: usize, max_len: usize) -> impl Strategy<Value = (Element, Element)> {
    (
        element(n, max_terms, max_len),
        element(n, max_terms, max_len),
        prop::collection::vec(any::<bool>(), max_terms),
        0u8..4,
        monomial(n, max_len),
        rational_coeff(),
    )
        .prop_map(move |(a, other, mask, kind, extra, c)| {
            let b = match kind {
                0 => other,
                1 | 2 => expand_terms(&a, &mask),
                _ => {
                    let bump = Element::from_terms(n, Backend::Exact, [(extra, c)]).unwrap();
                    expand_terms(&a, &mask).try_add(&bump).unwrap()
                }
            };
            (a, b)
        })
}

/// `count` values drawn from `strategy` with a fixed seed.
pub fn samples<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy generates").current())
        .collect()
}
