//! The dense *-subalgebra spanned by the monomials `S_mu S_nu^*`.
//!
//! Elements are finite sums of monomials with coefficients from one
//! [`Backend`]. The representation is not unique because of the relation
//! `sum_i S_i S_i^* = 1`; semantic equality goes through
//! [`Element::canonical_form`].

mod canonical;
mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{CuntzError, Result};
use crate::scalar::{Backend, Scalar};

pub use canonical::{default_term_budget, DEFAULT_TERM_BUDGET, TERM_BUDGET_ENV};
pub use expr::parse;

/// A finite word over the alphabet `{1..n}`; the path label of `S_mu`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(letters: Vec<u32>) -> Self {
        MultiIndex(letters)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l > n) {
            Some(&bad) => Err(CuntzError::IndexOutOfRange {
                index: bad as u64,
                n,
                offset: 0,
            }),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }

    /// `Some(rest)` when `self == prefix . rest`.
    pub fn strip_prefix(&self, prefix: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| MultiIndex(rest.to_vec()))
    }

    /// All `n^len` words of the given length, in lexicographic order.
    pub fn all_words(n: u32, len: usize) -> impl Iterator<Item = MultiIndex> {
        let total = (n as u64).pow(len as u32);
        (0..total).map(move |mut idx| {
            let mut letters = vec![0u32; len];
            for slot in letters.iter_mut().rev() {
                *slot = (idx % n as u64) as u32 + 1;
                idx /= n as u64;
            }
            MultiIndex(letters)
        })
    }

    /// All words of length `0..=max_len`.
    pub fn words_up_to(n: u32, max_len: usize) -> impl Iterator<Item = MultiIndex> {
        (0..=max_len).flat_map(move |len| Self::all_words(n, len))
    }

    /// Parses the comma-separated form `"1,1,2"`; the empty string is the empty word.
    pub fn parse_list(text: &str, n: u32) -> Result<MultiIndex> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(MultiIndex::empty());
        }
        let mut letters = Vec::new();
        let mut offset = 0;
        for piece in text.split(',') {
            let value: u64 = piece.trim().parse().map_err(|_| CuntzError::Parse {
                offset,
                message: format!("expected a letter, found {piece:?}"),
            })?;
            if value == 0 || value > n as u64 {
                return Err(CuntzError::IndexOutOfRange {
                    index: value,
                    n,
                    offset,
                });
            }
            letters.push(value as u32);
            offset += piece.len() + 1;
        }
        Ok(MultiIndex(letters))
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(letters: &[u32]) -> Self {
        MultiIndex(letters.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(letters: [u32; N]) -> Self {
        MultiIndex(letters.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// `S_mu S_nu^*`. Ordered by (degree, |nu|, mu, nu).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub mu: MultiIndex,
    pub nu: MultiIndex,
}

impl Monomial {
    pub fn new(mu: MultiIndex, nu: MultiIndex) -> Self {
        Monomial { mu, nu }
    }

    pub fn identity() -> Self {
        Monomial::new(MultiIndex::empty(), MultiIndex::empty())
    }

    /// Gauge degree `|mu| - |nu|`.
    pub fn degree(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }

    pub fn depth(&self) -> usize {
        self.mu.len().min(self.nu.len())
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial::new(self.nu.clone(), self.mu.clone())
    }

    /// `(S_mu S_nu^*)(S_alpha S_beta^*)`, which is a monomial or zero.
    pub fn product(&self, rhs: &Monomial) -> Option<Monomial> {
        if let Some(lambda) = self.nu.strip_prefix(&rhs.mu) {
            // nu = alpha lambda
            return Some(Monomial::new(self.mu.clone(), rhs.nu.concat(&lambda)));
        }
        // alpha = nu gamma
        rhs.mu
            .strip_prefix(&self.nu)
            .map(|gamma| Monomial::new(self.mu.concat(&gamma), rhs.nu.clone()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.nu.len().cmp(&other.nu.len()))
            .then_with(|| self.mu.cmp(&other.mu))
            .then_with(|| self.nu.cmp(&other.nu))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite linear combination of monomials in `O_n`.
///
/// Structural equality (`==`) compares term maps; use
/// [`Element::sem_eq`] for equality in the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    n: u32,
    backend: Backend,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(n: u32) -> Self {
        Self::zero_with(n, Backend::Exact)
    }

    pub fn zero_with(n: u32, backend: Backend) -> Self {
        assert!(n >= 2, "the Cuntz algebra needs n >= 2");
        Element {
            n,
            backend,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: u32) -> Self {
        Self::scalar(n, Scalar::one(Backend::Exact))
    }

    pub fn scalar(n: u32, c: Scalar) -> Self {
        let mut e = Self::zero_with(n, c.backend());
        e.insert(Monomial::identity(), c);
        e
    }

    /// The monomial `S_mu S_nu^*` with coefficient one.
    pub fn monomial(n: u32, mu: impl Into<MultiIndex>, nu: impl Into<MultiIndex>) -> Result<Self> {
        let (mu, nu) = (mu.into(), nu.into());
        mu.validate(n)?;
        nu.validate(n)?;
        let mut e = Self::zero(n);
        e.insert(Monomial::new(mu, nu), Scalar::one(Backend::Exact));
        Ok(e)
    }

    /// `S_mu`.
    pub fn s(n: u32, mu: impl Into<MultiIndex>) -> Result<Self> {
        Self::monomial(n, mu, MultiIndex::empty())
    }

    /// `P_mu = S_mu S_mu^*`.
    pub fn range_projection(n: u32, mu: &MultiIndex) -> Result<Self> {
        Self::monomial(n, mu.clone(), mu.clone())
    }

    /// Collects terms, combining like monomials and dropping zeros.
    pub fn from_terms(
        n: u32,
        backend: Backend,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self> {
        let mut e = Self::zero_with(n, backend);
        for (m, c) in terms {
            if c.backend() != backend {
                return Err(CuntzError::Usage(format!(
                    "term coefficient backend {} does not match element backend {backend}",
                    c.backend()
                )));
            }
            m.mu.validate(n)?;
            m.nu.validate(n)?;
            e.insert(m, c);
        }
        Ok(e)
    }

    pub(crate) fn insert(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True for the empty sum. Not semantic: `1 - S_1S_1^* - S_2S_2^*` is
    /// not structurally zero.
    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term, if this element is a scalar multiple of one monomial.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Scalar)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn max_depth(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.mu.len().max(m.nu.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn check_compatible(&self, other: &Element) -> Result<()> {
        if self.n != other.n {
            return Err(CuntzError::Usage(format!(
                "elements of O_{} and O_{} cannot be combined",
                self.n, other.n
            )));
        }
        if self.backend != other.backend {
            return Err(CuntzError::Usage(format!(
                "mixed scalar backends: {} and {}",
                self.backend, other.backend
            )));
        }
        Ok(())
    }

    /// Converts every coefficient to a complex double.
    pub fn to_numeric(&self) -> Element {
        Element {
            n: self.n,
            backend: Backend::Numeric,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_numeric()))
                .collect(),
        }
    }

    /// Applies `f` term by term; `f` returns the new monomial and coefficient.
    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &Scalar) -> (Monomial, Scalar)) -> Element {
        let mut out = Element::zero_with(self.n, self.backend);
        for (m, c) in &self.terms {
            let (m2, c2) = f(m, c);
            out.insert(m2, c2);
        }
        out
    }

    /// Keeps the terms for which `keep` holds.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Element {
        Element {
            n: self.n,
            backend: self.backend,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn try_add(&self, rhs: &Element) -> Result<Element> {
        self.check_compatible(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Element) -> Result<Element> {
        self.check_compatible(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, rhs: &Element) -> Result<Element> {
        self.check_compatible(rhs)?;
        let mut out = Element::zero_with(self.n, self.backend);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some(m) = m1.product(m2) {
                    out.insert(m, c1 * c2);
                }
            }
        }
        Ok(out)
    }

    pub fn try_scale(&self, c: &Scalar) -> Result<Element> {
        if c.backend() != self.backend {
            return Err(CuntzError::Usage(format!(
                "cannot scale a {} element by a {} scalar",
                self.backend,
                c.backend()
            )));
        }
        Ok(self.map_terms(|m, x| (m.clone(), x * c)))
    }

    /// Scales by an exact rational, converting for numeric elements.
    pub fn scale_rational(&self, q: &crate::scalar::Rational) -> Element {
        let c = Scalar::rational(q.clone());
        let c = match self.backend {
            Backend::Exact => c,
            Backend::Numeric => c.to_numeric(),
        };
        self.map_terms(|m, x| (m.clone(), x * &c))
    }

    pub fn scale_int(&self, k: i64) -> Element {
        let c = Scalar::from_int(k, self.backend);
        self.map_terms(|m, x| (m.clone(), x * &c))
    }

    /// `(c S_mu S_nu^*)^* = conj(c) S_nu S_mu^*`.
    pub fn adjoint(&self) -> Element {
        self.map_terms(|m, c| (m.adjoint(), c.conj()))
    }

    /// Semantic equality in `O_n`: the canonical form of `self - other` is empty.
    pub fn sem_eq(&self, other: &Element) -> Result<bool> {
        self.try_sub(other)?.is_zero()
    }

    /// Semantic zero test. Exact elements are tested by folding complete
    /// families upward, which needs no expansion and so no term budget.
    pub fn is_zero(&self) -> Result<bool> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        if self.backend == Backend::Exact {
            return Ok(self.collapses_to_zero());
        }
        Ok(self.canonical_form()?.terms.is_empty())
    }

    /// Largest coefficient magnitude of the canonical form; exact zero for
    /// the zero element.
    pub fn defect(&self) -> Result<f64> {
        if self.backend == Backend::Exact && self.collapses_to_zero() {
            return Ok(0.0);
        }
        Ok(self
            .canonical_form()?
            .terms
            .values()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max))
    }
}

/// `sum c_i a_i`, with like terms combined.
pub fn linear_combine(n: u32, backend: Backend, pairs: &[(Scalar, Element)]) -> Result<Element> {
    let mut acc = Element::zero_with(n, backend);
    for (c, a) in pairs {
        acc = acc.try_add(&a.try_scale(c)?)?;
    }
    Ok(acc)
}

macro_rules! element_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait for &Element {
            type Output = Element;
            /// Panics on mismatched algebras or backends.
            fn $method(self, rhs: &Element) -> Element {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
    };
}

element_binop!(Add, add, try_add);
element_binop!(Sub, sub, try_sub);
element_binop!(Mul, mul, try_mul);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_terms(|m, c| (m.clone(), -c))
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
