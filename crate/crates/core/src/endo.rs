//! Finite-rank right-module endomorphisms of `O_n` over the fixed-point algebra.
//!
//! `Theta_{x,y}` acts by `z -> x Phi(y^* z)`. The gauge projections `Phi_k`
//! are finite sums of these, and the traces `tau~`, `tau_Delta` are evaluated
//! on the legs directly.

use crate::algebra::{default_term_budget, Element, MultiIndex};
use crate::error::{CuntzError, Result};
use crate::modular::ModularContext;
use crate::scalar::{rat_pow, Backend, Scalar};

/// `Theta_{x,y}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOne {
    pub x: Element,
    pub y: Element,
}

impl RankOne {
    pub fn new(x: Element, y: Element) -> Result<Self> {
        x.check_compatible(&y)?;
        Ok(RankOne { x, y })
    }

    /// `x Phi(y^* z)`.
    pub fn apply(&self, z: &Element) -> Result<Element> {
        let ctx = ModularContext::new(self.x.n());
        let inner = ctx.expectation(&self.y.adjoint().try_mul(z)?);
        self.x.try_mul(&inner)
    }
}

/// A finite sum `sum_j c_j Theta_{x_j, y_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndoSum {
    n: u32,
    backend: Backend,
    terms: Vec<(Scalar, RankOne)>,
}

impl EndoSum {
    pub fn zero(n: u32, backend: Backend) -> Self {
        EndoSum {
            n,
            backend,
            terms: Vec::new(),
        }
    }

    pub fn rank_one(x: Element, y: Element) -> Result<Self> {
        let (n, backend) = (x.n(), x.backend());
        let r = RankOne::new(x, y)?;
        Ok(EndoSum {
            n,
            backend,
            terms: vec![(Scalar::one(backend), r)],
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> &[(Scalar, RankOne)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &EndoSum) -> Result<()> {
        if self.n != other.n || self.backend != other.backend {
            return Err(CuntzError::Usage(format!(
                "endomorphisms over O_{} ({}) and O_{} ({}) cannot be combined",
                self.n, self.backend, other.n, other.backend
            )));
        }
        Ok(())
    }

    pub fn push(&mut self, c: Scalar, r: RankOne) -> Result<()> {
        if c.backend() != self.backend || r.x.backend() != self.backend || r.x.n() != self.n {
            return Err(CuntzError::Usage("rank-one term does not match the sum's context".into()));
        }
        if !c.is_zero() && !r.x.is_structurally_zero() && !r.y.is_structurally_zero() {
            self.terms.push((c, r));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &EndoSum) -> Result<EndoSum> {
        self.check(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<EndoSum> {
        if c.backend() != self.backend {
            return Err(CuntzError::Usage("scalar backend does not match".into()));
        }
        let mut out = EndoSum::zero(self.n, self.backend);
        for (d, r) in &self.terms {
            out.push(d * c, r.clone())?;
        }
        Ok(out)
    }

    /// `sum c x Phi(y^* z)`.
    pub fn apply(&self, z: &Element) -> Result<Element> {
        if z.n() != self.n {
            return Err(CuntzError::Usage(format!(
                "cannot apply an endomorphism of O_{} to an element of O_{}",
                self.n,
                z.n()
            )));
        }
        let mut acc = Element::zero_with(self.n, self.backend);
        for (c, r) in &self.terms {
            acc = acc.try_add(&r.apply(z)?.try_scale(c)?)?;
        }
        Ok(acc)
    }

    /// `self o other`, using `Theta_{w,z} o Theta_{x,y} = Theta_{w Phi(z^* x), y}`.
    pub fn compose(&self, other: &EndoSum) -> Result<EndoSum> {
        self.check(other)?;
        let ctx = ModularContext::new(self.n);
        let mut out = EndoSum::zero(self.n, self.backend);
        for (c1, outer) in &self.terms {
            for (c2, inner) in &other.terms {
                let pairing = ctx.expectation(&outer.y.adjoint().try_mul(&inner.x)?);
                let leg = outer.x.try_mul(&pairing)?;
                out.push(c1 * c2, RankOne::new(leg, inner.y.clone())?)?;
            }
        }
        Ok(out)
    }

    /// `pi(f) o self`, where `pi(f)` is left multiplication by `f`.
    pub fn left_multiply(&self, f: &Element) -> Result<EndoSum> {
        let mut out = EndoSum::zero(self.n, self.backend);
        for (c, r) in &self.terms {
            out.push(c.clone(), RankOne::new(f.try_mul(&r.x)?, r.y.clone())?)?;
        }
        Ok(out)
    }

    /// `Delta o self`; `Delta Theta_{x,y} = Theta_{Delta(x), y}`.
    pub fn delta_compose(&self) -> EndoSum {
        let ctx = ModularContext::new(self.n);
        EndoSum {
            n: self.n,
            backend: self.backend,
            terms: self
                .terms
                .iter()
                .map(|(c, r)| {
                    (
                        c.clone(),
                        RankOne {
                            x: ctx.delta(&r.x),
                            y: r.y.clone(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// `tau~(Theta_{x,y}) = psi(y^* x)`, extended linearly.
    pub fn tau_tilde(&self) -> Result<Scalar> {
        let ctx = ModularContext::new(self.n);
        let mut acc = Scalar::zero(self.backend);
        for (c, r) in &self.terms {
            acc = acc + c * &ctx.state_psi(&r.y.adjoint().try_mul(&r.x)?);
        }
        Ok(acc)
    }

    /// `tau_Delta(e) = tau~(Delta o e)`.
    ///
    /// On finite-rank operators the supremum over the truncations `Delta_N`
    /// is attained once `N` covers every gauge degree present in the output
    /// legs; see [`EndoSum::tau_delta_truncated`].
    pub fn tau_delta(&self) -> Result<Scalar> {
        self.delta_compose().tau_tilde()
    }

    /// `tau~(Delta_N o e)` with `Delta_N = Delta (sum_{|k| <= N} Phi_k)`.
    pub fn tau_delta_truncated(&self, cutoff: u32) -> Result<Scalar> {
        let ctx = ModularContext::new(self.n);
        let cutoff = cutoff as i64;
        let mut acc = Scalar::zero(self.backend);
        for (c, r) in &self.terms {
            let truncated = r.x.filter_terms(|m| m.degree().abs() <= cutoff);
            let leg = ctx.delta(&truncated);
            acc = acc + c * &ctx.state_psi(&r.y.adjoint().try_mul(&leg)?);
        }
        Ok(acc)
    }

    /// Largest gauge degree, in absolute value, among the output legs.
    pub fn max_output_degree(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|(_, r)| r.x.terms().map(|(m, _)| m.degree().abs()))
            .max()
            .unwrap_or(0)
    }

    /// Operator equality tested on a finite probe set.
    pub fn agrees_on(&self, other: &EndoSum, probes: &[Element]) -> Result<bool> {
        for z in probes {
            if !self.apply(z)?.sem_eq(&other.apply(z)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Phi_k` as a finite sum of rank-one operators:
/// `sum_{|mu|=k} Theta_{S_mu, S_mu}` for `k >= 0` and
/// `n^{k} sum_{|mu|=-k} Theta_{S_mu^*, S_mu^*}` for `k < 0`.
pub fn phi_k_endo(k: i64, n: u32) -> Result<EndoSum> {
    phi_k_endo_with_budget(k, n, default_term_budget())
}

pub fn phi_k_endo_with_budget(k: i64, n: u32, budget: usize) -> Result<EndoSum> {
    let len = k.unsigned_abs() as usize;
    let needed = (n as usize).checked_pow(len as u32).unwrap_or(usize::MAX);
    if needed > budget {
        return Err(CuntzError::TermBudget { needed, budget });
    }
    let mut out = EndoSum::zero(n, Backend::Exact);
    let coeff = if k >= 0 {
        Scalar::one(Backend::Exact)
    } else {
        Scalar::rational(rat_pow(n, k))
    };
    for mu in MultiIndex::all_words(n, len) {
        let leg = if k >= 0 {
            Element::monomial(n, mu, MultiIndex::empty())?
        } else {
            Element::monomial(n, MultiIndex::empty(), mu)?
        };
        out.push(coeff.clone(), RankOne::new(leg.clone(), leg)?)?;
    }
    Ok(out)
}

/// Checks `v Phi_k(v^* x) == v v^* Phi_{k+m}(x)` on every probe, where
/// `v = S_mu S_nu^*` and `m = |mu| - |nu|`.
pub fn key_fact_check(v: &Element, k: i64, probes: &[Element]) -> Result<bool> {
    let (mono, _) = v
        .as_single_term()
        .filter(|(_, c)| c.is_one())
        .ok_or_else(|| CuntzError::Domain(format!("{} is not a single monomial", v.render())))?;
    let m = mono.degree();
    let ctx = ModularContext::new(v.n());
    let v_adj = v.adjoint();
    let range = v.try_mul(&v_adj)?;
    for x in probes {
        let lhs = v.try_mul(&ctx.gauge_component(&v_adj.try_mul(x)?, k))?;
        let rhs = range.try_mul(&ctx.gauge_component(x, k + m))?;
        if !lhs.sem_eq(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All monomials `S_mu S_nu^*` with `|mu|, |nu| <= max_len`.
pub fn monomial_probes(n: u32, max_len: usize) -> Vec<Element> {
    let words: Vec<MultiIndex> = MultiIndex::words_up_to(n, max_len).collect();
    let mut out = Vec::with_capacity(words.len() * words.len());
    for mu in &words {
        for nu in &words {
            out.push(Element::monomial(n, mu.clone(), nu.clone()).expect("valid letters"));
        }
    }
    out
}
