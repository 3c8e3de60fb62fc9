//! Index pairings for modular unitaries: spectral flow as `psi(u [D, u^*])`,
//! the eta and kernel corrections, the twisted cocycle and orientation
//! cycle, relative entropy, the value-group test and the APS traces.

use serde::Serialize;

use crate::algebra::{Element, MultiIndex};
use crate::endo::phi_k_endo;
use crate::error::{CuntzError, Result};
use crate::json::serialize_sig17;
use crate::k1::{build_u_mu_nu, AlgMatrix};
use crate::modular::ModularContext;
use crate::numerics::ProjectionPerturbation;
use crate::scalar::{format_rational, is_n_adic, rat_int, rat_pow, rational_to_f64, Backend, Rational, Scalar};

fn require_exact_modular(u: &AlgMatrix) -> Result<()> {
    if u.backend() != Backend::Exact {
        return Err(CuntzError::Backend("index pairings need an exact matrix".into()));
    }
    if !u.is_modular_unitary()? {
        return Err(CuntzError::Domain("not a modular unitary".into()));
    }
    Ok(())
}

/// `U [D, U^*]`, with `[D, .]` applied entry-wise.
pub fn flow_density(u: &AlgMatrix) -> Result<AlgMatrix> {
    let ctx = ModularContext::new(u.n());
    u.try_mul(&u.adjoint().map_entries(|e| ctx.commutator_d(e)))
}

fn diagonal_psi(m: &AlgMatrix) -> Scalar {
    let ctx = ModularContext::new(m.n());
    m.diagonal()
        .map(|e| ctx.state_psi(e))
        .fold(Scalar::zero(m.backend()), |acc, x| acc + x)
}

/// `sum_i psi((U [D, U^*])_ii)`, an exact rational. Rejects unitaries that
/// are not modular.
pub fn spectral_flow(u: &AlgMatrix) -> Result<Scalar> {
    require_exact_modular(u)?;
    Ok(diagonal_psi(&flow_density(u)?))
}

/// `eta_eps(D)`: zero, since `sum_k k e^{-t k^2}` vanishes term by term.
pub fn eta_of_d() -> Scalar {
    Scalar::zero(Backend::Exact)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corrections {
    pub eta_diff: Scalar,
    pub kernel_diff: Scalar,
}

/// `eta_diff = (tau(sigma(U^*) U) - 1) eta(D)` and
/// `kernel_diff = sum_i tau((1 - sigma(U^*) U)_ii)`.
pub fn correction_terms(u: &AlgMatrix) -> Result<Corrections> {
    require_exact_modular(u)?;
    let twisted = u.adjoint().apply_sigma().try_mul(u)?;
    let id = AlgMatrix::identity(u.n(), u.dim(), Backend::Exact);
    let kernel_diff = diagonal_psi(&id.try_sub(&twisted)?);
    let factor = diagonal_psi(&twisted) - Scalar::one(Backend::Exact);
    Ok(Corrections {
        eta_diff: factor * eta_of_d(),
        kernel_diff,
    })
}

/// `theta(a0, a1) = psi(a0 [D, a1])`.
pub fn twisted_theta(a0: &Element, a1: &Element) -> Result<Scalar> {
    let ctx = ModularContext::new(a0.n());
    Ok(ctx.state_psi(&a0.try_mul(&ctx.commutator_d(a1))?))
}

/// `b^sigma theta(a0, a1, a2) = theta(a0 a1, a2) - theta(a0, a1 a2) + theta(sigma(a2) a0, a1)`.
pub fn twisted_coboundary(a0: &Element, a1: &Element, a2: &Element) -> Result<Scalar> {
    let ctx = ModularContext::new(a0.n());
    Ok(twisted_theta(&a0.try_mul(a1)?, a2)? - twisted_theta(a0, &a1.try_mul(a2)?)?
        + twisted_theta(&ctx.sigma_i(a2).try_mul(a0)?, a1)?)
}

/// `B^sigma theta(a0) = theta(1, a0)`.
pub fn twisted_b_boundary(a0: &Element) -> Result<Scalar> {
    let one = Element::scalar(a0.n(), Scalar::one(a0.backend()));
    twisted_theta(&one, a0)
}

/// Pass/fail tally of an exhaustive or sampled check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport {
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl Default for CheckReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Evaluates `b^sigma theta` on every triple and `B^sigma theta` on every
/// first slot; each evaluation is one case.
pub fn cocycle_check(triples: &[(Element, Element, Element)]) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    for (a0, a1, a2) in triples {
        let b = twisted_coboundary(a0, a1, a2)?;
        report.record(b.is_zero(), || {
            format!("b-sigma theta({a0}, {a1}, {a2}) = {b}")
        });
        let big_b = twisted_b_boundary(a0)?;
        report.record(big_b.is_zero(), || format!("B-sigma theta({a0}) = {big_b}"));
    }
    Ok(report)
}

/// A twisted Hochschild 1-chain `sum_j c_j x_j ⊗ y_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HochschildChain {
    n: u32,
    terms: Vec<(Scalar, Element, Element)>,
}

impl HochschildChain {
    pub fn new(n: u32, terms: Vec<(Scalar, Element, Element)>) -> Self {
        HochschildChain { n, terms }
    }

    /// `c = (1/n) sum_j S_j^* ⊗ S_j`.
    pub fn orientation(n: u32) -> Result<Self> {
        let weight = Scalar::ratio(1, n as i64);
        let terms = (1..=n)
            .map(|j| {
                let s = Element::s(n, [j])?;
                Ok((weight.clone(), s.adjoint(), s))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HochschildChain { n, terms })
    }

    pub fn without_term(&self, index: usize) -> Self {
        let mut terms = self.terms.clone();
        terms.remove(index);
        HochschildChain { n: self.n, terms }
    }

    /// `b^sigma(x ⊗ y) = x y - sigma(y) x`, extended linearly.
    pub fn boundary(&self) -> Result<Element> {
        let ctx = ModularContext::new(self.n);
        let mut acc = Element::zero(self.n);
        for (c, x, y) in &self.terms {
            let b = x.try_mul(y)?.try_sub(&ctx.sigma_i(y).try_mul(x)?)?;
            acc = acc.try_add(&b.try_scale(c)?)?;
        }
        Ok(acc)
    }

    /// `pi(x ⊗ y) = x [D, y]`, extended linearly.
    pub fn representation(&self) -> Result<Element> {
        let ctx = ModularContext::new(self.n);
        let mut acc = Element::zero(self.n);
        for (c, x, y) in &self.terms {
            acc = acc.try_add(&x.try_mul(&ctx.commutator_d(y))?.try_scale(c)?)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationReport {
    pub n: u32,
    pub boundary_vanishes: bool,
    pub represents_unit: bool,
}

impl OrientationReport {
    pub fn passed(&self) -> bool {
        self.boundary_vanishes && self.represents_unit
    }
}

pub fn check_orientation_chain(chain: &HochschildChain) -> Result<OrientationReport> {
    Ok(OrientationReport {
        n: chain.n,
        boundary_vanishes: chain.boundary()?.is_zero()?,
        represents_unit: chain.representation()?.sem_eq(&Element::one(chain.n))?,
    })
}

/// Checks `b^sigma c = 0` and `pi(c) = 1` for the orientation cycle.
pub fn hochschild_orientation(n: u32) -> Result<OrientationReport> {
    if n < 2 {
        return Err(CuntzError::Usage(format!("n must be at least 2, got {n}")));
    }
    check_orientation_chain(&HochschildChain::orientation(n)?)
}

/// `S(psi_u, psi) = ln(n) sf`.
pub fn relative_entropy(u: &AlgMatrix) -> Result<f64> {
    let sf = spectral_flow(u)?.expect_rational()?;
    Ok((u.n() as f64).ln() * rational_to_f64(&sf))
}

/// Is `q` in `(n-1) Z[1/n]`?
pub fn k0_membership(q: &Rational, n: u32) -> bool {
    is_n_adic(&(q / rat_int(n as i64 - 1)), n)
}

/// The traces of the APS index classes for `v = S_mu S_nu^*`, from
/// `tau_Delta(pi(f) Phi_k)` sums: `(-m tau(vv^*), m tau(v^*v))`,
/// `m = |mu| - |nu|`.
pub fn aps_index_traces(v: &Element) -> Result<(Scalar, Scalar)> {
    let (mono, c) = v
        .as_single_term()
        .ok_or_else(|| CuntzError::Domain(format!("{} is not a single monomial", v.render())))?;
    if !c.is_one() {
        return Err(CuntzError::Domain(format!("{} is not a partial isometry monomial", v.render())));
    }
    let n = v.n();
    let m = mono.degree();
    let v_adj = v.adjoint();
    let range = v.try_mul(&v_adj)?;
    let source = v_adj.try_mul(v)?;
    let traced = |f: &Element, ks: std::ops::Range<i64>| -> Result<Scalar> {
        let mut acc = Scalar::zero(Backend::Exact);
        for k in ks {
            acc = acc + phi_k_endo(k, n)?.left_multiply(f)?.tau_delta()?;
        }
        Ok(acc)
    };
    if m >= 0 {
        Ok((-traced(&range, 0..m)?, traced(&source, -m..0)?))
    } else {
        Ok((traced(&range, m..0)?, -traced(&source, 0..-m)?))
    }
}

/// Reads `U [D, U^*]` as `sum_j c_j Q_j`, one monomial projection per
/// diagonal entry, with weights `tau(Q_j)`.
pub fn projection_perturbation(u: &AlgMatrix) -> Result<ProjectionPerturbation> {
    require_exact_modular(u)?;
    let density = flow_density(u)?;
    let n = u.n();
    let mut components = Vec::new();
    for (i, entry) in density.diagonal().enumerate() {
        if entry.is_zero()? {
            continue;
        }
        let (mono, c) = entry.as_single_term().ok_or_else(|| {
            CuntzError::Domain(format!("diagonal entry {i} is not a multiple of one projection: {}", entry.render()))
        })?;
        if mono.mu != mono.nu {
            return Err(CuntzError::Domain(format!("diagonal entry {i} is not a range projection: {}", entry.render())));
        }
        let c = c.expect_rational()?;
        components.push((c, rat_pow(n, -(mono.mu.len() as i64))));
    }
    // off-diagonal entries must vanish for the projections to be orthogonal
    for i in 0..density.dim() {
        for j in 0..density.dim() {
            if i != j && !density.entry(i, j).is_zero()? {
                return Err(CuntzError::Domain(format!("U[D,U*] has a nonzero off-diagonal entry ({i},{j})")));
            }
        }
    }
    ProjectionPerturbation::new(components)
}

/// `(|mu|-|nu|) (n^{-|nu|} - n^{-|mu|})`.
pub fn closed_form_flow(n: u32, mu: &MultiIndex, nu: &MultiIndex) -> Rational {
    let m = mu.len() as i64 - nu.len() as i64;
    rat_int(m) * (rat_pow(n, -(nu.len() as i64)) - rat_pow(n, -(mu.len() as i64)))
}

/// Spectral flow bundle for `u_{mu,nu}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowReport {
    pub n: u32,
    pub mu: MultiIndex,
    pub nu: MultiIndex,
    #[serde(serialize_with = "serialize_rational")]
    pub sf: Rational,
    #[serde(serialize_with = "serialize_scalar")]
    pub eta_diff: Scalar,
    #[serde(serialize_with = "serialize_scalar")]
    pub kernel_diff: Scalar,
    pub in_k0_range: bool,
    #[serde(serialize_with = "serialize_sig17")]
    pub entropy: f64,
}

fn serialize_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn serialize_scalar<S: serde::Serializer>(c: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

pub fn flow_report(n: u32, mu: &MultiIndex, nu: &MultiIndex) -> Result<FlowReport> {
    mu.validate(n)?;
    nu.validate(n)?;
    let u = build_u_mu_nu(n, mu, nu)?;
    let sf = spectral_flow(&u)?.expect_rational()?;
    let corrections = correction_terms(&u)?;
    Ok(FlowReport {
        n,
        mu: mu.clone(),
        nu: nu.clone(),
        in_k0_range: k0_membership(&sf, n),
        entropy: (n as f64).ln() * rational_to_f64(&sf),
        sf,
        eta_diff: corrections.eta_diff,
        kernel_diff: corrections.kernel_diff,
    })
}
