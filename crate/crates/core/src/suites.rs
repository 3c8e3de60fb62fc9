//! Named invariant sweeps over all monomials up to a word length. Each
//! returns a [`CheckReport`]; cases are evaluated in parallel and tallied in
//! enumeration order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Element, MultiIndex};
use crate::endo::{key_fact_check, monomial_probes, phi_k_endo};
use crate::error::{CuntzError, Result};
use crate::flow::{check_orientation_chain, cocycle_check, hochschild_orientation, CheckReport, HochschildChain};
use crate::k1::{build_u_mu_nu, find_non_closure_witness, homotopy_path_check, rotation_path, two_stage_path};
use crate::modular::ModularContext;
use crate::scalar::{rat_pow, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kms,
    Tomita,
    Cocycle,
    Hochschild,
    Keyfact,
    Homotopy,
    Tracesplit,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Kms,
        Suite::Tomita,
        Suite::Cocycle,
        Suite::Hochschild,
        Suite::Keyfact,
        Suite::Homotopy,
        Suite::Tracesplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kms => "kms",
            Suite::Tomita => "tomita",
            Suite::Cocycle => "cocycle",
            Suite::Hochschild => "hochschild",
            Suite::Keyfact => "keyfact",
            Suite::Homotopy => "homotopy",
            Suite::Tracesplit => "tracesplit",
        }
    }

    pub fn run(self, n: u32, max_len: usize) -> Result<CheckReport> {
        if n < 2 {
            return Err(CuntzError::Usage(format!("n must be at least 2, got {n}")));
        }
        match self {
            Suite::Kms => kms_suite(n, max_len),
            Suite::Tomita => tomita_suite(n, max_len),
            Suite::Cocycle => cocycle_suite(n, max_len),
            Suite::Hochschild => hochschild_suite(n),
            Suite::Keyfact => keyfact_suite(n, max_len),
            Suite::Homotopy => homotopy_suite(n, max_len),
            Suite::Tracesplit => tracesplit_suite(n, max_len),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CuntzError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| CuntzError::Usage(format!("unknown check suite '{s}'")))
    }
}

/// Runs `check` on every item; each `(false, message)` is a failed case.
pub fn run_cases<T, F>(items: &[T], check: F) -> Result<CheckReport>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<(bool, String)>> + Sync + Send,
{
    let outcomes = items.par_iter().map(&check).collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::new();
    for (ok, message) in outcomes.into_iter().flatten() {
        report.record(ok, || message);
    }
    Ok(report)
}

/// `psi(a b) == psi(sigma(b) a)` for all monomial pairs.
pub fn kms_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let ctx = ModularContext::new(n);
    let monomials = monomial_probes(n, max_len);
    run_cases(&monomials, |a| {
        let mut out = Vec::with_capacity(monomials.len());
        for b in &monomials {
            let lhs = ctx.state_psi(&a.try_mul(b)?);
            let rhs = ctx.state_psi(&ctx.sigma_i(b).try_mul(a)?);
            let ok = lhs == rhs;
            out.push((ok, if ok { String::new() } else { format!("psi({a} . {b}) = {lhs} but psi(sigma({b}) . {a}) = {rhs}") }));
        }
        Ok(out)
    })
}

/// Tomita axioms IV-VI, adjointness of `S` and `F`, and the polar
/// identities `S = J Delta^{1/2}`, `F = Delta^{1/2} J`, for
/// `z in {-1, -1/2, 1/2, 1}`.
pub fn tomita_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let ctx = ModularContext::new(n);
    let monomials = monomial_probes(n, max_len);
    let halves = [-2i64, -1, 1, 2];
    run_cases(&monomials, |a| {
        let mut out = Vec::new();
        let s_a = ctx.tomita_s(a);
        for &k in &halves {
            // S(Delta^z a) == Delta^{-z}(S a)
            let ok = ctx.tomita_s(&ctx.delta_half_power(a, k)).sem_eq(&ctx.delta_half_power(&s_a, -k))?;
            out.push((ok, format!("axiom IV fails for {a}, z = {k}/2")));
        }
        let polar_s = ctx.modular_conjugation_j(&ctx.delta_half_power(a, 1)).sem_eq(&s_a)?;
        out.push((polar_s, format!("S != J Delta^(1/2) on {a}")));
        let polar_f = ctx.delta_half_power(&ctx.modular_conjugation_j(a), 1).sem_eq(&ctx.tomita_f(a))?;
        out.push((polar_f, format!("F != Delta^(1/2) J on {a}")));
        for b in &monomials {
            for &k in &halves {
                let lhs = ctx.inner_product(&ctx.delta_half_power(a, k), b)?;
                let rhs = ctx.inner_product(a, &ctx.delta_half_power(b, k))?;
                out.push((lhs == rhs, format!("axiom V fails for {a}, {b}, z = {k}/2")));
            }
            let vi = ctx.inner_product(&ctx.tomita_f(a), &ctx.tomita_s(b))? == ctx.inner_product(b, a)?;
            out.push((vi, format!("axiom VI fails for {a}, {b}")));
            let adj = ctx.inner_product(&ctx.tomita_s(a), b)? == ctx.inner_product(&ctx.tomita_f(b), a)?;
            out.push((adj, format!("<S a, b> != <F b, a> for {a}, {b}")));
        }
        Ok(out.into_iter().map(|(ok, m)| (ok, if ok { String::new() } else { m })).collect())
    })
}

/// `b^sigma theta` and `B^sigma theta` on all monomial triples.
pub fn cocycle_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let monomials = monomial_probes(n, max_len);
    run_cases(&monomials, |a0| {
        let triples: Vec<_> = monomials
            .iter()
            .flat_map(|a1| monomials.iter().map(move |a2| (a0.clone(), a1.clone(), a2.clone())))
            .collect();
        let report = cocycle_check(&triples)?;
        let mut out = vec![(true, String::new()); report.cases - report.failures];
        if let Some(first) = report.first_failure {
            out.push((false, first));
            out.extend(std::iter::repeat_n((false, String::new()), report.failures - 1));
        }
        Ok(out)
    })
}

/// The orientation cycle is a twisted cycle representing 1, and dropping any
/// one of its terms breaks both properties.
pub fn hochschild_suite(n: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    let full = hochschild_orientation(n)?;
    report.record(full.boundary_vanishes, || format!("b-sigma c != 0 for n = {n}"));
    report.record(full.represents_unit, || format!("pi(c) != 1 for n = {n}"));
    let cycle = HochschildChain::orientation(n)?;
    for j in 0..n as usize {
        let dropped = check_orientation_chain(&cycle.without_term(j))?;
        report.record(!dropped.boundary_vanishes && !dropped.represents_unit, || {
            format!("dropping term {} of the orientation cycle went undetected", j + 1)
        });
    }
    Ok(report)
}

/// `v Phi_k(v^* x) == v v^* Phi_{k+m}(x)` for every monomial `v`, `|k| <= 2`,
/// on probes one letter deeper than `v`.
pub fn keyfact_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let monomials = monomial_probes(n, max_len);
    let probes = monomial_probes(n, max_len + 1);
    run_cases(&monomials, |v| {
        let mut out = Vec::new();
        for k in -2..=2 {
            let ok = key_fact_check(v, k, &probes)?;
            out.push((ok, if ok { String::new() } else { format!("key fact fails for v = {v}, k = {k}") }));
        }
        Ok(out)
    })
}

/// Two-stage and rotation paths between `u_{mu,nu}` and `u_{nu,mu}` at 21
/// samples, for distinct nonempty words, plus the existence of a
/// non-closure witness.
pub fn homotopy_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let words: Vec<MultiIndex> = MultiIndex::words_up_to(n, max_len).filter(|w| !w.is_empty()).collect();
    let pairs: Vec<(MultiIndex, MultiIndex)> = words
        .iter()
        .flat_map(|mu| words.iter().filter(move |nu| *nu != mu).map(move |nu| (mu.clone(), nu.clone())))
        .collect();
    let mut report = run_cases(&pairs, |(mu, nu)| {
        let two_stage = homotopy_path_check(two_stage_path(n, mu, nu)?, 21)?;
        let u = build_u_mu_nu(n, mu, nu)?;
        let v = build_u_mu_nu(n, nu, mu)?;
        let rotation = homotopy_path_check(rotation_path(&u, &v)?, 21)?;
        Ok(vec![
            (two_stage.passed, format!("two-stage path {mu} -> {nu}: max defect {:e}", two_stage.max_defect())),
            (rotation.passed, format!("rotation path for {mu}, {nu}: max defect {:e}", rotation.max_defect())),
        ])
    })?;
    let witness = find_non_closure_witness(n, 1)?;
    report.record(witness.is_some(), || format!("no non-closure witness found for n = {n}"));
    Ok(report)
}

/// `tau~(pi(f) Phi_k) == n^k tau(f)` and `tau_Delta(pi(f) Phi_k) == tau(f)`
/// for degree-0 monomials `f` and `|k| <= 3`, including `f = 1`.
pub fn tracesplit_suite(n: u32, max_len: usize) -> Result<CheckReport> {
    let ctx = ModularContext::new(n);
    let mut fs = Vec::new();
    for len in 0..=max_len {
        for a in MultiIndex::all_words(n, len) {
            for b in MultiIndex::all_words(n, len) {
                fs.push(Element::monomial(n, a.clone(), b)?);
            }
        }
    }
    let phis = (-3..=3).map(|k| Ok((k, phi_k_endo(k, n)?))).collect::<Result<Vec<_>>>()?;
    run_cases(&fs, |f| {
        let tau_f = ctx.trace_f(f)?;
        let mut out = Vec::new();
        for (k, phi) in &phis {
            let e = phi.left_multiply(f)?;
            let tilde = e.tau_tilde()?;
            let expected = &tau_f * &Scalar::rational(rat_pow(n, *k));
            out.push((tilde == expected, format!("tau~(pi({f}) Phi_{k}) = {tilde}, expected {expected}")));
            let delta = e.tau_delta()?;
            out.push((delta == tau_f, format!("tau_Delta(pi({f}) Phi_{k}) = {delta}, expected {tau_f}")));
        }
        Ok(out.into_iter().map(|(ok, m)| (ok, if ok { String::new() } else { m })).collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in Suite::ALL {
            let r = s.run(2, 1).unwrap();
            assert!(r.cases > 0, "{s}");
            assert!(r.passed(), "{s}: {r:?}");
        }
    }

    #[test]
    fn kms_case_count() {
        // 9 monomials with words of length <= 1 at n = 2
        assert_eq!(kms_suite(2, 1).unwrap().cases, 81);
        assert_eq!(kms_suite(2, 2).unwrap().cases, 49 * 49);
    }
}
