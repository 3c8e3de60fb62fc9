mod common;

use common::{element, element_pair, expand_terms, fixed_point_element, monomial, quad_element, word};
use cuntz_core::flow::{aps_index_traces, closed_form_flow, projection_perturbation};
use cuntz_core::k1::{homotopy_path_check, inverse_sum_path, rotation_path};
use cuntz_core::numerics::{beta_constant, dixmier_limit, sf_integral};
use cuntz_core::scalar::{rat, rat_int, rat_pow};
use cuntz_core::{
    build_u_mu_nu, build_u_v, parse, phi_k_endo, spectral_flow, AlgMatrix, Backend, Element, EndoSum,
    ModularContext, MultiIndex, QuadRational, Scalar, SummationConfig,
};
use proptest::prelude::*;

fn distinct_lengths(n: u32, max_len: usize) -> impl Strategy<Value = (MultiIndex, MultiIndex)> {
    (word(n, max_len), word(n, max_len)).prop_filter("|mu| != |nu|, both nonempty", |(mu, nu)| {
        !mu.is_empty() && !nu.is_empty() && mu.len() != nu.len()
    })
}

fn positive_rational(x: &Scalar) -> bool {
    match x.as_exact() {
        Some(q) => q.signum() > 0,
        None => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // algebra

    #[test]
    fn product_is_associative(
        a in element(3, 3, 2),
        b in element(3, 3, 2),
        c in element(3, 3, 2),
    ) {
        let left = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let right = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert!(left.sem_eq(&right).unwrap());
    }

    #[test]
    fn adjoint_is_an_involution(a in quad_element(2, 4, 3), b in quad_element(2, 4, 3)) {
        let lhs = a.try_mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().try_mul(&a.adjoint()).unwrap();
        prop_assert!(lhs.sem_eq(&rhs).unwrap());
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn canonical_form_is_idempotent(a in element(3, 6, 3)) {
        let once = a.canonical_form().unwrap();
        prop_assert_eq!(once.canonical_form().unwrap(), once.clone());
        prop_assert!(once.sem_eq(&a).unwrap());
    }

    #[test]
    fn rewriting_preserves_value(a in element(2, 6, 3), mask in prop::collection::vec(any::<bool>(), 6)) {
        let b = expand_terms(&a, &mask);
        prop_assert!(a.sem_eq(&b).unwrap());
        prop_assert_eq!(a.canonical_form().unwrap().is_structurally_zero(), a.is_zero().unwrap());
    }

    #[test]
    fn equality_agrees_with_the_state((a, b) in element_pair(2, 6, 3)) {
        let ctx = ModularContext::new(2);
        let d = a.try_sub(&b).unwrap();
        let norm = ctx.state_psi(&d.adjoint().try_mul(&d).unwrap());
        prop_assert_eq!(a.sem_eq(&b).unwrap(), norm.is_zero());
    }

    #[test]
    fn render_round_trips(a in quad_element(3, 5, 3)) {
        let back = parse(&a.render(), 3).unwrap();
        prop_assert!(back.sem_eq(&a).unwrap());
        prop_assert_eq!(back.render(), a.render());
    }

    // modular structure

    #[test]
    fn kms_condition(a in quad_element(3, 4, 2), b in quad_element(3, 4, 2)) {
        let ctx = ModularContext::new(3);
        let lhs = ctx.state_psi(&a.try_mul(&b).unwrap());
        let rhs = ctx.state_psi(&ctx.sigma_i(&b).try_mul(&a).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tomita_axioms(a in quad_element(2, 4, 2), b in quad_element(2, 4, 2), k in -2i64..=2) {
        let ctx = ModularContext::new(2);
        let s_delta = ctx.tomita_s(&ctx.delta_half_power(&a, k));
        prop_assert!(s_delta.sem_eq(&ctx.delta_half_power(&ctx.tomita_s(&a), -k)).unwrap());
        prop_assert_eq!(
            ctx.inner_product(&ctx.delta_half_power(&a, k), &b).unwrap(),
            ctx.inner_product(&a, &ctx.delta_half_power(&b, k)).unwrap()
        );
        prop_assert_eq!(
            ctx.inner_product(&ctx.tomita_f(&a), &ctx.tomita_s(&b)).unwrap(),
            ctx.inner_product(&b, &a).unwrap()
        );
        prop_assert_eq!(
            ctx.inner_product(&ctx.tomita_s(&a), &b).unwrap(),
            ctx.inner_product(&ctx.tomita_f(&b), &a).unwrap()
        );
        let polar = ctx.modular_conjugation_j(&ctx.delta_half_power(&a, 1));
        prop_assert!(polar.sem_eq(&ctx.tomita_s(&a)).unwrap());
        let polar_f = ctx.delta_half_power(&ctx.modular_conjugation_j(&a), 1);
        prop_assert!(polar_f.sem_eq(&ctx.tomita_f(&a)).unwrap());
    }

    #[test]
    fn modular_operator_scales_by_degree(m in monomial(3, 3), k in -3i64..=3) {
        let ctx = ModularContext::new(3);
        let a = Element::from_terms(3, Backend::Exact, [(m.clone(), Scalar::one(Backend::Exact))]).unwrap();
        let deg = m.degree();
        let expected = a.scale_rational(&rat_pow(3, -deg));
        prop_assert_eq!(ctx.delta(&a), expected);
        prop_assert_eq!(ctx.commutator_d(&a), a.scale_int(deg));
        let z = Scalar::Exact(QuadRational::rational(rat(k, 2)));
        let scaled = a.try_scale(&Scalar::Exact(QuadRational::sqrt_pow(3, -k * deg))).unwrap();
        prop_assert_eq!(ctx.delta_power(&a, &z).unwrap(), scaled);
    }

    #[test]
    fn state_is_faithful(a in quad_element(2, 5, 3)) {
        prop_assume!(!a.is_zero().unwrap());
        let ctx = ModularContext::new(2);
        prop_assert!(positive_rational(&ctx.state_psi(&a.adjoint().try_mul(&a).unwrap())));
    }

    #[test]
    fn derivation_is_leibniz(a in quad_element(2, 4, 3), b in quad_element(2, 4, 3)) {
        let ctx = ModularContext::new(2);
        let lhs = ctx.commutator_d(&a.try_mul(&b).unwrap());
        let rhs = ctx
            .commutator_d(&a)
            .try_mul(&b)
            .unwrap()
            .try_add(&a.try_mul(&ctx.commutator_d(&b)).unwrap())
            .unwrap();
        prop_assert!(lhs.sem_eq(&rhs).unwrap());
    }

    #[test]
    fn expectation_is_a_bimodule_map(
        f in fixed_point_element(2, 3, 2),
        a in element(2, 4, 3),
        g in fixed_point_element(2, 3, 2),
    ) {
        let ctx = ModularContext::new(2);
        let lhs = ctx.expectation(&f.try_mul(&a).unwrap().try_mul(&g).unwrap());
        let rhs = f.try_mul(&ctx.expectation(&a)).unwrap().try_mul(&g).unwrap();
        prop_assert!(lhs.sem_eq(&rhs).unwrap());
        prop_assert!(ctx.expectation(&ctx.commutator_d(&a)).is_zero().unwrap());
    }

    // endomorphisms

    #[test]
    fn trace_is_tracial(
        x in element(2, 2, 2), y in element(2, 2, 2),
        w in element(2, 2, 2), z in element(2, 2, 2),
    ) {
        let t1 = EndoSum::rank_one(x, y).unwrap();
        let t2 = EndoSum::rank_one(w, z).unwrap();
        prop_assert_eq!(
            t1.compose(&t2).unwrap().tau_tilde().unwrap(),
            t2.compose(&t1).unwrap().tau_tilde().unwrap()
        );
    }

    #[test]
    fn weighted_trace_splits(f in fixed_point_element(2, 3, 2), k in -3i64..=3) {
        let ctx = ModularContext::new(2);
        let tau_f = ctx.trace_f(&f).unwrap();
        let e = phi_k_endo(k, 2).unwrap().left_multiply(&f).unwrap();
        prop_assert_eq!(e.tau_tilde().unwrap(), &tau_f * &Scalar::rational(rat_pow(2, k)));
        prop_assert_eq!(e.tau_delta().unwrap(), tau_f);
    }

    #[test]
    fn weighted_trace_is_trace_after_delta(x in quad_element(2, 3, 3), y in quad_element(2, 3, 3)) {
        let e = EndoSum::rank_one(x, y).unwrap();
        prop_assert_eq!(e.tau_delta().unwrap(), e.delta_compose().tau_tilde().unwrap());
    }

    // modular K1

    #[test]
    fn u_mu_nu_is_a_self_adjoint_modular_unitary(mu in word(3, 3), nu in word(3, 3)) {
        let u = build_u_mu_nu(3, &mu, &nu).unwrap();
        prop_assert!(u.is_self_adjoint().unwrap());
        prop_assert!(u.is_modular_unitary().unwrap());
    }

    #[test]
    fn scalar_conjugation_keeps_modularity(mu in word(2, 3), nu in word(2, 3), choice in 0usize..3) {
        let u = build_u_mu_nu(2, &mu, &nu).unwrap();
        let rows = match choice {
            0 => vec![vec![Scalar::ratio(3, 5), Scalar::ratio(4, 5)], vec![Scalar::ratio(-4, 5), Scalar::ratio(3, 5)]],
            1 => vec![vec![Scalar::ratio(0, 1), Scalar::ratio(1, 1)], vec![Scalar::ratio(1, 1), Scalar::ratio(0, 1)]],
            _ => vec![vec![Scalar::ratio(1, 1), Scalar::ratio(0, 1)], vec![Scalar::ratio(0, 1), Scalar::ratio(-1, 1)]],
        };
        let x = AlgMatrix::from_scalars(2, &rows).unwrap();
        let conjugated = x.try_mul(&u).unwrap().try_mul(&x.adjoint()).unwrap();
        prop_assert!(conjugated.is_modular_unitary().unwrap());
    }

    #[test]
    fn direct_sums_stay_modular((a, b) in distinct_lengths(2, 3), (c, d) in distinct_lengths(2, 3)) {
        let u = build_u_mu_nu(2, &a, &b).unwrap();
        let v = build_u_mu_nu(2, &c, &d).unwrap();
        let sum = u.direct_sum(&v).unwrap();
        prop_assert!(sum.is_modular_unitary().unwrap());
        // spectral flow is additive over direct sums
        prop_assert_eq!(
            spectral_flow(&sum).unwrap(),
            spectral_flow(&u).unwrap() + spectral_flow(&v).unwrap()
        );
    }

    // index flow

    #[test]
    fn spectral_flow_closed_form((mu, nu) in distinct_lengths(3, 4)) {
        let sf = spectral_flow(&build_u_mu_nu(3, &mu, &nu).unwrap()).unwrap();
        prop_assert_eq!(sf.clone(), Scalar::rational(closed_form_flow(3, &mu, &nu)));
        prop_assert!(positive_rational(&sf));
        let swapped = spectral_flow(&build_u_mu_nu(3, &nu, &mu).unwrap()).unwrap();
        prop_assert_eq!(sf, swapped);
    }

    #[test]
    fn aps_traces_match_closed_form(mu in word(2, 4), nu in word(2, 4)) {
        let v = Element::monomial(2, mu.clone(), nu.clone()).unwrap();
        let (first, second) = aps_index_traces(&v).unwrap();
        let m = mu.len() as i64 - nu.len() as i64;
        prop_assert_eq!(first.clone(), Scalar::rational(rat_int(-m) * rat_pow(2, -(mu.len() as i64))));
        prop_assert_eq!(second.clone(), Scalar::rational(rat_int(m) * rat_pow(2, -(nu.len() as i64))));
        prop_assert_eq!(first + second, spectral_flow(&build_u_v(&v).unwrap()).unwrap());
    }

    // numerics

    #[test]
    fn zeroth_moment_is_the_spectral_flow((mu, nu) in distinct_lengths(2, 4)) {
        let u = build_u_mu_nu(2, &mu, &nu).unwrap();
        let x = projection_perturbation(&u).unwrap();
        prop_assert_eq!(Scalar::rational(x.zeroth_moment()), spectral_flow(&u).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inverse_sum_of_fixed_point_unitary_is_null_homotopic(mu in word(2, 3), nu in word(2, 3)) {
        prop_assume!(mu.len() == nu.len() && mu != nu);
        // the swap S_mu S_nu^* + S_nu S_mu^* + (1 - P_mu - P_nu) lives in F
        let swap = Element::monomial(2, mu.clone(), nu.clone()).unwrap()
            .try_add(&Element::monomial(2, nu.clone(), mu.clone()).unwrap()).unwrap()
            .try_add(&Element::one(2)).unwrap()
            .try_sub(&Element::range_projection(2, &mu).unwrap()).unwrap()
            .try_sub(&Element::range_projection(2, &nu).unwrap()).unwrap();
        let u = AlgMatrix::from_rows(vec![vec![swap]]).unwrap();
        prop_assert!(u.is_unitary().unwrap());
        let report = homotopy_path_check(inverse_sum_path(&u).unwrap(), 21).unwrap();
        prop_assert!(report.passed, "max defect {}", report.max_defect());
    }

    #[test]
    fn rotation_between_u_mu_nu_and_its_swap((mu, nu) in distinct_lengths(2, 3)) {
        let u = build_u_mu_nu(2, &mu, &nu).unwrap();
        let v = build_u_mu_nu(2, &nu, &mu).unwrap();
        let report = homotopy_path_check(rotation_path(&u, &v).unwrap(), 21).unwrap();
        prop_assert!(report.passed);
    }

    #[test]
    fn integral_formula_is_r_independent((mu, nu) in distinct_lengths(2, 3), r in 0.25f64..1.0) {
        let u = build_u_mu_nu(2, &mu, &nu).unwrap();
        let x = projection_perturbation(&u).unwrap();
        let cfg = SummationConfig::new(10_000);
        let at_r = sf_integral(&x, r, &cfg).unwrap();
        let at_half = sf_integral(&x, 0.5, &cfg).unwrap();
        prop_assert!((at_r - at_half).abs() < 1e-3);
        let exact = cuntz_core::scalar::rational_to_f64(&closed_form_flow(2, &mu, &nu));
        prop_assert!((at_r - exact).abs() < 1e-4);
    }
}

#[test]
fn doubling_the_cutoff_moves_the_limit_less_than_the_tolerance() {
    let schedule = [1.1, 1.05, 1.02, 1.01];
    let cfg = SummationConfig::new(50_000);
    let doubled = SummationConfig::new(100_000);
    let a = dixmier_limit(2, &schedule, &cfg).unwrap();
    let b = dixmier_limit(2, &schedule, &doubled).unwrap();
    // well inside the 1e-2 acceptance tolerance; the observed shift is ~1e-7
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn beta_constant_limit() {
    // (s-1)/2 C_{s/2} -> 1 as s -> 1+
    let errors: Vec<f64> = [1.1, 1.01, 1.001]
        .iter()
        .map(|&s| (beta_constant(s / 2.0).unwrap() * (s - 1.0) / 2.0 - 1.0).abs())
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 1e-3, "{errors:?}");
}
