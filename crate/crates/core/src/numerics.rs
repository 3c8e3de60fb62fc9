//! Floating-point confirmations of the analytic limits: the Dixmier-type
//! limit of `(s-1) tau_Delta((1+D^2)^{-s/2})`, the beta constant, the
//! integral formula for spectral flow, and the eta integrand.
//!
//! Exact inputs are converted to `f64` at the boundary. Sums over `k` run in
//! a fixed order, so results are reproducible bit for bit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::algebra::Element;
use crate::error::{CuntzError, Result};
use crate::modular::ModularContext;
use crate::scalar::{rational_to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    /// Composite midpoint rule, panels doubled until two estimates agree.
    Midpoint,
    /// Adaptive Simpson.
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummationConfig {
    /// Sum over `|k| <= cutoff`.
    pub cutoff: u64,
    pub tail_correction: bool,
    pub quadrature: Quadrature,
    /// Absolute tolerance for the quadrature.
    pub tolerance: f64,
}

impl SummationConfig {
    pub fn new(cutoff: u64) -> Self {
        SummationConfig {
            cutoff,
            tail_correction: true,
            quadrature: Quadrature::Midpoint,
            tolerance: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 1 {
            return Err(CuntzError::Usage("cutoff must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(CuntzError::Usage(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        match self.quadrature {
            Quadrature::Midpoint => midpoint(f, a, b, self.tolerance),
            Quadrature::Adaptive => adaptive_simpson(f, a, b, self.tolerance),
        }
    }
}

/// `X = sum_j c_j Q_j` for pairwise orthogonal projections `Q_j` over `F`,
/// recorded as the pairs `(c_j, tau(Q_j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionPerturbation {
    components: Vec<(Rational, Rational)>,
}

impl ProjectionPerturbation {
    pub fn new(components: Vec<(Rational, Rational)>) -> Result<Self> {
        use num_traits::{One, Zero};
        for (c, w) in &components {
            if c.is_zero() {
                return Err(CuntzError::Domain("projection coefficients must be nonzero".into()));
            }
            if !(w > &Rational::zero() && w <= &Rational::one()) {
                return Err(CuntzError::Domain(format!("projection weight {w} is outside (0, 1]")));
            }
        }
        Ok(ProjectionPerturbation { components })
    }

    pub fn components(&self) -> &[(Rational, Rational)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `sum_j c_j w_j`.
    pub fn zeroth_moment(&self) -> Rational {
        self.components.iter().map(|(c, w)| c * w).sum()
    }
}

/// `C_s = integral over R of (1+x^2)^{-s} = sqrt(pi) Gamma(s-1/2) / Gamma(s)`.
pub fn beta_constant(s: f64) -> Result<f64> {
    if !(s > 0.5) {
        return Err(CuntzError::Domain(format!(
            "the integral of (1+x^2)^(-s) diverges for s = {s} <= 1/2"
        )));
    }
    Ok(PI.sqrt() * (ln_gamma(s - 0.5) - ln_gamma(s)).exp())
}

/// `integral_{lower}^inf (1+x^2)^{-p} dx` for `lower >= 1`, `p > 1/2`.
///
/// The leading term `lower^{1-2p}/(2p-1)` is exact; the remainder, after
/// `x = lower / w`, is integrated adaptively on `(0, 1]`.
pub fn tail_integral(lower: f64, p: f64) -> Result<f64> {
    if !(lower >= 1.0) || !(p > 0.5) {
        return Err(CuntzError::Usage(format!("tail integral needs lower >= 1 and p > 1/2 (got {lower}, {p})")));
    }
    let leading = lower.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
    let inv_sq = 1.0 / (lower * lower);
    let correction = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        // (1 + w^2/L^2)^{-p} - 1, without cancellation
        w.powf(2.0 * p - 2.0) * (-p * (w * w * inv_sq).ln_1p()).exp_m1()
    };
    let remainder = adaptive_simpson(correction, 0.0, 1.0, 1e-14 * leading.max(f64::MIN_POSITIVE))?;
    Ok(leading + lower.powf(1.0 - 2.0 * p) * remainder)
}

fn symmetric_sum(cutoff: u64, p: f64, shift: f64) -> f64 {
    // largest terms last
    let mut acc = 0.0;
    for k in (1..=cutoff).rev() {
        let k = k as f64;
        acc += (1.0 + (k + shift).powi(2)).powf(-p) + (1.0 + (-k + shift).powi(2)).powf(-p);
    }
    acc + (1.0 + shift * shift).powf(-p)
}

/// `(s-1) [sum_{|k| <= K} (1+k^2)^{-s/2} + 2 integral_K^inf (1+x^2)^{-s/2}]`,
/// the tail only when configured.
pub fn dixmier_term(s: f64, cfg: &SummationConfig) -> Result<f64> {
    cfg.validate()?;
    if !(s > 1.0) {
        return Err(CuntzError::Domain(format!("the zeta-type sum diverges at s = {s} <= 1")));
    }
    let p = s / 2.0;
    let mut total = symmetric_sum(cfg.cutoff, p, 0.0);
    if cfg.tail_correction {
        total += 2.0 * tail_integral(cfg.cutoff as f64, p)?;
    }
    Ok((s - 1.0) * total)
}

/// `lim_{s -> 1+} (s-1) tau_Delta((1+D^2)^{-s/2})`, by linear least squares
/// in `s-1` over the schedule, evaluated at `s = 1`. The exact limit is 2.
///
/// A one-point schedule returns the raw value at that `s`.
pub fn dixmier_limit(n: u32, s_schedule: &[f64], cfg: &SummationConfig) -> Result<f64> {
    if n < 2 {
        return Err(CuntzError::Usage(format!("n must be at least 2, got {n}")));
    }
    if cfg.cutoff < 1000 {
        return Err(CuntzError::Usage(format!("cutoff must be at least 1000, got {}", cfg.cutoff)));
    }
    if s_schedule.is_empty() {
        return Err(CuntzError::Usage("empty s schedule".into()));
    }
    if let Some(s) = s_schedule.iter().find(|&&s| !(s > 1.0 && s <= 2.0)) {
        return Err(CuntzError::Domain(format!("s = {s} is outside (1, 2]")));
    }
    let points = s_schedule
        .iter()
        .map(|&s| Ok((s - 1.0, dixmier_term(s, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(linear_intercept(&points))
}

/// [`dixmier_limit`] for `pi(f) (1+D^2)^{-s/2}` with `f` in `F`, which
/// scales every level by `tau(f)`; the limit is `2 tau(f)`.
pub fn dixmier_limit_weighted(f: &Element, s_schedule: &[f64], cfg: &SummationConfig) -> Result<f64> {
    let ctx = ModularContext::new(f.n());
    let weight = rational_to_f64(&ctx.trace_f(f)?.expect_rational()?);
    Ok(weight * dixmier_limit(f.n(), s_schedule, cfg)?)
}

/// Intercept at `x = 0` of the least-squares line through `points`.
fn linear_intercept(points: &[(f64, f64)]) -> f64 {
    if points.len() == 1 {
        return points[0].1;
    }
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return mean_y;
    }
    mean_y - (sxy / sxx) * mean_x
}

/// `sum_{k in Z} (1+(k+a)^2)^{-p}`, truncated at `|k| <= K` with integral
/// tails from `K + 1/2` when configured.
fn shifted_sum(a: f64, p: f64, cfg: &SummationConfig) -> Result<f64> {
    let mut total = symmetric_sum(cfg.cutoff, p, a);
    if cfg.tail_correction {
        let edge = cfg.cutoff as f64 + 0.5;
        total += tail_integral(edge + a, p)? + tail_integral(edge - a, p)?;
    }
    Ok(total)
}

/// `(1/C_{1/2+r}) integral_0^1 sum_j c_j w_j sum_k (1+(k+t c_j)^2)^{-1/2-r} dt`.
///
/// For integer `c_j` the `t`-integral of the full sum is exactly
/// `C_{1/2+r}`, so the value tends to `sum_j c_j w_j` as `K` grows.
pub fn sf_integral(x: &ProjectionPerturbation, r: f64, cfg: &SummationConfig) -> Result<f64> {
    cfg.validate()?;
    if !(r > 0.0) {
        return Err(CuntzError::Domain(format!("r must be positive, got {r}")));
    }
    if x.is_empty() {
        return Err(CuntzError::Domain("empty projection perturbation".into()));
    }
    let p = 0.5 + r;
    let norm = beta_constant(p)?;
    let mut total = 0.0;
    for (c, w) in x.components() {
        let (c, w) = (rational_to_f64(c), rational_to_f64(w));
        if cfg.tail_correction && (cfg.cutoff as f64 + 0.5 - c.abs()) < 1.0 {
            return Err(CuntzError::Usage("cutoff too small for the coefficient size".into()));
        }
        // the integrand is evaluated through a fallible helper; keep the
        // first error
        let failure = std::cell::RefCell::new(None);
        let value = cfg.integrate(
            |t| match shifted_sum(t * c, p, cfg) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            1.0,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        total += c * w * value?;
    }
    Ok(total / norm)
}

/// `eta_eps(D) = (1/sqrt(pi)) integral_eps^inf sum_k k e^{-t k^2} t^{-1/2} dt`.
///
/// The truncated integral is evaluated and must be below `1e-14` in
/// magnitude; the returned value is then exactly `0.0`, the `k <-> -k`
/// symmetry making the exact integrand vanish.
pub fn eta_numeric(epsilon: f64, cfg: &SummationConfig) -> Result<f64> {
    cfg.validate()?;
    let value = eta_truncated(epsilon, cfg)?;
    if value.abs() >= 1e-14 {
        return Err(CuntzError::Numeric(format!("eta integral is {value:e}, not below 1e-14")));
    }
    Ok(0.0)
}

/// The truncated eta integral before rounding to zero.
pub fn eta_truncated(epsilon: f64, cfg: &SummationConfig) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(CuntzError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let cutoff = cfg.cutoff as i64;
    let integrand = |t: f64| {
        let mut acc = 0.0;
        for k in -cutoff..=cutoff {
            let k = k as f64;
            acc += k * (-t * k * k).exp();
        }
        acc / t.sqrt()
    };
    // e^{-t} < 1e-30 beyond t = 70
    let upper = epsilon.max(70.0);
    Ok(cfg.integrate(integrand, epsilon, upper)? / PI.sqrt())
}

/// `sum_{k=1}^{K} k e^{-t k^2}`, a control that does not vanish.
pub fn one_sided_heat_sum(t: f64, cutoff: u64) -> f64 {
    (1..=cutoff).rev().map(|k| k as f64 * (-t * (k * k) as f64).exp()).sum()
}

/// Composite midpoint rule on `[a, b]`, doubling panels from 16 until two
/// successive estimates agree to `tol` (at most `2^20` panels).
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let estimate = |panels: usize| {
        let h = (b - a) / panels as f64;
        (0..panels).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    };
    let mut panels = 16;
    let mut prev = estimate(panels);
    while panels < 1 << 20 {
        panels *= 2;
        let next = estimate(panels);
        if !next.is_finite() {
            return Err(CuntzError::Numeric("midpoint rule produced a non-finite value".into()));
        }
        if (next - prev).abs() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(CuntzError::Numeric(format!("midpoint rule did not reach tolerance {tol:e}")))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if !delta.is_finite() {
            return Err(CuntzError::Numeric("adaptive Simpson hit a non-finite value".into()));
        }
        if depth == 0 {
            return Err(CuntzError::Numeric(format!("adaptive Simpson did not reach tolerance {tol:e}")));
        }
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(recurse(f, (a, fa), (lm, flm), (m, fm), left, tol / 2.0, depth - 1)?
            + recurse(f, (m, fm), (rm, frm), (b, fb), right, tol / 2.0, depth - 1)?)
    }
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, (a, fa), (m, fm), (b, fb), whole, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse;
    use crate::scalar::rat;

    fn cfg(cutoff: u64) -> SummationConfig {
        SummationConfig::new(cutoff)
    }

    #[test]
    fn beta_constant_values() {
        assert!((beta_constant(1.0).unwrap() - PI).abs() < 1e-14);
        assert!((beta_constant(1.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(beta_constant(0.5).is_err());
        assert!(beta_constant(0.2).is_err());
    }

    #[test]
    fn beta_constant_matches_quadrature() {
        // substitute x = tan(u): integral of cos(u)^{2s-2} over (-pi/2, pi/2)
        for s in [1.0, 1.5, 2.0, 2.5, 3.5] {
            let direct = adaptive_simpson(|u: f64| u.cos().powf(2.0 * s - 2.0), -PI / 2.0, PI / 2.0, 1e-13).unwrap();
            let rel = (beta_constant(s).unwrap() - direct).abs() / direct;
            assert!(rel < 1e-10, "s = {s}: {rel:e}");
        }
    }

    #[test]
    fn tail_integral_closed_form() {
        // p = 1: integral_L^inf dx/(1+x^2) = pi/2 - atan(L)
        for lower in [1.0, 10.0, 1e4] {
            let exact = PI / 2.0 - f64::atan(lower);
            let got = tail_integral(lower, 1.0).unwrap();
            assert!((got - exact).abs() / exact < 1e-12, "{lower}");
        }
        // p = 3/2: 1 - L/sqrt(1+L^2)
        let exact = 1.0 - 10.0 / 101f64.sqrt();
        assert!((tail_integral(10.0, 1.5).unwrap() - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn single_point_is_raw_value() {
        // sum_k 1/(1+k^2) = pi coth(pi)
        let coth = 1.0 / PI.tanh();
        let mut c = cfg(10_000);
        c.tail_correction = false;
        let v = dixmier_limit(2, &[2.0], &c).unwrap();
        assert!((v - PI * coth).abs() < 3e-4, "{v}");
        // the integral tail from K overshoots the sum tail by about 1/K^2
        let v = dixmier_limit(2, &[2.0], &cfg(10_000)).unwrap();
        assert!((v - PI * coth).abs() < 2e-8, "{v}");
    }

    #[test]
    fn dixmier_limit_is_two() {
        let v = dixmier_limit(2, &[1.1, 1.05, 1.02, 1.01], &cfg(100_000)).unwrap();
        assert!((v - 2.0).abs() < 1e-2, "{v}");
    }

    #[test]
    fn weighted_dixmier_limit() {
        let f = parse("S[1].S[1]'", 2).unwrap();
        let v = dixmier_limit_weighted(&f, &[1.1, 1.05, 1.02, 1.01], &cfg(100_000)).unwrap();
        assert!((v - 1.0).abs() < 1e-2, "{v}");
    }

    #[test]
    fn dixmier_rejects_divergent_schedule() {
        assert!(matches!(dixmier_limit(2, &[1.0], &cfg(1000)), Err(CuntzError::Domain(_))));
        assert!(matches!(dixmier_limit(2, &[0.5, 1.1], &cfg(1000)), Err(CuntzError::Domain(_))));
        assert!(dixmier_limit(2, &[1.1], &cfg(10)).is_err());
    }

    #[test]
    fn sf_integral_examples() {
        let x = ProjectionPerturbation::new(vec![(rat(-1, 1), rat(1, 4)), (rat(1, 1), rat(1, 2))]).unwrap();
        let v = sf_integral(&x, 0.5, &cfg(10_000)).unwrap();
        assert!((v - 0.25).abs() < 1e-4, "{v}");
        let x = ProjectionPerturbation::new(vec![(rat(-1, 1), rat(1, 9)), (rat(1, 1), rat(1, 3))]).unwrap();
        let v = sf_integral(&x, 1.0, &cfg(10_000)).unwrap();
        assert!((v - 2.0 / 9.0).abs() < 1e-4, "{v}");
        let empty = ProjectionPerturbation::new(vec![]).unwrap();
        assert!(sf_integral(&empty, 0.5, &cfg(100)).is_err());
        assert!(sf_integral(&x, 0.0, &cfg(100)).is_err());
    }

    #[test]
    fn sf_integral_quadratures_agree() {
        let x = ProjectionPerturbation::new(vec![(rat(-2, 1), rat(1, 8)), (rat(2, 1), rat(1, 2))]).unwrap();
        let mut c = cfg(2000);
        let mid = sf_integral(&x, 0.5, &c).unwrap();
        c.quadrature = Quadrature::Adaptive;
        c.tolerance = 1e-9;
        let ada = sf_integral(&x, 0.5, &c).unwrap();
        assert!((mid - ada).abs() < 1e-7);
        assert!((mid - 0.75).abs() < 1e-3, "{mid}");
    }

    #[test]
    fn perturbation_invariants() {
        assert!(ProjectionPerturbation::new(vec![(rat(0, 1), rat(1, 2))]).is_err());
        assert!(ProjectionPerturbation::new(vec![(rat(1, 1), rat(3, 2))]).is_err());
        let x = ProjectionPerturbation::new(vec![(rat(-1, 1), rat(1, 4)), (rat(1, 1), rat(1, 2))]).unwrap();
        assert_eq!(x.zeroth_moment(), rat(1, 4));
    }

    #[test]
    fn eta_vanishes() {
        for eps in [0.1, 1.0] {
            let mut c = cfg(100);
            c.quadrature = Quadrature::Adaptive;
            assert_eq!(eta_numeric(eps, &c).unwrap(), 0.0);
            assert!(eta_truncated(eps, &c).unwrap().abs() < 1e-14);
        }
        assert!(eta_numeric(0.0, &cfg(100)).is_err());
        assert!(eta_numeric(-1.0, &cfg(100)).is_err());
    }

    #[test]
    fn one_sided_control() {
        assert!((one_sided_heat_sum(1.0, 1) - (-1f64).exp()).abs() < 1e-16);
        // e^{-1} + 2e^{-4} + 3e^{-9} + ..., summed independently
        let mut oracle = 0.0;
        for k in 1..=100u32 {
            oracle += k as f64 * (-(k as f64).powi(2)).exp();
        }
        assert!((one_sided_heat_sum(1.0, 100) - oracle).abs() < 1e-15);
        assert!((one_sided_heat_sum(1.0, 100) - 0.404_881_398_571).abs() < 1e-9);
    }

    #[test]
    fn quadrature_helpers() {
        // 2 pi I_0(1)
        let m = midpoint(|x: f64| x.cos().exp(), 0.0, 2.0 * PI, 1e-12).unwrap();
        assert!((m - 7.954_926_521_012_845).abs() < 1e-12);
        let s = adaptive_simpson(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-13).unwrap();
        assert!((s - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn config_serializes() {
        let text = serde_json::to_string(&cfg(1000)).unwrap();
        assert_eq!(text, r#"{"cutoff":1000,"tail_correction":true,"quadrature":"midpoint","tolerance":1e-10}"#);
        let back: SummationConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg(1000));
    }
}
