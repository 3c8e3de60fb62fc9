//! Gauge and modular structure on `O_n`: the expectation onto the fixed-point
//! algebra, the trace and KMS state, the gauge generator `D`, and the Tomita
//! operators `S`, `F`, `J`, `Delta^z` with the modular automorphism.
//!
//! Every operator here acts diagonally on monomials, so all of them are
//! computed term by term. The inner product `<a, b> = psi(a^* b)` is linear in
//! the second slot.

use num_complex::Complex64;

use crate::algebra::Element;
use crate::error::{CuntzError, Result};
use crate::scalar::{rat_pow, Backend, QuadRational, Scalar};

/// Parameter of the modular automorphism group `sigma_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigmaParam {
    /// Real time; evaluated with complex doubles.
    Real(f64),
    /// `t = i`: the algebraic automorphism `sigma = Delta^{-1}`, exact.
    ImaginaryUnit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularContext {
    n: u32,
    log_n: f64,
}

impl ModularContext {
    pub fn new(n: u32) -> Self {
        assert!(n >= 2, "the Cuntz algebra needs n >= 2");
        ModularContext {
            n,
            log_n: (n as f64).ln(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    fn check(&self, a: &Element) -> Result<()> {
        if a.n() == self.n {
            Ok(())
        } else {
            Err(CuntzError::Usage(format!(
                "element of O_{} passed to a context for O_{}",
                a.n(),
                self.n
            )))
        }
    }

    /// `Phi_k`: the terms of gauge degree `k`.
    pub fn gauge_component(&self, a: &Element, k: i64) -> Element {
        a.filter_terms(|m| m.degree() == k)
    }

    /// `Phi`, the expectation onto the fixed-point algebra.
    pub fn expectation(&self, a: &Element) -> Element {
        self.gauge_component(a, 0)
    }

    /// True iff `Phi(a) == a` semantically, i.e. `a` lies in `F`.
    pub fn is_in_fixed_point_algebra(&self, a: &Element) -> Result<bool> {
        a.filter_terms(|m| m.degree() != 0).is_zero()
    }

    /// The trace on `F`: `tau(S_mu S_nu^*) = delta_{mu,nu} n^{-|mu|}`.
    ///
    /// Rejects elements with a nonzero-degree component.
    pub fn trace_f(&self, f: &Element) -> Result<Scalar> {
        self.check(f)?;
        if !self.is_in_fixed_point_algebra(f)? {
            return Err(CuntzError::Domain(format!(
                "trace_F is defined on degree-0 elements only; got {}",
                f.render()
            )));
        }
        Ok(self.trace_degree_zero_terms(f))
    }

    fn trace_degree_zero_terms(&self, a: &Element) -> Scalar {
        let mut acc = Scalar::zero(a.backend());
        let backend = a.backend();
        for (m, c) in a.terms() {
            if m.mu == m.nu {
                let weight = Scalar::rational(rat_pow(self.n, -(m.mu.len() as i64)));
                let weight = match backend {
                    Backend::Exact => weight,
                    Backend::Numeric => weight.to_numeric(),
                };
                acc = acc + c * &weight;
            }
        }
        acc
    }

    /// The KMS state `psi = tau o Phi`.
    pub fn state_psi(&self, a: &Element) -> Scalar {
        debug_assert_eq!(a.n(), self.n);
        self.trace_degree_zero_terms(a)
    }

    /// `<a, b> = psi(a^* b)`.
    pub fn inner_product(&self, a: &Element, b: &Element) -> Result<Scalar> {
        self.check(a)?;
        Ok(self.state_psi(&a.adjoint().try_mul(b)?))
    }

    /// `[D, a]`: each monomial scaled by its gauge degree. Also the vector
    /// action `D(a)`.
    pub fn commutator_d(&self, a: &Element) -> Element {
        let backend = a.backend();
        a.map_terms(|m, c| (m.clone(), c * &Scalar::from_int(m.degree(), backend)))
    }

    /// `Delta^z(S_mu S_nu^*) = n^{z(|nu|-|mu|)} S_mu S_nu^*`.
    ///
    /// Exact elements need `z` in `1/2 Z`; numeric elements accept any complex `z`.
    pub fn delta_power(&self, a: &Element, z: &Scalar) -> Result<Element> {
        self.check(a)?;
        match a.backend() {
            Backend::Exact => {
                let half = z.as_exact().and_then(QuadRational::as_half_integer).ok_or_else(|| {
                    CuntzError::Backend(format!(
                        "Delta^z with z = {z} is not exact; z must lie in (1/2)Z for the exact backend"
                    ))
                })?;
                Ok(self.delta_half_power(a, half))
            }
            Backend::Numeric => {
                let z = z.to_complex();
                let log_n = self.log_n;
                Ok(a.map_terms(|m, c| {
                    let factor = (z * (-(m.degree() as f64)) * log_n).exp();
                    (m.clone(), c * &Scalar::Numeric(factor))
                }))
            }
        }
    }

    /// `Delta^{k/2}` on an exact element.
    pub fn delta_half_power(&self, a: &Element, k: i64) -> Element {
        let n = self.n;
        match a.backend() {
            Backend::Exact => a.map_terms(|m, c| {
                let factor = QuadRational::sqrt_pow(n, -k * m.degree());
                (m.clone(), c * &Scalar::Exact(factor))
            }),
            Backend::Numeric => {
                let log_n = self.log_n;
                a.map_terms(|m, c| {
                    let factor = (-(k as f64) * 0.5 * m.degree() as f64 * log_n).exp();
                    (m.clone(), c * &Scalar::complex(factor, 0.0))
                })
            }
        }
    }

    /// `Delta(a)`.
    pub fn delta(&self, a: &Element) -> Element {
        self.delta_half_power(a, 2)
    }

    /// `J(S_mu S_nu^*) = n^{(|mu|-|nu|)/2} S_nu S_mu^*`, conjugate-linear.
    pub fn modular_conjugation_j(&self, a: &Element) -> Element {
        self.flip_scaled(a, 1)
    }

    /// `S(a) = a^*`.
    pub fn tomita_s(&self, a: &Element) -> Element {
        a.adjoint()
    }

    /// `F(S_mu S_nu^*) = n^{|mu|-|nu|} S_nu S_mu^*`, conjugate-linear.
    pub fn tomita_f(&self, a: &Element) -> Element {
        self.flip_scaled(a, 2)
    }

    /// `c S_mu S_nu^* -> conj(c) sqrt(n)^{k deg} S_nu S_mu^*`.
    fn flip_scaled(&self, a: &Element, k: i64) -> Element {
        let n = self.n;
        let log_n = self.log_n;
        a.map_terms(|m, c| {
            let factor = match c.backend() {
                Backend::Exact => Scalar::Exact(QuadRational::sqrt_pow(n, k * m.degree())),
                Backend::Numeric => Scalar::complex((0.5 * (k * m.degree()) as f64 * log_n).exp(), 0.0),
            };
            (m.adjoint(), &c.conj() * &factor)
        })
    }

    /// The modular automorphism `sigma_t`.
    ///
    /// Real `t` returns a numeric element; [`SigmaParam::ImaginaryUnit`] is
    /// `Delta^{-1}`, exact on exact input.
    pub fn sigma(&self, a: &Element, t: SigmaParam) -> Element {
        match t {
            SigmaParam::ImaginaryUnit => self.delta_half_power(a, -2),
            SigmaParam::Real(t) => {
                let log_n = self.log_n;
                a.to_numeric().map_terms(|m, c| {
                    // n^{it(|nu|-|mu|)} = exp(-i t deg ln n)
                    let phase = Complex64::new(0.0, -t * m.degree() as f64 * log_n).exp();
                    (m.clone(), c * &Scalar::Numeric(phase))
                })
            }
        }
    }

    /// `sigma = Delta^{-1}`, multiplying degree-`d` terms by `n^d`.
    pub fn sigma_i(&self, a: &Element) -> Element {
        self.sigma(a, SigmaParam::ImaginaryUnit)
    }

    /// `sigma^{-1} = Delta`.
    pub fn sigma_inverse(&self, a: &Element) -> Element {
        self.delta(a)
    }
}
