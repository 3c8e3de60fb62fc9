//! Exact computation in the Cuntz algebra `O_n`: the dense polynomial
//! subalgebra with its gauge action, the KMS state and Tomita operators,
//! finite-rank endomorphisms over the fixed-point algebra, modular
//! unitaries, and the spectral-flow pairing with its numerical cross-checks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod endo;
pub mod error;
pub mod flow;
pub mod json;
pub mod k1;
pub mod modular;
pub mod numerics;
pub mod scalar;
pub mod suites;

pub use algebra::{parse, Element, Monomial, MultiIndex};
pub use endo::{phi_k_endo, EndoSum, RankOne};
pub use error::{CuntzError, Result};
pub use flow::{flow_report, spectral_flow, CheckReport, FlowReport};
pub use k1::{build_u_mu_nu, build_u_v, AlgMatrix};
pub use modular::{ModularContext, SigmaParam};
pub use numerics::{ProjectionPerturbation, Quadrature, SummationConfig};
pub use scalar::{Backend, QuadRational, Rational, Scalar};
pub use suites::Suite;
