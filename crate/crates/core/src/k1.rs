//! Square matrices over `O_n`, unitarity and the modular condition, the
//! unitaries `u_{mu,nu}` and `u_v`, and sampled homotopies of modular
//! unitaries.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::algebra::{parse, Element, MultiIndex};
use crate::error::{CuntzError, Result};
use crate::modular::ModularContext;
use crate::scalar::{Backend, Scalar};

/// Defect bound for numeric samples. Exact samples must have defect 0.
pub const NUMERIC_TOLERANCE: f64 = 1e-12;

/// A `k x k` matrix over `O_n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgMatrix {
    n: u32,
    backend: Backend,
    dim: usize,
    entries: Vec<Element>,
}

impl AlgMatrix {
    pub fn from_rows(rows: Vec<Vec<Element>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(CuntzError::Usage("a matrix needs at least one row".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(CuntzError::Usage(format!("matrix is not square ({dim} rows)")));
        }
        let first = rows[0][0].clone();
        for e in rows.iter().flatten() {
            first.check_compatible(e)?;
        }
        Ok(AlgMatrix {
            n: first.n(),
            backend: first.backend(),
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: u32, dim: usize, backend: Backend) -> Self {
        Self::scalar_diagonal(n, dim, Scalar::one(backend))
    }

    pub fn zero(n: u32, dim: usize, backend: Backend) -> Self {
        AlgMatrix {
            n,
            backend,
            dim,
            entries: vec![Element::zero_with(n, backend); dim * dim],
        }
    }

    fn scalar_diagonal(n: u32, dim: usize, c: Scalar) -> Self {
        let mut m = Self::zero(n, dim, c.backend());
        for i in 0..dim {
            m.entries[i * dim + i] = Element::scalar(n, c.clone());
        }
        m
    }

    /// Matrix with scalar entries, every entry a multiple of the unit.
    pub fn from_scalars(n: u32, rows: &[Vec<Scalar>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|c| Element::scalar(n, c.clone())).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Element]> {
        self.entries.chunks(self.dim)
    }

    pub fn diagonal(&self) -> impl Iterator<Item = &Element> {
        (0..self.dim).map(move |i| self.entry(i, i))
    }

    fn check_shape(&self, other: &AlgMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(CuntzError::Usage(format!(
                "shape mismatch: {0}x{0} and {1}x{1}",
                self.dim, other.dim
            )));
        }
        if self.n != other.n || self.backend != other.backend {
            return Err(CuntzError::Usage(format!(
                "matrices over O_{} ({}) and O_{} ({}) cannot be combined",
                self.n, self.backend, other.n, other.backend
            )));
        }
        Ok(())
    }

    pub fn map_entries(&self, f: impl Fn(&Element) -> Element) -> AlgMatrix {
        let entries: Vec<Element> = self.entries.iter().map(f).collect();
        let backend = entries.first().map(Element::backend).unwrap_or(self.backend);
        AlgMatrix {
            n: self.n,
            backend,
            dim: self.dim,
            entries,
        }
    }

    pub fn to_numeric(&self) -> AlgMatrix {
        self.map_entries(Element::to_numeric)
    }

    pub fn try_mul(&self, rhs: &AlgMatrix) -> Result<AlgMatrix> {
        self.check_shape(rhs)?;
        let k = self.dim;
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = Element::zero_with(self.n, self.backend);
                for l in 0..k {
                    let (a, b) = (self.entry(i, l), rhs.entry(l, j));
                    if a.is_structurally_zero() || b.is_structurally_zero() {
                        continue;
                    }
                    acc = acc.try_add(&a.try_mul(b)?)?;
                }
                out.push(acc);
            }
        }
        Ok(AlgMatrix {
            entries: out,
            ..self.clone_shape()
        })
    }

    pub fn try_add(&self, rhs: &AlgMatrix) -> Result<AlgMatrix> {
        self.zip_with(rhs, Element::try_add)
    }

    pub fn try_sub(&self, rhs: &AlgMatrix) -> Result<AlgMatrix> {
        self.zip_with(rhs, Element::try_sub)
    }

    fn zip_with(
        &self,
        rhs: &AlgMatrix,
        f: impl Fn(&Element, &Element) -> Result<Element>,
    ) -> Result<AlgMatrix> {
        self.check_shape(rhs)?;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgMatrix {
            entries,
            ..self.clone_shape()
        })
    }

    fn clone_shape(&self) -> AlgMatrix {
        AlgMatrix {
            n: self.n,
            backend: self.backend,
            dim: self.dim,
            entries: Vec::new(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<AlgMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.try_scale(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgMatrix {
            entries,
            ..self.clone_shape()
        })
    }

    /// Transpose with entry-wise adjoint.
    pub fn adjoint(&self) -> AlgMatrix {
        let k = self.dim;
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(self.entry(j, i).adjoint());
            }
        }
        AlgMatrix {
            entries,
            ..self.clone_shape()
        }
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &AlgMatrix) -> Result<AlgMatrix> {
        if self.n != other.n || self.backend != other.backend {
            return Err(CuntzError::Usage("direct sum of matrices over different algebras".into()));
        }
        let k = self.dim + other.dim;
        let mut out = AlgMatrix::zero(self.n, k, self.backend);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[i * k + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out.entries[(self.dim + i) * k + self.dim + j] = other.entry(i, j).clone();
            }
        }
        Ok(out)
    }

    /// Kronecker product `R ⊗ I_k` for a scalar matrix `R`.
    fn scalar_kron(n: u32, r: &[[Complex64; 2]; 2], k: usize) -> AlgMatrix {
        let dim = 2 * k;
        let mut out = AlgMatrix::zero(n, dim, Backend::Numeric);
        for (bi, row) in r.iter().enumerate() {
            for (bj, c) in row.iter().enumerate() {
                for i in 0..k {
                    out.entries[(bi * k + i) * dim + bj * k + i] = Element::scalar(n, Scalar::Numeric(*c));
                }
            }
        }
        out
    }

    pub fn sem_eq(&self, other: &AlgMatrix) -> Result<bool> {
        Ok(self.try_sub(other)?.defect()? == 0.0)
    }

    /// Largest entry defect.
    pub fn defect(&self) -> Result<f64> {
        self.entries
            .iter()
            .map(Element::defect)
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
    }

    pub fn is_self_adjoint(&self) -> Result<bool> {
        self.sem_eq(&self.adjoint())
    }

    /// `max(defect(U U^* - I), defect(U^* U - I))`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let id = AlgMatrix::identity(self.n, self.dim, self.backend);
        let u_star = self.adjoint();
        let left = self.try_mul(&u_star)?.try_sub(&id)?.defect()?;
        let right = u_star.try_mul(self)?.try_sub(&id)?.defect()?;
        Ok(left.max(right))
    }

    pub fn is_unitary(&self) -> Result<bool> {
        Ok(within_tolerance(self.unitarity_defect()?, self.backend))
    }

    /// Entry-wise `sigma = Delta^{-1}`.
    pub fn apply_sigma(&self) -> AlgMatrix {
        let ctx = ModularContext::new(self.n);
        self.map_entries(|e| ctx.sigma_i(e))
    }

    /// Largest coefficient of the nonzero-degree parts of `U sigma(U^*)` and
    /// `U^* sigma(U)`.
    pub fn modular_defect(&self) -> Result<f64> {
        Ok(self.modular_obstruction()?.1)
    }

    /// The first nonzero-degree entry of `U sigma(U^*)` or `U^* sigma(U)`,
    /// if any, with the overall defect.
    fn modular_obstruction(&self) -> Result<(Option<ModularObstruction>, f64)> {
        let u_star = self.adjoint();
        let products = [
            ("U.sigma(U*)", self.try_mul(&u_star.apply_sigma())?),
            ("U*.sigma(U)", u_star.try_mul(&self.apply_sigma())?),
        ];
        let mut worst = 0.0f64;
        let mut first = None;
        for (label, product) in products {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let off = product.entry(i, j).filter_terms(|m| m.degree() != 0);
                    if off.is_zero()? {
                        continue;
                    }
                    let off = off.canonical_form()?;
                    let d = off.terms().map(|(_, c)| c.magnitude()).fold(0.0, f64::max);
                    if d > 0.0 && first.is_none() {
                        first = Some(ModularObstruction {
                            product: label.to_string(),
                            row: i,
                            col: j,
                            off_degree_part: off.render(),
                            defect: d,
                        });
                    }
                    worst = worst.max(d);
                }
            }
        }
        Ok((first, worst))
    }

    /// Unitary, with `U sigma(U^*)` and `U^* sigma(U)` over `F`.
    pub fn is_modular_unitary(&self) -> Result<bool> {
        Ok(self.is_unitary()? && within_tolerance(self.modular_defect()?, self.backend))
    }

    pub fn to_grammar_rows(&self) -> Vec<Vec<String>> {
        self.rows().map(|r| r.iter().map(Element::render).collect()).collect()
    }

    pub fn from_grammar_rows<S: AsRef<str>>(rows: &[Vec<S>], n: u32) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse(s.as_ref(), n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        // a single numeric entry promotes the whole matrix
        let numeric = parsed.iter().flatten().any(|e| e.backend() == Backend::Numeric);
        let parsed = if numeric {
            parsed
                .into_iter()
                .map(|r| r.into_iter().map(|e| e.to_numeric()).collect())
                .collect()
        } else {
            parsed
        };
        Self::from_rows(parsed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string arrays always serialize")
    }

    pub fn from_json(text: &str, n: u32) -> Result<Self> {
        let rows: Vec<Vec<String>> = serde_json::from_str(text)
            .map_err(|e| CuntzError::Usage(format!("matrix JSON: {e}")))?;
        Self::from_grammar_rows(&rows, n)
    }
}

impl Serialize for AlgMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for row in self.to_grammar_rows() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl fmt::Display for AlgMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_grammar_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn within_tolerance(defect: f64, backend: Backend) -> bool {
    match backend {
        Backend::Exact => defect == 0.0,
        Backend::Numeric => defect < NUMERIC_TOLERANCE,
    }
}

/// Where the modular condition breaks.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ModularObstruction {
    pub product: String,
    pub row: usize,
    pub col: usize,
    pub off_degree_part: String,
    pub defect: f64,
}

/// `u_{mu,nu} = [[1 - P_mu, S_mu S_nu^*], [S_nu S_mu^*, 1 - P_nu]]`.
pub fn build_u_mu_nu(n: u32, mu: &MultiIndex, nu: &MultiIndex) -> Result<AlgMatrix> {
    let one = Element::one(n);
    let p_mu = Element::range_projection(n, mu)?;
    let p_nu = Element::range_projection(n, nu)?;
    let off = Element::monomial(n, mu.clone(), nu.clone())?;
    AlgMatrix::from_rows(vec![
        vec![one.try_sub(&p_mu)?, off.clone()],
        vec![off.adjoint(), one.try_sub(&p_nu)?],
    ])
}

/// `u_v = [[1 - v^*v, v^*], [v, 1 - vv^*]]`, after checking that `v^*v`
/// and `vv^*` are projections in `F` and that `v sigma(v^*)`, `v^* sigma(v)`
/// lie in `F`.
pub fn build_u_v(v: &Element) -> Result<AlgMatrix> {
    let n = v.n();
    let ctx = ModularContext::new(n);
    let v_adj = v.adjoint();
    let source = v_adj.try_mul(v)?;
    let range = v.try_mul(&v_adj)?;
    for (name, p) in [("v*v", &source), ("vv*", &range)] {
        if !p.try_mul(p)?.sem_eq(p)? {
            return Err(CuntzError::Domain(format!("{name} = {} is not a projection", p.render())));
        }
        if !ctx.is_in_fixed_point_algebra(p)? {
            return Err(CuntzError::Domain(format!("{name} = {} does not lie in F", p.render())));
        }
    }
    let twisted = [
        ("v.sigma(v*)", v.try_mul(&ctx.sigma_i(&v_adj))?),
        ("v*.sigma(v)", v_adj.try_mul(&ctx.sigma_i(v))?),
    ];
    for (name, x) in &twisted {
        if !ctx.is_in_fixed_point_algebra(x)? {
            return Err(CuntzError::Domain(format!("{name} = {} does not lie in F", x.render())));
        }
    }
    let one = Element::scalar(n, Scalar::one(v.backend()));
    AlgMatrix::from_rows(vec![
        vec![one.try_sub(&source)?, v_adj.clone()],
        vec![v.clone(), one.try_sub(&range)?],
    ])
}

/// One sample of a homotopy check.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct HomotopySample {
    pub t: f64,
    pub unitarity_defect: f64,
    pub modular_defect: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct HomotopyReport {
    pub samples: Vec<HomotopySample>,
    pub passed: bool,
}

impl HomotopyReport {
    pub fn max_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.unitarity_defect.max(s.modular_defect))
            .fold(0.0, f64::max)
    }
}

/// Evaluates `path` on the uniform grid `t_i = i / (samples - 1)` over
/// `[0, 1]` and records unitarity and modular defects at each point.
///
/// Samples run in parallel; the report is ordered by `t`.
pub fn homotopy_path_check<P>(path: P, samples: usize) -> Result<HomotopyReport>
where
    P: Fn(f64) -> Result<AlgMatrix> + Sync,
{
    if samples < 2 {
        return Err(CuntzError::Usage("a homotopy check needs at least two samples".into()));
    }
    let samples = (0..samples)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / (samples - 1) as f64;
            let u = path(t)?;
            let unitarity_defect = u.unitarity_defect()?;
            let modular_defect = u.modular_defect()?;
            let passed = within_tolerance(unitarity_defect, u.backend())
                && within_tolerance(modular_defect, u.backend());
            Ok(HomotopySample {
                t,
                unitarity_defect,
                modular_defect,
                passed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = samples.iter().all(|s| s.passed);
    Ok(HomotopyReport { samples, passed })
}

fn rotation(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `R_theta (a) R_theta^*`, with `R_theta` the real rotation tensored with
/// the identity of the block size.
fn rotate(a: &AlgMatrix, theta: f64) -> Result<AlgMatrix> {
    let r = AlgMatrix::scalar_kron(a.n(), &rotation(theta), a.dim() / 2);
    r.try_mul(&a.to_numeric())?.try_mul(&r.adjoint())
}

/// `t -> R_t (u ⊕ v) R_t^*`, `theta = t pi / 2`, from `u ⊕ v` to `v ⊕ u`.
pub fn rotation_path(u: &AlgMatrix, v: &AlgMatrix) -> Result<impl Fn(f64) -> Result<AlgMatrix> + Sync> {
    if u.dim() != v.dim() {
        return Err(CuntzError::Usage("rotation path needs blocks of equal size".into()));
    }
    let sum = u.direct_sum(v)?.to_numeric();
    Ok(move |t: f64| rotate(&sum, t * PI / 2.0))
}

/// The two-stage path from `u_{mu,nu}` to `u_{nu,mu}`.
///
/// On `[0, 1/2]` it conjugates by the rotation with angle `t pi`, ending at
/// `[[1 - P_nu, -S_nu S_mu^*], [-S_mu S_nu^*, 1 - P_mu]]`. On `[1/2, 1]` the
/// off-diagonal phase `e^{i theta}` runs from `-1` back to `1`, with
/// `theta = (2 - 2t) pi`.
pub fn two_stage_path(
    n: u32,
    mu: &MultiIndex,
    nu: &MultiIndex,
) -> Result<impl Fn(f64) -> Result<AlgMatrix> + Sync> {
    let start = build_u_mu_nu(n, mu, nu)?.to_numeric();
    let one = Element::one(n);
    let p_mu = Element::range_projection(n, mu)?;
    let p_nu = Element::range_projection(n, nu)?;
    let upper = one.try_sub(&p_nu)?.to_numeric();
    let lower = one.try_sub(&p_mu)?.to_numeric();
    let off = Element::monomial(n, nu.clone(), mu.clone())?.to_numeric();
    Ok(move |t: f64| {
        if t <= 0.5 {
            return rotate(&start, t * PI);
        }
        let phase = Complex64::from_polar(1.0, (2.0 - 2.0 * t) * PI);
        AlgMatrix::from_rows(vec![
            vec![upper.clone(), off.try_scale(&Scalar::Numeric(phase))?],
            vec![off.adjoint().try_scale(&Scalar::Numeric(phase.conj()))?, lower.clone()],
        ])
    })
}

/// `t -> (u ⊕ 1) R_t (1 ⊕ u^*) R_t^*`, `theta = t pi / 2`, from `u ⊕ u^*` to
/// the identity.
pub fn inverse_sum_path(u: &AlgMatrix) -> Result<impl Fn(f64) -> Result<AlgMatrix> + Sync> {
    let u = u.to_numeric();
    let id = AlgMatrix::identity(u.n(), u.dim(), Backend::Numeric);
    let left = u.direct_sum(&id)?;
    let right = id.direct_sum(&u.adjoint())?;
    Ok(move |t: f64| left.try_mul(&rotate(&right, t * PI / 2.0)?))
}

/// The path that stays at `u`.
pub fn constant_path(u: &AlgMatrix) -> impl Fn(f64) -> Result<AlgMatrix> + Sync + '_ {
    move |_| Ok(u.clone())
}

/// A factor in the non-closure search: `u_{mu,nu}`, optionally multiplied on
/// the left by the scalar rotation `[[3/5, 4/5], [-4/5, 3/5]]`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SearchFactor {
    pub mu: MultiIndex,
    pub nu: MultiIndex,
    pub rotated: bool,
}

impl SearchFactor {
    pub fn build(&self, n: u32) -> Result<AlgMatrix> {
        let u = build_u_mu_nu(n, &self.mu, &self.nu)?;
        if !self.rotated {
            return Ok(u);
        }
        let rho = AlgMatrix::from_scalars(
            n,
            &[
                vec![Scalar::ratio(3, 5), Scalar::ratio(4, 5)],
                vec![Scalar::ratio(-4, 5), Scalar::ratio(3, 5)],
            ],
        )?;
        rho.try_mul(&u)
    }
}

/// A pair of modular unitaries whose product is not modular.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct NonClosureWitness {
    pub first: SearchFactor,
    pub second: SearchFactor,
    pub obstruction: ModularObstruction,
}

/// Searches ordered pairs of [`SearchFactor`]s with words of length at most
/// `max_len` for a product that is not modular. Unrotated factors come first,
/// then words in lexicographic order.
///
/// Products of matrices whose entries are sums of monomials with orthogonal
/// sources never qualify, which is why the rotated factors are in the pool.
pub fn find_non_closure_witness(n: u32, max_len: usize) -> Result<Option<NonClosureWitness>> {
    let words: Vec<MultiIndex> = MultiIndex::words_up_to(n, max_len).collect();
    let mut factors = Vec::new();
    for rotated in [false, true] {
        for mu in &words {
            for nu in &words {
                factors.push(SearchFactor {
                    mu: mu.clone(),
                    nu: nu.clone(),
                    rotated,
                });
            }
        }
    }
    let matrices = factors.iter().map(|f| f.build(n)).collect::<Result<Vec<_>>>()?;
    for (i, u) in matrices.iter().enumerate() {
        for (j, v) in matrices.iter().enumerate() {
            let (obstruction, _) = u.try_mul(v)?.modular_obstruction()?;
            if let Some(obstruction) = obstruction {
                return Ok(Some(NonClosureWitness {
                    first: factors[i].clone(),
                    second: factors[j].clone(),
                    obstruction,
                }));
            }
        }
    }
    Ok(None)
}

impl serde::Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters().serialize(serializer)
    }
}
