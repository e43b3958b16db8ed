//! Structured bivariate evaluation: for `F(x, t) = u(x) v(t) f(g(x) h(t))`
//! with `F = sum_j xi_j(x) t^j`, the map `a -> sum_{j<n} a_j xi_j mod x^n`
//! and its inverse, through the factorisation
//! `Mul(., u) o Eval(., g) o Diag(f) o Eval^t(., h) o Mul^t(., v)`.

use std::fmt;
use std::sync::Arc;

use crate::compseq::{compute_g, eval_t_with, eval_with, prepare_inverse, CompositionSequence};
use crate::error::{Error, Result};
use crate::modfield::{mul_trunc, mul_trunc_t, FieldElement, Modulus};
use crate::poly::Poly;
use crate::polyops::{diagonal, truncate};
use crate::seriesops::series_inv;

/// Produces the first `n` coefficients of a series.
pub type SeriesFn = Arc<dyn Fn(&Modulus, usize) -> Result<Vec<FieldElement>> + Send + Sync>;

/// The series `1`.
pub fn series_one() -> SeriesFn {
    Arc::new(|_md, n| {
        let mut v = vec![FieldElement::ZERO; n];
        if n > 0 {
            v[0] = FieldElement::ONE;
        }
        Ok(v)
    })
}

/// The data `(u, v, f, g, h)` of a structured bivariate series.
#[derive(Clone)]
pub struct BivariateSpec {
    pub u: SeriesFn,
    pub v: SeriesFn,
    pub f: SeriesFn,
    pub g: CompositionSequence,
    pub h: CompositionSequence,
}

impl fmt::Debug for BivariateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateSpec")
            .field("g", &self.g.to_string())
            .field("h", &self.h.to_string())
            .finish_non_exhaustive()
    }
}

fn series(md: &Modulus, gen: &SeriesFn, n: usize) -> Result<Poly> {
    let c = gen(md, n)?;
    if c.len() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    Ok(Poly::new(c).truncated(n))
}

/// A spec instantiated at precision `n`: series truncations and checked
/// hypotheses.
struct Instance {
    u: Poly,
    v: Poly,
    f: Poly,
    g_tr: crate::compseq::SequenceTruncations,
    h_tr: crate::compseq::SequenceTruncations,
}

fn instantiate(md: &Modulus, spec: &BivariateSpec, n: usize) -> Result<Instance> {
    md.check_precision(n)?;
    let u = series(md, &spec.u, n)?;
    let v = series(md, &spec.v, n)?;
    let f = series(md, &spec.f, n)?;
    let g_tr = compute_g(md, &spec.g, n).map_err(|e| violation("g", e))?;
    let h_tr = compute_g(md, &spec.h, n).map_err(|e| violation("h", e))?;
    let (g, h) = (g_tr.output(), h_tr.output());
    if n > 0 && u[0].is_zero() {
        return Err(Error::SpecViolation("u(0) = 0".into()));
    }
    if n > 0 && v[0].is_zero() {
        return Err(Error::SpecViolation("v(0) = 0".into()));
    }
    if !g[0].is_zero() && !h[0].is_zero() {
        return Err(Error::SpecViolation("g(0) h(0) != 0".into()));
    }
    if g[1].is_zero() {
        return Err(Error::SpecViolation("g'(0) = 0".into()));
    }
    if h[1].is_zero() {
        return Err(Error::SpecViolation("h'(0) = 0".into()));
    }
    Ok(Instance { u, v, f, g_tr, h_tr })
}

fn violation(which: &str, e: Error) -> Error {
    match e {
        Error::DomainViolation { .. } | Error::AmbiguousValuation { .. } => {
            Error::SpecViolation(format!("sequence {which}: {e}"))
        }
        other => other,
    }
}

/// `sum_{j<n} a_j xi_j(x) mod x^n`, i.e. the matrix `[F_{i,j}]_{i,j<n}`
/// applied to `a`.
pub fn eval_bivariate(md: &Modulus, a: &[FieldElement], spec: &BivariateSpec, n: usize) -> Result<Poly> {
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let inst = instantiate(md, spec, n)?;
    let a = Poly::new(a.to_vec());
    let b = mul_trunc_t(md, &a, &inst.v, n)?;
    let c = eval_t_with(md, &b, &spec.h, &inst.h_tr, n)?;
    let d = diagonal(md, &c, inst.f.coeffs())?;
    let e = eval_with(md, &d, &spec.g, &inst.g_tr, n)?;
    mul_trunc(md, &e, &inst.u, n)
}

/// Inverse of [`eval_bivariate`]; needs `f_k != 0` for every `k < n`.
pub fn eval_bivariate_inv(md: &Modulus, a: &Poly, spec: &BivariateSpec, n: usize) -> Result<Vec<FieldElement>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let inst = instantiate(md, spec, n)?;
    if let Some(index) = inst.f.coeffs().iter().position(|c| c.is_zero()) {
        return Err(Error::SingularDiagonal { index });
    }
    let f_inv = md.batch_inv(inst.f.coeffs())?;
    let u_inv = series_inv(md, &inst.u, n)?;
    let v_inv = series_inv(md, &inst.v, n)?;
    let g_plan = prepare_inverse(md, &spec.g, n)?;
    let h_plan = prepare_inverse(md, &spec.h, n)?;
    let b = mul_trunc(md, &truncate(a, n), &u_inv, n)?;
    let c = g_plan.apply(md, &b)?;
    let d = diagonal(md, &c, &f_inv)?;
    let e = h_plan.apply_t(md, &d)?;
    Ok(mul_trunc_t(md, &e, &v_inv, n)?.into_coeffs())
}
