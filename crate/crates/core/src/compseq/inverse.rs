use crate::error::{Error, Result};
use crate::modfield::{FieldElement, Modulus};
use crate::poly::Poly;
use crate::polyops::{scale, taylor_shift, taylor_shift_t, truncate};
use crate::seriesops::valuation;

use super::{compute_g, eval_t_with, eval_with, CompositionOp, CompositionSequence, SequenceTruncations};

/// The sequence computing the compositional inverse of a sequence output
/// tangent to the identity (`g = x mod x^2`): operators are reversed and
/// each replaced by its inverse, with `P_k` becoming
/// `R_{k, lc(g_{i-1}), val(g_{i-1})}`.
pub fn reverse_sequence(
    md: &Modulus,
    seq: &CompositionSequence,
    tr: &SequenceTruncations,
) -> Result<CompositionSequence> {
    let out = tr.output();
    if out.dim() < 2 || !out[0].is_zero() || out[1] != FieldElement::ONE {
        return Err(Error::NotTangentToIdentity);
    }
    let mut ops = Vec::with_capacity(seq.len());
    for (idx, op) in seq.ops().iter().enumerate().rev() {
        let rev = match op {
            CompositionOp::Add(a) => CompositionOp::Add(md.neg(*a)),
            CompositionOp::Mul(l) => CompositionOp::Mul(md.inv(*l)?),
            CompositionOp::Pow(k) => {
                let prev = &tr.g[idx];
                let Some(v) = valuation(prev) else {
                    return Err(Error::AmbiguousValuation {
                        step: idx + 1,
                        precision: prev.dim(),
                    });
                };
                CompositionOp::Root {
                    k: *k,
                    alpha: prev[v],
                    r: v,
                }
            }
            CompositionOp::Root { k, .. } => CompositionOp::Pow(*k),
            CompositionOp::Inv => CompositionOp::Inv,
            CompositionOp::Exp => CompositionOp::Log,
            CompositionOp::Log => CompositionOp::Exp,
        };
        ops.push(rev);
    }
    CompositionSequence::new(ops)
}

/// Everything needed to apply `Eval^{-1}_n(., g)` and its transpose
/// repeatedly: `g = g0 + g1 x + ...`, and the sequence of the
/// compositional inverse of `(g - g0)/g1`.
#[derive(Debug, Clone)]
pub struct InversePlan {
    pub g0: FieldElement,
    pub g1: FieldElement,
    pub reversed: CompositionSequence,
    pub reversed_tr: SequenceTruncations,
    pub n: usize,
}

/// Builds the [`InversePlan`] of `seq` at precision `n`.
pub fn prepare_inverse(md: &Modulus, seq: &CompositionSequence, n: usize) -> Result<InversePlan> {
    let tr = compute_g(md, seq, n)?;
    let out = tr.output();
    let (g0, g1) = (out[0], out[1]);
    if g1.is_zero() {
        return Err(Error::NotInvertible(format!("sequence {seq} has g'(0) = 0")));
    }
    let mut extra = Vec::new();
    if !g0.is_zero() {
        extra.push(CompositionOp::Add(md.neg(g0)));
    }
    if g1 != FieldElement::ONE {
        extra.push(CompositionOp::Mul(md.inv(g1)?));
    }
    let (ext, ext_tr) = if extra.is_empty() {
        (seq.clone(), tr)
    } else {
        let ext = seq.extended(&extra)?;
        let ext_tr = compute_g(md, &ext, n)?;
        (ext, ext_tr)
    };
    let reversed = reverse_sequence(md, &ext, &ext_tr)?;
    let reversed_tr = compute_g(md, &reversed, n)?;
    Ok(InversePlan {
        g0,
        g1,
        reversed,
        reversed_tr,
        n,
    })
}

impl InversePlan {
    /// `Eval^{-1}_n(A, g) = Shift_{-g0}(Scale_{1/g1}(Eval_n(A, g^)))`.
    pub fn apply(&self, md: &Modulus, a: &Poly) -> Result<Poly> {
        let n = self.n;
        let b = eval_with(md, &truncate(a, n), &self.reversed, &self.reversed_tr, n)?;
        let c = scale(md, &b, md.inv(self.g1)?);
        taylor_shift(md, &c, md.neg(self.g0))
    }

    /// Transpose of [`InversePlan::apply`].
    pub fn apply_t(&self, md: &Modulus, a: &Poly) -> Result<Poly> {
        let n = self.n;
        let b = taylor_shift_t(md, &truncate(a, n), md.neg(self.g0))?;
        let c = scale(md, &b, md.inv(self.g1)?);
        eval_t_with(md, &c, &self.reversed, &self.reversed_tr, n)
    }
}

/// `Eval^{-1}_n(A, g)`: the `B` in `K[x]_n` with `B(g) = A mod x^n`.
pub fn eval_inv(md: &Modulus, a: &Poly, seq: &CompositionSequence, n: usize) -> Result<Poly> {
    prepare_inverse(md, seq, n)?.apply(md, a)
}

/// `Eval^{-t}_n(A, g)`, the transpose of [`eval_inv`].
pub fn eval_inv_transposed(md: &Modulus, a: &Poly, seq: &CompositionSequence, n: usize) -> Result<Poly> {
    prepare_inverse(md, seq, n)?.apply_t(md, a)
}
