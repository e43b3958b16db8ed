use crate::error::{Error, Result};
use crate::modfield::{FieldElement, Modulus};
use crate::poly::Poly;
use crate::seriesops::{
    series_add_const, series_exp, series_inv, series_log, series_mul_const, series_pow,
    series_root, valuation,
};

use super::{CompositionOp, CompositionSequence};

/// Truncations `g_0 = x, g_1, ..., g_L` of the series computed by a
/// sequence, `g_i` known modulo `x^{schedule[i]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTruncations {
    pub g: Vec<Poly>,
    pub schedule: Vec<usize>,
    /// Precision requested by the caller; `schedule[L]` may be larger so
    /// that valuations and `g'(0)` are always visible.
    pub n: usize,
}

impl SequenceTruncations {
    /// `g_i mod x^n`.
    pub fn series(&self, i: usize, n: usize) -> Poly {
        self.g[i].truncated(n)
    }

    /// The output series `g_L`, at its full working precision.
    pub fn output(&self) -> &Poly {
        self.g.last().expect("g_0 is always present")
    }
}

fn at_step(step: usize, e: Error) -> Error {
    match e {
        Error::DomainViolation { reason, .. } => Error::DomainViolation { step, reason },
        other => other,
    }
}

/// Computes `g_i` modulo `x^{n_i}` with `n_L = n` and
/// `n_{i-1} = n_i + r(k-1)` for root steps, checking every operator's
/// domain on the way.
pub fn compute_g(md: &Modulus, seq: &CompositionSequence, n: usize) -> Result<SequenceTruncations> {
    let ops = seq.ops();
    let max_r = ops
        .iter()
        .map(|o| match o {
            CompositionOp::Root { r, .. } => *r,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let n_work = n.max(2).max(max_r + 1);
    let l = ops.len();
    let mut schedule = vec![0; l + 1];
    schedule[l] = n_work;
    for i in (1..=l).rev() {
        schedule[i - 1] = schedule[i] + ops[i - 1].precision_loss();
    }
    md.check_precision(schedule[0])?;

    let mut g = Vec::with_capacity(l + 1);
    g.push(Poly::basis(1, schedule[0]));
    for (idx, op) in ops.iter().enumerate() {
        let step = idx + 1;
        let prev: &Poly = &g[idx];
        let ni = schedule[step];
        let c0 = prev[0];
        let next = match op {
            CompositionOp::Add(a) => series_add_const(md, &prev.truncated(ni), *a),
            CompositionOp::Mul(l) => series_mul_const(md, &prev.truncated(ni), *l)?,
            CompositionOp::Pow(k) => series_pow(md, prev, *k as u64, ni)?,
            CompositionOp::Root { k, alpha, r } => {
                let Some(v) = valuation(prev) else {
                    return Err(Error::AmbiguousValuation {
                        step,
                        precision: prev.dim(),
                    });
                };
                if v != r * k {
                    return Err(Error::DomainViolation {
                        step,
                        reason: format!("R_{{{k},{alpha},{r}}} needs valuation {}, found {v}", r * k),
                    });
                }
                series_root(md, prev, *k, *alpha, *r, ni).map_err(|e| at_step(step, e))?
            }
            CompositionOp::Inv => {
                if c0.is_zero() {
                    return Err(Error::DomainViolation {
                        step,
                        reason: "Inv needs a nonzero constant term".into(),
                    });
                }
                series_inv(md, prev, ni)?
            }
            CompositionOp::Exp | CompositionOp::Log => {
                if c0 != FieldElement::ZERO {
                    return Err(Error::DomainViolation {
                        step,
                        reason: format!("{op} needs a zero constant term"),
                    });
                }
                if matches!(op, CompositionOp::Exp) {
                    series_exp(md, prev, ni)?
                } else {
                    series_log(md, prev, ni)?
                }
            }
        };
        g.push(next);
    }
    Ok(SequenceTruncations { g, schedule, n })
}

/// Checks that `ops` is defined at `x`, returning the sequence with its
/// cost class.
pub fn validate(md: &Modulus, ops: Vec<CompositionOp>, n: usize) -> Result<CompositionSequence> {
    let seq = CompositionSequence::new(ops)?;
    compute_g(md, &seq, n)?;
    Ok(seq)
}
