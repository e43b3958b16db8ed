//! Composition sequences: chains of the operators
//! `A_a, M_lambda, P_k, R_{k,alpha,r}, Inv, E, L` starting from `x`, and
//! the fast maps `A -> A(g) mod x^n`, its transpose and its inverse for
//! the series `g` they output.

mod eval;
mod inverse;
mod truncations;

pub use eval::{eval, eval_t, eval_t_with, eval_with};
pub use inverse::{eval_inv, eval_inv_transposed, prepare_inverse, reverse_sequence, InversePlan};
pub use truncations::{compute_g, validate, SequenceTruncations};

use std::fmt;

use crate::error::{Error, Result};
use crate::modfield::{FieldElement, Modulus};

/// One operator of a composition sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositionOp {
    /// `g -> a + g`.
    Add(FieldElement),
    /// `g -> lambda g`, `lambda != 0`.
    Mul(FieldElement),
    /// `g -> g^k`, `k >= 1`.
    Pow(usize),
    /// `g -> g^{1/k}` with leading term `alpha x^r`.
    Root { k: usize, alpha: FieldElement, r: usize },
    /// `g -> 1/g`.
    Inv,
    /// `g -> exp(g) - 1`.
    Exp,
    /// `g -> log(1 + g)`.
    Log,
}

impl CompositionOp {
    fn check(&self) -> Result<()> {
        match self {
            CompositionOp::Mul(l) if l.is_zero() => {
                Err(Error::InvalidOperatorParam("M_lambda needs lambda != 0".into()))
            }
            CompositionOp::Pow(0) => Err(Error::InvalidOperatorParam("P_k needs k >= 1".into())),
            CompositionOp::Root { k, alpha, .. } if *k == 0 || alpha.is_zero() => Err(
                Error::InvalidOperatorParam("R_{k,alpha,r} needs k >= 1 and alpha != 0".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Precision lost when computing this operator's output.
    pub fn precision_loss(&self) -> usize {
        match self {
            CompositionOp::Root { k, r, .. } => r * (k - 1),
            _ => 0,
        }
    }
}

impl fmt::Display for CompositionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionOp::Add(a) => write!(f, "A:{a}"),
            CompositionOp::Mul(l) => write!(f, "M:{l}"),
            CompositionOp::Pow(k) => write!(f, "P:{k}"),
            CompositionOp::Root { k, alpha, r } => write!(f, "R:{k},{alpha},{r}"),
            CompositionOp::Inv => write!(f, "Inv"),
            CompositionOp::Exp => write!(f, "E"),
            CompositionOp::Log => write!(f, "L"),
        }
    }
}

/// Asymptotic cost of the sequence's maps: `M(n)`, or `M(n) log n` when
/// an `E` or `L` appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostClass {
    M,
    MLogM,
}

/// A list of operators with checked parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSequence {
    ops: Vec<CompositionOp>,
    cost_class: CostClass,
}

impl CompositionSequence {
    /// Checks operator parameters; domain conditions are checked by
    /// [`validate`] / [`compute_g`].
    pub fn new(ops: Vec<CompositionOp>) -> Result<Self> {
        for op in &ops {
            op.check()?;
        }
        let cost_class = if ops.iter().any(|o| matches!(o, CompositionOp::Exp | CompositionOp::Log)) {
            CostClass::MLogM
        } else {
            CostClass::M
        };
        Ok(CompositionSequence { ops, cost_class })
    }

    /// The empty sequence, outputting `x`.
    pub fn identity() -> Self {
        CompositionSequence {
            ops: Vec::new(),
            cost_class: CostClass::M,
        }
    }

    pub fn ops(&self) -> &[CompositionOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn cost_class(&self) -> CostClass {
        self.cost_class
    }

    /// This sequence followed by `more`.
    pub fn extended(&self, more: &[CompositionOp]) -> Result<Self> {
        let mut ops = self.ops.clone();
        ops.extend_from_slice(more);
        CompositionSequence::new(ops)
    }

    /// Parses the mini-language `A:a;M:l;P:k;R:k,alpha,r;Inv;E;L`.
    /// Field parameters accept integers, negatives and fractions `a/b`.
    pub fn parse(md: &Modulus, text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for tok in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (head, arg) = match tok.split_once(':') {
                Some((h, a)) => (h.trim(), Some(a.trim())),
                None => (tok, None),
            };
            fn need<'a>(head: &str, a: Option<&'a str>) -> Result<&'a str> {
                a.ok_or_else(|| Error::Parse(format!("operator {head} needs a parameter")))
            }
            let int = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}")))
            };
            let op = match head {
                "A" => CompositionOp::Add(md.parse_elem(need(head, arg)?)?),
                "M" => CompositionOp::Mul(md.parse_elem(need(head, arg)?)?),
                "P" => CompositionOp::Pow(int(need(head, arg)?)?),
                "R" => {
                    let parts: Vec<&str> = need(head, arg)?.split(',').collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse(format!("R needs k,alpha,r: {tok:?}")));
                    }
                    CompositionOp::Root {
                        k: int(parts[0])?,
                        alpha: md.parse_elem(parts[1])?,
                        r: int(parts[2])?,
                    }
                }
                "Inv" | "E" | "L" if arg.is_some() => {
                    return Err(Error::Parse(format!("operator {head} takes no parameter")))
                }
                "Inv" => CompositionOp::Inv,
                "E" => CompositionOp::Exp,
                "L" => CompositionOp::Log,
                _ => return Err(Error::Parse(format!("unknown operator {tok:?}"))),
            };
            ops.push(op);
        }
        CompositionSequence::new(ops)
    }
}

impl fmt::Display for CompositionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ops.iter().map(|o| o.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}
