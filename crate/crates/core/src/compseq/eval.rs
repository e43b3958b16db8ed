use std::collections::HashMap;

use crate::error::Result;
use crate::evalgrid::{exp_map, exp_map_t, log_map, log_map_t};
use crate::modfield::{mul_trunc, mul_trunc_t, Modulus};
use crate::poly::Poly;
use crate::polyops::{
    find_degrees, lincomb, lincomb_t, power_subst, power_subst_t, reverse, scale, split,
    split_t, taylor_shift, taylor_shift_t, truncate,
};
use crate::seriesops::series_pow_signed;

use super::{compute_g, CompositionOp, CompositionSequence, SequenceTruncations};

/// Per-call state: the truncations plus memoised powers.
struct Ctx<'a> {
    md: &'a Modulus,
    ops: &'a [CompositionOp],
    tr: &'a SequenceTruncations,
    n: usize,
    /// `g_l^{1-m} mod x^n`, keyed by `(l, m)`.
    inv_pows: HashMap<(usize, usize), Poly>,
    /// `g_l^i mod x^n` for `i < k`, keyed by `l`.
    root_pows: HashMap<usize, Vec<Poly>>,
}

impl<'a> Ctx<'a> {
    fn new(md: &'a Modulus, seq: &'a CompositionSequence, tr: &'a SequenceTruncations, n: usize) -> Self {
        Ctx {
            md,
            ops: seq.ops(),
            tr,
            n,
            inv_pows: HashMap::new(),
            root_pows: HashMap::new(),
        }
    }

    fn inv_power(&mut self, l: usize, m: usize) -> Result<Poly> {
        if let Some(p) = self.inv_pows.get(&(l, m)) {
            return Ok(p.clone());
        }
        let g = self.tr.series(l, self.n);
        let e = 1i64 - m as i64;
        let p = series_pow_signed(self.md, &g, e, self.n)?;
        self.inv_pows.insert((l, m), p.clone());
        Ok(p)
    }

    /// `h_0, ..., h_{k-1}` with `h = g_l`, the root step's output.
    fn root_powers(&mut self, l: usize, k: usize) -> Result<Vec<Poly>> {
        if let Some(p) = self.root_pows.get(&l) {
            return Ok(p.clone());
        }
        let h = self.tr.series(l, self.n);
        let mut pows = vec![Poly::basis(0, self.n)];
        for i in 1..k {
            let next = mul_trunc(self.md, &pows[i - 1], &h, self.n)?;
            pows.push(next);
        }
        self.root_pows.insert(l, pows.clone());
        Ok(pows)
    }

    /// `Eval_{m,n}(A, g_l)` with `m = dim A`.
    fn aux(&mut self, a: Poly, l: usize) -> Result<Poly> {
        let (md, n) = (self.md, self.n);
        let m = a.dim();
        if l == 0 {
            return Ok(truncate(&a, n));
        }
        if m == 0 {
            return Ok(Poly::zero(n));
        }
        let lp = l - 1;
        match &self.ops[lp] {
            CompositionOp::Mul(lambda) => self.aux(scale(md, &a, *lambda), lp),
            CompositionOp::Add(shift) => self.aux(taylor_shift(md, &a, *shift)?, lp),
            CompositionOp::Pow(k) => self.aux(power_subst(&a, *k), lp),
            CompositionOp::Inv => {
                let c = self.aux(reverse(&a), lp)?;
                let h = self.inv_power(lp, m)?;
                mul_trunc(md, &c, &h, n)
            }
            CompositionOp::Root { k, .. } => {
                let k = *k;
                let h = self.root_powers(l, k)?;
                let parts = split(&a, k);
                let mut b = Vec::with_capacity(k);
                for part in parts {
                    b.push(self.aux(part, lp)?);
                }
                lincomb(md, &b, &h, n)
            }
            CompositionOp::Exp => self.aux(exp_map(md, &a, n)?, lp),
            CompositionOp::Log => self.aux(log_map(md, &a, n)?, lp),
        }
    }

    /// `Eval^t_{m,n}(A, g_l)`: `A` in `K[x]_n`, result in `K[x]_m`.
    fn aux_t(&mut self, a: Poly, m: usize, l: usize) -> Result<Poly> {
        let (md, n) = (self.md, self.n);
        if l == 0 {
            return Ok(truncate(&a, m));
        }
        if m == 0 {
            return Ok(Poly::zero(0));
        }
        let lp = l - 1;
        match &self.ops[lp] {
            CompositionOp::Mul(lambda) => Ok(scale(md, &self.aux_t(a, m, lp)?, *lambda)),
            CompositionOp::Add(shift) => taylor_shift_t(md, &self.aux_t(a, m, lp)?, *shift),
            CompositionOp::Pow(k) => {
                let b = self.aux_t(a, k * (m - 1) + 1, lp)?;
                Ok(power_subst_t(&b, *k, m))
            }
            CompositionOp::Inv => {
                let h = self.inv_power(lp, m)?;
                let b = mul_trunc_t(md, &a, &h, n)?;
                Ok(reverse(&self.aux_t(b, m, lp)?))
            }
            CompositionOp::Root { k, .. } => {
                let k = *k;
                let h = self.root_powers(l, k)?;
                let dims = find_degrees(m, k);
                let parts = lincomb_t(md, &a, &h)?;
                let mut b = Vec::with_capacity(k);
                for (part, mi) in parts.into_iter().zip(dims.parts) {
                    b.push(self.aux_t(part, mi, lp)?);
                }
                split_t(&b, m)
            }
            CompositionOp::Exp => exp_map_t(md, &self.aux_t(a, n, lp)?, m),
            CompositionOp::Log => log_map_t(md, &self.aux_t(a, n, lp)?, m),
        }
    }
}

/// `A(g) mod x^n` for `A` of any dimension `m`, given the truncations of
/// the sequence (computed at precision at least `n`).
pub fn eval_with(
    md: &Modulus,
    a: &Poly,
    seq: &CompositionSequence,
    tr: &SequenceTruncations,
    n: usize,
) -> Result<Poly> {
    md.check_precision(n.max(a.dim()))?;
    Ctx::new(md, seq, tr, n).aux(a.clone(), seq.len())
}

/// Transpose of [`eval_with`] for `m = n`.
pub fn eval_t_with(
    md: &Modulus,
    a: &Poly,
    seq: &CompositionSequence,
    tr: &SequenceTruncations,
    n: usize,
) -> Result<Poly> {
    md.check_precision(n)?;
    let a = truncate(a, n);
    Ctx::new(md, seq, tr, n).aux_t(a, n, seq.len())
}

/// `Eval_n(A, g) = A(g) mod x^n`, where `g` is output by `seq`.
pub fn eval(md: &Modulus, a: &Poly, seq: &CompositionSequence, n: usize) -> Result<Poly> {
    let tr = compute_g(md, seq, n)?;
    eval_with(md, a, seq, &tr, n)
}

/// `Eval^t_n(A, g)`: the transposed map, `K[x]_n -> K[x]_n`.
pub fn eval_t(md: &Modulus, a: &Poly, seq: &CompositionSequence, n: usize) -> Result<Poly> {
    let tr = compute_g(md, seq, n)?;
    eval_t_with(md, a, seq, &tr, n)
}

