//! Quadratic and cubic reference implementations.
//!
//! Nothing here calls the fast kernels: series arithmetic is schoolbook,
//! inverses/exp/log/powers use their coefficient recurrences, and the
//! family series are written from their closed forms. Agreement with the
//! fast path is therefore evidence rather than a tautology.

use crate::compseq::CompositionOp;
use crate::error::{Error, Result};
use crate::families::FamilyKind;
use crate::modfield::{FieldElement, Modulus};
use crate::poly::Poly;

/// Dense matrix, `m[i][j]` = row `i`, column `j`.
pub type Matrix = Vec<Vec<FieldElement>>;

type V = Vec<FieldElement>;

fn zeros(n: usize) -> V {
    vec![FieldElement::ZERO; n]
}

fn at(v: &[FieldElement], i: usize) -> FieldElement {
    v.get(i).copied().unwrap_or_default()
}

/// Schoolbook `a b mod x^n`.
pub fn naive_mul(md: &Modulus, a: &[FieldElement], b: &[FieldElement], n: usize) -> V {
    let mut out = zeros(n);
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = md.add(out[i + j], md.mul(x, y));
        }
    }
    out
}

/// `1/g mod x^n` by the triangular recurrence.
pub fn naive_inv(md: &Modulus, g: &[FieldElement], n: usize) -> Result<V> {
    let g0 = at(g, 0);
    if g0.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ig0 = md.inv(g0)?;
    let mut y = zeros(n);
    for k in 0..n {
        let mut acc = if k == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        for j in 1..=k {
            acc = md.sub(acc, md.mul(at(g, j), y[k - j]));
        }
        y[k] = md.mul(acc, ig0);
    }
    Ok(y)
}

/// `exp(g) mod x^n` for `g(0) = 0`: `k y_k = sum_j j g_j y_{k-j}`.
pub fn naive_exp(md: &Modulus, g: &[FieldElement], n: usize) -> Result<V> {
    if !at(g, 0).is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut y = zeros(n);
    if n == 0 {
        return Ok(y);
    }
    y[0] = FieldElement::ONE;
    for k in 1..n {
        let mut acc = FieldElement::ZERO;
        for j in 1..=k {
            acc = md.add(acc, md.mul(md.mul(md.from_usize(j), at(g, j)), y[k - j]));
        }
        y[k] = md.div(acc, md.from_usize(k))?;
    }
    Ok(y)
}

/// `log(g) mod x^n` for `g(0) = 1`: integral of `g'/g`.
pub fn naive_log(md: &Modulus, g: &[FieldElement], n: usize) -> Result<V> {
    if at(g, 0) != FieldElement::ONE {
        return Err(Error::DivisionByZero);
    }
    let dg: V = (1..n.max(1)).map(|i| md.mul(at(g, i), md.from_usize(i))).collect();
    let q = naive_mul(md, &dg, &naive_inv(md, g, n)?, n.saturating_sub(1));
    let mut out = zeros(n);
    for i in 1..n {
        out[i] = md.div(q[i - 1], md.from_usize(i))?;
    }
    Ok(out)
}

/// `g^e mod x^n` for `g(0) != 0`, by J. C. P. Miller's recurrence; the
/// constant term of the result is supplied as `c0`.
pub fn naive_pow_with(md: &Modulus, g: &[FieldElement], e: FieldElement, c0: FieldElement, n: usize) -> Result<V> {
    let g0 = at(g, 0);
    if g0.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ig0 = md.inv(g0)?;
    let mut y = zeros(n);
    if n == 0 {
        return Ok(y);
    }
    y[0] = c0;
    let e1 = md.add(e, FieldElement::ONE);
    for k in 1..n {
        let mut acc = FieldElement::ZERO;
        for j in 1..=k {
            let coef = md.sub(md.mul(e1, md.from_usize(j)), md.from_usize(k));
            acc = md.add(acc, md.mul(coef, md.mul(at(g, j), y[k - j])));
        }
        y[k] = md.mul(acc, md.div(ig0, md.from_usize(k))?);
    }
    Ok(y)
}

/// `g^e` for `g(0) = 1`.
pub fn naive_pow_unit(md: &Modulus, g: &[FieldElement], e: FieldElement, n: usize) -> Result<V> {
    naive_pow_with(md, g, e, FieldElement::ONE, n)
}

/// `A(g) mod x^n` by Horner's rule with truncated schoolbook products.
pub fn horner_compose(md: &Modulus, a: &Poly, g: &Poly, n: usize) -> Poly {
    let mut acc = zeros(n);
    for &c in a.coeffs().iter().rev() {
        acc = naive_mul(md, &acc, g.coeffs(), n);
        if n > 0 {
            acc[0] = md.add(acc[0], c);
        }
    }
    Poly::new(acc)
}

/// `sum_i a_i g^i mod x^n`, accumulating explicit powers; a second,
/// differently organised composition reference.
pub fn power_sum_compose(md: &Modulus, a: &Poly, g: &Poly, n: usize) -> Poly {
    let mut acc = zeros(n);
    let mut pw = zeros(n);
    if n > 0 {
        pw[0] = FieldElement::ONE;
    }
    for &c in a.coeffs() {
        for (s, &p) in acc.iter_mut().zip(&pw) {
            *s = md.add(*s, md.mul(c, p));
        }
        pw = naive_mul(md, &pw, g.coeffs(), n);
    }
    Poly::new(acc)
}

/// The series output by a sequence of operators, computed operator by
/// operator with schoolbook arithmetic at enough precision to return it
/// modulo `x^n`.
pub fn naive_sequence_series(md: &Modulus, ops: &[CompositionOp], n: usize) -> Result<Poly> {
    let loss: usize = ops
        .iter()
        .map(|o| match o {
            CompositionOp::Root { k, r, .. } => r * (k - 1),
            _ => 0,
        })
        .sum();
    let mut prec = n.max(2) + loss;
    let mut g = zeros(prec);
    g[1] = FieldElement::ONE;
    for op in ops {
        g = match op {
            CompositionOp::Add(a) => {
                let mut h = g.clone();
                h[0] = md.add(h[0], *a);
                h
            }
            CompositionOp::Mul(l) => g.iter().map(|&c| md.mul(c, *l)).collect(),
            CompositionOp::Pow(k) => {
                let mut acc = zeros(prec);
                acc[0] = FieldElement::ONE;
                for _ in 0..*k {
                    acc = naive_mul(md, &acc, &g, prec);
                }
                acc
            }
            CompositionOp::Root { k, alpha, r } => {
                let v = g.iter().position(|c| !c.is_zero());
                let lead = md.pow(*alpha, *k as u64);
                if v != Some(r * k) || g[r * k] != lead {
                    return Err(Error::DomainViolation {
                        step: 0,
                        reason: "root domain".into(),
                    });
                }
                let new_prec = prec - r * (k - 1);
                let il = md.inv(lead)?;
                let q: V = g[r * k..].iter().map(|&c| md.mul(c, il)).collect();
                let y = naive_pow_unit(md, &q, md.inv(md.from_usize(*k))?, new_prec - r)?;
                let mut out = zeros(*r);
                out.extend(y.iter().map(|&c| md.mul(c, *alpha)));
                prec = new_prec;
                out
            }
            CompositionOp::Inv => naive_inv(md, &g, prec)?,
            CompositionOp::Exp => {
                let mut e = naive_exp(md, &g, prec)?;
                e[0] = md.sub(e[0], FieldElement::ONE);
                e
            }
            CompositionOp::Log => {
                let mut h = g.clone();
                h[0] = md.add(h[0], FieldElement::ONE);
                naive_log(md, &h, prec)?
            }
        };
    }
    Ok(Poly::new(g).truncated(n))
}

/// Signed Stirling numbers of the first kind `M1[i][j] = s(j, i)` and of
/// the second kind `M2[i][j] = S(j, i)`, from their recurrences.
pub fn stirling_matrices(md: &Modulus, n: usize) -> (Matrix, Matrix) {
    let mut s1 = vec![zeros(n); n];
    let mut s2 = vec![zeros(n); n];
    // s(j, i) with j as column
    if n > 0 {
        s1[0][0] = FieldElement::ONE;
        s2[0][0] = FieldElement::ONE;
    }
    for j in 1..n {
        for i in 0..n {
            let prev_same = s1[i][j - 1];
            let prev_lower = if i > 0 { s1[i - 1][j - 1] } else { FieldElement::ZERO };
            // s(j, i) = s(j-1, i-1) - (j-1) s(j-1, i)
            s1[i][j] = md.sub(prev_lower, md.mul(md.from_usize(j - 1), prev_same));
            let prev_same = s2[i][j - 1];
            let prev_lower = if i > 0 { s2[i - 1][j - 1] } else { FieldElement::ZERO };
            // S(j, i) = i S(j-1, i) + S(j-1, i-1)
            s2[i][j] = md.add(md.mul(md.from_usize(i), prev_same), prev_lower);
        }
    }
    (s1, s2)
}

/// Closed-form truncations of the series describing a family.
#[derive(Debug, Clone)]
pub struct FamilySeries {
    pub g: V,
    pub h: V,
    pub u: V,
    pub v: V,
    pub f: V,
    pub c: V,
}

fn frac(md: &Modulus, a: i64, b: i64) -> FieldElement {
    md.div(md.from_i64(a), md.from_i64(b)).expect("nonzero denominator")
}

/// `log(1 - c t)` coefficients: `-c^k / k`.
fn log_one_minus(md: &Modulus, c: FieldElement, n: usize) -> Result<V> {
    let mut out = zeros(n);
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = md.neg(md.div(md.pow(c, k as u64), md.from_usize(k))?);
    }
    Ok(out)
}

fn exp_coeffs(md: &Modulus, c: FieldElement, n: usize) -> Result<V> {
    // exp(c t): c^k / k!
    let mut out = zeros(n);
    let mut fact = FieldElement::ONE;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            fact = md.mul(fact, md.from_usize(k));
        }
        *slot = md.div(md.pow(c, k as u64), fact)?;
    }
    Ok(out)
}

fn binom_coeffs(md: &Modulus, e: FieldElement, c: FieldElement, n: usize) -> Result<V> {
    // (1 + c t)^e: binom(e, k) c^k, each binomial by an explicit product
    let mut out = zeros(n);
    for (k, slot) in out.iter_mut().enumerate() {
        let mut num = FieldElement::ONE;
        let mut den = FieldElement::ONE;
        for j in 0..k {
            num = md.mul(num, md.sub(e, md.from_usize(j)));
            den = md.mul(den, md.from_usize(j + 1));
        }
        *slot = md.mul(md.div(num, den)?, md.pow(c, k as u64));
    }
    Ok(out)
}

fn rising(md: &Modulus, a: FieldElement, k: usize) -> FieldElement {
    (0..k).fold(FieldElement::ONE, |acc, j| md.mul(acc, md.add(a, md.from_usize(j))))
}

fn factorial(md: &Modulus, k: usize) -> FieldElement {
    (1..=k).fold(FieldElement::ONE, |acc, j| md.mul(acc, md.from_usize(j)))
}

fn shift_down(v: &[FieldElement], n: usize) -> V {
    (0..n).map(|i| at(v, i + 1)).collect()
}

fn monomial(md: &Modulus, c: i64, n: usize) -> V {
    let mut out = zeros(n);
    if n > 1 {
        out[1] = md.from_i64(c);
    }
    out
}

/// `g, h, u, v, f, c` for a family, from closed forms written
/// independently of the composition sequences used by the fast path.
pub fn family_series(md: &Modulus, kind: FamilyKind, n: usize) -> Result<FamilySeries> {
    let one = FieldElement::ONE;
    let mut u = zeros(n);
    if n > 0 {
        u[0] = one;
    }
    let ones = vec![one; n];
    let inv_fact: V = (0..n).map(|k| md.inv(factorial(md, k))).collect::<Result<_>>()?;
    let x = monomial(md, 1, n);
    // one extra term so that log(1 + t) / t is known modulo t^n
    let log1p_ext: V = (0..n + 1)
        .map(|k| {
            if k == 0 {
                Ok(FieldElement::ZERO)
            } else {
                let v = md.inv(md.from_usize(k))?;
                Ok(if k % 2 == 1 { v } else { md.neg(v) })
            }
        })
        .collect::<Result<_>>()?;
    let log1p: V = log1p_ext[..n].to_vec();
    let expm1: V = inv_fact.iter().enumerate().map(|(k, &c)| if k == 0 { FieldElement::ZERO } else { c }).collect();
    let sqrt_one_minus = |c: FieldElement, m: usize| -> Result<V> {
        // sqrt(1 - c t^2) via (1 - c t^2)^{1/2}
        let mut base = zeros(m.max(3));
        base[0] = one;
        base[2] = md.neg(c);
        naive_pow_unit(md, &base, frac(md, 1, 2), m)
    };
    let (g, h, v, f, c) = match kind {
        FamilyKind::Laguerre { alpha } => {
            // h = t / (1 - t)
            let mut h = zeros(n);
            for slot in h.iter_mut().skip(1) {
                *slot = one;
            }
            let v = binom_coeffs(md, md.sub(md.from_i64(-1), alpha), md.from_i64(-1), n)?;
            (monomial(md, -1, n), h, v, inv_fact.clone(), ones.clone())
        }
        FamilyKind::Hermite => {
            let mut arg = zeros(n.max(3));
            arg[2] = md.from_i64(-1);
            let v = naive_exp(md, &arg, n)?;
            (monomial(md, 2, n), x.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Jacobi { alpha, beta } => {
            let s = md.add(md.add(alpha, beta), one);
            let mut g = x.clone();
            if n > 0 {
                g[0] = one;
            }
            // h = 2t (1+t)^{-2}: coefficient of t^k is 2 k (-1)^{k-1}
            let h: V = (0..n)
                .map(|k| {
                    if k == 0 {
                        FieldElement::ZERO
                    } else {
                        let v = md.from_usize(2 * k);
                        if k % 2 == 1 {
                            v
                        } else {
                            md.neg(v)
                        }
                    }
                })
                .collect();
            let v = binom_coeffs(md, md.neg(s), one, n)?;
            let (a, b, cc) = (md.mul(s, frac(md, 1, 2)), md.mul(md.add(s, one), frac(md, 1, 2)), md.add(beta, one));
            let f: V = (0..n)
                .map(|k| {
                    let num = md.mul(rising(md, a, k), rising(md, b, k));
                    md.div(num, md.mul(rising(md, cc, k), factorial(md, k)))
                })
                .collect::<Result<_>>()?;
            let c: V = (0..n)
                .map(|k| md.div(rising(md, s, k), rising(md, md.add(beta, one), k)))
                .collect::<Result<_>>()?;
            (g, h, v, f, c)
        }
        FamilyKind::Fibonacci => {
            // h = t / (1 - t^2), v = 1 / (1 - t^2)
            let h: V = (0..n).map(|k| if k % 2 == 1 { one } else { FieldElement::ZERO }).collect();
            let v: V = (0..n).map(|k| if k % 2 == 0 { one } else { FieldElement::ZERO }).collect();
            (x.clone(), h, v, ones.clone(), ones.clone())
        }
        FamilyKind::Euler { alpha } => {
            let mut q = inv_fact.iter().map(|&c| md.mul(c, frac(md, 1, 2))).collect::<V>();
            if n > 0 {
                q[0] = one;
            }
            let v = naive_pow_unit(md, &q, md.neg(alpha), n)?;
            (x.clone(), x.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Bernoulli { alpha } => {
            let q: V = (0..n).map(|k| md.inv(factorial(md, k + 1))).collect::<Result<_>>()?;
            let v = naive_pow_unit(md, &q, md.neg(alpha), n)?;
            (x.clone(), x.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Mott => {
            // h = (1 - sqrt(1 - t^2)) / t
            let s = sqrt_one_minus(one, n + 1)?;
            let num: V = s.iter().enumerate().map(|(k, &c)| if k == 0 { md.sub(one, c) } else { md.neg(c) }).collect();
            (monomial(md, -1, n), shift_down(&num, n), u.clone(), inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Spread => {
            // v = (1+t)/(1-t), h = t / (1-t)^2, f = z / (1 + 4z)
            let v: V = (0..n).map(|k| if k == 0 { one } else { md.elem(2) }).collect();
            let h: V = (0..n).map(|k| md.from_usize(k)).collect();
            let f: V = (0..n)
                .map(|k| if k == 0 { FieldElement::ZERO } else { md.pow(md.from_i64(-4), (k - 1) as u64) })
                .collect();
            (x.clone(), h, v, f, ones.clone())
        }
        FamilyKind::Bessel => {
            // h = 1 - sqrt(1 - 2t)
            let mut base = zeros(n.max(2));
            base[0] = one;
            base[1] = md.from_i64(-2);
            let s = naive_pow_unit(md, &base, frac(md, 1, 2), n)?;
            let h: V = s.iter().enumerate().map(|(k, &c)| if k == 0 { md.sub(one, c) } else { md.neg(c) }).collect();
            (x.clone(), h, u.clone(), inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Falling => (x.clone(), log1p.clone(), u.clone(), inv_fact.clone(), inv_fact.clone()),
        FamilyKind::Bell => (x.clone(), expm1.clone(), u.clone(), inv_fact.clone(), inv_fact.clone()),
        FamilyKind::Bernoulli2 => {
            let q = shift_down(&log1p_ext, n);
            let v = naive_inv(md, &q, n)?;
            (x.clone(), log1p.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Charlier { a } => {
            let h = log_one_minus(md, md.neg(md.inv(a)?), n)?;
            (x.clone(), h, exp_coeffs(md, md.from_i64(-1), n)?, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Actuarial { beta } => {
            (monomial(md, -1, n), expm1.clone(), exp_coeffs(md, beta, n)?, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Narumi { a } => {
            let q = shift_down(&log1p_ext, n);
            let v = naive_pow_unit(md, &q, md.neg(a), n)?;
            (x.clone(), log1p.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::Peters { lambda, mu } => {
            let mut base = binom_coeffs(md, lambda, one, n.max(1))?;
            base[0] = md.add(base[0], one);
            let c0 = md.pow_i64(md.elem(2), -mu)?;
            let v = naive_pow_with(md, &base, md.from_i64(-mu), c0, n)?;
            (x.clone(), log1p.clone(), v, inv_fact.clone(), inv_fact.clone())
        }
        FamilyKind::MeixnerPollaczek { lambda, s, i } => {
            let si = md.inv(s)?;
            let a = naive_mul(md, &[one, md.neg(s)], &[one, md.neg(si)], n);
            let v = naive_pow_unit(md, &a, md.neg(lambda), n)?;
            // h = log(1 - s t) - log(1 - t/s)
            let l1 = log_one_minus(md, s, n)?;
            let l2 = log_one_minus(md, si, n)?;
            let h: V = l1.iter().zip(&l2).map(|(&p, &q)| md.sub(p, q)).collect();
            let mut g = zeros(n);
            if n > 1 {
                g[1] = i;
            }
            (g, h, v, inv_fact.clone(), ones.clone())
        }
        FamilyKind::Meixner { beta, c } => {
            let ci = md.inv(c)?;
            let l1 = log_one_minus(md, ci, n)?;
            let l2 = log_one_minus(md, one, n)?;
            let h: V = l1.iter().zip(&l2).map(|(&p, &q)| md.sub(p, q)).collect();
            let v = binom_coeffs(md, md.neg(beta), md.from_i64(-1), n)?;
            let cc: V = (0..n).map(|k| md.div(rising(md, beta, k), factorial(md, k))).collect::<Result<_>>()?;
            (x.clone(), h, v, inv_fact.clone(), cc)
        }
        FamilyKind::Krawtchouk { p, n: big_n } => {
            let r = md.div(md.sub(one, p), p)?;
            let l1 = log_one_minus(md, r, n)?;
            let h: V = l1.iter().zip(&log1p).map(|(&a, &b)| md.sub(a, b)).collect();
            let v = binom_coeffs(md, big_n, one, n)?;
            (x.clone(), h, v.clone(), inv_fact.clone(), v)
        }
        FamilyKind::MittagLeffler => {
            // log((1+t)/(1-t)) = sum_{k odd} 2 t^k / k
            let h: V = (0..n)
                .map(|k| {
                    if k % 2 == 1 {
                        md.div(md.elem(2), md.from_usize(k))
                    } else {
                        Ok(FieldElement::ZERO)
                    }
                })
                .collect::<Result<_>>()?;
            (x.clone(), h, u.clone(), inv_fact.clone(), inv_fact.clone())
        }
    };
    Ok(FamilySeries { g, h, u, v, f, c })
}

/// `[F_{i,j}]_{i,j<n}` for `F = u(x) v(t) f(g(x) h(t))`, by explicit
/// powers of `g` and `h` and cubic accumulation over `k < n`.
pub fn bivariate_matrix(md: &Modulus, s: &FamilySeries, n: usize) -> Matrix {
    let mut fstar = vec![zeros(n); n];
    let mut gp = zeros(n);
    let mut hp = zeros(n);
    if n > 0 {
        gp[0] = FieldElement::ONE;
        hp[0] = FieldElement::ONE;
    }
    for k in 0..n {
        let fk = at(&s.f, k);
        if !fk.is_zero() {
            for i in 0..n {
                let gi = md.mul(fk, gp[i]);
                if gi.is_zero() {
                    continue;
                }
                for j in 0..n {
                    fstar[i][j] = md.add(fstar[i][j], md.mul(gi, hp[j]));
                }
            }
        }
        gp = naive_mul(md, &gp, &s.g, n);
        hp = naive_mul(md, &hp, &s.h, n);
    }
    // F = U F* V^T with Toeplitz U (from u) and V (from v)
    let mut tmp = vec![zeros(n); n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = FieldElement::ZERO;
            for jp in 0..=j {
                acc = md.add(acc, md.mul(at(&s.v, j - jp), fstar[i][jp]));
            }
            tmp[i][j] = acc;
        }
    }
    let mut out = vec![zeros(n); n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = FieldElement::ZERO;
            for ip in 0..=i {
                acc = md.add(acc, md.mul(at(&s.u, i - ip), tmp[ip][j]));
            }
            out[i][j] = acc;
        }
    }
    out
}

/// The matrix of the conversion to the monomial basis: column `j` holds
/// the coefficients of `P_j = xi_j / c_j`.
pub fn conversion_matrix(md: &Modulus, kind: FamilyKind, n: usize) -> Result<Matrix> {
    let s = family_series(md, kind, n)?;
    let mut m = bivariate_matrix(md, &s, n);
    for j in 0..n {
        let cj = at(&s.c, j);
        if cj.is_zero() {
            return Err(Error::SpecViolation(format!("prefactor c_{j} vanishes")));
        }
        let ci = md.inv(cj)?;
        for row in m.iter_mut() {
            row[j] = md.mul(row[j], ci);
        }
    }
    Ok(m)
}

/// `M v`.
pub fn matvec(md: &Modulus, m: &Matrix, v: &[FieldElement]) -> V {
    m.iter()
        .map(|row| row.iter().zip(v).fold(FieldElement::ZERO, |s, (&a, &b)| md.add(s, md.mul(a, b))))
        .collect()
}

/// Solves `M x = b` by Gaussian elimination mod p.
pub fn solve(md: &Modulus, m: &Matrix, b: &[FieldElement]) -> Result<V> {
    let n = m.len();
    let mut a: Vec<V> = m.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Err(Error::SingularDiagonal { index: col });
        };
        a.swap(col, piv);
        let inv = md.inv(a[col][col])?;
        for c in col..=n {
            a[col][c] = md.mul(a[col][c], inv);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col];
                for c in col..=n {
                    let t = md.mul(factor, a[col][c]);
                    a[r][c] = md.sub(a[r][c], t);
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n]).collect())
}

/// Direction of a conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToMonomial,
    FromMonomial,
}

/// Dense reference conversion: matrix-vector product, or a linear solve
/// for the inverse direction.
pub fn naive_convert(md: &Modulus, a: &[FieldElement], kind: FamilyKind, dir: Direction) -> Result<V> {
    let n = a.len();
    let m = conversion_matrix(md, kind, n)?;
    match dir {
        Direction::ToMonomial => Ok(matvec(md, &m, a)),
        Direction::FromMonomial => solve(md, &m, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_examples() {
        let md = Modulus::default();
        let (s1, s2) = stirling_matrices(&md, 5);
        assert_eq!(s1[1][2], md.from_i64(-1));
        assert_eq!(s1[2][2], FieldElement::ONE);
        assert_eq!(s2[2][3], md.elem(3));
        // mutually inverse
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = FieldElement::ZERO;
                for k in 0..5 {
                    acc = md.add(acc, md.mul(s1[i][k], s2[k][j]));
                }
                assert_eq!(acc, if i == j { FieldElement::ONE } else { FieldElement::ZERO });
            }
        }
    }

    #[test]
    fn horner_examples() {
        let md = Modulus::default();
        let g = Poly::from_u64s(&md, &[0, 3, 1, 4]);
        assert_eq!(horner_compose(&md, &Poly::from_u64s(&md, &[0, 1]), &g, 4), g);
        assert_eq!(horner_compose(&md, &Poly::from_u64s(&md, &[5]), &g, 4).values(), vec![5, 0, 0, 0]);
        let a = Poly::from_u64s(&md, &[2, 7, 1, 8, 2]);
        assert_eq!(horner_compose(&md, &a, &g, 6), power_sum_compose(&md, &a, &g, 6));
    }

    #[test]
    fn hermite_matrix_against_recurrence() {
        let md = Modulus::default();
        let n = 6;
        let m = conversion_matrix(&md, FamilyKind::Hermite, n).unwrap();
        assert_eq!(m[0][0], FieldElement::ONE);
        assert_eq!(m[1][1], md.elem(2));
        assert_eq!(m[0][2], md.from_i64(-2));
        assert_eq!(m[2][2], md.elem(4));
        // single-entry case
        let s = family_series(&md, FamilyKind::Hermite, 1).unwrap();
        assert_eq!(bivariate_matrix(&md, &s, 1), vec![vec![FieldElement::ONE]]);
    }

    #[test]
    fn solve_inverts_matvec() {
        let md = Modulus::new(101).unwrap();
        let m: Matrix = vec![
            vec![md.elem(2), md.elem(1), md.elem(0)],
            vec![md.elem(0), md.elem(3), md.elem(1)],
            vec![md.elem(1), md.elem(0), md.elem(4)],
        ];
        let x = vec![md.elem(5), md.elem(7), md.elem(11)];
        let b = matvec(&md, &m, &x);
        assert_eq!(solve(&md, &m, &b).unwrap(), x);
        let singular: Matrix = vec![vec![md.elem(1), md.elem(2)], vec![md.elem(2), md.elem(4)]];
        assert!(matches!(solve(&md, &singular, &[md.elem(1), md.elem(1)]), Err(Error::SingularDiagonal { .. })));
    }
}
