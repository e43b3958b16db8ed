//! Truncated power-series kernels for the operators of the composition
//! language: add/multiply by a constant, inverse, k-th root, power,
//! `exp(g) - 1` and `log(1 + g)`.
//!
//! Series are [`Poly`] values whose dimension is the precision.

use crate::error::{Error, Result};
use crate::modfield::{mul_trunc, FieldElement, Modulus};
use crate::poly::Poly;

/// Index of the first nonzero coefficient, `None` for an all-zero
/// truncation.
pub fn valuation(g: &Poly) -> Option<usize> {
    g.coeffs().iter().position(|c| !c.is_zero())
}

/// `a + g` (operator `A_a`).
pub fn series_add_const(md: &Modulus, g: &Poly, a: FieldElement) -> Poly {
    let mut out = g.clone();
    if out.dim() > 0 {
        out[0] = md.add(out[0], a);
    }
    out
}

/// `lambda g` (operator `M_lambda`); `lambda` must be nonzero.
pub fn series_mul_const(md: &Modulus, g: &Poly, lambda: FieldElement) -> Result<Poly> {
    if lambda.is_zero() {
        return Err(Error::InvalidOperatorParam("M_lambda needs lambda != 0".into()));
    }
    Ok(scale_all(md, g, lambda))
}

fn scale_all(md: &Modulus, g: &Poly, c: FieldElement) -> Poly {
    Poly::new(g.coeffs().iter().map(|&x| md.mul(x, c)).collect())
}

fn domain(reason: impl Into<String>) -> Error {
    Error::DomainViolation {
        step: 0,
        reason: reason.into(),
    }
}

/// `1/g mod x^n` by Newton iteration `y <- y (2 - g y)`.
pub fn series_inv(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    let g0 = g.coeffs().first().copied().unwrap_or_default();
    if g0.is_zero() {
        return Err(domain("Inv needs a nonzero constant term"));
    }
    let ig0 = md.inv(g0)?;
    let deg = g.truncated(n).degree().unwrap_or(0);
    if deg <= SPARSE_POW_DEGREE {
        // y_k = -(1/g_0) sum_{i=1}^{d} g_i y_{k-i}
        let mut y = vec![FieldElement::ZERO; n];
        if n > 0 {
            y[0] = ig0;
        }
        let neg = md.neg(ig0);
        let gs: Vec<FieldElement> = (1..=deg).map(|i| md.mul(g[i], neg)).collect();
        for k in 1..n {
            let mut acc = FieldElement::ZERO;
            for (i, &gi) in gs.iter().enumerate().take(k) {
                acc = md.add(acc, md.mul(gi, y[k - 1 - i]));
            }
            y[k] = acc;
        }
        return Ok(Poly::new(y));
    }
    let mut y = vec![ig0];
    let mut prec = 1;
    while prec < n {
        let next = (2 * prec).min(n);
        let gy = md.mul_vec_trunc(&g.coeffs()[..g.dim().min(next)], &y, next)?;
        // e = g y - 1 has valuation >= prec; y <- y - y e
        let e: Vec<FieldElement> = gy[prec..].to_vec();
        let ye = md.mul_vec_trunc(&y, &e, next - prec)?;
        y.resize(next, FieldElement::ZERO);
        for (slot, c) in y[prec..].iter_mut().zip(ye) {
            *slot = md.neg(c);
        }
        prec = next;
    }
    y.truncate(n);
    y.resize(n, FieldElement::ZERO);
    Ok(Poly::new(y))
}

fn derivative(md: &Modulus, g: &[FieldElement]) -> Vec<FieldElement> {
    g.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| md.mul(c, md.from_usize(i)))
        .collect()
}

/// `log(g) mod x^n` for `g(0) = 1`, as the integral of `g'/g`.
fn log_unit(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    md.check_precision(n)?;
    let gt = g.truncated(n);
    let dg = derivative(md, gt.coeffs());
    let q = mul_trunc(md, &Poly::new(dg), &series_inv(md, &gt, n - 1)?, n - 1)?;
    let inv = md.inverses(n)?;
    let mut out = vec![FieldElement::ZERO; n];
    for i in 1..n {
        out[i] = md.mul(q[i - 1], inv[i]);
    }
    Ok(Poly::new(out))
}

/// `exp(g) mod x^n` for `g(0) = 0`, by Newton iteration
/// `y <- y (1 + g - log y)`.
fn exp_unit(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    md.check_precision(n)?;
    let mut y = Poly::new(vec![FieldElement::ONE]);
    let mut prec = 1;
    while prec < n {
        let next = (2 * prec).min(n);
        let ly = log_unit(md, &y.truncated(next), next)?;
        // d = g - log y has valuation >= prec
        let d: Vec<FieldElement> = (prec..next)
            .map(|i| md.sub(g.coeffs().get(i).copied().unwrap_or_default(), ly[i]))
            .collect();
        let yd = md.mul_vec_trunc(y.coeffs(), &d, next - prec)?;
        let mut c = y.into_coeffs();
        c.resize(next, FieldElement::ZERO);
        for (slot, v) in c[prec..].iter_mut().zip(yd) {
            *slot = md.add(*slot, v);
        }
        y = Poly::new(c);
        prec = next;
    }
    Ok(y)
}

/// `log(1 + g) mod x^n` (operator `L`), for `g(0) = 0`.
pub fn series_log(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if g.coeffs().first().is_some_and(|c| !c.is_zero()) {
        return Err(domain("L needs a zero constant term"));
    }
    let one_plus = series_add_const(md, &g.truncated(n.max(1)), FieldElement::ONE);
    log_unit(md, &one_plus, n)
}

/// `exp(g) - 1 mod x^n` (operator `E`), for `g(0) = 0`.
pub fn series_exp(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if g.coeffs().first().is_some_and(|c| !c.is_zero()) {
        return Err(domain("E needs a zero constant term"));
    }
    let mut y = exp_unit(md, g, n)?;
    if n > 0 {
        y[0] = md.sub(y[0], FieldElement::ONE);
    }
    Ok(y)
}

/// `exp(g) mod x^n` including the constant term, for `g(0) = 0`.
pub fn series_exp_full(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if g.coeffs().first().is_some_and(|c| !c.is_zero()) {
        return Err(domain("exp needs a zero constant term"));
    }
    exp_unit(md, g, n)
}

/// `log(g) mod x^n` for `g(0) = 1`.
pub fn series_log_unit(md: &Modulus, g: &Poly, n: usize) -> Result<Poly> {
    if g.coeffs().first().copied().unwrap_or_default() != FieldElement::ONE {
        return Err(domain("log needs constant term 1"));
    }
    log_unit(md, g, n)
}

/// Degree bound below which powers use the linear recurrence from
/// `g y' = e g' y` instead of exp/log.
const SPARSE_POW_DEGREE: usize = 8;

/// `g^e mod x^n` for `g(0) != 0` and a field exponent `e`, where the
/// constant term raised to `e` is supplied by the caller as `c0`.
fn pow_with_const(md: &Modulus, g: &Poly, e: FieldElement, c0: FieldElement, n: usize) -> Result<Poly> {
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let g = g.truncated(n);
    let g0 = g[0];
    let deg = g.degree().unwrap_or(0);
    if deg == 0 {
        let mut out = Poly::zero(n);
        out[0] = c0;
        return Ok(out);
    }
    md.check_precision(n)?;
    if deg <= SPARSE_POW_DEGREE {
        // g_0 (j+1) y_{j+1} = sum_{i=1}^{d} (e i - (j+1-i)) g_i y_{j+1-i}
        let inv = md.inverses(n)?;
        let ig0 = md.inv(g0)?;
        let mut y = vec![FieldElement::ZERO; n];
        y[0] = c0;
        for j in 0..n - 1 {
            let mut acc = FieldElement::ZERO;
            for i in 1..=deg.min(j + 1) {
                let coef = md.sub(md.mul(e, md.from_usize(i)), md.from_usize(j + 1 - i));
                acc = md.add(acc, md.mul(coef, md.mul(g[i], y[j + 1 - i])));
            }
            y[j + 1] = md.mul(acc, md.mul(ig0, inv[j + 1]));
        }
        return Ok(Poly::new(y));
    }
    let unit = scale_all(md, &g, md.inv(g0)?);
    let l = log_unit(md, &unit, n)?;
    let y = exp_unit(md, &scale_all(md, &l, e), n)?;
    Ok(scale_all(md, &y, c0))
}

/// `g^e mod x^n` for `g(0) = 1` and a field exponent `e`.
pub fn series_pow_field(md: &Modulus, g: &Poly, e: FieldElement, n: usize) -> Result<Poly> {
    if g.coeffs().first().copied().unwrap_or_default() != FieldElement::ONE {
        return Err(domain("field powers need constant term 1"));
    }
    pow_with_const(md, g, e, FieldElement::ONE, n)
}

/// `g^e mod x^n` for an integer exponent of either sign; negative
/// exponents need `g(0) != 0`.
pub fn series_pow_signed(md: &Modulus, g: &Poly, e: i64, n: usize) -> Result<Poly> {
    if e >= 0 {
        return series_pow(md, g, e as u64, n);
    }
    let g0 = g.coeffs().first().copied().unwrap_or_default();
    if g0.is_zero() {
        return Err(domain("negative powers need a nonzero constant term"));
    }
    let c0 = md.pow_i64(g0, e)?;
    pow_with_const(md, g, md.from_i64(e), c0, n)
}

/// Exponents up to this use binary powering of truncations.
const BINARY_POW_MAX: u64 = 16;

/// `g^k mod x^n` (operator `P_k`).
pub fn series_pow(md: &Modulus, g: &Poly, k: u64, n: usize) -> Result<Poly> {
    if k == 0 {
        let mut out = Poly::zero(n);
        if n > 0 {
            out[0] = FieldElement::ONE;
        }
        return Ok(out);
    }
    let g = g.truncated(n);
    let Some(v) = valuation(&g) else {
        return Ok(Poly::zero(n));
    };
    let shift = (v as u128) * (k as u128);
    if shift >= n as u128 {
        return Ok(Poly::zero(n));
    }
    let shift = shift as usize;
    let rest = n - shift;
    let body = Poly::new(g.coeffs()[v..].to_vec()).truncated(rest);
    let powered = if k <= BINARY_POW_MAX || md.check_precision(rest).is_err() {
        let mut acc: Option<Poly> = None;
        let mut base = body;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => mul_trunc(md, &a, &base, rest)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = mul_trunc(md, &base, &base, rest)?;
            }
        }
        acc.expect("k >= 1")
    } else {
        let c0 = md.pow(body[0], k);
        pow_with_const(md, &body, md.from_usize(k as usize), c0, rest)?
    };
    let mut out = vec![FieldElement::ZERO; shift];
    out.extend_from_slice(powered.coeffs());
    Ok(Poly::new(out))
}

/// `R_{k,alpha,r}(g) mod x^n`: the series with leading term `alpha x^r`
/// whose k-th power is `g`. `g` must be known to precision
/// `n + r(k - 1)`, have valuation exactly `rk`, and leading coefficient
/// `alpha^k`.
pub fn series_root(
    md: &Modulus,
    g: &Poly,
    k: usize,
    alpha: FieldElement,
    r: usize,
    n: usize,
) -> Result<Poly> {
    if k == 0 || alpha.is_zero() {
        return Err(Error::InvalidOperatorParam(
            "R_{k,alpha,r} needs k >= 1 and alpha != 0".into(),
        ));
    }
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let need = n + r * (k - 1);
    if g.dim() < need {
        return Err(Error::DimensionMismatch {
            expected: need,
            got: g.dim(),
        });
    }
    let vk = r * k;
    match valuation(g) {
        None => return Err(domain("root of a series with unknown valuation")),
        Some(v) if v != vk => {
            return Err(domain(format!("root expects valuation {vk}, found {v}")))
        }
        Some(_) => {}
    }
    let lead = md.pow(alpha, k as u64);
    if g[vk] != lead {
        return Err(domain("root leading coefficient is not alpha^k"));
    }
    if r >= n {
        return Ok(Poly::zero(n));
    }
    let kinv = md
        .inv(md.from_usize(k))
        .map_err(|_| Error::PrecisionExceedsModulus { n: k, p: md.p() })?;
    let rest = n - r;
    let body = Poly::new(g.coeffs()[vk..vk + rest].to_vec());
    let unit = scale_all(md, &body, md.inv(lead)?);
    let y = if k == 1 { unit } else { pow_with_const(md, &unit, kinv, FieldElement::ONE, rest)? };
    let mut out = vec![FieldElement::ZERO; r];
    out.extend(y.coeffs().iter().map(|&c| md.mul(c, alpha)));
    Ok(Poly::new(out))
}
