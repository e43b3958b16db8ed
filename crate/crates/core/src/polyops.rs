//! Linear operators on `K[x]_m` and their transposes.
//!
//! Every operator takes its source dimension from the input [`Poly`], so
//! the transposed versions can reconstruct shapes without extra arguments.

use crate::error::{Error, Result};
use crate::modfield::{mul_trunc, mul_trunc_t, FieldElement, Modulus};
use crate::poly::Poly;

/// Dimensions `(m_0, ..., m_{k-1})` of the pieces `A_{i/k}` of a
/// polynomial in `K[x]_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSplit {
    pub parts: Vec<usize>,
}

impl DegreeSplit {
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// `A(x^k)`, mapping `K[x]_m` to `K[x]_{k(m-1)+1}`.
pub fn power_subst(a: &Poly, k: usize) -> Poly {
    assert!(k >= 1, "power_subst needs k >= 1");
    let m = a.dim();
    if m == 0 {
        return Poly::zero(0);
    }
    let mut out = vec![FieldElement::ZERO; k * (m - 1) + 1];
    for (i, &c) in a.coeffs().iter().enumerate() {
        out[i * k] = c;
    }
    Poly::new(out)
}

/// Transpose of [`power_subst`]: keeps the coefficients at `0, k, 2k, ...`.
pub fn power_subst_t(a: &Poly, k: usize, m: usize) -> Poly {
    assert!(k >= 1, "power_subst_t needs k >= 1");
    Poly::new(
        (0..m)
            .map(|i| a.coeffs().get(i * k).copied().unwrap_or_default())
            .collect(),
    )
}

/// `x^{m-1} A(1/x)` within `K[x]_m`. Symmetric, hence its own transpose.
pub fn reverse(a: &Poly) -> Poly {
    Poly::new(a.coeffs().iter().rev().copied().collect())
}

/// `A mod x^n`; the transpose of `truncate_{m,n}` is `truncate_{n,m}`.
pub fn truncate(a: &Poly, n: usize) -> Poly {
    a.truncated(n)
}

/// `A(lambda x)`.
pub fn scale(md: &Modulus, a: &Poly, lambda: FieldElement) -> Poly {
    let mut w = FieldElement::ONE;
    let mut out = Vec::with_capacity(a.dim());
    for &c in a.coeffs() {
        out.push(md.mul(c, w));
        w = md.mul(w, lambda);
    }
    Poly::new(out)
}

/// `sum a_i s_i x^i`.
pub fn diagonal(md: &Modulus, a: &Poly, s: &[FieldElement]) -> Result<Poly> {
    if s.len() < a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: s.len(),
        });
    }
    Ok(Poly::new(
        a.coeffs().iter().zip(s).map(|(&c, &w)| md.mul(c, w)).collect(),
    ))
}

fn shift_kernel(md: &Modulus, m: usize, shift: FieldElement) -> Result<(Vec<FieldElement>, Vec<FieldElement>, Poly)> {
    md.check_precision(m)?;
    let (fact, inv_fact) = md.factorials(m)?;
    let mut kernel = Vec::with_capacity(m);
    let mut pw = FieldElement::ONE;
    for f in &inv_fact {
        kernel.push(md.mul(pw, *f));
        pw = md.mul(pw, shift);
    }
    Ok((fact, inv_fact, Poly::new(kernel)))
}

/// `A(x + a)` via the factorial-weighted reversed product.
pub fn taylor_shift(md: &Modulus, a: &Poly, shift: FieldElement) -> Result<Poly> {
    let m = a.dim();
    if m <= 1 || shift.is_zero() {
        return Ok(a.clone());
    }
    let (fact, inv_fact, kernel) = shift_kernel(md, m, shift)?;
    let b = reverse(&diagonal(md, a, &fact)?);
    let c = reverse(&mul_trunc(md, &b, &kernel, m)?);
    diagonal(md, &c, &inv_fact)
}

/// Transpose of [`taylor_shift`].
pub fn taylor_shift_t(md: &Modulus, a: &Poly, shift: FieldElement) -> Result<Poly> {
    let m = a.dim();
    if m <= 1 || shift.is_zero() {
        return Ok(a.clone());
    }
    let (fact, inv_fact, kernel) = shift_kernel(md, m, shift)?;
    let b = reverse(&diagonal(md, a, &inv_fact)?);
    let c = reverse(&mul_trunc_t(md, &b, &kernel, m)?);
    diagonal(md, &c, &fact)
}

/// Dimensions of the pieces of `Split_{m,k}`: piece `i` collects the
/// indices `i, i+k, i+2k, ...` below `m`.
pub fn find_degrees(m: usize, k: usize) -> DegreeSplit {
    assert!(k >= 1, "find_degrees needs k >= 1");
    let base = m / k;
    let rem = m % k;
    DegreeSplit {
        parts: (0..k).map(|i| base + usize::from(i < rem)).collect(),
    }
}

/// `A = sum_i A_{i/k}(x^k) x^i`; returns `(A_{0/k}, ..., A_{k-1/k})`.
pub fn split(a: &Poly, k: usize) -> Vec<Poly> {
    let dims = find_degrees(a.dim(), k);
    dims.parts
        .iter()
        .enumerate()
        .map(|(i, &mi)| Poly::new((0..mi).map(|j| a[i + j * k]).collect()))
        .collect()
}

/// Transpose (and inverse) of [`split`]: interleaves the pieces back into
/// `K[x]_m`.
pub fn split_t(parts: &[Poly], m: usize) -> Result<Poly> {
    let k = parts.len();
    if k == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let dims = find_degrees(m, k);
    let mut out = vec![FieldElement::ZERO; m];
    for (i, (part, &mi)) in parts.iter().zip(&dims.parts).enumerate() {
        if part.dim() != mi {
            return Err(Error::DimensionMismatch {
                expected: mi,
                got: part.dim(),
            });
        }
        for (j, &c) in part.coeffs().iter().enumerate() {
            out[i + j * k] = c;
        }
    }
    Ok(Poly::new(out))
}

/// `A_0 G_0 + ... + A_{k-1} G_{k-1} mod x^n`.
pub fn lincomb(md: &Modulus, parts: &[Poly], g: &[Poly], n: usize) -> Result<Poly> {
    if parts.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: parts.len(),
        });
    }
    let mut acc = vec![FieldElement::ZERO; n];
    for (a, gi) in parts.iter().zip(g) {
        if a.dim() == 0 {
            continue;
        }
        let prod = mul_trunc(md, a, gi, n)?;
        for (s, &c) in acc.iter_mut().zip(prod.coeffs()) {
            *s = md.add(*s, c);
        }
    }
    Ok(Poly::new(acc))
}

/// Transpose of [`lincomb`] with every part in `K[x]_n`: one middle product
/// per `G_i`.
pub fn lincomb_t(md: &Modulus, a: &Poly, g: &[Poly]) -> Result<Vec<Poly>> {
    g.iter().map(|gi| mul_trunc_t(md, a, gi, a.dim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md101() -> Modulus {
        Modulus::new(101).unwrap()
    }

    fn rand_poly(md: &Modulus, rng: &mut ChaCha8Rng, n: usize) -> Poly {
        Poly::new((0..n).map(|_| md.elem(rng.gen())).collect())
    }

    /// Dense matrix of a linear map `K^m -> K^n`, one column per basis vector.
    fn matrix_of(m: usize, f: impl Fn(&Poly) -> Poly) -> Vec<Vec<FieldElement>> {
        (0..m).map(|j| f(&Poly::basis(j, m)).into_coeffs()).collect()
    }

    fn assert_transposed(
        m: usize,
        n: usize,
        f: impl Fn(&Poly) -> Poly,
        ft: impl Fn(&Poly) -> Poly,
    ) {
        let cols = matrix_of(m, &f);
        let cols_t = matrix_of(n, &ft);
        for i in 0..n {
            for j in 0..m {
                assert_eq!(cols[j][i], cols_t[i][j], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn power_subst_examples() {
        let md = md101();
        assert_eq!(power_subst(&Poly::from_u64s(&md, &[1, 1]), 2).values(), vec![1, 0, 1]);
        let a = Poly::from_u64s(&md, &[1, 1, 1]);
        assert_eq!(power_subst(&a, 3).values(), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(power_subst(&a, 1), a);
        let b = Poly::from_u64s(&md, &[1, 0, 1, 0, 1]);
        assert_eq!(power_subst_t(&b, 2, 3).values(), vec![1, 1, 1]);
        assert_eq!(power_subst_t(&b, 1, 5), b);
        assert_transposed(4, 10, |a| power_subst(a, 3), |b| power_subst_t(b, 3, 4));
    }

    #[test]
    fn reverse_truncate_scale_diag() {
        let md = md101();
        let a = Poly::from_u64s(&md, &[1, 2, 3]);
        assert_eq!(reverse(&a).values(), vec![3, 2, 1]);
        assert_eq!(reverse(&reverse(&a)), a);
        let one = Poly::from_u64s(&md, &[5]);
        assert_eq!(reverse(&one), one);
        let b = Poly::from_u64s(&md, &[1, 1, 1]);
        assert_eq!(truncate(&b, 2).values(), vec![1, 1]);
        assert_eq!(truncate(&b, 3), b);
        assert_eq!(truncate(&b, 5).values(), vec![1, 1, 1, 0, 0]);
        assert_eq!(scale(&md, &b, md.elem(2)).values(), vec![1, 2, 4]);
        assert_eq!(scale(&md, &b, FieldElement::ONE), b);
        let l = md.elem(7);
        assert_eq!(scale(&md, &scale(&md, &a, l), md.inv(l).unwrap()), a);
        assert_eq!(scale(&md, &a, FieldElement::ZERO).values(), vec![1, 0, 0]);
        let (fact, inv_fact) = md.factorials(3).unwrap();
        assert_eq!(diagonal(&md, &b, &fact).unwrap().values(), vec![1, 1, 2]);
        assert_eq!(diagonal(&md, &b, &[FieldElement::ONE; 3]).unwrap(), b);
        assert_eq!(
            diagonal(&md, &diagonal(&md, &a, &fact).unwrap(), &inv_fact).unwrap(),
            a
        );
        assert!(diagonal(&md, &a, &fact[..2]).is_err());
    }

    /// Repeated synthetic division by `x + a` gives the Taylor coefficients
    /// of `A` at `-a`, i.e. the coefficients of `A(x - a)`... so we divide
    /// by `x - (-a)` to expand around `-a`, yielding `A(x + a)` in powers of x.
    fn horner_shift(md: &Modulus, a: &Poly, s: FieldElement) -> Poly {
        let mut rem: Vec<FieldElement> = a.coeffs().to_vec();
        let mut out = Vec::new();
        let root = s; // expand A(y) around y = s: A(x + s) = sum c_i x^i
        while !rem.is_empty() {
            // divide rem by (y - root)
            let n = rem.len();
            let mut q = vec![FieldElement::ZERO; n.saturating_sub(1)];
            let mut carry = FieldElement::ZERO;
            for i in (0..n).rev() {
                let v = md.add(rem[i], md.mul(carry, root));
                if i == 0 {
                    out.push(v);
                } else {
                    q[i - 1] = v;
                }
                carry = v;
            }
            rem = q;
        }
        Poly::new(out)
    }

    #[test]
    fn taylor_shift_examples() {
        let md = md101();
        let x2 = Poly::from_u64s(&md, &[0, 0, 1]);
        assert_eq!(taylor_shift(&md, &x2, FieldElement::ONE).unwrap().values(), vec![1, 2, 1]);
        assert_eq!(taylor_shift(&md, &x2, FieldElement::ZERO).unwrap(), x2);

        let big = Modulus::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = rand_poly(&big, &mut rng, 40);
        let s = big.elem(7);
        assert_eq!(taylor_shift(&big, &a, s).unwrap(), horner_shift(&big, &a, s));
        let a = rand_poly(&big, &mut rng, 300);
        assert_eq!(taylor_shift(&big, &a, s).unwrap(), horner_shift(&big, &a, s));
    }

    #[test]
    fn taylor_shift_transpose() {
        let md = md101();
        let a = md.elem(9);
        let b = Poly::from_u64s(&md, &[3, 4]);
        // matrix [[1, a], [0, 1]], transpose [[1, 0], [a, 1]]
        let expect = vec![md.elem(3), md.add(md.mul(a, md.elem(3)), md.elem(4))];
        assert_eq!(taylor_shift_t(&md, &b, a).unwrap().into_coeffs(), expect);
        assert_eq!(taylor_shift_t(&md, &b, FieldElement::ZERO).unwrap(), b);

        let big = Modulus::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [32usize, 100] {
            let s = big.elem(rng.gen());
            let u = rand_poly(&big, &mut rng, n);
            let v = rand_poly(&big, &mut rng, n);
            let lhs = dot(&big, taylor_shift(&big, &u, s).unwrap().coeffs(), v.coeffs());
            let rhs = dot(&big, u.coeffs(), taylor_shift_t(&big, &v, s).unwrap().coeffs());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn shift_guards_precision() {
        let md = md101();
        let a = Poly::zero(101);
        assert!(matches!(
            taylor_shift(&md, &a, FieldElement::ONE),
            Err(Error::PrecisionExceedsModulus { .. })
        ));
    }

    #[test]
    fn degrees_and_split() {
        assert_eq!(find_degrees(7, 3).parts, vec![3, 2, 2]);
        assert_eq!(find_degrees(9, 1).parts, vec![9]);
        assert_eq!(find_degrees(6, 3).parts, vec![2, 2, 2]);
        assert_eq!(find_degrees(1, 3).parts, vec![1, 0, 0]);
        let md = md101();
        let a = Poly::from_u64s(&md, &[1, 2, 3, 4]);
        let parts = split(&a, 2);
        assert_eq!(parts[0].values(), vec![1, 3]);
        assert_eq!(parts[1].values(), vec![2, 4]);
        assert_eq!(split(&a, 1), vec![a.clone()]);
        assert_eq!(split_t(&parts, 4).unwrap(), a);
        assert_eq!(split_t(std::slice::from_ref(&a), 4).unwrap(), a);
        assert!(matches!(split_t(&parts, 5), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lincomb_examples() {
        let md = md101();
        let p = Poly::from_u64s(&md, &[1, 2, 3]);
        assert_eq!(
            lincomb(&md, std::slice::from_ref(&p), &[Poly::from_u64s(&md, &[1])], 2).unwrap().values(),
            vec![1, 2]
        );
        let one = Poly::from_u64s(&md, &[1]);
        let x = Poly::from_u64s(&md, &[0, 1]);
        assert_eq!(
            lincomb(&md, &[one.clone(), one.clone()], &[one.clone(), x], 3).unwrap().values(),
            vec![1, 1, 0]
        );
        let out = lincomb_t(&md, &p, &[one, Poly::zero(3)]).unwrap();
        assert_eq!(out[0], p);
        assert!(out[1].is_zero());
    }

    #[test]
    fn lincomb_transpose_bilinear() {
        let md = Modulus::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 16;
        let g: Vec<Poly> = (0..3).map(|_| rand_poly(&md, &mut rng, n)).collect();
        let parts: Vec<Poly> = (0..3).map(|_| rand_poly(&md, &mut rng, n)).collect();
        let b = rand_poly(&md, &mut rng, n);
        let lhs = dot(&md, lincomb(&md, &parts, &g, n).unwrap().coeffs(), b.coeffs());
        let bt = lincomb_t(&md, &b, &g).unwrap();
        let rhs = parts
            .iter()
            .zip(&bt)
            .fold(FieldElement::ZERO, |s, (p, q)| md.add(s, dot(&md, p.coeffs(), q.coeffs())));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn every_operator_matches_its_transpose_matrix() {
        let md = Modulus::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for m in [1usize, 2, 5, 17, 32] {
            let lam = md.elem(rng.gen());
            assert_transposed(m, m, |a| scale(&md, a, lam), |a| scale(&md, a, lam));
            assert_transposed(m, m, reverse, reverse);
            assert_transposed(
                m,
                m,
                |a| taylor_shift(&md, a, lam).unwrap(),
                |a| taylor_shift_t(&md, a, lam).unwrap(),
            );
            for n in [1usize, 3, m, 32] {
                assert_transposed(m, n, |a| truncate(a, n), |a| truncate(a, m));
                let len = 1 + (rng.gen::<usize>() % 40);
                let p = rand_poly(&md, &mut rng, len);
                assert_transposed(
                    m,
                    n,
                    |a| mul_trunc(&md, a, &p, n).unwrap(),
                    |a| mul_trunc_t(&md, a, &p, m).unwrap(),
                );
            }
            for k in 1..=4 {
                let mk = k * (m - 1) + 1;
                assert_transposed(m, mk, |a| power_subst(a, k), |a| power_subst_t(a, k, m));
                // split viewed as K^m -> K^m (concatenated parts)
                let concat = |a: &Poly| {
                    Poly::new(split(a, k).into_iter().flat_map(Poly::into_coeffs).collect())
                };
                let dims = find_degrees(m, k);
                let unconcat = |a: &Poly| {
                    let mut off = 0;
                    let parts: Vec<Poly> = dims
                        .parts
                        .iter()
                        .map(|&d| {
                            let p = Poly::new(a.coeffs()[off..off + d].to_vec());
                            off += d;
                            p
                        })
                        .collect();
                    split_t(&parts, m).unwrap()
                };
                assert_transposed(m, m, concat, unconcat);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn shift_round_trip(vals in proptest::collection::vec(0u64..101, 1..64), s in 0u64..101) {
            let md = md101();
            let a = Poly::from_u64s(&md, &vals);
            let s = md.elem(s);
            let b = taylor_shift(&md, &a, s).unwrap();
            proptest::prop_assert_eq!(taylor_shift(&md, &b, md.neg(s)).unwrap(), a);
        }

        #[test]
        fn split_reassembles(vals in proptest::collection::vec(0u64..101, 1..50), k in 1usize..6) {
            let md = md101();
            let a = Poly::from_u64s(&md, &vals);
            let parts = split(&a, k);
            proptest::prop_assert_eq!(find_degrees(a.dim(), k).total(), a.dim());
            // A(x) = sum_i A_i(x^k) x^i
            let mut rebuilt = vec![FieldElement::ZERO; a.dim()];
            for (i, p) in parts.iter().enumerate() {
                let spread = power_subst(p, k);
                for (j, &c) in spread.coeffs().iter().enumerate() {
                    if i + j < rebuilt.len() {
                        rebuilt[i + j] = md.add(rebuilt[i + j], c);
                    }
                }
            }
            proptest::prop_assert_eq!(Poly::new(rebuilt), a);
        }
    }
}
