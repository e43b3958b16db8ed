//! Prime-field arithmetic and the multiplication kernels.
//!
//! Elements are stored as canonical residues in `[0, p)`. Products go
//! through Montgomery reduction with a runtime modulus, so any odd prime
//! below 2^62 is accepted; the transform capacity is governed by the
//! 2-adic valuation of `p - 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Error, Result};
use crate::evalgrid::GridTree;
use crate::poly::Poly;

/// Default working prime, `15 * 2^27 + 1`.
pub const DEFAULT_MODULUS: u64 = 2_013_265_921;

/// Below this operand length products use the schoolbook kernel.
pub const NTT_THRESHOLD: usize = 40;

/// Largest product length computed without a transform when the modulus
/// lacks the 2-adicity for an NTT of that length.
pub const FALLBACK_MAX_LEN: usize = 1 << 14;

/// A residue modulo the prime of some [`Modulus`].
#[repr(transparent)]
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The canonical representative in `[0, p)`.
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Twiddles {
    /// `fwd[len + j] = w_{2 len}^j` in Montgomery form, for `len` a power of two.
    fwd: Vec<u64>,
    inv: Vec<u64>,
}

/// A prime modulus together with its Montgomery constants, root-of-unity
/// tables and per-size caches.
pub struct Modulus {
    p: u64,
    neg_pinv: u64,
    r2: u64,
    two_adicity: u32,
    root: u64,
    /// `p < 2^31`: transforms use Montgomery arithmetic with `R = 2^32`,
    /// whose products fit in 64 bits.
    small: bool,
    /// `R mod p` and `R^2 mod p` for the transform's Montgomery radix.
    ntt_r: u64,
    ntt_r2: u64,
    twiddles: RwLock<Arc<Twiddles>>,
    pub(crate) grid_cache: Mutex<HashMap<usize, Arc<GridTree>>>,
    /// Longest `(k!, 1/k!)` tables computed so far.
    fact_cache: RwLock<Arc<FactorialTables>>,
}

type FactorialTables = (Vec<FieldElement>, Vec<FieldElement>);

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus")
            .field("p", &self.p)
            .field("two_adicity", &self.two_adicity)
            .finish()
    }
}

impl Default for Modulus {
    fn default() -> Self {
        Modulus::new(DEFAULT_MODULUS).expect("default modulus is prime")
    }
}

/// `x mod p` for `x < 2p`, without a data-dependent branch.
#[inline(always)]
fn reduce_once(x: u64, p: u64) -> u64 {
    x.min(x.wrapping_sub(p))
}

/// Montgomery product `a * w / R` with `R = 2^32` (`SMALL`) or `2^64`;
/// needs `a < 2p` and `w < p`, returns a canonical residue.
#[inline(always)]
fn mont_mul<const SMALL: bool>(a: u64, w: u64, p: u64, neg_pinv: u64) -> u64 {
    if SMALL {
        // bounds: a < 2p, w < p, p < 2^31, so nothing below can overflow
        let t = a.wrapping_mul(w);
        let m = (t as u32).wrapping_mul(neg_pinv as u32) as u64;
        reduce_once(t.wrapping_add(m.wrapping_mul(p)) >> 32, p)
    } else {
        let t = a as u128 * w as u128;
        let m = (t as u64).wrapping_mul(neg_pinv);
        let r = (t.wrapping_add(m as u128 * p as u128) >> 64) as u64;
        reduce_once(r, p)
    }
}

/// Runs a kernel through the widest vector extension the CPU offers; the
/// kernels are plain loops, so this only changes what the compiler may
/// emit for them.
macro_rules! simd_dispatch {
    ($kernel:ident :: <$c:tt> ($($arg:expr),*)) => {{
        #[cfg(target_arch = "x86_64")]
        {
            if std::is_x86_feature_detected!("avx512f")
                && std::is_x86_feature_detected!("avx512dq")
                && std::is_x86_feature_detected!("avx512vl")
            {
                #[target_feature(enable = "avx512f,avx512dq,avx512vl")]
                unsafe fn wide(f: impl FnOnce()) {
                    f()
                }
                // SAFETY: the required features were detected above.
                return unsafe { wide(|| $kernel::<$c>($($arg),*)) };
            }
            if std::is_x86_feature_detected!("avx2") {
                #[target_feature(enable = "avx2")]
                unsafe fn wide(f: impl FnOnce()) {
                    f()
                }
                // SAFETY: the required feature was detected above.
                return unsafe { wide(|| $kernel::<$c>($($arg),*)) };
            }
        }
        $kernel::<$c>($($arg),*)
    }};
}

// Decimation in frequency; output in bit-reversed order.
#[inline(always)]
fn forward_kernel<const SMALL: bool>(a: &mut [u64], roots: &[u64], p: u64, npinv: u64) {
    let n = a.len();
    let mut half = n >> 1;
    while half >= 2 {
        let roots = &roots[half..2 * half];
        for block in a.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(roots) {
                let (u, v) = (*x, *y);
                *x = reduce_once(u.wrapping_add(v), p);
                *y = mont_mul::<SMALL>(u.wrapping_add(p).wrapping_sub(v), w, p, npinv);
            }
        }
        half >>= 1;
    }
    if n >= 2 {
        // last layer: the only twiddle is 1
        for pair in a.chunks_exact_mut(2) {
            let (u, v) = (pair[0], pair[1]);
            pair[0] = reduce_once(u.wrapping_add(v), p);
            pair[1] = reduce_once(u.wrapping_add(p).wrapping_sub(v), p);
        }
    }
}

// Decimation in time from bit-reversed input; output natural order, unscaled.
#[inline(always)]
fn inverse_kernel<const SMALL: bool>(a: &mut [u64], roots: &[u64], p: u64, npinv: u64) {
    let n = a.len();
    if n >= 2 {
        for pair in a.chunks_exact_mut(2) {
            let (u, v) = (pair[0], pair[1]);
            pair[0] = reduce_once(u.wrapping_add(v), p);
            pair[1] = reduce_once(u.wrapping_add(p).wrapping_sub(v), p);
        }
    }
    let mut half = 2;
    while half < n {
        let roots = &roots[half..2 * half];
        for block in a.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(roots) {
                let u = *x;
                let v = mont_mul::<SMALL>(*y, w, p, npinv);
                *x = reduce_once(u.wrapping_add(v), p);
                *y = reduce_once(u.wrapping_add(p).wrapping_sub(v), p);
            }
        }
        half <<= 1;
    }
}

#[inline(always)]
fn pointwise_kernel<const SMALL: bool>(acc: &mut [u64], x: &[u64], y: &[u64], p: u64, npinv: u64) {
    for ((a, &u), &v) in acc.iter_mut().zip(x).zip(y) {
        *a = reduce_once(a.wrapping_add(mont_mul::<SMALL>(u, v, p, npinv)), p);
    }
}

fn mulmod_slow(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_slow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_slow(r, a, p);
        }
        a = mulmod_slow(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = powmod_slow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_slow(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Modulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..1 << 62).contains(&p) {
            return Err(Error::InvalidModulus {
                p,
                reason: "must be an odd prime below 2^62".into(),
            });
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus {
                p,
                reason: "not prime".into(),
            });
        }
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % p as u128) as u64;
        let r2 = mulmod_slow(r1, r1, p);
        let two_adicity = (p - 1).trailing_zeros();
        let odd = (p - 1) >> two_adicity;
        // An element of exact order 2^s is c^odd for any non-residue c.
        let mut root = 1;
        for c in 2..p {
            let w = powmod_slow(c, odd, p);
            if powmod_slow(w, 1 << (two_adicity - 1), p) == p - 1 {
                root = w;
                break;
            }
        }
        let small = p < 1 << 31;
        let (ntt_r, ntt_r2) = if small {
            ((1u64 << 32) % p, ((1u128 << 64) % p as u128) as u64)
        } else {
            (r1, r2)
        };
        Ok(Modulus {
            p,
            small,
            ntt_r,
            ntt_r2,
            neg_pinv: inv.wrapping_neg(),
            r2,
            two_adicity,
            root,
            twiddles: RwLock::new(Arc::new(Twiddles {
                fwd: Vec::new(),
                inv: Vec::new(),
            })),
            grid_cache: Mutex::new(HashMap::new()),
            fact_cache: RwLock::new(Arc::new((Vec::new(), Vec::new()))),
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn two_adicity(&self) -> u32 {
        self.two_adicity
    }

    /// Largest transform length supported by this prime.
    pub fn ntt_capacity(&self) -> usize {
        if self.two_adicity >= usize::BITS - 1 {
            usize::MAX
        } else {
            1usize << self.two_adicity
        }
    }

    /// A root of unity of order exactly `2^two_adicity`.
    pub fn root_of_unity(&self) -> FieldElement {
        FieldElement(self.root)
    }

    /// A square root of -1, when `p = 1 mod 4`.
    pub fn sqrt_minus_one(&self) -> Option<FieldElement> {
        if self.two_adicity < 2 {
            return None;
        }
        Some(self.pow(self.root_of_unity(), 1 << (self.two_adicity - 2)))
    }

    /// Every precision handed to a public entry point must stay below `p`
    /// so that `0!, ..., (n-1)!` are invertible.
    pub fn check_precision(&self, n: usize) -> Result<()> {
        if (n as u128) >= self.p as u128 {
            Err(Error::PrecisionExceedsModulus { n, p: self.p })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_pinv);
        let u = (t.wrapping_add(m as u128 * self.p as u128) >> 64) as u64;
        reduce_once(u, self.p)
    }

    #[inline]
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        let r = (v as i128).rem_euclid(self.p as i128) as u64;
        FieldElement(r)
    }

    pub fn from_usize(&self, v: usize) -> FieldElement {
        let v = v as u64;
        FieldElement(if v < self.p { v } else { v % self.p })
    }

    /// Parses `"7"`, `"-3"` or `"1/3"` as a field element.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num = self.parse_elem(num)?;
            let den = self.parse_elem(den)?;
            return self.div(num, den);
        }
        let (neg, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not an integer: {s:?}")));
        }
        let mut acc = 0u64;
        for b in digits.bytes() {
            acc = ((acc as u128 * 10 + (b - b'0') as u128) % self.p as u128) as u64;
        }
        let x = FieldElement(acc);
        Ok(if neg { self.neg(x) } else { x })
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(reduce_once(a.0.wrapping_add(b.0), self.p))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(reduce_once(a.0.wrapping_add(self.p).wrapping_sub(b.0), self.p))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.small {
            // two Montgomery steps with R = 2^32: a b / R, then times R^2 / R
            let t = mont_mul::<true>(a.0, b.0, self.p, self.neg_pinv);
            return FieldElement(mont_mul::<true>(t, self.ntt_r2, self.p, self.neg_pinv));
        }
        let t = self.redc(a.0 as u128 * b.0 as u128);
        FieldElement(self.redc(t as u128 * self.r2 as u128))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` for a signed exponent; negative exponents need `a != 0`.
    pub fn pow_i64(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `(0!, ..., (n-1)!)` and their inverses. Requires `n <= p`.
    pub fn factorials(&self, n: usize) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
        if n == 0 {
            return Ok((Vec::new(), Vec::new()));
        }
        self.check_precision(n - 1)?;
        {
            let cached = self.fact_cache.read().unwrap();
            if cached.0.len() >= n {
                return Ok((cached.0[..n].to_vec(), cached.1[..n].to_vec()));
            }
        }
        // the tables are prefixes of each other, so keep the longest
        let tables = self.factorials_uncached(n)?;
        let mut guard = self.fact_cache.write().unwrap();
        if guard.0.len() < n {
            *guard = Arc::new(tables.clone());
        }
        Ok(tables)
    }

    fn factorials_uncached(&self, n: usize) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
        let mut fact = Vec::with_capacity(n);
        fact.push(FieldElement::ONE);
        for i in 1..n {
            let prev = fact[i - 1];
            fact.push(self.mul(prev, self.from_usize(i)));
        }
        let mut inv_fact = vec![FieldElement::ZERO; n];
        inv_fact[n - 1] = self.inv(fact[n - 1])?;
        for i in (1..n).rev() {
            inv_fact[i - 1] = self.mul(inv_fact[i], self.from_usize(i));
        }
        Ok((fact, inv_fact))
    }

    /// `(1/1, 1/2, ..., 1/n)` at indices `1..=n`; index 0 holds zero.
    pub fn inverses(&self, n: usize) -> Result<Vec<FieldElement>> {
        let (fact, inv_fact) = self.factorials(n + 1)?;
        let mut out = vec![FieldElement::ZERO; n + 1];
        for i in 1..=n {
            out[i] = self.mul(inv_fact[i], fact[i - 1]);
        }
        Ok(out)
    }

    fn twiddles(&self, len: usize) -> Arc<Twiddles> {
        {
            let tw = self.twiddles.read().unwrap();
            if tw.fwd.len() >= len {
                return Arc::clone(&tw);
            }
        }
        let mut guard = self.twiddles.write().unwrap();
        if guard.fwd.len() >= len {
            return Arc::clone(&guard);
        }
        let mut fwd = vec![0u64; len];
        let mut inv = vec![0u64; len];
        let mut half = 1;
        while half < len {
            // primitive (2*half)-th root
            let shift = self.two_adicity - (half.trailing_zeros() + 1);
            let w = self.pow(FieldElement(self.root), 1u64 << shift);
            let wi = self.inv(w).expect("root of unity is nonzero");
            let (mut a, mut b) = (FieldElement::ONE, FieldElement::ONE);
            for j in 0..half {
                fwd[half + j] = mulmod_slow(a.0, self.ntt_r, self.p);
                inv[half + j] = mulmod_slow(b.0, self.ntt_r, self.p);
                a = self.mul(a, w);
                b = self.mul(b, wi);
            }
            half <<= 1;
        }
        let tw = Arc::new(Twiddles { fwd, inv });
        *guard = Arc::clone(&tw);
        tw
    }

    /// `a * w / R` for the transform's radix `R`; `w` is a twiddle (or
    /// any value) in that Montgomery form, so the result is `a * w_true`.
    #[inline(always)]
    fn ntt_mul<const SMALL: bool>(&self, a: u64, w: u64) -> u64 {
        mont_mul::<SMALL>(a, w, self.p, self.neg_pinv)
    }

    fn ntt_forward<const SMALL: bool>(&self, a: &mut [u64], tw: &Twiddles) {
        simd_dispatch!(forward_kernel::<SMALL>(a, &tw.fwd, self.p, self.neg_pinv))
    }

    fn ntt_inverse<const SMALL: bool>(&self, a: &mut [u64], tw: &Twiddles) {
        simd_dispatch!(inverse_kernel::<SMALL>(a, &tw.inv, self.p, self.neg_pinv))
    }

    /// Cyclic convolution of length `len` (a power of two within capacity).
    fn cyclic_conv(&self, a: &[FieldElement], b: &[FieldElement], len: usize) -> Vec<FieldElement> {
        let fa = self.transform(a, len);
        let squaring = a.as_ptr() == b.as_ptr() && a.len() == b.len();
        let mut acc = vec![0u64; len];
        if squaring {
            self.pointwise_mul_acc(&mut acc, &fa, &fa);
        } else {
            self.pointwise_mul_acc(&mut acc, &fa, &self.transform(b, len));
        }
        self.inverse_transform(acc)
    }

    /// `a` folded modulo `x^len - 1`, in the transform domain (bit-reversed
    /// order). `len` must be a power of two within [`Self::ntt_capacity`].
    pub(crate) fn transform(&self, a: &[FieldElement], len: usize) -> Vec<u64> {
        debug_assert!(len.is_power_of_two() && len <= self.ntt_capacity());
        let tw = self.twiddles(len);
        let mut fa = vec![0u64; len];
        for (i, x) in a.iter().enumerate() {
            let slot = &mut fa[i & (len - 1)];
            *slot = reduce_once(slot.wrapping_add(x.0), self.p);
        }
        if self.small {
            self.ntt_forward::<true>(&mut fa, &tw);
        } else {
            self.ntt_forward::<false>(&mut fa, &tw);
        }
        fa
    }

    /// `acc += x * y` pointwise, for transforms made by [`Self::transform`];
    /// the result is only meaningful to [`Self::inverse_transform`].
    pub(crate) fn pointwise_mul_acc(&self, acc: &mut [u64], x: &[u64], y: &[u64]) {
        if self.small {
            simd_dispatch!(pointwise_kernel::<true>(acc, x, y, self.p, self.neg_pinv))
        } else {
            simd_dispatch!(pointwise_kernel::<false>(acc, x, y, self.p, self.neg_pinv))
        }
    }

    /// Back from the transform domain after [`Self::pointwise_mul_acc`].
    pub(crate) fn inverse_transform(&self, mut fa: Vec<u64>) -> Vec<FieldElement> {
        let len = fa.len();
        let tw = self.twiddles(len);
        let n_inv = self.inv(self.from_usize(len)).expect("len < p");
        // each pointwise product left a factor 1/R; n^-1 R^2 in Montgomery
        // form restores it and divides by the length
        let scale = mulmod_slow(n_inv.0, self.ntt_r2, self.p);
        if self.small {
            self.ntt_inverse::<true>(&mut fa, &tw);
            fa.into_iter().map(|x| FieldElement(self.ntt_mul::<true>(x, scale))).collect()
        } else {
            self.ntt_inverse::<false>(&mut fa, &tw);
            fa.into_iter().map(|x| FieldElement(self.ntt_mul::<false>(x, scale))).collect()
        }
    }

    fn schoolbook(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            for (slot, &y) in acc[i..].iter_mut().zip(b) {
                // accumulates x*y/R, corrected once at the end
                let t = slot.wrapping_add(self.redc(x.0 as u128 * y.0 as u128));
                *slot = reduce_once(t, self.p);
            }
        }
        acc.into_iter()
            .map(|v| FieldElement(self.redc(v as u128 * self.r2 as u128)))
            .collect()
    }

    /// Inverts every entry with a single field inversion.
    pub fn batch_inv(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut prefix = Vec::with_capacity(v.len());
        let mut acc = FieldElement::ONE;
        for &x in v {
            if x.is_zero() {
                return Err(Error::DivisionByZero);
            }
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        let mut out = vec![FieldElement::ZERO; v.len()];
        for i in (0..v.len()).rev() {
            out[i] = self.mul(inv, prefix[i]);
            inv = self.mul(inv, v[i]);
        }
        Ok(out)
    }

    /// Full product of two coefficient vectors.
    pub fn mul_vec(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if a.is_empty() || b.is_empty() {
            return Ok(Vec::new());
        }
        let full = a.len() + b.len() - 1;
        // trailing zeros do not change the product, only its length
        let a = &a[..a.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1)];
        let b = &b[..b.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1)];
        if a.is_empty() || b.is_empty() {
            return Ok(vec![FieldElement::ZERO; full]);
        }
        let mut out = self.mul_vec_dense(a, b)?;
        out.resize(full, FieldElement::ZERO);
        Ok(out)
    }

    fn mul_vec_dense(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let len = a.len() + b.len() - 1;
        if a.len().min(b.len()) <= NTT_THRESHOLD {
            return Ok(self.schoolbook(a, b));
        }
        let size = len.next_power_of_two();
        if size > self.ntt_capacity() {
            if len <= FALLBACK_MAX_LEN {
                return Ok(self.schoolbook(a, b));
            }
            return Err(Error::CapacityExceeded {
                len,
                capacity: self.ntt_capacity(),
            });
        }
        let mut out = self.cyclic_conv(a, b, size);
        out.truncate(len);
        Ok(out)
    }

    /// `a * b mod x^n`, always of length `n`.
    pub fn mul_vec_trunc(
        &self,
        a: &[FieldElement],
        b: &[FieldElement],
        n: usize,
    ) -> Result<Vec<FieldElement>> {
        let a = &a[..a.len().min(n)];
        let b = &b[..b.len().min(n)];
        let mut out = self.mul_vec(a, b)?;
        out.resize(n, FieldElement::ZERO);
        Ok(out)
    }

    /// Middle product: `c_i = sum_j a_j q_{j-i}` for `i < m`, the transpose
    /// of `x -> x q mod x^{a.len()}` restricted to `K[x]_m`.
    pub fn mul_vec_middle(
        &self,
        a: &[FieldElement],
        q: &[FieldElement],
        m: usize,
    ) -> Result<Vec<FieldElement>> {
        let n = a.len();
        let q = &q[..q.len().min(n)];
        let q = &q[..q.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1)];
        if m == 0 {
            return Ok(Vec::new());
        }
        if q.is_empty() || n == 0 {
            return Ok(vec![FieldElement::ZERO; m]);
        }
        let d = q.len() - 1;
        let a = &a[..n.min(m + d)];
        let n = a.len();
        if n.min(q.len()) <= NTT_THRESHOLD {
            let mut out = vec![FieldElement::ZERO; m];
            for (i, slot) in out.iter_mut().enumerate() {
                let mut acc = 0u64;
                let hi = n.min(i + d + 1);
                for j in i..hi {
                    let t = acc.wrapping_add(self.redc(a[j].0 as u128 * q[j - i].0 as u128));
                    acc = reduce_once(t, self.p);
                }
                *slot = FieldElement(self.redc(acc as u128 * self.r2 as u128));
            }
            return Ok(out);
        }
        let rev: Vec<FieldElement> = q.iter().rev().copied().collect();
        let size = n.max(d + m).next_power_of_two();
        if size > self.ntt_capacity() {
            let full = self.mul_vec(a, &rev)?;
            let mut out: Vec<FieldElement> = full.into_iter().skip(d).take(m).collect();
            out.resize(m, FieldElement::ZERO);
            return Ok(out);
        }
        let conv = self.cyclic_conv(a, &rev, size);
        Ok(conv[d..d + m].to_vec())
    }
}

/// Exact product; the result lives in `K[x]_{dim a + dim b - 1}`.
pub fn poly_mul(md: &Modulus, a: &Poly, b: &Poly) -> Result<Poly> {
    Ok(Poly::new(md.mul_vec(a.coeffs(), b.coeffs())?))
}

/// `Mul_{m,n}(a, P)`: `a P mod x^n` for `a` in `K[x]_m`.
pub fn mul_trunc(md: &Modulus, a: &Poly, p: &Poly, n: usize) -> Result<Poly> {
    Ok(Poly::new(md.mul_vec_trunc(a.coeffs(), p.coeffs(), n)?))
}

/// Transpose of [`mul_trunc`]`(., P, n): K[x]_m -> K[x]_n`, applied to `a`
/// in `K[x]_n`; realised as the middle product
/// `(a Rev(P) mod x^{n+d}) div x^d`.
pub fn mul_trunc_t(md: &Modulus, a: &Poly, p: &Poly, m: usize) -> Result<Poly> {
    Ok(Poly::new(md.mul_vec_middle(a.coeffs(), p.coeffs(), m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(md: &Modulus, rng: &mut ChaCha8Rng, n: usize) -> Vec<FieldElement> {
        (0..n).map(|_| md.elem(rng.gen())).collect()
    }

    fn naive_mul(md: &Modulus, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = md.add(out[i + j], md.mul(x, y));
            }
        }
        out
    }

    #[test]
    fn small_prime_arith() {
        let md = Modulus::new(101).unwrap();
        assert_eq!(md.add(md.elem(50), md.elem(60)).value(), 9);
        assert_eq!(md.inv(md.elem(2)).unwrap().value(), 51);
        assert_eq!(md.pow(md.elem(3), 100).value(), 1);
        assert_eq!(md.inv(FieldElement::ZERO), Err(Error::DivisionByZero));
        assert_eq!(md.sub(md.elem(3), md.elem(5)).value(), 99);
        assert_eq!(md.from_i64(-1).value(), 100);
        assert_eq!(md.parse_elem("1/2").unwrap().value(), 51);
        assert_eq!(md.parse_elem("-2").unwrap().value(), 99);
        assert!(md.parse_elem("x1").is_err());
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(Modulus::new(100), Err(Error::InvalidModulus { .. })));
        assert!(Modulus::new(2).is_err());
        assert!(Modulus::new(1 << 62).is_err());
        assert!(Modulus::new((1 << 61) - 1).is_ok());
    }

    #[test]
    fn root_of_unity_has_full_order() {
        for p in [101u64, 998_244_353, DEFAULT_MODULUS, 1_099_511_627_777] {
            if !is_prime(p) {
                continue;
            }
            let md = Modulus::new(p).unwrap();
            let w = md.root_of_unity();
            let s = md.two_adicity();
            assert_eq!(md.pow(w, 1 << s), FieldElement::ONE);
            assert_eq!(md.pow(w, 1 << (s - 1)), md.from_i64(-1));
        }
        let md = Modulus::default();
        let i = md.sqrt_minus_one().unwrap();
        assert_eq!(md.mul(i, i), md.from_i64(-1));
    }

    #[test]
    fn hand_products() {
        let md = Modulus::new(101).unwrap();
        let one_x = vec![FieldElement::ONE, FieldElement::ONE];
        assert_eq!(
            md.mul_vec(&one_x, &one_x).unwrap(),
            vec![md.elem(1), md.elem(2), md.elem(1)]
        );
        let a = vec![md.elem(1), md.elem(1), md.elem(1)];
        assert_eq!(md.mul_vec(&a, &[FieldElement::ONE]).unwrap(), a);
        assert_eq!(
            md.mul_vec_trunc(&one_x, &one_x, 2).unwrap(),
            vec![md.elem(1), md.elem(2)]
        );
        let one_minus_x = vec![md.elem(1), md.from_i64(-1)];
        assert_eq!(
            md.mul_vec_trunc(&a, &one_minus_x, 3).unwrap(),
            vec![md.elem(1), FieldElement::ZERO, FieldElement::ZERO]
        );
    }

    #[test]
    fn products_match_schoolbook_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // both transform paths: 32-bit radix below 2^31, 64-bit radix above
        for p in [101u64, DEFAULT_MODULUS, 3_221_225_473, 4_179_340_454_199_820_289] {
            let md = Modulus::new(p).unwrap();
            for &(n, m) in &[(50usize, 50usize), (1, 64), (64, 3), (41, 41), (200, 77), (513, 300)] {
                let a = rand_vec(&md, &mut rng, n);
                let b = rand_vec(&md, &mut rng, m);
                assert_eq!(md.mul_vec(&a, &b).unwrap(), naive_mul(&md, &a, &b), "p={p} {n}x{m}");
                assert_eq!(md.mul_vec(&a, &a).unwrap(), naive_mul(&md, &a, &a), "p={p} square {n}");
            }
        }
    }

    #[test]
    fn middle_product_is_transpose_of_truncated_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let md = Modulus::default();
        for &(n, m, d) in &[(16usize, 16usize, 5usize), (100, 60, 99), (64, 64, 64), (7, 30, 3)] {
            let q = rand_vec(&md, &mut rng, d + 1);
            let a = rand_vec(&md, &mut rng, m);
            let b = rand_vec(&md, &mut rng, n);
            let lhs = md.mul_vec_trunc(&a, &q, n).unwrap();
            let rhs = md.mul_vec_middle(&b, &q, m).unwrap();
            let dot = |x: &[FieldElement], y: &[FieldElement]| {
                x.iter().zip(y).fold(FieldElement::ZERO, |s, (&u, &v)| md.add(s, md.mul(u, v)))
            };
            assert_eq!(dot(&lhs, &b), dot(&a, &rhs), "n={n} m={m} d={d}");
        }
    }

    #[test]
    fn capacity_exceeded_on_small_two_adicity() {
        let md = Modulus::new(101).unwrap();
        let a = vec![FieldElement::ONE; FALLBACK_MAX_LEN];
        assert!(matches!(md.mul_vec(&a, &a), Err(Error::CapacityExceeded { .. })));
    }
}
