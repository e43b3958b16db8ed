use std::ops::{Index, IndexMut};

use crate::modfield::{FieldElement, Modulus};

/// An element of `K[x]_m`: exactly `m` coefficients, lowest degree first.
///
/// The dimension is the vector length, so trailing zeros are significant:
/// they say which space the polynomial lives in, and the transposed
/// operators rely on that to know their target dimension.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(coeffs: Vec<FieldElement>) -> Self {
        Poly { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        Poly {
            coeffs: vec![FieldElement::ZERO; dim],
        }
    }

    /// The basis vector `x^i` inside `K[x]_dim`.
    pub fn basis(i: usize, dim: usize) -> Self {
        let mut p = Poly::zero(dim);
        p.coeffs[i] = FieldElement::ONE;
        p
    }

    pub fn from_u64s(md: &Modulus, vals: &[u64]) -> Self {
        Poly::new(vals.iter().map(|&v| md.elem(v)).collect())
    }

    pub fn from_i64s(md: &Modulus, vals: &[i64]) -> Self {
        Poly::new(vals.iter().map(|&v| md.from_i64(v)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElement> {
        self.coeffs
    }

    /// Degree of the highest nonzero coefficient, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `A mod x^n`, zero-padding when `n` exceeds the dimension.
    pub fn truncated(&self, n: usize) -> Poly {
        let mut c = self.coeffs[..self.dim().min(n)].to_vec();
        c.resize(n, FieldElement::ZERO);
        Poly::new(c)
    }

    pub fn values(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.value()).collect()
    }
}

impl From<Vec<FieldElement>> for Poly {
    fn from(coeffs: Vec<FieldElement>) -> Self {
        Poly::new(coeffs)
    }
}

impl Index<usize> for Poly {
    type Output = FieldElement;
    fn index(&self, i: usize) -> &FieldElement {
        &self.coeffs[i]
    }
}

impl IndexMut<usize> for Poly {
    fn index_mut(&mut self, i: usize) -> &mut FieldElement {
        &mut self.coeffs[i]
    }
}

/// Bilinear pairing `sum u_i v_i` used to state transposition identities.
pub fn dot(md: &Modulus, u: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    u.iter()
        .zip(v)
        .fold(FieldElement::ZERO, |s, (&a, &b)| md.add(s, md.mul(a, b)))
}
