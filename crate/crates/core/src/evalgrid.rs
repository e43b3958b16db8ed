//! Multipoint evaluation and interpolation on the grid `0, 1, ..., n-1`,
//! their transposes, and the maps `Exp_{m,n}: A -> A(exp(x) - 1)`,
//! `Log_{m,n}: A -> A(log(1 + x))` with their transposes.
//!
//! Everything is organised around a tree whose node for the point range
//! `S` stores `D_S = prod_{i in S} (1 - i x)`. Transposed evaluation is
//! `sum_i v_i / (1 - i x) mod x^n`, obtained by combining numerators up
//! the tree; evaluation is its transpose, walking down the tree.

use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::modfield::{mul_trunc, mul_trunc_t, poly_mul, FieldElement, Modulus};
use crate::poly::Poly;
use crate::polyops::{diagonal, reverse, taylor_shift, taylor_shift_t, truncate};

/// Node sizes at or below this are leaves handled by direct formulas.
const LEAF_SIZE: usize = 16;

/// Internal nodes at least this large combine their children in the
/// transform domain, reusing cached transforms of the children's `D`.
const TRANSFORM_MIN: usize = 32;

/// Transforms of the children's denominators (and their reversals) at the
/// node's cyclic length.
#[derive(Debug)]
struct NodeTransforms {
    len: usize,
    dl: Vec<u64>,
    dr: Vec<u64>,
    dl_rev: Vec<u64>,
    dr_rev: Vec<u64>,
}

#[derive(Debug)]
struct Node {
    /// First point and number of points covered.
    start: usize,
    len: usize,
    /// `prod (1 - i x)` over the node's points, dimension `len + 1`.
    d: Poly,
    children: Option<(usize, usize)>,
    /// Filled on first use; `None` when the node is combined directly.
    transforms: OnceLock<Option<NodeTransforms>>,
}

/// Cached tree for the grid `0..n`.
#[derive(Debug)]
pub struct GridTree {
    n: usize,
    nodes: Vec<Node>,
    root: usize,
    /// `1 / D_root mod x^n`.
    d_inv: Poly,
    /// `1 / Q'(i)` where `Q = prod (x - j)`.
    inv_qprime: Vec<FieldElement>,
    fact: Vec<FieldElement>,
    inv_fact: Vec<FieldElement>,
}

impl GridTree {
    fn build(md: &Modulus, n: usize) -> Result<GridTree> {
        md.check_precision(n)?;
        let mut nodes = Vec::new();
        let root = Self::build_node(md, &mut nodes, 0, n)?;
        let d_inv = crate::seriesops::series_inv(md, &nodes[root].d, n)?;
        let (fact, inv_fact) = md.factorials(n.max(1))?;
        let inv_qprime = (0..n)
            .map(|i| {
                let v = md.mul(inv_fact[i], inv_fact[n - 1 - i]);
                if (n - 1 - i) % 2 == 1 {
                    md.neg(v)
                } else {
                    v
                }
            })
            .collect();
        Ok(GridTree {
            n,
            nodes,
            root,
            d_inv,
            inv_qprime,
            fact,
            inv_fact,
        })
    }

    fn build_node(md: &Modulus, nodes: &mut Vec<Node>, start: usize, len: usize) -> Result<usize> {
        let (d, children) = if len <= LEAF_SIZE {
            let mut d = vec![FieldElement::ONE];
            for i in start..start + len {
                d = times_linear(md, &d, md.from_usize(i));
            }
            (Poly::new(d), None)
        } else {
            let half = len / 2;
            let l = Self::build_node(md, nodes, start, half)?;
            let r = Self::build_node(md, nodes, start + half, len - half)?;
            (poly_mul(md, &nodes[l].d, &nodes[r].d)?, Some((l, r)))
        };
        nodes.push(Node {
            start,
            len,
            d,
            children,
            transforms: OnceLock::new(),
        });
        Ok(nodes.len() - 1)
    }

    fn transforms(&self, md: &Modulus, node: usize) -> Option<&NodeTransforms> {
        let nd = &self.nodes[node];
        nd.transforms
            .get_or_init(|| {
                let (l, r) = nd.children?;
                let len = nd.len.next_power_of_two();
                if nd.len < TRANSFORM_MIN || len > md.ntt_capacity() {
                    return None;
                }
                let (dl, dr) = (&self.nodes[l].d, &self.nodes[r].d);
                Some(NodeTransforms {
                    len,
                    dl: md.transform(dl.coeffs(), len),
                    dr: md.transform(dr.coeffs(), len),
                    dl_rev: md.transform(reverse(dl).coeffs(), len),
                    dr_rev: md.transform(reverse(dr).coeffs(), len),
                })
            })
            .as_ref()
    }

    /// Numerator `N_S` with `sum_{i in S} v_i / (1 - i x) = N_S / D_S`,
    /// dimension `|S|`.
    fn combine_up(&self, md: &Modulus, node: usize, v: &[FieldElement]) -> Result<Poly> {
        let nd = &self.nodes[node];
        match nd.children {
            None => {
                // acc <- acc (1 - i x) + v_i prefix, prefix <- prefix (1 - i x)
                let mut acc = vec![FieldElement::ZERO; nd.len];
                let mut prefix = vec![FieldElement::ZERO; nd.len + 1];
                prefix[0] = FieldElement::ONE;
                for (t, i) in (nd.start..nd.start + nd.len).enumerate() {
                    let root = md.from_usize(i);
                    for j in (1..=t).rev() {
                        acc[j] = md.sub(acc[j], md.mul(root, acc[j - 1]));
                    }
                    for j in 0..=t {
                        acc[j] = md.add(acc[j], md.mul(v[t], prefix[j]));
                    }
                    for j in (1..=t + 1).rev() {
                        prefix[j] = md.sub(prefix[j], md.mul(root, prefix[j - 1]));
                    }
                }
                Ok(Poly::new(acc))
            }
            Some((l, r)) => {
                let (ln, rn) = (self.nodes[l].len, self.nodes[r].len);
                let nl = self.combine_up(md, l, &v[..ln])?;
                let nr = self.combine_up(md, r, &v[ln..])?;
                if let Some(tf) = self.transforms(md, node) {
                    // N_l D_r + N_r D_l has exactly ln + rn coefficients
                    let mut acc = vec![0u64; tf.len];
                    md.pointwise_mul_acc(&mut acc, &md.transform(nl.coeffs(), tf.len), &tf.dr);
                    md.pointwise_mul_acc(&mut acc, &md.transform(nr.coeffs(), tf.len), &tf.dl);
                    let mut out = md.inverse_transform(acc);
                    out.truncate(ln + rn);
                    return Ok(Poly::new(out));
                }
                let a = mul_trunc(md, &nl, &self.nodes[r].d, ln + rn)?;
                let b = mul_trunc(md, &nr, &self.nodes[l].d, ln + rn)?;
                Ok(Poly::new(
                    a.coeffs().iter().zip(b.coeffs()).map(|(&x, &y)| md.add(x, y)).collect(),
                ))
            }
        }
    }

    /// Transpose of [`combine_up`]: `nt` has dimension `|S|`, the output
    /// is written into `out` at the node's point indices.
    fn combine_down(&self, md: &Modulus, node: usize, nt: &Poly, out: &mut [FieldElement]) -> Result<()> {
        let nd = &self.nodes[node];
        match nd.children {
            None => {
                // Transpose of the leaf loop in `combine_up`, run backwards.
                let mut prefixes = Vec::with_capacity(nd.len);
                let mut prefix = vec![FieldElement::ONE];
                for i in nd.start..nd.start + nd.len {
                    let root = md.from_usize(i);
                    prefixes.push(prefix.clone());
                    prefix.push(FieldElement::ZERO);
                    for j in (1..prefix.len()).rev() {
                        prefix[j] = md.sub(prefix[j], md.mul(root, prefix[j - 1]));
                    }
                }
                let mut lam = nt.coeffs().to_vec();
                for t in (0..nd.len).rev() {
                    out[t] = crate::poly::dot(md, &lam, &prefixes[t]);
                    let root = md.from_usize(nd.start + t);
                    // transpose of multiplication by (1 - root x): dim t+1 -> t
                    for j in 0..t {
                        lam[j] = md.sub(lam[j], md.mul(root, lam[j + 1]));
                    }
                    lam.truncate(t);
                }
                Ok(())
            }
            Some((l, r)) => {
                let (ln, rn) = (self.nodes[l].len, self.nodes[r].len);
                let (ntl, ntr) = match self.transforms(md, node) {
                    Some(tf) if nt.dim() <= tf.len => {
                        // middle products: entry rn + i of nt * rev(D_r), and
                        // ln + i of nt * rev(D_l); wrap-around stays below them
                        let f = md.transform(nt.coeffs(), tf.len);
                        let mut a = vec![0u64; tf.len];
                        md.pointwise_mul_acc(&mut a, &f, &tf.dr_rev);
                        let mut b = vec![0u64; tf.len];
                        md.pointwise_mul_acc(&mut b, &f, &tf.dl_rev);
                        let a = md.inverse_transform(a);
                        let b = md.inverse_transform(b);
                        (Poly::new(a[rn..rn + ln].to_vec()), Poly::new(b[ln..ln + rn].to_vec()))
                    }
                    _ => (
                        mul_trunc_t(md, nt, &self.nodes[r].d, ln)?,
                        mul_trunc_t(md, nt, &self.nodes[l].d, rn)?,
                    ),
                };
                let (lo, hi) = out.split_at_mut(ln);
                self.combine_down(md, l, &ntl, lo)?;
                self.combine_down(md, r, &ntr, hi)
            }
        }
    }
}

/// `a (1 - root x)`, one dimension larger.
fn times_linear(md: &Modulus, a: &[FieldElement], root: FieldElement) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO; a.len() + 1];
    for (j, &c) in a.iter().enumerate() {
        out[j] = md.add(out[j], c);
        out[j + 1] = md.sub(out[j + 1], md.mul(c, root));
    }
    out
}

/// Cached tree for the grid `0..n`.
pub fn grid_tree(md: &Modulus, n: usize) -> Result<Arc<GridTree>> {
    if let Some(t) = md.grid_cache.lock().expect("grid cache poisoned").get(&n) {
        return Ok(Arc::clone(t));
    }
    let tree = Arc::new(GridTree::build(md, n)?);
    md.grid_cache
        .lock()
        .expect("grid cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&tree));
    Ok(tree)
}

fn check_len(md: &Modulus, n: usize) -> Result<()> {
    md.check_precision(n)
}

/// `(A(0), ..., A(n-1))` for `A` in `K[x]_n`.
pub fn multieval_grid(md: &Modulus, a: &Poly) -> Result<Vec<FieldElement>> {
    let n = a.dim();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let t = grid_tree(md, n)?;
    let top = mul_trunc_t(md, a, &t.d_inv, n)?;
    let mut out = vec![FieldElement::ZERO; n];
    t.combine_down(md, t.root, &top, &mut out)?;
    Ok(out)
}

/// Transposed multipoint evaluation: `sum_i v_i i^j` for `j < n`.
pub fn multieval_grid_t(md: &Modulus, v: &[FieldElement]) -> Result<Poly> {
    let n = v.len();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let t = grid_tree(md, n)?;
    let num = t.combine_up(md, t.root, v)?;
    mul_trunc(md, &num, &t.d_inv, n)
}

/// The unique `A` in `K[x]_n` with `A(i) = values_i`.
///
/// With `w_i = values_i / Q'(i)`, `Rev_n(A) = sum_i w_i D / (1 - i x)`,
/// which is exactly the tree numerator of `w`.
pub fn interp_grid(md: &Modulus, values: &[FieldElement]) -> Result<Poly> {
    let n = values.len();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let t = grid_tree(md, n)?;
    let w: Vec<FieldElement> = values.iter().zip(&t.inv_qprime).map(|(&a, &b)| md.mul(a, b)).collect();
    Ok(reverse(&t.combine_up(md, t.root, &w)?))
}

/// Transpose of [`interp_grid`].
pub fn interp_grid_t(md: &Modulus, a: &Poly) -> Result<Vec<FieldElement>> {
    let n = a.dim();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let t = grid_tree(md, n)?;
    let mut out = vec![FieldElement::ZERO; n];
    t.combine_down(md, t.root, &reverse(a), &mut out)?;
    for (o, &q) in out.iter_mut().zip(&t.inv_qprime) {
        *o = md.mul(*o, q);
    }
    Ok(out)
}

/// `Exp_{m,n}(A) = A(exp(x) - 1) mod x^n`.
pub fn exp_map(md: &Modulus, a: &Poly, n: usize) -> Result<Poly> {
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let t = grid_tree(md, n)?;
    let b = taylor_shift(md, &truncate(a, n), md.neg(FieldElement::ONE))?;
    let c = multieval_grid_t(md, b.coeffs())?;
    diagonal(md, &c, &t.inv_fact)
}

/// `Log_{m,n}(A) = A(log(1 + x)) mod x^n`.
pub fn log_map(md: &Modulus, a: &Poly, n: usize) -> Result<Poly> {
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(0));
    }
    let t = grid_tree(md, n)?;
    let b = diagonal(md, &truncate(a, n), &t.fact)?;
    let c = Poly::new(interp_grid_t(md, &b)?);
    taylor_shift(md, &c, FieldElement::ONE)
}

/// Transpose of [`exp_map`]: `K[x]_n -> K[x]_m`.
pub fn exp_map_t(md: &Modulus, a: &Poly, m: usize) -> Result<Poly> {
    let n = a.dim();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(m));
    }
    let t = grid_tree(md, n)?;
    let b = diagonal(md, a, &t.inv_fact)?;
    let c = Poly::new(multieval_grid(md, &b)?);
    Ok(truncate(&taylor_shift_t(md, &c, md.neg(FieldElement::ONE))?, m))
}

/// Transpose of [`log_map`]: `K[x]_n -> K[x]_m`.
pub fn log_map_t(md: &Modulus, a: &Poly, m: usize) -> Result<Poly> {
    let n = a.dim();
    check_len(md, n)?;
    if n == 0 {
        return Ok(Poly::zero(m));
    }
    let t = grid_tree(md, n)?;
    let b = taylor_shift_t(md, a, FieldElement::ONE)?;
    let c = interp_grid(md, b.coeffs())?;
    Ok(truncate(&diagonal(md, &c, &t.fact)?, m))
}

impl GridTree {
    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}
