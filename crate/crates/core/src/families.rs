//! Classical polynomial families as structured bivariate series
//! `sum_n c_n P_n(x) t^n = u(x) v(t) f(g(x) h(t))`, and conversions
//! between the monomial basis and `(P_n)`.

use std::fmt;
use std::sync::Arc;

use crate::bivariate::{eval_bivariate, eval_bivariate_inv, series_one, BivariateSpec, SeriesFn};
use crate::compseq::{CompositionOp as Op, CompositionSequence, CostClass};
use crate::error::{Error, Result};
use crate::modfield::{FieldElement, Modulus};
use crate::poly::Poly;
use crate::polyops::diagonal;
use crate::seriesops::{series_exp_full, series_inv, series_log, series_pow_field};

/// A family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Laguerre { alpha: FieldElement },
    Hermite,
    Jacobi { alpha: FieldElement, beta: FieldElement },
    Fibonacci,
    Euler { alpha: FieldElement },
    Bernoulli { alpha: FieldElement },
    Mott,
    Spread,
    Bessel,
    Falling,
    Bell,
    Bernoulli2,
    Charlier { a: FieldElement },
    Actuarial { beta: FieldElement },
    Narumi { a: FieldElement },
    Peters { lambda: FieldElement, mu: i64 },
    MeixnerPollaczek { lambda: FieldElement, s: FieldElement, i: FieldElement },
    Meixner { beta: FieldElement, c: FieldElement },
    Krawtchouk { p: FieldElement, n: FieldElement },
    MittagLeffler,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Laguerre { .. } => "laguerre",
            FamilyKind::Hermite => "hermite",
            FamilyKind::Jacobi { .. } => "jacobi",
            FamilyKind::Fibonacci => "fibonacci",
            FamilyKind::Euler { .. } => "euler",
            FamilyKind::Bernoulli { .. } => "bernoulli",
            FamilyKind::Mott => "mott",
            FamilyKind::Spread => "spread",
            FamilyKind::Bessel => "bessel",
            FamilyKind::Falling => "falling",
            FamilyKind::Bell => "bell",
            FamilyKind::Bernoulli2 => "bernoulli2",
            FamilyKind::Charlier { .. } => "charlier",
            FamilyKind::Actuarial { .. } => "actuarial",
            FamilyKind::Narumi { .. } => "narumi",
            FamilyKind::Peters { .. } => "peters",
            FamilyKind::MeixnerPollaczek { .. } => "meixner_pollaczek",
            FamilyKind::Meixner { .. } => "meixner",
            FamilyKind::Krawtchouk { .. } => "krawtchouk",
            FamilyKind::MittagLeffler => "mittag_leffler",
        }
    }

    /// Parses `name` or `name(p1,p2,...)`. Field parameters accept
    /// integers, negatives and fractions; Peters' `mu` is an integer.
    /// `meixner_pollaczek(lambda,s)` picks a square root of -1 itself.
    pub fn parse(md: &Modulus, text: &str) -> Result<FamilyKind> {
        let text = text.trim();
        let (name, args) = match text.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("missing ')' in {text:?}")))?;
                let args: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                (name.trim(), args)
            }
            None => (text, Vec::new()),
        };
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!("{name} takes {k} parameter(s), got {}", args.len())))
            }
        };
        let el = |i: usize| md.parse_elem(args[i]);
        let kind = match name {
            "laguerre" => {
                want(1)?;
                FamilyKind::Laguerre { alpha: el(0)? }
            }
            "hermite" => {
                want(0)?;
                FamilyKind::Hermite
            }
            "jacobi" => {
                want(2)?;
                FamilyKind::Jacobi { alpha: el(0)?, beta: el(1)? }
            }
            "fibonacci" => {
                want(0)?;
                FamilyKind::Fibonacci
            }
            "euler" => {
                want(1)?;
                FamilyKind::Euler { alpha: el(0)? }
            }
            "bernoulli" => {
                want(1)?;
                FamilyKind::Bernoulli { alpha: el(0)? }
            }
            "mott" => {
                want(0)?;
                FamilyKind::Mott
            }
            "spread" => {
                want(0)?;
                FamilyKind::Spread
            }
            "bessel" => {
                want(0)?;
                FamilyKind::Bessel
            }
            "falling" => {
                want(0)?;
                FamilyKind::Falling
            }
            "bell" => {
                want(0)?;
                FamilyKind::Bell
            }
            "bernoulli2" => {
                want(0)?;
                FamilyKind::Bernoulli2
            }
            "charlier" => {
                want(1)?;
                FamilyKind::Charlier { a: el(0)? }
            }
            "actuarial" => {
                want(1)?;
                FamilyKind::Actuarial { beta: el(0)? }
            }
            "narumi" => {
                want(1)?;
                FamilyKind::Narumi { a: el(0)? }
            }
            "peters" => {
                want(2)?;
                let mu = args[1]
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("peters mu must be an integer: {:?}", args[1])))?;
                FamilyKind::Peters { lambda: el(0)?, mu }
            }
            "meixner_pollaczek" => {
                if args.len() != 2 && args.len() != 3 {
                    return Err(Error::Parse("meixner_pollaczek takes (lambda,s) or (lambda,s,i)".into()));
                }
                let i = if args.len() == 3 {
                    el(2)?
                } else {
                    md.sqrt_minus_one().ok_or_else(|| {
                        Error::SpecViolation("meixner_pollaczek needs p = 1 mod 4 (a square root of -1)".into())
                    })?
                };
                FamilyKind::MeixnerPollaczek { lambda: el(0)?, s: el(1)?, i }
            }
            "meixner" => {
                want(2)?;
                FamilyKind::Meixner { beta: el(0)?, c: el(1)? }
            }
            "krawtchouk" => {
                want(2)?;
                FamilyKind::Krawtchouk { p: el(0)?, n: el(1)? }
            }
            "mittag_leffler" => {
                want(0)?;
                FamilyKind::MittagLeffler
            }
            _ => return Err(Error::Parse(format!("unknown family {name:?}"))),
        };
        Ok(kind)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match self {
            FamilyKind::Laguerre { alpha } => write!(f, "{name}({alpha})"),
            FamilyKind::Jacobi { alpha, beta } => write!(f, "{name}({alpha},{beta})"),
            FamilyKind::Euler { alpha } | FamilyKind::Bernoulli { alpha } => write!(f, "{name}({alpha})"),
            FamilyKind::Charlier { a } | FamilyKind::Narumi { a } => write!(f, "{name}({a})"),
            FamilyKind::Actuarial { beta } => write!(f, "{name}({beta})"),
            FamilyKind::Peters { lambda, mu } => write!(f, "{name}({lambda},{mu})"),
            FamilyKind::MeixnerPollaczek { lambda, s, i } => write!(f, "{name}({lambda},{s},{i})"),
            FamilyKind::Meixner { beta, c } => write!(f, "{name}({beta},{c})"),
            FamilyKind::Krawtchouk { p, n } => write!(f, "{name}({p},{n})"),
            _ => write!(f, "{name}"),
        }
    }
}

/// Coefficient sequences `f_k` of the outer series `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterSeries {
    /// `exp(z)`: `f_k = 1/k!`.
    Exp,
    /// `1/(1 - z)`: `f_k = 1`.
    Geometric,
    /// `2F1(a, b; c; z)`.
    Hypergeometric { a: FieldElement, b: FieldElement, c: FieldElement },
    /// `z/(1 + 4z)`: `f_0 = 0`, `f_k = (-4)^{k-1}`.
    Spread,
}

/// First `n` coefficients of `f`.
pub fn f_coefficients(md: &Modulus, kind: OuterSeries, n: usize) -> Result<Vec<FieldElement>> {
    let mut out = Vec::with_capacity(n);
    match kind {
        OuterSeries::Exp => {
            md.check_precision(n)?;
            return Ok(md.factorials(n)?.1);
        }
        OuterSeries::Geometric => out.resize(n, FieldElement::ONE),
        OuterSeries::Hypergeometric { a, b, c } => {
            md.check_precision(n)?;
            let inv = md.inverses(n)?;
            // only the ratios feeding c_1..c_{n-1} are needed
            let steps = n.saturating_sub(1);
            let dens: Vec<FieldElement> = (0..steps).map(|k| md.add(c, md.from_usize(k))).collect();
            if let Some(k) = dens.iter().position(|d| d.is_zero()) {
                return Err(Error::ZeroCoefficient { index: k + 1 });
            }
            let inv_dens = md.batch_inv(&dens)?;
            let mut cur = FieldElement::ONE;
            for k in 0..n {
                out.push(cur);
                if k == steps {
                    break;
                }
                let kk = md.from_usize(k);
                let num = md.mul(md.add(a, kk), md.add(b, kk));
                let ratio = md.mul(md.mul(num, inv_dens[k]), inv[k + 1]);
                cur = md.mul(cur, ratio);
            }
        }
        OuterSeries::Spread => {
            let m4 = md.from_i64(-4);
            let mut cur = FieldElement::ONE;
            for k in 0..n {
                if k == 0 {
                    out.push(FieldElement::ZERO);
                } else {
                    out.push(cur);
                    cur = md.mul(cur, m4);
                }
            }
        }
    }
    Ok(out)
}

/// A family ready for conversions.
#[derive(Clone)]
pub struct Family {
    kind: FamilyKind,
    outer: OuterSeries,
    spec: BivariateSpec,
    prefactor: SeriesFn,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family")
            .field("kind", &self.kind.to_string())
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

fn seq(ops: Vec<Op>) -> Result<CompositionSequence> {
    CompositionSequence::new(ops).map_err(|e| Error::SpecViolation(format!("family parameters: {e}")))
}

fn frac(md: &Modulus, a: i64, b: i64) -> FieldElement {
    md.div(md.from_i64(a), md.from_i64(b)).expect("nonzero literal denominator")
}

fn poly_from(md: &Modulus, vals: &[i64], n: usize) -> Poly {
    Poly::from_i64s(md, vals).truncated(n)
}

fn series_fn<F>(f: F) -> SeriesFn
where
    F: Fn(&Modulus, usize) -> Result<Poly> + Send + Sync + 'static,
{
    Arc::new(move |md, n| Ok(f(md, n)?.into_coeffs()))
}

/// `(1 + c t)^e`.
fn binomial_power(c: FieldElement, e: FieldElement) -> SeriesFn {
    series_fn(move |md, n| {
        let base = Poly::new(vec![FieldElement::ONE, c]).truncated(n.max(1));
        series_pow_field(md, &base, e, n)
    })
}

/// `exp(c t^k)`.
fn exp_monomial(c: FieldElement, k: usize) -> SeriesFn {
    series_fn(move |md, n| {
        let mut arg = Poly::zero(n.max(k + 1));
        arg[k] = c;
        series_exp_full(md, &arg, n)
    })
}

/// `(t / (exp(t) - 1))^alpha`.
fn bernoulli_factor(alpha: FieldElement) -> SeriesFn {
    series_fn(move |md, n| {
        let m = n.max(1) + 1;
        let e = series_exp_full(md, &Poly::basis(1, m), m)?;
        let q = Poly::new(e.coeffs()[1..].to_vec());
        series_pow_field(md, &q, md.neg(alpha), n)
    })
}

/// `(t / log(1 + t))^a`.
fn log_factor(a: FieldElement) -> SeriesFn {
    series_fn(move |md, n| {
        let m = n.max(1) + 1;
        let l = series_log(md, &Poly::basis(1, m), m)?;
        let q = Poly::new(l.coeffs()[1..].to_vec());
        series_pow_field(md, &q, md.neg(a), n)
    })
}

fn falling_pochhammer_ratio(
    md: &Modulus,
    n: usize,
    num: impl Fn(usize) -> FieldElement,
    den: impl Fn(usize) -> FieldElement,
) -> Result<Vec<FieldElement>> {
    let steps = n.saturating_sub(1);
    let dens: Vec<FieldElement> = (0..steps).map(&den).collect();
    if let Some(k) = dens.iter().position(|d| d.is_zero()) {
        return Err(Error::SpecViolation(format!("prefactor c_{} is undefined", k + 1)));
    }
    let inv_dens = md.batch_inv(&dens)?;
    let mut out = Vec::with_capacity(n);
    let mut cur = FieldElement::ONE;
    for k in 0..n {
        out.push(cur);
        if k == steps {
            break;
        }
        cur = md.mul(cur, md.mul(num(k), inv_dens[k]));
    }
    Ok(out)
}

impl Family {
    /// Builds the descriptor, checking the parameters that the table's
    /// series depend on.
    pub fn new(md: &Modulus, kind: FamilyKind) -> Result<Family> {
        let one = FieldElement::ONE;
        let exp_prefactor: SeriesFn = Arc::new(|md, n| {
            md.check_precision(n)?;
            Ok(md.factorials(n)?.1)
        });
        let unit_prefactor: SeriesFn = Arc::new(|_md, n| Ok(vec![FieldElement::ONE; n]));
        let id = CompositionSequence::identity;
        let neg1 = md.from_i64(-1);
        let (outer, v, g, h, prefactor): (OuterSeries, SeriesFn, CompositionSequence, CompositionSequence, SeriesFn) =
            match kind {
                FamilyKind::Laguerre { alpha } => (
                    OuterSeries::Exp,
                    binomial_power(neg1, md.sub(neg1, alpha)),
                    seq(vec![Op::Mul(neg1)])?,
                    seq(vec![Op::Mul(neg1), Op::Add(one), Op::Inv, Op::Add(neg1)])?,
                    unit_prefactor,
                ),
                FamilyKind::Hermite => (
                    OuterSeries::Exp,
                    exp_monomial(neg1, 2),
                    seq(vec![Op::Mul(md.elem(2))])?,
                    id(),
                    exp_prefactor,
                ),
                FamilyKind::Jacobi { alpha, beta } => {
                    let s = md.add(md.add(alpha, beta), one);
                    let half = frac(md, 1, 2);
                    let outer = OuterSeries::Hypergeometric {
                        a: md.mul(s, half),
                        b: md.mul(md.add(s, one), half),
                        c: md.add(beta, one),
                    };
                    let b1 = md.add(beta, one);
                    let prefactor: SeriesFn = Arc::new(move |md, n| {
                        falling_pochhammer_ratio(
                            md,
                            n,
                            |k| md.add(s, md.from_usize(k)),
                            |k| md.add(b1, md.from_usize(k)),
                        )
                    });
                    (
                        outer,
                        binomial_power(one, md.neg(s)),
                        seq(vec![Op::Add(one)])?,
                        seq(vec![
                            Op::Add(one),
                            Op::Inv,
                            Op::Mul(md.from_i64(-2)),
                            Op::Add(one),
                            Op::Pow(2),
                            Op::Mul(neg1),
                            Op::Add(one),
                            Op::Mul(half),
                        ])?,
                        prefactor,
                    )
                }
                FamilyKind::Fibonacci => (
                    OuterSeries::Geometric,
                    series_fn(|md, n| series_inv(md, &poly_from(md, &[1, 0, -1], n.max(1)), n)),
                    id(),
                    seq(vec![
                        Op::Pow(2),
                        Op::Mul(neg1),
                        Op::Add(one),
                        Op::Inv,
                        Op::Mul(md.elem(2)),
                        Op::Add(neg1),
                        Op::Pow(2),
                        Op::Add(neg1),
                        Op::Root { k: 2, alpha: md.elem(2), r: 1 },
                        Op::Mul(frac(md, 1, 2)),
                    ])?,
                    unit_prefactor,
                ),
                FamilyKind::Euler { alpha } => (
                    OuterSeries::Exp,
                    series_fn(move |md, n| {
                        let e = series_exp_full(md, &Poly::basis(1, n.max(2)), n.max(1))?;
                        let half = frac(md, 1, 2);
                        let mut q = Poly::new(e.coeffs().iter().map(|&c| md.mul(c, half)).collect());
                        q[0] = FieldElement::ONE;
                        series_pow_field(md, &q, md.neg(alpha), n)
                    }),
                    id(),
                    id(),
                    exp_prefactor,
                ),
                FamilyKind::Bernoulli { alpha } => {
                    (OuterSeries::Exp, bernoulli_factor(alpha), id(), id(), exp_prefactor)
                }
                FamilyKind::Mott => (
                    OuterSeries::Exp,
                    series_one(),
                    seq(vec![Op::Mul(neg1)])?,
                    seq(vec![
                        Op::Pow(2),
                        Op::Mul(neg1),
                        Op::Add(one),
                        Op::Root { k: 2, alpha: one, r: 0 },
                        Op::Add(one),
                        Op::Inv,
                        Op::Mul(md.elem(2)),
                        Op::Add(neg1),
                        Op::Root { k: 2, alpha: frac(md, 1, 2), r: 1 },
                    ])?,
                    exp_prefactor,
                ),
                FamilyKind::Spread => (
                    OuterSeries::Spread,
                    series_fn(|md, n| {
                        let mut v = vec![md.elem(2); n];
                        if n > 0 {
                            v[0] = FieldElement::ONE;
                        }
                        Ok(Poly::new(v))
                    }),
                    id(),
                    seq(vec![
                        Op::Mul(neg1),
                        Op::Add(one),
                        Op::Inv,
                        Op::Mul(md.from_i64(-2)),
                        Op::Add(one),
                        Op::Pow(2),
                        Op::Mul(neg1),
                        Op::Add(one),
                        Op::Mul(frac(md, 1, 2)),
                        Op::Mul(frac(md, -1, 2)),
                    ])?,
                    unit_prefactor,
                ),
                FamilyKind::Bessel => (
                    OuterSeries::Exp,
                    series_one(),
                    id(),
                    seq(vec![
                        Op::Mul(md.from_i64(-2)),
                        Op::Add(one),
                        Op::Root { k: 2, alpha: one, r: 0 },
                        Op::Mul(neg1),
                        Op::Add(one),
                    ])?,
                    exp_prefactor,
                ),
                FamilyKind::Falling => (OuterSeries::Exp, series_one(), id(), seq(vec![Op::Log])?, exp_prefactor),
                FamilyKind::Bell => (OuterSeries::Exp, series_one(), id(), seq(vec![Op::Exp])?, exp_prefactor),
                FamilyKind::Bernoulli2 => (
                    OuterSeries::Exp,
                    log_factor(one),
                    id(),
                    seq(vec![Op::Log])?,
                    exp_prefactor,
                ),
                FamilyKind::Charlier { a } => {
                    if a.is_zero() {
                        return Err(Error::SpecViolation("charlier needs a != 0".into()));
                    }
                    (
                        OuterSeries::Exp,
                        exp_monomial(neg1, 1),
                        id(),
                        seq(vec![Op::Mul(md.inv(a)?), Op::Log])?,
                        exp_prefactor,
                    )
                }
                FamilyKind::Actuarial { beta } => (
                    OuterSeries::Exp,
                    exp_monomial(beta, 1),
                    seq(vec![Op::Mul(neg1)])?,
                    seq(vec![Op::Exp])?,
                    exp_prefactor,
                ),
                FamilyKind::Narumi { a } => {
                    (OuterSeries::Exp, log_factor(a), id(), seq(vec![Op::Log])?, exp_prefactor)
                }
                FamilyKind::Peters { lambda, mu } => (
                    OuterSeries::Exp,
                    series_fn(move |md, n| {
                        let pw = series_pow_field(md, &Poly::from_u64s(md, &[1, 1]).truncated(n.max(1)), lambda, n)?;
                        let half = frac(md, 1, 2);
                        let q = Poly::new(
                            pw.coeffs()
                                .iter()
                                .enumerate()
                                .map(|(i, &c)| if i == 0 { FieldElement::ONE } else { md.mul(c, half) })
                                .collect(),
                        );
                        let y = series_pow_field(md, &q, md.from_i64(-mu), n)?;
                        let c = md.pow_i64(md.elem(2), -mu)?;
                        Ok(Poly::new(y.coeffs().iter().map(|&x| md.mul(x, c)).collect()))
                    }),
                    id(),
                    seq(vec![Op::Log])?,
                    exp_prefactor,
                ),
                FamilyKind::MeixnerPollaczek { lambda, s, i } => {
                    if md.mul(i, i) != neg1 {
                        return Err(Error::SpecViolation("meixner_pollaczek needs i^2 = -1".into()));
                    }
                    let s2 = md.mul(s, s);
                    if s.is_zero() || s2 == one {
                        return Err(Error::SpecViolation("meixner_pollaczek needs s != 0 and s^2 != 1".into()));
                    }
                    let s_inv = md.inv(s)?;
                    let lin = md.neg(md.add(s, s_inv));
                    (
                        OuterSeries::Exp,
                        series_fn(move |md, n| {
                            let base = Poly::new(vec![FieldElement::ONE, lin, FieldElement::ONE]).truncated(n.max(1));
                            series_pow_field(md, &base, md.neg(lambda), n)
                        }),
                        seq(vec![Op::Mul(i)])?,
                        seq(vec![
                            Op::Mul(md.neg(s_inv)),
                            Op::Add(one),
                            Op::Inv,
                            Op::Mul(md.sub(one, s2)),
                            Op::Add(md.sub(s2, one)),
                            Op::Log,
                        ])?,
                        unit_prefactor,
                    )
                }
                FamilyKind::Meixner { beta, c } => {
                    if c.is_zero() || c == one {
                        return Err(Error::SpecViolation("meixner needs c != 0 and c != 1".into()));
                    }
                    let ci = md.inv(c)?;
                    let prefactor: SeriesFn = Arc::new(move |md, n| {
                        falling_pochhammer_ratio(md, n, |k| md.add(beta, md.from_usize(k)), |k| md.from_usize(k + 1))
                    });
                    (
                        OuterSeries::Exp,
                        binomial_power(neg1, md.neg(beta)),
                        id(),
                        seq(vec![
                            Op::Mul(neg1),
                            Op::Add(one),
                            Op::Inv,
                            Op::Mul(md.sub(one, ci)),
                            Op::Add(md.sub(ci, one)),
                            Op::Log,
                        ])?,
                        prefactor,
                    )
                }
                FamilyKind::Krawtchouk { p, n: big_n } => {
                    if p.is_zero() || p == one {
                        return Err(Error::SpecViolation("krawtchouk needs p != 0 and p != 1".into()));
                    }
                    let pi = md.inv(p)?;
                    let prefactor: SeriesFn = Arc::new(move |md, n| {
                        falling_pochhammer_ratio(
                            md,
                            n,
                            |k| md.sub(big_n, md.from_usize(k)),
                            |k| md.from_usize(k + 1),
                        )
                    });
                    (
                        OuterSeries::Exp,
                        binomial_power(one, big_n),
                        id(),
                        seq(vec![Op::Add(one), Op::Inv, Op::Mul(pi), Op::Add(md.neg(pi)), Op::Log])?,
                        prefactor,
                    )
                }
                FamilyKind::MittagLeffler => (
                    OuterSeries::Exp,
                    series_one(),
                    id(),
                    seq(vec![
                        Op::Add(neg1),
                        Op::Inv,
                        Op::Mul(md.from_i64(-2)),
                        Op::Add(md.from_i64(-2)),
                        Op::Log,
                    ])?,
                    exp_prefactor,
                ),
            };
        let f: SeriesFn = Arc::new(move |md, n| f_coefficients(md, outer, n));
        Ok(Family {
            kind,
            outer,
            spec: BivariateSpec { u: series_one(), v, f, g, h },
            prefactor,
        })
    }

    /// Parses a family string such as `jacobi(3,5)` and builds it.
    pub fn parse(md: &Modulus, text: &str) -> Result<Family> {
        Family::new(md, FamilyKind::parse(md, text)?)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn outer(&self) -> OuterSeries {
        self.outer
    }

    pub fn spec(&self) -> &BivariateSpec {
        &self.spec
    }

    /// Whether `from_monomial` can succeed (every `f_k` nonzero).
    pub fn invertible(&self) -> bool {
        !matches!(self.outer, OuterSeries::Spread)
    }

    /// Cost class of the conversion: `M(n) log n` iff a sequence uses `E`
    /// or `L`.
    pub fn cost_class(&self) -> CostClass {
        if self.spec.g.cost_class() == CostClass::MLogM || self.spec.h.cost_class() == CostClass::MLogM {
            CostClass::MLogM
        } else {
            CostClass::M
        }
    }

    /// `c_0, ..., c_{n-1}`; a vanishing entry is a [`Error::SpecViolation`].
    pub fn prefactors(&self, md: &Modulus, n: usize) -> Result<Vec<FieldElement>> {
        let c = (self.prefactor)(md, n)?;
        if let Some(k) = c.iter().take(n).position(|x| x.is_zero()) {
            return Err(Error::SpecViolation(format!(
                "prefactor c_{k} of {} vanishes; P_{k} is undefined",
                self.kind
            )));
        }
        Ok(c[..n].to_vec())
    }

    /// `sum_j a_j P_j(x)` in the monomial basis.
    pub fn to_monomial(&self, md: &Modulus, a: &[FieldElement]) -> Result<Poly> {
        let n = a.len();
        md.check_precision(n)?;
        let c = self.prefactors(md, n)?;
        let c_inv = md.batch_inv(&c)?;
        let scaled = diagonal(md, &Poly::new(a.to_vec()), &c_inv)?;
        eval_bivariate(md, scaled.coeffs(), &self.spec, n)
    }

    /// Coordinates of `A` in the basis `(P_j)`.
    pub fn from_monomial(&self, md: &Modulus, a: &Poly) -> Result<Vec<FieldElement>> {
        let n = a.dim();
        md.check_precision(n)?;
        let c = self.prefactors(md, n)?;
        let b = eval_bivariate_inv(md, a, &self.spec, n)?;
        Ok(diagonal(md, &Poly::new(b), &c)?.into_coeffs())
    }
}

/// Parameters used for the catalogue listing and the test suites.
pub fn default_kinds(md: &Modulus) -> Vec<FamilyKind> {
    let e = |v: i64| md.from_i64(v);
    let i = md.sqrt_minus_one().unwrap_or(FieldElement::ZERO);
    vec![
        FamilyKind::Laguerre { alpha: e(3) },
        FamilyKind::Hermite,
        FamilyKind::Jacobi { alpha: e(3), beta: e(5) },
        FamilyKind::Fibonacci,
        FamilyKind::Euler { alpha: e(3) },
        FamilyKind::Bernoulli { alpha: e(3) },
        FamilyKind::Mott,
        FamilyKind::Spread,
        FamilyKind::Bessel,
        FamilyKind::Falling,
        FamilyKind::Bell,
        FamilyKind::Bernoulli2,
        FamilyKind::Charlier { a: e(2) },
        FamilyKind::Actuarial { beta: e(5) },
        FamilyKind::Narumi { a: e(2) },
        FamilyKind::Peters { lambda: e(2), mu: 3 },
        FamilyKind::MeixnerPollaczek { lambda: e(3), s: e(2), i },
        FamilyKind::Meixner { beta: e(5), c: e(7) },
        // A non-integer N keeps binom(N, n) nonzero for every n.
        FamilyKind::Krawtchouk { p: frac(md, 1, 3), n: frac(md, 21, 2) },
        FamilyKind::MittagLeffler,
    ]
}

/// All twenty families with default parameters.
pub fn catalog(md: &Modulus) -> Result<Vec<Family>> {
    default_kinds(md).into_iter().map(|k| Family::new(md, k)).collect()
}

/// Named composition sequences used by the test suites: the `g` and `h`
/// sequences of every family plus a few stand-alone examples.
pub fn catalog_sequences(md: &Modulus) -> Result<Vec<(String, CompositionSequence)>> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut push = |name: String, s: CompositionSequence, out: &mut Vec<(String, CompositionSequence)>| {
        if !s.is_empty() && seen.insert(s.to_string()) {
            out.push((name, s));
        }
    };
    for fam in catalog(md)? {
        push(format!("{}.g", fam.name()), fam.spec.g.clone(), &mut out);
        push(format!("{}.h", fam.name()), fam.spec.h.clone(), &mut out);
    }
    let parse = |s: &str| CompositionSequence::parse(md, s);
    push("mobius".into(), parse("M:3;A:2;Inv;M:5;A:7")?, &mut out);
    push("shifted_inverse".into(), parse("A:1;Inv")?, &mut out);
    push("two_x_over_square".into(), parse("A:1;Inv;M:-2;A:1;P:2;M:-1;A:1;M:1/2")?, &mut out);
    push("log_ratio".into(), parse("A:-1;Inv;M:-2;A:-2;L")?, &mut out);
    push("exp_log".into(), parse("E;L")?, &mut out);
    push("square".into(), parse("P:2")?, &mut out);
    push("cube_root_chain".into(), parse("P:3;M:8;A:1;Inv;A:-1;M:-1;R:3,2,1")?, &mut out);
    out.push(("identity".into(), CompositionSequence::identity()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{conversion_matrix, stirling_matrices};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn md() -> Modulus {
        Modulus::default()
    }

    fn fam(md: &Modulus, text: &str) -> Family {
        Family::parse(md, text).unwrap()
    }

    fn probe(md: &Modulus, f: &Family, n: usize) -> Vec<Vec<FieldElement>> {
        let cols: Vec<Poly> = (0..n).map(|j| f.to_monomial(md, Poly::basis(j, n).coeffs()).unwrap()).collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }

    #[test]
    fn f_coefficient_examples() {
        let md = md();
        let half = frac(&md, 1, 2);
        let sixth = frac(&md, 1, 6);
        let one = FieldElement::ONE;
        assert_eq!(f_coefficients(&md, OuterSeries::Exp, 4).unwrap(), vec![one, one, half, sixth]);
        assert_eq!(f_coefficients(&md, OuterSeries::Geometric, 3).unwrap(), vec![one; 3]);
        let hyp = OuterSeries::Hypergeometric { a: one, b: one, c: one };
        assert_eq!(f_coefficients(&md, hyp, 6).unwrap(), vec![one; 6]);
        assert_eq!(
            f_coefficients(&md, OuterSeries::Spread, 4).unwrap(),
            vec![FieldElement::ZERO, one, md.from_i64(-4), md.elem(16)]
        );
        // c = -1 makes (c)_k vanish from k = 2 on
        let bad = OuterSeries::Hypergeometric { a: one, b: one, c: md.from_i64(-1) };
        assert_eq!(f_coefficients(&md, bad, 5), Err(Error::ZeroCoefficient { index: 2 }));
        assert!(f_coefficients(&md, bad, 2).is_ok());
    }

    #[test]
    fn conversion_examples() {
        let md = md();
        let falling = fam(&md, "falling");
        assert_eq!(falling.to_monomial(&md, Poly::basis(2, 3).coeffs()).unwrap(), Poly::from_i64s(&md, &[0, -1, 1]));
        assert_eq!(
            falling.from_monomial(&md, &Poly::from_i64s(&md, &[0, 0, 1])).unwrap(),
            Poly::from_i64s(&md, &[0, 1, 1]).coeffs()
        );
        let hermite = fam(&md, "hermite");
        assert_eq!(hermite.to_monomial(&md, Poly::basis(2, 3).coeffs()).unwrap(), Poly::from_i64s(&md, &[-2, 0, 4]));
        assert_eq!(
            hermite.from_monomial(&md, &Poly::from_i64s(&md, &[-2, 0, 4])).unwrap(),
            Poly::basis(2, 3).coeffs()
        );
        // P_0 is a constant
        for f in catalog(&md).unwrap() {
            let p0 = f.to_monomial(&md, Poly::basis(0, 5).coeffs()).unwrap();
            assert!(p0.coeffs()[1..].iter().all(|c| c.is_zero()), "{}", f.name());
        }
        let spread = fam(&md, "spread");
        assert!(!spread.invertible());
        assert!(matches!(spread.from_monomial(&md, &Poly::basis(1, 4)), Err(Error::SingularDiagonal { .. })));
    }

    #[test]
    fn descriptor_examples() {
        let md = md();
        let h = fam(&md, "hermite");
        let c = h.prefactors(&md, 4).unwrap();
        assert_eq!(c, md.factorials(4).unwrap().1);
        assert_eq!(h.outer(), OuterSeries::Exp);
        let j = fam(&md, "jacobi(3,5)");
        // (9)_n / (6)_n
        assert_eq!(j.prefactors(&md, 3).unwrap(), vec![FieldElement::ONE, frac(&md, 9, 6), frac(&md, 90, 42)]);
        let k = fam(&md, "krawtchouk(1/3,21/2)");
        // binom(21/2, 2) = (21/2)(19/2)/2
        assert_eq!(k.prefactors(&md, 3).unwrap()[2], frac(&md, 399, 8));
    }

    #[test]
    fn every_family_matches_reference_matrix() {
        let md = md();
        for f in catalog(&md).unwrap() {
            for n in [1usize, 2, 12] {
                assert_eq!(probe(&md, &f, n), conversion_matrix(&md, f.kind(), n).unwrap(), "{} n={n}", f.name());
            }
        }
    }

    #[test]
    fn degrees_and_cost_classes() {
        let md = md();
        let n = 10;
        for f in catalog(&md).unwrap() {
            let fk = f_coefficients(&md, f.outer(), n).unwrap();
            for (j, fj) in fk.iter().enumerate() {
                let p = f.to_monomial(&md, Poly::basis(j, n).coeffs()).unwrap();
                if !fj.is_zero() {
                    assert_eq!(p.degree(), Some(j), "{} P_{j}", f.name());
                }
            }
            let m_table = matches!(
                f.kind(),
                FamilyKind::Laguerre { .. }
                    | FamilyKind::Hermite
                    | FamilyKind::Jacobi { .. }
                    | FamilyKind::Fibonacci
                    | FamilyKind::Euler { .. }
                    | FamilyKind::Bernoulli { .. }
                    | FamilyKind::Mott
                    | FamilyKind::Spread
                    | FamilyKind::Bessel
            );
            assert_eq!(f.cost_class() == CostClass::M, m_table, "{}", f.name());
        }
    }

    #[test]
    fn falling_factorials_are_stirling_numbers() {
        let md = md();
        let n = 20;
        let f = fam(&md, "falling");
        let (s1, s2) = stirling_matrices(&md, n);
        assert_eq!(probe(&md, &f, n), s1);
        let cols: Vec<Vec<FieldElement>> =
            (0..n).map(|j| f.from_monomial(&md, &Poly::basis(j, n)).unwrap()).collect();
        let inv: Vec<Vec<FieldElement>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        assert_eq!(inv, s2);
    }

    #[test]
    fn parse_and_display() {
        let md = md();
        for f in catalog(&md).unwrap() {
            let text = f.kind().to_string();
            assert_eq!(FamilyKind::parse(&md, &text).unwrap(), f.kind(), "{text}");
        }
        assert!(FamilyKind::parse(&md, "hermite(1)").is_err());
        assert!(FamilyKind::parse(&md, "laguerre").is_err());
        assert!(FamilyKind::parse(&md, "chebyshev").is_err());
        assert!(FamilyKind::parse(&md, "peters(2,x)").is_err());
        let mp = FamilyKind::parse(&md, "meixner_pollaczek(3,2)").unwrap();
        let FamilyKind::MeixnerPollaczek { i, .. } = mp else { panic!() };
        assert_eq!(md.mul(i, i), md.from_i64(-1));
        let small = Modulus::new(103).unwrap();
        assert!(FamilyKind::parse(&small, "meixner_pollaczek(3,2)").is_err());
    }

    #[test]
    fn parameters_breaking_hypotheses_are_rejected() {
        let md = md();
        // Meixner with beta = 0: c_n = (0)_n / n! vanishes
        let f = fam(&md, "meixner(0,7)");
        assert!(f.to_monomial(&md, &[FieldElement::ONE; 4]).is_err());
        // Krawtchouk with an integer N: binom(2, 3) = 0
        let f = fam(&md, "krawtchouk(1/3,2)");
        assert!(f.to_monomial(&md, &[FieldElement::ONE; 4]).is_err());
        assert!(f.to_monomial(&md, &[FieldElement::ONE; 3]).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip(idx in 0usize..20, n in 1usize..80, seed in any::<u64>()) {
            let md = md();
            let f = catalog(&md).unwrap().swap_remove(idx);
            prop_assume!(f.invertible());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<FieldElement> = (0..n).map(|_| md.elem(rng.gen_range(0..md.p()))).collect();
            let back = f.from_monomial(&md, &f.to_monomial(&md, &a).unwrap()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
