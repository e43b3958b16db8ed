//! Built-in consistency suite: the fast paths against the reference
//! implementations in [`crate::oracle`], plus round trips, at sizes up to 64.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compseq::{eval, eval_inv, eval_t, CompositionSequence};
use crate::error::Result;
use crate::evalgrid::{exp_map, log_map};
use crate::families::{catalog, catalog_sequences, Family, FamilyKind};
use crate::modfield::{FieldElement, Modulus};
use crate::oracle::{conversion_matrix, horner_compose, stirling_matrices, Matrix};
use crate::poly::{dot, Poly};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of a whole run.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &str, outcome: Result<Option<String>>) {
        let (passed, detail) = match outcome {
            Ok(None) => (true, String::new()),
            Ok(Some(why)) => (false, why),
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

fn random_poly(md: &Modulus, rng: &mut ChaCha8Rng, n: usize) -> Poly {
    Poly::new((0..n).map(|_| md.elem(rng.gen_range(0..md.p()))).collect())
}

/// Matrix of `to_monomial` built column by column from basis vectors.
fn probed_matrix(md: &Modulus, fam: &Family, n: usize) -> Result<Matrix> {
    let mut m = vec![vec![FieldElement::ZERO; n]; n];
    for j in 0..n {
        let col = fam.to_monomial(md, Poly::basis(j, n).coeffs())?;
        for (i, &c) in col.coeffs().iter().enumerate() {
            m[i][j] = c;
        }
    }
    Ok(m)
}

fn invertible(md: &Modulus, seq: &CompositionSequence) -> Result<bool> {
    let tr = crate::compseq::compute_g(md, seq, 2)?;
    Ok(!tr.output()[1].is_zero())
}

/// Runs the suite; `quick` uses fewer sizes and samples.
pub fn run(md: &Modulus, quick: bool) -> Report {
    let mut report = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sizes: &[usize] = if quick { &[16] } else { &[8, 16, 32, 64] };
    let samples = if quick { 3 } else { 10 };

    let seqs = match catalog_sequences(md) {
        Ok(s) => s,
        Err(e) => {
            report.record("catalog sequences", Err(e));
            return report;
        }
    };
    for (name, seq) in &seqs {
        let outcome = (|| -> Result<Option<String>> {
            for &n in sizes {
                let g = crate::compseq::compute_g(md, seq, n)?.output().truncated(n);
                for _ in 0..samples {
                    let a = random_poly(md, &mut rng, n);
                    if eval(md, &a, seq, n)? != horner_compose(md, &a, &g, n) {
                        return Ok(Some(format!("eval differs from Horner at n={n}")));
                    }
                    let b = random_poly(md, &mut rng, n);
                    let lhs = dot(md, eval(md, &a, seq, n)?.coeffs(), b.coeffs());
                    let rhs = dot(md, a.coeffs(), eval_t(md, &b, seq, n)?.coeffs());
                    if lhs != rhs {
                        return Ok(Some(format!("transpose identity fails at n={n}")));
                    }
                    if invertible(md, seq)? && eval_inv(md, &eval(md, &a, seq, n)?, seq, n)? != a {
                        return Ok(Some(format!("inverse round trip fails at n={n}")));
                    }
                }
            }
            Ok(None)
        })();
        report.record(&format!("sequence {name}"), outcome);
    }

    let outcome = (|| -> Result<Option<String>> {
        for &n in sizes {
            let a = random_poly(md, &mut rng, n);
            if log_map(md, &exp_map(md, &a, n)?, n)? != a {
                return Ok(Some(format!("log_map o exp_map != id at n={n}")));
            }
        }
        Ok(None)
    })();
    report.record("exp/log maps", outcome);

    let fams = match catalog(md) {
        Ok(f) => f,
        Err(e) => {
            report.record("family catalogue", Err(e));
            return report;
        }
    };
    let mat_n = if quick { 8 } else { 24 };
    let trip_n = if quick { 24 } else { 64 };
    for fam in &fams {
        let outcome = (|| -> Result<Option<String>> {
            if probed_matrix(md, fam, mat_n)? != conversion_matrix(md, fam.kind(), mat_n)? {
                return Ok(Some(format!("conversion matrix differs from reference at n={mat_n}")));
            }
            if fam.invertible() {
                let a = random_poly(md, &mut rng, trip_n);
                let back = fam.from_monomial(md, &fam.to_monomial(md, a.coeffs())?)?;
                if back != a.coeffs() {
                    return Ok(Some(format!("round trip fails at n={trip_n}")));
                }
            }
            Ok(None)
        })();
        report.record(&format!("family {}", fam.name()), outcome);
    }

    let outcome = (|| -> Result<Option<String>> {
        let n = 20;
        let fam = Family::new(md, FamilyKind::Falling)?;
        let (s1, _) = stirling_matrices(md, n);
        Ok((probed_matrix(md, &fam, n)? != s1).then(|| "falling factorials differ from Stirling numbers".into()))
    })();
    report.record("falling factorial vs Stirling", outcome);

    report
}
