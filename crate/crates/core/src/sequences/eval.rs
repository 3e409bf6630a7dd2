//! Certified evaluation of normal forms at positive integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hardy::HardyNormalForm;
use crate::numeric::{Interval, Surd};

/// First precision tried, in bits.
pub const START_PRECISION: u32 = 128;
/// Precision cap, in bits.
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Debug)]
enum Exponent {
    Rational { p: i64, q: u32 },
    Irrational(Surd),
}

#[derive(Clone, Debug)]
struct PlanTerm {
    coeff: Surd,
    coeff_start: Interval,
    alpha: Exponent,
    beta: i32,
}

/// A normal form prepared for repeated interval evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator {
    form: HardyNormalForm,
    terms: Vec<PlanTerm>,
}

/// A certified floor together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedFloor {
    pub value: BigInt,
    pub precision: u32,
    pub exact: bool,
}

impl Evaluator {
    pub fn new(form: &HardyNormalForm) -> Self {
        let mut terms = Vec::with_capacity(form.terms().len());
        for t in form.terms() {
            let alpha = match t.alpha.to_rational() {
                Some(r) => {
                    let p = r.numer().to_i64();
                    let q = r.denom().to_u32();
                    match (p, q) {
                        (Some(p), Some(q)) if p.unsigned_abs() <= 64 && q <= 64 => {
                            Exponent::Rational { p, q }
                        }
                        _ => Exponent::Irrational(t.alpha.clone()),
                    }
                }
                None => Exponent::Irrational(t.alpha.clone()),
            };
            terms.push(PlanTerm {
                coeff: t.coeff.clone(),
                coeff_start: t.coeff.to_interval(START_PRECISION),
                alpha,
                beta: t.beta,
            });
        }
        Evaluator { form: form.clone(), terms }
    }

    pub fn form(&self) -> &HardyNormalForm {
        &self.form
    }

    fn check_domain(&self, n: i64) -> Result<()> {
        if n < 1 || (n == 1 && self.terms.iter().any(|t| t.beta < 0)) {
            return Err(Error::Undefined { n });
        }
        Ok(())
    }

    /// Enclosure of `a(n)` at the given precision.
    pub fn interval(&self, n: i64, prec: u32) -> Result<Interval> {
        self.check_domain(n)?;
        let nb = BigInt::from(n);
        let mut log: Option<Interval> = None;
        let mut acc = Interval::zero(prec);
        for t in &self.terms {
            let c = if prec == START_PRECISION {
                t.coeff_start.clone()
            } else {
                t.coeff.to_interval(prec)
            };
            let mut v = match &t.alpha {
                Exponent::Rational { p: 0, .. } => c,
                Exponent::Rational { p, q } => c.mul(&Interval::int_power(&nb, *p, *q, prec)),
                Exponent::Irrational(a) => {
                    let l = log.get_or_insert_with(|| Interval::ln_int(&nb, prec));
                    c.mul(&a.to_interval(prec).mul(l).exp())
                }
            };
            if t.beta != 0 {
                let l = log.get_or_insert_with(|| Interval::ln_int(&nb, prec));
                v = v.mul(&l.powi(t.beta).ok_or(Error::Undefined { n })?);
            }
            acc = acc.add(&v);
        }
        Ok(acc)
    }

    /// Exact value of `a(n)` when it is a surd, by symbolic evaluation.
    ///
    /// Returns `None` whenever the value is provably irrational in a way the
    /// surd type cannot represent (a nonzero multiple of a power of `log n`,
    /// for instance) or cannot be decided symbolically.
    pub fn exact(&self, n: i64) -> Option<Surd> {
        if self.check_domain(n).is_err() {
            return None;
        }
        let mut by_beta: std::collections::BTreeMap<i32, Surd> = Default::default();
        for t in &self.terms {
            if n == 1 && t.beta > 0 {
                continue;
            }
            let pw = match &t.alpha {
                Exponent::Rational { p, q } => exact_power(n, *p, *q)?,
                Exponent::Irrational(_) if n == 1 => Surd::one(),
                Exponent::Irrational(_) => return None,
            };
            let e = by_beta.entry(if n == 1 { 0 } else { t.beta }).or_default();
            *e = &*e + &(&t.coeff * &pw);
        }
        // log n is transcendental for n ≥ 2, so any surviving log power makes
        // the value transcendental.
        if by_beta.iter().any(|(b, v)| *b != 0 && !v.is_zero()) {
            return None;
        }
        Some(by_beta.remove(&0).unwrap_or_default())
    }

    /// Certified floor of `a(n)`.
    pub fn floor(&self, n: i64) -> Result<CertifiedFloor> {
        floor_of(n, |prec| self.interval(n, prec), || self.exact(n))
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.form.eval_f64(n)
    }
}

/// Escalates precision until `enclose` yields an interval without an
/// integer inside, trying `exact` after the first failure.
pub(crate) fn floor_of(
    n: i64,
    enclose: impl Fn(u32) -> Result<Interval>,
    exact: impl Fn() -> Option<Surd>,
) -> Result<CertifiedFloor> {
    let mut prec = START_PRECISION;
    let mut tried_exact = false;
    loop {
        let iv = enclose(prec)?;
        if let Some(value) = iv.floor() {
            return Ok(CertifiedFloor { value, precision: prec, exact: false });
        }
        if !tried_exact {
            tried_exact = true;
            if let Some(s) = exact() {
                return Ok(CertifiedFloor { value: s.floor(), precision: prec, exact: true });
            }
        }
        if prec >= MAX_PRECISION {
            return Err(Error::UndecidableFloor { n });
        }
        prec *= 2;
    }
}

/// `n^(p/q)` as a surd, when it is one.
fn exact_power(n: i64, p: i64, q: u32) -> Option<Surd> {
    let base = num_traits::pow(BigInt::from(n), p.unsigned_abs() as usize);
    let root = base.nth_root(q);
    let pos = if num_traits::pow(root.clone(), q as usize) == base {
        Surd::from_rational(BigRational::from_integer(root))
    } else if q == 2 {
        Surd::sqrt_rational(&BigRational::from_integer(base))?
    } else {
        return None;
    };
    if p < 0 {
        pos.inv()
    } else {
        Some(pos)
    }
}

/// Certified floor of `Σ_j w_j · f_j(x)` for exact rational weights.
pub fn floor_linear(parts: &[(&Evaluator, BigRational)], x: i64) -> Result<CertifiedFloor> {
    floor_of(
        x,
        |prec| {
            let mut acc = Interval::zero(prec);
            for (e, w) in parts {
                if w.is_zero() {
                    continue;
                }
                acc = acc.add(&e.interval(x, prec)?.mul(&Interval::from_rational(w, prec)));
            }
            Ok(acc)
        },
        || {
            let mut acc = Surd::zero();
            for (e, w) in parts {
                if w.is_zero() {
                    continue;
                }
                acc = acc + e.exact(x)?.scale(w);
            }
            Some(acc)
        },
    )
}

/// Converts a certified floor to `i64`.
pub fn floor_to_i64(f: &BigInt, n: i64) -> Result<i64> {
    f.to_i64().ok_or(Error::Overflow { n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::parse;

    fn floors(s: &str, ns: std::ops::RangeInclusive<i64>) -> Vec<(i64, bool)> {
        let e = Evaluator::new(&parse(s).unwrap());
        ns.map(|n| {
            let f = e.floor(n).unwrap();
            (f.value.to_i64().unwrap(), f.exact)
        })
        .collect()
    }

    #[test]
    fn fractional_power_uses_exact_path_at_squares() {
        let v = floors("t^(3/2)", 1..=5);
        let vals: Vec<i64> = v.iter().map(|x| x.0).collect();
        assert_eq!(vals, vec![1, 2, 5, 8, 11]);
        assert!(v[0].1 && v[3].1 && !v[1].1);
    }

    #[test]
    fn log_terms() {
        let v: Vec<i64> = floors("t/2 + log(t)", 1..=4).iter().map(|x| x.0).collect();
        assert_eq!(v, vec![0, 1, 2, 3]);
        // 2 log 2 + ... is never an integer but may need more precision.
        let v: Vec<i64> = floors("t*log(t)", 1..=3).iter().map(|x| x.0).collect();
        assert_eq!(v, vec![0, 1, 3]);
    }

    #[test]
    fn irrational_exponent() {
        let v: Vec<i64> = floors("t^(sqrt(2))", 1..=3).iter().map(|x| x.0).collect();
        let expect: Vec<i64> = (1..=3).map(|n| (n as f64).powf(2f64.sqrt()).floor() as i64).collect();
        assert_eq!(v, expect);
    }

    #[test]
    fn surd_coefficients_and_negatives() {
        let v: Vec<i64> = floors("sqrt(2)*t - t^(1/2)", 1..=4).iter().map(|x| x.0).collect();
        let expect: Vec<i64> = (1..=4)
            .map(|n| (2f64.sqrt() * n as f64 - (n as f64).sqrt()).floor() as i64)
            .collect();
        assert_eq!(v, expect);
        let v: Vec<i64> = floors("-t^(3/2)", 4..=4).iter().map(|x| x.0).collect();
        assert_eq!(v, vec![-8]);
    }

    #[test]
    fn domain() {
        let e = Evaluator::new(&parse("t/log(t)").unwrap());
        assert_eq!(e.floor(1), Err(Error::Undefined { n: 1 }));
        assert_eq!(e.floor(0), Err(Error::Undefined { n: 0 }));
        assert!(e.floor(2).is_ok());
    }

    #[test]
    fn weighted_combination() {
        let a = Evaluator::new(&parse("t^(1/2)").unwrap());
        let w = BigRational::new(3.into(), 1.into());
        let f = floor_linear(&[(&a, w)], 16).unwrap();
        assert_eq!(f.value, BigInt::from(12));
        assert!(f.exact);
    }
}
