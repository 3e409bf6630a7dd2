//! Convergence and recurrence classifiers and membership in the class of
//! fractional-growth functions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{Growth, HardyNormalForm};
use crate::numeric::Surd;

/// Largest denominator accepted when matching coefficients to an integer
/// polynomial.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum ConvergenceClass {
    /// `a − c·p ≻ log t` for every real `c` and integer polynomial `p`.
    GoodCond1,
    /// `a − c·p → d`, with `p` given by its integer coefficients (index =
    /// degree, constant term zero).
    GoodCond2 {
        #[serde(serialize_with = "ser_display")]
        c: Surd,
        #[serde(serialize_with = "ser_display")]
        d: Surd,
        #[serde(serialize_with = "ser_ints")]
        p: Vec<BigInt>,
    },
    /// `a − t/m ≪ log t`.
    GoodCond3 { m: i64 },
    Bad,
}

impl ConvergenceClass {
    pub fn name(&self) -> &'static str {
        match self {
            ConvergenceClass::GoodCond1 => "GoodCond1",
            ConvergenceClass::GoodCond2 { .. } => "GoodCond2",
            ConvergenceClass::GoodCond3 { .. } => "GoodCond3",
            ConvergenceClass::Bad => "Bad",
        }
    }

    pub fn is_good(&self) -> bool {
        !matches!(self, ConvergenceClass::Bad)
    }
}

impl std::fmt::Display for ConvergenceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConvergenceClass::GoodCond2 { c, d, p } => {
                let p: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "GoodCond2{{c={c}, d={d}, p=[{}]}}", p.join(","))
            }
            ConvergenceClass::GoodCond3 { m } => write!(f, "GoodCond3{{m={m}}}"),
            other => write!(f, "{}", other.name()),
        }
    }
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RecurrenceClass {
    Good,
    NotCovered,
}

/// Splits `a` into its polynomial part (terms with `β = 0` and nonnegative
/// integer `α`) and the rest.
fn split(a: &HardyNormalForm) -> (HardyNormalForm, HardyNormalForm) {
    (a.filter_terms(|t| t.is_polynomial()), a.filter_terms(|t| !t.is_polynomial()))
}

/// Writes the nonconstant part of a polynomial as `c · p` with `p ∈ Z[t]`.
/// Returns `None` when its coefficients are incommensurable (or need a
/// denominator above [`MAX_DENOMINATOR`]).
fn commensurable_match(poly: &HardyNormalForm) -> Option<(Surd, Vec<BigInt>)> {
    let nonconst: Vec<_> = poly.terms().iter().filter(|t| !t.alpha.is_zero()).collect();
    let Some(lead) = nonconst.first() else {
        return Some((Surd::zero(), vec![BigInt::zero()]));
    };
    let inv = lead.coeff.inv().expect("nonzero coefficient");
    let mut ratios = Vec::with_capacity(nonconst.len());
    let mut den = BigInt::one();
    for t in &nonconst {
        let r = (&t.coeff * &inv).to_rational()?;
        den = den.lcm(r.denom());
        if den > BigInt::from(MAX_DENOMINATOR) {
            return None;
        }
        ratios.push((t.alpha.to_integer()?.to_usize()?, r));
    }
    let degree = ratios[0].0;
    let mut p = vec![BigInt::zero(); degree + 1];
    let scale = BigRational::from_integer(den.clone());
    for (k, r) in ratios {
        p[k] = (r * &scale).to_integer();
    }
    let c = lead.coeff.scale(&BigRational::new(BigInt::one(), den));
    Some((c, p))
}

/// Classifies `[a(n)]` by the trichotomy for single-sequence convergence.
pub fn classify_convergence(a: &HardyNormalForm) -> ConvergenceClass {
    let (poly, rest) = split(a);
    let matched = commensurable_match(&poly);

    // (ii): the non-polynomial part tends to zero and the polynomial part is
    // a real multiple of an integer polynomial plus a constant.
    if rest.grows_slower_than(&Growth::bounded()) {
        if let Some((c, p)) = &matched {
            let d = poly.coeff_of(&Surd::zero(), 0);
            return ConvergenceClass::GoodCond2 { c: c.clone(), d, p: p.clone() };
        }
    }

    // (iii): a − t/m ≪ log t.
    let c1 = a.coeff_of(&Surd::one(), 0);
    if let Some(m) = c1.inv().and_then(|m| m.to_integer()).and_then(|m| m.to_i64()) {
        let residual = a.sub(&HardyNormalForm::t().scale(&c1));
        if !residual.grows_faster_than(&Growth::log()) {
            return ConvergenceClass::GoodCond3 { m };
        }
    }

    // (i): every polynomial match leaves a residual ≻ log t. Non-polynomial
    // terms never cancel against c·p, so either they dominate log t, or the
    // polynomial part cannot be matched and leaves a term of degree ≥ 1.
    if rest.grows_faster_than(&Growth::log()) || matched.is_none() {
        return ConvergenceClass::GoodCond1;
    }
    ConvergenceClass::Bad
}

/// Decides whether `|a − c·p| → ∞` for every real `c` and `p ∈ Z[t]`.
pub fn classify_recurrence(a: &HardyNormalForm) -> RecurrenceClass {
    let (poly, rest) = split(a);
    // With a commensurable polynomial part the worst choice of c·p removes
    // it entirely, leaving the constant plus the non-polynomial terms.
    if commensurable_match(&poly).is_none() || rest.grows_faster_than(&Growth::bounded()) {
        RecurrenceClass::Good
    } else {
        RecurrenceClass::NotCovered
    }
}

/// `t^(k+ε) ≺ a ≺ t^(k+1)` for some integer `k ≥ 0` and `ε > 0`.
pub fn in_class_g(a: &HardyNormalForm) -> bool {
    a.leading_growth().is_some_and(|g| g_band(&g).is_some())
}

/// The integer `k` with `t^(k+ε) ≺ t^α (log t)^β ≺ t^(k+1)`, if any.
pub(crate) fn g_band(g: &Growth) -> Option<u64> {
    if !g.alpha.is_positive() {
        return None;
    }
    match g.alpha.to_integer() {
        None => g.alpha.floor().to_u64(),
        Some(k) if g.beta < 0 => (k - BigInt::one()).to_u64(),
        Some(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::parse;

    fn conv(s: &str) -> ConvergenceClass {
        classify_convergence(&parse(s).unwrap())
    }

    #[test]
    fn convergence_examples() {
        assert_eq!(conv("t*log(t)"), ConvergenceClass::GoodCond1);
        assert_eq!(conv("sqrt(5)*t^2 + log(t)"), ConvergenceClass::Bad);
        assert_eq!(conv("t/2 + log(t)"), ConvergenceClass::GoodCond3 { m: 2 });
        assert_eq!(conv("2*t + log(t)"), ConvergenceClass::Bad);
        assert_eq!(conv("t^2 + sqrt(3)*t"), ConvergenceClass::GoodCond1);
        assert_eq!(conv("t^3/log(t)"), ConvergenceClass::GoodCond1);
    }

    #[test]
    fn cond2_witness() {
        let s5 = Surd::sqrt_rational(&BigRational::from_integer(5.into())).unwrap();
        assert_eq!(
            conv("sqrt(5)*t^2"),
            ConvergenceClass::GoodCond2 {
                c: s5,
                d: Surd::zero(),
                p: vec![BigInt::from(0), 0.into(), 1.into()]
            }
        );
        assert_eq!(
            conv("1/2*t^2 + t/3 + 7 + t^-1"),
            ConvergenceClass::GoodCond2 {
                c: Surd::from_ratio(1, 6),
                d: Surd::from_i64(7),
                p: vec![BigInt::from(0), 2.into(), 3.into()]
            }
        );
    }

    #[test]
    fn denominator_bound() {
        assert_eq!(conv("t^2 + t/1000003"), ConvergenceClass::GoodCond1);
    }

    #[test]
    fn recurrence_examples() {
        let rec = |s: &str| classify_recurrence(&parse(s).unwrap());
        assert_eq!(rec("sqrt(5)*t + log(t)"), RecurrenceClass::Good);
        assert_eq!(rec("t^2 + log(t)^2"), RecurrenceClass::Good);
        assert_eq!(rec("sqrt(5)*t + 2"), RecurrenceClass::NotCovered);
        assert_eq!(rec("t^2 + sqrt(2)*t"), RecurrenceClass::Good);
    }

    #[test]
    fn class_g() {
        let g = |s: &str| in_class_g(&parse(s).unwrap());
        assert!(g("t^1.5"));
        assert!(!g("t*log(t)"));
        assert!(g("t^(sqrt(2))*log(t)"));
        assert!(g("t^3/log(t)"));
        assert!(!g("t^2"));
        assert!(!g("log(t)^3"));
        assert!(g("t^(1/3)"));
    }
}
