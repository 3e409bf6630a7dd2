//! Normal forms `Σ c · t^α · (log t)^β`, their growth calculus and
//! differentiation.

mod classify;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::numeric::{HPoly, Surd};

pub use classify::{
    classify_convergence, classify_recurrence, in_class_g, ConvergenceClass, RecurrenceClass,
};
pub(crate) use classify::g_band;
pub use parse::parse;

/// Coefficient ring of a normal form.
pub trait Coeff: Clone + PartialEq + Eq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &Surd) -> Self;
    fn from_surd(s: Surd) -> Self;
    /// Printable without brackets as a factor.
    fn is_atomic(&self) -> bool;
    /// A single negative atom, printed with a leading minus.
    fn is_negative_atom(&self) -> bool;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Coeff for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::one()
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: &Surd) -> Self {
        self * s
    }
    fn from_surd(s: Surd) -> Self {
        s
    }
    fn is_atomic(&self) -> bool {
        self.parts().count() <= 1
    }
    fn is_negative_atom(&self) -> bool {
        self.parts().count() == 1 && self.is_negative()
    }
}

impl Coeff for HPoly {
    fn zero() -> Self {
        HPoly::zero()
    }
    fn one() -> Self {
        HPoly::one()
    }
    fn is_zero(&self) -> bool {
        HPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        HPoly::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        HPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        HPoly::neg(self)
    }
    fn scale(&self, s: &Surd) -> Self {
        HPoly::scale(self, s)
    }
    fn from_surd(s: Surd) -> Self {
        HPoly::constant(s)
    }
    fn is_atomic(&self) -> bool {
        HPoly::is_atomic(self)
    }
    fn is_negative_atom(&self) -> bool {
        self.is_atomic() && self.as_constant().is_some_and(|c| c.is_negative())
    }
}

/// Growth exponent pair `(α, β)` of `t^α (log t)^β`, ordered
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Growth {
    pub alpha: Surd,
    pub beta: i32,
}

impl Growth {
    pub fn new(alpha: Surd, beta: i32) -> Self {
        Growth { alpha, beta }
    }

    pub fn power(n: i64) -> Self {
        Growth::new(Surd::from_i64(n), 0)
    }

    /// Growth of `log t`.
    pub fn log() -> Self {
        Growth::new(Surd::zero(), 1)
    }

    /// Growth of the constants.
    pub fn bounded() -> Self {
        Growth::power(0)
    }
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term<C = Surd> {
    pub coeff: C,
    pub alpha: Surd,
    pub beta: i32,
}

impl<C: Coeff> Term<C> {
    pub fn new(coeff: C, alpha: Surd, beta: i32) -> Self {
        Term { coeff, alpha, beta }
    }

    pub fn growth(&self) -> Growth {
        Growth::new(self.alpha.clone(), self.beta)
    }

    /// `β = 0` and `α` a nonnegative integer.
    pub fn is_polynomial(&self) -> bool {
        self.beta == 0 && !self.alpha.is_negative() && self.alpha.is_integer()
    }
}

/// A finite sum of terms `c · t^α · (log t)^β` kept sorted by strictly
/// decreasing `(α, β)` with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HardyForm<C = Surd> {
    terms: Vec<Term<C>>,
}

pub type HardyNormalForm = HardyForm<Surd>;

impl<C: Coeff> Default for HardyForm<C> {
    fn default() -> Self {
        HardyForm { terms: Vec::new() }
    }
}

impl<C: Coeff> HardyForm<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Normalizes an arbitrary list of terms.
    pub fn from_terms(mut terms: Vec<Term<C>>) -> Self {
        terms.sort_by_key(|t| std::cmp::Reverse(t.growth()));
        let mut out: Vec<Term<C>> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.alpha == t.alpha && last.beta == t.beta => {
                    last.coeff = last.coeff.add(&t.coeff);
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        HardyForm { terms: out }
    }

    pub fn monomial(coeff: C, alpha: Surd, beta: i32) -> Self {
        Self::from_terms(vec![Term::new(coeff, alpha, beta)])
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, Surd::zero(), 0)
    }

    /// The function `t`.
    pub fn t() -> Self {
        Self::monomial(C::one(), Surd::one(), 0)
    }

    pub fn log_t() -> Self {
        Self::monomial(C::one(), Surd::zero(), 1)
    }

    pub fn terms(&self) -> &[Term<C>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Term<C>> {
        self.terms.first()
    }

    pub fn leading_growth(&self) -> Option<Growth> {
        self.leading().map(Term::growth)
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.leading().map(|t| &t.coeff)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&o.terms).cloned().collect())
    }

    pub fn neg(&self) -> Self {
        HardyForm {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff.neg(), t.alpha.clone(), t.beta))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(Term::new(
                    a.coeff.mul(&b.coeff),
                    &a.alpha + &b.alpha,
                    a.beta + b.beta,
                ));
            }
        }
        Self::from_terms(terms)
    }

    pub fn scale(&self, s: &Surd) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(t.coeff.scale(s), t.alpha.clone(), t.beta))
                .collect(),
        )
    }

    pub fn scale_coeff(&self, c: &C) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(t.coeff.mul(c), t.alpha.clone(), t.beta))
                .collect(),
        )
    }

    /// Termwise derivative.
    pub fn differentiate(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        let one = Surd::one();
        for t in &self.terms {
            let alpha = &t.alpha - &one;
            if !t.alpha.is_zero() {
                out.push(Term::new(t.coeff.scale(&t.alpha), alpha.clone(), t.beta));
            }
            if t.beta != 0 {
                out.push(Term::new(
                    t.coeff.scale(&Surd::from_i64(t.beta as i64)),
                    alpha,
                    t.beta - 1,
                ));
            }
        }
        Self::from_terms(out)
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |a, _| a.differentiate())
    }

    /// Drops every term growing strictly slower than `g`.
    pub fn truncate_below(&self, g: &Growth) -> Self {
        HardyForm {
            terms: self.terms.iter().filter(|t| t.growth() >= *g).cloned().collect(),
        }
    }

    /// Keeps the terms satisfying `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Term<C>) -> bool) -> Self {
        HardyForm { terms: self.terms.iter().filter(|t| keep(t)).cloned().collect() }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> HardyForm<D> {
        HardyForm::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(f(&t.coeff), t.alpha.clone(), t.beta))
                .collect(),
        )
    }

    /// True when every term is a polynomial monomial.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(Term::is_polynomial)
    }

    /// Degree of a polynomial form (zero for constants and for the zero form).
    pub fn degree(&self) -> Option<u32> {
        if !self.is_polynomial() {
            return None;
        }
        Some(
            self.leading()
                .map(|t| num_traits::ToPrimitive::to_u32(&t.alpha.to_integer().unwrap()).unwrap())
                .unwrap_or(0),
        )
    }

    /// Coefficient of `t^α (log t)^β`, or zero.
    pub fn coeff_of(&self, alpha: &Surd, beta: i32) -> C {
        self.terms
            .iter()
            .find(|t| t.alpha == *alpha && t.beta == beta)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(C::zero)
    }

    /// Growth comparison ignoring the values of the leading coefficients.
    pub fn compare_growth(&self, o: &Self) -> Ordering {
        self.leading_growth().cmp(&o.leading_growth())
    }

    /// `self ≺ t^α (log t)^β`.
    pub fn grows_slower_than(&self, g: &Growth) -> bool {
        self.leading_growth().is_none_or(|l| l < *g)
    }

    /// `self ≻ t^α (log t)^β`.
    pub fn grows_faster_than(&self, g: &Growth) -> bool {
        self.leading_growth().is_some_and(|l| l > *g)
    }
}

impl HardyForm<HPoly> {
    /// `f(t + h)` expanded as `Σ_j f^(j)(t) h^j / j!`, discarding terms that
    /// tend to zero. Exact for polynomials.
    pub fn shift(&self, h: &HPoly) -> Self {
        let decaying = Growth::bounded();
        let mut acc = self.clone();
        let mut deriv = self.clone();
        let mut hpow = HPoly::one();
        let mut fact = BigRational::one();
        let mut j = 0i64;
        loop {
            deriv = deriv.differentiate().truncate_below(&decaying);
            if deriv.is_zero() {
                break;
            }
            j += 1;
            hpow = hpow.mul(h);
            fact *= BigRational::from_integer(j.into());
            let c = hpow.scale(&Surd::from_rational(fact.recip()));
            acc = acc.add(&deriv.scale_coeff(&c));
        }
        acc.truncate_below(&decaying)
    }
}

impl HardyForm<Surd> {
    /// Leading coefficient sign of a nonzero form; `0` for the zero form.
    pub fn eventual_sign(&self) -> i32 {
        self.leading().map(|t| t.coeff.signum()).unwrap_or(0)
    }

    pub fn to_hpoly(&self) -> HardyForm<HPoly> {
        self.map_coeffs(|c| HPoly::constant(c.clone()))
    }

    /// Floating-point evaluation, for diagnostics only.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let l = t.ln();
        self.terms
            .iter()
            .map(|term| term.coeff.to_f64() * t.powf(term.alpha.to_f64()) * l.powi(term.beta))
            .sum()
    }
}

/// Result of comparing the growth of two nonzero forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowthRelation {
    StrictlySlower,
    Comparable { ratio: Surd },
    StrictlyFaster,
}

/// Compares `a` with `b` by their leading terms. Zero forms count as slower
/// than every nonzero form.
pub fn growth_compare(a: &HardyNormalForm, b: &HardyNormalForm) -> GrowthRelation {
    match a.compare_growth(b) {
        Ordering::Less => GrowthRelation::StrictlySlower,
        Ordering::Greater => GrowthRelation::StrictlyFaster,
        Ordering::Equal => {
            let (ca, cb) = match (a.leading_coeff(), b.leading_coeff()) {
                (Some(ca), Some(cb)) => (ca, cb),
                _ => return GrowthRelation::Comparable { ratio: Surd::one() },
            };
            GrowthRelation::Comparable { ratio: ca.div(cb).expect("nonzero leading coefficient") }
        }
    }
}

pub fn differentiate(a: &HardyNormalForm) -> HardyNormalForm {
    a.differentiate()
}

fn fmt_exponent(e: &Surd) -> String {
    match e.to_rational() {
        Some(r) if r.is_integer() => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => format!("({e})"),
    }
}

impl<C: Coeff> fmt::Display for Term<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        if !self.alpha.is_zero() {
            if self.alpha.is_one() {
                factors.push("t".to_string());
            } else {
                factors.push(format!("t^{}", fmt_exponent(&self.alpha)));
            }
        }
        match self.beta {
            0 => {}
            1 => factors.push("log(t)".to_string()),
            b => factors.push(format!("log(t)^{b}")),
        }
        let c = &self.coeff;
        let neg = c.is_negative_atom();
        let c = if neg { c.neg() } else { c.clone() };
        if neg {
            write!(f, "-")?;
        }
        if factors.is_empty() || c != C::one() {
            if c.is_atomic() {
                factors.insert(0, c.to_string());
            } else {
                factors.insert(0, format!("({c})"));
            }
        }
        write!(f, "{}", factors.join("*"))
    }
}

impl<C: Coeff> fmt::Display for HardyForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let s = t.to_string();
            if i == 0 {
                write!(f, "{s}")?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}
