//! Multivariate polynomials in symbolic shift parameters `h1, h2, ...` with
//! exact surd coefficients.
//!
//! The shifts are treated as generic large parameters: a polynomial counts as
//! nonzero whenever it is nonzero as a formal polynomial.

use std::collections::BTreeMap;
use std::fmt;


use super::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HPoly {
    // exponent vector (trailing zeros trimmed) -> coefficient
    terms: BTreeMap<Vec<u32>, Surd>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl HPoly {
    pub fn zero() -> Self {
        HPoly::default()
    }

    pub fn constant(c: Surd) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        HPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(Surd::one())
    }

    /// The variable `h_i` (1-based).
    pub fn var(i: usize) -> Self {
        assert!(i >= 1);
        let mut e = vec![0; i];
        e[i - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Surd::one());
        HPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_empty())
    }

    /// The constant value, if this polynomial does not involve any `h_i`.
    pub fn as_constant(&self) -> Option<Surd> {
        if self.is_constant() {
            Some(self.terms.get(&Vec::new()).cloned().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    fn insert_add(&mut self, e: Vec<u32>, c: Surd) {
        let e = trim(e);
        let entry = self.terms.entry(e.clone()).or_default();
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert_add(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        HPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = HPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<u32> = (0..n)
                    .map(|i| e1.get(i).unwrap_or(&0) + e2.get(i).unwrap_or(&0))
                    .collect();
                r.insert_add(e, c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, s: &Surd) -> Self {
        if s.is_zero() {
            return HPoly::zero();
        }
        HPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = HPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_single_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// True when the polynomial is a single monomial whose coefficient has a
    /// single surd part, so it can be printed without brackets.
    pub fn is_atomic(&self) -> bool {
        self.is_single_monomial() && self.terms.values().all(|c| c.parts().count() <= 1)
    }
}

fn fmt_monomial(e: &[u32]) -> String {
    let mut out = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => out.push(format!("h{}", i + 1)),
            k => out.push(format!("h{}^{}", i + 1, k)),
        }
    }
    out.join("*")
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest total degree first.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, c)) in items.into_iter().enumerate() {
            let neg = c.parts().count() == 1 && c.is_negative();
            let c = if neg { -c } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = fmt_monomial(e);
            let coeff = if c.parts().count() > 1 {
                format!("({c})")
            } else {
                c.to_string()
            };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if c == Surd::one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl From<Surd> for HPoly {
    fn from(c: Surd) -> Self {
        HPoly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion() {
        let h = HPoly::var(1);
        let sq = h.add(&HPoly::one()).pow(2);
        let expect = h.pow(2).add(&h.scale(&Surd::from_i64(2))).add(&HPoly::one());
        assert_eq!(sq, expect);
        assert_eq!(sq.to_string(), "h1^2 + 2*h1 + 1");
    }

    #[test]
    fn cancellation() {
        let a = HPoly::var(2).add(&HPoly::var(1));
        let b = a.sub(&HPoly::var(2));
        assert_eq!(b, HPoly::var(1));
        assert_eq!(b.num_vars(), 1);
        assert!(a.sub(&a).is_zero());
    }
}
