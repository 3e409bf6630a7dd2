//! Expression parser.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := unary (('*'|'/') unary)*
//! unary    := '-' unary | power
//! power    := atom ['^' exponent]
//! exponent := ['+'|'-'] (number ['/' number] | '(' expr ')' | 'sqrt' '(' expr ')')
//! atom     := number | 't' | 'n' | 'log' '(' expr ')' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimal (`1.5`) or integer literals and are read exactly.
//! After `^` a literal `p/q` is a single rational exponent, so `t^3/2` is
//! `t^(3/2)`. Exponents must be constant; division is only by single-term
//! expressions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{HardyNormalForm, Term};
use crate::error::{Error, Result};
use crate::numeric::Surd;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut int = String::new();
            let mut frac = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                int.push(chars[i]);
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            if int.is_empty() && frac.is_empty() {
                return Err(Error::Syntax { pos: start, msg: "malformed number".into() });
            }
            let digits: BigInt = format!("{int}{frac}").parse().unwrap();
            let den = num_traits::pow(BigInt::from(10), frac.len());
            out.push((Tok::Num(BigRational::new(digits, den)), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            out.push((Tok::Ident(s), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<HardyNormalForm> {
        let mut acc = match self.peek() {
            Tok::Sym('+') => {
                self.bump();
                self.term()?
            }
            Tok::Sym('-') => {
                self.bump();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<HardyNormalForm> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Sym('/') => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    acc = acc.mul(&reciprocal(&d, pos)?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<HardyNormalForm> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<HardyNormalForm> {
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = self.exponent()?;
        pow(&base, &e, pos)
    }

    fn exponent(&mut self) -> Result<Surd> {
        let neg = match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                true
            }
            Tok::Sym('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let start = self.pos();
        let e = match self.bump() {
            Tok::Num(n) => {
                if *self.peek() == Tok::Sym('/') {
                    if let Tok::Num(d) = &self.toks[self.i + 1].0 {
                        if d.is_zero() {
                            return self.syntax("zero denominator");
                        }
                        let d = d.clone();
                        self.bump();
                        self.bump();
                        Surd::from_rational(n / d)
                    } else {
                        Surd::from_rational(n)
                    }
                } else {
                    Surd::from_rational(n)
                }
            }
            Tok::Sym('(') => {
                let pos = self.pos();
                let inner = self.expr()?;
                self.expect(')')?;
                constant_value(&inner, pos)?
            }
            Tok::Ident(name) if name == "sqrt" => {
                self.expect('(')?;
                let pos = self.pos();
                let inner = self.expr()?;
                self.expect(')')?;
                let c = constant_value(&inner, pos)?;
                c.sqrt().ok_or_else(|| {
                    Error::UnsupportedForm(format!("sqrt({c}) is not a square root of a nonnegative rational"))
                })?
            }
            _ => return Err(Error::Syntax { pos: start, msg: "expected an exponent".into() }),
        };
        Ok(if neg { -e } else { e })
    }

    fn atom(&mut self) -> Result<HardyNormalForm> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(HardyNormalForm::constant(Surd::from_rational(n))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" | "n" => Ok(HardyNormalForm::t()),
                "log" | "ln" => {
                    self.expect('(')?;
                    let inner_pos = self.pos();
                    let inner = self.expr()?;
                    self.expect(')')?;
                    log_of(&inner, inner_pos)
                }
                "sqrt" => {
                    self.expect('(')?;
                    let inner_pos = self.pos();
                    let inner = self.expr()?;
                    self.expect(')')?;
                    pow(&inner, &Surd::from_ratio(1, 2), inner_pos)
                }
                _ if *self.peek() == Tok::Sym('(') => {
                    Err(Error::UnsupportedForm(format!("function '{name}' at position {pos}")))
                }
                _ => Err(Error::Syntax { pos, msg: format!("unknown identifier '{name}'") }),
            },
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(Error::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

fn constant_value(f: &HardyNormalForm, pos: usize) -> Result<Surd> {
    match f.terms() {
        [] => Ok(Surd::zero()),
        [t] if t.alpha.is_zero() && t.beta == 0 => Ok(t.coeff.clone()),
        _ => Err(Error::Syntax { pos, msg: format!("expected a constant, found {f}") }),
    }
}

fn log_of(f: &HardyNormalForm, pos: usize) -> Result<HardyNormalForm> {
    match f.terms() {
        // log(t^α) = α log t
        [t] if t.beta == 0 && t.coeff.is_one() && !t.alpha.is_zero() => {
            Ok(HardyNormalForm::log_t().scale(&t.alpha))
        }
        _ => Err(Error::UnsupportedForm(format!(
            "log({f}) at position {pos}: only logarithms of powers of t are supported"
        ))),
    }
}

fn reciprocal(f: &HardyNormalForm, pos: usize) -> Result<HardyNormalForm> {
    match f.terms() {
        [] => Err(Error::Syntax { pos, msg: "division by zero".into() }),
        [_] => pow(f, &Surd::from_i64(-1), pos),
        _ => Err(Error::UnsupportedForm(format!(
            "division by the multi-term expression {f} at position {pos}"
        ))),
    }
}

fn pow(base: &HardyNormalForm, e: &Surd, pos: usize) -> Result<HardyNormalForm> {
    if let Some(k) = e.to_integer().filter(|k| !k.is_negative()) {
        let k: u32 = k.try_into().map_err(|_| Error::UnsupportedForm("exponent too large".into()))?;
        let mut acc = HardyNormalForm::constant(Surd::one());
        for _ in 0..k {
            acc = acc.mul(base);
        }
        return Ok(acc);
    }
    let term = match base.terms() {
        [t] => t,
        [] => {
            return Err(Error::Syntax { pos, msg: "zero raised to a non-positive power".into() })
        }
        _ => {
            return Err(Error::UnsupportedForm(format!(
                "non-integer or negative power of the multi-term expression {base}"
            )))
        }
    };
    let beta = Surd::from_i64(term.beta as i64) * e;
    let beta: i32 = beta
        .to_integer()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::UnsupportedForm(format!("power ({e}) of log(t)^{}", term.beta)))?;
    let coeff = coeff_power(&term.coeff, e).ok_or_else(|| {
        Error::UnsupportedForm(format!("({}) raised to the power {e}", term.coeff))
    })?;
    Ok(HardyNormalForm::from_terms(vec![Term::new(coeff, &term.alpha * e, beta)]))
}

fn coeff_power(c: &Surd, e: &Surd) -> Option<Surd> {
    if c.is_one() {
        return Some(Surd::one());
    }
    let r = e.to_rational()?;
    let mut k = r.numer().clone();
    let base = if r.denom().is_one() {
        c.clone()
    } else if *r.denom() == BigInt::from(2) {
        c.sqrt()?
    } else {
        return None;
    };
    let base = if k.is_negative() {
        k = -k;
        base.inv()?
    } else {
        base
    };
    let k: u32 = k.try_into().ok()?;
    Some(base.powi(k))
}

/// Parses an expression into its normal form.
pub fn parse(text: &str) -> Result<HardyNormalForm> {
    let mut p = Parser { toks: lex(text)?, i: 0 };
    if *p.peek() == Tok::End {
        return p.syntax("empty expression");
    }
    let f = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(f)
}
