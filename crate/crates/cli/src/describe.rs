//! Text descriptors for systems, observables, target sets and families.
//!
//! ```text
//! rotation(golden)            cyclic(5)
//! affine(1,0;2,1 | 1/3, sqrt(2))
//! heisenberg(sqrt(2), sqrt(3), 0)
//! char(1,-1)  vec(1,-1)  const(1)  hchar(1,0)
//! arc(0, 0.25)  box(0,0.5, 0.25,0.5)  residues(0,2)
//! ```

use hardyerg::averages::TargetSet;
use hardyerg::hardy::parse;
use hardyerg::numeric::Surd;
use hardyerg::systems::{Observable, System};
use num_complex::Complex64;

use crate::CliError;

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// `name(args)` → `(name, args)`.
fn call(text: &str) -> Result<(&str, &str), CliError> {
    let text = text.trim();
    let open = text.find('(').ok_or_else(|| CliError::usage(format!("expected name(...), got '{text}'")))?;
    if !text.ends_with(')') {
        return Err(CliError::usage(format!("missing ')' in '{text}'")));
    }
    Ok((text[..open].trim(), &text[open + 1..text.len() - 1]))
}

fn args(inner: &str) -> Vec<&str> {
    if inner.trim().is_empty() {
        Vec::new()
    } else {
        split_top(inner, ',')
    }
}

/// An exact real constant such as `1/3`, `sqrt(2)` or `golden`.
pub fn surd(text: &str) -> Result<Surd, CliError> {
    let text = text.trim();
    if text == "golden" {
        return Ok((Surd::sqrt_of(5) - Surd::one()) * Surd::from_ratio(1, 2));
    }
    let f = parse(text)?;
    match f.terms() {
        [] => Ok(Surd::zero()),
        [t] if t.alpha.is_zero() && t.beta == 0 => Ok(t.coeff.clone()),
        _ => Err(CliError::usage(format!("'{text}' is not a constant"))),
    }
}

fn int(text: &str) -> Result<i64, CliError> {
    text.trim().parse().map_err(|_| CliError::usage(format!("'{text}' is not an integer")))
}

fn real(text: &str) -> Result<f64, CliError> {
    let text = text.trim();
    match text.parse::<f64>() {
        Ok(x) => Ok(x),
        Err(_) => Ok(surd(text)?.to_f64()),
    }
}

fn ints(inner: &str) -> Result<Vec<i64>, CliError> {
    args(inner).into_iter().map(int).collect()
}

fn reals(inner: &str) -> Result<Vec<f64>, CliError> {
    args(inner).into_iter().map(real).collect()
}

pub fn system(text: &str) -> Result<System, CliError> {
    let (name, inner) = call(text)?;
    match name {
        "rotation" => {
            let alpha = args(inner).into_iter().map(surd).collect::<Result<Vec<_>, _>>()?;
            if alpha.is_empty() {
                return Err(CliError::usage("rotation needs at least one angle"));
            }
            Ok(System::rotation(alpha))
        }
        "cyclic" => {
            let m = int(inner)?;
            if m < 1 {
                return Err(CliError::usage("cyclic modulus must be positive"));
            }
            Ok(System::cyclic(m as u64)?)
        }
        "affine" => {
            let parts = split_top(inner, '|');
            let [rows, shift] = parts[..] else {
                return Err(CliError::usage("affine needs 'rows | shift', e.g. affine(1,0;2,1 | 1/3,1/5)"));
            };
            let s = split_top(rows, ';').into_iter().map(ints).collect::<Result<Vec<_>, _>>()?;
            let b = args(shift).into_iter().map(surd).collect::<Result<Vec<_>, _>>()?;
            Ok(System::affine(s, b)?)
        }
        "heisenberg" => {
            let b = args(inner).into_iter().map(surd).collect::<Result<Vec<_>, _>>()?;
            let Ok(beta) = <[Surd; 3]>::try_from(b) else {
                return Err(CliError::usage("heisenberg needs three constants"));
            };
            Ok(System::heisenberg(beta))
        }
        _ => Err(CliError::usage(format!("unknown system '{name}'"))),
    }
}

pub fn observable(text: &str) -> Result<Observable, CliError> {
    let (name, inner) = call(text)?;
    match name {
        "char" => Ok(Observable::TorusCharacter(ints(inner)?)),
        "vec" => Ok(Observable::FiniteVector(reals(inner)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect())),
        "const" => Ok(Observable::Constant(Complex64::new(real(inner)?, 0.0))),
        "hchar" => match ints(inner)?[..] {
            [a, b] => Ok(Observable::HeisenbergHorizontalCharacter(a, b)),
            _ => Err(CliError::usage("hchar needs two integers")),
        },
        _ => Err(CliError::usage(format!("unknown observable '{name}'"))),
    }
}

pub fn target_set(text: &str) -> Result<TargetSet, CliError> {
    let (name, inner) = call(text)?;
    match name {
        "arc" => match reals(inner)?[..] {
            [s, l] => Ok(TargetSet::arc(s, l)),
            _ => Err(CliError::usage("arc needs a start and a length")),
        },
        "box" => {
            let v = reals(inner)?;
            if v.is_empty() || v.len() % 2 != 0 {
                return Err(CliError::usage("box needs start,length pairs"));
            }
            Ok(TargetSet::TorusBox {
                start: v.iter().step_by(2).copied().collect(),
                len: v.iter().skip(1).step_by(2).copied().collect(),
            })
        }
        "residues" => {
            let r = ints(inner)?;
            if r.iter().any(|&x| x < 0) {
                return Err(CliError::usage("residues must be nonnegative"));
            }
            Ok(TargetSet::Cyclic(r.into_iter().map(|x| x as u64).collect()))
        }
        _ => Err(CliError::usage(format!("unknown set '{name}'"))),
    }
}

/// Accepts `{t, 2t, t^2}` as well as `t, 2*t, t^2`.
pub fn family_text(text: &str) -> String {
    let trimmed = text.trim();
    let inner = trimmed.strip_prefix('{').and_then(|s| s.strip_suffix('}')).unwrap_or(trimmed);
    let mut out = String::with_capacity(inner.len() + 4);
    let mut prev = ' ';
    for c in inner.chars() {
        // implicit product after a number: 2t, 3log(t), 2(t+1)
        if prev.is_ascii_digit() && (c.is_ascii_alphabetic() || c == '(') {
            out.push('*');
        }
        out.push(c);
        if !c.is_whitespace() {
            prev = c;
        }
    }
    out
}
