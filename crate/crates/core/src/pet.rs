//! PET induction: type vectors of polynomial and Hardy families, the van der
//! Corput family transform and the pivot rules that make the type drop.
//!
//! Members are normal forms whose coefficients are polynomials in the shift
//! variables `h1, h2, …`. Every shift is taken symbolically and every
//! decision is the one that holds for all large values of the shifts: a
//! coefficient is nonzero as soon as it is a nonzero polynomial.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{g_band, Growth, HardyForm, HardyNormalForm};
use crate::numeric::{HPoly, Surd};

/// Depth at which a derivation is declared non-terminating.
pub const MAX_DEPTH: usize = 64;
/// Largest family a derivation may produce.
pub const MAX_FAMILY: usize = 2048;

pub type SymForm = HardyForm<HPoly>;

/// A family member: its normal form and a readable unexpanded label such as
/// `(t+h1)^2 - t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub form: SymForm,
    pub label: String,
}

impl Member {
    pub fn new(form: &HardyNormalForm) -> Self {
        Member { form: form.to_hpoly(), label: form.to_string() }
    }
}

/// An ordered family of functions, with the number of shift variables used
/// so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub members: Vec<Member>,
    pub shifts: usize,
}

pub type PolyFamily = Family;
pub type HardyFamily = Family;

impl Family {
    pub fn new(forms: &[HardyNormalForm]) -> Self {
        Family { members: forms.iter().map(Member::new).collect(), shifts: 0 }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|m| m.label.clone()).collect()
    }

    pub fn forms(&self) -> Vec<String> {
        self.members.iter().map(|m| clip(m.form.to_string())).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// `(d, w_d, …, w_1)` or `(d, n_d, …, n_0)`, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TypeVector(pub Vec<u64>);

impl TypeVector {
    pub fn d(&self) -> u64 {
        self.0[0]
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn degenerate(msg: impl Into<String>) -> Error {
    Error::DegenerateFamily(msg.into())
}

fn poly_degree(m: &Member) -> Result<u32> {
    m.form.degree().ok_or_else(|| degenerate(format!("{} is not a polynomial", m.label)))
}

fn degrees(p: &Family) -> Result<Vec<u32>> {
    if p.is_empty() {
        return Err(degenerate("empty family"));
    }
    let degs = p.members.iter().map(poly_degree).collect::<Result<Vec<_>>>()?;
    for (m, d) in p.members.iter().zip(&degs) {
        if *d == 0 {
            return Err(degenerate(format!("{} is constant", m.label)));
        }
    }
    Ok(degs)
}

/// Checks that members are non-constant polynomials with non-constant
/// pairwise differences.
fn check_poly_family(p: &Family) -> Result<Vec<u32>> {
    let degs = degrees(p)?;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p.members[i].form.sub(&p.members[j].form).degree() == Some(0) {
                return Err(degenerate(format!(
                    "{} and {} differ by a constant",
                    p.members[i].label, p.members[j].label
                )));
            }
        }
    }
    Ok(degs)
}

fn count_distinct<T: Eq + std::hash::Hash>(items: impl Iterator<Item = T>) -> u64 {
    items.collect::<HashSet<T>>().len() as u64
}

/// `(d, w_d, …, w_1)` with `w_i` the number of distinct leading
/// coefficients among members of degree `i`.
pub fn poly_type(p: &PolyFamily) -> Result<TypeVector> {
    Ok(poly_type_with(p, &check_poly_family(p)?))
}

fn poly_type_with(p: &Family, degs: &[u32]) -> TypeVector {
    let d = *degs.iter().max().unwrap();
    let mut v = vec![d as u64];
    for i in (1..=d).rev() {
        let lcs = p.members.iter().zip(degs).filter(|(_, &k)| k == i);
        v.push(count_distinct(lcs.map(|(m, _)| m.form.leading_coeff().unwrap())));
    }
    TypeVector(v)
}

/// Replaces the variable `t` in a label by `(t+h)`.
fn shift_label(label: &str, h: &str) -> String {
    let chars: Vec<char> = label.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let word = |j: Option<&char>| j.is_some_and(|x| x.is_alphanumeric() || *x == '_');
        if c == 't' && !word(i.checked_sub(1).and_then(|j| chars.get(j))) && !word(chars.get(i + 1)) {
            let enclosed = i > 0 && chars[i - 1] == '(' && chars.get(i + 1) == Some(&')');
            if enclosed {
                out.push_str(&format!("t+{h}"));
            } else {
                out.push_str(&format!("(t+{h})"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn wrap(label: &str) -> String {
    let inner = label.strip_prefix('-').unwrap_or(label);
    if inner.contains(" + ") || inner.contains(" - ") || label.starts_with('-') {
        format!("({label})")
    } else {
        label.to_string()
    }
}

fn difference(a: &Member, shifted: bool, h_index: usize, h: &HPoly, p: &Member) -> Member {
    let (form, label) = if shifted {
        (a.form.shift(h), shift_label(&a.label, &format!("h{h_index}")))
    } else {
        (a.form.clone(), a.label.clone())
    };
    let form = form.sub(&p.form);
    let mut label = format!("{label} - {}", wrap(&p.label));
    if label.len() > MAX_LABEL {
        label = clip(form.to_string());
    }
    Member { form, label }
}

/// Labels longer than this are replaced by the expanded form.
const MAX_LABEL: usize = 200;

fn clip(mut s: String) -> String {
    if s.len() > MAX_LABEL {
        let mut cut = MAX_LABEL;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push('…');
    }
    s
}

/// The family `{p_i(t+h) − p(t)} ∪ {p_i(t) − p(t)}` with the shifted
/// differences of linear `p_i` and the zero difference removed.
pub fn poly_vdc(p: &PolyFamily, pivot: usize) -> Result<PolyFamily> {
    poly_vdc_with(p, &check_poly_family(p)?, pivot)
}

fn poly_vdc_with(p: &Family, degs: &[u32], pivot: usize) -> Result<Family> {
    let piv = p.members.get(pivot).ok_or_else(|| Error::Precondition("pivot out of range".into()))?;
    let k = p.shifts + 1;
    let h = HPoly::var(k);
    let mut members = Vec::new();
    for (m, &d) in p.members.iter().zip(degs) {
        if d >= 2 {
            members.push(difference(m, true, k, &h, piv));
        }
    }
    for m in &p.members {
        if m.form != piv.form {
            members.push(difference(m, false, k, &h, piv));
        }
    }
    if members.is_empty() {
        return Err(degenerate("transform removed every member"));
    }
    Ok(Family { members, shifts: k })
}

/// Which case of the pivot lemma selected the pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PivotCase {
    /// Some member grows strictly slower than the first; take a slowest one.
    MinimalGrowth,
    /// All comparable, with a leading-coefficient ratio different from 1.
    RatioNotOne,
    /// All leading terms equal; take the largest remainder.
    MaximalRemainder,
}

/// Pivot for a polynomial family whose first member has maximal degree
/// `d ≥ 2`. Ties go to the earliest member.
pub fn choose_pivot(p: &PolyFamily) -> Result<(usize, PivotCase)> {
    choose_pivot_with(p, &check_poly_family(p)?)
}

fn choose_pivot_with(p: &Family, degs: &[u32]) -> Result<(usize, PivotCase)> {
    let d = *degs.iter().max().unwrap();
    if degs[0] != d || d < 2 {
        return Err(Error::Precondition(format!(
            "first member must have the family degree, which must be at least 2 (got {} of degree {})",
            p.members[0].label, degs[0]
        )));
    }
    if degs.iter().any(|&k| k < d) {
        let min = *degs.iter().min().unwrap();
        return Ok((degs.iter().position(|&k| k == min).unwrap(), PivotCase::MinimalGrowth));
    }
    let lc1 = p.members[0].form.leading_coeff().unwrap();
    if let Some(i) = (1..p.len()).find(|&i| p.members[i].form.leading_coeff().unwrap() != lc1) {
        return Ok((i, PivotCase::RatioNotOne));
    }
    Ok((argmax_remainder(p), PivotCase::MaximalRemainder))
}

/// Index `i ≥ 1` maximizing the growth of `p_i − p_1`, or `0` for a
/// single member.
fn argmax_remainder(p: &Family) -> usize {
    let mut best: Option<(usize, Option<Growth>)> = None;
    for i in 1..p.len() {
        let g = p.members[i].form.sub(&p.members[0].form).leading_growth();
        if best.as_ref().is_none_or(|(_, b)| g > *b) {
            best = Some((i, g));
        }
    }
    best.map_or(0, |b| b.0)
}

/// Band `i` with `t^i ≺ a ≺ t^{i+1}`. Pure powers `t^k` are placed in band
/// `k`, which makes the Hardy type of a polynomial family its polynomial
/// type followed by `n_0 = 0`.
fn band(g: &Growth) -> Option<u64> {
    if !g.alpha.is_positive() {
        return None;
    }
    match g.alpha.to_integer() {
        Some(k) if g.beta >= 0 => num_traits::ToPrimitive::to_u64(&k),
        _ => g_band(g),
    }
}

fn member_band(m: &Member) -> Result<u64> {
    m.form
        .leading_growth()
        .as_ref()
        .and_then(band)
        .ok_or_else(|| degenerate(format!("{} lies in no growth band", m.label)))
}

/// `(d, n_d, …, n_0)` with `n_i` the number of classes of members in band
/// `i` under `a ~ b ⇔ a − b ≺ t^i`.
pub fn hardy_type(f: &HardyFamily) -> Result<TypeVector> {
    if f.is_empty() {
        return Err(degenerate("empty family"));
    }
    let bands = f.members.iter().map(member_band).collect::<Result<Vec<_>>>()?;
    let d = *bands.iter().max().unwrap();
    let mut v = vec![d];
    for i in (0..=d).rev() {
        let ti = Growth::power(i as i64);
        let mut reps: Vec<&SymForm> = Vec::new();
        for (m, &b) in f.members.iter().zip(&bands) {
            if b == i && !reps.iter().any(|r| m.form.sub(r).grows_slower_than(&ti)) {
                reps.push(&m.form);
            }
        }
        v.push(reps.len() as u64);
    }
    Ok(TypeVector(v))
}

/// Members in `G` and pairwise differences in `G`.
pub fn check_nice(f: &HardyFamily) -> Result<()> {
    let in_g = |x: &SymForm| x.leading_growth().as_ref().and_then(g_band).is_some();
    for (i, m) in f.members.iter().enumerate() {
        if !in_g(&m.form) {
            return Err(degenerate(format!("{} does not have fractional growth", m.label)));
        }
        for o in &f.members[i + 1..] {
            if !in_g(&m.form.sub(&o.form)) {
                return Err(degenerate(format!(
                    "{} - ({}) does not have fractional growth",
                    m.label, o.label
                )));
            }
        }
    }
    Ok(())
}

/// The family `{a_i(t+h) − a(t)} ∪ {a_i(t) − a(t)}` with the shifted
/// differences of members `≺ t` and the zero difference removed.
pub fn hardy_vdc(f: &HardyFamily, pivot: usize) -> Result<HardyFamily> {
    check_nice(f)?;
    hardy_vdc_unchecked(f, pivot)
}

fn hardy_vdc_unchecked(f: &Family, pivot: usize) -> Result<Family> {
    let piv = f.members.get(pivot).ok_or_else(|| Error::Precondition("pivot out of range".into()))?;
    let k = f.shifts + 1;
    let h = HPoly::var(k);
    let t = Growth::power(1);
    let mut members = Vec::new();
    for m in &f.members {
        if !m.form.grows_slower_than(&t) {
            members.push(difference(m, true, k, &h, piv));
        }
    }
    for m in &f.members {
        if m.form != piv.form {
            members.push(difference(m, false, k, &h, piv));
        }
    }
    if members.is_empty() {
        return Err(degenerate("transform removed every member"));
    }
    Ok(Family { members, shifts: k })
}

/// Pivot for a nice family whose first member is `≻ t` and of maximal
/// growth. Ties go to the earliest member.
pub fn choose_hardy_pivot(f: &HardyFamily) -> Result<(usize, PivotCase)> {
    check_nice(f)?;
    choose_hardy_pivot_unchecked(f)
}

fn choose_hardy_pivot_unchecked(f: &Family) -> Result<(usize, PivotCase)> {
    let growth: Vec<Growth> = f.members.iter().map(|m| m.form.leading_growth().unwrap()).collect();
    let g1 = &growth[0];
    if *g1 <= Growth::power(1) || growth.iter().any(|g| g > g1) {
        return Err(Error::Precondition(format!(
            "first member {} must grow faster than t and maximally",
            f.members[0].label
        )));
    }
    if growth.iter().any(|g| g < g1) {
        let min = growth.iter().min().unwrap();
        return Ok((growth.iter().position(|g| g == min).unwrap(), PivotCase::MinimalGrowth));
    }
    let lc1 = f.members[0].form.leading_coeff().unwrap();
    if let Some(i) = (1..f.len()).find(|&i| f.members[i].form.leading_coeff().unwrap() != lc1) {
        return Ok((i, PivotCase::RatioNotOne));
    }
    Ok((argmax_remainder(f), PivotCase::MaximalRemainder))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    Polynomial,
    Hardy,
}

/// One family in a derivation, with the pivot used to leave it.
#[derive(Clone, Debug, Serialize)]
pub struct TreeNode {
    pub depth: usize,
    #[serde(rename = "type")]
    pub ty: TypeVector,
    pub members: Vec<String>,
    pub expanded: Vec<String>,
    pub pivot: Option<String>,
    pub case: Option<PivotCase>,
    pub children: Vec<TreeNode>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationTree {
    pub kind: FamilyKind,
    pub root: TreeNode,
    pub depth: usize,
    pub max_family: usize,
}

impl DerivationTree {
    /// Types along the derivation, root first.
    pub fn types(&self) -> Vec<TypeVector> {
        let mut out = Vec::new();
        let mut node = Some(&self.root);
        while let Some(n) = node {
            out.push(n.ty.clone());
            node = n.children.first();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut node = Some(&self.root);
        while let Some(n) = node {
            let pad = "  ".repeat(n.depth);
            out.push_str(&format!("{pad}{} {{{}}}\n", n.ty, n.members.join(", ")));
            if let (Some(p), Some(c)) = (&n.pivot, n.case) {
                out.push_str(&format!("{pad}  pivot {p} ({c:?})\n"));
            } else {
                out.push_str(&format!("{pad}  leaf\n"));
            }
            node = n.children.first();
        }
        out
    }
}

/// Moves the first member of maximal growth to the front.
fn max_first(f: &mut Family) {
    let mut best = 0;
    for i in 1..f.len() {
        if f.members[i].form.compare_growth(&f.members[best].form).is_gt() {
            best = i;
        }
    }
    if best != 0 {
        let m = f.members.remove(best);
        f.members.insert(0, m);
    }
}

/// Lower bound on the number of further steps of a polynomial derivation
/// with lemma pivots. Pivots always come from a class of minimal degree and
/// each step removes exactly one class; removing a class of degree `j ≥ 2`
/// creates a class of degree `j − 1`, and removing a class of size `m` in
/// degree 2 creates `2m − 1` classes in degree 1. Every step also doubles
/// the size of every class of higher degree.
/// Sizes are only counted as of the first step in their degree, since the
/// order of classes within a degree is not fixed in advance.
fn remaining_lower_bound(f: &Family, degs: &[u32]) -> u64 {
    let d = *degs.iter().max().unwrap();
    if d < 2 {
        return 0;
    }
    let mut sizes: Vec<Vec<u64>> = vec![Vec::new(); d as usize + 1];
    for j in 1..=d {
        let mut classes: HashMap<&HPoly, u64> = HashMap::new();
        for (m, _) in f.members.iter().zip(degs).filter(|(_, &k)| k == j) {
            *classes.entry(m.form.leading_coeff().unwrap()).or_default() += 1;
        }
        sizes[j as usize] = classes.into_values().collect();
        sizes[j as usize].sort_unstable();
    }
    let grown = |m: u64, steps: u64| m.saturating_mul(1u64.checked_shl(steps.min(63) as u32).unwrap_or(u64::MAX));
    let mut steps = sizes[1].len() as u64;
    let before_two = steps;
    let top = d as usize;
    for j in 2..top {
        for &m in &sizes[j] {
            let cost = if j == 2 { grown(m, before_two).saturating_mul(2) } else { j as u64 };
            steps = steps.saturating_add(cost);
        }
    }
    let w = sizes[top].len();
    let before_top = steps;
    for &m in &sizes[top][..w - 1] {
        let cost = if top == 2 { grown(m, before_top).saturating_mul(2) } else { d as u64 };
        steps = steps.saturating_add(cost);
    }
    steps.saturating_add(d as u64 - 1)
}

/// Lower bound on the depth of the polynomial derivation of `p` under the
/// lemma pivots.
pub fn depth_lower_bound(p: &PolyFamily) -> Result<u64> {
    let degs = check_poly_family(p)?;
    Ok(remaining_lower_bound(p, &degs))
}

/// Applies pivot selection and the family transform until the base case:
/// degree one for polynomial families, sublinear growth for Hardy families.
/// Every edge must strictly lower the type.
pub fn derivation_tree(start: &Family, kind: FamilyKind) -> Result<DerivationTree> {
    let base = match kind {
        FamilyKind::Polynomial => 1,
        FamilyKind::Hardy => 0,
    };
    let step = |f: &Family| -> Result<(TypeVector, Option<Vec<u32>>)> {
        match kind {
            FamilyKind::Polynomial => {
                let degs = degrees(f)?;
                Ok((poly_type_with(f, &degs), Some(degs)))
            }
            FamilyKind::Hardy => Ok((hardy_type(f)?, None)),
        }
    };
    match kind {
        FamilyKind::Polynomial => {
            check_poly_family(start)?;
        }
        FamilyKind::Hardy => check_nice(start)?,
    }
    let mut fam = start.clone();
    max_first(&mut fam);
    let mut chain: Vec<TreeNode> = Vec::new();
    let mut max_family = fam.len();
    let (mut ty, mut degs) = step(&fam)?;
    loop {
        let depth = chain.len();
        let mut node = TreeNode {
            depth,
            ty: ty.clone(),
            members: fam.labels(),
            expanded: fam.forms(),
            pivot: None,
            case: None,
            children: Vec::new(),
        };
        if ty.d() <= base {
            chain.push(node);
            break;
        }
        if depth >= MAX_DEPTH
            || (kind == FamilyKind::Polynomial && (depth as u64).saturating_add(remaining_lower_bound(&fam, degs.as_deref().unwrap())) > MAX_DEPTH as u64)
        {
            return Err(Error::NonTermination(MAX_DEPTH));
        }
        let (pivot, case) = match &degs {
            Some(d) => choose_pivot_with(&fam, d)?,
            None => choose_hardy_pivot_unchecked(&fam)?,
        };
        node.pivot = Some(fam.members[pivot].label.clone());
        node.case = Some(case);
        let mut next = match &degs {
            Some(d) => poly_vdc_with(&fam, d, pivot)?,
            None => hardy_vdc_unchecked(&fam, pivot)?,
        };
        if next.len() > MAX_FAMILY {
            return Err(Error::FamilyTooLarge { limit: MAX_FAMILY, depth: depth + 1 });
        }
        max_first(&mut next);
        let (next_ty, next_degs) = step(&next)?;
        if next_ty >= ty {
            return Err(Error::HypothesisFailed(format!(
                "type did not decrease: {ty} -> {next_ty} at depth {depth}"
            )));
        }
        max_family = max_family.max(next.len());
        chain.push(node);
        (fam, ty, degs) = (next, next_ty, next_degs);
    }
    let depth = chain.len() - 1;
    let mut root = chain.pop().unwrap();
    while let Some(mut parent) = chain.pop() {
        parent.children.push(root);
        root = parent;
    }
    Ok(DerivationTree { kind, root, depth, max_family })
}

/// Parses a comma-separated family.
pub fn parse_family(text: &str) -> Result<Family> {
    let forms = text
        .split(',')
        .map(|s| crate::hardy::parse(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Family::new(&forms))
}

/// Leading coefficient of `a` divided by that of `b`, when both are
/// constants.
pub fn leading_ratio(a: &SymForm, b: &SymForm) -> Option<Surd> {
    let (x, y) = (a.leading_coeff()?.as_constant()?, b.leading_coeff()?.as_constant()?);
    x.div(&y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> Family {
        parse_family(s).unwrap()
    }

    fn tv(v: &[u64]) -> TypeVector {
        TypeVector(v.to_vec())
    }

    #[test]
    fn poly_types() {
        assert_eq!(poly_type(&fam("t, 2*t, t^2")).unwrap(), tv(&[2, 1, 2]));
        assert_eq!(poly_type(&fam("t")).unwrap(), tv(&[1, 1]));
        assert_eq!(poly_type(&fam("t^2, t^2 + t, 3*t^2")).unwrap(), tv(&[2, 2, 0]));
        assert!(matches!(poly_type(&fam("t, t + 1")), Err(Error::DegenerateFamily(_))));
        assert!(matches!(poly_type(&fam("t, 5")), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn poly_transform_examples() {
        let p = poly_vdc(&fam("t, 2*t, t^2"), 0).unwrap();
        assert_eq!(p.labels(), vec!["(t+h1)^2 - t", "2*t - t", "t^2 - t"]);
        assert_eq!(p.forms()[1], "t");
        assert_eq!(poly_type(&p).unwrap(), tv(&[2, 1, 1]));
        let p = poly_vdc(&fam("t^2"), 0).unwrap();
        assert_eq!(p.forms(), vec!["2*h1*t + h1^2"]);
        assert_eq!(poly_type(&p).unwrap(), tv(&[1, 1]));
        let p = poly_vdc(&fam("t, 2*t"), 0).unwrap();
        assert_eq!(p.forms(), vec!["t"]);
        assert!(matches!(poly_vdc(&fam("t"), 0), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn pivots() {
        assert_eq!(choose_pivot(&fam("t^2, t, 2*t")).unwrap(), (1, PivotCase::MinimalGrowth));
        assert_eq!(choose_pivot(&fam("t^2, t^2 + t")).unwrap(), (1, PivotCase::MaximalRemainder));
        assert_eq!(choose_pivot(&fam("t^2, 2*t^2")).unwrap(), (1, PivotCase::RatioNotOne));
        assert!(matches!(choose_pivot(&fam("t, t^2")), Err(Error::Precondition(_))));
        assert!(matches!(choose_pivot(&fam("t, 2*t")), Err(Error::Precondition(_))));
    }

    #[test]
    fn hardy_types() {
        let f = fam("t^(1/3), t^(5/2), t^(5/2) + t^(1/2), t^(5/2) + t^(7/3)");
        assert_eq!(hardy_type(&f).unwrap(), tv(&[2, 2, 0, 1]));
        assert_eq!(hardy_type(&fam("t^(1/2)")).unwrap(), tv(&[0, 1]));
        assert_eq!(hardy_type(&fam("t^(3/2), t^(3/2) + t^(1/4)")).unwrap(), tv(&[1, 1, 0]));
        assert_eq!(hardy_type(&fam("t, 2*t, t^2")).unwrap(), tv(&[2, 1, 2, 0]));
    }

    #[test]
    fn hardy_transform_examples() {
        let f = fam("t^(1/3), t^(1/2), t^(3/2)");
        assert_eq!(hardy_type(&f).unwrap(), tv(&[1, 1, 2]));
        let g = hardy_vdc(&f, 0).unwrap();
        assert_eq!(g.labels(), vec!["(t+h1)^3/2 - t^1/3", "t^1/2 - t^1/3", "t^3/2 - t^1/3"]);
        assert_eq!(hardy_type(&g).unwrap(), tv(&[1, 1, 1]));
        let g = hardy_vdc(&fam("t^(3/2)"), 0).unwrap();
        assert_eq!(g.forms(), vec!["3/2*h1*t^1/2"]);
        assert_eq!(hardy_type(&g).unwrap(), tv(&[0, 1]));
        let g = hardy_vdc(&fam("t^(1/2), t^(1/3)"), 1).unwrap();
        assert_eq!(g.labels(), vec!["t^1/2 - t^1/3"]);
    }

    #[test]
    fn hardy_pivots() {
        let f = fam("t^(3/2), t^(1/3), t^(1/2)");
        assert_eq!(choose_hardy_pivot(&f).unwrap(), (1, PivotCase::MinimalGrowth));
        assert_eq!(choose_hardy_pivot(&fam("t^(3/2), 2*t^(3/2)")).unwrap(), (1, PivotCase::RatioNotOne));
        let f = fam("t^(3/2), t^(3/2) + t^(1/2), t^(3/2) + t^(5/4)");
        assert_eq!(choose_hardy_pivot(&f).unwrap(), (2, PivotCase::MaximalRemainder));
        assert!(choose_hardy_pivot(&fam("t^(1/2)")).is_err());
    }

    #[test]
    fn derivations() {
        let t = derivation_tree(&fam("t"), FamilyKind::Polynomial).unwrap();
        assert_eq!(t.depth, 0);
        let t = derivation_tree(&fam("t^2"), FamilyKind::Polynomial).unwrap();
        assert_eq!(t.types(), vec![tv(&[2, 1, 0]), tv(&[1, 1])]);
        let t = derivation_tree(&fam("t, 2*t, t^2"), FamilyKind::Polynomial).unwrap();
        let types = t.types();
        assert_eq!(&types[..2], &[tv(&[2, 1, 2]), tv(&[2, 1, 1])]);
        assert!(types.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(types.last().unwrap().d(), 1);
        let h = derivation_tree(&fam("t^(1/3), t^(1/2), t^(3/2)"), FamilyKind::Hardy).unwrap();
        assert_eq!(h.types()[..2], [tv(&[1, 1, 2]), tv(&[1, 1, 1])]);
        assert_eq!(h.types().last().unwrap().d(), 0);
        assert!(h.to_text().contains("pivot t^1/3"));
    }

    #[test]
    fn lower_bound_matches_short_derivations() {
        for text in ["t^2", "t, 2*t, t^2", "t^3", "t^2, t^2 + t", "t, t^3", "t^2, 2*t^2, 3*t"] {
            let f = fam(text);
            let degs = check_poly_family(&f).unwrap();
            let tree = derivation_tree(&f, FamilyKind::Polynomial).unwrap();
            assert!(remaining_lower_bound(&f, &degs) <= tree.depth as u64, "{text}");
        }
        let f = fam("t, t^2");
        assert_eq!(remaining_lower_bound(&f, &check_poly_family(&f).unwrap()), 2);
    }

    #[test]
    fn labels_shift_only_the_variable() {
        assert_eq!(shift_label("sqrt(2)*t^2 - log(t)", "h1"), "sqrt(2)*(t+h1)^2 - log(t+h1)");
    }
}
