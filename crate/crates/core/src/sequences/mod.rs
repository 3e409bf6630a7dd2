//! Integer-part sequences `[a(n)]`, occupancy counts, exponential sums and
//! one-dimensional discrepancy.

pub mod eval;

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

pub use eval::{floor_linear, CertifiedFloor, Evaluator, MAX_PRECISION, START_PRECISION};

use crate::error::{Error, Result};
use crate::hardy::HardyNormalForm;
use crate::numeric::{ComplexSum, Phase};

/// Certified values of `[a(n)]` for `n` in `n_lo..=n_hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloorSequence {
    pub source: HardyNormalForm,
    pub n_lo: i64,
    pub values: Vec<i64>,
    /// Highest precision any entry needed.
    pub precision_bits_used: u32,
    /// Indices `n` certified by exact symbolic evaluation.
    pub exact_path: Vec<i64>,
}

impl FloorSequence {
    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `[a(n)]`, panicking outside the computed range.
    pub fn at(&self, n: i64) -> i64 {
        self.values[(n - self.n_lo) as usize]
    }

    pub fn get(&self, n: i64) -> Option<i64> {
        usize::try_from(n - self.n_lo).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.n_lo + i as i64, *v))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["n", "value"]).map_err(io)?;
        for (n, v) in self.iter() {
            out.write_record([n.to_string(), v.to_string()]).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// Little-endian `(n, value)` pairs of signed 64-bit integers.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (n, v) in self.iter() {
            w.write_all(&n.to_le_bytes())?;
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads the pairs written by [`FloorSequence::write_binary`].
pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<Vec<(i64, i64)>> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() % 16 != 0 {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "truncated pair"));
    }
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            (
                i64::from_le_bytes(c[..8].try_into().unwrap()),
                i64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}

/// Certified floors of `a(n)` for `n_lo ≤ n ≤ n_hi`.
pub fn floor_seq(a: &HardyNormalForm, n_lo: i64, n_hi: i64) -> Result<FloorSequence> {
    let ev = Evaluator::new(a);
    let count = (n_hi - n_lo + 1).max(0) as usize;
    let certified: Vec<(i64, u32, bool)> = (0..count)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let n = n_lo + i as i64;
            let f = ev.floor(n)?;
            Ok((eval::floor_to_i64(&f.value, n)?, f.precision, f.exact))
        })
        .collect::<Result<_>>()?;
    let mut seq = FloorSequence {
        source: a.clone(),
        n_lo,
        values: Vec::with_capacity(certified.len()),
        precision_bits_used: if certified.is_empty() { 0 } else { START_PRECISION },
        exact_path: Vec::new(),
    };
    for (i, (v, prec, exact)) in certified.into_iter().enumerate() {
        seq.values.push(v);
        seq.precision_bits_used = seq.precision_bits_used.max(prec);
        if exact {
            seq.exact_path.push(n_lo + i as i64);
        }
    }
    Ok(seq)
}

/// Occupancy of the values of `[a(m)]`, `1 ≤ m ≤ N`: `w(n)` counts the `m`
/// with `[a(m)] = n` and `W(n) = Σ_{k ≤ n} w(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitCounts {
    /// Smallest value attained.
    pub first: i64,
    pub w: Vec<u64>,
    #[serde(rename = "W")]
    pub cumulative: Vec<u64>,
}

impl HitCounts {
    pub fn from_values(values: &[i64]) -> Self {
        let (Some(&lo), Some(&hi)) = (values.iter().min(), values.iter().max()) else {
            return HitCounts { first: 0, w: Vec::new(), cumulative: Vec::new() };
        };
        let mut w = vec![0u64; (hi - lo + 1) as usize];
        for v in values {
            w[(v - lo) as usize] += 1;
        }
        let cumulative = w
            .iter()
            .scan(0u64, |s, x| {
                *s += x;
                Some(*s)
            })
            .collect();
        HitCounts { first: lo, w, cumulative }
    }

    pub fn last(&self) -> i64 {
        self.first + self.w.len() as i64 - 1
    }

    pub fn w(&self, n: i64) -> u64 {
        usize::try_from(n - self.first).ok().and_then(|i| self.w.get(i).copied()).unwrap_or(0)
    }

    #[allow(non_snake_case)]
    pub fn W(&self, n: i64) -> u64 {
        if n < self.first {
            return 0;
        }
        let i = ((n - self.first) as usize).min(self.cumulative.len() - 1);
        self.cumulative[i]
    }

    /// `max n·w(n)/W(n)` over `n_min ≤ n ≤` the largest value.
    pub fn max_ratio(&self, n_min: i64) -> f64 {
        (n_min.max(self.first.max(1))..=self.last())
            .filter(|&n| self.W(n) > 0)
            .map(|n| n as f64 * self.w(n) as f64 / self.W(n) as f64)
            .fold(0.0, f64::max)
    }
}

/// Largest value range [`hit_counts`] will tabulate.
pub const MAX_HIT_RANGE: i64 = 1 << 26;

pub fn hit_counts(a: &HardyNormalForm, n: i64) -> Result<HitCounts> {
    let seq = floor_seq(a, 1, n)?;
    if let (Some(lo), Some(hi)) = (seq.values.iter().min(), seq.values.iter().max()) {
        if hi.saturating_sub(*lo) >= MAX_HIT_RANGE {
            return Err(Error::GrowthOutOfRange(format!("values of [{a}] span more than {MAX_HIT_RANGE} integers")));
        }
    }
    Ok(HitCounts::from_values(&seq.values))
}

/// `|E_{n ≤ N} e(seq(n) · θ)|` over the first `N` entries.
pub fn exp_sum(seq: &FloorSequence, theta: Phase, n: usize) -> f64 {
    assert!(n <= seq.len() && n > 0);
    let s: ComplexSum = seq.values[..n].iter().map(|&v| theta.mul_i128(v as i128).e()).collect();
    s.value().norm() / n as f64
}

/// Star discrepancy of points in `[0, 1)` by the sorted-points formula
/// `1/(2N) + max_i |x_(i) − (2i − 1)/(2N)|`.
pub fn star_discrepancy_1d(points: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let dev = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (x - (2.0 * i as f64 + 1.0) / (2.0 * n)).abs())
        .fold(0.0, f64::max);
    1.0 / (2.0 * n) + dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::parse;

    fn seq(s: &str, lo: i64, hi: i64) -> FloorSequence {
        floor_seq(&parse(s).unwrap(), lo, hi).unwrap()
    }

    #[test]
    fn floor_examples() {
        let s = seq("t^(3/2)", 1, 5);
        assert_eq!(s.values, vec![1, 2, 5, 8, 11]);
        assert_eq!(s.exact_path, vec![1, 4]);
        assert_eq!(seq("t^2", 1, 4).values, vec![1, 4, 9, 16]);
        assert_eq!(seq("t/2 + log(t)", 1, 4).values, vec![0, 1, 2, 3]);
        assert_eq!(s.precision_bits_used, 128);
    }

    #[test]
    fn hit_count_examples() {
        let h = hit_counts(&parse("t^(1/2)").unwrap(), 100).unwrap();
        assert_eq!(h.w(1), 3);
        assert_eq!(h.W(h.last()), 100);
        let h = hit_counts(&parse("t").unwrap(), 50).unwrap();
        assert!((1..=50).all(|n| h.w(n) == 1));
    }

    #[test]
    fn exp_sum_examples() {
        let s = seq("t", 1, 100);
        assert!((exp_sum(&s, Phase::ZERO, 100) - 1.0).abs() < 1e-15);
        assert!(exp_sum(&s, Phase::HALF, 100) < 1e-15);
    }

    #[test]
    fn discrepancy_examples() {
        let n = 1000;
        let eq: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        assert!((star_discrepancy_1d(&eq) - 1.0 / n as f64).abs() < 1e-12);
        assert!((star_discrepancy_1d(&[0.0; 10]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn serialization_roundtrip() {
        let s = seq("t^(3/2)", 1, 20);
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 20 * 16);
        let back = read_binary(&buf[..]).unwrap();
        assert_eq!(back, s.iter().collect::<Vec<_>>());
        let mut csv = Vec::new();
        s.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("n,value\n1,1\n2,2\n3,5\n"));
    }
}
