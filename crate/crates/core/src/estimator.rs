//! Følner-averaged correlations, atom estimates and Hoeffding certificates.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{Character, FinitePart, GroupDescriptor, GroupElement};
use crate::sequence::{ComplexSequence, NO_DRAW};

/// Default certificate confidence.
pub const DEFAULT_DELTA: f64 = 0.01;

/// How the sample count behind a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateBasis {
    /// Count of distinct random draws feeding the average (tiled or block
    /// provenance). Terms sharing a draw are not independent, so this is the
    /// honest sample size.
    IndependentCenters,
    /// Raw term count; the terms need not be independent.
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Radius `x` with `4 exp(-n x² / 2) = δ`.
    pub radius: f64,
    pub delta: f64,
    /// `4 exp(-n x² / 2)` at the radius (equals δ up to rounding).
    pub bound: f64,
    pub effective_n: usize,
    pub basis: CertificateBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub lag: Vec<i64>,
    pub value: Complex64,
    /// Number of averaged terms.
    pub n: usize,
    pub certificate: Option<Certificate>,
}

/// `2 exp(-2 n x²)`, unclamped.
pub fn hoeffding_bound(n: usize, x: f64) -> f64 {
    2.0 * (-2.0 * n as f64 * x * x).exp()
}

/// `4 exp(-n x² / 2)`, unclamped.
pub fn complex_hoeffding_bound(n: usize, x: f64) -> f64 {
    4.0 * (-(n as f64) * x * x / 2.0).exp()
}

/// A bound as a probability.
pub fn clamp_probability(bound: f64) -> f64 {
    bound.min(1.0)
}

/// Smallest `x` with `4 exp(-n x² / 2) <= δ`.
pub fn certify_radius(n: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} is outside (0, 1)"),
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "no samples".into(),
        });
    }
    Ok((2.0 * (4.0 / delta).ln() / n as f64).sqrt())
}

/// Attaches a certificate. `effective_n` overrides the term count and marks
/// the basis as independent centers.
pub fn certify(est: &CorrelationEstimate, delta: f64, effective_n: Option<usize>) -> Result<CorrelationEstimate> {
    let (n, basis) = match effective_n {
        Some(k) => (k, CertificateBasis::IndependentCenters),
        None => (est.n, CertificateBasis::Heuristic),
    };
    let radius = certify_radius(n, delta)?;
    Ok(CorrelationEstimate {
        certificate: Some(Certificate {
            radius,
            delta,
            bound: complex_hoeffding_bound(n, radius),
            effective_n: n,
            basis,
        }),
        ..est.clone()
    })
}

fn shifted(group: GroupDescriptor, g: &[i64], h: &[i64]) -> Vec<i64> {
    match group.modulus() {
        None => g.iter().zip(h).map(|(a, b)| a + b).collect(),
        Some(m) => g.iter().zip(h).map(|(a, b)| (a + b).rem_euclid(m)).collect(),
    }
}

fn underflow(missing: &[Vec<i64>], total: usize) -> Error {
    let shown: Vec<String> = missing.iter().take(5).map(|c| format!("{c:?}")).collect();
    Error::WindowUnderflow(format!(
        "{total} required indices are outside the sequence window, e.g. {}",
        shown.join(", ")
    ))
}

/// `(1/|F|) Σ_{g∈F} c_{g+h} conj(c_g)`.
pub fn folner_correlation(seq: &ComplexSequence, h: &GroupElement, f: &FinitePart) -> Result<CorrelationEstimate> {
    let group = seq.group();
    group.ensure_same(&h.group())?;
    group.ensure_same(&f.group())?;
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut missing = Vec::new();
    let mut missing_count = 0;
    for g in f.iter_coords() {
        let gh = shifted(group, &g, h.coords());
        match (seq.get_coords(&gh), seq.get_coords(&g)) {
            (Some(a), Some(b)) => acc += a * b.conj(),
            (a, b) => {
                for (v, c) in [(a, gh), (b, g)] {
                    if v.is_none() {
                        missing_count += 1;
                        if missing.len() < 5 {
                            missing.push(c);
                        }
                    }
                }
            }
        }
    }
    if missing_count > 0 {
        return Err(underflow(&missing, missing_count));
    }
    Ok(CorrelationEstimate {
        lag: h.coords().to_vec(),
        value: acc / f.len() as f64,
        n: f.len(),
        certificate: None,
    })
}

/// `(1/|F|) Σ_{g∈F} c_g conj(χ(g))`, an estimate of `ν({χ})`.
pub fn atom_estimate(seq: &ComplexSequence, chi: &Character, f: &FinitePart) -> Result<CorrelationEstimate> {
    let group = seq.group();
    group.ensure_same(&chi.group())?;
    group.ensure_same(&f.group())?;
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut missing = Vec::new();
    let mut missing_count = 0;
    for g in f.iter_coords() {
        match seq.get_coords(&g) {
            Some(v) => acc += v * chi.eval_coords(&g).conj(),
            None => {
                missing_count += 1;
                if missing.len() < 5 {
                    missing.push(g);
                }
            }
        }
    }
    if missing_count > 0 {
        return Err(underflow(&missing, missing_count));
    }
    Ok(CorrelationEstimate {
        lag: vec![0; group.rank()],
        value: acc / f.len() as f64,
        n: f.len(),
        certificate: None,
    })
}

/// Distinct random draws feeding the correlation average at lag `h` over
/// `F`, if the sequence records them.
pub fn effective_count(seq: &ComplexSequence, h: &GroupElement, f: &FinitePart) -> Option<usize> {
    let ids = seq.draw_ids()?;
    let group = seq.group();
    let mut seen = BTreeSet::new();
    for g in f.iter_coords() {
        for c in [shifted(group, &g, h.coords()), g] {
            if let Some(i) = seq.window().index_of(&c) {
                if ids[i] != NO_DRAW {
                    seen.insert(ids[i]);
                }
            }
        }
    }
    Some(seen.len().max(1))
}

/// Distinct random draws among the points of `F`.
pub fn effective_count_on(seq: &ComplexSequence, f: &FinitePart) -> Option<usize> {
    let ids = seq.draw_ids()?;
    let seen: BTreeSet<u32> = f
        .iter_coords()
        .filter_map(|c| seq.window().index_of(&c).map(|i| ids[i]))
        .filter(|&id| id != NO_DRAW)
        .collect();
    Some(seen.len().max(1))
}

/// Correlation with a certificate using provenance when available.
pub fn certified_correlation(
    seq: &ComplexSequence,
    h: &GroupElement,
    f: &FinitePart,
    delta: f64,
) -> Result<CorrelationEstimate> {
    let est = folner_correlation(seq, h, f)?;
    certify(&est, delta, effective_count(seq, h, f))
}

fn integer_window(seq: &ComplexSequence) -> Result<(i64, usize)> {
    if seq.group() != GroupDescriptor::integers() {
        return Err(Error::Unsupported("the all-lags path needs a sequence on Z".into()));
    }
    Ok((seq.window().lo()[0], seq.len()))
}

/// Lags `0..=h_max` with `F = [a, a + N - h)` for a sequence on `[a, a + N)`,
/// via one zero-padded FFT.
pub fn all_lags_fast(seq: &ComplexSequence, h_max: usize) -> Result<Vec<CorrelationEstimate>> {
    let (_, n) = integer_window(seq)?;
    if h_max >= n {
        return Err(Error::InvalidParameter {
            name: "h_max",
            reason: format!("{h_max} is not below the sequence length {n}"),
        });
    }
    let size = (2 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..n].copy_from_slice(seq.values());
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    Ok((0..=h_max)
        .map(|h| CorrelationEstimate {
            lag: vec![h as i64],
            value: buf[h] / (size as f64 * (n - h) as f64),
            n: n - h,
            certificate: None,
        })
        .collect())
}

/// Direct-summation counterpart of [`all_lags_fast`].
pub fn all_lags_direct(seq: &ComplexSequence, h_max: usize) -> Result<Vec<CorrelationEstimate>> {
    let (_, n) = integer_window(seq)?;
    if h_max >= n {
        return Err(Error::InvalidParameter {
            name: "h_max",
            reason: format!("{h_max} is not below the sequence length {n}"),
        });
    }
    let v = seq.values();
    Ok((0..=h_max)
        .map(|h| {
            let s: Complex64 = (0..n - h).map(|g| v[g + h] * v[g].conj()).sum();
            CorrelationEstimate {
                lag: vec![h as i64],
                value: s / (n - h) as f64,
                n: n - h,
                certificate: None,
            }
        })
        .collect())
}
