//! Stationary Gaussian processes with prescribed covariance.
//!
//! Paths satisfy `E[x_a conj(x_b)] = φ(g_a - g_b)`, so the ensemble mean of
//! `x_h conj(x_0)` estimates `φ(h)`. Complex paths are circularly symmetric
//! (zero pseudo-covariance); real paths are used when φ is real-valued.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Character, FinitePart, GroupDescriptor, GroupElement};
use crate::linalg::{cholesky, pivoted_cholesky, CMatrix};
use crate::posdef::{gram_matrix, PosDefFn, REL_TOL};
use crate::rng::SeedRecord;

/// Largest window handled by the dense sampler.
pub const MAX_WINDOW: usize = 256;
/// Diagonal jitter relative to `φ(0)` added before factoring.
pub const JITTER_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
}

/// `M[i][j] = φ(g_j - g_i)` on a window, with its sampling factor.
#[derive(Clone, Debug)]
pub struct CovarianceMatrix {
    window: Vec<GroupElement>,
    matrix: CMatrix,
    field: Field,
    jitter: f64,
    min_pivot: f64,
    /// Lower factor of `conj(M) + jitter·I`.
    factor: CMatrix,
}

impl CovarianceMatrix {
    pub fn window(&self) -> &[GroupElement] {
        &self.window
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Smallest pivot of the positive semidefiniteness check.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }
}

/// Uses the real field when every entry is real.
pub fn build_covariance(phi: &PosDefFn, window: &[GroupElement]) -> Result<CovarianceMatrix> {
    let m = gram_matrix(phi, window)?;
    let scale = phi.at_zero().max(f64::MIN_POSITIVE);
    let real = (0..m.rows()).all(|i| m.row(i).iter().all(|z| z.im.abs() <= 1e-12 * scale));
    finish_covariance(phi, window, m, if real { Field::Real } else { Field::Complex })
}

pub fn build_covariance_with_field(phi: &PosDefFn, window: &[GroupElement], field: Field) -> Result<CovarianceMatrix> {
    let m = gram_matrix(phi, window)?;
    if field == Field::Real {
        let scale = phi.at_zero().max(f64::MIN_POSITIVE);
        if (0..m.rows()).any(|i| m.row(i).iter().any(|z| z.im.abs() > 1e-12 * scale)) {
            return Err(Error::InvalidParameter {
                name: "field",
                reason: "φ takes non-real values on this window".into(),
            });
        }
    }
    finish_covariance(phi, window, m, field)
}

fn finish_covariance(phi: &PosDefFn, window: &[GroupElement], m: CMatrix, field: Field) -> Result<CovarianceMatrix> {
    if window.len() > MAX_WINDOW {
        return Err(Error::WindowTooLarge {
            size: window.len(),
            limit: MAX_WINDOW,
        });
    }
    let trace = m.trace().re.max(f64::MIN_POSITIVE);
    let check = pivoted_cholesky(&m, REL_TOL * trace);
    if !check.psd {
        return Err(Error::NotPositiveDefinite { value: check.min_pivot });
    }
    let base = JITTER_REL * phi.at_zero().max(f64::MIN_POSITIVE);
    let mut sigma = m.conj();
    if field == Field::Real {
        for i in 0..sigma.rows() {
            for j in 0..sigma.cols() {
                sigma[(i, j)].im = 0.0;
            }
        }
    }
    // Rounding can push a rank-deficient factorization below the base
    // jitter; escalate a few decades before giving up.
    let mut jitter = base;
    loop {
        let mut s = sigma.clone();
        s.add_to_diagonal(jitter);
        match cholesky(&s) {
            Ok(factor) => {
                return Ok(CovarianceMatrix {
                    window: window.to_vec(),
                    matrix: m,
                    field,
                    jitter,
                    min_pivot: check.min_pivot,
                    factor,
                })
            }
            Err(d) if jitter >= base * 1e4 => return Err(Error::NotPositiveDefinite { value: d }),
            Err(_) => jitter *= 10.0,
        }
    }
}

/// `m` sample paths on a window, stored path-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    window: Vec<GroupElement>,
    values: Vec<Complex64>,
    paths: usize,
    field: Field,
    seed: SeedRecord,
}

impl PathEnsemble {
    pub fn window(&self) -> &[GroupElement] {
        &self.window
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn seed(&self) -> &SeedRecord {
        &self.seed
    }

    pub fn path(&self, p: usize) -> &[Complex64] {
        let n = self.window.len();
        &self.values[p * n..(p + 1) * n]
    }

    fn position(&self, coords: &[i64]) -> Option<usize> {
        self.window.iter().position(|g| g.coords() == coords)
    }

    /// One line per coordinate: path, element coordinates, re, im.
    pub fn write_columns<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in 0..self.paths {
            for (g, v) in self.window.iter().zip(self.path(p)) {
                write!(out, "{p}")?;
                for c in g.coords() {
                    write!(out, "\t{c}")?;
                }
                writeln!(out, "\t{}\t{}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `m` paths `x = L w`; path `p` draws from stream `seed.stream + p`, so the
/// output does not depend on the number of worker threads.
pub fn sample_paths(cov: &CovarianceMatrix, m: usize, seed: &SeedRecord) -> Result<PathEnsemble> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "at least one path is required".into(),
        });
    }
    let n = cov.window.len();
    let mut values = vec![Complex64::new(0.0, 0.0); m * n];
    values.par_chunks_mut(n).enumerate().for_each(|(p, out)| {
        let mut rng = seed.substream(p as u64).rng();
        let w: Vec<Complex64> = match cov.field {
            Field::Real => (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect(),
            Field::Complex => (0..n).map(|_| complex_normal(&mut rng)).collect(),
        };
        for (i, x) in out.iter_mut().enumerate() {
            *x = cov.factor.row(i)[..=i].iter().zip(&w).map(|(l, z)| l * z).sum();
        }
    });
    Ok(PathEnsemble {
        window: cov.window.clone(),
        values,
        paths: m,
        field: cov.field,
        seed: seed.clone(),
    })
}

/// Exact sampler for long stationary windows `[0, n)` in `Z`: atoms of the
/// spectral measure are drawn as random-amplitude characters, the rest by
/// circulant embedding.
#[derive(Clone)]
pub struct StationarySampler {
    n: usize,
    field: Field,
    atoms: Vec<(Character, f64)>,
    /// `sqrt(λ_k / M)` for the embedding of size `M`.
    roots: Vec<f64>,
    fft: Arc<dyn rustfft::Fft<f64>>,
}

impl std::fmt::Debug for StationarySampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StationarySampler")
            .field("n", &self.n)
            .field("field", &self.field)
            .field("atoms", &self.atoms)
            .field("embedding", &self.roots.len())
            .finish()
    }
}

/// Atomic part of the spectral measure of φ, as far as the representation
/// reveals it.
fn atomic_part(phi: &PosDefFn) -> Vec<(Character, f64)> {
    match phi {
        PosDefFn::FromMeasure(nu) => nu.atoms().to_vec(),
        PosDefFn::CharacterFn { character, amplitude } => vec![(character.clone(), *amplitude)],
        PosDefFn::Tabulated(_) => vec![],
        PosDefFn::SumOf(terms) => terms
            .iter()
            .flat_map(|(w, f)| atomic_part(f).into_iter().map(move |(c, a)| (c, a * w)))
            .collect(),
    }
}

impl StationarySampler {
    pub fn new(phi: &PosDefFn, n: usize, field: Field) -> Result<Self> {
        if phi.group() != GroupDescriptor::integers() {
            return Err(Error::Unsupported("long-window sampling is implemented for Z only".into()));
        }
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "window needs at least two points".into(),
            });
        }
        let atoms = atomic_part(phi);
        let residual = |j: i64| -> Complex64 {
            let mut v = phi.eval_coords(&[j]);
            for (c, a) in &atoms {
                v -= c.eval_coords(&[j]) * *a;
            }
            v
        };
        let scale = phi.at_zero().max(f64::MIN_POSITIVE);
        let mut planner = FftPlanner::new();
        let mut last_err = 0.0;
        for doubling in 0..4 {
            let size = (2 * n) << doubling;
            let half = size / 2;
            let mut col = vec![Complex64::new(0.0, 0.0); size];
            for j in 0..half {
                col[j] = residual(j as i64);
            }
            col[half] = Complex64::new(residual(half as i64).re, 0.0);
            for j in 1..half {
                col[size - j] = residual(-(j as i64));
            }
            let fwd = planner.plan_fft_forward(size);
            fwd.process(&mut col);
            let total: f64 = col.iter().map(|z| z.re.abs()).sum::<f64>().max(scale);
            let worst = col.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            if worst >= -1e-9 * total {
                let roots = col.iter().map(|z| (z.re.max(0.0) / size as f64).sqrt()).collect();
                return Ok(StationarySampler {
                    n,
                    field,
                    atoms,
                    roots,
                    fft: planner.plan_fft_inverse(size),
                });
            }
            last_err = worst;
        }
        Err(Error::NotPositiveDefinite { value: last_err })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// One path on `[0, n)`.
    pub fn path(&self, seed: &SeedRecord) -> Vec<Complex64> {
        let mut rng = seed.rng();
        let mut buf: Vec<Complex64> = self.roots.iter().map(|r| complex_normal(&mut rng) * *r).collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        for (c, a) in &self.atoms {
            let amp = complex_normal(&mut rng) * a.sqrt();
            for (j, x) in buf.iter_mut().enumerate() {
                *x += amp * c.eval_coords(&[j as i64]);
            }
        }
        if self.field == Field::Real {
            for x in buf.iter_mut() {
                *x = Complex64::new(std::f64::consts::SQRT_2 * x.re, 0.0);
            }
        }
        buf
    }

    /// `m` paths; path `p` uses stream `seed.stream + p`.
    pub fn sample(&self, m: usize, seed: &SeedRecord) -> Result<PathEnsemble> {
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "at least one path is required".into(),
            });
        }
        let paths: Vec<Vec<Complex64>> = (0..m).into_par_iter().map(|p| self.path(&seed.substream(p as u64))).collect();
        let z = GroupDescriptor::integers();
        Ok(PathEnsemble {
            window: (0..self.n as i64).map(|j| z.int(j).expect("integer")).collect(),
            values: paths.concat(),
            paths: m,
            field: self.field,
            seed: seed.clone(),
        })
    }
}

/// Mean over paths with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub value: Complex64,
    /// `sqrt(Σ|z - mean|² / (m (m - 1)))`.
    pub std_error: f64,
    pub paths: usize,
}

pub(crate) fn mean_with_error(samples: &[Complex64]) -> EnsembleEstimate {
    let m = samples.len();
    let mean: Complex64 = samples.iter().sum::<Complex64>() / m as f64;
    let var = if m > 1 {
        samples.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (m as f64 - 1.0)
    } else {
        0.0
    };
    EnsembleEstimate {
        value: mean,
        std_error: (var / m as f64).sqrt(),
        paths: m,
    }
}

/// Mean of `x_h conj(x_0)` over paths.
pub fn ensemble_correlation(ens: &PathEnsemble, h: &GroupElement) -> Result<EnsembleEstimate> {
    let zero = h.group().identity();
    let i0 = ens
        .position(zero.coords())
        .ok_or_else(|| Error::WindowUnderflow("0 is not in the window".into()))?;
    let ih = ens
        .position(h.coords())
        .ok_or_else(|| Error::WindowUnderflow(format!("lag {h} is not in the window")))?;
    let samples: Vec<Complex64> = (0..ens.paths).map(|p| ens.path(p)[ih] * ens.path(p)[i0].conj()).collect();
    Ok(mean_with_error(&samples))
}

/// Mean of `x_g` over paths.
pub fn ensemble_mean(ens: &PathEnsemble, g: &GroupElement) -> Result<EnsembleEstimate> {
    let i = ens
        .position(g.coords())
        .ok_or_else(|| Error::WindowUnderflow(format!("{g} is not in the window")))?;
    let samples: Vec<Complex64> = (0..ens.paths).map(|p| ens.path(p)[i]).collect();
    Ok(mean_with_error(&samples))
}

/// `(1/|F|) Σ_{g∈F} x_{g+h} conj(x_g)` along path `p`.
pub fn path_time_correlation(ens: &PathEnsemble, p: usize, h: &GroupElement, f: &FinitePart) -> Result<Complex64> {
    if p >= ens.paths {
        return Err(Error::IndexOutOfRange {
            index: p,
            min: 0,
            max: ens.paths.saturating_sub(1),
        });
    }
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let path = ens.path(p);
    let contiguous = ens.window.first().map(|g| g.group()) == Some(GroupDescriptor::integers())
        && ens.window.iter().enumerate().all(|(j, g)| g.coords()[0] == ens.window[0].coords()[0] + j as i64);
    let mut acc = Complex64::new(0.0, 0.0);
    for g in f.elements() {
        let gh = g.checked_add(h)?;
        let lookup = |e: &GroupElement| -> Result<Complex64> {
            let idx = if contiguous {
                let off = e.coords()[0] - ens.window[0].coords()[0];
                (0..path.len() as i64).contains(&off).then_some(off as usize)
            } else {
                ens.position(e.coords())
            };
            idx.map(|i| path[i])
                .ok_or_else(|| Error::WindowUnderflow(format!("{e} is not in the window")))
        };
        acc += lookup(&gh)? * lookup(&g)?.conj();
    }
    Ok(acc / f.len() as f64)
}

/// Same average on a raw path over `[0, n)` in `Z`, with `F = [0, len)`.
pub fn path_time_correlation_slice(path: &[Complex64], h: usize, len: usize) -> Result<Complex64> {
    if len == 0 || len + h > path.len() {
        return Err(Error::WindowUnderflow(format!(
            "averaging over [0, {len}) at lag {h} needs {} points, path has {}",
            len + h,
            path.len()
        )));
    }
    let s: Complex64 = (0..len).map(|g| path[g + h] * path[g].conj()).sum();
    Ok(s / len as f64)
}

/// Largest `|mean_p x_a x_b|` over window pairs.
pub fn pseudo_covariance_max(ens: &PathEnsemble) -> f64 {
    let n = ens.window.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let s: Complex64 = (0..ens.paths).map(|p| ens.path(p)[a] * ens.path(p)[b]).sum();
            worst = worst.max((s / ens.paths as f64).norm());
        }
    }
    worst
}

/// `S[a][b] = mean_p x_a conj(x_b)`.
pub fn sample_covariance(ens: &PathEnsemble) -> CMatrix {
    let n = ens.window.len();
    CMatrix::from_fn(n, n, |a, b| {
        (0..ens.paths).map(|p| ens.path(p)[a] * ens.path(p)[b].conj()).sum::<Complex64>() / ens.paths as f64
    })
}
