//! Rotation systems realizing pure-point spectra, and the additivity check
//! for a Gaussian part plus a rotation part on a product space.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmsc::{ensemble_correlation, ensemble_mean, mean_with_error, PathEnsemble};
use crate::groups::{Character, FinitePart, GroupDescriptor, GroupElement};
use crate::posdef::PosDefFn;
use crate::rng::SeedRecord;
use crate::spectral::{SpectralMeasure, MASS_TOL};

/// Rotation of the torus `T^J` by `(χ_1(g), …, χ_J(g))` with observable
/// `f(x) = Σ_j sqrt(a_j) exp(2πi x_j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationSystem {
    group: GroupDescriptor,
    atoms: Vec<(f64, Character)>,
}

impl RotationSystem {
    pub fn new(group: GroupDescriptor, atoms: Vec<(f64, Character)>) -> Result<Self> {
        for (i, (a, chi)) in atoms.iter().enumerate() {
            group.ensure_same(&chi.group())?;
            if !(*a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    reason: format!("{a} must be positive"),
                });
            }
            if atoms[..i].iter().any(|(_, c)| c.approx_eq(chi, MASS_TOL)) {
                return Err(Error::InvalidParameter {
                    name: "atoms",
                    reason: format!("character {chi} is listed twice"),
                });
            }
        }
        Ok(RotationSystem { group, atoms })
    }

    /// The rotation of a purely atomic measure.
    pub fn from_measure(nu: &SpectralMeasure) -> Result<Self> {
        if !nu.is_purely_atomic() {
            return Err(Error::InvalidMeasure("rotation systems need a purely atomic measure".into()));
        }
        RotationSystem::new(nu.group(), nu.atoms().iter().map(|(c, w)| (*w, c.clone())).collect())
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn atoms(&self) -> &[(f64, Character)] {
        &self.atoms
    }

    pub fn dimension(&self) -> usize {
        self.atoms.len()
    }

    /// `f(x + g·θ)`; `x` has one coordinate per atom.
    pub fn observable_at(&self, x: &[f64], g: &[i64]) -> Complex64 {
        self.atoms
            .iter()
            .zip(x)
            .map(|((a, chi), xj)| Complex64::from_polar(a.sqrt(), std::f64::consts::TAU * (xj + chi.turns(g))))
            .sum()
    }

    /// `Σ_j sqrt(a_j)`, the sup norm bound of `f`.
    pub fn sup_bound(&self) -> f64 {
        self.atoms.iter().map(|(a, _)| a.sqrt()).sum()
    }
}

/// `Σ_j a_j χ_j(h)`.
pub fn rotation_correlation(sys: &RotationSystem, h: &GroupElement) -> Result<Complex64> {
    sys.group.ensure_same(&h.group())?;
    Ok(sys.atoms.iter().map(|(a, chi)| chi.eval_coords(h.coords()) * *a).sum())
}

/// `(1/|F|) Σ_{g∈F} f(x0 + (g+h)θ) conj(f(x0 + gθ))`.
pub fn rotation_orbit_average_over(sys: &RotationSystem, x0: &[f64], f: &FinitePart, h: &GroupElement) -> Result<Complex64> {
    sys.group.ensure_same(&h.group())?;
    sys.group.ensure_same(&f.group())?;
    if x0.len() != sys.atoms.len() {
        return Err(Error::InvalidParameter {
            name: "x0",
            reason: format!("{} coordinates for {} atoms", x0.len(), sys.atoms.len()),
        });
    }
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for g in f.elements() {
        let gh = g.checked_add(h)?;
        acc += sys.observable_at(x0, gh.coords()) * sys.observable_at(x0, g.coords()).conj();
    }
    Ok(acc / f.len() as f64)
}

/// Birkhoff average over `n = 0..N` for a `Z`-action.
pub fn rotation_orbit_average(sys: &RotationSystem, x0: &[f64], n: usize, h: i64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "must be at least 1".into(),
        });
    }
    let z = GroupDescriptor::integers();
    rotation_orbit_average_over(sys, x0, &FinitePart::interval(0, n as i64)?, &z.int(h)?)
}

/// `(1/N) Σ_{n<N} f(x0 + nθ)` for a `Z`-action.
pub fn rotation_orbit_mean(sys: &RotationSystem, x0: &[f64], n: usize) -> Complex64 {
    let s: Complex64 = (0..n as i64).map(|k| sys.observable_at(x0, &[k])).sum();
    s / n.max(1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    /// The weak part's mean was not compatible with 0.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumRow {
    pub lag: Vec<i64>,
    /// `φ_w(h) + φ_c(h)`.
    pub target: Complex64,
    /// Mean over paths of `F(h) conj F(0)` for `F = x + f_c` on the product space.
    pub product_estimate: Complex64,
    pub product_std_error: f64,
    /// Ensemble estimate of the weak part plus the exact rotation correlation.
    pub parts_estimate: Complex64,
    pub parts_std_error: f64,
    /// `|mean x_h| · |orbit mean of conj(f_c)|`.
    pub cross_term: f64,
    pub cross_limit: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumReport {
    pub status: CheckStatus,
    pub weak_mean: Complex64,
    pub weak_mean_std_error: f64,
    pub rows: Vec<SumRow>,
}

/// Multiple of the standard error allowed for the correlation estimates.
pub const SUM_SE_BUDGET: f64 = 4.0;

/// Pairs each weak path with an independent uniform start point of the
/// rotation and checks that correlations add. `orbit_len` sets the orbit
/// used for the mean of `f_c`.
pub fn sum_representation_check(
    weak: &PathEnsemble,
    phi_w: &PosDefFn,
    compact: &RotationSystem,
    lags: &[GroupElement],
    orbit_len: usize,
    seed: &SeedRecord,
) -> Result<SumReport> {
    let group = compact.group;
    group.ensure_same(&phi_w.group())?;
    let zero = group.identity();
    let mean0 = ensemble_mean(weak, &zero)?;
    let inconclusive = mean0.value.norm() > 3.0 * mean0.std_error;

    let starts: Vec<Vec<f64>> = (0..weak.paths())
        .map(|p| {
            let mut rng = seed.substream(p as u64).rng();
            (0..compact.dimension()).map(|_| rng.random::<f64>()).collect()
        })
        .collect();
    let i0 = weak
        .window()
        .iter()
        .position(|g| g == &zero)
        .ok_or_else(|| Error::WindowUnderflow("0 is not in the window".into()))?;
    let orbit_mean = if compact.dimension() == 0 {
        0.0
    } else if group == GroupDescriptor::integers() {
        rotation_orbit_mean(compact, &vec![0.0; compact.dimension()], orbit_len).norm()
    } else {
        compact.sup_bound()
    };

    let mut rows = Vec::with_capacity(lags.len());
    let mut all_ok = true;
    for h in lags {
        group.ensure_same(&h.group())?;
        let ih = weak
            .window()
            .iter()
            .position(|g| g == h)
            .ok_or_else(|| Error::WindowUnderflow(format!("lag {h} is not in the window")))?;
        let samples: Vec<Complex64> = (0..weak.paths())
            .map(|p| {
                let x = weak.path(p);
                let u = &starts[p];
                let fh = x[ih] + compact.observable_at(u, h.coords());
                let f0 = x[i0] + compact.observable_at(u, zero.coords());
                fh * f0.conj()
            })
            .collect();
        let product = mean_with_error(&samples);
        let weak_est = ensemble_correlation(weak, h)?;
        let rot = rotation_correlation(compact, h)?;
        let target = phi_w.eval(h)? + rot;
        let parts = weak_est.value + rot;
        let mean_h = ensemble_mean(weak, h)?;
        let cross = mean_h.value.norm() * orbit_mean;
        let cross_limit = 3.0 * mean_h.std_error * compact.sup_bound().max(f64::MIN_POSITIVE);
        let ok = (product.value - target).norm() <= SUM_SE_BUDGET * product.std_error + 1e-12
            && (parts - target).norm() <= SUM_SE_BUDGET * weak_est.std_error + 1e-12
            && cross <= cross_limit;
        all_ok &= ok;
        rows.push(SumRow {
            lag: h.coords().to_vec(),
            target,
            product_estimate: product.value,
            product_std_error: product.std_error,
            parts_estimate: parts,
            parts_std_error: weak_est.std_error,
            cross_term: cross,
            cross_limit,
            ok,
        });
    }
    let status = if inconclusive {
        CheckStatus::Inconclusive
    } else if all_ok {
        CheckStatus::Passed
    } else {
        CheckStatus::Failed
    };
    Ok(SumReport {
        status,
        weak_mean: mean0.value,
        weak_mean_std_error: mean0.std_error,
        rows,
    })
}
