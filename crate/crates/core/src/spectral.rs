//! Probability measures on the dual group.
//!
//! Fourier convention: `ν̂(g) = ∫ χ(g) dν(χ)`, i.e. for a torus point θ the
//! integrand is `exp(+2πi <g, θ>)`. With this sign a sequence built from
//! i.i.d. draws `X ~ ν` as `Y_{s+c} = X_c(s)` has lag-`h` correlations
//! `Y_{g+h} conj(Y_g) = X_c(h)`, whose mean is exactly `ν̂(h)`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::{Character, CharacterParams, FinitePart, GroupDescriptor, GroupElement};
use crate::rng::SeedRecord;

/// Tolerance on the total mass and on atom identity.
pub const MASS_TOL: f64 = 1e-12;
/// Proposals allowed per rejection-sampled draw.
pub const REJECTION_BUDGET: usize = 10_000;
/// Grid points per dimension used to certify a trigonometric density.
pub const DENSITY_GRID: usize = 1 << 12;

/// Nonnegative trigonometric polynomial density on `[0,1)^d` with unit
/// mass: `p(θ) = Σ_k c_k exp(2πi <k, θ>)`, `c_0 = 1`, `c_{-k} = conj(c_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolyDensity {
    dim: usize,
    /// Completed coefficient table keyed by frequency.
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPolyDensity {
    /// Builds a density from coefficients of nonzero frequencies; each `±k`
    /// pair needs to be given once (if both are given they must be
    /// conjugate). The constant term is fixed to 1.
    pub fn new(dim: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidMeasure(format!(
                "trigonometric densities are supported in dimension 1 or 2, got {dim}"
            )));
        }
        let mut coeffs: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        coeffs.insert(vec![0; dim], Complex64::new(1.0, 0.0));
        for (k, c) in terms {
            if k.len() != dim {
                return Err(Error::InvalidMeasure(format!("frequency {k:?} has the wrong length")));
            }
            if k.iter().all(|&x| x == 0) {
                return Err(Error::InvalidMeasure(
                    "the constant coefficient is fixed to 1; do not list frequency 0".into(),
                ));
            }
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            for (key, val) in [(k, c), (neg, c.conj())] {
                if let Some(prev) = coeffs.get(&key) {
                    if (prev - val).norm() > MASS_TOL {
                        return Err(Error::InvalidMeasure(format!(
                            "coefficients at {key:?} are not conjugate-symmetric"
                        )));
                    }
                }
                coeffs.insert(key, val);
            }
        }
        let density = TrigPolyDensity { dim, coeffs };
        let min = density.grid_minimum();
        if min < -1e-12 {
            return Err(Error::InvalidMeasure(format!(
                "density is negative on the verification grid (minimum {min:.3e})"
            )));
        }
        Ok(density)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient table including the conjugate completion.
    pub fn coefficients(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.coeffs
    }

    pub fn density(&self, theta: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(theta).map(|(&ki, &t)| ki as f64 * t).sum();
                (c * Complex64::from_polar(1.0, TAU * phase)).re
            })
            .sum()
    }

    /// `Σ |c_k|`, a rigorous upper bound on the density.
    pub fn upper_bound(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `∫ exp(2πi <g, θ>) p(θ) dθ = c_{-g}`.
    fn transform(&self, g: &[i64]) -> Complex64 {
        let key: Vec<i64> = g.iter().map(|x| -x).collect();
        self.coeffs.get(&key).copied().unwrap_or_default()
    }

    fn grid_minimum(&self) -> f64 {
        let n = DENSITY_GRID;
        let table: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64))
            .collect();
        let idx = |k: i64, j: usize| ((k.rem_euclid(n as i64) as usize) * j) % n;
        let mut min = f64::INFINITY;
        match self.dim {
            1 => {
                for j in 0..n {
                    let v: f64 = self.coeffs.iter().map(|(k, c)| (c * table[idx(k[0], j)]).re).sum();
                    min = min.min(v);
                }
            }
            _ => {
                for j0 in 0..n {
                    for j1 in 0..n {
                        let v: f64 = self
                            .coeffs
                            .iter()
                            .map(|(k, c)| (c * table[idx(k[0], j0)] * table[idx(k[1], j1)]).re)
                            .sum();
                        min = min.min(v);
                    }
                }
            }
        }
        min
    }
}

/// A non-atomic building block of a spectral measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    /// Uniform probability on `Π [lo_i, hi_i) ⊆ [0,1)^d` (lattices only).
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    /// Absolutely continuous with a trigonometric polynomial density.
    TrigPoly(TrigPolyDensity),
    /// Haar probability on the dual: Lebesgue on the torus, counting
    /// measure normalized on the finite dual of a cyclic sum.
    UniformDual,
}

/// A probability measure on the dual group: atoms plus simple components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    group: GroupDescriptor,
    atoms: Vec<(Character, f64)>,
    parts: Vec<(Component, f64)>,
}

impl SpectralMeasure {
    pub fn new(group: GroupDescriptor, atoms: Vec<(Character, f64)>, parts: Vec<(Component, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (i, (chi, w)) in atoms.iter().enumerate() {
            if chi.group() != group {
                return Err(Error::InvalidMeasure(format!("atom {chi} is not a character of {group}")));
            }
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom weight {w} must be positive")));
            }
            if atoms[..i].iter().any(|(other, _)| other.approx_eq(chi, MASS_TOL)) {
                return Err(Error::InvalidMeasure(format!("atom {chi} is listed twice")));
            }
            total += w;
        }
        for (part, w) in &parts {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("component weight {w} must be positive")));
            }
            validate_component(group, part)?;
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(SpectralMeasure { group, atoms, parts })
    }

    pub fn dirac(chi: Character) -> Self {
        SpectralMeasure {
            group: chi.group(),
            atoms: vec![(chi, 1.0)],
            parts: vec![],
        }
    }

    /// Haar probability on the dual.
    pub fn uniform(group: GroupDescriptor) -> Self {
        SpectralMeasure {
            group,
            atoms: vec![],
            parts: vec![(Component::UniformDual, 1.0)],
        }
    }

    /// `½δ_0 + ½δ_{1/2}` on the dual of `Z`.
    pub fn two_atom_half() -> Self {
        let z = GroupDescriptor::integers();
        SpectralMeasure::new(
            z,
            vec![
                (z.torus_character(vec![0.0]).unwrap(), 0.5),
                (z.torus_character(vec![0.5]).unwrap(), 0.5),
            ],
            vec![],
        )
        .expect("valid two-atom measure")
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn atoms(&self) -> &[(Character, f64)] {
        &self.atoms
    }

    pub fn parts(&self) -> &[(Component, f64)] {
        &self.parts
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.parts.is_empty()
    }

    /// `ν̂(g)`.
    pub fn fourier(&self, g: &GroupElement) -> Result<Complex64> {
        self.group.ensure_same(&g.group())?;
        Ok(self.fourier_coords(g.coords()))
    }

    pub(crate) fn fourier_coords(&self, g: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (chi, w) in &self.atoms {
            acc += chi.eval_coords(g) * *w;
        }
        for (part, w) in &self.parts {
            acc += component_transform(part, g) * *w;
        }
        acc
    }

    /// `ν({χ})`.
    pub fn atom_weight(&self, chi: &Character) -> f64 {
        let mut w: f64 = self
            .atoms
            .iter()
            .filter(|(a, _)| a.approx_eq(chi, MASS_TOL))
            .map(|(_, w)| w)
            .sum();
        if chi.group() == self.group {
            if let Some(order) = self.group.order() {
                // Haar measure on a finite dual charges every point.
                for (part, pw) in &self.parts {
                    if matches!(part, Component::UniformDual) {
                        w += pw / order as f64;
                    }
                }
            }
        }
        w.clamp(0.0, 1.0)
    }

    /// One draw from ν.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Character> {
        let mut u: f64 = rng.random::<f64>();
        for (chi, w) in &self.atoms {
            if u < *w {
                return Ok(chi.clone());
            }
            u -= w;
        }
        // Falls through to the last component when rounding leaves a sliver.
        let mut chosen = self.parts.last();
        for entry in &self.parts {
            if u < entry.1 {
                chosen = Some(entry);
                break;
            }
            u -= entry.1;
        }
        match chosen {
            Some((part, _)) => sample_component(self.group, part, rng),
            None => Ok(self.atoms.last().expect("measure has mass").0.clone()),
        }
    }

    /// `n` i.i.d. draws from the stream described by `seed`.
    pub fn sample(&self, n: usize, seed: &SeedRecord) -> Result<CharacterSample> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "at least one draw is required".into(),
            });
        }
        let mut rng = seed.rng();
        let characters = (0..n).map(|_| self.sample_one(&mut rng)).collect::<Result<Vec<_>>>()?;
        Ok(CharacterSample {
            characters,
            seed: seed.clone(),
        })
    }

    /// Hex SHA-256 of a canonical text rendering, used in provenance.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.group.to_string().as_bytes());
        for (chi, w) in &self.atoms {
            hasher.update(format!("|atom:{:?}:{:e}", chi.params(), w).as_bytes());
        }
        for (part, w) in &self.parts {
            hasher.update(format!("|part:{part:?}:{w:e}").as_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn validate_component(group: GroupDescriptor, part: &Component) -> Result<()> {
    match part {
        Component::UniformBox { lo, hi } => {
            if !group.is_lattice() {
                return Err(Error::InvalidMeasure(format!(
                    "{group} admits atoms and the uniform measure only"
                )));
            }
            if lo.len() != group.rank() || hi.len() != group.rank() {
                return Err(Error::InvalidMeasure("uniform box has the wrong dimension".into()));
            }
            for (a, b) in lo.iter().zip(hi) {
                if !(0.0 <= *a && a < b && *b <= 1.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "uniform box side [{a}, {b}) must satisfy 0 <= lo < hi <= 1"
                    )));
                }
            }
            Ok(())
        }
        Component::TrigPoly(p) => {
            if !group.is_lattice() {
                return Err(Error::InvalidMeasure(format!(
                    "{group} admits atoms and the uniform measure only"
                )));
            }
            if p.dim != group.rank() {
                return Err(Error::InvalidMeasure("density dimension does not match the group".into()));
            }
            Ok(())
        }
        Component::UniformDual => Ok(()),
    }
}

fn component_transform(part: &Component, g: &[i64]) -> Complex64 {
    match part {
        Component::UniformBox { lo, hi } => {
            let mut acc = Complex64::new(1.0, 0.0);
            for ((&gi, a), b) in g.iter().zip(lo).zip(hi) {
                if gi == 0 {
                    continue;
                }
                let gf = gi as f64;
                let width = b - a;
                let phase = Complex64::from_polar(1.0, PI * gf * (a + b));
                acc *= phase * ((PI * gf * width).sin() / (PI * gf * width));
            }
            acc
        }
        Component::TrigPoly(p) => p.transform(g),
        Component::UniformDual => {
            if g.iter().all(|&x| x == 0) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }
}

fn sample_component<R: Rng + ?Sized>(group: GroupDescriptor, part: &Component, rng: &mut R) -> Result<Character> {
    match part {
        Component::UniformBox { lo, hi } => {
            let theta: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            group.torus_character(theta)
        }
        Component::UniformDual => match group {
            GroupDescriptor::IntegerLattice { dim } => {
                group.torus_character((0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>())
            }
            GroupDescriptor::CyclicSum { modulus, length } => {
                group.residue_character((0..length).map(|_| rng.random_range(0..modulus as i64)).collect::<Vec<_>>())
            }
        },
        Component::TrigPoly(p) => {
            let bound = p.upper_bound();
            for _ in 0..REJECTION_BUDGET {
                let theta: Vec<f64> = (0..p.dim).map(|_| rng.random::<f64>()).collect();
                if rng.random::<f64>() * bound <= p.density(&theta) {
                    return group.torus_character(theta);
                }
            }
            Err(Error::RejectionExhausted(REJECTION_BUDGET))
        }
    }
}

/// `n` i.i.d. characters with the seed that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterSample {
    pub characters: Vec<Character>,
    pub seed: SeedRecord,
}

/// `f_S(γ) = (1/|S|) Σ_{g∈S} (γ - χ)(g)`, the averaging kernel that
/// concentrates on `χ` as `S` grows.
pub fn fejer_window_eval(s: &FinitePart, chi: &Character, gamma: &Character) -> Result<Complex64> {
    if s.is_empty() {
        return Err(Error::EmptySet("S"));
    }
    s.group().ensure_same(&chi.group())?;
    let diff = gamma.checked_sub(chi)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for g in s.iter_coords() {
        acc += diff.eval_coords(&g);
    }
    Ok(acc / s.len() as f64)
}

/// Torus point of a lattice character, if it is one.
pub fn torus_point(chi: &Character) -> Option<&[f64]> {
    match chi.params() {
        CharacterParams::Torus(t) => Some(t),
        CharacterParams::Residues(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FinitePart;
    use proptest::prelude::*;

    fn z() -> GroupDescriptor {
        GroupDescriptor::integers()
    }

    fn theta(t: f64) -> Character {
        z().torus_character(vec![t]).unwrap()
    }

    #[test]
    fn fourier_examples() {
        let delta0 = SpectralMeasure::dirac(theta(0.0));
        let uniform = SpectralMeasure::uniform(z());
        let two = SpectralMeasure::two_atom_half();
        for h in -6..=6 {
            let g = z().int(h).unwrap();
            assert!((delta0.fourier(&g).unwrap() - 1.0).norm() < 1e-15);
            let expect_u = if h == 0 { 1.0 } else { 0.0 };
            assert!((uniform.fourier(&g).unwrap() - expect_u).norm() < 1e-15);
            // Direct two-atom sum: ½·1 + ½·exp(iπh).
            let direct = 0.5 + 0.5 * Complex64::from_polar(1.0, PI * h as f64);
            let closed = (1.0 + (-1.0f64).powi(h as i32)) / 2.0;
            assert!((direct - closed).norm() < 1e-12);
            assert!((two.fourier(&g).unwrap() - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_box_transform_matches_quadrature() {
        let part = Component::UniformBox { lo: vec![0.1], hi: vec![0.35] };
        let nu = SpectralMeasure::new(z(), vec![], vec![(part, 1.0)]).unwrap();
        for h in [-3i64, -1, 0, 1, 2, 7] {
            // Midpoint quadrature of exp(2πihθ)/(b-a) over [a, b).
            let (a, b, n) = (0.1, 0.35, 200_000);
            let step = (b - a) / n as f64;
            let quad: Complex64 = (0..n)
                .map(|i| Complex64::from_polar(1.0, TAU * h as f64 * (a + (i as f64 + 0.5) * step)))
                .sum::<Complex64>()
                / n as f64;
            let v = nu.fourier(&z().int(h).unwrap()).unwrap();
            assert!((v - quad).norm() < 1e-9, "h={h}: {v} vs {quad}");
        }
    }

    #[test]
    fn trig_poly_transform_is_coefficient_lookup() {
        // p(θ) = 1 + cos(2πθ) = 1 + ½e^{2πiθ} + ½e^{-2πiθ}
        let p = TrigPolyDensity::new(1, vec![(vec![1], Complex64::new(0.5, 0.0))]).unwrap();
        let nu = SpectralMeasure::new(z(), vec![], vec![(Component::TrigPoly(p), 1.0)]).unwrap();
        assert!((nu.fourier(&z().int(1).unwrap()).unwrap() - 0.5).norm() < 1e-15);
        assert!((nu.fourier(&z().int(-1).unwrap()).unwrap() - 0.5).norm() < 1e-15);
        assert!(nu.fourier(&z().int(2).unwrap()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn negative_trig_poly_is_rejected() {
        let err = TrigPolyDensity::new(1, vec![(vec![1], Complex64::new(0.8, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::InvalidMeasure(_)));
    }

    #[test]
    fn measure_validation() {
        assert!(SpectralMeasure::new(z(), vec![(theta(0.0), 0.9)], vec![]).is_err());
        assert!(SpectralMeasure::new(z(), vec![(theta(0.2), 0.5), (theta(0.2), 0.5)], vec![]).is_err());
        let c = GroupDescriptor::cyclic_sum(3, 2).unwrap();
        let bad = Component::UniformBox { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
        assert!(SpectralMeasure::new(c, vec![], vec![(bad, 1.0)]).is_err());
        assert!(SpectralMeasure::new(c, vec![], vec![(Component::UniformDual, 1.0)]).is_ok());
    }

    #[test]
    fn atom_weight_examples() {
        let delta0 = SpectralMeasure::dirac(theta(0.0));
        assert_eq!(delta0.atom_weight(&theta(0.0)), 1.0);
        let uniform = SpectralMeasure::uniform(z());
        assert_eq!(uniform.atom_weight(&theta(0.3)), 0.0);
        let mixed = SpectralMeasure::new(
            z(),
            vec![(theta(0.0), 0.5)],
            vec![(Component::UniformDual, 0.5)],
        )
        .unwrap();
        assert_eq!(mixed.atom_weight(&theta(0.0)), 0.5);
        assert_eq!(mixed.atom_weight(&theta(1e-13)), 0.5);
        assert_eq!(mixed.atom_weight(&theta(1e-6)), 0.0);
    }

    #[test]
    fn cyclic_uniform_charges_every_character() {
        let c = GroupDescriptor::cyclic_sum(2, 3).unwrap();
        let nu = SpectralMeasure::uniform(c);
        let chi = c.residue_character(vec![1, 0, 1]).unwrap();
        assert!((nu.atom_weight(&chi) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn point_mass_sampling() {
        let nu = SpectralMeasure::dirac(theta(1.0 / 3.0));
        let s = nu.sample(5, &SeedRecord::new(1, 0)).unwrap();
        assert_eq!(s.characters.len(), 5);
        assert!(s.characters.iter().all(|c| c.approx_eq(&theta(1.0 / 3.0), 0.0)));
        assert!(nu.sample(0, &SeedRecord::new(1, 0)).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let nu = SpectralMeasure::uniform(z());
        let a = nu.sample(50, &SeedRecord::new(9, 2)).unwrap();
        let b = nu.sample(50, &SeedRecord::new(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_sample_mean_character_vanishes() {
        let nu = SpectralMeasure::uniform(z());
        let s = nu.sample(100_000, &SeedRecord::new(3, 0)).unwrap();
        let one = z().int(1).unwrap();
        let mean: Complex64 =
            s.characters.iter().map(|c| c.eval(&one).unwrap()).sum::<Complex64>() / 1e5;
        // Complex Hoeffding radius at δ = 0.01 for n = 1e5 is ≈ 0.011.
        assert!(mean.norm() < 0.02, "{mean}");
    }

    #[test]
    fn two_atom_sampling_fraction() {
        let nu = SpectralMeasure::two_atom_half();
        let s = nu.sample(10_000, &SeedRecord::new(5, 0)).unwrap();
        let zeros = s.characters.iter().filter(|c| c.is_trivial()).count();
        assert!(((zeros as f64 / 1e4) - 0.5).abs() < 0.02);
    }

    #[test]
    fn trig_poly_sampling_matches_transform() {
        let p = TrigPolyDensity::new(1, vec![(vec![2], Complex64::new(0.0, 0.4))]).unwrap();
        let nu = SpectralMeasure::new(z(), vec![], vec![(Component::TrigPoly(p), 1.0)]).unwrap();
        let n = 40_000;
        let s = nu.sample(n, &SeedRecord::new(11, 0)).unwrap();
        for h in [-2i64, 1, 2] {
            let g = z().int(h).unwrap();
            let mean: Complex64 =
                s.characters.iter().map(|c| c.eval(&g).unwrap()).sum::<Complex64>() / n as f64;
            assert!((mean - nu.fourier(&g).unwrap()).norm() < 0.03, "h={h}");
        }
    }

    #[test]
    fn fejer_examples() {
        let chi = theta(0.2);
        let s = FinitePart::interval(0, 16).unwrap();
        assert!((fejer_window_eval(&s, &chi, &chi).unwrap() - 1.0).norm() < 1e-12);
        let single = FinitePart::interval(0, 1).unwrap();
        assert!((fejer_window_eval(&single, &chi, &theta(0.77)).unwrap() - 1.0).norm() < 1e-15);
        assert!(fejer_window_eval(&FinitePart::empty(z()), &chi, &chi).is_err());
    }

    #[test]
    fn fejer_matches_geometric_sum() {
        let chi = theta(0.0);
        for &n in &[1i64, 2, 7, 64, 1024] {
            for &t in &[0.013, 0.25, 0.5, 0.731] {
                let s = FinitePart::interval(0, n).unwrap();
                let got = fejer_window_eval(&s, &chi, &theta(t)).unwrap();
                let w = Complex64::from_polar(1.0, TAU * t);
                let oracle = (w.powf(n as f64) - 1.0) / (w - 1.0) / n as f64;
                assert!((got - oracle).norm() < 1e-9, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn fejer_decay_bound() {
        // |(ĥ(γ-χ) - 1) f_S| ≤ |(S+h) Δ S| / |S|, so with |e^{2πiθ} - 1| > 1/n
        // and S = [0, k) (defect 2/k for h = 1) we get |f_S| ≤ 2n / k.
        let chi = theta(0.0);
        let one = FinitePart::singleton(&z().int(1).unwrap());
        for &k in &[10i64, 100, 1000] {
            let s = FinitePart::interval(0, k).unwrap();
            let defect = crate::groups::invariance_defect(&one, &s).unwrap();
            let defect = *defect.numer() as f64 / *defect.denom() as f64;
            for &t in &[0.01, 0.05, 0.3, 0.5] {
                let gap = (Complex64::from_polar(1.0, TAU * t) - 1.0).norm();
                let n = (1.0 / gap).floor() + 1.0;
                let v = fejer_window_eval(&s, &chi, &theta(t)).unwrap();
                assert!(v.norm() * gap <= defect + 1e-12);
                assert!(v.norm() <= defect * n + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn fourier_is_hermitian(
            t1 in 0.0f64..1.0, t2 in 0.0f64..1.0, w in 0.05f64..0.95, h in -40i64..40,
            lo in 0.0f64..0.5, width in 0.01f64..0.5,
        ) {
            prop_assume!((t1 - t2).abs() > 1e-9);
            let nu = SpectralMeasure::new(
                z(),
                vec![(theta(t1), w * 0.5), (theta(t2), (1.0 - w) * 0.5)],
                vec![(Component::UniformBox { lo: vec![lo], hi: vec![lo + width] }, 0.5)],
            ).unwrap();
            let a = nu.fourier(&z().int(h).unwrap()).unwrap();
            let b = nu.fourier(&z().int(-h).unwrap()).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-12);
            prop_assert!(a.norm() <= 1.0 + 1e-12);
        }
    }
}
