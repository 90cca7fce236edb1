//! Positive definite functions and finite-window verification.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Character, GroupDescriptor, GroupElement};
use crate::linalg::{hermitian_eigenvalues, pivoted_cholesky, CMatrix};
use crate::spectral::SpectralMeasure;

/// Largest window `check_positive_definite` accepts.
pub const MAX_CHECK_WINDOW: usize = 64;
/// Relative pivot tolerance: pivots down to `-REL_TOL * trace` pass.
pub const REL_TOL: f64 = 1e-9;

/// Names accepted by [`make_example`].
pub const CATALOG: [&str; 4] = ["eigenvalue_sqrt2", "fejer1", "delta", "two_atom_half"];

/// A function on the group, assumed (and checkable) to be positive definite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosDefFn {
    FromMeasure(SpectralMeasure),
    CharacterFn { character: Character, amplitude: f64 },
    Tabulated(Table),
    SumOf(Vec<(f64, PosDefFn)>),
}

/// Finitely supported function given by a table, completed by
/// `φ(-g) = conj(φ(g))` and zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableSpec", into = "TableSpec")]
pub struct Table {
    group: GroupDescriptor,
    values: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TableSpec {
    group: GroupDescriptor,
    entries: Vec<(Vec<i64>, Complex64)>,
}

impl TryFrom<TableSpec> for Table {
    type Error = Error;

    fn try_from(spec: TableSpec) -> Result<Self> {
        Table::new(spec.group, spec.entries)
    }
}

impl From<Table> for TableSpec {
    fn from(t: Table) -> Self {
        TableSpec {
            group: t.group,
            entries: t.values.into_iter().collect(),
        }
    }
}

impl Table {
    pub fn new(group: GroupDescriptor, entries: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (coords, v) in entries {
            let g = group.element(coords)?;
            let neg = g.neg();
            for (key, val) in [(g.coords().to_vec(), v), (neg.coords().to_vec(), v.conj())] {
                if let Some(prev) = values.get(&key) {
                    let prev: &Complex64 = prev;
                    if (prev - val).norm() > 1e-12 {
                        return Err(Error::InvalidParameter {
                            name: "table",
                            reason: format!("entries at ±{key:?} are not conjugate"),
                        });
                    }
                }
                values.insert(key, val);
            }
        }
        let zero = group.identity();
        let at0 = values.get(zero.coords()).copied().unwrap_or_default();
        if at0.im.abs() > 1e-12 || at0.re < 0.0 {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: format!("value at 0 must be real and nonnegative, got {at0}"),
            });
        }
        Ok(Table { group, values })
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn get(&self, coords: &[i64]) -> Complex64 {
        self.values.get(coords).copied().unwrap_or_default()
    }

    /// Completed entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.values.iter()
    }
}

impl PosDefFn {
    pub fn character(character: Character, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: format!("{amplitude} is outside (0, 1]"),
            });
        }
        Ok(PosDefFn::CharacterFn { character, amplitude })
    }

    pub fn tabulated(group: GroupDescriptor, entries: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        Ok(PosDefFn::Tabulated(Table::new(group, entries)?))
    }

    pub fn sum_of(terms: Vec<(f64, PosDefFn)>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::EmptySet("sum"));
        };
        let group = first.1.group();
        for (w, f) in &terms {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    reason: format!("{w} must be positive"),
                });
            }
            group.ensure_same(&f.group())?;
        }
        Ok(PosDefFn::SumOf(terms))
    }

    pub fn group(&self) -> GroupDescriptor {
        match self {
            PosDefFn::FromMeasure(nu) => nu.group(),
            PosDefFn::CharacterFn { character, .. } => character.group(),
            PosDefFn::Tabulated(t) => t.group,
            PosDefFn::SumOf(terms) => terms[0].1.group(),
        }
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Complex64> {
        self.group().ensure_same(&g.group())?;
        Ok(self.eval_coords(g.coords()))
    }

    /// `φ(g)` for reduced coordinates of the right rank.
    pub(crate) fn eval_coords(&self, g: &[i64]) -> Complex64 {
        match self {
            PosDefFn::FromMeasure(nu) => nu.fourier_coords(g),
            PosDefFn::CharacterFn { character, amplitude } => character.eval_coords(g) * *amplitude,
            PosDefFn::Tabulated(t) => t.get(g),
            PosDefFn::SumOf(terms) => terms.iter().map(|(w, f)| f.eval_coords(g) * *w).sum(),
        }
    }

    /// `φ(0)`.
    pub fn at_zero(&self) -> f64 {
        self.eval_coords(self.group().identity().coords()).re
    }
}

/// `M[i][j] = φ(g_j - g_i)`, Hermitian by construction.
pub fn gram_matrix(phi: &PosDefFn, pts: &[GroupElement]) -> Result<CMatrix> {
    if pts.is_empty() {
        return Err(Error::EmptySet("window"));
    }
    let group = phi.group();
    for (i, p) in pts.iter().enumerate() {
        group.ensure_same(&p.group())?;
        if pts[..i].contains(p) {
            return Err(Error::DuplicatePoint(p.to_string()));
        }
    }
    let n = pts.len();
    let mut m = CMatrix::zeros(n, n);
    let d0 = phi.at_zero();
    for i in 0..n {
        m[(i, i)] = Complex64::new(d0, 0.0);
        for j in (i + 1)..n {
            let v = phi.eval_coords(pts[j].checked_sub(&pts[i])?.coords());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(m)
}

/// Outcome of a finite-window positive definiteness check. A pass means
/// "consistent with positive definiteness on these windows", nothing more.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    /// Index of the window with the smallest normalized pivot.
    pub worst_window: usize,
    /// Smallest pivot on the worst window.
    pub min_pivot: f64,
    /// Smallest eigenvalue of the worst window's Gram matrix.
    pub min_eigenvalue: f64,
    pub windows_checked: usize,
}

/// Runs a pivoted Cholesky on each window's Gram matrix. `tol` is the
/// absolute pivot tolerance; `None` uses `REL_TOL * trace` per window.
pub fn check_positive_definite(phi: &PosDefFn, windows: &[Vec<GroupElement>], tol: Option<f64>) -> Result<Verdict> {
    if windows.is_empty() {
        return Err(Error::EmptySet("window list"));
    }
    if let Some(w) = windows.iter().find(|w| w.len() > MAX_CHECK_WINDOW) {
        return Err(Error::WindowTooLarge {
            size: w.len(),
            limit: MAX_CHECK_WINDOW,
        });
    }
    let mut passed = true;
    let mut worst = (0usize, f64::INFINITY, f64::INFINITY);
    let mut worst_matrix = None;
    for (idx, w) in windows.iter().enumerate() {
        let m = gram_matrix(phi, w)?;
        let scale = m.trace().re.max(f64::MIN_POSITIVE);
        let t = tol.unwrap_or(REL_TOL * scale);
        let chol = pivoted_cholesky(&m, t);
        passed &= chol.psd;
        let normalized = chol.min_pivot / scale;
        if normalized < worst.1 {
            worst = (idx, normalized, chol.min_pivot);
            worst_matrix = Some(m);
        }
    }
    let min_eigenvalue = worst_matrix
        .map(|m| hermitian_eigenvalues(&m)[0])
        .unwrap_or(f64::NAN);
    Ok(Verdict {
        passed,
        worst_window: worst.0,
        min_pivot: worst.2,
        min_eigenvalue,
        windows_checked: windows.len(),
    })
}

/// Catalog entries over `Z`.
pub fn make_example(name: &str) -> Result<PosDefFn> {
    let z = GroupDescriptor::integers();
    match name {
        "eigenvalue_sqrt2" => PosDefFn::character(z.torus_character(vec![2f64.sqrt().fract()])?, 1.0),
        "fejer1" => PosDefFn::tabulated(
            z,
            vec![(vec![0], Complex64::new(1.0, 0.0)), (vec![1], Complex64::new(0.5, 0.0))],
        ),
        "delta" => Ok(PosDefFn::FromMeasure(SpectralMeasure::uniform(z))),
        "two_atom_half" => Ok(PosDefFn::FromMeasure(SpectralMeasure::two_atom_half())),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}
