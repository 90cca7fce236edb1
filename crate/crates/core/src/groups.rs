//! Supported countable abelian groups, their elements and characters,
//! finite subsets, and Følner-sequence diagnostics.
//!
//! Everything is written additively with identity `0`. Two families are
//! supported:
//!
//! * `Z^d`, elements are integer vectors and characters are points of the
//!   torus `[0,1)^d` acting by `g -> exp(2πi <g, θ>)`;
//! * `C(m)^L`, the length-`L` truncation of the countable direct sum of
//!   `Z/mZ`, with residue-vector elements and characters
//!   `g -> exp(2πi (Σ g_n b_n) / m)`.
//!
//! Counting measure plays the role of Haar measure throughout.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact nonnegative ratio used for set-size diagnostics.
pub type Exact = Ratio<u64>;

/// A supported countable abelian group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupDescriptor {
    IntegerLattice { dim: usize },
    CyclicSum { modulus: u32, length: usize },
}

impl GroupDescriptor {
    pub fn integer_lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("lattice dimension must be at least 1".into()));
        }
        Ok(GroupDescriptor::IntegerLattice { dim })
    }

    pub fn cyclic_sum(modulus: u32, length: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidGroup(format!("modulus {modulus} must be at least 2")));
        }
        if length == 0 {
            return Err(Error::InvalidGroup("truncation length must be at least 1".into()));
        }
        Ok(GroupDescriptor::CyclicSum { modulus, length })
    }

    /// `Z`, the most common case.
    pub fn integers() -> Self {
        GroupDescriptor::IntegerLattice { dim: 1 }
    }

    /// Number of coordinates of an element.
    pub fn rank(&self) -> usize {
        match *self {
            GroupDescriptor::IntegerLattice { dim } => dim,
            GroupDescriptor::CyclicSum { length, .. } => length,
        }
    }

    pub fn modulus(&self) -> Option<i64> {
        match *self {
            GroupDescriptor::IntegerLattice { .. } => None,
            GroupDescriptor::CyclicSum { modulus, .. } => Some(modulus as i64),
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, GroupDescriptor::IntegerLattice { .. })
    }

    /// Number of elements, `None` for the infinite lattices.
    pub fn order(&self) -> Option<u128> {
        match *self {
            GroupDescriptor::IntegerLattice { .. } => None,
            GroupDescriptor::CyclicSum { modulus, length } => {
                (modulus as u128).checked_pow(length as u32)
            }
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: *self,
            coords: vec![0; self.rank()],
        }
    }

    /// Builds an element; residues of a cyclic sum are reduced into `[0, m)`.
    pub fn element(&self, coords: impl Into<Vec<i64>>) -> Result<GroupElement> {
        let mut coords = coords.into();
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "{} coordinates given for {self}, which has rank {}",
                coords.len(),
                self.rank()
            )));
        }
        if let Some(m) = self.modulus() {
            for c in coords.iter_mut() {
                *c = c.rem_euclid(m);
            }
        }
        Ok(GroupElement { group: *self, coords })
    }

    /// Shorthand for an element of `Z`.
    pub fn int(&self, n: i64) -> Result<GroupElement> {
        self.element(vec![n])
    }

    pub(crate) fn reduce(&self, v: i64) -> i64 {
        match self.modulus() {
            Some(m) => v.rem_euclid(m),
            None => v,
        }
    }

    pub(crate) fn ensure_same(&self, other: &GroupDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// Character of `Z^d` at the torus point `theta` (reduced mod 1).
    pub fn torus_character(&self, theta: impl Into<Vec<f64>>) -> Result<Character> {
        let theta: Vec<f64> = theta.into();
        if !self.is_lattice() {
            return Err(Error::InvalidCharacter(format!(
                "{self} has residue characters, not torus points"
            )));
        }
        if theta.len() != self.rank() {
            return Err(Error::InvalidCharacter(format!(
                "torus point of length {} for {self}",
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidCharacter("non-finite torus coordinate".into()));
        }
        Ok(Character {
            group: *self,
            params: CharacterParams::Torus(theta.into_iter().map(wrap_unit).collect()),
        })
    }

    /// Character of `C(m)^L` given by a residue vector `b` (reduced mod m).
    pub fn residue_character(&self, b: impl Into<Vec<i64>>) -> Result<Character> {
        let b: Vec<i64> = b.into();
        let Some(m) = self.modulus() else {
            return Err(Error::InvalidCharacter(format!(
                "{self} has torus characters, not residue vectors"
            )));
        };
        if b.len() != self.rank() {
            return Err(Error::InvalidCharacter(format!(
                "residue vector of length {} for {self}",
                b.len()
            )));
        }
        Ok(Character {
            group: *self,
            params: CharacterParams::Residues(b.into_iter().map(|x| x.rem_euclid(m)).collect()),
        })
    }

    pub fn trivial_character(&self) -> Character {
        let params = match self {
            GroupDescriptor::IntegerLattice { dim } => CharacterParams::Torus(vec![0.0; *dim]),
            GroupDescriptor::CyclicSum { length, .. } => CharacterParams::Residues(vec![0; *length]),
        };
        Character {
            group: *self,
            params,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupDescriptor::IntegerLattice { dim: 1 } => write!(f, "Z"),
            GroupDescriptor::IntegerLattice { dim } => write!(f, "Z^{dim}"),
            GroupDescriptor::CyclicSum { modulus, length: 1 } => write!(f, "C({modulus})"),
            GroupDescriptor::CyclicSum { modulus, length } => write!(f, "C({modulus})^{length}"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    /// Accepts `Z`, `Z^d`, `C(m)` and `C(m)^L`.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let unsupported = || Error::UnsupportedGroup(s.trim().to_string());
        let (base, exponent) = match text.split_once('^') {
            Some((b, e)) => (b, Some(e.parse::<usize>().map_err(|_| unsupported())?)),
            None => (text.as_str(), None),
        };
        if base == "Z" {
            return GroupDescriptor::integer_lattice(exponent.unwrap_or(1));
        }
        if let Some(inner) = base.strip_prefix("C(").and_then(|r| r.strip_suffix(')')) {
            let m = inner.parse::<u32>().map_err(|_| unsupported())?;
            return GroupDescriptor::cyclic_sum(m, exponent.unwrap_or(1));
        }
        Err(unsupported())
    }
}

impl TryFrom<String> for GroupDescriptor {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupDescriptor> for String {
    fn from(g: GroupDescriptor) -> String {
        g.to_string()
    }
}

/// An element of a supported group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    group: GroupDescriptor,
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.group.ensure_same(&other.group)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| self.group.reduce(a + b))
            .collect();
        Ok(GroupElement {
            group: self.group,
            coords,
        })
    }

    pub fn checked_sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        let coords = self.coords.iter().map(|&a| self.group.reduce(-a)).collect();
        GroupElement {
            group: self.group,
            coords,
        }
    }

    /// Sup-norm of the coordinates (residues are taken as given).
    pub fn max_abs(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `g + h`.
pub fn add(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    g.checked_add(h)
}

/// `-g`.
pub fn neg(g: &GroupElement) -> GroupElement {
    g.neg()
}

fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Parameters of a character.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterParams {
    Torus(Vec<f64>),
    Residues(Vec<i64>),
}

/// A point of the dual group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Character {
    group: GroupDescriptor,
    params: CharacterParams,
}

impl Character {
    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn params(&self) -> &CharacterParams {
        &self.params
    }

    /// Phase of `χ(g)` in turns, reduced into `[0, 1)`.
    pub fn turns(&self, coords: &[i64]) -> f64 {
        match &self.params {
            CharacterParams::Torus(theta) => {
                let mut acc = 0.0;
                for (&g, &t) in coords.iter().zip(theta) {
                    acc += wrap_unit(g as f64 * t);
                }
                wrap_unit(acc)
            }
            CharacterParams::Residues(b) => {
                let m = self.group.modulus().unwrap_or(1);
                let mut acc: i64 = 0;
                for (&g, &bn) in coords.iter().zip(b) {
                    acc = (acc + (g.rem_euclid(m) * bn) % m) % m;
                }
                acc as f64 / m as f64
            }
        }
    }

    /// `χ(g)` for raw coordinates; the caller guarantees the rank matches.
    pub fn eval_coords(&self, coords: &[i64]) -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * self.turns(coords)).sin_cos();
        Complex64::new(c, s)
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Complex64> {
        self.group.ensure_same(&g.group)?;
        Ok(self.eval_coords(&g.coords))
    }

    /// `χ - γ` in the dual group.
    pub fn checked_sub(&self, other: &Character) -> Result<Character> {
        self.group.ensure_same(&other.group)?;
        let params = match (&self.params, &other.params) {
            (CharacterParams::Torus(a), CharacterParams::Torus(b)) => {
                CharacterParams::Torus(a.iter().zip(b).map(|(x, y)| wrap_unit(x - y)).collect())
            }
            (CharacterParams::Residues(a), CharacterParams::Residues(b)) => {
                let m = self.group.modulus().unwrap_or(1);
                CharacterParams::Residues(a.iter().zip(b).map(|(x, y)| (x - y).rem_euclid(m)).collect())
            }
            _ => unreachable!("character parameters always match the group kind"),
        };
        Ok(Character {
            group: self.group,
            params,
        })
    }

    pub fn is_trivial(&self) -> bool {
        match &self.params {
            CharacterParams::Torus(t) => t.iter().all(|&x| x == 0.0),
            CharacterParams::Residues(b) => b.iter().all(|&x| x == 0),
        }
    }

    /// Equality up to `tol` in circular distance per torus coordinate.
    pub fn approx_eq(&self, other: &Character, tol: f64) -> bool {
        if self.group != other.group {
            return false;
        }
        match (&self.params, &other.params) {
            (CharacterParams::Torus(a), CharacterParams::Torus(b)) => a.iter().zip(b).all(|(x, y)| {
                let d = (x - y).abs();
                d.min(1.0 - d) <= tol
            }),
            (CharacterParams::Residues(a), CharacterParams::Residues(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.params {
            CharacterParams::Torus(t) if t.len() == 1 => write!(f, "θ={}", t[0]),
            CharacterParams::Torus(t) => write!(f, "θ={t:?}"),
            CharacterParams::Residues(b) => write!(f, "b={b:?}"),
        }
    }
}

/// `χ(g)`.
pub fn char_eval(chi: &Character, g: &GroupElement) -> Result<Complex64> {
    chi.eval(g)
}

/// Half-open coordinate box `[lo, hi)`. In a cyclic sum the box must sit
/// inside `[0, m)` on every axis and does not wrap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxRegion {
    group: GroupDescriptor,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl BoxRegion {
    pub fn new(group: GroupDescriptor, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != group.rank() || hi.len() != group.rank() {
            return Err(Error::InvalidElement(format!("box corners must have rank {}", group.rank())));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if a >= b {
                return Err(Error::EmptySet("box"));
            }
        }
        if let Some(m) = group.modulus() {
            if lo.iter().any(|&a| a < 0) || hi.iter().any(|&b| b > m) {
                return Err(Error::InvalidElement(format!("box in {group} must lie inside [0, {m})")));
            }
        }
        Ok(BoxRegion { group, lo, hi })
    }

    /// `[0, side)^d`.
    pub fn origin_cube(group: GroupDescriptor, side: i64) -> Result<Self> {
        let d = group.rank();
        BoxRegion::new(group, vec![0; d], vec![side; d])
    }

    /// The whole of a cyclic sum.
    pub fn whole_group(group: GroupDescriptor) -> Result<Self> {
        let m = group
            .modulus()
            .ok_or_else(|| Error::Unsupported("the whole lattice is not a finite box".into()))?;
        BoxRegion::new(group, vec![0; group.rank()], vec![m; group.rank()])
    }

    /// The subgroup of a cyclic sum supported on the first `rank` coordinates.
    pub fn subgroup(group: GroupDescriptor, rank: usize) -> Result<Self> {
        let m = group
            .modulus()
            .ok_or_else(|| Error::Unsupported("coordinate subgroups exist only in cyclic sums".into()))?;
        if rank > group.rank() {
            return Err(Error::InvalidParameter {
                name: "rank",
                reason: format!("{rank} exceeds the truncation length {}", group.rank()),
            });
        }
        let hi = (0..group.rank()).map(|i| if i < rank { m } else { 1 }).collect();
        BoxRegion::new(group, vec![0; group.rank()], hi)
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn extents(&self) -> Vec<i64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    pub fn len(&self) -> usize {
        self.extents().iter().map(|&e| e as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_coords(&self, coords: &[i64]) -> bool {
        coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| a <= c && c < b)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.group == self.group && self.contains_coords(&g.coords)
    }

    pub fn contains_box(&self, other: &BoxRegion) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b) && self.hi.iter().zip(&other.hi).all(|(a, b)| b <= a)
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let lo: Vec<i64> = self.lo.iter().zip(&other.lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            None
        } else {
            Some(BoxRegion {
                group: self.group,
                lo,
                hi,
            })
        }
    }

    /// Row-major position of `coords`, last axis fastest.
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((c, a), b) in coords.iter().zip(&self.lo).zip(&self.hi) {
            if c < a || c >= b {
                return None;
            }
            idx = idx * (b - a) as usize + (c - a) as usize;
        }
        Some(idx)
    }

    pub fn coords_at(&self, mut index: usize) -> Vec<i64> {
        let ext = self.extents();
        let mut out = vec![0; ext.len()];
        for axis in (0..ext.len()).rev() {
            let e = ext[axis] as usize;
            out[axis] = self.lo[axis] + (index % e) as i64;
            index /= e;
        }
        out
    }

    /// Iterates coordinates in row-major order.
    pub fn iter_coords(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.coords_at(i))
    }

    /// Lattice translate `self + offset`.
    pub fn translated(&self, offset: &[i64]) -> Result<BoxRegion> {
        let lo = self.lo.iter().zip(offset).map(|(a, o)| a + o).collect();
        let hi = self.hi.iter().zip(offset).map(|(a, o)| a + o).collect();
        BoxRegion::new(self.group, lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum PartRepr {
    Box(BoxRegion),
    Set(BTreeSet<Vec<i64>>),
}

/// A finite set of group elements without duplicates. Sets that fill their
/// bounding box are stored as boxes, which keeps sumsets and invariance
/// defects of large boxes exact without enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitePart {
    group: GroupDescriptor,
    repr: PartRepr,
}

impl FinitePart {
    pub fn from_box(b: BoxRegion) -> Self {
        FinitePart {
            group: b.group,
            repr: PartRepr::Box(b),
        }
    }

    pub fn from_elements<'a>(
        group: GroupDescriptor,
        elements: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for g in elements {
            group.ensure_same(&g.group)?;
            set.insert(g.coords.clone());
        }
        Ok(Self::from_coord_set(group, set))
    }

    /// Builds from raw coordinate vectors (reduced for cyclic sums).
    pub fn from_coords(group: GroupDescriptor, coords: impl IntoIterator<Item = Vec<i64>>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in coords {
            set.insert(group.element(c)?.coords);
        }
        Ok(Self::from_coord_set(group, set))
    }

    fn from_coord_set(group: GroupDescriptor, set: BTreeSet<Vec<i64>>) -> Self {
        if let Some(first) = set.iter().next() {
            let d = first.len();
            let mut lo = first.clone();
            let mut hi = first.clone();
            for c in &set {
                for i in 0..d {
                    lo[i] = lo[i].min(c[i]);
                    hi[i] = hi[i].max(c[i]);
                }
            }
            let hi: Vec<i64> = hi.into_iter().map(|x| x + 1).collect();
            let volume: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a) as u128).product();
            if volume == set.len() as u128 {
                if let Ok(b) = BoxRegion::new(group, lo, hi) {
                    return FinitePart::from_box(b);
                }
            }
        }
        FinitePart {
            group,
            repr: PartRepr::Set(set),
        }
    }

    pub fn empty(group: GroupDescriptor) -> Self {
        FinitePart {
            group,
            repr: PartRepr::Set(BTreeSet::new()),
        }
    }

    pub fn singleton(g: &GroupElement) -> Self {
        Self::from_coord_set(g.group, BTreeSet::from([g.coords.clone()]))
    }

    /// `[a, b)` in `Z`.
    pub fn interval(a: i64, b: i64) -> Result<Self> {
        Ok(FinitePart::from_box(BoxRegion::new(
            GroupDescriptor::integers(),
            vec![a],
            vec![b],
        )?))
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn as_box(&self) -> Option<&BoxRegion> {
        match &self.repr {
            PartRepr::Box(b) => Some(b),
            PartRepr::Set(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            PartRepr::Box(b) => b.len(),
            PartRepr::Set(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_coords(&self, coords: &[i64]) -> bool {
        match &self.repr {
            PartRepr::Box(b) => b.contains_coords(coords),
            PartRepr::Set(s) => s.contains(coords),
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.group == self.group && self.contains_coords(&g.coords)
    }

    pub fn iter_coords(&self) -> Box<dyn Iterator<Item = Vec<i64>> + '_> {
        match &self.repr {
            PartRepr::Box(b) => Box::new(b.iter_coords()),
            PartRepr::Set(s) => Box::new(s.iter().cloned()),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let group = self.group;
        self.iter_coords().map(move |coords| GroupElement { group, coords })
    }

    /// Smallest box containing the set, if nonempty.
    pub fn bounding_box(&self) -> Option<BoxRegion> {
        match &self.repr {
            PartRepr::Box(b) => Some(b.clone()),
            PartRepr::Set(s) => {
                let first = s.iter().next()?;
                let mut lo = first.clone();
                let mut hi = first.clone();
                for c in s {
                    for i in 0..c.len() {
                        lo[i] = lo[i].min(c[i]);
                        hi[i] = hi[i].max(c[i] + 1);
                    }
                }
                Some(BoxRegion {
                    group: self.group,
                    lo,
                    hi,
                })
            }
        }
    }

    pub fn is_subset(&self, other: &FinitePart) -> bool {
        if self.group != other.group {
            return false;
        }
        match (&self.repr, &other.repr) {
            (PartRepr::Box(a), PartRepr::Box(b)) => b.contains_box(a),
            _ => self.iter_coords().all(|c| other.contains_coords(&c)),
        }
    }

    /// `F + g`.
    pub fn translate(&self, g: &GroupElement) -> Result<FinitePart> {
        self.group.ensure_same(&g.group)?;
        if let (PartRepr::Box(b), true) = (&self.repr, self.group.is_lattice()) {
            return Ok(FinitePart::from_box(b.translated(&g.coords)?));
        }
        let set = self
            .iter_coords()
            .map(|c| c.iter().zip(&g.coords).map(|(a, b)| self.group.reduce(a + b)).collect())
            .collect();
        Ok(Self::from_coord_set(self.group, set))
    }

    /// `-F`.
    pub fn negated(&self) -> FinitePart {
        if let (PartRepr::Box(b), true) = (&self.repr, self.group.is_lattice()) {
            let lo = b.hi.iter().map(|x| 1 - x).collect();
            let hi = b.lo.iter().map(|x| 1 - x).collect();
            return FinitePart::from_box(BoxRegion {
                group: self.group,
                lo,
                hi,
            });
        }
        let set = self
            .iter_coords()
            .map(|c| c.iter().map(|&a| self.group.reduce(-a)).collect())
            .collect();
        Self::from_coord_set(self.group, set)
    }

    /// The sumset `K + F`.
    pub fn sumset(&self, other: &FinitePart) -> Result<FinitePart> {
        self.group.ensure_same(&other.group)?;
        if self.is_empty() || other.is_empty() {
            return Ok(FinitePart::empty(self.group));
        }
        if let (PartRepr::Box(a), PartRepr::Box(b)) = (&self.repr, &other.repr) {
            if let Some(sum) = box_sum(a, b) {
                return Ok(FinitePart::from_box(sum));
            }
        }
        let mut set = BTreeSet::new();
        for k in self.iter_coords() {
            for f in other.iter_coords() {
                set.insert(k.iter().zip(&f).map(|(a, b)| self.group.reduce(a + b)).collect::<Vec<_>>());
            }
        }
        Ok(Self::from_coord_set(self.group, set))
    }

    /// The difference set `S - S`.
    pub fn difference_set(&self) -> Result<FinitePart> {
        self.sumset(&self.negated())
    }

    /// Number of common elements.
    pub fn intersection_len(&self, other: &FinitePart) -> usize {
        if self.group != other.group {
            return 0;
        }
        match (&self.repr, &other.repr) {
            (PartRepr::Box(a), PartRepr::Box(b)) => a.intersect(b).map_or(0, |i| i.len()),
            _ => {
                let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
                small.iter_coords().filter(|c| large.contains_coords(c)).count()
            }
        }
    }
}

/// Sum of two boxes when it is again a box (always in `Z^d`; in a cyclic
/// sum only when no axis wraps partially).
fn box_sum(a: &BoxRegion, b: &BoxRegion) -> Option<BoxRegion> {
    let mut lo = Vec::with_capacity(a.lo.len());
    let mut hi = Vec::with_capacity(a.lo.len());
    for i in 0..a.lo.len() {
        let l = a.lo[i] + b.lo[i];
        let h = a.hi[i] + b.hi[i] - 1;
        match a.group.modulus() {
            None => {
                lo.push(l);
                hi.push(h);
            }
            Some(m) => {
                if h - l >= m {
                    lo.push(0);
                    hi.push(m);
                } else if h <= m {
                    lo.push(l);
                    hi.push(h);
                } else {
                    return None;
                }
            }
        }
    }
    Some(BoxRegion {
        group: a.group,
        lo,
        hi,
    })
}

/// `|KF Δ F| / |F|`, the quantity bounded by ε in (K, ε)-invariance.
pub fn invariance_defect(k: &FinitePart, f: &FinitePart) -> Result<Exact> {
    k.group.ensure_same(&f.group)?;
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let kf = k.sumset(f)?;
    let common = kf.intersection_len(f);
    let sym = kf.len() + f.len() - 2 * common;
    Ok(Exact::new(sym as u64, f.len() as u64))
}

/// An ordered list of nonempty finite sets of strictly increasing size.
#[derive(Clone, Debug, PartialEq)]
pub struct FolnerPlan {
    group: GroupDescriptor,
    sets: Vec<FinitePart>,
}

impl FolnerPlan {
    pub fn new(sets: Vec<FinitePart>) -> Result<Self> {
        let first = sets.first().ok_or(Error::EmptySet("Følner plan"))?;
        let group = first.group;
        let mut prev = 0usize;
        for s in &sets {
            group.ensure_same(&s.group)?;
            if s.is_empty() {
                return Err(Error::EmptySet("Følner set"));
            }
            if s.len() <= prev {
                return Err(Error::InvalidParameter {
                    name: "folner_plan",
                    reason: "set sizes must increase strictly".into(),
                });
            }
            prev = s.len();
        }
        Ok(FolnerPlan { group, sets })
    }

    /// Boxes `[0, s)^d` for each side `s`.
    pub fn boxes(group: GroupDescriptor, sides: &[i64]) -> Result<Self> {
        if !group.is_lattice() {
            return Err(Error::Unsupported("box plans need an integer lattice".into()));
        }
        let sets = sides
            .iter()
            .map(|&s| BoxRegion::origin_cube(group, s).map(FinitePart::from_box))
            .collect::<Result<Vec<_>>>()?;
        FolnerPlan::new(sets)
    }

    /// Default plan: `[0, n)^d` for `n = 1..=count` on lattices, the whole
    /// group for a cyclic sum.
    pub fn default_for(group: GroupDescriptor, count: usize) -> Result<Self> {
        match group {
            GroupDescriptor::IntegerLattice { .. } => {
                let sides: Vec<i64> = (1..=count as i64).collect();
                FolnerPlan::boxes(group, &sides)
            }
            GroupDescriptor::CyclicSum { .. } => {
                FolnerPlan::new(vec![FinitePart::from_box(BoxRegion::whole_group(group)?)])
            }
        }
    }

    /// Coordinate subgroups of rank `1..=L` of a cyclic sum.
    pub fn subgroups(group: GroupDescriptor) -> Result<Self> {
        let sets = (1..=group.rank())
            .map(|r| BoxRegion::subgroup(group, r).map(FinitePart::from_box))
            .collect::<Result<Vec<_>>>()?;
        FolnerPlan::new(sets)
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The `n`-th set, 1-based.
    pub fn get(&self, n: usize) -> Option<&FinitePart> {
        n.checked_sub(1).and_then(|i| self.sets.get(i))
    }

    pub fn sets(&self) -> &[FinitePart] {
        &self.sets
    }
}

/// `|⋃_{k<n} (-F_k + F_n)| / |F_n|` for the 1-based index `n ≥ 2`.
pub fn tempered_constant(plan: &FolnerPlan, n: usize) -> Result<Exact> {
    if n < 2 || n > plan.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            min: 2,
            max: plan.len(),
        });
    }
    let fn_set = &plan.sets[n - 1];
    let pieces = plan.sets[..n - 1]
        .iter()
        .map(|fk| fk.negated().sumset(fn_set))
        .collect::<Result<Vec<_>>>()?;
    let union = if plan.group.is_lattice() && pieces.iter().all(|p| p.as_box().is_some()) {
        let boxes: Vec<&BoxRegion> = pieces.iter().filter_map(|p| p.as_box()).collect();
        union_volume(&boxes)
    } else {
        let mut all: HashSet<Vec<i64>> = HashSet::new();
        for p in &pieces {
            all.extend(p.iter_coords());
        }
        all.len()
    };
    Ok(Exact::new(union as u64, fn_set.len() as u64))
}

/// Whether every ratio for `n = 2..=n_max` is at most `c`.
pub fn is_tempered_up_to(plan: &FolnerPlan, n_max: usize, c: f64) -> Result<bool> {
    for n in 2..=n_max {
        let r = tempered_constant(plan, n)?;
        if *r.numer() as f64 > c * *r.denom() as f64 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Volume of a union of boxes by coordinate compression.
fn union_volume(boxes: &[&BoxRegion]) -> usize {
    let Some(first) = boxes.first() else { return 0 };
    let d = first.lo.len();
    let cuts: Vec<Vec<i64>> = (0..d)
        .map(|axis| {
            let mut v: Vec<i64> = boxes.iter().flat_map(|b| [b.lo[axis], b.hi[axis]]).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let cells: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let total: usize = cells.iter().product();
    let mut volume = 0usize;
    let mut corner = vec![0i64; d];
    for mut idx in 0..total {
        let mut cell_volume = 1usize;
        for axis in (0..d).rev() {
            let i = idx % cells[axis];
            idx /= cells[axis];
            corner[axis] = cuts[axis][i];
            cell_volume *= (cuts[axis][i + 1] - cuts[axis][i]) as usize;
        }
        if boxes.iter().any(|b| b.contains_coords(&corner)) {
            volume += cell_volume;
        }
    }
    volume
}

/// The smallest closed subset of the unit circle containing every character
/// value of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleSubset {
    pub full_circle: bool,
    pub root_order: Option<u32>,
}

impl CircleSubset {
    /// Distance from `z` to the set.
    pub fn distance(&self, z: Complex64) -> f64 {
        match self.root_order {
            Some(m) if !self.full_circle => {
                let step = std::f64::consts::TAU / m as f64;
                let k = (z.arg() / step).round();
                let (s, c) = (k * step).sin_cos();
                (z - Complex64::new(c, s)).norm()
            }
            _ => (z.norm() - 1.0).abs(),
        }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }
}

/// Image set of the characters of `group`.
pub fn s_of_g(group: GroupDescriptor) -> CircleSubset {
    match group {
        GroupDescriptor::IntegerLattice { .. } => CircleSubset {
            full_circle: true,
            root_order: None,
        },
        GroupDescriptor::CyclicSum { modulus, .. } => CircleSubset {
            full_circle: false,
            root_order: Some(modulus),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z() -> GroupDescriptor {
        GroupDescriptor::integers()
    }

    fn brute_defect(k: &[Vec<i64>], f: &[Vec<i64>], m: Option<i64>) -> (usize, usize) {
        let red = |v: i64| m.map_or(v, |m| v.rem_euclid(m));
        let fset: HashSet<Vec<i64>> = f.iter().cloned().collect();
        let mut kf: HashSet<Vec<i64>> = HashSet::new();
        for a in k {
            for b in f {
                kf.insert(a.iter().zip(b).map(|(x, y)| red(x + y)).collect());
            }
        }
        (kf.symmetric_difference(&fset).count(), fset.len())
    }

    #[test]
    fn group_law_examples() {
        let g = z();
        assert_eq!(add(&g.int(3).unwrap(), &g.int(4).unwrap()).unwrap(), g.int(7).unwrap());
        let c5 = GroupDescriptor::cyclic_sum(5, 1).unwrap();
        let sum = add(&c5.element(vec![3]).unwrap(), &c5.element(vec![4]).unwrap()).unwrap();
        assert_eq!(sum.coords(), &[2]);
        let z2 = GroupDescriptor::integer_lattice(2).unwrap();
        assert_eq!(neg(&z2.element(vec![1, -2]).unwrap()).coords(), &[-1, 2]);
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = z().int(1).unwrap();
        let b = GroupDescriptor::integer_lattice(2).unwrap().identity();
        assert!(matches!(add(&a, &b), Err(Error::GroupMismatch { .. })));
        let chi = GroupDescriptor::integer_lattice(2).unwrap().trivial_character();
        assert!(chi.eval(&a).is_err());
    }

    #[test]
    fn descriptor_invariants() {
        assert!(GroupDescriptor::integer_lattice(0).is_err());
        assert!(GroupDescriptor::cyclic_sum(1, 3).is_err());
        assert!(GroupDescriptor::cyclic_sum(3, 0).is_err());
        assert_eq!(GroupDescriptor::cyclic_sum(4, 10).unwrap().order(), Some(1_048_576));
    }

    #[test]
    fn descriptor_text_forms() {
        assert_eq!("Z".parse::<GroupDescriptor>().unwrap(), z());
        assert_eq!(
            "Z^2".parse::<GroupDescriptor>().unwrap(),
            GroupDescriptor::IntegerLattice { dim: 2 }
        );
        assert_eq!(
            "C(4)^10".parse::<GroupDescriptor>().unwrap(),
            GroupDescriptor::CyclicSum { modulus: 4, length: 10 }
        );
        assert_eq!(
            "C(3)".parse::<GroupDescriptor>().unwrap(),
            GroupDescriptor::CyclicSum { modulus: 3, length: 1 }
        );
        for s in ["Z", "Z^3", "C(4)^10", "C(2)"] {
            assert_eq!(s.parse::<GroupDescriptor>().unwrap().to_string(), s);
        }
        let err = "Q".parse::<GroupDescriptor>().unwrap_err();
        assert!(err.to_string().contains("unsupported group"));
    }

    #[test]
    fn character_examples() {
        let g = z();
        let trivial = g.torus_character(vec![0.0]).unwrap();
        assert_eq!(trivial.eval(&g.int(17).unwrap()).unwrap(), Complex64::new(1.0, 0.0));
        let half = g.torus_character(vec![0.5]).unwrap();
        assert!((half.eval(&g.int(3).unwrap()).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        // (1/4,1/4) at (1,1): phase 1/2 turn.
        let z2 = GroupDescriptor::integer_lattice(2).unwrap();
        let chi = z2.torus_character(vec![0.25, 0.25]).unwrap();
        let v = chi.eval(&z2.element(vec![1, 1]).unwrap()).unwrap();
        let oracle = Complex64::new(0.0, std::f64::consts::PI).exp();
        assert!((v - oracle).norm() < 1e-12);
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn residue_character_hits_roots_of_unity() {
        let g = GroupDescriptor::cyclic_sum(4, 3).unwrap();
        let chi = g.residue_character(vec![1, 2, 3]).unwrap();
        let v = chi.eval(&g.element(vec![1, 1, 1]).unwrap()).unwrap();
        // 1 + 2 + 3 = 6 = 2 mod 4 -> -1
        assert!((v + 1.0).norm() < 1e-12);
    }

    #[test]
    fn invariance_defect_examples() {
        let zero = FinitePart::singleton(&z().int(0).unwrap());
        let f = FinitePart::interval(0, 100).unwrap();
        assert_eq!(invariance_defect(&zero, &f).unwrap(), Exact::new(0, 1));

        let k = FinitePart::from_coords(z(), vec![vec![0], vec![1]]).unwrap();
        let brute = brute_defect(&[vec![0], vec![1]], &(0..100).map(|i| vec![i]).collect::<Vec<_>>(), None);
        assert_eq!(brute, (1, 100));
        assert_eq!(invariance_defect(&k, &f).unwrap(), Exact::new(1, 100));

        let k = FinitePart::from_coords(z(), vec![vec![-1], vec![0], vec![1]]).unwrap();
        let f10 = FinitePart::interval(0, 10).unwrap();
        let brute = brute_defect(
            &[vec![-1], vec![0], vec![1]],
            &(0..10).map(|i| vec![i]).collect::<Vec<_>>(),
            None,
        );
        assert_eq!(brute, (2, 10));
        assert_eq!(invariance_defect(&k, &f10).unwrap(), Exact::new(2, 10));
    }

    #[test]
    fn invariance_defect_rejects_empty_f() {
        let k = FinitePart::singleton(&z().int(0).unwrap());
        assert_eq!(invariance_defect(&k, &FinitePart::empty(z())), Err(Error::EmptySet("F")));
    }

    #[test]
    fn sparse_sets_use_enumeration() {
        let k = FinitePart::from_coords(z(), vec![vec![-3], vec![5]]).unwrap();
        assert!(k.as_box().is_none());
        let f = FinitePart::from_coords(z(), vec![vec![0], vec![1], vec![7]]).unwrap();
        let (num, den) = brute_defect(&[vec![-3], vec![5]], &[vec![0], vec![1], vec![7]], None);
        assert_eq!(invariance_defect(&k, &f).unwrap(), Exact::new(num as u64, den as u64));
    }

    #[test]
    fn cyclic_defects_match_enumeration() {
        let g = GroupDescriptor::cyclic_sum(5, 2).unwrap();
        let k = FinitePart::from_box(BoxRegion::new(g, vec![2, 0], vec![5, 2]).unwrap());
        let f = FinitePart::from_box(BoxRegion::new(g, vec![1, 1], vec![4, 3]).unwrap());
        let kc: Vec<Vec<i64>> = k.iter_coords().collect();
        let fc: Vec<Vec<i64>> = f.iter_coords().collect();
        let (num, den) = brute_defect(&kc, &fc, Some(5));
        assert_eq!(invariance_defect(&k, &f).unwrap(), Exact::new(num as u64, den as u64));
        let sub = FinitePart::from_box(BoxRegion::subgroup(g, 1).unwrap());
        let inside = FinitePart::from_coords(g, vec![vec![3, 0]]).unwrap();
        assert_eq!(invariance_defect(&inside, &sub).unwrap(), Exact::new(0, 1));
    }

    #[test]
    fn tempered_constant_examples() {
        let plan = FolnerPlan::boxes(z(), &[1, 2, 3]).unwrap();
        // Brute force: -F_1 + F_2 = {0} + {0,1} = {0,1}.
        let mut union: HashSet<i64> = HashSet::new();
        for a in 0..1 {
            for b in 0..2 {
                union.insert(b - a);
            }
        }
        assert_eq!(union.len(), 2);
        assert_eq!(tempered_constant(&plan, 2).unwrap(), Exact::new(union.len() as u64, 2));
        assert!(matches!(tempered_constant(&plan, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(tempered_constant(&plan, 4).is_err());
    }

    #[test]
    fn dyadic_boxes_are_tempered() {
        let sides: Vec<i64> = (1..=20).map(|k| 1i64 << k).collect();
        let plan = FolnerPlan::boxes(z(), &sides).unwrap();
        for n in 2..=20 {
            let r = tempered_constant(&plan, n).unwrap();
            assert!(*r.numer() <= 2 * *r.denom(), "n={n}: {r}");
        }
        // Brute-force the small cases.
        for n in 2..=10usize {
            let mut union: HashSet<i64> = HashSet::new();
            for k in 1..n {
                for a in 0..(1i64 << k) {
                    for b in 0..(1i64 << n) {
                        union.insert(b - a);
                    }
                }
            }
            assert_eq!(
                tempered_constant(&plan, n).unwrap(),
                Exact::new(union.len() as u64, 1 << n)
            );
        }
        assert!(is_tempered_up_to(&plan, 20, 2.0).unwrap());
        assert!(!is_tempered_up_to(&plan, 20, 1.2).unwrap());
    }

    #[test]
    fn tempered_constant_in_two_dimensions_matches_enumeration() {
        let z2 = GroupDescriptor::integer_lattice(2).unwrap();
        let plan = FolnerPlan::boxes(z2, &[1, 2, 4, 8]).unwrap();
        for n in 2..=4usize {
            let sides = [1i64, 2, 4, 8];
            let mut union: HashSet<(i64, i64)> = HashSet::new();
            for &s in &sides[..n - 1] {
                for a0 in 0..s {
                    for a1 in 0..s {
                        for b0 in 0..sides[n - 1] {
                            for b1 in 0..sides[n - 1] {
                                union.insert((b0 - a0, b1 - a1));
                            }
                        }
                    }
                }
            }
            let expected = Exact::new(union.len() as u64, (sides[n - 1] * sides[n - 1]) as u64);
            assert_eq!(tempered_constant(&plan, n).unwrap(), expected);
        }
    }

    #[test]
    fn folner_plan_validation() {
        let a = FinitePart::interval(0, 4).unwrap();
        let b = FinitePart::interval(0, 4).unwrap();
        assert!(FolnerPlan::new(vec![a, b]).is_err());
        assert!(FolnerPlan::new(vec![]).is_err());
        let g = GroupDescriptor::cyclic_sum(3, 4).unwrap();
        assert_eq!(FolnerPlan::default_for(g, 5).unwrap().len(), 1);
        assert_eq!(FolnerPlan::subgroups(g).unwrap().get(2).unwrap().len(), 9);
    }

    #[test]
    fn s_of_g_examples() {
        let z3 = GroupDescriptor::integer_lattice(3).unwrap();
        assert!(s_of_g(z3).full_circle);
        let c = s_of_g(GroupDescriptor::cyclic_sum(4, 10).unwrap());
        assert_eq!(c.root_order, Some(4));
        assert!(!c.full_circle);
        let c2 = s_of_g(GroupDescriptor::cyclic_sum(2, 1).unwrap());
        assert!(c2.contains(Complex64::new(-1.0, 0.0), 1e-12));
        assert!(!c2.contains(Complex64::new(0.0, 1.0), 1e-12));
    }

    #[test]
    fn box_indexing_round_trips() {
        let z2 = GroupDescriptor::integer_lattice(2).unwrap();
        let b = BoxRegion::new(z2, vec![-2, 3], vec![1, 7]).unwrap();
        for i in 0..b.len() {
            assert_eq!(b.index_of(&b.coords_at(i)), Some(i));
        }
        assert_eq!(b.index_of(&[1, 3]), None);
    }

    proptest! {
        #[test]
        fn characters_are_multiplicative(
            theta in prop::collection::vec(0.0f64..1.0, 2),
            g in prop::collection::vec(-1000i64..1000, 2),
            h in prop::collection::vec(-1000i64..1000, 2),
        ) {
            let z2 = GroupDescriptor::integer_lattice(2).unwrap();
            let chi = z2.torus_character(theta).unwrap();
            let g = z2.element(g).unwrap();
            let h = z2.element(h).unwrap();
            let lhs = chi.eval(&add(&g, &h).unwrap()).unwrap();
            let rhs = chi.eval(&g).unwrap() * chi.eval(&h).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn residue_characters_are_multiplicative_and_in_s_of_g(
            m in 2u32..9,
            b in prop::collection::vec(0i64..100, 3),
            g in prop::collection::vec(0i64..100, 3),
            h in prop::collection::vec(0i64..100, 3),
        ) {
            let grp = GroupDescriptor::cyclic_sum(m, 3).unwrap();
            let chi = grp.residue_character(b).unwrap();
            let g = grp.element(g).unwrap();
            let h = grp.element(h).unwrap();
            let lhs = chi.eval(&add(&g, &h).unwrap()).unwrap();
            let rhs = chi.eval(&g).unwrap() * chi.eval(&h).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!(s_of_g(grp).distance(lhs) <= 1e-12);
        }

        #[test]
        fn inverse_cancels(coords in prop::collection::vec(-50i64..50, 3), m in 2u32..7) {
            let grp = GroupDescriptor::cyclic_sum(m, 3).unwrap();
            let g = grp.element(coords.clone()).unwrap();
            prop_assert!(add(&g, &neg(&g)).unwrap().is_identity());
            let z3 = GroupDescriptor::integer_lattice(3).unwrap();
            let g = z3.element(coords).unwrap();
            prop_assert!(add(&g, &neg(&g)).unwrap().is_identity());
        }

        #[test]
        fn identity_has_zero_defect(lo in -20i64..20, len in 1i64..40) {
            let zero = FinitePart::singleton(&z().int(0).unwrap());
            let f = FinitePart::interval(lo, lo + len).unwrap();
            prop_assert_eq!(invariance_defect(&zero, &f).unwrap(), Exact::new(0, 1));
        }

        #[test]
        fn single_shift_defect_bound(g in -32i64..=32, n in 1i64..10_000) {
            let k = FinitePart::singleton(&z().int(g).unwrap());
            let f = FinitePart::interval(0, n).unwrap();
            let d = invariance_defect(&k, &f).unwrap();
            prop_assert!(*d.numer() as i64 * n <= 2 * g.abs() * *d.denom() as i64);
            // Exact value: 2 min(|g|, n) / n.
            prop_assert_eq!(d, Exact::new(2 * g.abs().min(n) as u64, n as u64));
        }

        #[test]
        fn box_defect_matches_enumeration(
            klo in -4i64..4, klen in 1i64..5, flo in -6i64..6, flen in 1i64..12,
        ) {
            let k = FinitePart::interval(klo, klo + klen).unwrap();
            let f = FinitePart::interval(flo, flo + flen).unwrap();
            let kc: Vec<Vec<i64>> = (klo..klo + klen).map(|x| vec![x]).collect();
            let fc: Vec<Vec<i64>> = (flo..flo + flen).map(|x| vec![x]).collect();
            let (num, den) = brute_defect(&kc, &fc, None);
            prop_assert_eq!(invariance_defect(&k, &f).unwrap(), Exact::new(num as u64, den as u64));
        }
    }
}
