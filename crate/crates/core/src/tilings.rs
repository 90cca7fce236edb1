//! Congruent sequences of box tilings.
//!
//! A tiling here is a finite list of box shapes, each with a grid of
//! centers `offset + step·Z^d`. Every construction in this crate uses one
//! shape per level, but lookups and verification treat the list generically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{invariance_defect, BoxRegion, FinitePart, GroupDescriptor, GroupElement};

/// Upper bound on the multiplier tried when growing a box side.
const MAX_SIDE_FACTOR: i64 = 1 << 20;

/// Center grid `offset + step·Z^d` (points of `[0, m)` only, in a cyclic sum).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CenterGrid {
    pub offset: Vec<i64>,
    pub step: Vec<i64>,
}

impl CenterGrid {
    pub fn contains(&self, c: &[i64]) -> bool {
        c.iter()
            .zip(self.offset.iter().zip(&self.step))
            .all(|(x, (o, s))| (x - o).rem_euclid(*s) == 0)
    }
}

/// One shape with its center set.
#[derive(Clone, Debug, PartialEq)]
pub struct TileShape {
    pub shape: BoxRegion,
    pub centers: CenterGrid,
}

/// A tiling of the group by translates of box shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Tiling {
    group: GroupDescriptor,
    shapes: Vec<TileShape>,
}

/// A tile: shape index plus center coordinates.
pub type TileRef = (usize, Vec<i64>);

impl Tiling {
    pub fn new(group: GroupDescriptor, shapes: Vec<TileShape>) -> Result<Self> {
        if shapes.is_empty() {
            return Err(Error::EmptySet("shape list"));
        }
        let zero = group.identity();
        for s in &shapes {
            group.ensure_same(&s.shape.group())?;
            if !s.shape.contains(&zero) {
                return Err(Error::InvalidParameter {
                    name: "shape",
                    reason: "every shape must contain the identity".into(),
                });
            }
            if s.centers.step.len() != group.rank()
                || s.centers.offset.len() != group.rank()
                || s.centers.step.iter().any(|&x| x <= 0)
            {
                return Err(Error::InvalidParameter {
                    name: "centers",
                    reason: "center grid needs one positive step per axis".into(),
                });
            }
        }
        Ok(Tiling { group, shapes })
    }

    /// Single box shape `[0, side)` per axis with centers `offset + side·Z^d`.
    pub fn grid(group: GroupDescriptor, side: &[i64], offset: &[i64]) -> Result<Self> {
        let shape = BoxRegion::new(group, vec![0; group.rank()], side.to_vec())?;
        Tiling::new(
            group,
            vec![TileShape {
                shape,
                centers: CenterGrid {
                    offset: offset.to_vec(),
                    step: side.to_vec(),
                },
            }],
        )
    }

    /// Lattice cubes `[0, side)^d` centered on `(side·Z)^d`.
    pub fn cubes(group: GroupDescriptor, side: i64) -> Result<Self> {
        let d = group.rank();
        Tiling::grid(group, &vec![side; d], &vec![0; d])
    }

    /// Cosets of the coordinate subgroup of rank `rank` in a cyclic sum.
    pub fn subgroup_cosets(group: GroupDescriptor, rank: usize) -> Result<Self> {
        let shape = BoxRegion::subgroup(group, rank)?;
        let side = shape.extents();
        Tiling::grid(group, &side, &vec![0; group.rank()])
    }

    /// Singletons: shape `{0}`, every element a center.
    pub fn trivial(group: GroupDescriptor) -> Result<Self> {
        let d = group.rank();
        Tiling::grid(group, &vec![1; d], &vec![0; d])
    }

    /// The whole of a (finite) cyclic sum as a single tile.
    pub fn whole_group(group: GroupDescriptor) -> Result<Self> {
        Tiling::subgroup_cosets(group, group.rank())
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn shapes(&self) -> &[TileShape] {
        &self.shapes
    }

    /// The box `S + c`.
    pub fn tile_box(&self, tile: &TileRef) -> Result<BoxRegion> {
        self.shapes[tile.0].shape.translated(&tile.1)
    }

    /// Every tile that contains `coords` (exactly one for a valid tiling).
    pub fn tiles_containing(&self, coords: &[i64]) -> Vec<TileRef> {
        let m = self.group.modulus();
        let mut out = Vec::new();
        for (idx, s) in self.shapes.iter().enumerate() {
            // Center c must satisfy lo <= t - c < hi on every axis.
            let axes: Vec<Vec<i64>> = (0..coords.len())
                .map(|i| {
                    let (o, st) = (s.centers.offset[i], s.centers.step[i]);
                    let first = coords[i] - s.shape.hi()[i] + 1;
                    let last = coords[i] - s.shape.lo()[i];
                    let mut c = first + (o - first).rem_euclid(st);
                    let mut v = Vec::new();
                    while c <= last {
                        if m.is_none_or(|m| (0..m).contains(&c)) {
                            v.push(c);
                        }
                        c += st;
                    }
                    v
                })
                .collect();
            cartesian(&axes, &mut |c| out.push((idx, c.to_vec())));
        }
        out
    }

    /// The tile containing `coords`, if any.
    pub fn locate(&self, coords: &[i64]) -> Option<TileRef> {
        // Fast path for the common single-shape grid.
        if let [s] = self.shapes.as_slice() {
            if s.shape.lo().iter().all(|&x| x == 0) && s.shape.extents() == s.centers.step {
                let c: Vec<i64> = coords
                    .iter()
                    .zip(s.centers.offset.iter().zip(&s.centers.step))
                    .map(|(t, (o, st))| o + (t - o).div_euclid(*st) * st)
                    .collect();
                if self.group.modulus().is_none_or(|m| c.iter().all(|&x| (0..m).contains(&x))) {
                    return Some((0, c));
                }
                return None;
            }
        }
        self.tiles_containing(coords).into_iter().next()
    }

    /// Tiles meeting `region`, shape by shape, centers in row-major order.
    pub fn tiles_meeting(&self, region: &BoxRegion) -> Vec<TileRef> {
        let m = self.group.modulus();
        let mut out = Vec::new();
        for (idx, s) in self.shapes.iter().enumerate() {
            let axes: Vec<Vec<i64>> = (0..region.lo().len())
                .map(|i| {
                    let (o, st) = (s.centers.offset[i], s.centers.step[i]);
                    // c + lo < region.hi and c + hi > region.lo.
                    let first = region.lo()[i] - s.shape.hi()[i] + 1;
                    let last = region.hi()[i] - s.shape.lo()[i] - 1;
                    let mut c = first + (o - first).rem_euclid(st);
                    let mut v = Vec::new();
                    while c <= last {
                        if m.is_none_or(|m| (0..m).contains(&c)) {
                            v.push(c);
                        }
                        c += st;
                    }
                    v
                })
                .collect();
            cartesian(&axes, &mut |c| out.push((idx, c.to_vec())));
        }
        out
    }
}

fn cartesian(axes: &[Vec<i64>], f: &mut dyn FnMut(&[i64])) {
    fn go(axes: &[Vec<i64>], cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if cur.len() == axes.len() {
            f(cur);
            return;
        }
        for &v in &axes[cur.len()] {
            cur.push(v);
            go(axes, cur, f);
            cur.pop();
        }
    }
    go(axes, &mut Vec::with_capacity(axes.len()), f)
}

/// Levels `T_1, T_2, …` with their invariance targets `K_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingSequence {
    group: GroupDescriptor,
    levels: Vec<Tiling>,
    targets: Vec<FinitePart>,
}

/// Serializable description of one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    /// Per-shape box extents.
    pub shape_sides: Vec<Vec<i64>>,
    pub center_steps: Vec<Vec<i64>>,
    pub center_offsets: Vec<Vec<i64>>,
    /// `|K_k|`, when the level was built against a target.
    pub target_size: Option<usize>,
    /// `|K_k S Δ S| / |S|` for the first shape, as `[numerator, denominator]`.
    pub defect: Option<[u64; 2]>,
}

impl TilingSequence {
    /// Wraps levels as given; congruence is checked by [`verify_congruence`].
    pub fn from_levels(group: GroupDescriptor, levels: Vec<Tiling>, targets: Vec<FinitePart>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptySet("level list"));
        }
        for t in &levels {
            group.ensure_same(&t.group)?;
        }
        if !targets.is_empty() && targets.len() != levels.len() {
            return Err(Error::InvalidParameter {
                name: "targets",
                reason: "one target per level is required".into(),
            });
        }
        Ok(TilingSequence { group, levels, targets })
    }

    /// Cube tilings with the given sides and no targets.
    pub fn from_sides(group: GroupDescriptor, sides: &[i64]) -> Result<Self> {
        let levels = sides.iter().map(|&s| Tiling::cubes(group, s)).collect::<Result<Vec<_>>>()?;
        TilingSequence::from_levels(group, levels, vec![])
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `k`, 1-based.
    pub fn level(&self, k: usize) -> Result<&Tiling> {
        if k == 0 || k > self.levels.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                min: 1,
                max: self.levels.len(),
            });
        }
        Ok(&self.levels[k - 1])
    }

    pub fn levels(&self) -> &[Tiling] {
        &self.levels
    }

    /// `K_k`, 1-based, if the sequence was built against targets.
    pub fn target(&self, k: usize) -> Option<&FinitePart> {
        self.targets.get(k.checked_sub(1)?)
    }

    /// `S_k`, the union of the level-`k` shapes.
    pub fn shape_union(&self, k: usize) -> Result<FinitePart> {
        let t = self.level(k)?;
        if let [s] = t.shapes.as_slice() {
            return Ok(FinitePart::from_box(s.shape.clone()));
        }
        FinitePart::from_coords(self.group, t.shapes.iter().flat_map(|s| s.shape.iter_coords()))
    }

    /// Number of shapes at level `k`.
    pub fn shape_count(&self, k: usize) -> Result<usize> {
        Ok(self.level(k)?.shapes.len())
    }

    pub fn summary(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let target = self.targets.get(i);
                let defect = target.and_then(|k| {
                    invariance_defect(k, &FinitePart::from_box(t.shapes[0].shape.clone()))
                        .ok()
                        .map(|r| [*r.numer(), *r.denom()])
                });
                LevelSummary {
                    level: i + 1,
                    shape_sides: t.shapes.iter().map(|s| s.shape.extents()).collect(),
                    center_steps: t.shapes.iter().map(|s| s.centers.step.clone()).collect(),
                    center_offsets: t.shapes.iter().map(|s| s.centers.offset.clone()).collect(),
                    target_size: target.map(|k| k.len()),
                    defect,
                }
            })
            .collect()
    }
}

/// `K_k = [-k, k]^d` on a lattice; the rank-`min(k, L)` coordinate subgroup
/// of a cyclic sum.
pub fn default_targets(group: GroupDescriptor, depth: usize) -> Result<Vec<FinitePart>> {
    (1..=depth)
        .map(|k| {
            let kk = k as i64;
            match group {
                GroupDescriptor::IntegerLattice { dim } => {
                    BoxRegion::new(group, vec![-kk; dim], vec![kk + 1; dim]).map(FinitePart::from_box)
                }
                GroupDescriptor::CyclicSum { length, .. } => {
                    BoxRegion::subgroup(group, k.min(length)).map(FinitePart::from_box)
                }
            }
        })
        .collect()
}

/// Builds `depth` nested single-shape levels whose shapes are
/// `(K_k, 1/k)`-invariant. On a lattice the side `L_k` is the least multiple
/// of `L_{k-1}` that works; on a cyclic sum the shapes are coordinate
/// subgroups of the least admissible rank.
pub fn build_box_tiling_sequence(group: GroupDescriptor, targets: &[FinitePart], depth: usize) -> Result<TilingSequence> {
    if depth == 0 {
        return Err(Error::InvalidParameter {
            name: "depth",
            reason: "must be at least 1".into(),
        });
    }
    if targets.len() < depth {
        return Err(Error::InvalidParameter {
            name: "targets",
            reason: format!("{} targets for depth {depth}", targets.len()),
        });
    }
    for (i, k) in targets[..depth].iter().enumerate() {
        group.ensure_same(&k.group())?;
        if k.is_empty() {
            return Err(Error::EmptySet("K_k"));
        }
        if i > 0 && !targets[i - 1].is_subset(k) {
            return Err(Error::InvalidParameter {
                name: "targets",
                reason: format!("K_{} is not contained in K_{}", i, i + 1),
            });
        }
    }
    let below = |k: &FinitePart, shape: BoxRegion, level: usize| -> Result<bool> {
        let d = invariance_defect(k, &FinitePart::from_box(shape))?;
        // d < 1/level  <=>  numer * level < denom
        Ok((*d.numer() as u128) * (level as u128) < *d.denom() as u128)
    };
    let mut levels = Vec::with_capacity(depth);
    match group {
        GroupDescriptor::IntegerLattice { .. } => {
            let mut prev = 1i64;
            for (i, k) in targets[..depth].iter().enumerate() {
                let mut side = None;
                for factor in 1..=MAX_SIDE_FACTOR {
                    let l = prev * factor;
                    if below(k, BoxRegion::origin_cube(group, l)?, i + 1)? {
                        side = Some(l);
                        break;
                    }
                }
                let l = side.ok_or(Error::InvalidParameter {
                    name: "targets",
                    reason: format!("no admissible side found for level {}", i + 1),
                })?;
                levels.push(Tiling::cubes(group, l)?);
                prev = l;
            }
        }
        GroupDescriptor::CyclicSum { length, .. } => {
            let mut prev = 0usize;
            for (i, k) in targets[..depth].iter().enumerate() {
                let mut rank = length;
                for r in prev..=length {
                    if below(k, BoxRegion::subgroup(group, r)?, i + 1)? {
                        rank = r;
                        break;
                    }
                }
                levels.push(Tiling::subgroup_cosets(group, rank)?);
                prev = rank;
            }
        }
    }
    TilingSequence::from_levels(group, levels, targets[..depth].to_vec())
}

/// `(shape index, center)` of the level-`k` tile containing `t`.
pub fn tile_of(seq: &TilingSequence, k: usize, t: &GroupElement) -> Result<(usize, GroupElement)> {
    seq.group.ensure_same(&t.group())?;
    let (s, c) = seq
        .level(k)?
        .locate(t.coords())
        .ok_or_else(|| Error::InvalidParameter {
            name: "tiling",
            reason: format!("no level-{k} tile contains {t}"),
        })?;
    Ok((s, seq.group.element(c)?))
}

/// Whether the level-`k` tile of `t` lies inside `a`.
pub fn well_contained(seq: &TilingSequence, k: usize, t: &GroupElement, a: &FinitePart) -> Result<bool> {
    let (s, c) = tile_of(seq, k, t)?;
    let tile = seq.level(k)?.tile_box(&(s, c.coords().to_vec()))?;
    Ok(match a.as_box() {
        Some(b) => b.contains_box(&tile),
        None => tile.iter_coords().all(|x| a.contains_coords(&x)),
    })
}

/// First failure found by [`verify_congruence`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub level: usize,
    pub element: Vec<i64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongruenceReport {
    pub passed: bool,
    pub levels: usize,
    pub points_checked: usize,
    pub witness: Option<Witness>,
}

/// Checks on `window` that every level partitions it and that every
/// level-`k` tile sits inside a single level-`k+1` tile. Failures are
/// reported with a witness element.
pub fn verify_congruence(seq: &TilingSequence, window: &FinitePart) -> Result<CongruenceReport> {
    seq.group.ensure_same(&window.group())?;
    let fail = |level: usize, element: Vec<i64>, reason: String, points: usize| CongruenceReport {
        passed: false,
        levels: seq.depth(),
        points_checked: points,
        witness: Some(Witness { level, element, reason }),
    };
    let mut points = 0;
    for t in window.iter_coords() {
        points += 1;
        let mut prev: Option<BoxRegion> = None;
        for (i, tiling) in seq.levels.iter().enumerate() {
            let found = tiling.tiles_containing(&t);
            let tile = match found.as_slice() {
                [one] => tiling.tile_box(one)?,
                [] => return Ok(fail(i + 1, t, "not covered by any tile".into(), points)),
                _ => return Ok(fail(i + 1, t, format!("covered by {} tiles", found.len()), points)),
            };
            if let Some(lower) = &prev {
                // The level-k piece inside the window must lie in this tile.
                let ok = match window.as_box() {
                    Some(w) => lower.intersect(w).is_none_or(|piece| tile.contains_box(&piece)),
                    None => lower
                        .iter_coords()
                        .filter(|x| window.contains_coords(x))
                        .all(|x| tile.contains_coords(&x)),
                };
                if !ok {
                    return Ok(fail(
                        i + 1,
                        t,
                        format!("its level-{i} tile is not inside its level-{} tile", i + 1),
                        points,
                    ));
                }
            }
            prev = Some(tile);
        }
    }
    Ok(CongruenceReport {
        passed: true,
        levels: seq.depth(),
        points_checked: points,
        witness: None,
    })
}
