//! Unimodular sequences whose correlations converge to a prescribed `ν̂`.
//!
//! The tiled builder walks a congruent tiling sequence level by level: every
//! level-`k` tile inside `F'_k` that is still blank gets one character
//! `X_c ~ ν` and the values `Y_{s+c} = X_c(s)`; tiles that already overlap
//! defined points are split into their level-`(k-1)` tiles and only the blank
//! ones are filled. The block builder is the one-dimensional special case
//! with consecutive blocks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{invariance_defect, BoxRegion, FinitePart, GroupDescriptor};
use crate::rng::SeedRecord;
use crate::sequence::{ComplexSequence, NO_DRAW};
use crate::spectral::SpectralMeasure;
use crate::tilings::{LevelSummary, TilingSequence};

/// Default bound on `|F'_k|`, in group elements.
pub const DEFAULT_SIZE_CAP: u64 = 1 << 25;
/// Default constant standing in for `4k² log(k|𝒮|)` in practical mode.
pub const DEFAULT_PRACTICAL_CONSTANT: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    /// `|F'_k| > k|S_k||𝒮_k|·4k² ln(k|𝒮_k|) + k|F'_{k-1}||S_k|` plus invariance.
    Strict,
    /// `|F'_k| > k|S_k||𝒮_k|·C + k|F'_{k-1}|` plus invariance.
    Practical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub size_cap: u64,
    pub practical_constant: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            size_cap: DEFAULT_SIZE_CAP,
            practical_constant: DEFAULT_PRACTICAL_CONSTANT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanLevel {
    pub level: usize,
    /// Extents of the box `F'_k` (anchored at the origin).
    pub extents: Vec<i64>,
    pub size: u64,
    /// `|S_k - S_k|`.
    pub difference_size: u64,
    /// `|(S_k - S_k) + F'_k Δ F'_k| / |F'_k|` as `[numerator, denominator]`.
    pub defect: [u64; 2],
    /// `1 / (k |S_k - S_k|)`.
    pub defect_limit: f64,
    /// Right-hand side of the size inequality.
    pub size_required: f64,
    /// `|F'_k| - size_required`.
    pub size_margin: f64,
}

/// Nested boxes `F'_1 ⊆ … ⊆ F'_depth`, each a union of tiles of its level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerSubPlan {
    pub group: GroupDescriptor,
    pub mode: PlanMode,
    pub options: PlanOptions,
    pub levels: Vec<PlanLevel>,
}

impl FolnerSubPlan {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `F'_k`, 1-based.
    pub fn region(&self, k: usize) -> Result<BoxRegion> {
        let lvl = self.levels.get(k.wrapping_sub(1)).ok_or(Error::IndexOutOfRange {
            index: k,
            min: 1,
            max: self.levels.len(),
        })?;
        BoxRegion::new(self.group, vec![0; self.group.rank()], lvl.extents.clone())
    }
}

fn size_rhs(mode: PlanMode, opts: &PlanOptions, k: usize, shape: u64, shapes: usize, prev: u64) -> f64 {
    let k = k as f64;
    let s = shape as f64;
    let count = shapes as f64;
    match mode {
        PlanMode::Strict => k * s * count * 4.0 * k * k * (k * count).ln() + k * prev as f64 * s,
        PlanMode::Practical => k * s * count * opts.practical_constant + k * prev as f64,
    }
}

/// Chooses `F'_k` level by level as the smallest admissible origin box.
pub fn plan_folner_subsequence(
    tilings: &TilingSequence,
    mode: PlanMode,
    depth: usize,
    opts: PlanOptions,
) -> Result<FolnerSubPlan> {
    if depth == 0 || depth > tilings.depth() {
        return Err(Error::IndexOutOfRange {
            index: depth,
            min: 1,
            max: tilings.depth(),
        });
    }
    if !(opts.practical_constant > 0.0) {
        return Err(Error::InvalidParameter {
            name: "practical_constant",
            reason: "must be positive".into(),
        });
    }
    let group = tilings.group();
    let mut levels: Vec<PlanLevel> = Vec::with_capacity(depth);
    let mut prev_size = 0u64;
    let mut prev_ext: Vec<i64> = vec![0; group.rank()];
    for k in 1..=depth {
        let tiling = tilings.level(k)?;
        if tiling.shapes().len() != 1 {
            return Err(Error::Unsupported("planning needs single-shape levels".into()));
        }
        let shape = &tiling.shapes()[0];
        let union = tilings.shape_union(k)?;
        let diff = union.difference_set()?;
        let diff_len = diff.len() as u64;
        let required = size_rhs(mode, &opts, k, union.len() as u64, tiling.shapes().len(), if k == 1 { 0 } else { prev_size });
        let step = shape.centers.step.clone();
        let admissible = |ext: &[i64]| -> Result<Option<(u64, [u64; 2])>> {
            let size: u128 = ext.iter().map(|&e| e as u128).product();
            if (size as f64) <= required {
                return Ok(None);
            }
            let f = FinitePart::from_box(BoxRegion::new(group, vec![0; ext.len()], ext.to_vec())?);
            let d = invariance_defect(&diff, &f)?;
            let ok = (*d.numer() as u128) * (k as u128) * (diff_len as u128) < *d.denom() as u128;
            Ok(ok.then_some((size as u64, [*d.numer(), *d.denom()])))
        };
        let mut found = None;
        match group {
            GroupDescriptor::IntegerLattice { dim } => {
                let l = step[0];
                if step.iter().any(|&s| s != l) {
                    return Err(Error::Unsupported("planning needs cube tilings".into()));
                }
                // Smallest side that is a multiple of L_k and not below F'_{k-1}.
                let floor_side = (required.max(0.0).powf(1.0 / dim as f64).floor() as i64).max(prev_ext[0]).max(l);
                let mut j = (floor_side + l - 1) / l;
                loop {
                    let side = j * l;
                    let size = (side as u128).pow(dim as u32);
                    if size > opts.size_cap as u128 {
                        return Err(Error::PlanOverflow {
                            level: k,
                            required: (required.ceil() as u128).max(size),
                            cap: opts.size_cap,
                        });
                    }
                    if let Some(r) = admissible(&vec![side; dim])? {
                        found = Some((vec![side; dim], r));
                        break;
                    }
                    j += 1;
                }
            }
            GroupDescriptor::CyclicSum { modulus, length } => {
                let shape_rank = shape.shape.extents().iter().filter(|&&e| e > 1).count();
                let prev_rank = prev_ext.iter().filter(|&&e| e > 1).count();
                for r in shape_rank.max(prev_rank)..=length {
                    let ext: Vec<i64> = (0..length).map(|i| if i < r { modulus as i64 } else { 1 }).collect();
                    let size: u128 = (modulus as u128).pow(r as u32);
                    if size > opts.size_cap as u128 {
                        break;
                    }
                    if let Some(res) = admissible(&ext)? {
                        found = Some((ext, res));
                        break;
                    }
                }
                if found.is_none() {
                    return Err(Error::PlanOverflow {
                        level: k,
                        required: required.ceil() as u128,
                        cap: opts.size_cap.min(group.order().unwrap_or(u128::MAX).min(u64::MAX as u128) as u64),
                    });
                }
            }
        }
        let (ext, (size, defect)) = found.expect("loop exits with a level");
        levels.push(PlanLevel {
            level: k,
            extents: ext.clone(),
            size,
            difference_size: diff_len,
            defect,
            defect_limit: 1.0 / (k as f64 * diff_len as f64),
            size_required: required,
            size_margin: size as f64 - required,
        });
        prev_size = size;
        prev_ext = ext;
    }
    Ok(FolnerSubPlan {
        group,
        mode,
        options: opts,
        levels,
    })
}

/// What one level of the tiled construction did.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    /// `C_k`: centers of blank level-`k` tiles filled at this level.
    pub centers: Vec<Vec<i64>>,
    /// Tiles that met already defined points.
    pub bad_tiles: usize,
    /// Level-`(k-1)` tiles filled while splitting bad tiles.
    pub refilled_subtiles: Vec<Vec<i64>>,
    /// Level-`(k-1)` tiles inside bad tiles that were partly defined and left.
    pub partial_subtiles: usize,
    /// `Σ_S |S| |C_k(S)| / |F'_k|`.
    pub coverage: f64,
    /// `1 - 2/k`, enforced in strict mode.
    pub coverage_required: f64,
    /// `bad_tiles <= |F'_{k-1}|`.
    pub bad_tile_bound_holds: bool,
}

/// Everything needed to reproduce a sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub builder: String,
    pub group: GroupDescriptor,
    pub measure_digest: String,
    pub seed: SeedRecord,
    pub mode: Option<PlanMode>,
    pub tiling: Option<Vec<LevelSummary>>,
    pub plan: Option<FolnerSubPlan>,
    pub levels: Vec<LevelRecord>,
    /// Points never reached by a draw and set to 1.
    pub default_filled: usize,
    /// Block boundaries `N_0 = 0 < N_1 < …` of the block builder.
    pub block_boundaries: Option<Vec<u64>>,
    /// Whether `N_k >= k N_{k-1}` holds for every block.
    pub wash_out_condition: Option<bool>,
}

impl Provenance {
    /// Total number of random draws.
    pub fn draws(&self) -> usize {
        if let Some(b) = &self.block_boundaries {
            return b.len().saturating_sub(1);
        }
        self.levels.iter().map(|l| l.centers.len() + l.refilled_subtiles.len()).sum()
    }
}

/// A sequence of unit complex numbers together with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct UnimodularSeq {
    pub sequence: ComplexSequence,
    pub provenance: Provenance,
}

struct Canvas {
    window: BoxRegion,
    values: Vec<Complex64>,
    defined: Vec<bool>,
    ids: Vec<u32>,
    next_id: u32,
}

impl Canvas {
    fn indices(&self, tile: &BoxRegion) -> Vec<usize> {
        tile.iter_coords()
            .map(|c| self.window.index_of(&c).expect("tile inside window"))
            .collect()
    }

    fn fill(&mut self, tile: &BoxRegion, center: &[i64], chi: &crate::groups::Character) -> Result<()> {
        let id = self.next_id;
        self.next_id = self.next_id.checked_add(1).filter(|&x| x != NO_DRAW).ok_or(Error::Unsupported(
            "more than 2^32 - 1 draws".into(),
        ))?;
        let group = self.window.group();
        for c in tile.iter_coords() {
            let s: Vec<i64> = c.iter().zip(center).map(|(a, b)| group_sub(group, *a, *b)).collect();
            let i = self.window.index_of(&c).expect("tile inside window");
            self.values[i] = chi.eval_coords(&s);
            self.defined[i] = true;
            self.ids[i] = id;
        }
        Ok(())
    }
}

fn group_sub(group: GroupDescriptor, a: i64, b: i64) -> i64 {
    match group.modulus() {
        Some(m) => (a - b).rem_euclid(m),
        None => a - b,
    }
}

fn draw(nu: &SpectralMeasure, seed: &SeedRecord, level: usize, center: &[i64]) -> Result<crate::groups::Character> {
    let mut key = Vec::with_capacity(center.len() + 1);
    key.push(level as i64);
    key.extend_from_slice(center);
    nu.sample_one(&mut seed.keyed(&key).rng())
}

/// Builds `Y` on `F'_depth` following the plan.
pub fn build_sequence_tiled(
    nu: &SpectralMeasure,
    tilings: &TilingSequence,
    plan: &FolnerSubPlan,
    seed: &SeedRecord,
) -> Result<UnimodularSeq> {
    let group = tilings.group();
    group.ensure_same(&nu.group())?;
    group.ensure_same(&plan.group)?;
    if plan.depth() > tilings.depth() {
        return Err(Error::InvalidParameter {
            name: "plan",
            reason: "plan is deeper than the tiling sequence".into(),
        });
    }
    let depth = plan.depth();
    let window = plan.region(depth)?;
    let n = window.len();
    let mut canvas = Canvas {
        window: window.clone(),
        values: vec![Complex64::new(1.0, 0.0); n],
        defined: vec![false; n],
        ids: vec![NO_DRAW; n],
        next_id: 0,
    };
    // Level 1: Y = 1 on F'_1.
    for i in canvas.indices(&plan.region(1)?) {
        canvas.defined[i] = true;
    }
    let mut records = Vec::with_capacity(depth.saturating_sub(1));
    for k in 2..=depth {
        let region = plan.region(k)?;
        let tiling = tilings.level(k)?;
        let lower = tilings.level(k - 1)?;
        let mut rec = LevelRecord {
            level: k,
            centers: vec![],
            bad_tiles: 0,
            refilled_subtiles: vec![],
            partial_subtiles: 0,
            coverage: 0.0,
            coverage_required: 1.0 - 2.0 / k as f64,
            bad_tile_bound_holds: true,
        };
        let mut covered = 0usize;
        for tile in tiling.tiles_meeting(&region) {
            let tbox = tiling.tile_box(&tile)?;
            if !region.contains_box(&tbox) {
                continue;
            }
            let idx = canvas.indices(&tbox);
            if idx.iter().all(|&i| !canvas.defined[i]) {
                let chi = draw(nu, seed, k, &tile.1)?;
                canvas.fill(&tbox, &tile.1, &chi)?;
                covered += idx.len();
                rec.centers.push(tile.1);
                continue;
            }
            rec.bad_tiles += 1;
            for sub in lower.tiles_meeting(&tbox) {
                let sbox = lower.tile_box(&sub)?;
                let Some(piece) = sbox.intersect(&tbox) else { continue };
                if piece != sbox {
                    // Not a subtile: the levels are not congruent here.
                    continue;
                }
                let sidx = canvas.indices(&sbox);
                let blank = sidx.iter().filter(|&&i| !canvas.defined[i]).count();
                if blank == sidx.len() {
                    let chi = draw(nu, seed, k - 1, &sub.1)?;
                    canvas.fill(&sbox, &sub.1, &chi)?;
                    rec.refilled_subtiles.push(sub.1);
                } else if blank > 0 {
                    rec.partial_subtiles += 1;
                }
            }
        }
        rec.coverage = covered as f64 / region.len() as f64;
        rec.bad_tile_bound_holds = rec.bad_tiles as u64 <= plan.levels[k - 2].size;
        if plan.mode == PlanMode::Strict && k > 2 && rec.coverage <= rec.coverage_required {
            return Err(Error::CoverageShortfall {
                level: k,
                realized: rec.coverage,
                required: rec.coverage_required,
            });
        }
        records.push(rec);
    }
    let default_filled = canvas.ids.iter().filter(|&&id| id == NO_DRAW).count();
    let sequence = ComplexSequence::new(window, canvas.values)?.with_draw_ids(canvas.ids)?;
    Ok(UnimodularSeq {
        sequence,
        provenance: Provenance {
            builder: "tiled".into(),
            group,
            measure_digest: nu.digest(),
            seed: seed.clone(),
            mode: Some(plan.mode),
            tiling: Some(tilings.summary()[..depth].to_vec()),
            plan: Some(plan.clone()),
            levels: records,
            default_filled,
            block_boundaries: None,
            wash_out_condition: None,
        },
    })
}

/// `count` blocks of equal length.
pub fn uniform_blocks(count: usize, len: u64) -> Vec<u64> {
    vec![len; count]
}

/// Consecutive blocks of the given lengths on `Z`; block `k` uses one draw
/// `X_k` and `c_n = X_k(n - N_{k-1})`.
pub fn build_sequence_blocks(nu: &SpectralMeasure, block_lengths: &[u64], seed: &SeedRecord) -> Result<UnimodularSeq> {
    let z = GroupDescriptor::integers();
    z.ensure_same(&nu.group())?;
    if block_lengths.is_empty() {
        return Err(Error::EmptySet("block list"));
    }
    if block_lengths[0] == 0 || block_lengths.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "block_lengths",
            reason: "block lengths must be positive and non-decreasing".into(),
        });
    }
    if block_lengths.len() >= NO_DRAW as usize {
        return Err(Error::Unsupported("more than 2^32 - 1 blocks".into()));
    }
    let total: u64 = block_lengths.iter().sum();
    let mut boundaries = vec![0u64];
    let mut values = Vec::with_capacity(total as usize);
    let mut ids = Vec::with_capacity(total as usize);
    for (k, &len) in block_lengths.iter().enumerate() {
        let chi = nu.sample_one(&mut seed.substream(k as u64).rng())?;
        for s in 0..len as i64 {
            values.push(chi.eval_coords(&[s]));
            ids.push(k as u32);
        }
        boundaries.push(boundaries[k] + len);
    }
    let wash_out = boundaries.windows(2).enumerate().skip(1).all(|(i, w)| w[1] >= (i as u64 + 1) * w[0]);
    let sequence = ComplexSequence::from_vec(values)?.with_draw_ids(ids)?;
    Ok(UnimodularSeq {
        sequence,
        provenance: Provenance {
            builder: "blocks".into(),
            group: z,
            measure_digest: nu.digest(),
            seed: seed.clone(),
            mode: None,
            tiling: None,
            plan: None,
            levels: vec![],
            default_filled: 0,
            block_boundaries: Some(boundaries),
            wash_out_condition: Some(wash_out),
        },
    })
}

/// `√2 Re c` and `√2 Im c`, each carrying weight ½.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPair {
    pub window: BoxRegion,
    pub component_1: Vec<f64>,
    pub component_2: Vec<f64>,
    pub weights: [f64; 2],
}

pub fn realify(seq: &ComplexSequence) -> RealPair {
    let r2 = std::f64::consts::SQRT_2;
    RealPair {
        window: seq.window().clone(),
        component_1: seq.values().iter().map(|v| r2 * v.re).collect(),
        component_2: seq.values().iter().map(|v| r2 * v.im).collect(),
        weights: [0.5, 0.5],
    }
}

/// `½ avg(c1_{g+h} c1_g) + ½ avg(c2_{g+h} c2_g)` over `F`.
pub fn paired_correlation(pair: &RealPair, h: &crate::groups::GroupElement, f: &FinitePart) -> Result<f64> {
    let group = pair.window.group();
    group.ensure_same(&h.group())?;
    if f.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let (mut a, mut b) = (0.0, 0.0);
    for g in f.iter_coords() {
        let gh: Vec<i64> = g.iter().zip(h.coords()).map(|(x, y)| match group.modulus() {
            Some(m) => (x + y).rem_euclid(m),
            None => x + y,
        }).collect();
        let (Some(i), Some(j)) = (pair.window.index_of(&gh), pair.window.index_of(&g)) else {
            return Err(Error::WindowUnderflow(format!("{g:?} or {gh:?} is outside the window")));
        };
        a += pair.component_1[i] * pair.component_1[j];
        b += pair.component_2[i] * pair.component_2[j];
    }
    let n = f.len() as f64;
    Ok(pair.weights[0] * a / n + pair.weights[1] * b / n)
}
