//! One function per subcommand.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use pdseq::constructor::{
    build_sequence_blocks, build_sequence_tiled, paired_correlation, plan_folner_subsequence, realify, PlanMode,
    PlanOptions, Provenance, UnimodularSeq, DEFAULT_PRACTICAL_CONSTANT, DEFAULT_SIZE_CAP,
};
use pdseq::estimator::{all_lags_fast, atom_estimate, certify, effective_count, effective_count_on, folner_correlation, DEFAULT_DELTA};
use pdseq::gmsc::{
    build_covariance, build_covariance_with_field, ensemble_correlation, path_time_correlation_slice,
    pseudo_covariance_max, sample_paths, Field, PathEnsemble, StationarySampler,
};
use pdseq::groups::{BoxRegion, FinitePart, GroupElement};
use pdseq::posdef::{check_positive_definite, make_example, PosDefFn};
use pdseq::realization::{rotation_correlation, rotation_orbit_average_over, sum_representation_check, CheckStatus, RotationSystem};
use pdseq::spectral::SpectralMeasure;
use pdseq::tilings::{build_box_tiling_sequence, default_targets, verify_congruence, Tiling, TilingSequence};
use pdseq::{ComplexSequence, GroupDescriptor, SeedRecord};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::report::{num, PlotRow, Table};

/// What a command produced before it is wrapped into a report.
pub struct Outcome {
    pub summary: BTreeMap<String, Value>,
    pub table: Table,
    pub plot: Option<Vec<PlotRow>>,
    /// Nonzero when the command ran but its check failed.
    pub exit_code: i32,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Outcome {
            summary: BTreeMap::new(),
            table,
            plot: None,
            exit_code: 0,
        }
    }

    fn put(&mut self, key: &str, v: impl serde::Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(v).expect("summary value serializes"));
    }
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn c(z: Complex64) -> [Value; 2] {
    [num(z.re), num(z.im)]
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    group: GroupDescriptor,
    seed: Option<SeedRecord>,
}

impl Ctx<'_> {
    fn seed(&self) -> Result<&SeedRecord, CliError> {
        self.seed.as_ref().ok_or_else(|| invalid("seed", "missing"))
    }

    fn lags(&self, default: usize) -> usize {
        self.cfg.params.lags.unwrap_or(default)
    }

    fn require_z(&self) -> Result<(), CliError> {
        if self.group != GroupDescriptor::integers() {
            return Err(invalid("group", format!("`{}` runs on Z only", self.cfg.command.name())));
        }
        Ok(())
    }

    fn field(&self) -> Option<Field> {
        match self.cfg.params.field.as_deref() {
            Some("real") => Some(Field::Real),
            Some("complex") => Some(Field::Complex),
            _ => None,
        }
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<(Outcome, Option<SeedRecord>), CliError> {
    let group = cfg.group_descriptor()?;
    let seed = cfg.seed.map(|s| SeedRecord::new(s, 0));
    let ctx = Ctx { cfg, group, seed: seed.clone() };
    let out = match cfg.command {
        Command::CheckPd => check_pd(&ctx),
        Command::GmscEnsemble => gmsc_ensemble(&ctx),
        Command::GmscPath => gmsc_path(&ctx),
        Command::Rotation => rotation(&ctx),
        Command::BuildSeq => build_seq(&ctx),
        Command::Estimate => estimate(&ctx),
        Command::Atoms => atoms(&ctx),
        Command::Realify => realify_cmd(&ctx),
        Command::TilingsVerify => tilings_verify(&ctx),
        Command::DemoEigenvalue => demo_eigenvalue(&ctx),
        Command::DemoProduct => demo_product(&ctx),
    }?;
    Ok((out, seed))
}

/// Lag `h e_1`.
fn lag(group: GroupDescriptor, h: i64) -> Result<GroupElement, CliError> {
    let mut coords = vec![0; group.rank()];
    coords[0] = match group.modulus() {
        Some(m) => h.rem_euclid(m),
        None => h,
    };
    Ok(group.element(coords)?)
}

/// The first `w` points of a box around 0, for Gram and covariance windows.
fn window_points(group: GroupDescriptor, w: usize) -> Result<Vec<GroupElement>, CliError> {
    if w == 0 {
        return Err(invalid("params.window", "must be positive"));
    }
    let region = if group.is_lattice() {
        let d = group.rank() as u32;
        let mut side = 1i64;
        while ((side + 1) as u64).pow(d) <= w as u64 {
            side += 1;
        }
        BoxRegion::origin_cube(group, side)?
    } else {
        BoxRegion::whole_group(group)?
    };
    region.iter_coords().take(w).map(|c| group.element(c).map_err(CliError::from)).collect()
}

/// `{g in window : g + h in window}`.
fn lag_domain(window: &BoxRegion, h: &GroupElement) -> Result<FinitePart, CliError> {
    let group = window.group();
    if group.is_lattice() {
        let lo: Vec<i64> = window.lo().iter().zip(h.coords()).map(|(l, d)| l + (-d).max(0)).collect();
        let hi: Vec<i64> = window.hi().iter().zip(h.coords()).map(|(u, d)| u - (*d).max(0)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(invalid("params.lags", format!("lag {h} leaves no room in the window")));
        }
        return Ok(FinitePart::from_box(BoxRegion::new(group, lo, hi)?));
    }
    let m = group.modulus().expect("cyclic");
    let pts = window.iter_coords().filter(|g| {
        let gh: Vec<i64> = g.iter().zip(h.coords()).map(|(a, b)| (a + b).rem_euclid(m)).collect();
        window.contains_coords(&gh)
    });
    Ok(FinitePart::from_coords(group, pts)?)
}

fn check_pd(ctx: &Ctx) -> Result<Outcome, CliError> {
    let phi = ctx.cfg.phi(ctx.group)?;
    let pts = window_points(ctx.group, ctx.cfg.params.window.unwrap_or(12))?;
    let verdict = check_positive_definite(&phi, std::slice::from_ref(&pts), None)?;
    let mut out = Outcome::new(Table::new(&["point", "phi_re", "phi_im"]));
    for g in &pts {
        let v = phi.eval(g)?;
        let [re, im] = c(v);
        out.table.push(vec![json!(g.to_string()), re, im]);
    }
    out.put("verdict", &verdict);
    out.put("window_size", pts.len());
    if !verdict.passed {
        out.exit_code = 3;
    }
    Ok(out)
}

fn ensemble_table(phi: &PosDefFn, ens: &PathEnsemble, lags: &[GroupElement]) -> Result<Outcome, CliError> {
    let mut out = Outcome::new(Table::new(&["h", "target_re", "target_im", "estimate_re", "estimate_im", "std_error"]));
    let mut plot = Vec::new();
    let mut worst = 0.0f64;
    for (i, h) in lags.iter().enumerate() {
        let t = phi.eval(h)?;
        let e = ensemble_correlation(ens, h)?;
        worst = worst.max((e.value - t).norm());
        let [tr, ti] = c(t);
        let [er, ei] = c(e.value);
        out.table.push(vec![json!(h.to_string()), tr, ti, er, ei, num(e.std_error)]);
        plot.push(PlotRow {
            h: i as i64,
            target: Some(t.re),
            estimate_re: e.value.re,
            estimate_im: e.value.im,
            radius: Some(3.0 * e.std_error),
        });
    }
    out.plot = Some(plot);
    out.put("max_abs_error", worst);
    out.put("plot_radius", "3 standard errors");
    Ok(out)
}

fn gmsc_ensemble(ctx: &Ctx) -> Result<Outcome, CliError> {
    let phi = ctx.cfg.phi(ctx.group)?;
    let pts = window_points(ctx.group, ctx.cfg.params.window.unwrap_or(32))?;
    let cov = match ctx.field() {
        Some(f) => build_covariance_with_field(&phi, &pts, f)?,
        None => build_covariance(&phi, &pts)?,
    };
    let m = ctx.cfg.params.paths.unwrap_or(2000);
    let ens = sample_paths(&cov, m, ctx.seed()?)?;
    let lags: Vec<GroupElement> = pts.iter().take(ctx.lags(pts.len() - 1) + 1).cloned().collect();
    let mut out = ensemble_table(&phi, &ens, &lags)?;
    out.put("paths", m);
    out.put("field", format!("{:?}", cov.field()).to_lowercase());
    out.put("jitter", cov.jitter());
    out.put("min_pivot", cov.min_pivot());
    out.put("pseudo_covariance_max", pseudo_covariance_max(&ens));
    if let Some(p) = &ctx.cfg.out.sequence {
        let f = File::create(p).map_err(|e| CliError::io(p, e))?;
        ens.write_columns(BufWriter::new(f)).map_err(|e| CliError::io(p, e))?;
    }
    Ok(out)
}

/// Per-lag time averages along each path: (mean, across-path sd, first path).
fn time_averages(ens: &PathEnsemble, n: usize, h: usize) -> Result<(Complex64, f64, Complex64), CliError> {
    let vals: Vec<Complex64> = (0..ens.paths())
        .map(|p| path_time_correlation_slice(ens.path(p), h, n - h))
        .collect::<Result<_, _>>()?;
    let m = vals.len() as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / m;
    let sd = (vals.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / m).sqrt();
    Ok((mean, sd, vals[0]))
}

fn stationary_paths(ctx: &Ctx, phi: &PosDefFn, n: usize, m: usize) -> Result<PathEnsemble, CliError> {
    let field = ctx.field().unwrap_or(Field::Complex);
    let sampler = StationarySampler::new(phi, n, field)?;
    Ok(sampler.sample(m, ctx.seed()?)?)
}

fn gmsc_path(ctx: &Ctx) -> Result<Outcome, CliError> {
    ctx.require_z()?;
    let phi = ctx.cfg.phi(ctx.group)?;
    let n = ctx.cfg.params.n.unwrap_or(10_000) as usize;
    let m = ctx.cfg.params.paths.unwrap_or(100);
    let h_max = ctx.lags(8);
    if h_max >= n {
        return Err(invalid("params.lags", "must be below n"));
    }
    let ens = stationary_paths(ctx, &phi, n, m)?;
    let mut out = Outcome::new(Table::new(&[
        "h", "target_re", "target_im", "time_mean_re", "time_mean_im", "across_path_sd", "path0_re", "path0_im",
    ]));
    let mut plot = Vec::new();
    for h in 0..=h_max {
        let t = phi.eval(&lag(ctx.group, h as i64)?)?;
        let (mean, sd, first) = time_averages(&ens, n, h)?;
        let mut row = vec![json!(h)];
        row.extend(c(t));
        row.extend(c(mean));
        row.push(num(sd));
        row.extend(c(first));
        out.table.push(row);
        plot.push(PlotRow {
            h: h as i64,
            target: Some(t.re),
            estimate_re: mean.re,
            estimate_im: mean.im,
            radius: Some(sd),
        });
    }
    out.plot = Some(plot);
    out.put("paths", m);
    out.put("n", n);
    out.put("plot_radius", "across-path standard deviation");
    if let Some(p) = &ctx.cfg.out.sequence {
        let f = File::create(p).map_err(|e| CliError::io(p, e))?;
        ens.write_columns(BufWriter::new(f)).map_err(|e| CliError::io(p, e))?;
    }
    Ok(out)
}

fn start_point(ctx: &Ctx, sys: &RotationSystem) -> Result<Vec<f64>, CliError> {
    if let Some(x) = &ctx.cfg.params.x0 {
        if x.len() != sys.dimension() {
            return Err(invalid("params.x0", format!("expected {} coordinates", sys.dimension())));
        }
        return Ok(x.clone());
    }
    let mut rng = ctx.seed()?.substream(1 << 40).rng();
    Ok((0..sys.dimension()).map(|_| rng.random::<f64>()).collect())
}

fn orbit_domain(group: GroupDescriptor, n: u64) -> Result<FinitePart, CliError> {
    let region = if group.is_lattice() {
        let d = group.rank() as u32;
        let mut side = 1i64;
        while ((side + 1) as u64).pow(d) <= n {
            side += 1;
        }
        BoxRegion::origin_cube(group, side)?
    } else {
        BoxRegion::whole_group(group)?
    };
    Ok(FinitePart::from_box(region))
}

fn rotation(ctx: &Ctx) -> Result<Outcome, CliError> {
    let nu = ctx.cfg.measure(ctx.group)?;
    let sys = RotationSystem::from_measure(&nu)?;
    let x0 = start_point(ctx, &sys)?;
    let f = orbit_domain(ctx.group, ctx.cfg.params.n.unwrap_or(100_000))?;
    let mut out = Outcome::new(Table::new(&[
        "h", "target_re", "target_im", "exact_re", "exact_im", "orbit_re", "orbit_im", "orbit_error",
    ]));
    let mut plot = Vec::new();
    let mut worst_exact = 0.0f64;
    let mut worst_orbit = 0.0f64;
    for h in 0..=ctx.lags(8) as i64 {
        let g = lag(ctx.group, h)?;
        let t = nu.fourier(&g)?;
        let e = rotation_correlation(&sys, &g)?;
        let o = rotation_orbit_average_over(&sys, &x0, &f, &g)?;
        worst_exact = worst_exact.max((e - t).norm());
        worst_orbit = worst_orbit.max((o - e).norm());
        let mut row = vec![json!(h)];
        row.extend(c(t));
        row.extend(c(e));
        row.extend(c(o));
        row.push(num((o - e).norm()));
        out.table.push(row);
        plot.push(PlotRow {
            h,
            target: Some(t.re),
            estimate_re: o.re,
            estimate_im: o.im,
            radius: None,
        });
    }
    out.plot = Some(plot);
    out.put("x0", &x0);
    out.put("orbit_size", f.len());
    out.put("max_exact_error", worst_exact);
    out.put("max_orbit_error", worst_orbit);
    Ok(out)
}

fn provenance_summary(p: &Provenance) -> Value {
    let levels: Vec<Value> = p
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "fresh_tiles": l.centers.len(),
                "bad_tiles": l.bad_tiles,
                "refilled_subtiles": l.refilled_subtiles.len(),
                "partial_subtiles": l.partial_subtiles,
                "coverage": num(l.coverage),
                "coverage_required": num(l.coverage_required),
                "bad_tile_bound_holds": l.bad_tile_bound_holds,
            })
        })
        .collect();
    json!({
        "builder": p.builder,
        "group": p.group.to_string(),
        "measure_digest": p.measure_digest,
        "seed": p.seed,
        "mode": p.mode,
        "tiling": p.tiling,
        "plan": p.plan,
        "levels": levels,
        "draws": p.draws(),
        "default_filled": p.default_filled,
        "block_count": p.block_boundaries.as_ref().map(|b| b.len() - 1),
        "wash_out_condition": p.wash_out_condition,
    })
}

struct Built {
    seq: ComplexSequence,
    provenance: Option<Value>,
    full_provenance: Option<Provenance>,
    measure: Option<SpectralMeasure>,
}

fn truncate(seq: &ComplexSequence, n: usize) -> Result<ComplexSequence, CliError> {
    if n > seq.len() {
        return Err(invalid("params.n", format!("the sequence has only {} points", seq.len())));
    }
    let mut t = ComplexSequence::new(
        BoxRegion::new(seq.group(), seq.window().lo().to_vec(), vec![seq.window().lo()[0] + n as i64])?,
        seq.values()[..n].to_vec(),
    )?;
    if let Some(ids) = seq.draw_ids() {
        t = t.with_draw_ids(ids[..n].to_vec())?;
    }
    Ok(t)
}

fn build(ctx: &Ctx) -> Result<Built, CliError> {
    let nu = ctx.cfg.measure(ctx.group)?;
    let seed = ctx.seed()?;
    let p = &ctx.cfg.params;
    let built: UnimodularSeq = match p.builder.as_deref().unwrap_or("tiled") {
        "blocks" => {
            let lengths = match &p.blocks {
                Some(b) => b.clone(),
                None => {
                    let len = p.block_length.unwrap_or(180);
                    let n = p.n.unwrap_or(100_000);
                    if len == 0 {
                        return Err(invalid("params.block_length", "must be positive"));
                    }
                    vec![len; n.div_ceil(len) as usize]
                }
            };
            build_sequence_blocks(&nu, &lengths, seed)?
        }
        _ => {
            let tilings = match &p.sides {
                Some(s) => TilingSequence::from_sides(ctx.group, s)?,
                None => {
                    let depth = p.depth.unwrap_or(4);
                    build_box_tiling_sequence(ctx.group, &default_targets(ctx.group, depth)?, depth)?
                }
            };
            let depth = p.depth.unwrap_or(tilings.depth());
            let mode = match p.mode.as_deref() {
                Some("strict") => PlanMode::Strict,
                _ => PlanMode::Practical,
            };
            let opts = PlanOptions {
                size_cap: p.size_cap.unwrap_or(DEFAULT_SIZE_CAP),
                practical_constant: p.practical_constant.unwrap_or(DEFAULT_PRACTICAL_CONSTANT),
            };
            let plan = plan_folner_subsequence(&tilings, mode, depth, opts)?;
            build_sequence_tiled(&nu, &tilings, &plan, seed)?
        }
    };
    let mut seq = built.sequence;
    if let Some(n) = p.n {
        if ctx.group == GroupDescriptor::integers() && (n as usize) < seq.len() {
            seq = truncate(&seq, n as usize)?;
        }
    }
    Ok(Built {
        seq,
        provenance: Some(provenance_summary(&built.provenance)),
        full_provenance: Some(built.provenance),
        measure: Some(nu),
    })
}

fn read_input(ctx: &Ctx, path: &Path) -> Result<Built, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let seq = if path.extension().is_some_and(|e| e == "bin") {
        ctx.require_z()?;
        let bytes = file.metadata().map_err(|e| CliError::io(path, e))?.len();
        let window = BoxRegion::new(ctx.group, vec![0], vec![(bytes / 16) as i64])?;
        ComplexSequence::read_binary(window, BufReader::new(file))?
    } else {
        ComplexSequence::read_columns(BufReader::new(file))?
    };
    Ok(Built {
        seq,
        provenance: None,
        full_provenance: None,
        measure: match &ctx.cfg.measure {
            Some(_) => Some(ctx.cfg.measure(ctx.group)?),
            None => None,
        },
    })
}

fn sequence(ctx: &Ctx) -> Result<Built, CliError> {
    match &ctx.cfg.params.input {
        Some(p) => read_input(ctx, p),
        None => build(ctx),
    }
}

fn write_sequence(seq: &ComplexSequence, path: &Path) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    let r = if path.extension().is_some_and(|e| e == "bin") {
        seq.write_binary(&mut w)
    } else {
        seq.write_columns(&mut w)
    };
    r.and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

fn build_seq(ctx: &Ctx) -> Result<Outcome, CliError> {
    let b = build(ctx)?;
    let mut out = Outcome::new(Table::new(&["level", "fresh_tiles", "bad_tiles", "refilled_subtiles", "coverage"]));
    let prov = b.provenance.expect("built sequences carry provenance");
    if let (Some(p), Some(full)) = (&ctx.cfg.out.sequence, &b.full_provenance) {
        let mut side = p.clone().into_os_string();
        side.push(".provenance.json");
        let text = serde_json::to_string_pretty(full).expect("provenance serializes") + "\n";
        crate::report::write(Path::new(&side), &text)?;
    }
    if let Some(levels) = prov["levels"].as_array() {
        for l in levels {
            out.table.push(vec![
                l["level"].clone(),
                l["fresh_tiles"].clone(),
                l["bad_tiles"].clone(),
                l["refilled_subtiles"].clone(),
                l["coverage"].clone(),
            ]);
        }
    }
    out.put("provenance", prov);
    out.put("length", b.seq.len());
    out.put("window_lo", b.seq.window().lo());
    out.put("window_hi", b.seq.window().hi());
    out.put("max_modulus_error", b.seq.max_modulus_error());
    if let Some(p) = &ctx.cfg.out.sequence {
        write_sequence(&b.seq, p)?;
    }
    Ok(out)
}

fn estimate(ctx: &Ctx) -> Result<Outcome, CliError> {
    let b = sequence(ctx)?;
    let delta = ctx.cfg.params.delta.unwrap_or(DEFAULT_DELTA);
    let h_max = ctx.lags(16);
    let seq = &b.seq;
    let mut out = Outcome::new(Table::new(&[
        "h", "re", "im", "n", "radius", "bound", "effective_n", "basis", "target_re", "target_im",
    ]));
    let fast = if seq.group() == GroupDescriptor::integers() {
        Some(all_lags_fast(seq, h_max)?)
    } else {
        None
    };
    let mut plot = Vec::new();
    for h in 0..=h_max {
        let g = lag(ctx.group, h as i64)?;
        let f = lag_domain(seq.window(), &g)?;
        let est = match &fast {
            Some(all) => all[h].clone(),
            None => folner_correlation(seq, &g, &f)?,
        };
        let est = certify(&est, delta, effective_count(seq, &g, &f))?;
        let cert = est.certificate.expect("certified");
        let target = b.measure.as_ref().map(|nu| nu.fourier(&g)).transpose()?;
        let [re, im] = c(est.value);
        let (tr, ti) = target.map_or((Value::Null, Value::Null), |t| (num(t.re), num(t.im)));
        out.table.push(vec![
            json!(h),
            re,
            im,
            json!(est.n),
            num(cert.radius),
            num(cert.bound),
            json!(cert.effective_n),
            serde_json::to_value(cert.basis).expect("basis serializes"),
            tr,
            ti,
        ]);
        plot.push(PlotRow {
            h: h as i64,
            target: target.map(|t| t.re),
            estimate_re: est.value.re,
            estimate_im: est.value.im,
            radius: Some(cert.radius),
        });
    }
    out.plot = Some(plot);
    out.put("delta", delta);
    out.put("length", seq.len());
    if let Some(p) = b.provenance {
        out.put("provenance", p);
    }
    Ok(out)
}

fn atoms(ctx: &Ctx) -> Result<Outcome, CliError> {
    let b = sequence(ctx)?;
    let delta = ctx.cfg.params.delta.unwrap_or(DEFAULT_DELTA);
    let seq = &b.seq;
    let points = ctx.cfg.params.characters.clone().unwrap_or_else(|| vec![vec![0.0; ctx.group.rank()]]);
    let f = FinitePart::from_box(seq.window().clone());
    let mut out = Outcome::new(Table::new(&["character", "re", "im", "radius", "effective_n", "target"]));
    for p in &points {
        let chi = if ctx.group.is_lattice() {
            ctx.group.torus_character(p.clone())?
        } else {
            ctx.group.residue_character(p.iter().map(|&x| x as i64).collect::<Vec<_>>())?
        };
        let est = certify(&atom_estimate(seq, &chi, &f)?, delta, effective_count_on(seq, &f))?;
        let cert = est.certificate.expect("certified");
        let target = b.measure.as_ref().map(|nu| num(nu.atom_weight(&chi))).unwrap_or(Value::Null);
        let [re, im] = c(est.value);
        out.table.push(vec![json!(chi.to_string()), re, im, num(cert.radius), json!(cert.effective_n), target]);
    }
    out.put("delta", delta);
    out.put("length", seq.len());
    if let Some(p) = b.provenance {
        out.put("provenance", p);
    }
    Ok(out)
}

fn realify_cmd(ctx: &Ctx) -> Result<Outcome, CliError> {
    let b = sequence(ctx)?;
    let pair = realify(&b.seq);
    let mut out = Outcome::new(Table::new(&["h", "paired", "complex_re", "difference"]));
    let mut plot = Vec::new();
    let mut worst = 0.0f64;
    for h in 0..=ctx.lags(32) {
        let g = lag(ctx.group, h as i64)?;
        let f = lag_domain(b.seq.window(), &g)?;
        let p = paired_correlation(&pair, &g, &f)?;
        let z = folner_correlation(&b.seq, &g, &f)?.value;
        worst = worst.max((p - z.re).abs());
        out.table.push(vec![json!(h), num(p), num(z.re), num(p - z.re)]);
        plot.push(PlotRow {
            h: h as i64,
            target: Some(z.re),
            estimate_re: p,
            estimate_im: 0.0,
            radius: None,
        });
    }
    out.plot = Some(plot);
    out.put("max_difference", worst);
    out.put("weights", pair.weights);
    if let Some(p) = b.provenance {
        out.put("provenance", p);
    }
    if let Some(path) = &ctx.cfg.out.sequence {
        let f = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = BufWriter::new(f);
        let res: std::io::Result<()> = (|| {
            writeln!(w, "# coords\tcomponent_1\tcomponent_2")?;
            for (i, (a, b)) in pair.component_1.iter().zip(&pair.component_2).enumerate() {
                let coords: Vec<String> = pair.window.coords_at(i).iter().map(|x| x.to_string()).collect();
                writeln!(w, "{}\t{a:e}\t{b:e}", coords.join("\t"))?;
            }
            w.flush()
        })();
        res.map_err(|e| CliError::io(path, e))?;
    }
    Ok(out)
}

fn tilings_verify(ctx: &Ctx) -> Result<Outcome, CliError> {
    let p = &ctx.cfg.params;
    let group = ctx.group;
    let mut seq = match &p.sides {
        Some(s) => TilingSequence::from_sides(group, s)?,
        None => {
            let depth = p.depth.unwrap_or(4);
            build_box_tiling_sequence(group, &default_targets(group, depth)?, depth)?
        }
    };
    if p.corrupt_offset.unwrap_or(false) {
        if seq.depth() < 2 || !group.is_lattice() {
            return Err(invalid("params.corrupt_offset", "needs a lattice sequence with two levels"));
        }
        let mut levels = seq.levels().to_vec();
        let side = levels[1].shapes()[0].shape.extents();
        let mut offset = vec![0; group.rank()];
        offset[0] = 1;
        levels[1] = Tiling::grid(group, &side, &offset)?;
        seq = TilingSequence::from_levels(group, levels, vec![])?;
    }
    let window = if group.is_lattice() {
        let e = p.extent.unwrap_or(1000);
        FinitePart::from_box(BoxRegion::new(group, vec![-e; group.rank()], vec![e + 1; group.rank()])?)
    } else {
        FinitePart::from_box(BoxRegion::whole_group(group)?)
    };
    let report = verify_congruence(&seq, &window)?;
    let mut out = Outcome::new(Table::new(&["level", "shape_sides", "center_step", "center_offset"]));
    for l in seq.summary() {
        out.table.push(vec![json!(l.level), json!(l.shape_sides), json!(l.center_steps), json!(l.center_offsets)]);
    }
    out.put("congruence", &report);
    out.put("window_size", window.len());
    if !report.passed {
        out.exit_code = 3;
    }
    Ok(out)
}

fn demo_eigenvalue(ctx: &Ctx) -> Result<Outcome, CliError> {
    ctx.require_z()?;
    let phi = make_example("eigenvalue_sqrt2")?;
    let n = ctx.cfg.params.n.unwrap_or(10_000) as usize;
    let m = ctx.cfg.params.paths.unwrap_or(200);
    let h_max = ctx.lags(8);
    if h_max >= n {
        return Err(invalid("params.lags", "must be below n"));
    }
    let ens = stationary_paths(ctx, &phi, n, m)?;
    let theta = 2f64.sqrt().fract();
    let sys = RotationSystem::new(ctx.group, vec![(1.0, ctx.group.torus_character(vec![theta])?)])?;
    let x0 = start_point(ctx, &sys)?;
    let orbit = FinitePart::interval(0, n as i64)?;
    let mut out = Outcome::new(Table::new(&[
        "h",
        "target_re",
        "target_im",
        "ensemble_re",
        "ensemble_im",
        "ensemble_std_error",
        "time_mean_re",
        "time_mean_im",
        "time_across_path_sd",
        "rotation_orbit_re",
        "rotation_orbit_im",
    ]));
    let mut plot = Vec::new();
    for h in 0..=h_max {
        let g = lag(ctx.group, h as i64)?;
        let t = phi.eval(&g)?;
        let e = ensemble_correlation(&ens, &g)?;
        let (mean, sd, _) = time_averages(&ens, n, h)?;
        let o = rotation_orbit_average_over(&sys, &x0, &orbit, &g)?;
        let mut row = vec![json!(h)];
        row.extend(c(t));
        row.extend(c(e.value));
        row.push(num(e.std_error));
        row.extend(c(mean));
        row.push(num(sd));
        row.extend(c(o));
        out.table.push(row);
        plot.push(PlotRow {
            h: h as i64,
            target: Some(t.re),
            estimate_re: e.value.re,
            estimate_im: e.value.im,
            radius: Some(3.0 * e.std_error),
        });
    }
    out.plot = Some(plot);
    let (_, sd0, _) = time_averages(&ens, n, 0)?;
    out.put("time_average_sd_at_0", sd0);
    out.put("paths", m);
    out.put("n", n);
    out.put(
        "reading",
        "ensemble averages match phi while per-path time averages spread out; the rotation orbit average matches phi along one orbit",
    );
    Ok(out)
}

fn demo_product(ctx: &Ctx) -> Result<Outcome, CliError> {
    ctx.require_z()?;
    let group = ctx.group;
    let (phi_w, sys) = match &ctx.cfg.measure {
        Some(_) => {
            let nu = ctx.cfg.measure(group)?;
            let atom_mass: f64 = nu.atoms().iter().map(|(_, w)| w).sum();
            let cont_mass = 1.0 - atom_mass;
            if nu.atoms().is_empty() || cont_mass <= 0.0 {
                return Err(invalid("measure", "needs both atoms and a continuous part"));
            }
            let parts = nu.parts().iter().map(|(p, w)| (p.clone(), w / cont_mass)).collect();
            let cont = SpectralMeasure::new(group, vec![], parts)?;
            let phi_w = PosDefFn::sum_of(vec![(cont_mass, PosDefFn::FromMeasure(cont))])?;
            let sys = RotationSystem::new(group, nu.atoms().iter().map(|(c, w)| (*w, c.clone())).collect())?;
            (phi_w, sys)
        }
        None => (
            make_example("delta")?,
            RotationSystem::new(group, vec![(1.0, group.torus_character(vec![3f64.sqrt().fract()])?)])?,
        ),
    };
    let h_max = ctx.lags(8);
    let pts = window_points(group, h_max + 1)?;
    let cov = build_covariance_with_field(&phi_w, &pts, Field::Complex)?;
    let m = ctx.cfg.params.paths.unwrap_or(4000);
    let seed = ctx.seed()?;
    let ens = sample_paths(&cov, m, seed)?;
    let report = sum_representation_check(&ens, &phi_w, &sys, &pts, ctx.cfg.params.orbit_len.unwrap_or(10_000), &seed.substream(1 << 41))?;
    let mut out = Outcome::new(Table::new(&[
        "h",
        "target_re",
        "target_im",
        "product_re",
        "product_im",
        "product_std_error",
        "parts_re",
        "parts_im",
        "parts_std_error",
        "cross_term",
        "cross_limit",
        "ok",
    ]));
    let mut plot = Vec::new();
    for (i, r) in report.rows.iter().enumerate() {
        let mut row = vec![json!(r.lag[0])];
        row.extend(c(r.target));
        row.extend(c(r.product_estimate));
        row.push(num(r.product_std_error));
        row.extend(c(r.parts_estimate));
        row.push(num(r.parts_std_error));
        row.push(num(r.cross_term));
        row.push(num(r.cross_limit));
        row.push(json!(r.ok));
        out.table.push(row);
        plot.push(PlotRow {
            h: i as i64,
            target: Some(r.target.re),
            estimate_re: r.product_estimate.re,
            estimate_im: r.product_estimate.im,
            radius: Some(pdseq::realization::SUM_SE_BUDGET * r.product_std_error),
        });
    }
    out.plot = Some(plot);
    out.put("status", report.status);
    out.put("weak_mean", c(report.weak_mean));
    out.put("weak_mean_std_error", report.weak_mean_std_error);
    out.put("paths", m);
    if report.status == CheckStatus::Failed {
        out.exit_code = 3;
    }
    Ok(out)
}
