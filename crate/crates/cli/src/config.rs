//! Run configuration: a TOML document with top-level keys `group`,
//! `command`, `seed`, `measure` or `phi`, `params` and `out`.
//!
//! ```toml
//! group = "Z"
//! command = "estimate"
//! seed = 7
//!
//! [measure]
//! atoms = [{ at = [0.0], weight = 0.5 }, { at = [0.5], weight = 0.5 }]
//!
//! [params]
//! builder = "blocks"
//! n = 100000
//! block_length = 180
//! lags = 16
//!
//! [out]
//! structured = "report.json"
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use pdseq::posdef::{make_example, PosDefFn};
use pdseq::spectral::{Component, SpectralMeasure, TrigPolyDensity};
use pdseq::{Character, GroupDescriptor};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Total mass tolerance for measure specs.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckPd,
    GmscEnsemble,
    GmscPath,
    Rotation,
    BuildSeq,
    Estimate,
    Atoms,
    Realify,
    TilingsVerify,
    DemoEigenvalue,
    DemoProduct,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::CheckPd,
        Command::GmscEnsemble,
        Command::GmscPath,
        Command::Rotation,
        Command::BuildSeq,
        Command::Estimate,
        Command::Atoms,
        Command::Realify,
        Command::TilingsVerify,
        Command::DemoEigenvalue,
        Command::DemoProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckPd => "check-pd",
            Command::GmscEnsemble => "gmsc-ensemble",
            Command::GmscPath => "gmsc-path",
            Command::Rotation => "rotation",
            Command::BuildSeq => "build-seq",
            Command::Estimate => "estimate",
            Command::Atoms => "atoms",
            Command::Realify => "realify",
            Command::TilingsVerify => "tilings-verify",
            Command::DemoEigenvalue => "demo-eigenvalue",
            Command::DemoProduct => "demo-product",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// Torus point on `Z^d`, residues on `C(m)^L`.
    pub at: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartSpec {
    UniformBox { lo: Vec<f64>, hi: Vec<f64>, weight: f64 },
    TrigPoly { coefficients: Vec<CoefficientSpec>, weight: f64 },
    UniformDual { weight: f64 },
}

impl PartSpec {
    fn weight(&self) -> f64 {
        match self {
            PartSpec::UniformBox { weight, .. } | PartSpec::TrigPoly { weight, .. } | PartSpec::UniformDual { weight } => {
                *weight
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<PartSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub lag: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A catalog name or an explicit table of values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    Catalog(String),
    Table { table: Vec<TableEntry> },
}

/// Command parameters; each command reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Window size for `check-pd` and `gmsc-ensemble`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Sequence, path or orbit length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Largest lag.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lags: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    /// `real` or `complex`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// `tiled` or `blocks`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builder: Option<String>,
    /// `strict` or `practical`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Cube sides `L_k` of the tiling levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_length: Option<u64>,
    /// Explicit block lengths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub practical_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Sequence file to analyse instead of building one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Characters for `atoms`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<Vec<Vec<f64>>>,
    /// Half-width of the `tilings-verify` window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<i64>,
    /// Shift level 2 by one step (negative control).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_offset: Option<bool>,
    /// Orbit length used for the rotation mean in `demo-product`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_len: Option<usize>,
    /// Start point of the rotation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structured: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plotdata: Option<PathBuf>,
    /// Sequence or path data; `.bin` selects the binary format.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: String,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub out: OutSpec,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        CliError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let group = self.group_descriptor()?;
        if self.measure.is_some() && self.phi.is_some() {
            return Err(invalid("measure", "give either `measure` or `phi`, not both"));
        }
        if let Some(m) = &self.measure {
            let total: f64 = m.atoms.iter().map(|a| a.weight).sum::<f64>() + m.parts.iter().map(PartSpec::weight).sum::<f64>();
            if !((total - 1.0).abs() <= WEIGHT_TOL) {
                return Err(invalid("measure.weights", format!("weights sum to {total}, not 1")));
            }
            self.measure(group)?;
        }
        if let Some(p) = &self.phi {
            self.phi_from_spec(group, p)?;
        }
        let stochastic = !matches!(self.command, Command::CheckPd | Command::TilingsVerify)
            && !(matches!(self.command, Command::Estimate | Command::Atoms | Command::Realify) && self.params.input.is_some());
        if stochastic && self.seed.is_none() {
            return Err(invalid("seed", format!("`{}` is stochastic and needs a seed", self.command.name())));
        }
        if let Some(d) = self.params.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(invalid("params.delta", "must lie in (0, 1)"));
            }
        }
        if let Some(f) = &self.params.field {
            if f != "real" && f != "complex" {
                return Err(invalid("params.field", "expected `real` or `complex`"));
            }
        }
        if let Some(b) = &self.params.builder {
            if b != "tiled" && b != "blocks" {
                return Err(invalid("params.builder", "expected `tiled` or `blocks`"));
            }
        }
        if let Some(m) = &self.params.mode {
            if m != "strict" && m != "practical" {
                return Err(invalid("params.mode", "expected `strict` or `practical`"));
            }
        }
        Ok(())
    }

    pub fn group_descriptor(&self) -> Result<GroupDescriptor, CliError> {
        self.group.parse().map_err(|e: pdseq::Error| invalid("group", e.to_string()))
    }

    fn character(group: GroupDescriptor, at: &[f64]) -> Result<Character, CliError> {
        let chi = if group.is_lattice() {
            group.torus_character(at.to_vec())
        } else {
            if at.iter().any(|x| x.fract() != 0.0) {
                return Err(invalid("measure.atoms", "characters of C(m)^L are given by integer residues"));
            }
            group.residue_character(at.iter().map(|&x| x as i64).collect::<Vec<_>>())
        };
        chi.map_err(|e| invalid("measure.atoms", e.to_string()))
    }

    /// The spectral measure, with float drift below the tolerance removed.
    pub fn measure(&self, group: GroupDescriptor) -> Result<SpectralMeasure, CliError> {
        let spec = self.measure.as_ref().ok_or_else(|| invalid("measure", "this command needs a measure"))?;
        let total: f64 = spec.atoms.iter().map(|a| a.weight).sum::<f64>() + spec.parts.iter().map(PartSpec::weight).sum::<f64>();
        let atoms = spec
            .atoms
            .iter()
            .map(|a| Ok((Self::character(group, &a.at)?, a.weight / total)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let parts = spec
            .parts
            .iter()
            .map(|p| {
                Ok(match p {
                    PartSpec::UniformBox { lo, hi, weight } => (
                        Component::UniformBox {
                            lo: lo.clone(),
                            hi: hi.clone(),
                        },
                        weight / total,
                    ),
                    PartSpec::TrigPoly { coefficients, weight } => {
                        let terms = coefficients.iter().map(|c| (c.k.clone(), Complex64::new(c.re, c.im))).collect();
                        let dim = group.rank();
                        let d = TrigPolyDensity::new(dim, terms).map_err(|e| invalid("measure.parts", e.to_string()))?;
                        (Component::TrigPoly(d), weight / total)
                    }
                    PartSpec::UniformDual { weight } => (Component::UniformDual, weight / total),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        SpectralMeasure::new(group, atoms, parts).map_err(|e| invalid("measure", e.to_string()))
    }

    fn phi_from_spec(&self, group: GroupDescriptor, spec: &PhiSpec) -> Result<PosDefFn, CliError> {
        match spec {
            PhiSpec::Catalog(name) => {
                let phi = make_example(name).map_err(|e| invalid("phi", e.to_string()))?;
                if phi.group() != group {
                    return Err(invalid("phi", format!("catalog entry `{name}` lives on {}", phi.group())));
                }
                Ok(phi)
            }
            PhiSpec::Table { table } => PosDefFn::tabulated(
                group,
                table.iter().map(|e| (e.lag.clone(), Complex64::new(e.re, e.im))).collect(),
            )
            .map_err(|e| invalid("phi.table", e.to_string())),
        }
    }

    /// `φ` from `phi`, or the Fourier transform of `measure`.
    pub fn phi(&self, group: GroupDescriptor) -> Result<PosDefFn, CliError> {
        match (&self.phi, &self.measure) {
            (Some(p), _) => self.phi_from_spec(group, p),
            (None, Some(_)) => Ok(PosDefFn::FromMeasure(self.measure(group)?)),
            (None, None) => Err(invalid("phi", "this command needs `phi` or `measure`")),
        }
    }
}
