//! Complex sequences stored on a box window, with plain-text and binary
//! export.

use std::io::{self, BufRead, Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{BoxRegion, GroupDescriptor, GroupElement, FinitePart};

/// Values on a box window, stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSequence {
    window: BoxRegion,
    values: Vec<Complex64>,
    /// Per-point identifier of the random draw that produced the value
    /// (`u32::MAX` for deterministic fill), when known.
    draw_ids: Option<Vec<u32>>,
}

/// Marker for points not produced by a random draw.
pub const NO_DRAW: u32 = u32::MAX;

impl ComplexSequence {
    pub fn new(window: BoxRegion, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("{} values for a window of {} points", values.len(), window.len()),
            });
        }
        Ok(ComplexSequence {
            window,
            values,
            draw_ids: None,
        })
    }

    /// A sequence on `[0, N)` in `Z`.
    pub fn from_vec(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len() as i64;
        if n == 0 {
            return Err(Error::EmptySet("sequence"));
        }
        let window = BoxRegion::new(GroupDescriptor::integers(), vec![0], vec![n])?;
        ComplexSequence::new(window, values)
    }

    pub fn with_draw_ids(mut self, ids: Vec<u32>) -> Result<Self> {
        if ids.len() != self.values.len() {
            return Err(Error::InvalidParameter {
                name: "draw_ids",
                reason: "length differs from the value count".into(),
            });
        }
        self.draw_ids = Some(ids);
        Ok(self)
    }

    pub fn group(&self) -> GroupDescriptor {
        self.window.group()
    }

    pub fn window(&self) -> &BoxRegion {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn draw_ids(&self) -> Option<&[u32]> {
        self.draw_ids.as_deref()
    }

    pub fn get_coords(&self, coords: &[i64]) -> Option<Complex64> {
        self.window.index_of(coords).map(|i| self.values[i])
    }

    pub fn get(&self, g: &GroupElement) -> Option<Complex64> {
        if g.group() != self.group() {
            return None;
        }
        self.get_coords(g.coords())
    }

    /// Largest deviation of `|value|` from 1.
    pub fn max_modulus_error(&self) -> f64 {
        self.values.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Window as a finite part.
    pub fn support(&self) -> FinitePart {
        FinitePart::from_box(self.window.clone())
    }

    /// One line per point: coordinates, real part, imaginary part, separated
    /// by tabs. Floats use the shortest round-trip representation.
    pub fn write_columns<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            for c in self.window.coords_at(i) {
                write!(out, "{c}\t")?;
            }
            writeln!(out, "{}\t{}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the column format back for a sequence on `Z`. Lines starting
    /// with `#` are skipped; indices must be consecutive.
    pub fn read_columns<R: BufRead>(input: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut start = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidParameter {
                name: "input",
                reason: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::InvalidParameter {
                name: "input",
                reason: format!("line {}: {what}", lineno + 1),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad("expected `index re im`"));
            }
            let idx: i64 = fields[0].parse().map_err(|_| bad("bad index"))?;
            let re: f64 = fields[1].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = fields[2].parse().map_err(|_| bad("bad imaginary part"))?;
            let first = *start.get_or_insert(idx);
            if idx != first + values.len() as i64 {
                return Err(bad("indices must be consecutive"));
            }
            values.push(Complex64::new(re, im));
        }
        let Some(first) = start else {
            return Err(Error::EmptySet("sequence"));
        };
        let n = values.len() as i64;
        let window = BoxRegion::new(GroupDescriptor::integers(), vec![first], vec![first + n])?;
        ComplexSequence::new(window, values)
    }

    /// Little-endian `(re, im)` float64 pairs in window order.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        for v in &self.values {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`write_binary`](Self::write_binary) for a known window.
    pub fn read_binary<R: Read>(window: BoxRegion, mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes).map_err(|e| Error::InvalidParameter {
            name: "input",
            reason: e.to_string(),
        })?;
        if bytes.len() != 16 * window.len() {
            return Err(Error::InvalidParameter {
                name: "input",
                reason: format!("{} bytes for a window of {} points", bytes.len(), window.len()),
            });
        }
        let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
        let values = bytes.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
        ComplexSequence::new(window, values)
    }
}
