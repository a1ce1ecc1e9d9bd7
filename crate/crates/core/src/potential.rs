//! Symmetric, finitely supported barrier potentials.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default symmetry tolerance for analytic barrier kinds.
pub const ANALYTIC_SYMMETRY_TOL: f64 = 1e-12;
/// Default symmetry tolerance for sampled potentials.
pub const SAMPLED_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hbar and mass must be positive (hbar = {hbar}, m = {mass})"
            )));
        }
        Ok(Self { hbar, mass })
    }

    /// k = sqrt(2 m E) / hbar.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        (2.0 * self.mass * energy).sqrt() / self.hbar
    }

    pub fn energy(&self, k: f64) -> f64 {
        self.hbar * self.hbar * k * k / (2.0 * self.mass)
    }

    /// Group velocity hbar k / m.
    pub fn velocity(&self, k: f64) -> f64 {
        self.hbar * k / self.mass
    }

    /// 2m / hbar^2, the factor turning (V - E) into u''/u.
    pub fn curvature_scale(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }

    /// sqrt(2 m V) / hbar for V >= 0.
    pub fn decay_constant(&self, height: f64) -> f64 {
        (self.curvature_scale() * height).sqrt()
    }
}

/// One constant-height slab, given by its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub length: f64,
    pub height: f64,
}

/// A constant-height slab with absolute endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub height: f64,
}

/// Potential sampled on a uniform grid with an even number of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPotential {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledPotential {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::Parse(format!(
                "sample columns differ in length ({} vs {})",
                xs.len(),
                values.len()
            )));
        }
        Ok(Self { xs, values })
    }

    /// Samples `f` on `intervals + 1` uniform nodes over `[left, right]`.
    pub fn from_fn(left: f64, right: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = (right - left) / intervals as f64;
        let xs: Vec<f64> = (0..=intervals)
            .map(|i| if i == intervals { right } else { left + i as f64 * h })
            .collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self { xs, values }
    }

    /// Reads a two-column `x,V` CSV. A header row and `#` comments are allowed.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Parse(format!("row {line}: expected two columns")));
            }
            let (x, v) = match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(x), Ok(v)) => (x, v),
                // tolerate a leading header row
                _ if line == 0 && xs.is_empty() => continue,
                _ => return Err(Error::Parse(format!("row {line}: non-numeric entry"))),
            };
            xs.push(x);
            values.push(v);
        }
        Self::new(xs, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(file)
    }

    pub fn step(&self) -> f64 {
        (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64
    }

    fn interpolate(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let t = (x - self.xs[0]) / self.step();
        let i = (t.floor().max(0.0) as usize).min(n - 1);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierSpec {
    Rectangular {
        height: f64,
        left: f64,
        right: f64,
    },
    /// Two identical slabs of width `barrier_width` separated by a field-free gap.
    DoubleRectangular {
        height: f64,
        barrier_width: f64,
        gap: f64,
        #[serde(default)]
        left: f64,
    },
    PiecewiseConstant {
        left: f64,
        segments: Vec<Segment>,
    },
    Sampled(SampledPotential),
}

impl BarrierSpec {
    pub fn rectangular(height: f64, left: f64, right: f64) -> Self {
        BarrierSpec::Rectangular { height, left, right }
    }

    pub fn double_rectangular(height: f64, barrier_width: f64, gap: f64, left: f64) -> Self {
        BarrierSpec::DoubleRectangular {
            height,
            barrier_width,
            gap,
            left,
        }
    }

    pub fn left(&self) -> f64 {
        match self {
            BarrierSpec::Rectangular { left, .. }
            | BarrierSpec::DoubleRectangular { left, .. }
            | BarrierSpec::PiecewiseConstant { left, .. } => *left,
            BarrierSpec::Sampled(s) => s.xs.first().copied().unwrap_or(0.0),
        }
    }

    pub fn right(&self) -> f64 {
        match self {
            BarrierSpec::Rectangular { right, .. } => *right,
            BarrierSpec::DoubleRectangular {
                barrier_width,
                gap,
                left,
                ..
            } => left + 2.0 * barrier_width + gap,
            BarrierSpec::PiecewiseConstant { left, segments } => {
                left + segments.iter().map(|s| s.length).sum::<f64>()
            }
            BarrierSpec::Sampled(s) => s.xs.last().copied().unwrap_or(0.0),
        }
    }

    pub fn width(&self) -> f64 {
        self.right() - self.left()
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left() + self.right())
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, BarrierSpec::Sampled(_))
    }

    pub fn default_tolerance(&self) -> f64 {
        if self.is_sampled() {
            SAMPLED_SYMMETRY_TOL
        } else {
            ANALYTIC_SYMMETRY_TOL
        }
    }

    /// Constant-height pieces covering `[a, b]`; `None` for sampled potentials.
    pub fn pieces(&self) -> Option<Vec<Piece>> {
        let mut out = Vec::new();
        let mut push = |start: f64, length: f64, height: f64| {
            out.push(Piece {
                start,
                end: start + length,
                height,
            });
            start + length
        };
        match self {
            BarrierSpec::Rectangular {
                height,
                left,
                right,
            } => {
                push(*left, right - left, *height);
            }
            BarrierSpec::DoubleRectangular {
                height,
                barrier_width,
                gap,
                left,
            } => {
                let x = push(*left, *barrier_width, *height);
                let x = if *gap > 0.0 { push(x, *gap, 0.0) } else { x };
                push(x, *barrier_width, *height);
            }
            BarrierSpec::PiecewiseConstant { left, segments } => {
                let mut x = *left;
                for s in segments {
                    x = push(x, s.length, s.height);
                }
            }
            BarrierSpec::Sampled(_) => return None,
        }
        // pin the last endpoint exactly to b
        let b = self.right();
        if let Some(last) = out.last_mut() {
            last.end = b;
        }
        Some(out)
    }

    /// Largest potential value on the support.
    pub fn max_height(&self) -> f64 {
        match self {
            BarrierSpec::Sampled(s) => s.values.iter().cloned().fold(0.0, f64::max),
            _ => self
                .pieces()
                .unwrap_or_default()
                .iter()
                .map(|p| p.height)
                .fold(0.0, f64::max),
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} is not finite")))
            }
        };
        match self {
            BarrierSpec::Rectangular {
                height,
                left,
                right,
            } => {
                finite(*height, "height")?;
                finite(*left, "left edge")?;
                finite(*right, "right edge")?;
                if !(right > left) {
                    return Err(Error::EmptySupport(format!("b = {right} <= a = {left}")));
                }
            }
            BarrierSpec::DoubleRectangular {
                height,
                barrier_width,
                gap,
                left,
            } => {
                finite(*height, "height")?;
                finite(*left, "left edge")?;
                if !(*barrier_width > 0.0 && barrier_width.is_finite()) {
                    return Err(Error::EmptySupport(format!(
                        "barrier width {barrier_width} must be positive"
                    )));
                }
                if !(*gap >= 0.0 && gap.is_finite()) {
                    return Err(Error::InvalidParameter(format!("gap {gap} must be >= 0")));
                }
            }
            BarrierSpec::PiecewiseConstant { left, segments } => {
                finite(*left, "left edge")?;
                if segments.is_empty() {
                    return Err(Error::EmptySupport("no segments".into()));
                }
                for (i, s) in segments.iter().enumerate() {
                    finite(s.height, "segment height")?;
                    if !(s.length > 0.0 && s.length.is_finite()) {
                        return Err(Error::EmptySupport(format!(
                            "segment {i} has non-positive length {}",
                            s.length
                        )));
                    }
                }
                let n = segments.len();
                let mut deviation: f64 = 0.0;
                for i in 0..n / 2 {
                    let (p, q) = (segments[i], segments[n - 1 - i]);
                    deviation = deviation
                        .max((p.height - q.height).abs())
                        .max((p.length - q.length).abs());
                }
                if deviation > tol {
                    return Err(Error::AsymmetricPotential { deviation, tol });
                }
            }
            BarrierSpec::Sampled(s) => {
                if s.xs.len() < 3 {
                    return Err(Error::EmptySupport(format!(
                        "{} samples; need at least 3",
                        s.xs.len()
                    )));
                }
                for (i, w) in s.xs.windows(2).enumerate() {
                    if !(w[1] > w[0]) {
                        return Err(Error::NonmonotonicGrid { index: i + 1 });
                    }
                }
                for v in &s.values {
                    finite(*v, "sample value")?;
                }
                let intervals = s.xs.len() - 1;
                if intervals % 2 != 0 {
                    return Err(Error::OddIntervalCount(intervals));
                }
                let h = s.step();
                let spacing_dev = s
                    .xs
                    .windows(2)
                    .map(|w| ((w[1] - w[0]) - h).abs())
                    .fold(0.0, f64::max);
                if spacing_dev > 1e-9 * h.max(1.0) {
                    return Err(Error::NonuniformGrid {
                        deviation: spacing_dev,
                    });
                }
                let deviation = (0..=intervals / 2)
                    .map(|i| (s.values[i] - s.values[intervals - i]).abs())
                    .fold(0.0, f64::max);
                if deviation > tol {
                    return Err(Error::AsymmetricPotential { deviation, tol });
                }
            }
        }
        Ok(())
    }

    /// V(x); exactly zero outside `[a, b]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let (a, b) = (self.left(), self.right());
        if !(x >= a && x <= b) {
            return 0.0;
        }
        match self {
            BarrierSpec::Rectangular { height, .. } => *height,
            BarrierSpec::Sampled(s) => s.interpolate(x),
            _ => {
                let pieces = self.pieces().unwrap_or_default();
                pieces
                    .iter()
                    .find(|p| x <= p.end)
                    .or(pieces.last())
                    .map_or(0.0, |p| p.height)
            }
        }
    }

    /// Samples this barrier onto a uniform grid with `intervals` (even) intervals over `[a, b]`.
    pub fn to_sampled(&self, intervals: usize) -> BarrierSpec {
        BarrierSpec::Sampled(SampledPotential::from_fn(
            self.left(),
            self.right(),
            intervals,
            |x| self.evaluate(x),
        ))
    }
}
