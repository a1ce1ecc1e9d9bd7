use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use tunnelsplit::{BarrierSpec, Error, PhysicalConstants, Result, SampledPotential, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Numeric and geometric knobs shared by every subcommand. Each one may also
/// appear as a top-level key in the TOML config (same name, underscores).
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Barrier kind: rect, double, piecewise or sampled.
    #[arg(long)]
    pub barrier: Option<String>,
    /// Barrier height.
    #[arg(long = "V0")]
    #[serde(rename = "V0")]
    pub v0: Option<f64>,
    /// Barrier width (each barrier, for `double`).
    #[arg(long)]
    pub d: Option<f64>,
    /// Left edge of the barrier [default: 0].
    #[arg(long)]
    pub a: Option<f64>,
    /// Gap between the two barriers of `double`.
    #[arg(long)]
    pub gap: Option<f64>,
    /// Piecewise slabs as `length:height,length:height,...`.
    #[arg(long)]
    pub segments: Option<String>,
    /// CSV file with `x,V` columns for `sampled`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Energy.
    #[arg(long = "E")]
    #[serde(rename = "E")]
    pub e: Option<f64>,
    /// Sweep `name:start:stop:count`.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Simpson panels per region for dwell integrals [default: 4096].
    #[arg(long)]
    pub panels: Option<usize>,
    /// Profile window for `subprocess` [default: a - 2d .. b + 2d].
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Sample count for `subprocess` profiles [default: 401].
    #[arg(long)]
    pub points: Option<usize>,
    /// Packet width in k as a fraction of k0 [default: 0.05].
    #[arg(long)]
    pub sigma_k_frac: Option<f64>,
    /// Packet width in x; overrides --sigma-k-frac.
    #[arg(long)]
    pub sigma_x: Option<f64>,
    /// Spectral nodes [default: 512].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// x spacing for packet synthesis [default: 0.05].
    #[arg(long)]
    pub dx: Option<f64>,
    /// End of the time window [default: twice the arrival time].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Time steps [default: 200].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Also write the packet fields at this time.
    #[arg(long)]
    pub snapshot: Option<f64>,
    /// Centre-to-centre slit separation (2 a_s).
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub slit_width: Option<f64>,
    /// Detector-plane distance.
    #[arg(long)]
    pub distance: Option<f64>,
    #[arg(long)]
    pub wavenumber: Option<f64>,
    /// Extra planes, comma separated [default: the detector plane only].
    #[arg(long)]
    pub planes: Option<String>,
    /// Half-width of the y window [default: separation + 10 slit widths].
    #[arg(long)]
    pub half_width: Option<f64>,
    /// y spacing [default: slit width / 20].
    #[arg(long)]
    pub dy: Option<f64>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl Knobs {
    /// Values present in `file` replace the ones given as flags.
    pub fn overlay(&mut self, file: &Knobs) {
        overlay!(
            self, file, barrier, v0, d, a, gap, segments, samples, e, sweep, hbar, mass, panels, x_min, x_max, points,
            sigma_k_frac, sigma_x, nodes, dx, t_end, steps, snapshot, separation, slit_width, distance, wavenumber,
            planes, half_width, dy
        );
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        PhysicalConstants::new(self.hbar.unwrap_or(1.0), self.mass.unwrap_or(1.0))
    }

    pub fn energy(&self) -> Result<f64> {
        require(self.e, "E")
    }

    pub fn barrier_kind(&self) -> &str {
        self.barrier.as_deref().unwrap_or("rect")
    }

    pub fn barrier_spec(&self) -> Result<BarrierSpec> {
        let left = self.a.unwrap_or(0.0);
        let spec = match self.barrier_kind() {
            "rect" | "rectangular" => {
                let d = require(self.d, "d")?;
                BarrierSpec::rectangular(require(self.v0, "V0")?, left, left + d)
            }
            "double" => BarrierSpec::double_rectangular(
                require(self.v0, "V0")?,
                require(self.d, "d")?,
                require(self.gap, "gap")?,
                left,
            ),
            "piecewise" => BarrierSpec::PiecewiseConstant {
                left,
                segments: parse_segments(self.segments.as_deref().ok_or_else(|| missing("segments"))?)?,
            },
            "sampled" => {
                let path = self.samples.as_ref().ok_or_else(|| missing("samples"))?;
                BarrierSpec::Sampled(SampledPotential::from_csv_path(path)?)
            }
            other => return Err(Error::Parse(format!("unknown barrier kind '{other}'"))),
        };
        spec.validate(spec.default_tolerance())?;
        Ok(spec)
    }

    pub fn plane_list(&self) -> Result<Vec<f64>> {
        let mut planes = vec![require(self.distance, "distance")?];
        if let Some(text) = &self.planes {
            for part in text.split(',').filter(|p| !p.trim().is_empty()) {
                let x: f64 = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad plane '{part}'")))?;
                if !planes.contains(&x) {
                    planes.push(x);
                }
            }
        }
        Ok(planes)
    }
}

fn missing(name: &str) -> Error {
    Error::Parse(format!("missing --{name}"))
}

pub fn require(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| missing(name))
}

fn parse_segments(text: &str) -> Result<Vec<Segment>> {
    text.split(',')
        .map(|part| {
            let (l, h) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("segment '{part}' is not length:height")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number in '{part}'")));
            Ok(Segment {
                length: num(l)?,
                height: num(h)?,
            })
        })
        .collect()
}

/// Output settings that may also come from the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub no_header_meta: Option<bool>,
    pub gnuplot: Option<bool>,
    pub sequential: Option<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    pub output: OutputConfig,
    pub knobs: Knobs,
}

const OUTPUT_KEYS: [&str; 5] = ["out_dir", "format", "no_header_meta", "gnuplot", "sequential"];

pub fn read_config(path: &Path) -> Result<FileConfig> {
    let bad = |e: toml::de::Error| Error::Parse(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path)?;
    let mut table: toml::Table = toml::from_str(&text).map_err(bad)?;
    let mut output = toml::Table::new();
    for key in OUTPUT_KEYS {
        if let Some(v) = table.remove(key) {
            output.insert(key.to_string(), v);
        }
    }
    Ok(FileConfig {
        output: output.try_into().map_err(bad)?,
        knobs: table.try_into().map_err(bad)?,
    })
}
