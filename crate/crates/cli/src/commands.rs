use tunnelsplit::dwell::{self, hartman_scan, scan_table, Family, Sweep};
use tunnelsplit::stationary::{energy_sweep, SWEEP_COLUMNS};
use tunnelsplit::subprocess::profile_table;
use tunnelsplit::twoslit::{slice_table, two_slit_field, SlitGeometry, YGrid};
use tunnelsplit::wavepacket::{series_table, snapshot_table, t_deviation_scan, time_grid, SpectralPacket, Synthesizer, XGrid};
use tunnelsplit::{BarrierSpec, Cell, Error, Result, StationaryState, Table};

use crate::config::{require, Knobs};
use crate::Output;

fn sweep_named(knobs: &Knobs, allowed: &[&str]) -> Result<Option<Sweep>> {
    let Some(text) = &knobs.sweep else { return Ok(None) };
    let sweep = Sweep::parse(text)?;
    if !allowed.contains(&sweep.name.as_str()) {
        return Err(Error::Parse(format!(
            "sweep variable '{}' not supported here (expected one of {allowed:?})",
            sweep.name
        )));
    }
    Ok(Some(sweep))
}

pub fn stationary(knobs: &Knobs, out: &Output) -> Result<()> {
    let spec = knobs.barrier_spec()?;
    let c = knobs.constants()?;
    let energies = match sweep_named(knobs, &["E"])? {
        Some(s) => s.values(),
        None => vec![knobs.energy()?],
    };
    let rows = energy_sweep(&spec, &c, &energies, out.policy)?;
    let cols: Vec<(&str, &str)> = SWEEP_COLUMNS.iter().map(|n| (*n, "")).collect();
    let mut table = Table::new("stationary", &cols);
    for row in &rows {
        table.push(row.values().iter().map(|v| Cell::Num(*v)).collect());
    }
    out.emit("stationary", &table)
}

pub fn subprocess(knobs: &Knobs, out: &Output) -> Result<()> {
    let spec = knobs.barrier_spec()?;
    let c = knobs.constants()?;
    let state = StationaryState::from_energy(&spec, &c, knobs.energy()?)?;
    let (a, b, w) = (spec.left(), spec.right(), spec.width());
    let lo = knobs.x_min.unwrap_or(a - 2.0 * w);
    let hi = knobs.x_max.unwrap_or(b + 2.0 * w);
    let n = knobs.points.unwrap_or(401).max(2);
    if !(hi > lo) {
        return Err(Error::Parse("profile window must have x_max > x_min".into()));
    }
    let mut xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    // keep the joining points on the profile
    for x in [a, spec.midpoint(), b] {
        if x > lo && x < hi && !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);
    out.emit("subprocess", &profile_table(&state, &c, &xs, out.policy)?)
}

pub fn dwell(knobs: &Knobs, out: &Output) -> Result<()> {
    let spec = knobs.barrier_spec()?;
    let c = knobs.constants()?;
    let e = knobs.energy()?;
    let k = c.wavenumber(e);
    if !(k > 0.0) {
        return Err(Error::NonpositiveWavenumber(k));
    }
    let panels = knobs.panels.unwrap_or(dwell::DEFAULT_PANELS);
    let report = match spec {
        BarrierSpec::DoubleRectangular { .. } => dwell::double_barrier_partition_with(&spec, &c, k, panels)?,
        _ => dwell::dwell_numeric_with(&spec, &c, k, panels)?,
    };
    let closed = match spec {
        BarrierSpec::Rectangular { height, .. } if e < height => Some(dwell::dwell_rect_closed(height, spec.width(), &c, k)?),
        _ => None,
    };
    let mut table = Table::new(
        "dwell",
        &[
            ("E", "energy"),
            ("k", "1/length"),
            ("T", ""),
            ("R", ""),
            ("tau_tr", "time"),
            ("tau_ref", "time"),
            ("tau_conventional", "time"),
            ("tau_tr_closed", "time"),
            ("tau_ref_closed", "time"),
            ("tau_conventional_closed", "time"),
            ("tau1_tr", "time"),
            ("tau_gap_tr", "time"),
            ("tau2_tr", "time"),
        ],
    );
    let p = report.partition;
    table.push(vec![
        Cell::Num(report.energy),
        Cell::Num(report.k),
        Cell::Num(report.transmission),
        Cell::Num(report.reflection),
        Cell::Num(report.tau_tr_dwell),
        Cell::from(report.tau_ref_dwell),
        Cell::Num(report.tau_conventional),
        Cell::from(closed.map(|c| c.0)),
        Cell::from(closed.map(|c| c.1)),
        Cell::from(closed.map(|c| c.2)),
        Cell::from(p.map(|p| p.tau1_tr)),
        Cell::from(p.map(|p| p.tau_gap_tr)),
        Cell::from(p.map(|p| p.tau2_tr)),
    ]);
    out.emit("dwell", &table)
}

pub fn hartman(knobs: &Knobs, out: &Output) -> Result<()> {
    let c = knobs.constants()?;
    let k = c.wavenumber(knobs.energy()?);
    let sweep = sweep_named(knobs, &["d", "l", "kappa0"])?.ok_or_else(|| Error::Parse("missing --sweep".into()))?;
    let family = match (knobs.barrier_kind(), sweep.name.as_str()) {
        ("rect" | "rectangular", "d") => Family::RectWidth {
            height: require(knobs.v0, "V0")?,
        },
        ("double", "l") => Family::DoubleGap {
            height: require(knobs.v0, "V0")?,
            barrier_width: require(knobs.d, "d")?,
        },
        ("double", "kappa0") => Family::DoubleKappa0 {
            barrier_width: require(knobs.d, "d")?,
            gap: require(knobs.gap, "gap")?,
        },
        (kind, name) => {
            return Err(Error::Parse(format!("sweep '{name}' is not defined for barrier '{kind}'")));
        }
    };
    let rows = hartman_scan(family, &c, k, &sweep.values(), out.policy)?;
    out.emit("hartman", &scan_table(family.param_name(), &rows))
}

pub fn packet(knobs: &Knobs, out: &Output) -> Result<()> {
    let spec = knobs.barrier_spec()?;
    let c = knobs.constants()?;
    let k0 = c.wavenumber(knobs.energy()?);
    let nodes = knobs.nodes.unwrap_or(tunnelsplit::wavepacket::DEFAULT_NODES);
    let sigma_k = match knobs.sigma_x {
        Some(sx) => 0.5 / sx,
        None => knobs.sigma_k_frac.unwrap_or(0.05) * k0,
    };
    let packet = SpectralPacket::gaussian_left_of(k0, sigma_k, spec.left(), nodes)?;
    let (x0, sx) = (packet.x0, packet.sigma_x());
    let v0 = c.velocity(k0);
    let t_end = knobs.t_end.unwrap_or(2.0 * (spec.right() - x0) / v0);
    // room for both outgoing packets at t_end, with their spread
    let reach = v0 * t_end + 6.0 * sx + 6.0 * sigma_k * t_end * c.hbar / c.mass;
    let grid = XGrid::for_barrier(&spec, spec.left() - reach, spec.right() + reach, knobs.dx.unwrap_or(0.05))?;
    let synth = Synthesizer::new(&spec, &c, packet, grid, out.policy)?;
    let times = time_grid(0.0, t_end, knobs.steps.unwrap_or(200));
    let report = t_deviation_scan(&synth, &times)?;
    out.emit("packet", &series_table(&report.series))?;
    if let Some(t) = knobs.snapshot {
        out.emit("packet_snapshot", &snapshot_table(&synth.state_at(t)?))?;
    }
    Ok(())
}

pub fn twoslit(knobs: &Knobs, out: &Output) -> Result<()> {
    let separation = require(knobs.separation, "separation")?;
    let width = require(knobs.slit_width, "slit-width")?;
    let k = require(knobs.wavenumber, "wavenumber")?;
    let planes = knobs.plane_list()?;
    let geom = SlitGeometry::new(0.5 * separation, width, planes[0], k)?;
    let half = knobs.half_width.unwrap_or(separation + 10.0 * width);
    let grid = YGrid::with_spacing(half, knobs.dy.unwrap_or(width / 20.0))?;
    for (i, &x) in planes.iter().enumerate() {
        let field = two_slit_field(&geom, x, &grid, out.policy)?;
        let name = if i == 0 { "twoslit".to_string() } else { format!("twoslit_x{x}") };
        out.emit(&name, &slice_table(&field)?)?;
    }
    Ok(())
}
