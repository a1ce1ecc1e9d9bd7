//! Subprocess and conventional dwell times.

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::potential::{BarrierSpec, PhysicalConstants};
use crate::quadrature::{relative_change, simpson_piecewise};
use crate::stationary::StationaryState;
use crate::subprocess::{reflection_point, transmission_point};
use crate::table::{Cell, Table};

/// Default Simpson panels per region.
pub const DEFAULT_PANELS: usize = 4096;
/// Smallest transmission for which quadrature dwell times are attempted.
pub const OPACITY_FLOOR: f64 = 1e-280;
/// Reflection at or below this is treated as zero (roundoff of a transparent barrier).
pub const REFLECTION_FLOOR: f64 = 1e-30;

/// Split of the dwell times over a double barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    pub tau1_tr: f64,
    pub tau_gap_tr: f64,
    pub tau2_tr: f64,
    pub tau1_ref: Option<f64>,
    pub tau_gap_ref: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellReport {
    pub k: f64,
    pub energy: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub tau_tr_dwell: f64,
    /// ln of `tau_tr_dwell`, from `ln T` rather than `T`.
    pub ln_tau_tr: f64,
    /// Absent when R is exactly zero.
    pub tau_ref_dwell: Option<f64>,
    pub tau_conventional: f64,
    pub i_tr: f64,
    pub i_ref: f64,
    pub i_inc: f64,
    pub partition: Option<Partition>,
}

/// Raw density integrals over a list of sub-intervals.
struct Densities {
    tr: Vec<f64>,
    rf: Vec<f64>,
    full: Vec<f64>,
}

fn densities(state: &StationaryState, tr_regions: &[(f64, f64)], ref_regions: &[(f64, f64)], panels: usize) -> Densities {
    let edges = state.basis.breakpoints();
    let mut interior = edges.clone();
    interior.push(state.amps.midpoint);
    let amps = &state.amps;
    let basis = &state.basis;
    let integrate = |f: &dyn Fn(f64) -> f64, regions: &[(f64, f64)]| -> Vec<f64> {
        regions
            .iter()
            .map(|&(lo, hi)| simpson_piecewise(f, lo, hi, &interior, panels))
            .collect()
    };
    Densities {
        tr: integrate(&|x| transmission_point(amps, basis, x).value.norm_sqr(), tr_regions),
        rf: integrate(&|x| reflection_point(amps, basis, x).value.norm_sqr(), ref_regions),
        full: integrate(&|x| state.full(x).value.norm_sqr(), tr_regions),
    }
}

fn check_state(state: &StationaryState) -> Result<()> {
    if state.amps.ln_transmission < OPACITY_FLOOR.ln() {
        return Err(Error::NumericallyOpaque {
            transmission: state.amps.ln_transmission.exp(),
        });
    }
    Ok(())
}

fn report(state: &StationaryState, constants: &PhysicalConstants, d: &Densities) -> DwellReport {
    let k = state.amps.k;
    let v = constants.velocity(k);
    let (t, r) = (state.amps.transmission, state.amps.reflection);
    let tr: f64 = d.tr.iter().sum();
    let rf: f64 = d.rf.iter().sum();
    let full: f64 = d.full.iter().sum();
    DwellReport {
        k,
        energy: constants.energy(k),
        transmission: t,
        reflection: r,
        tau_tr_dwell: tr / (t * v),
        ln_tau_tr: tr.ln() - state.amps.ln_transmission - v.ln(),
        tau_ref_dwell: (r > REFLECTION_FLOOR).then(|| rf / (r * v)),
        tau_conventional: full / v,
        i_tr: t * v,
        i_ref: r * v,
        i_inc: v,
        partition: None,
    }
}

pub fn dwell_numeric(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64) -> Result<DwellReport> {
    dwell_numeric_with(spec, constants, k, DEFAULT_PANELS)
}

pub fn dwell_numeric_with(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64, panels: usize) -> Result<DwellReport> {
    let state = StationaryState::new(spec, constants, k)?;
    dwell_from_state(&state, constants, panels)
}

pub fn dwell_from_state(state: &StationaryState, constants: &PhysicalConstants, panels: usize) -> Result<DwellReport> {
    check_state(state)?;
    let (a, xc, b) = (state.amps.left, state.amps.midpoint, state.amps.right);
    let d = densities(state, &[(a, b)], &[(a, xc)], panels);
    Ok(report(state, constants, &d))
}

/// Dwell times split over first barrier, gap and second barrier.
pub fn double_barrier_partition(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64) -> Result<DwellReport> {
    double_barrier_partition_with(spec, constants, k, DEFAULT_PANELS)
}

pub fn double_barrier_partition_with(
    spec: &BarrierSpec,
    constants: &PhysicalConstants,
    k: f64,
    panels: usize,
) -> Result<DwellReport> {
    let BarrierSpec::DoubleRectangular { barrier_width, .. } = *spec else {
        return Err(Error::InvalidParameter("partition needs a double_rectangular barrier".into()));
    };
    let state = StationaryState::new(spec, constants, k)?;
    check_state(&state)?;
    let (a, xc, b) = (spec.left(), spec.midpoint(), spec.right());
    let (e1, e2) = (a + barrier_width, b - barrier_width);
    let d = densities(&state, &[(a, e1), (e1, e2), (e2, b)], &[(a, e1), (e1, xc)], panels);
    let mut rep = report(&state, constants, &d);
    let (it, ir) = (rep.i_tr, rep.i_ref);
    let has_ref = rep.tau_ref_dwell.is_some();
    rep.partition = Some(Partition {
        tau1_tr: d.tr[0] / it,
        tau_gap_tr: d.tr[1] / it,
        tau2_tr: d.tr[2] / it,
        tau1_ref: has_ref.then(|| d.rf[0] / ir),
        tau_gap_ref: has_ref.then(|| d.rf[1] / ir),
    });
    Ok(rep)
}

/// Closed-form sub-barrier dwell times of a rectangular barrier of height
/// `v0` and width `d`: `(tau_tr, tau_ref, tau_conventional)`.
pub fn dwell_rect_closed(v0: f64, d: f64, constants: &PhysicalConstants, k: f64) -> Result<(f64, f64, f64)> {
    let e = constants.energy(k);
    if !(e < v0) {
        return Err(Error::EnergyAboveBarrier { energy: e, height: v0 });
    }
    let kappa = constants.decay_constant(v0 - e);
    let k0sq = constants.curvature_scale() * v0;
    let scale = constants.mass / constants.hbar;
    let kd = kappa * d;
    let tau_tr = scale / (2.0 * k * kappa.powi(3)) * ((kappa * kappa - k * k) * kd + k0sq * kd.sinh());
    let tau_ref = scale * k / kappa * (kd.sinh() - kd) / (kappa * kappa + k0sq * (0.5 * kd).sinh().powi(2));
    let tau_conv = scale * k / kappa * (2.0 * kd * (kappa * kappa - k * k) + k0sq * (2.0 * kd).sinh())
        / (4.0 * k * k * kappa * kappa + k0sq * k0sq * kd.sinh().powi(2));
    Ok((tau_tr, tau_ref, tau_conv))
}

/// Opaque-limit approximations for two barriers of height `ħ²κ0²/2m`,
/// width `d_bar` and gap `l`: `(tau1_tr, tau_gap_tr, tau_ref)`.
pub fn double_barrier_asymptotics(kappa0: f64, d_bar: f64, gap: f64, constants: &PhysicalConstants, k: f64) -> (f64, f64, f64) {
    let (m, hbar) = (constants.mass, constants.hbar);
    let grow = (2.0 * kappa0 * d_bar).exp();
    let tau1 = m / (4.0 * hbar * k * kappa0) * grow;
    let gap_t = m * kappa0 * kappa0 / (8.0 * hbar * k.powi(4)) * (k * gap - (k * gap).sin()) * grow;
    let tau_ref = 2.0 * m * k / (hbar * kappa0.powi(3));
    (tau1, gap_t, tau_ref)
}

/// Largest relative change of any reported time when the panel count doubles.
pub fn richardson_change(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64, panels: usize) -> Result<f64> {
    let state = StationaryState::new(spec, constants, k)?;
    let run = |n: usize| -> Result<DwellReport> {
        if matches!(spec, BarrierSpec::DoubleRectangular { .. }) {
            double_barrier_partition_with(spec, constants, k, n)
        } else {
            dwell_from_state(&state, constants, n)
        }
    };
    let (coarse, fine) = (run(panels)?, run(2 * panels)?);
    Ok(report_values(&coarse)
        .iter()
        .zip(report_values(&fine))
        .map(|(a, b)| relative_change(*a, b))
        .fold(0.0, f64::max))
}

fn report_values(r: &DwellReport) -> Vec<f64> {
    let mut v = vec![r.tau_tr_dwell, r.tau_conventional];
    v.extend(r.tau_ref_dwell);
    if let Some(p) = r.partition {
        v.extend([p.tau1_tr, p.tau_gap_tr, p.tau2_tr]);
        v.extend(p.tau1_ref);
        v.extend(p.tau_gap_ref);
    }
    v
}

/// Barrier families for parameter scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Single rectangle on `[0, d]`; the parameter is `d`.
    RectWidth { height: f64 },
    /// Double rectangle; the parameter is the gap `l`.
    DoubleGap { height: f64, barrier_width: f64 },
    /// Double rectangle; the parameter is `κ0 = sqrt(2 m V0)/ħ`.
    DoubleKappa0 { barrier_width: f64, gap: f64 },
}

impl Family {
    pub fn param_name(&self) -> &'static str {
        match self {
            Family::RectWidth { .. } => "d",
            Family::DoubleGap { .. } => "l",
            Family::DoubleKappa0 { .. } => "kappa0",
        }
    }

    pub fn spec(&self, param: f64, constants: &PhysicalConstants) -> BarrierSpec {
        match *self {
            Family::RectWidth { height } => BarrierSpec::rectangular(height, 0.0, param),
            Family::DoubleGap { height, barrier_width } => BarrierSpec::double_rectangular(height, barrier_width, param, 0.0),
            Family::DoubleKappa0 { barrier_width, gap } => {
                let height = param * param / constants.curvature_scale();
                BarrierSpec::double_rectangular(height, barrier_width, gap, 0.0)
            }
        }
    }
}

/// Evenly spaced sweep `name:start:stop:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Parse(format!("sweep '{text}' is not name:start:stop:count"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let start: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[2].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[3].trim().parse().map_err(|_| bad())?;
        let sweep = Self {
            name: parts[0].trim().to_string(),
            start,
            stop,
            count,
        };
        sweep.check()?;
        Ok(sweep)
    }

    pub fn check(&self) -> Result<()> {
        if self.count == 0 || !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Parse(format!("sweep {} is empty", self.name)));
        }
        if self.count > 1 && !(self.stop > self.start) {
            return Err(Error::Parse(format!("sweep {} must be increasing", self.name)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub param: f64,
    pub report: DwellReport,
}

pub fn hartman_scan(
    family: Family,
    constants: &PhysicalConstants,
    k: f64,
    params: &[f64],
    policy: ExecPolicy,
) -> Result<Vec<ScanRow>> {
    policy.try_map(params, |&param| {
        let spec = family.spec(param, constants);
        let report = match family {
            Family::RectWidth { .. } => dwell_numeric(&spec, constants, k)?,
            _ => double_barrier_partition(&spec, constants, k)?,
        };
        Ok(ScanRow { param, report })
    })
}

pub const SCAN_COLUMNS: [(&str, &str); 11] = [
    ("param_name", ""),
    ("param_value", ""),
    ("E", "energy"),
    ("k", "1/length"),
    ("tau_tr", "time"),
    ("tau_ref", "time"),
    ("tau_conventional", "time"),
    ("tau1_tr", "time"),
    ("tau_gap_tr", "time"),
    ("tau2_tr", "time"),
    ("log10_tau_tr", ""),
];

pub fn scan_table(name: &str, rows: &[ScanRow]) -> Table {
    let mut table = Table::new("dwell", &SCAN_COLUMNS);
    for row in rows {
        let r = &row.report;
        let p = r.partition;
        table.push(vec![
            Cell::from(name),
            Cell::Num(row.param),
            Cell::Num(r.energy),
            Cell::Num(r.k),
            Cell::Num(r.tau_tr_dwell),
            Cell::from(r.tau_ref_dwell),
            Cell::Num(r.tau_conventional),
            Cell::from(p.map(|p| p.tau1_tr)),
            Cell::from(p.map(|p| p.tau_gap_tr)),
            Cell::from(p.map(|p| p.tau2_tr)),
            Cell::Num(r.ln_tau_tr / std::f64::consts::LN_10),
        ]);
    }
    table
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Relative spread `(max - min)/min` of `ys` over the points whose parameter
/// lies in the last tenth of the sweep range.
pub fn final_decade_spread(xs: &[f64], ys: &[f64]) -> f64 {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let cut = hi - 0.1 * (hi - lo);
    let tail: Vec<f64> = xs.iter().zip(ys).filter(|(x, _)| **x >= cut).map(|(_, y)| *y).collect();
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    (max - min) / min
}
