//! Time-dependent packets by spectral synthesis over stationary states.
//!
//! Each field is `(2π)^{-1/2} Σ_j w_j A(k_j) φ(x; k_j) e^{-i E_j t/ħ}` with
//! `φ` one of the full state, the transmission wave or the reflection wave.
//! With `Σ w |A|² = 1` the full packet has unit norm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::potential::{BarrierSpec, PhysicalConstants};
use crate::quadrature::sorted_breaks;
use crate::stationary::{StationaryState, WavePoint};
use crate::subprocess::{reflection_point, transmission_point, Channel};
use crate::table::{Cell, Table};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default number of k nodes.
pub const DEFAULT_NODES: usize = 512;
/// Spectral support half-width in units of `sigma_k`.
pub const TRUNCATION: f64 = 5.0;
/// Largest norm fraction allowed outside the x window.
pub const LEAK_LIMIT: f64 = 1e-3;
/// Largest norm shift allowed when the k nodes are doubled.
pub const SPECTRAL_SHIFT_LIMIT: f64 = 1e-6;

/// Gaussian spectrum on a uniform, truncated k grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPacket {
    pub k0: f64,
    pub sigma_k: f64,
    pub x0: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl SpectralPacket {
    /// `A(k) ∝ exp(-(k-k0)²/4σ_k²) e^{-ik x0}` on `|k - k0| ≤ 5σ_k`, `k > 0`,
    /// with trapezoid weights.
    pub fn gaussian(k0: f64, sigma_k: f64, x0: f64, nodes: usize) -> Result<Self> {
        if !(k0 > 0.0 && sigma_k > 0.0 && x0.is_finite()) || nodes < 3 {
            return Err(Error::InvalidParameter(format!(
                "packet needs k0 > 0, sigma_k > 0 and at least 3 nodes (k0 = {k0}, sigma_k = {sigma_k}, nodes = {nodes})"
            )));
        }
        let lo = (k0 - TRUNCATION * sigma_k).max(1e-3 * sigma_k);
        let hi = k0 + TRUNCATION * sigma_k;
        let dk = (hi - lo) / (nodes - 1) as f64;
        let ks: Vec<f64> = (0..nodes).map(|j| lo + dk * j as f64).collect();
        let weights: Vec<f64> = (0..nodes)
            .map(|j| if j == 0 || j + 1 == nodes { 0.5 * dk } else { dk })
            .collect();
        let raw: Vec<Complex64> = ks
            .iter()
            .map(|&k| Complex64::from_polar((-(k - k0).powi(2) / (4.0 * sigma_k * sigma_k)).exp(), -k * x0))
            .collect();
        let norm: f64 = raw.iter().zip(&weights).map(|(a, w)| w * a.norm_sqr()).sum();
        let s = norm.sqrt();
        Ok(Self {
            k0,
            sigma_k,
            x0,
            nodes: ks,
            weights,
            amplitudes: raw.into_iter().map(|a| a / s).collect(),
        })
    }

    /// Packet whose 5σ_x tail sits at the left barrier edge `a` at t = 0.
    pub fn gaussian_left_of(k0: f64, sigma_k: f64, a: f64, nodes: usize) -> Result<Self> {
        Self::gaussian(k0, sigma_k, a - TRUNCATION / (2.0 * sigma_k), nodes)
    }

    pub fn sigma_x(&self) -> f64 {
        0.5 / self.sigma_k
    }

    pub fn dk(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w |A|²`.
    pub fn norm(&self) -> f64 {
        self.weights.iter().zip(&self.amplitudes).map(|(w, a)| w * a.norm_sqr()).sum()
    }

    /// `Σ w |A|² f(k)`.
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.amplitudes)
            .map(|((&k, w), a)| w * a.norm_sqr() * f(k))
            .sum()
    }

    /// Same spectrum with `2n - 1` nodes on the same support.
    pub fn refined(&self) -> Result<Self> {
        Self::gaussian(self.k0, self.sigma_k, self.x0, 2 * self.len() - 1)
    }
}

/// Uniform Simpson segments joined at fixed breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct XGrid {
    pub nodes: Vec<f64>,
    /// Inclusive node ranges of the segments; neighbours share an end node.
    segments: Vec<(usize, usize)>,
}

impl XGrid {
    /// Nodes on `[lo, hi]` with spacing at most `spacing`; every breakpoint inside
    /// the window is a node and a segment edge.
    pub fn new(lo: f64, hi: f64, spacing: f64, breaks: &[f64]) -> Result<Self> {
        if !(hi > lo && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("bad x window [{lo}, {hi}] / spacing {spacing}")));
        }
        let mut all = vec![lo, hi];
        all.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
        let pts = sorted_breaks(&all);
        let mut nodes = vec![pts[0]];
        let mut segments = Vec::new();
        for w in pts.windows(2) {
            let mut n = ((w[1] - w[0]) / spacing).ceil().max(2.0) as usize;
            n += n % 2;
            let start = nodes.len() - 1;
            let h = (w[1] - w[0]) / n as f64;
            for i in 1..n {
                nodes.push(w[0] + h * i as f64);
            }
            nodes.push(w[1]);
            segments.push((start, nodes.len() - 1));
        }
        Ok(Self { nodes, segments })
    }

    /// Grid that carries `a`, `x_c`, `b` and every slab edge as breakpoints.
    pub fn for_barrier(spec: &BarrierSpec, lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(lo < spec.left() && hi > spec.right()) {
            return Err(Error::InvalidParameter(format!(
                "x window [{lo}, {hi}] must contain the barrier [{}, {}]",
                spec.left(),
                spec.right()
            )));
        }
        let mut breaks = vec![spec.left(), spec.midpoint(), spec.right()];
        if let Some(ps) = spec.pieces() {
            breaks.extend(ps.iter().map(|p| p.start));
        }
        Self::new(lo, hi, spacing, &breaks)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&n| n == x)
    }

    /// Simpson integral of `f(i, left_side)`; `left_side` says which one-sided
    /// value to use at a segment end.
    pub fn integrate(&self, f: impl Fn(usize, bool) -> f64) -> f64 {
        let mut total = 0.0;
        for &(s, e) in &self.segments {
            let n = e - s;
            let h = (self.nodes[e] - self.nodes[s]) / n as f64;
            let mut acc = f(s, false) + f(e, true);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(s + i, false);
            }
            total += acc * h / 3.0;
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct KTerm {
    full: WavePoint,
    tr: WavePoint,
    rf: WavePoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Region {
    Left,
    Interior(usize),
    Right,
}

/// Complex fields with one-sided derivatives at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub full: Vec<WavePoint>,
    pub tr: Vec<WavePoint>,
    pub rf: Vec<WavePoint>,
}

/// Norms and expectation values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketMoments {
    pub t: f64,
    pub norm_full: f64,
    pub t_norm: f64,
    pub r_norm: f64,
    pub overlap_re: f64,
    pub x_mean_tr: f64,
    pub p_mean_tr: f64,
    pub x_mean_ref: f64,
    pub p_mean_ref: f64,
    /// Transmission-channel current just left and just right of `x_c`.
    pub j_tr_left: f64,
    pub j_tr_right: f64,
}

impl PacketMoments {
    pub fn x_mean(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Transmission => self.x_mean_tr,
            Channel::Reflection => self.x_mean_ref,
        }
    }

    pub fn p_mean(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Transmission => self.p_mean_tr,
            Channel::Reflection => self.p_mean_ref,
        }
    }

    pub fn channel_norm(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Transmission => self.t_norm,
            Channel::Reflection => self.r_norm,
        }
    }

    /// `|T_t - (1 - R_t)| / (1 - R_t)`.
    pub fn deviation(&self) -> f64 {
        (self.t_norm - (1.0 - self.r_norm)).abs() / (1.0 - self.r_norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketState {
    pub moments: PacketMoments,
    pub x: Vec<f64>,
    pub psi_full: Vec<Complex64>,
    pub psi_tr: Vec<Complex64>,
    pub psi_ref: Vec<Complex64>,
}

/// Stationary data at every k node, precomputed for one x grid.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    pub constants: PhysicalConstants,
    pub packet: SpectralPacket,
    pub grid: XGrid,
    pub policy: ExecPolicy,
    left: f64,
    width: f64,
    xc_index: usize,
    energy: Vec<f64>,
    base: Vec<Complex64>,
    a_out: Vec<Complex64>,
    b_out: Vec<Complex64>,
    a_tr: Vec<Complex64>,
    a_ref: Vec<Complex64>,
    region: Vec<Region>,
    interior: Vec<Vec<KTerm>>,
}

impl Synthesizer {
    pub fn new(
        spec: &BarrierSpec,
        constants: &PhysicalConstants,
        packet: SpectralPacket,
        grid: XGrid,
        policy: ExecPolicy,
    ) -> Result<Self> {
        let (a, b, xc) = (spec.left(), spec.right(), spec.midpoint());
        let xc_index = grid
            .index_of(xc)
            .ok_or_else(|| Error::InvalidParameter("x grid must contain the barrier midpoint".into()))?;
        let span = grid.nodes[grid.len() - 1] - grid.nodes[0];
        let period = 2.0 * PI / packet.dk();
        if span + (packet.x0 - grid.nodes[0]).abs() > period {
            return Err(Error::InvalidParameter(format!(
                "k spacing {} repeats the packet every {period}, shorter than the x window",
                packet.dk()
            )));
        }
        let states = policy.try_map(&packet.nodes, |&k| StationaryState::new(spec, constants, k))?;

        let region: Vec<Region> = {
            let mut count = 0;
            grid.nodes
                .iter()
                .map(|&x| {
                    if x <= a {
                        Region::Left
                    } else if x >= b {
                        Region::Right
                    } else {
                        count += 1;
                        Region::Interior(count - 1)
                    }
                })
                .collect()
        };
        let inner_x: Vec<f64> = grid
            .nodes
            .iter()
            .zip(&region)
            .filter(|(_, r)| matches!(r, Region::Interior(_)))
            .map(|(&x, _)| x)
            .collect();
        let interior = policy.map(&inner_x, |&x| {
            states
                .iter()
                .map(|s| KTerm {
                    full: s.full(x),
                    tr: transmission_point(&s.amps, &s.basis, x),
                    rf: reflection_point(&s.amps, &s.basis, x),
                })
                .collect::<Vec<_>>()
        });

        let norm = (2.0 * PI).sqrt().recip();
        let base = packet
            .weights
            .iter()
            .zip(&packet.amplitudes)
            .map(|(w, a)| a * (w * norm))
            .collect();
        Ok(Self {
            constants: *constants,
            energy: packet.nodes.iter().map(|&k| constants.energy(k)).collect(),
            base,
            a_out: states.iter().map(|s| s.amps.a_out).collect(),
            b_out: states.iter().map(|s| s.amps.b_out).collect(),
            a_tr: states.iter().map(|s| s.amps.a_in_tr).collect(),
            a_ref: states.iter().map(|s| s.amps.a_in_ref).collect(),
            packet,
            grid,
            policy,
            left: a,
            width: b - a,
            xc_index,
            region,
            interior,
        })
    }

    fn coefficients(&self, t: f64) -> Vec<Complex64> {
        let hbar = self.constants.hbar;
        self.base
            .iter()
            .zip(&self.energy)
            .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t / hbar))
            .collect()
    }

    /// `Σ_j c_j e^{i k_j y}` style sums use a phasor recurrence in j, reseeded
    /// every 32 nodes.
    fn phasors(&self, y: f64) -> impl Iterator<Item = Complex64> + '_ {
        let k = &self.packet.nodes;
        let step = Complex64::from_polar(1.0, self.packet.dk() * y);
        let mut cur = Complex64::from_polar(1.0, k[0] * y);
        (0..k.len()).map(move |j| {
            if j > 0 {
                cur = if j % 32 == 0 { Complex64::from_polar(1.0, k[j] * y) } else { cur * step };
            }
            cur
        })
    }

    fn node_fields(&self, i: usize, c: &[Complex64]) -> (WavePoint, WavePoint, WavePoint) {
        let x = self.grid.nodes[i];
        let k = &self.packet.nodes;
        match self.region[i] {
            Region::Left => {
                let mirror = 2.0 * self.left - x;
                let (mut f, mut df, mut t, mut dt, mut r, mut dr) = (ZERO, ZERO, ZERO, ZERO, ZERO, ZERO);
                for (j, (e, m)) in self.phasors(x).zip(self.phasors(mirror)).enumerate() {
                    let ik = I * k[j];
                    let inc = c[j] * e;
                    let refl = c[j] * self.b_out[j] * m;
                    f += inc + refl;
                    df += ik * (inc - refl);
                    let ti = inc * self.a_tr[j];
                    t += ti;
                    dt += ik * ti;
                    let ri = inc * self.a_ref[j];
                    r += ri + refl;
                    dr += ik * (ri - refl);
                }
                (WavePoint::smooth(f, df), WavePoint::smooth(t, dt), WavePoint::smooth(r, dr))
            }
            Region::Right => {
                let (mut f, mut df) = (ZERO, ZERO);
                for (j, e) in self.phasors(x - self.width).enumerate() {
                    let v = c[j] * self.a_out[j] * e;
                    f += v;
                    df += I * k[j] * v;
                }
                let p = WavePoint::smooth(f, df);
                (p, p, WavePoint::zero())
            }
            Region::Interior(n) => {
                let terms = &self.interior[n];
                let sum = |pick: fn(&KTerm) -> WavePoint| {
                    let mut out = WavePoint::zero();
                    for (cj, term) in c.iter().zip(terms) {
                        let p = pick(term);
                        out.value += cj * p.value;
                        out.deriv_left += cj * p.deriv_left;
                        out.deriv_right += cj * p.deriv_right;
                    }
                    out
                };
                (sum(|t| t.full), sum(|t| t.tr), sum(|t| t.rf))
            }
        }
    }

    pub fn fields_at(&self, t: f64) -> Fields {
        let c = self.coefficients(t);
        let rows = self.policy.map_range(self.grid.len(), |i| self.node_fields(i, &c));
        let mut out = Fields {
            full: Vec::with_capacity(rows.len()),
            tr: Vec::with_capacity(rows.len()),
            rf: Vec::with_capacity(rows.len()),
        };
        for (f, t, r) in rows {
            out.full.push(f);
            out.tr.push(t);
            out.rf.push(r);
        }
        out
    }

    fn moments(&self, t: f64, f: &Fields) -> PacketMoments {
        let g = &self.grid;
        let x = &g.nodes;
        let s = self.constants.hbar / self.constants.mass;
        let density = |w: &[WavePoint]| g.integrate(|i, _| w[i].value.norm_sqr());
        let first = |w: &[WavePoint]| g.integrate(|i, _| x[i] * w[i].value.norm_sqr());
        let flux = |w: &[WavePoint]| {
            g.integrate(|i, left| {
                let d = if left { w[i].deriv_left } else { w[i].deriv_right };
                s * (w[i].value.conj() * d).im
            })
        };
        let norm_full = density(&f.full);
        let t_norm = density(&f.tr);
        let r_norm = density(&f.rf);
        let overlap_re = g.integrate(|i, _| (f.tr[i].value.conj() * f.rf[i].value).re);
        let m = self.constants.mass;
        let (jl, jr) = f.tr[self.xc_index].current_sides(&self.constants);
        PacketMoments {
            t,
            norm_full,
            t_norm,
            r_norm,
            overlap_re,
            x_mean_tr: first(&f.tr) / t_norm,
            p_mean_tr: m * flux(&f.tr) / t_norm,
            x_mean_ref: first(&f.rf) / r_norm,
            p_mean_ref: m * flux(&f.rf) / r_norm,
            j_tr_left: jl,
            j_tr_right: jr,
        }
    }

    /// Norms and expectations at `t`; fails if the full norm leaks off the grid.
    pub fn moments_at(&self, t: f64) -> Result<PacketMoments> {
        let m = self.moments(t, &self.fields_at(t));
        let leak = (1.0 - m.norm_full).abs();
        if leak >= LEAK_LIMIT {
            return Err(Error::GridTooNarrow { leak });
        }
        Ok(m)
    }

    pub fn state_at(&self, t: f64) -> Result<PacketState> {
        let f = self.fields_at(t);
        let moments = self.moments(t, &f);
        let leak = (1.0 - moments.norm_full).abs();
        if leak >= LEAK_LIMIT {
            return Err(Error::GridTooNarrow { leak });
        }
        Ok(PacketState {
            moments,
            x: self.grid.nodes.clone(),
            psi_full: f.full.iter().map(|p| p.value).collect(),
            psi_tr: f.tr.iter().map(|p| p.value).collect(),
            psi_ref: f.rf.iter().map(|p| p.value).collect(),
        })
    }

    /// Moments at every time, evaluated time-slice by time-slice.
    pub fn series(&self, times: &[f64]) -> Result<Vec<PacketMoments>> {
        times.iter().map(|&t| self.moments_at(t)).collect()
    }

    /// Spectral averages `(∫|A|² T dk, ∫|A|² R dk)`.
    pub fn asymptotic_norms(&self) -> (f64, f64) {
        let (mut t, mut r) = (0.0, 0.0);
        for j in 0..self.packet.len() {
            let w = self.packet.weights[j] * self.packet.amplitudes[j].norm_sqr();
            t += w * self.a_out[j].norm_sqr();
            r += w * self.b_out[j].norm_sqr();
        }
        (t, r)
    }
}

/// Builds the synthesizer and checks that doubling the k nodes leaves the
/// norms at `t` unchanged to `SPECTRAL_SHIFT_LIMIT`.
pub fn synthesize(
    spec: &BarrierSpec,
    constants: &PhysicalConstants,
    packet: &SpectralPacket,
    grid: &XGrid,
    t: f64,
    policy: ExecPolicy,
) -> Result<PacketState> {
    let coarse = Synthesizer::new(spec, constants, packet.clone(), grid.clone(), policy)?;
    let state = coarse.state_at(t)?;
    let fine = Synthesizer::new(spec, constants, packet.refined()?, grid.clone(), policy)?;
    let m = fine.moments_at(t)?;
    let shift = [
        m.norm_full - state.moments.norm_full,
        m.t_norm - state.moments.t_norm,
        m.r_norm - state.moments.r_norm,
    ]
    .iter()
    .map(|d| d.abs())
    .fold(0.0, f64::max);
    if shift > SPECTRAL_SHIFT_LIMIT {
        return Err(Error::SpectralUnderresolved { shift });
    }
    Ok(state)
}

/// Uniform time grid of `n + 1` points on `[t0, t1]`.
pub fn time_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let h = (t1 - t0) / n as f64;
    (0..=n).map(|i| t0 + h * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub series: Vec<PacketMoments>,
    /// `max_t |T_t - (1 - R_t)| / (1 - R_t)`.
    pub max_deviation: f64,
    /// `(t, dT/dt by centered difference, current jump)` at interior times.
    pub rate_check: Vec<(f64, f64, f64)>,
    /// Largest relative mismatch between the two rates where `|dT/dt|` exceeds
    /// `noise_floor`.
    pub max_rate_mismatch: f64,
    pub noise_floor: f64,
}

/// Deviation of `T_t` from `1 - R_t`, and `dT/dt` against `j_tr(x_c+0) - j_tr(x_c-0)`.
pub fn t_deviation_scan(synth: &Synthesizer, times: &[f64]) -> Result<DeviationReport> {
    let series = synth.series(times)?;
    let max_deviation = series.iter().map(PacketMoments::deviation).fold(0.0, f64::max);
    let mut rate_check = Vec::new();
    for w in series.windows(3) {
        let rate = (w[2].t_norm - w[0].t_norm) / (w[2].t - w[0].t);
        rate_check.push((w[1].t, rate, w[1].j_tr_right - w[1].j_tr_left));
    }
    let peak = rate_check.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let noise_floor = 0.01 * peak;
    let max_rate_mismatch = rate_check
        .iter()
        .filter(|r| r.1.abs() > noise_floor)
        .map(|r| ((r.1 - r.2) / r.1).abs())
        .fold(0.0, f64::max);
    Ok(DeviationReport {
        series,
        max_deviation,
        rate_check,
        max_rate_mismatch,
        noise_floor,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EhrenfestReport {
    pub channel: Channel,
    /// `max_t |d<x>/dt - <p>/m| / scale`.
    pub max_residual: f64,
    /// `max_t |<p>|/m` over the checked times.
    pub scale: f64,
    /// `(t, d<x>/dt, <p>/m)` at interior times.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Compares `d<x>/dt` (centered differences) with `<p>/m` for one channel.
///
/// The residual is normalized by the largest `|<p>|/m` in the window, since
/// the reflected packet's mean momentum passes through zero at the turn.
pub fn ehrenfest_check(synth: &Synthesizer, channel: Channel, times: &[f64]) -> Result<EhrenfestReport> {
    let series = synth.series(times)?;
    ehrenfest_from_series(&series, channel, synth.constants.mass)
}

pub fn ehrenfest_from_series(series: &[PacketMoments], channel: Channel, mass: f64) -> Result<EhrenfestReport> {
    if let Some(m) = series.iter().find(|m| m.channel_norm(channel) < 1e-6) {
        return Err(Error::ChannelEmpty {
            norm: m.channel_norm(channel),
        });
    }
    let samples: Vec<(f64, f64, f64)> = series
        .windows(3)
        .map(|w| {
            let rate = (w[2].x_mean(channel) - w[0].x_mean(channel)) / (w[2].t - w[0].t);
            (w[1].t, rate, w[1].p_mean(channel) / mass)
        })
        .collect();
    let scale = samples.iter().map(|s| s.2.abs()).fold(0.0, f64::max);
    let max_residual = samples.iter().map(|s| (s.1 - s.2).abs()).fold(0.0, f64::max) / scale;
    Ok(EhrenfestReport {
        channel,
        max_residual,
        scale,
        samples,
    })
}

pub fn series_table(series: &[PacketMoments]) -> Table {
    let mut table = Table::new(
        "packet",
        &[
            ("t", "time"),
            ("T_t", ""),
            ("R_t", ""),
            ("overlap_re", ""),
            ("x_mean_tr", "length"),
            ("p_mean_tr", "momentum"),
            ("x_mean_ref", "length"),
            ("p_mean_ref", "momentum"),
            ("norm_full", ""),
        ],
    );
    for m in series {
        table.push(
            [
                m.t,
                m.t_norm,
                m.r_norm,
                m.overlap_re,
                m.x_mean_tr,
                m.p_mean_tr,
                m.x_mean_ref,
                m.p_mean_ref,
                m.norm_full,
            ]
            .into_iter()
            .map(Cell::Num)
            .collect(),
        );
    }
    table
}

pub fn snapshot_table(state: &PacketState) -> Table {
    let mut table = Table::new(
        &format!("packet snapshot t={}", state.moments.t),
        &[
            ("x", "length"),
            ("abs2_psi_full", "1/length"),
            ("abs2_psi_tr", "1/length"),
            ("abs2_psi_ref", "1/length"),
        ],
    );
    for i in 0..state.x.len() {
        table.push(vec![
            Cell::Num(state.x[i]),
            Cell::Num(state.psi_full[i].norm_sqr()),
            Cell::Num(state.psi_tr[i].norm_sqr()),
            Cell::Num(state.psi_ref[i].norm_sqr()),
        ]);
    }
    table
}
