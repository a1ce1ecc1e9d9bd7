//! Symmetric two-slit diffraction and its midplane decomposition.
//!
//! A unit-amplitude slit of width `d` centred at `y = 0` radiates the 2D
//! scalar Helmholtz field
//!
//! `Ψ_one(x, y) = (1/π) ∫_0^∞ Â(q) cos(q y) e^{i k_z x} dq`, `Â(q) = 2 sin(q d/2)/q`,
//!
//! with `k_z = sqrt(k² - q²)` for propagating and `i sqrt(q² - k²)` for
//! evanescent components. The propagating part is integrated in `q = k sin φ`
//! and the evanescent part in `q = k cosh u`, which removes the square-root
//! endpoints at `q = k`. Currents are in units of `ħ/m`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::table::{Cell, Table};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gauss-Legendre points per panel.
const PANEL_ORDER: usize = 10;
/// Evanescent components are dropped once `e^{-κx}` is below this.
const EVANESCENT_CUTOFF: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitGeometry {
    /// Slit half-separation: slit centres at `y = ±a_s`.
    pub a_s: f64,
    /// Width of slit 1 (centred at `y = -a_s`).
    pub d_s: f64,
    /// Width of slit 2 (centred at `y = +a_s`); equal to `d_s` for the symmetric setup.
    pub d_s2: f64,
    /// Detector plane `x = L`.
    pub distance: f64,
    pub k: f64,
}

impl SlitGeometry {
    pub fn new(a_s: f64, d_s: f64, distance: f64, k: f64) -> Result<Self> {
        Self::with_widths(a_s, d_s, d_s, distance, k)
    }

    /// Slits of different widths; breaks the mirror symmetry.
    pub fn with_widths(a_s: f64, d_s: f64, d_s2: f64, distance: f64, k: f64) -> Result<Self> {
        let g = Self {
            a_s,
            d_s,
            d_s2,
            distance,
            k,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_s > 0.0 && self.d_s2 > 0.0) {
            return Err(Error::InvalidParameter("slit widths must be positive".into()));
        }
        if !(self.k > 0.0) {
            return Err(Error::NonpositiveWavenumber(self.k));
        }
        if !(self.distance > 0.0) {
            return Err(Error::InvalidParameter(format!("detector distance {} must be positive", self.distance)));
        }
        if !(self.a_s > 0.5 * self.d_s.max(self.d_s2)) {
            return Err(Error::InvalidParameter(format!(
                "slits overlap: half-separation {} must exceed half the slit width",
                self.a_s
            )));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.d_s == self.d_s2
    }

    /// Fraunhofer fringe period `2π x/(2 k a_s)`.
    pub fn fringe_period(&self, x: f64) -> f64 {
        std::f64::consts::PI * x / (self.k * self.a_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitChannel {
    Two,
    /// Slit 1 alone (centred at `-a_s`).
    One1,
    /// Slit 2 alone (centred at `+a_s`).
    One2,
    /// Two-slit field restricted to `y < 0`, half of it at `y = 0`.
    Sub1,
    /// Two-slit field restricted to `y > 0`, half of it at `y = 0`.
    Sub2,
}

impl SlitChannel {
    pub fn name(self) -> &'static str {
        match self {
            SlitChannel::Two => "two",
            SlitChannel::One1 => "one1",
            SlitChannel::One2 => "one2",
            SlitChannel::Sub1 => "sub1",
            SlitChannel::Sub2 => "sub2",
        }
    }
}

/// Field value with its y and x derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub value: Complex64,
    pub dy: Complex64,
    pub dx: Complex64,
}

impl FieldPoint {
    const ZERO: FieldPoint = FieldPoint {
        value: Complex64 { re: 0.0, im: 0.0 },
        dy: Complex64 { re: 0.0, im: 0.0 },
        dx: Complex64 { re: 0.0, im: 0.0 },
    };

    fn add(self, o: FieldPoint) -> FieldPoint {
        FieldPoint {
            value: self.value + o.value,
            dy: self.dy + o.dy,
            dx: self.dx + o.dx,
        }
    }

    fn scale(self, s: f64) -> FieldPoint {
        FieldPoint {
            value: self.value * s,
            dy: self.dy * s,
            dx: self.dx * s,
        }
    }

    /// `Im(ψ* ∂_y ψ)`.
    pub fn current_y(&self) -> f64 {
        (self.value.conj() * self.dy).im
    }

    /// `Im(ψ* ∂_x ψ)`.
    pub fn current_x(&self) -> f64 {
        (self.value.conj() * self.dx).im
    }
}

/// Symmetric grid on `[-Y, Y]` with a node at 0 and `intervals` (even) on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct YGrid {
    pub nodes: Vec<f64>,
    pub intervals: usize,
    pub step: f64,
}

impl YGrid {
    pub fn symmetric(half_width: f64, intervals: usize) -> Result<Self> {
        if !(half_width > 0.0) || intervals == 0 || intervals % 2 == 1 {
            return Err(Error::OddIntervalCount(intervals));
        }
        let step = half_width / intervals as f64;
        let nodes = (0..=2 * intervals)
            .map(|i| {
                let j = i as i64 - intervals as i64;
                if j.unsigned_abs() as usize == intervals {
                    half_width * j.signum() as f64
                } else {
                    step * j as f64
                }
            })
            .collect();
        Ok(Self { nodes, intervals, step })
    }

    /// Grid with spacing at most `spacing`.
    pub fn with_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        let mut n = (half_width / spacing).ceil() as usize;
        n += n % 2;
        Self::symmetric(half_width, n.max(2))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn zero_index(&self) -> usize {
        self.intervals
    }
}

/// Simpson sum over `values[lo..=hi]` on spacing `h`.
fn simpson_range(values: &[f64], lo: usize, hi: usize, h: f64) -> f64 {
    let n = hi - lo;
    let mut acc = values[lo] + values[hi];
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * values[lo + i];
    }
    acc * h / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub x: f64,
    pub y: Vec<f64>,
    pub points: Vec<FieldPoint>,
    pub channel: SlitChannel,
    pub step: f64,
    pub zero_index: usize,
}

impl FieldSlice {
    pub fn amplitude(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value.norm_sqr()).collect()
    }

    /// `∫ |Ψ|² dy` by Simpson. Half-plane channels use their one-sided
    /// limit `Φ(0)` at the `y = 0` end, so `‖Sub1‖² + ‖Sub2‖² = ‖Ψ_two‖²`.
    pub fn norm_sqr(&self) -> f64 {
        let mut v = self.intensity();
        let (z, n, h) = (self.zero_index, self.y.len() - 1, self.step);
        match self.channel {
            SlitChannel::Sub1 => {
                v[z] = (2.0 * self.points[z].value).norm_sqr();
                simpson_range(&v, 0, z, h)
            }
            SlitChannel::Sub2 => {
                v[z] = (2.0 * self.points[z].value).norm_sqr();
                simpson_range(&v, z, n, h)
            }
            _ => simpson_range(&v, 0, z, h) + simpson_range(&v, z, n, h),
        }
    }

    /// `∫ j_x dy` over the window (units of ħ/m).
    pub fn flux_x(&self) -> f64 {
        let j: Vec<f64> = self.points.iter().map(FieldPoint::current_x).collect();
        let (z, n) = (self.zero_index, self.y.len() - 1);
        simpson_range(&j, 0, z, self.step) + simpson_range(&j, z, n, self.step)
    }

    /// `|Ψ(x, -y) - Ψ(x, y)|` maximised over the grid, relative to `max |Ψ|`.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.y.len() - 1;
        let peak = self.points.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
        (0..=n)
            .map(|i| (self.points[i].value - self.points[n - i].value).norm())
            .fold(0.0, f64::max)
            / peak
    }
}

/// Angular-spectrum propagator with cached Gauss-Legendre nodes.
#[derive(Debug, Clone)]
pub struct Propagator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Extra panels per half-wave of phase.
    pub oversample: f64,
}

impl Default for Propagator {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl Propagator {
    pub fn new(oversample: f64) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).expect("nonzero order"));
        Self {
            nodes: rule.nodes().copied().collect(),
            weights: rule.weights().copied().collect(),
            oversample,
        }
    }

    fn panels(span: f64, oversample: f64) -> usize {
        (oversample * span / std::f64::consts::PI).ceil() as usize + 4
    }

    /// Σ over panels of the GL rule on `[lo, hi]`.
    fn integrate(&self, lo: f64, hi: f64, panels: usize, mut f: impl FnMut(f64) -> FieldPoint) -> FieldPoint {
        let h = (hi - lo) / panels as f64;
        let mut acc = FieldPoint::ZERO;
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                acc = acc.add(f(mid + 0.5 * h * t).scale(0.5 * h * w));
            }
        }
        acc
    }

    /// Field of a single slit of width `d` centred at `y = 0`.
    pub fn one_slit(&self, k: f64, d: f64, x: f64, y: f64) -> Result<FieldPoint> {
        if x < 0.0 {
            return Err(Error::NegativePlane(x));
        }
        let ay = y.abs();
        let sign = if y < 0.0 { -1.0 } else { 1.0 };
        if x == 0.0 {
            let v = if ay <= 0.5 * d { 1.0 } else { 0.0 };
            return Ok(FieldPoint {
                value: Complex64::new(v, 0.0),
                dy: Complex64::new(0.0, 0.0),
                dx: Complex64::new(0.0, 0.0),
            });
        }
        let half = 0.5 * d;
        let spectrum = |q: f64| if q == 0.0 { d } else { 2.0 * (q * half).sin() / q };

        // propagating: q = k sin φ
        let span = k * (ay + half + x);
        let prop = self.integrate(0.0, std::f64::consts::FRAC_PI_2, Self::panels(span, self.oversample), |phi| {
            let (s, c) = phi.sin_cos();
            let q = k * s;
            let kz = k * c;
            let (sq, cq) = (q * ay).sin_cos();
            let phase = Complex64::from_polar(spectrum(q) * k * c, kz * x);
            FieldPoint {
                value: phase * cq,
                dy: phase * (-q * sq),
                dx: phase * cq * I * kz,
            }
        });

        // evanescent: q = k cosh u, κ = k sinh u
        let decay = -EVANESCENT_CUTOFF.ln();
        let u_max = (decay / (k * x)).asinh();
        let q_max = k * u_max.cosh();
        let span = (q_max - k) * (ay + half) + decay;
        let evan = self.integrate(0.0, u_max, Self::panels(span, self.oversample), |u| {
            let (sh, ch) = (u.sinh(), u.cosh());
            let q = k * ch;
            let kappa = k * sh;
            let (sq, cq) = (q * ay).sin_cos();
            let amp = spectrum(q) * k * sh * (-kappa * x).exp();
            FieldPoint {
                value: Complex64::new(amp * cq, 0.0),
                dy: Complex64::new(-amp * q * sq, 0.0),
                dx: Complex64::new(-amp * cq * kappa, 0.0),
            }
        });

        let total = prop.add(evan).scale(std::f64::consts::FRAC_1_PI);
        Ok(FieldPoint {
            dy: total.dy * sign,
            ..total
        })
    }

    fn channel_point(&self, g: &SlitGeometry, channel: SlitChannel, x: f64, y: f64) -> Result<FieldPoint> {
        let one1 = || self.one_slit(g.k, g.d_s, x, y + g.a_s);
        let one2 = || self.one_slit(g.k, g.d_s2, x, y - g.a_s);
        match channel {
            SlitChannel::One1 => one1(),
            SlitChannel::One2 => one2(),
            // y → -y swaps the two operands, so the sum is exactly even
            SlitChannel::Two => Ok(one2()?.add(one1()?)),
            SlitChannel::Sub1 | SlitChannel::Sub2 => {
                let full = one2()?.add(one1()?);
                let keep = if channel == SlitChannel::Sub1 { y < 0.0 } else { y > 0.0 };
                Ok(if y == 0.0 {
                    full.scale(0.5)
                } else if keep {
                    full
                } else {
                    FieldPoint::ZERO
                })
            }
        }
    }

    pub fn slice(&self, g: &SlitGeometry, channel: SlitChannel, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<FieldSlice> {
        if x < 0.0 {
            return Err(Error::NegativePlane(x));
        }
        let points = policy.try_map(&grid.nodes, |&y| self.channel_point(g, channel, x, y))?;
        Ok(FieldSlice {
            x,
            y: grid.nodes.clone(),
            points,
            channel,
            step: grid.step,
            zero_index: grid.zero_index(),
        })
    }
}

/// Single slit of width `d_s` centred at `y = 0` (the generator of both one-slit channels).
pub fn one_slit_field(geom: &SlitGeometry, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<FieldSlice> {
    let centred = SlitGeometry {
        a_s: 0.0,
        ..*geom
    };
    let prop = Propagator::default();
    let points = policy.try_map(&grid.nodes, |&y| prop.one_slit(centred.k, centred.d_s, x, y))?;
    Ok(FieldSlice {
        x,
        y: grid.nodes.clone(),
        points,
        channel: SlitChannel::One1,
        step: grid.step,
        zero_index: grid.zero_index(),
    })
}

pub fn two_slit_field(geom: &SlitGeometry, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<FieldSlice> {
    Propagator::default().slice(geom, SlitChannel::Two, x, grid, policy)
}

pub fn channel_field(geom: &SlitGeometry, channel: SlitChannel, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<FieldSlice> {
    Propagator::default().slice(geom, channel, x, grid, policy)
}

/// Splits a two-slit slice at the midplane.
pub fn decompose(field: &FieldSlice) -> Result<(FieldSlice, FieldSlice)> {
    if field.channel != SlitChannel::Two {
        return Err(Error::WrongChannel(field.channel.name().into()));
    }
    let z = field.zero_index;
    let part = |channel: SlitChannel| {
        let points = field
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let keep = if channel == SlitChannel::Sub1 { i < z } else { i > z };
                if i == z {
                    p.scale(0.5)
                } else if keep {
                    *p
                } else {
                    FieldPoint::ZERO
                }
            })
            .collect();
        FieldSlice {
            x: field.x,
            y: field.y.clone(),
            points,
            channel,
            step: field.step,
            zero_index: z,
        }
    };
    Ok((part(SlitChannel::Sub1), part(SlitChannel::Sub2)))
}

/// `j_y` at grid index `i`.
pub fn current_y(field: &FieldSlice, i: usize) -> f64 {
    field.points[i].current_y()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorReport {
    /// Largest `|M(y) - Sub1(y)|` over `y < 0`, relative to `max |Ψ_two|`.
    pub max_deviation: f64,
    /// Largest `||M|² - |Ψ_two|²|` over `y ≤ 0`, relative to `max |Ψ_two|²`.
    pub max_intensity_deviation: f64,
}

/// Compares the mirror setup (slit 1 plus its even image about `y = 0`)
/// with the restriction of the two-slit field to `y < 0`.
pub fn mirror_experiment_check(geom: &SlitGeometry, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<MirrorReport> {
    let prop = Propagator::default();
    let two = prop.slice(geom, SlitChannel::Two, x, grid, policy)?;
    let (sub1, _) = decompose(&two)?;
    let z = grid.zero_index();
    let mirror = policy.try_map(&grid.nodes[..=z], |&y| -> Result<FieldPoint> {
        let direct = prop.one_slit(geom.k, geom.d_s, x, y + geom.a_s)?;
        let image = prop.one_slit(geom.k, geom.d_s, x, -y + geom.a_s)?;
        Ok(direct.add(image))
    })?;
    let peak = two.points.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
    let max_deviation = (0..z)
        .map(|i| (mirror[i].value - sub1.points[i].value).norm())
        .fold(0.0, f64::max)
        / peak;
    let max_intensity_deviation = (0..=z)
        .map(|i| (mirror[i].value.norm_sqr() - two.points[i].value.norm_sqr()).abs())
        .fold(0.0, f64::max)
        / (peak * peak);
    Ok(MirrorReport {
        max_deviation,
        max_intensity_deviation,
    })
}

/// `‖Ψ_two‖² - ‖Ψ_one1‖² - ‖Ψ_one2‖²` over the window at plane `x`.
pub fn nonadditivity_deficit(geom: &SlitGeometry, x: f64, grid: &YGrid, policy: ExecPolicy) -> Result<f64> {
    let prop = Propagator::default();
    let two = prop.slice(geom, SlitChannel::Two, x, grid, policy)?;
    let one1 = prop.slice(geom, SlitChannel::One1, x, grid, policy)?;
    let one2 = prop.slice(geom, SlitChannel::One2, x, grid, policy)?;
    Ok(two.norm_sqr() - one1.norm_sqr() - one2.norm_sqr())
}

/// Deficit `2 Re ∫_{-Y}^{Y} Ψ_one(y - a)* Ψ_one(y + a) dy` for many separations,
/// from one evaluation of the centred slit field on an extended grid.
/// Each separation is rounded to a multiple of the grid step; the rounded
/// values are returned with the deficits.
pub fn deficit_sweep(
    k: f64,
    d_s: f64,
    x: f64,
    half_width: f64,
    step: f64,
    separations: &[f64],
    policy: ExecPolicy,
) -> Result<Vec<(f64, f64)>> {
    let a_max = separations.iter().cloned().fold(0.0, f64::max);
    let window = (half_width / step).round() as usize;
    let window = window + window % 2;
    let shift_max = (a_max / step).ceil() as usize;
    let total = window + shift_max;
    let prop = Propagator::default();
    let ys: Vec<f64> = (0..=2 * total).map(|i| (i as f64 - total as f64) * step).collect();
    let field = policy.try_map(&ys, |&y| prop.one_slit(k, d_s, x, y))?;
    let mut out = Vec::with_capacity(separations.len());
    for &a in separations {
        let s = (a / step).round() as usize;
        // y_i = (i - window) step for i in 0..=2 window; y - a and y + a are offsets ∓ s
        let cross: Vec<f64> = (0..=2 * window)
            .map(|i| {
                let c = total - window + i;
                (field[c - s].value.conj() * field[c + s].value).re
            })
            .collect();
        let integral = simpson_range(&cross, 0, 2 * window, step);
        out.push((s as f64 * step, 2.0 * integral));
    }
    Ok(out)
}

/// Local maxima of `|deficit|` along a sweep.
///
/// The deficit changes sign with period close to `π/k` in the separation,
/// so its decay is read off the successive peak magnitudes.
pub fn deficit_peaks(sweep: &[(f64, f64)]) -> Vec<(f64, f64)> {
    sweep
        .windows(3)
        .filter(|w| w[1].1.abs() > w[0].1.abs() && w[1].1.abs() >= w[2].1.abs())
        .map(|w| (w[1].0, w[1].1.abs()))
        .collect()
}

/// Minimum of `f` on `[lo, hi]` by golden-section search.
pub fn golden_minimum(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Positions of local minima of sampled data, refined by a parabola through
/// each minimum and its neighbours.
pub fn local_minima(y: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            let h = y[i + 1] - y[i];
            let denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
            let shift = if denom > 0.0 { 0.5 * (v[i - 1] - v[i + 1]) / denom } else { 0.0 };
            out.push(y[i] + shift * h);
        }
    }
    out
}

pub fn slice_table(two: &FieldSlice) -> Result<Table> {
    let (sub1, sub2) = decompose(two)?;
    let mut table = Table::new(
        &format!("twoslit x={}", two.x),
        &[
            ("y", "length"),
            ("re_psi_two", ""),
            ("im_psi_two", ""),
            ("abs2_psi_two", ""),
            ("abs2_sub1", ""),
            ("abs2_sub2", ""),
            ("j_y", "hbar/m"),
        ],
    );
    for i in 0..two.y.len() {
        let p = two.points[i];
        table.push(vec![
            Cell::Num(two.y[i]),
            Cell::Num(p.value.re),
            Cell::Num(p.value.im),
            Cell::Num(p.value.norm_sqr()),
            Cell::Num(sub1.points[i].value.norm_sqr()),
            Cell::Num(sub2.points[i].value.norm_sqr()),
            Cell::Num(p.current_y()),
        ]);
    }
    Ok(table)
}
