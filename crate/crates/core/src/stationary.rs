//! Stationary scattering on a symmetric barrier.
//!
//! The barrier region is described by an odd solution `F` and an even
//! solution `G` of the stationary Schrödinger equation, both measured from
//! the midpoint `x_c`. They are normalized by `F(x_c) = 0, F'(x_c) = 1,
//! G(x_c) = 1, G'(x_c) = 0`, so their Wronskian `F'G - G'F` starts at 1; the
//! amplitude formulas carry explicit `1/κ_w` factors and stay valid for any
//! rescaling of the pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::potential::{BarrierSpec, PhysicalConstants};
use crate::scaled::{ScaledComplex, ScaledState};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default RK4 steps per barrier width for sampled potentials.
pub const DEFAULT_STEPS_PER_WIDTH: usize = 4096;
/// Residual threshold for the integrated basis (relative, max norm).
pub const RESIDUAL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMethod {
    /// Analytic per-slab propagation for piecewise-constant kinds, RK4 for sampled.
    Auto,
    /// Fixed-step RK4 for every kind (slab edges are kept on the step grid).
    Integrator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub steps_per_width: usize,
    pub method: BasisMethod,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            steps_per_width: DEFAULT_STEPS_PER_WIDTH,
            method: BasisMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HalfPiece {
    start: f64,
    end: f64,
    height: f64,
}

#[derive(Debug, Clone)]
enum Profile {
    /// Right half only; the left half follows from parity.
    Analytic {
        pieces: Vec<HalfPiece>,
        f_starts: Vec<ScaledState>,
        g_starts: Vec<ScaledState>,
    },
    /// Node values over the whole support, integrated outward from `x_c`.
    Grid {
        xs: Vec<f64>,
        f: Vec<ScaledState>,
        g: Vec<ScaledState>,
    },
}

/// `F` and `G` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPoint {
    pub f: ScaledState,
    pub g: ScaledState,
}

impl BasisPoint {
    /// Plain `(F, F', G, G')`; overflows for extremely opaque barriers.
    pub fn values(&self) -> [f64; 4] {
        [
            self.f.actual_value(),
            self.f.actual_deriv(),
            self.g.actual_value(),
            self.g.actual_deriv(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct RealBasisPair {
    pub k: f64,
    pub energy: f64,
    pub wronskian_kappa: f64,
    pub constants: PhysicalConstants,
    pub left: f64,
    pub right: f64,
    pub midpoint: f64,
    f_factor: f64,
    g_factor: f64,
    profile: Profile,
}

/// Exact propagation of `(u, u')` across a slab of constant height.
fn propagate_slab(state: ScaledState, length: f64, height: f64, energy: f64, c: f64) -> ScaledState {
    let s = c * (height - energy);
    let (u, du) = (state.value, state.deriv);
    let next = if s > 0.0 {
        let q = s.sqrt();
        let qh = q * length;
        if qh > 30.0 {
            // cosh, sinh with e^{qh} moved into the log scale
            let e = (-2.0 * qh).exp();
            let (ch, sh) = (0.5 * (1.0 + e), 0.5 * (1.0 - e));
            ScaledState {
                value: u * ch + du / q * sh,
                deriv: u * q * sh + du * ch,
                ln_scale: state.ln_scale + qh,
            }
        } else {
            let (ch, sh) = (qh.cosh(), qh.sinh());
            ScaledState {
                value: u * ch + du / q * sh,
                deriv: u * q * sh + du * ch,
                ln_scale: state.ln_scale,
            }
        }
    } else if s < 0.0 {
        let q = (-s).sqrt();
        let (sn, cs) = (q * length).sin_cos();
        ScaledState {
            value: u * cs + du / q * sn,
            deriv: -u * q * sn + du * cs,
            ln_scale: state.ln_scale,
        }
    } else {
        ScaledState {
            value: u + du * length,
            deriv: du,
            ln_scale: state.ln_scale,
        }
    };
    next.renormalized()
}

fn rk4_step(state: ScaledState, x: f64, h: f64, energy: f64, c: f64, v: &impl Fn(f64) -> f64) -> ScaledState {
    let rhs = |x: f64, u: f64| c * (v(x) - energy) * u;
    let (u, du) = (state.value, state.deriv);
    let k1u = du;
    let k1d = rhs(x, u);
    let k2u = du + 0.5 * h * k1d;
    let k2d = rhs(x + 0.5 * h, u + 0.5 * h * k1u);
    let k3u = du + 0.5 * h * k2d;
    let k3d = rhs(x + 0.5 * h, u + 0.5 * h * k2u);
    let k4u = du + h * k3d;
    let k4d = rhs(x + h, u + h * k3u);
    ScaledState {
        value: u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        deriv: du + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
        ln_scale: state.ln_scale,
    }
    .renormalized()
}

/// Cubic Hermite interpolation between two nodes sharing a scale.
fn hermite(x0: f64, x1: f64, s0: ScaledState, s1: ScaledState, x: f64) -> ScaledState {
    let ln = s0.ln_scale.max(s1.ln_scale);
    let (u0, d0) = s0.at_scale(ln);
    let (u1, d1) = s1.at_scale(ln);
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * u0 + h10 * h * d0 + h01 * u1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let deriv = dh00 * u0 + dh10 * d0 + dh01 * u1 + dh11 * d1;
    ScaledState {
        value,
        deriv,
        ln_scale: ln,
    }
}

/// Right-half breakpoints ξ in `[0, d/2]` together with the slab height on each interval.
fn half_pieces(spec: &BarrierSpec) -> Option<Vec<HalfPiece>> {
    let xc = spec.midpoint();
    let half = 0.5 * spec.width();
    let pieces = spec.pieces()?;
    let mut out = Vec::new();
    for p in pieces {
        let start = (p.start - xc).max(0.0);
        let end = (p.end - xc).min(half);
        if end > start {
            out.push(HalfPiece {
                start,
                end,
                height: p.height,
            });
        }
    }
    if let Some(last) = out.last_mut() {
        last.end = half;
    }
    Some(out)
}

pub fn solve_basis(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64) -> Result<RealBasisPair> {
    solve_basis_with(spec, constants, k, &SolverOptions::default())
}

pub fn solve_basis_with(
    spec: &BarrierSpec,
    constants: &PhysicalConstants,
    k: f64,
    options: &SolverOptions,
) -> Result<RealBasisPair> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NonpositiveWavenumber(k));
    }
    spec.validate(spec.default_tolerance())?;
    let energy = constants.energy(k);
    let c = constants.curvature_scale();
    let f0 = ScaledState::new(0.0, 1.0);
    let g0 = ScaledState::new(1.0, 0.0);

    let profile = match (half_pieces(spec), options.method) {
        (Some(pieces), BasisMethod::Auto) => {
            let mut f_starts = Vec::with_capacity(pieces.len());
            let mut g_starts = Vec::with_capacity(pieces.len());
            let (mut f, mut g) = (f0, g0);
            for p in &pieces {
                f_starts.push(f);
                g_starts.push(g);
                f = propagate_slab(f, p.end - p.start, p.height, energy, c);
                g = propagate_slab(g, p.end - p.start, p.height, energy, c);
            }
            Profile::Analytic {
                pieces,
                f_starts,
                g_starts,
            }
        }
        (pieces, _) => integrate_grid(spec, pieces, options.steps_per_width, energy, c, f0, g0),
    };

    let basis = RealBasisPair {
        k,
        energy,
        wronskian_kappa: 1.0,
        constants: *constants,
        left: spec.left(),
        right: spec.right(),
        midpoint: spec.midpoint(),
        f_factor: 1.0,
        g_factor: 1.0,
        profile,
    };
    if matches!(basis.profile, Profile::Grid { .. }) {
        let residual = basis.residual_on_nodes(spec);
        if !(residual <= RESIDUAL_THRESHOLD) {
            return Err(Error::IntegrationUnstable {
                residual,
                threshold: RESIDUAL_THRESHOLD,
            });
        }
    }
    Ok(basis)
}

fn integrate_grid(
    spec: &BarrierSpec,
    pieces: Option<Vec<HalfPiece>>,
    steps_per_width: usize,
    energy: f64,
    c: f64,
    f0: ScaledState,
    g0: ScaledState,
) -> Profile {
    let xc = spec.midpoint();
    let half = 0.5 * spec.width();
    let h_target = spec.width() / steps_per_width.max(2) as f64;

    // Breakpoints on the right half; slab edges or sample nodes.
    let breaks: Vec<(f64, f64, Option<f64>)> = match (&pieces, spec) {
        (Some(ps), _) => ps.iter().map(|p| (p.start, p.end, Some(p.height))).collect(),
        (None, BarrierSpec::Sampled(s)) => {
            let hs = s.step();
            let n = (s.xs.len() - 1) / 2;
            (0..n)
                .map(|i| {
                    let lo = i as f64 * hs;
                    let hi = if i + 1 == n { half } else { (i + 1) as f64 * hs };
                    (lo, hi, None)
                })
                .collect()
        }
        (None, _) => vec![(0.0, half, None)],
    };
    let mut xis = vec![0.0];
    let mut heights: Vec<Option<f64>> = Vec::new();
    for &(lo, hi, height) in &breaks {
        let n = ((hi - lo) / h_target).ceil().max(1.0) as usize;
        for j in 1..=n {
            xis.push(if j == n { hi } else { lo + (hi - lo) * j as f64 / n as f64 });
            heights.push(height);
        }
    }

    let sweep = |sign: f64, start: ScaledState| -> Vec<ScaledState> {
        let mut out = Vec::with_capacity(xis.len());
        let mut s = start;
        out.push(s);
        for j in 1..xis.len() {
            let x0 = xc + sign * xis[j - 1];
            let h = sign * (xis[j] - xis[j - 1]);
            s = match heights[j - 1] {
                Some(v) => rk4_step(s, x0, h, energy, c, &|_| v),
                None => rk4_step(s, x0, h, energy, c, &|x| spec.evaluate(x)),
            };
            out.push(s);
        }
        out
    };
    let f_right = sweep(1.0, f0);
    let g_right = sweep(1.0, g0);
    let f_left = sweep(-1.0, f0);
    let g_left = sweep(-1.0, g0);

    let n = xis.len();
    let mut xs = Vec::with_capacity(2 * n - 1);
    let mut f = Vec::with_capacity(2 * n - 1);
    let mut g = Vec::with_capacity(2 * n - 1);
    for j in (1..n).rev() {
        xs.push(xc - xis[j]);
        f.push(f_left[j]);
        g.push(g_left[j]);
    }
    for j in 0..n {
        xs.push(xc + xis[j]);
        f.push(f_right[j]);
        g.push(g_right[j]);
    }
    xs[0] = spec.left();
    xs[2 * n - 2] = spec.right();
    Profile::Grid { xs, f, g }
}

impl RealBasisPair {
    /// The same pair multiplied by `(λ, μ)`; the Wronskian becomes `λ μ κ_w`.
    pub fn rescaled(&self, lambda: f64, mu: f64) -> Self {
        let mut out = self.clone();
        out.f_factor *= lambda;
        out.g_factor *= mu;
        out.wronskian_kappa *= lambda * mu;
        out
    }

    pub fn is_integrated(&self) -> bool {
        matches!(self.profile, Profile::Grid { .. })
    }

    /// Integrator nodes, or `None` for analytic propagation.
    pub fn nodes(&self) -> Option<&[f64]> {
        match &self.profile {
            Profile::Grid { xs, .. } => Some(xs),
            Profile::Analytic { .. } => None,
        }
    }

    /// Slab edges inside `[a, b]` (excluding the ends), useful as quadrature breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Analytic { pieces, .. } => {
                let mut out: Vec<f64> = Vec::new();
                for p in pieces.iter().skip(1) {
                    out.push(self.midpoint - p.start);
                    out.push(self.midpoint + p.start);
                }
                out.sort_by(|a, b| a.partial_cmp(b).unwrap());
                out
            }
            Profile::Grid { .. } => Vec::new(),
        }
    }

    /// `F`, `G` and derivatives at `x` (clamped to `[a, b]`).
    pub fn at(&self, x: f64) -> BasisPoint {
        let x = x.clamp(self.left, self.right);
        let point = match &self.profile {
            Profile::Analytic {
                pieces,
                f_starts,
                g_starts,
            } => {
                let xi = x - self.midpoint;
                let r = xi.abs();
                let idx = pieces.partition_point(|p| p.end < r).min(pieces.len() - 1);
                let p = pieces[idx];
                let h = (r - p.start).max(0.0);
                let c = self.constants.curvature_scale();
                let f = propagate_slab(f_starts[idx], h, p.height, self.energy, c);
                let g = propagate_slab(g_starts[idx], h, p.height, self.energy, c);
                if xi < 0.0 {
                    BasisPoint {
                        f: f.odd_reflection(),
                        g: g.even_reflection(),
                    }
                } else {
                    BasisPoint { f, g }
                }
            }
            Profile::Grid { xs, f, g } => {
                let i = xs.partition_point(|&n| n <= x).clamp(1, xs.len() - 1) - 1;
                if x == xs[i] {
                    BasisPoint { f: f[i], g: g[i] }
                } else if x == xs[i + 1] {
                    BasisPoint {
                        f: f[i + 1],
                        g: g[i + 1],
                    }
                } else {
                    BasisPoint {
                        f: hermite(xs[i], xs[i + 1], f[i], f[i + 1], x),
                        g: hermite(xs[i], xs[i + 1], g[i], g[i + 1], x),
                    }
                }
            }
        };
        BasisPoint {
            f: point.f.scaled_by(self.f_factor),
            g: point.g.scaled_by(self.g_factor),
        }
    }

    /// Max-norm Schrödinger residual `|-(ħ²/2m)u'' + (V - E)u|` on a grid of
    /// `n` intervals, relative to `max(|E|, max V) · max|u|`; `u''` from
    /// centered differences of the tracked derivative. Points whose stencil
    /// straddles a slab edge are skipped.
    pub fn residual(&self, spec: &BarrierSpec, n: usize) -> f64 {
        let xs: Vec<f64> = (0..=n)
            .map(|i| self.left + (self.right - self.left) * i as f64 / n as f64)
            .collect();
        self.residual_at(spec, &xs)
    }

    fn residual_on_nodes(&self, spec: &BarrierSpec) -> f64 {
        match &self.profile {
            Profile::Grid { xs, .. } => self.residual_at(spec, &xs.clone()),
            Profile::Analytic { .. } => 0.0,
        }
    }

    fn residual_at(&self, spec: &BarrierSpec, xs: &[f64]) -> f64 {
        // V is not smooth at slab edges or at sample nodes
        let edges: Vec<f64> = match spec {
            BarrierSpec::Sampled(s) => s.xs.clone(),
            _ => spec
                .pieces()
                .map(|ps| ps.iter().skip(1).map(|p| p.start).collect())
                .unwrap_or_default(),
        };
        let pts: Vec<BasisPoint> = xs.iter().map(|&x| self.at(x)).collect();
        let c = self.constants.curvature_scale();
        let mut worst: f64 = 0.0;
        for pick in [0usize, 1] {
            let states: Vec<ScaledState> = pts.iter().map(|p| if pick == 0 { p.f } else { p.g }).collect();
            let ln_ref = states
                .iter()
                .map(|s| s.ln_magnitude())
                .fold(f64::NEG_INFINITY, f64::max);
            let plain: Vec<(f64, f64)> = states.iter().map(|s| s.at_scale(ln_ref)).collect();
            let umax = plain.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
            let mut vmax: f64 = self.energy.abs();
            let mut acc: f64 = 0.0;
            // the two end nodes on each side only admit the low-order stencil
            let inner = if xs.len() > 6 { 2..xs.len() - 2 } else { 1..xs.len() - 1 };
            for j in inner {
                let lo = xs[j.saturating_sub(2)];
                let hi = xs[(j + 2).min(xs.len() - 1)];
                if edges.iter().any(|&e| e > lo && e < hi) {
                    continue;
                }
                let vj = spec.evaluate(xs[j]);
                vmax = vmax.max(vj.abs());
                let h = xs[j + 1] - xs[j];
                let uniform = j >= 2
                    && j + 2 < xs.len()
                    && [xs[j] - xs[j - 1], xs[j - 1] - xs[j - 2], xs[j + 2] - xs[j + 1]]
                        .iter()
                        .all(|s| (s - h).abs() < 1e-9 * h);
                let upp = if uniform {
                    (-plain[j + 2].1 + 8.0 * plain[j + 1].1 - 8.0 * plain[j - 1].1 + plain[j - 2].1) / (12.0 * h)
                } else {
                    (plain[j + 1].1 - plain[j - 1].1) / (xs[j + 1] - xs[j - 1])
                };
                let r = (-upp / c + (vj - self.energy) * plain[j].0).abs();
                acc = acc.max(r);
            }
            if umax > 0.0 {
                worst = worst.max(acc / (vmax.max(f64::MIN_POSITIVE) * umax));
            }
        }
        worst
    }

    /// Max relative deviation of `F'G - G'F` from `κ_w` on a grid of `n` intervals.
    pub fn wronskian_drift(&self, n: usize) -> f64 {
        (0..=n)
            .map(|i| {
                let x = self.left + (self.right - self.left) * i as f64 / n as f64;
                let p = self.at(x);
                let ln = p.f.ln_scale + p.g.ln_scale;
                let w = (p.f.deriv * p.g.value - p.g.deriv * p.f.value) * ln.exp();
                ((w - self.wronskian_kappa) / self.wronskian_kappa).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Amplitude set at fixed k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    pub a_out: Complex64,
    pub b_out: Complex64,
    pub a_in_tr: Complex64,
    pub a_in_ref: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    /// ln T, valid even when T underflows.
    pub ln_transmission: f64,
    pub q: ScaledComplex,
    pub p: ScaledComplex,
    /// `a_full = -κ_w⁻¹ P* a_out e^{ika}`
    pub a_full: ScaledComplex,
    /// `b_full = κ_w⁻¹ Q* a_out e^{ika}`
    pub b_full: ScaledComplex,
    /// ψ_tr interior coefficient `κ_w⁻¹ P A_tr e^{ika}` on `[a, x_c]`.
    pub tr_left: ScaledComplex,
    /// ψ_ref interior coefficient `κ_w⁻¹ (P A_ref + P* b_out) e^{ika}` on `[a, x_c]`.
    pub ref_left: ScaledComplex,
    pub left: f64,
    pub right: f64,
    pub midpoint: f64,
}

impl ScatteringAmplitudes {
    pub fn q_value(&self) -> Complex64 {
        self.q.to_complex()
    }

    pub fn p_value(&self) -> Complex64 {
        self.p.to_complex()
    }

    pub fn a_full_value(&self) -> Complex64 {
        self.a_full.to_complex()
    }

    pub fn b_full_value(&self) -> Complex64 {
        self.b_full.to_complex()
    }
}

/// Outgoing amplitudes from the boundary functionals
/// `Q = [F' + ikF]_{x=b}`, `P = [G' + ikG]_{x=b}`:
///
/// `a_out = (Q/Q* - P/P*)/2`, `b_out = -(Q/Q* + P/P*)/2`.
///
/// With `Q = |Q|e^{iθ_Q}`, `P = |P|e^{iθ_P}` and `Δ = θ_Q - θ_P` these are
/// `a_out = i e^{i(θ_Q+θ_P)} sin Δ` and `b_out = -e^{i(θ_Q+θ_P)} cos Δ`.
/// `Δ` is taken as `arg(Q P*)` with `Im(Q P*) = -k κ_w`, which is exact and
/// keeps `a_out` accurate when the two phasors nearly cancel.
pub fn amplitudes(basis: &RealBasisPair, spec: &BarrierSpec) -> Result<ScatteringAmplitudes> {
    let k = basis.k;
    let a = spec.left();
    let kw = basis.wronskian_kappa;
    let at_b = basis.at(spec.right());
    let (f, g) = (at_b.f, at_b.g);
    let qm = Complex64::new(f.deriv, k * f.value);
    let pm = Complex64::new(g.deriv, k * g.value);
    let (ln_f, ln_g) = (f.ln_scale, g.ln_scale);
    let q = ScaledComplex::new(qm, ln_f);
    let p = ScaledComplex::new(pm, ln_g);

    let re_qp = f.deriv * g.deriv + k * k * f.value * g.value;
    let im_qp = -k * kw * (-(ln_f + ln_g)).exp();
    let delta = im_qp.atan2(re_qp);
    let theta_q = qm.arg();
    let theta_p = theta_q - delta;
    let phase = Complex64::from_polar(1.0, theta_q + theta_p);
    let (sin_d, cos_d) = delta.sin_cos();
    let a_out = I * phase * sin_d;
    let b_out = -phase * cos_d;

    let ln_transmission = 2.0 * ((k * kw.abs()).ln() - q.ln_norm() - p.ln_norm());
    if a_out.norm() == 0.0 || !a_out.is_finite() {
        return Err(Error::DegenerateBoundary {
            ln_q: q.ln_norm(),
            ln_p: p.ln_norm(),
        });
    }

    let a_in_ref = b_out.conj() * (b_out + a_out);
    let a_in_tr = a_out * (a_out.conj() - b_out.conj());
    let eika = Complex64::from_polar(1.0, k * a);
    let a_full = ScaledComplex::new(-pm.conj() * a_out * eika / kw, ln_g);
    let b_full = ScaledComplex::new(qm.conj() * a_out * eika / kw, ln_f);
    let tr_left = ScaledComplex::new(pm * a_in_tr * eika / kw, ln_g);
    // P A_ref + P* b_out = e^{ln_g} (P̃ A_ref + P̃* b_out)
    let ref_left = ScaledComplex::new((pm * a_in_ref + pm.conj() * b_out) * eika / kw, ln_g);

    Ok(ScatteringAmplitudes {
        k,
        a_out,
        b_out,
        a_in_tr,
        a_in_ref,
        transmission: a_out.norm_sqr(),
        reflection: b_out.norm_sqr(),
        ln_transmission,
        q,
        p,
        a_full,
        b_full,
        tr_left,
        ref_left,
        left: a,
        right: spec.right(),
        midpoint: spec.midpoint(),
    })
}

/// Value with one-sided derivatives; the two agree except at a joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub value: Complex64,
    pub deriv_left: Complex64,
    pub deriv_right: Complex64,
}

impl WavePoint {
    pub fn smooth(value: Complex64, deriv: Complex64) -> Self {
        Self {
            value,
            deriv_left: value * 0.0 + deriv,
            deriv_right: deriv,
        }
    }

    pub fn zero() -> Self {
        Self::smooth(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn derivative(&self) -> Complex64 {
        self.deriv_right
    }

    pub fn is_kink(&self) -> bool {
        self.deriv_left != self.deriv_right
    }

    /// `(ħ/m) Im(ψ* ψ')` from the left and from the right.
    pub fn current_sides(&self, constants: &PhysicalConstants) -> (f64, f64) {
        let s = constants.hbar / constants.mass;
        (
            s * (self.value.conj() * self.deriv_left).im,
            s * (self.value.conj() * self.deriv_right).im,
        )
    }

    pub fn current(&self, constants: &PhysicalConstants) -> f64 {
        self.current_sides(constants).1
    }
}

/// Interior combination `α F + β G` and its derivative.
pub(crate) fn combine(alpha: &ScaledComplex, beta: &ScaledComplex, p: &BasisPoint) -> (Complex64, Complex64) {
    let v = alpha.times(p.f.value, p.f.ln_scale) + beta.times(p.g.value, p.g.ln_scale);
    let d = alpha.times(p.f.deriv, p.f.ln_scale) + beta.times(p.g.deriv, p.g.ln_scale);
    (v, d)
}

/// Full stationary state: incident plus reflected wave for `x <= a`,
/// `a_full F + b_full G` on the barrier, transmitted wave `a_out e^{ik(x-d)}` for `x > b`.
pub fn full_point(amps: &ScatteringAmplitudes, basis: &RealBasisPair, x: f64) -> WavePoint {
    let k = amps.k;
    let (a, b) = (amps.left, amps.right);
    if x <= a {
        let inc = Complex64::from_polar(1.0, k * x);
        let refl = amps.b_out * Complex64::from_polar(1.0, k * (2.0 * a - x));
        WavePoint::smooth(inc + refl, I * k * (inc - refl))
    } else if x <= b {
        let (v, d) = combine(&amps.a_full, &amps.b_full, &basis.at(x));
        WavePoint::smooth(v, d)
    } else {
        let t = amps.a_out * Complex64::from_polar(1.0, k * (x - (b - a)));
        WavePoint::smooth(t, I * k * t)
    }
}

pub fn full_wavefunction(amps: &ScatteringAmplitudes, basis: &RealBasisPair, _spec: &BarrierSpec, x: f64) -> Complex64 {
    full_point(amps, basis, x).value
}

/// Basis and amplitudes at one k, bundled.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub basis: RealBasisPair,
    pub amps: ScatteringAmplitudes,
}

impl StationaryState {
    pub fn new(spec: &BarrierSpec, constants: &PhysicalConstants, k: f64) -> Result<Self> {
        Self::with_options(spec, constants, k, &SolverOptions::default())
    }

    pub fn with_options(
        spec: &BarrierSpec,
        constants: &PhysicalConstants,
        k: f64,
        options: &SolverOptions,
    ) -> Result<Self> {
        let basis = solve_basis_with(spec, constants, k, options)?;
        let amps = amplitudes(&basis, spec)?;
        Ok(Self { basis, amps })
    }

    pub fn from_energy(spec: &BarrierSpec, constants: &PhysicalConstants, energy: f64) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::InvalidParameter(format!("energy {energy} must be positive")));
        }
        Self::new(spec, constants, constants.wavenumber(energy))
    }

    pub fn full(&self, x: f64) -> WavePoint {
        full_point(&self.amps, &self.basis, x)
    }
}

/// One row of a k-sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub energy: f64,
    pub k: f64,
    pub amps: ScatteringAmplitudes,
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "E", "k", "T", "R", "re_a_out", "im_a_out", "re_b_out", "im_b_out", "re_A_in_tr", "im_A_in_tr",
    "re_A_in_ref", "im_A_in_ref",
];

impl SweepRow {
    pub fn values(&self) -> [f64; 12] {
        let a = &self.amps;
        [
            self.energy,
            self.k,
            a.transmission,
            a.reflection,
            a.a_out.re,
            a.a_out.im,
            a.b_out.re,
            a.b_out.im,
            a.a_in_tr.re,
            a.a_in_tr.im,
            a.a_in_ref.re,
            a.a_in_ref.im,
        ]
    }
}

/// Amplitudes over a list of energies.
pub fn energy_sweep(
    spec: &BarrierSpec,
    constants: &PhysicalConstants,
    energies: &[f64],
    policy: ExecPolicy,
) -> Result<Vec<SweepRow>> {
    policy.try_map(energies, |&energy| {
        let state = StationaryState::from_energy(spec, constants, energy)?;
        Ok(SweepRow {
            energy,
            k: state.amps.k,
            amps: state.amps,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect() -> BarrierSpec {
        BarrierSpec::rectangular(2.0, 0.0, 1.0)
    }

    /// Textbook rectangular-barrier transmission, independent of the F/G pipeline.
    fn textbook_t(v0: f64, d: f64, e: f64) -> f64 {
        let k = (2.0 * e).sqrt();
        let kappa = (2.0 * (v0 - e)).sqrt();
        let k0sq = 2.0 * v0;
        1.0 / (1.0 + k0sq * k0sq * (kappa * d).sinh().powi(2) / (4.0 * k * k * kappa * kappa))
    }

    #[test]
    fn rectangular_basis_is_sinh_cosh() {
        let c = PhysicalConstants::default();
        let basis = solve_basis(&rect(), &c, 2f64.sqrt()).unwrap();
        let kappa = 2f64.sqrt();
        for &x in &[0.0, 0.2, 0.5, 0.77, 1.0] {
            let [f, df, g, dg] = basis.at(x).values();
            let xi = x - 0.5;
            assert!((f - (kappa * xi).sinh() / kappa).abs() < 1e-14);
            assert!((df - (kappa * xi).cosh()).abs() < 1e-14);
            assert!((g - (kappa * xi).cosh()).abs() < 1e-14);
            assert!((dg - kappa * (kappa * xi).sinh()).abs() < 1e-14);
        }
    }

    #[test]
    fn free_basis_is_sin_cos() {
        let spec = BarrierSpec::rectangular(0.0, -1.0, 2.0);
        let k = 1.3;
        let basis = solve_basis(&spec, &PhysicalConstants::default(), k).unwrap();
        for &x in &[-1.0, 0.0, 0.5, 1.9] {
            let [f, _, g, _] = basis.at(x).values();
            let xi = x - 0.5;
            assert!((f - (k * xi).sin() / k).abs() < 1e-14);
            assert!((g - (k * xi).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_even_at_midpoint() {
        let spec = BarrierSpec::double_rectangular(3.0, 0.7, 1.1, -0.4);
        let basis = solve_basis(&spec, &PhysicalConstants::default(), 1.1).unwrap();
        let p = basis.at(spec.midpoint());
        assert_eq!(p.f.value, 0.0);
        assert_eq!(p.g.deriv, 0.0);
        let xc = spec.midpoint();
        for &xi in &[0.1, 0.5, 1.2] {
            let [fl, dfl, gl, dgl] = basis.at(xc - xi).values();
            let [fr, dfr, gr, dgr] = basis.at(xc + xi).values();
            assert!((fl + fr).abs() < 1e-12 && (dfl - dfr).abs() < 1e-12);
            assert!((gl - gr).abs() < 1e-12 && (dgl + dgr).abs() < 1e-12);
        }
    }

    #[test]
    fn transmission_matches_textbook() {
        let c = PhysicalConstants::default();
        let s = StationaryState::from_energy(&rect(), &c, 1.0).unwrap();
        let t = textbook_t(2.0, 1.0, 1.0);
        assert!((s.amps.transmission - t).abs() < 1e-14, "{} vs {}", s.amps.transmission, t);
        // frozen from the textbook formula
        assert!((t - 0.210_771_093_966_130_6).abs() < 1e-15);
        assert!((s.amps.ln_transmission - t.ln()).abs() < 1e-12);
    }

    #[test]
    fn polar_form_matches_direct_phasors() {
        let c = PhysicalConstants::default();
        let spec = BarrierSpec::double_rectangular(1.5, 0.6, 0.9, 0.0);
        for &k in &[0.3, 1.0, 1.7, 2.9] {
            let s = StationaryState::new(&spec, &c, k).unwrap();
            let q = s.amps.q_value();
            let p = s.amps.p_value();
            let a = 0.5 * (q / q.conj() - p / p.conj());
            let b = -0.5 * (q / q.conj() + p / p.conj());
            assert!((a - s.amps.a_out).norm() < 1e-13);
            assert!((b - s.amps.b_out).norm() < 1e-13);
            // a b* is purely imaginary
            let cross = s.amps.a_out * s.amps.b_out.conj() + s.amps.a_out.conj() * s.amps.b_out;
            assert!(cross.norm() < 1e-14);
        }
    }

    #[test]
    fn transparent_barrier() {
        let spec = BarrierSpec::rectangular(0.0, 0.0, 1.0);
        let s = StationaryState::new(&spec, &PhysicalConstants::default(), 1.0).unwrap();
        assert!(s.amps.b_out.norm() < 1e-15);
        assert!((s.amps.a_out.norm() - 1.0).abs() < 1e-15);
        assert!((s.amps.a_in_tr - 1.0).norm() < 1e-15);
        assert!(s.amps.a_in_ref.norm() < 1e-15);
        for &x in &[-3.0, 0.4, 2.5] {
            let v = s.full(x).value;
            assert!((v - Complex64::from_polar(1.0, x)).norm() < 1e-14);
        }
    }

    #[test]
    fn full_wavefunction_is_c1_at_edges() {
        let c = PhysicalConstants::default();
        let s = StationaryState::from_energy(&rect(), &c, 1.0).unwrap();
        for &edge in &[0.0, 1.0] {
            let eps = 1e-12;
            let l = s.full(edge - eps);
            let r = s.full(edge + eps);
            assert!((l.value - r.value).norm() < 1e-8 * l.value.norm().max(1.0));
            assert!((l.derivative() - r.derivative()).norm() < 1e-8 * l.derivative().norm().max(1.0));
        }
        // joining at b: interior equals a_out e^{ika}
        let inner = s.full(1.0).value;
        assert!((inner - s.amps.a_out).norm() < 1e-14);
        for &x in &[1.5, 3.0, 10.0] {
            assert!((s.full(x).value.norm_sqr() - s.amps.transmission).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_matches_analytic_at_b() {
        let c = PhysicalConstants::default();
        let k = 2f64.sqrt();
        let exact = solve_basis(&rect(), &c, k).unwrap().at(1.0).values();
        let sampled = rect().to_sampled(64);
        let basis = solve_basis(&sampled, &c, k).unwrap();
        assert!(basis.is_integrated());
        let got = basis.at(1.0).values();
        for i in 0..4 {
            assert!(((got[i] - exact[i]) / exact[i]).abs() < 1e-6, "{i}: {} vs {}", got[i], exact[i]);
        }
    }

    #[test]
    fn integrator_agrees_with_analytic() {
        let c = PhysicalConstants::default();
        let spec = BarrierSpec::PiecewiseConstant {
            left: 0.0,
            segments: vec![
                crate::potential::Segment { length: 0.3, height: 2.5 },
                crate::potential::Segment { length: 0.7, height: -0.5 },
                crate::potential::Segment { length: 0.45, height: 1.0 },
                crate::potential::Segment { length: 0.7, height: -0.5 },
                crate::potential::Segment { length: 0.3, height: 2.5 },
            ],
        };
        for &k in &[0.5, 1.0, 2.3] {
            let a = solve_basis(&spec, &c, k).unwrap();
            let opts = SolverOptions {
                method: BasisMethod::Integrator,
                ..Default::default()
            };
            let n = solve_basis_with(&spec, &c, k, &opts).unwrap();
            let (va, vn) = (a.at(spec.right()).values(), n.at(spec.right()).values());
            for i in 0..4 {
                let scale = va.iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!((va[i] - vn[i]).abs() < 1e-6 * scale.max(va[i].abs()));
            }
        }
    }

    #[test]
    fn wronskian_and_residual() {
        let c = PhysicalConstants::default();
        let spec = BarrierSpec::double_rectangular(4.0, 0.8, 0.5, 0.0);
        let basis = solve_basis(&spec, &c, 1.2).unwrap();
        assert!(basis.wronskian_drift(400) < 1e-10);
        assert!(basis.residual(&spec, 4096) < 1e-6);
        let sampled = BarrierSpec::Sampled(crate::potential::SampledPotential::from_fn(0.0, 2.0, 256, |x| {
            3.0 * (-(x - 1.0) * (x - 1.0) * 4.0).exp()
        }));
        let basis = solve_basis(&sampled, &c, 1.0).unwrap();
        assert!(basis.wronskian_drift(1000) < 1e-8);
    }

    #[test]
    fn equal_energy_uses_linear_branch() {
        let c = PhysicalConstants::default();
        // E = 0.5 exactly equals the slab height
        let spec = BarrierSpec::rectangular(0.5, 0.0, 2.0);
        let basis = solve_basis(&spec, &c, 1.0).unwrap();
        let [f, df, g, dg] = basis.at(2.0).values();
        assert!((f - 1.0).abs() < 1e-15 && (df - 1.0).abs() < 1e-15);
        assert!((g - 1.0).abs() < 1e-15 && dg.abs() < 1e-15);
        let s = StationaryState::new(&spec, &c, 1.0).unwrap();
        assert!((s.amps.transmission + s.amps.reflection - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rescaling_leaves_amplitudes_unchanged() {
        let c = PhysicalConstants::default();
        let spec = rect();
        let basis = solve_basis(&spec, &c, 1.0).unwrap();
        let a0 = amplitudes(&basis, &spec).unwrap();
        let a1 = amplitudes(&basis.rescaled(3.0, 0.5), &spec).unwrap();
        assert!((a0.a_out - a1.a_out).norm() < 1e-12);
        assert!((a0.a_full_value() * 1.0 - a1.a_full_value() * 3.0).norm() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_k() {
        let c = PhysicalConstants::default();
        assert!(matches!(solve_basis(&rect(), &c, 0.0), Err(Error::NonpositiveWavenumber(_))));
        assert!(matches!(solve_basis(&rect(), &c, -1.0), Err(Error::NonpositiveWavenumber(_))));
    }

    #[test]
    fn opaque_barrier_keeps_log_transmission() {
        let c = PhysicalConstants::default();
        // κd ≈ 2000: T underflows, but ln T is exact
        let spec = BarrierSpec::rectangular(2.0, 0.0, 1000.0);
        let basis = solve_basis(&spec, &c, 1.0).unwrap();
        let err = amplitudes(&basis, &spec).unwrap_err();
        assert!(matches!(err, Error::DegenerateBoundary { .. }));
        let spec = BarrierSpec::rectangular(2.0, 0.0, 100.0);
        let s = StationaryState::new(&spec, &c, 1.0).unwrap();
        let kappa = 3f64.sqrt();
        let k0sq: f64 = 4.0;
        // opaque limit: T ≈ 16 k²κ²/κ0⁴ e^{-2κd}
        let expect = (16.0 * kappa * kappa / (k0sq * k0sq)).ln() - 2.0 * kappa * 100.0;
        assert!((s.amps.ln_transmission - expect).abs() < 1e-9);
        assert!((s.amps.transmission.ln() - expect).abs() < 1e-6);
    }
}
