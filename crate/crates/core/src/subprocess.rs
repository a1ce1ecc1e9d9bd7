//! Transmission and reflection subprocess waves.
//!
//! Both channels are joined at the barrier midpoint `x_c`. Left of `x_c`
//! they are built from the incoming splitting coefficients; right of `x_c`
//! the reflection wave vanishes and the transmission wave equals the full
//! state.

use num_complex::Complex64;

use crate::error::Result;
use crate::exec::ExecPolicy;
use crate::potential::{BarrierSpec, PhysicalConstants};
use crate::stationary::{combine, full_point, RealBasisPair, ScatteringAmplitudes, StationaryState, WavePoint};
use crate::table::{Cell, Table};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Transmission,
    Reflection,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Transmission => "tr",
            Channel::Reflection => "ref",
        }
    }
}

/// One channel of the decomposition at fixed k.
#[derive(Debug, Clone, Copy)]
pub struct SubprocessWave<'a> {
    pub channel: Channel,
    pub amps: &'a ScatteringAmplitudes,
    pub basis: &'a RealBasisPair,
}

impl<'a> SubprocessWave<'a> {
    pub fn new(channel: Channel, state: &'a StationaryState) -> Self {
        Self {
            channel,
            amps: &state.amps,
            basis: &state.basis,
        }
    }

    pub fn point(&self, x: f64) -> WavePoint {
        match self.channel {
            Channel::Transmission => transmission_point(self.amps, self.basis, x),
            Channel::Reflection => reflection_point(self.amps, self.basis, x),
        }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.point(x).value
    }

    pub fn current(&self, constants: &PhysicalConstants, x: f64) -> f64 {
        self.point(x).current(constants)
    }
}

fn plane(amp: Complex64, k: f64, x: f64) -> (Complex64, Complex64) {
    let v = amp * Complex64::from_polar(1.0, k * x);
    (v, I * k * v)
}

pub fn transmission_point(amps: &ScatteringAmplitudes, basis: &RealBasisPair, x: f64) -> WavePoint {
    let (a, xc) = (amps.left, amps.midpoint);
    if x <= a {
        let (v, d) = plane(amps.a_in_tr, amps.k, x);
        WavePoint::smooth(v, d)
    } else if x < xc {
        let (v, d) = combine(&amps.tr_left, &amps.b_full, &basis.at(x));
        WavePoint::smooth(v, d)
    } else if x == xc {
        let p = basis.at(x);
        let (v, dl) = combine(&amps.tr_left, &amps.b_full, &p);
        let (_, dr) = combine(&amps.a_full, &amps.b_full, &p);
        WavePoint {
            value: v,
            deriv_left: dl,
            deriv_right: dr,
        }
    } else {
        full_point(amps, basis, x)
    }
}

pub fn reflection_point(amps: &ScatteringAmplitudes, basis: &RealBasisPair, x: f64) -> WavePoint {
    let (a, xc, k) = (amps.left, amps.midpoint, amps.k);
    let zero = Complex64::new(0.0, 0.0);
    if x <= a {
        let inc = amps.a_in_ref * Complex64::from_polar(1.0, k * x);
        let refl = amps.b_out * Complex64::from_polar(1.0, k * (2.0 * a - x));
        WavePoint::smooth(inc + refl, I * k * (inc - refl))
    } else if x <= xc {
        let p = basis.at(x);
        let none = crate::scaled::ScaledComplex::plain(zero);
        let (v, d) = combine(&amps.ref_left, &none, &p);
        if x == xc {
            WavePoint {
                value: zero,
                deriv_left: d,
                deriv_right: zero,
            }
        } else {
            WavePoint::smooth(v, d)
        }
    } else {
        WavePoint::zero()
    }
}

pub fn psi_tr(amps: &ScatteringAmplitudes, basis: &RealBasisPair, _spec: &BarrierSpec, x: f64) -> Complex64 {
    transmission_point(amps, basis, x).value
}

pub fn psi_ref(amps: &ScatteringAmplitudes, basis: &RealBasisPair, _spec: &BarrierSpec, x: f64) -> Complex64 {
    reflection_point(amps, basis, x).value
}

/// Probability current `(ħ/m) Im(ψ* ψ')` from the right-hand derivative.
pub fn current(point: &WavePoint, constants: &PhysicalConstants) -> f64 {
    point.current(constants)
}

/// Table with columns `x, re_psi_tr, im_psi_tr, re_psi_ref, im_psi_ref, abs2_psi_full, j_tr, j_ref`.
pub fn profile_table(state: &StationaryState, constants: &PhysicalConstants, xs: &[f64], policy: ExecPolicy) -> Result<Table> {
    let mut table = Table::new(
        "subprocess",
        &[
            ("x", "length"),
            ("re_psi_tr", ""),
            ("im_psi_tr", ""),
            ("re_psi_ref", ""),
            ("im_psi_ref", ""),
            ("abs2_psi_full", ""),
            ("j_tr", "1/time"),
            ("j_ref", "1/time"),
        ],
    );
    let rows = policy.map(xs, |&x| {
        let tr = transmission_point(&state.amps, &state.basis, x);
        let rf = reflection_point(&state.amps, &state.basis, x);
        let full = state.full(x);
        vec![
            Cell::Num(x),
            Cell::Num(tr.value.re),
            Cell::Num(tr.value.im),
            Cell::Num(rf.value.re),
            Cell::Num(rf.value.im),
            Cell::Num(full.value.norm_sqr()),
            Cell::Num(tr.current(constants)),
            Cell::Num(rf.current(constants)),
        ]
    });
    for r in rows {
        table.push(r);
    }
    Ok(table)
}
