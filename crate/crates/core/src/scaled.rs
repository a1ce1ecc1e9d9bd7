//! Log-scaled real states and complex coefficients.
//!
//! Opaque barriers drive the basis solutions to magnitudes that overflow
//! `f64`. A value is stored as a mantissa times `exp(ln_scale)`; products of
//! huge basis values with tiny coefficients are combined in log space.

use num_complex::Complex64;

const RENORM_LN: f64 = 30.0;

/// Solution value and derivative `(u, u') * exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub value: f64,
    pub deriv: f64,
    pub ln_scale: f64,
}

impl ScaledState {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self {
            value,
            deriv,
            ln_scale: 0.0,
        }
    }

    /// Moves any magnitude beyond `e^±30` into `ln_scale`.
    pub fn renormalized(self) -> Self {
        let mag = self.value.abs().max(self.deriv.abs());
        if mag == 0.0 || !mag.is_finite() {
            return self;
        }
        let ln = mag.ln();
        if ln.abs() <= RENORM_LN {
            return self;
        }
        Self {
            value: self.value / mag,
            deriv: self.deriv / mag,
            ln_scale: self.ln_scale + ln,
        }
    }

    /// Re-expresses the state at a given scale.
    pub fn at_scale(self, ln_scale: f64) -> (f64, f64) {
        let f = (self.ln_scale - ln_scale).exp();
        (self.value * f, self.deriv * f)
    }

    pub fn actual_value(&self) -> f64 {
        self.value * self.ln_scale.exp()
    }

    pub fn actual_deriv(&self) -> f64 {
        self.deriv * self.ln_scale.exp()
    }

    pub fn scaled_by(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            deriv: self.deriv * factor,
            ln_scale: self.ln_scale,
        }
    }

    /// Mirror image for an odd function: `u(-ξ) = -u(ξ)`, `u'(-ξ) = u'(ξ)`.
    pub fn odd_reflection(self) -> Self {
        Self {
            value: -self.value,
            ..self
        }
    }

    /// Mirror image for an even function: `u(-ξ) = u(ξ)`, `u'(-ξ) = -u'(ξ)`.
    pub fn even_reflection(self) -> Self {
        Self {
            deriv: -self.deriv,
            ..self
        }
    }

    /// ln of the state magnitude `max(|u|, |u'|)`.
    pub fn ln_magnitude(&self) -> f64 {
        self.value.abs().max(self.deriv.abs()).ln() + self.ln_scale
    }
}

/// Complex number `mantissa * exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub ln_scale: f64,
}

impl ScaledComplex {
    pub fn new(mantissa: Complex64, ln_scale: f64) -> Self {
        Self { mantissa, ln_scale }
    }

    pub fn plain(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    pub fn ln_norm(&self) -> f64 {
        self.mantissa.norm().ln() + self.ln_scale
    }

    pub fn to_complex(&self) -> Complex64 {
        self.times(1.0, 0.0)
    }

    /// `self * x * exp(ln_x)` without forming either factor alone.
    pub fn times(&self, x: f64, ln_x: f64) -> Complex64 {
        let mag = self.mantissa.norm();
        let ax = x.abs();
        if mag == 0.0 || ax == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = self.mantissa / mag * x.signum();
        phase * (mag.ln() + ax.ln() + self.ln_scale + ln_x).exp()
    }
}
