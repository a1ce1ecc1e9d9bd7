//! Coherent transmission/reflection decomposition of 1D scattering on
//! symmetric barriers, subprocess dwell times, spectral wave packets and the
//! midplane decomposition of symmetric two-slit diffraction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dwell;
pub mod error;
pub mod exec;
pub mod potential;
pub mod quadrature;
pub mod scaled;
pub mod stationary;
pub mod subprocess;
pub mod table;
pub mod twoslit;
pub mod wavepacket;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use potential::{BarrierSpec, PhysicalConstants, SampledPotential, Segment};
pub use stationary::{RealBasisPair, ScatteringAmplitudes, StationaryState, WavePoint};
pub use subprocess::{Channel, SubprocessWave};
pub use table::{Cell, Table};
