use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential is not mirror-symmetric about the midpoint (max deviation {deviation:e} > tol {tol:e})")]
    AsymmetricPotential { deviation: f64, tol: f64 },
    #[error("barrier support is empty or has non-positive extent: {0}")]
    EmptySupport(String),
    #[error("sample grid is not strictly increasing at index {index}")]
    NonmonotonicGrid { index: usize },
    #[error("sample grid is not uniform (spacing deviation {deviation:e})")]
    NonuniformGrid { deviation: f64 },
    #[error("sample grid must have an even number of intervals, got {0}")]
    OddIntervalCount(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wavenumber must be positive, got {0}")]
    NonpositiveWavenumber(f64),
    #[error("basis integration unstable: residual {residual:e} exceeds {threshold:e}")]
    IntegrationUnstable { residual: f64, threshold: f64 },
    #[error("boundary functional degenerate (ln|Q| = {ln_q:.1}, ln|P| = {ln_p:.1}); amplitudes are not representable")]
    DegenerateBoundary { ln_q: f64, ln_p: f64 },
    #[error("transmission {transmission:e} is below the representable floor")]
    NumericallyOpaque { transmission: f64 },
    #[error("closed forms only cover E < V0 (E = {energy}, V0 = {height})")]
    EnergyAboveBarrier { energy: f64, height: f64 },
    #[error("x-grid too narrow: {leak:e} of the norm sits at the grid edges")]
    GridTooNarrow { leak: f64 },
    #[error("spectral grid under-resolved: doubling nodes shifts a norm by {shift:e}")]
    SpectralUnderresolved { shift: f64 },
    #[error("channel norm {norm:e} is too small for expectation values")]
    ChannelEmpty { norm: f64 },
    #[error("propagation to negative planes is not supported (x = {0})")]
    NegativePlane(f64),
    #[error("operation expects a two-slit field, got channel {0}")]
    WrongChannel(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name, used on diagnostic streams.
    pub fn name(&self) -> &'static str {
        match self {
            Error::AsymmetricPotential { .. } => "AsymmetricPotential",
            Error::EmptySupport(_) => "EmptySupport",
            Error::NonmonotonicGrid { .. } => "NonmonotonicGrid",
            Error::NonuniformGrid { .. } => "NonuniformGrid",
            Error::OddIntervalCount(_) => "OddIntervalCount",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonpositiveWavenumber(_) => "NonpositiveWavenumber",
            Error::IntegrationUnstable { .. } => "IntegrationUnstable",
            Error::DegenerateBoundary { .. } => "DegenerateBoundary",
            Error::NumericallyOpaque { .. } => "NumericallyOpaque",
            Error::EnergyAboveBarrier { .. } => "EnergyAboveBarrier",
            Error::GridTooNarrow { .. } => "GridTooNarrow",
            Error::SpectralUnderresolved { .. } => "SpectralUnderresolved",
            Error::ChannelEmpty { .. } => "ChannelEmpty",
            Error::NegativePlane(_) => "NegativePlane",
            Error::WrongChannel(_) => "WrongChannel",
            Error::Io(_) => "IoError",
            Error::Parse(_) => "ConfigParse",
        }
    }

    /// Input/config problems as opposed to numerical failures.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::AsymmetricPotential { .. }
                | Error::EmptySupport(_)
                | Error::NonmonotonicGrid { .. }
                | Error::NonuniformGrid { .. }
                | Error::OddIntervalCount(_)
                | Error::InvalidParameter(_)
                | Error::NonpositiveWavenumber(_)
                | Error::EnergyAboveBarrier { .. }
                | Error::NegativePlane(_)
                | Error::WrongChannel(_)
                | Error::Parse(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
