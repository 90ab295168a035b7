use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("pulse does not fit inside the time grid: {0}")]
    PulseOutsideGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("comb tooth under-resolved: {bins_per_tooth:.2} bins per tooth, need at least {required}")]
    UnderResolvedTooth { bins_per_tooth: f64, required: usize },

    #[error("pulse bandwidth exceeds comb: only {fraction_inside:.4} of the spectral energy lies inside the comb (need {required})")]
    BandwidthExceedsComb { fraction_inside: f64, required: f64 },

    #[error("echo does not fit inside the time grid: {0}")]
    EchoBeyondGrid(String),

    #[error("frequency shift {shift_hz} Hz exceeds the grid Nyquist frequency {nyquist_hz} Hz")]
    ShiftBeyondNyquist { shift_hz: f64, nyquist_hz: f64 },

    #[error("time slots of channels {first} and {second} overlap")]
    OverlappingSlots { first: usize, second: usize },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("efficiency point {index} is not positive ({value})")]
    NonPositiveEfficiency { index: usize, value: f64 },

    #[error("zero singles counts: g2 is undefined")]
    ZeroSingles,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
