use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A layer size, fan-out or similar count was zero.
    ZeroSize(&'static str),
    /// `n_left * fan_out` is not a multiple of `n_right`.
    NonIntegralFanIn { n_left: usize, n_right: usize, fan_out: usize },
    FanOutTooLarge { fan_out: usize, n_right: usize },
    FanInTooLarge { fan_in: usize, n_left: usize },
    EmptyNetwork,
    /// Junction span outside `0..junction_count` or reversed.
    BadSpan { first: usize, last: usize, junctions: usize },
    /// `junction` is 0-based; the message counts from 1.
    InfeasibleLocality { junction: usize, reason: &'static str },
    NonIntegralWindow { layer_size: usize, windows: usize },
    DimensionMismatch { expected: usize, found: usize },
    LengthMismatch { left: usize, right: usize },
    BadLabel { label: usize, classes: usize },
    EmptyDataset,
    FrameOverflow { codeword_len: usize, max_shift: usize, frame: usize },
    BadMagic { expected: u32, found: u32 },
    TruncatedFile { expected: usize, found: usize },
    CountMismatch { images: usize, labels: usize },
    /// A pattern that violates the fixed fan-in/fan-out or simplicity invariants.
    InvalidPattern(&'static str),
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroSize(what) => write!(f, "{what} must be positive"),
            Error::NonIntegralFanIn { n_left, n_right, fan_out } => write!(
                f,
                "fan-in is not integral: {n_left} * {fan_out} is not divisible by {n_right}"
            ),
            Error::FanOutTooLarge { fan_out, n_right } => {
                write!(f, "fan-out {fan_out} exceeds right layer size {n_right}")
            }
            Error::FanInTooLarge { fan_in, n_left } => {
                write!(f, "fan-in {fan_in} exceeds left layer size {n_left}")
            }
            Error::EmptyNetwork => f.write_str("network has no junctions"),
            Error::BadSpan { first, last, junctions } => write!(
                f,
                "junction span {first}..={last} is invalid for a network with {junctions} junctions"
            ),
            Error::InfeasibleLocality { junction, reason } => {
                write!(f, "infeasible locality for junction {}: {reason}", junction + 1)
            }
            Error::NonIntegralWindow { layer_size, windows } => write!(
                f,
                "{windows} windows do not evenly partition a layer of {layer_size} neurons"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::BadLabel { label, classes } => {
                write!(f, "label {label} out of range for {classes} classes")
            }
            Error::EmptyDataset => f.write_str("dataset is empty"),
            Error::FrameOverflow { codeword_len, max_shift, frame } => write!(
                f,
                "codeword of {codeword_len} samples shifted by up to {max_shift} overflows a {frame}-sample frame"
            ),
            Error::BadMagic { expected, found } => {
                write!(f, "bad IDX magic: expected {expected:#010x}, found {found:#010x}")
            }
            Error::TruncatedFile { expected, found } => {
                write!(f, "truncated IDX payload: expected {expected} bytes, found {found}")
            }
            Error::CountMismatch { images, labels } => {
                write!(f, "{images} images but {labels} labels")
            }
            Error::InvalidPattern(why) => write!(f, "invalid connection pattern: {why}"),
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
        }
    }
}

impl core::error::Error for Error {}
