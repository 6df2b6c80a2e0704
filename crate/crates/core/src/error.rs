use thiserror::Error;

/// Named invariant of a cell state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    Depth,
    DistortionSpd,
    VerticalDistortion,
    Involution,
    Finite,
}

impl std::fmt::Display for Invariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Invariant::Depth => "H > 0",
            Invariant::DistortionSpd => "A symmetric positive definite",
            Invariant::VerticalDistortion => "A_cc > 0",
            Invariant::Involution => "H |det F| = 1",
            Invariant::Finite => "finite values",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("depth {h:e} below vacuum floor {floor:e}")]
    Vacuum { h: f64, floor: f64 },

    #[error("inadmissible state: {0} violated")]
    Inadmissible(Invariant),

    #[error("singular deformation gradient (|det F| = {det:e})")]
    SingularDeformation { det: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("Riemann fan has nonpositive starred depth on the {side} side (1/H* = {tau:e})")]
    InadmissibleFan { side: &'static str, tau: f64 },

    #[error("wave ordering violated: {lm} <= {l0} <= {lp} fails")]
    WaveOrdering { lm: f64, l0: f64, lp: f64 },

    #[error("face reconstruction failed: involution drift {drift:e} exceeds {tol:e}")]
    Reconstruction { drift: f64, tol: f64 },

    #[error("non-finite wave speed")]
    NonFiniteSpeed,

    #[error("interface ({i}, {j}) {dir}: {source}")]
    Interface {
        i: usize,
        j: usize,
        dir: char,
        #[source]
        source: Box<SvmError>,
    },

    #[error("cell ({i}, {j}): {source}")]
    Cell {
        i: usize,
        j: usize,
        #[source]
        source: Box<SvmError>,
    },

    #[error("step {step} at t = {t:.6e}: {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: Box<SvmError>,
    },
}

pub type Result<T> = std::result::Result<T, SvmError>;
