use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the numerical kernels can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (pivot {pivot:.3e}, condition estimate {condition_estimate:.3e})")]
    SingularMatrix { pivot: f64, condition_estimate: f64 },
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),

    #[error("cylinder function is singular at the origin")]
    DomainError,
    #[error("cylinder function outside its validated range: {0}")]
    AccuracyLoss(&'static str),

    #[error("invalid material: {0}")]
    InvalidMaterial(&'static str),
    #[error("radial stiffness block is singular")]
    MaterialSingular,
    #[error("radius {r} is outside the profile support [{r_min}, {r_max}]")]
    OutOfSupport { r: f64, r_min: f64, r_max: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(&'static str),
    #[error("in-plane/antiplane reduction requires kz = 0 and a z-mirror symmetric material")]
    NoDecoupling,
    #[error("invalid wave context: {0}")]
    InvalidContext(&'static str),

    #[error("step too large: |hQ| = {norm:.3e} exceeds 20")]
    StepTooLarge { norm: f64 },
    #[error("interpolation abscissae are not distinct")]
    DuplicatePoints,
    #[error("invalid integration request: {0}")]
    InvalidSpan(&'static str),

    #[error("two-point impedance is undefined for a degenerate span")]
    DegenerateSpan,
    #[error("Z1 - z0 is singular (inner resonance)")]
    ResonantInner,

    #[error("coupling numbers are undefined at kz = 0")]
    KzZeroCoupling,
    #[error("exact impedance is singular at r = {r} (mode resonance)")]
    ModeResonance { r: f64 },
    #[error("displacement basis is degenerate for both {{J, H1}} and {{J, Y}}")]
    BasisDegenerate,
    #[error("Z4a + Z1b is singular (interface resonance)")]
    InterfaceResonance,
    #[error("layers are not contiguous: {0}")]
    NonContiguous(&'static str),

    #[error("tangential impedance q2 vanishes (traction-free tangential mode)")]
    TangentialResonance,
    #[error("field point at r = {r} lies inside the scatterer")]
    InteriorPoint { r: f64 },
    #[error("invalid scattering request: {0}")]
    InvalidScattering(&'static str),
}
