use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mass parameter must lie in (0,1), got {0}")]
    InvalidMass(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support overflow: amplitude reached the edge of the open window ({0})")]
    SupportOverflow(String),

    #[error("state vanishes after antisymmetrization (input was purely symmetric)")]
    ZeroAfterProjection,

    #[error("interaction trivial: e^{{iχ}}={0}")]
    TrivialInteraction(i32),

    #[error("transmission coefficient has a pole (|denominator| = {0:e})")]
    Resonance(f64),

    #[error("degenerate relative momentum k = {0}: the scattering ansatz collapses to zero")]
    DegenerateMomentum(f64),

    #[error("localized state requires e^{{iχ}} = e^{{±2ip}}; got χ = {chi}, p = {p}")]
    LocalizedCondition { chi: f64, p: f64 },

    #[error("no bound-state root found on the lines Γ_l (scanned {scanned} points): {detail}")]
    NoBoundRoot { scanned: usize, detail: String },

    #[error("dense diagonalization failed: {0}")]
    Diagonalization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
