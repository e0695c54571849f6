use thiserror::Error;

/// Errors shared across the crate.
///
/// Numerical tolerance violations carry the measured residue so callers can
/// report how far an input was from satisfying the contract.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residue {residue:.3e} exceeds {tol:.3e})")]
    NotHermitian { residue: f64, tol: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("strategy basis is not orthonormal (worst Gram residue {0:.3e})")]
    NotOrthonormal(f64),

    #[error("operator lies outside the strategy basis span (residue {0:.3e})")]
    OutsideSpan(f64),

    #[error("strategy coefficients are not unit norm (|c|^2 = {0:.6})")]
    NotUnitNorm(f64),

    #[error("state is not restricted: largest imaginary entry {0:.3e}")]
    NotRestricted(f64),

    #[error("basis change is not unitary (residue {0:.3e}); old and new bases span different subspaces")]
    NotUnitaryTransform(f64),

    #[error("unknown strategy label {label:?} for player {player}")]
    UnknownLabel { player: usize, label: String },

    #[error("unknown builtin game {0:?}")]
    UnknownBuiltin(String),

    #[error("invalid game definition: {0}")]
    InvalidGame(String),

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires a product-form profile")]
    ProductProfileRequired,

    #[error("operation requires diagonal payoff operators (largest off-diagonal entry {0:.3e})")]
    DiagonalGameRequired(f64),

    #[error("payoff operators do not pairwise commute (worst commutator norm {0:.3e})")]
    NotCommuting(f64),

    #[error("payoff has imaginary residue {0:.3e}; operator or state violates Hermiticity")]
    ImaginaryResidue(f64),

    #[error("state parameters violate positive semidefiniteness (smallest eigenvalue {0:.3e})")]
    PsdViolation(f64),

    #[error("eigensolver failed to converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
