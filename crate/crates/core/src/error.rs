use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not idempotent (‖t²−t‖ = {residual:e})")]
    NotIdempotent { residual: f64 },
    #[error("t + tᴴ − 1 is numerically singular")]
    SingularPivot,
    #[error("map is numerically singular (σ_min = {sigma_min:e})")]
    SingularMap { sigma_min: f64 },
    #[error("matrix is not Hermitian (‖a − aᴴ‖ = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (‖uᴴu − 1‖ = {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("Γ is not contained in Γ′ (residual {residual:e})")]
    NotNested { residual: f64 },
    #[error("boundary condition does not lie in β (residual {residual:e})")]
    NotInBeta { residual: f64 },
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("Γ′ is not the annihilator of Γ")]
    NotAnnihilator,
    #[error("J is not a skew-adjoint unitary")]
    NotSymplectic,
    #[error("subspace is not transversal to (Γ, Γ′)")]
    NotTransversal,
    #[error("loop is not closed (closure gap {gap:e})")]
    NotClosed { gap: f64 },
    #[error("phase step {step:.4} rad at sample {index} exceeds π/2 and no refinement is available")]
    InsufficientSampling { index: usize, step: f64 },
    #[error("identity violated: {0}")]
    FormulaViolation(String),
    #[error("defect dimension changed along the family at sample {index}")]
    NonconstantDefect { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
