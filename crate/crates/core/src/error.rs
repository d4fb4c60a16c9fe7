use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration does not affinely span R^{dim} (affine span has dimension {span})")]
    SpanDeficient { dim: usize, span: usize },

    #[error("stress matrix has rank {found}, expected {expected}")]
    WrongRank { expected: usize, found: usize },

    #[error("matrix is not a stress matrix: {0}")]
    NotAStressMatrix(String),

    #[error("matrix is not an equilibrium stress of the framework (residual {residual:e})")]
    NotAStress { residual: f64 },

    #[error("no affinely independent set of {0} pin vertices")]
    PinningFailed(usize),

    #[error("graph is {found}-connected, {required}-connectivity required")]
    NotConnectedEnough { required: usize, found: usize },

    #[error("weights lie outside the domain of the rubber-band map (equilibrium system singular, condition {condition:e})")]
    OutsideDomain { condition: f64 },

    #[error("stress matrix is not a general position stress")]
    NotAGstress,

    #[error("orthogonal representation is not centered (barycenter norm {residual:e})")]
    NotCentered { residual: f64 },

    #[error("vector configuration is not in general position: {0}")]
    NotGeneralPosition(String),

    #[error("load is not an equilibrium load")]
    NotEquilibrium,

    #[error("load cannot be resolved by the framework (residual {residual:e})")]
    Unresolvable { residual: f64 },

    #[error("graph is not generically globally rigid in dimension {0}")]
    NotGloballyRigid(usize),

    #[error("construction failed after {attempts} attempts (seed {seed}): {reason}")]
    ConstructionFailed {
        attempts: usize,
        seed: u64,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
