use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the library reports.
///
/// Variants whose name ends in `Violated` (plus a few precondition failures) are
/// violations of a modelling assumption rather than bad input; see
/// [`Error::assumption`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid belief: {0}")]
    InvalidBelief(&'static str),
    #[error("invalid signaling scheme: {0}")]
    InvalidScheme(&'static str),
    #[error("invalid instance: {0}")]
    InvalidInstance(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("signal {signal} has zero probability under the prior")]
    ZeroProbabilitySignal { signal: usize },
    #[error("scheme is not a direct (action-recommendation) scheme")]
    NotDirect,

    #[error("assumption violated: prior mass below the public lower bound p0")]
    PriorBelowFloor,
    #[error("assumption violated: state {state} has no unique receiver-optimal action")]
    AssumptionGViolated { state: usize },
    #[error("assumption violated: action {action} is a weakly dominated action")]
    AssumptionDViolated { action: usize },
    #[error("assumption violated: no distinguishable pair of states")]
    NoDistinguishablePair,
    #[error("sender does not strictly prefer action 1 in state {state}")]
    SenderPreferenceViolated { state: usize },
    #[error("receiver already prefers action 1 at the prior; no information is optimal")]
    PriorPrefersAction1,
    #[error("binary-action routine called on an instance with {0} actions")]
    NotBinaryAction(usize),

    #[error("linear program: numerical failure ({0})")]
    NumericalFailure(&'static str),
    #[error("linear program is {0}")]
    LpNotOptimal(&'static str),

    #[error("persuasion strength {0} outside [0, |states|]")]
    StrengthOutOfRange(f64),
    #[error("convex decomposition infeasible: component {component} = {value}")]
    DecompositionInfeasible { component: usize, value: f64 },
    #[error("input scheme is not persuasive for the estimated prior")]
    NotPersuasiveInput,
    #[error("robustification radius {eps} exceeds p0^2 D / 2 = {max}")]
    PreconditionEpsTooLarge { eps: f64, max: f64 },
    #[error("accuracy {eps} exceeds p0 / 2 = {max}")]
    AccuracyTooCoarse { eps: f64, max: f64 },

    #[error("learner requires observed states but the environment hides them")]
    IncompatibleLearner,
    #[error("rejection sampling gave up after {0} attempts")]
    RejectionBudgetExceeded(usize),
    #[error("invalid hard-instance grid: {0}")]
    InvalidGrid(&'static str),
    #[error("oracle does not support this instance shape: {0}")]
    UnsupportedShape(&'static str),
}

impl Error {
    /// Human-readable name of the violated modelling assumption, if this error is one.
    pub fn assumption(&self) -> Option<&'static str> {
        match self {
            Error::PriorBelowFloor => Some("full-support prior bounded below by p0"),
            Error::AssumptionGViolated { .. } => Some("unique receiver-optimal action per state"),
            Error::AssumptionDViolated { .. } => Some("weakly dominated action"),
            Error::NoDistinguishablePair => Some("distinguishable pair of states"),
            Error::SenderPreferenceViolated { .. } => Some("sender prefers action 1 in every state"),
            Error::PriorPrefersAction1 => Some("receiver prefers action 0 at the prior"),
            Error::NotBinaryAction(_) => Some("binary action space"),
            _ => None,
        }
    }
}
