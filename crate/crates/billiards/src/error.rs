//! Error type shared by every module of the library.

use thiserror::Error;

/// Library-wide error enumeration.
///
/// Variants are grouped by the operation family that raises them; the CLI
/// maps them onto process exit codes (usage = 2, runtime = 1, verification
/// disagreement = 3).
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A label's component count does not match the domain dimension.
    #[error("label has {got} components but domain `{domain}` is {want}-dimensional")]
    ArityMismatch {
        domain: &'static str,
        got: usize,
        want: usize,
    },

    /// Angle list does not describe a closed simple polygon.
    #[error("invalid polygon: interior angles sum to {got}π, expected {want}π for {sides} sides")]
    InvalidPolygon { got: String, want: String, sides: usize },

    /// A label violates the admissibility rule of the requested boundary condition.
    #[error("label {label:?} violates the {bc} index rule: {reason}")]
    IndexRule {
        label: Vec<i64>,
        bc: &'static str,
        reason: &'static str,
    },

    /// The folded trajectory ran into a corner (codimension-2 face) and is annihilated.
    #[error("trajectory hits a corner near {point:?} and is annihilated")]
    TerminalOrbit { point: Vec<f64> },

    /// The ray-tracing oracle and the lattice construction disagree.
    #[error(
        "ray oracle disagrees with the lattice construction for label {label:?}: \
         trace first closes after {traced_collisions} collisions at {closure_ratio:.6}*|V| \
         ({detail}); folding predicts {folded_collisions} collisions over exactly |V|"
    )]
    OracleDisagreement {
        label: Vec<i64>,
        traced_collisions: usize,
        folded_collisions: usize,
        /// First-closure path length divided by |V|.
        closure_ratio: f64,
        detail: String,
    },

    /// The ray ran out of its collision budget before closing.
    #[error("ray exhausted its budget of {budget} collisions without closing (walked {path_length:.6})")]
    BudgetExhausted { budget: usize, path_length: f64 },

    /// Operation defined only for 2D domains was called on a 3D domain (or vice versa).
    #[error("operation `{op}` is not available for {dimension}-dimensional domains: {reason}")]
    UnsupportedDimension {
        op: &'static str,
        dimension: usize,
        reason: &'static str,
    },

    /// Shooting angles are defined for coprime labels only.
    #[error("shooting angles require a coprime label; {label:?} has gcd {gcd}, reduce it first")]
    NonCoprime { label: Vec<i64>, gcd: i64 },

    /// Catch-all for malformed user input (CLI parse helpers, bad points, ...).
    #[error("{0}")]
    InvalidInput(String),

    /// The iterative eigensolver did not converge within its budget.
    #[error("eigensolver did not converge: {detail} (worst residual {residual:.3e})")]
    NoConvergence { detail: String, residual: f64 },

    /// Mesh resolution below the documented minimum for the solver contract.
    #[error("resolution too coarse: {got} interior degrees of freedom, need at least {need}")]
    ResolutionTooCoarse { got: usize, need: usize },

    /// A render was requested for an empty scene.
    #[error("cannot render an empty scene: {0}")]
    EmptyScene(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
