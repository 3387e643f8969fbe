use alloc::string::String;
use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Radius outside the admissible range of the space form.
    RadiusOutOfRange { r: f64, r_max: f64 },
    /// Tangential Hessian eigenvalue requested at the pole with h'(0) != 0.
    PoleSingularity { h_prime: f64 },
    /// Matrix is not symmetric (or exceeds the supported size).
    NotSymmetric,
    /// Spectrum is not in the Garding cone Γ_k required by the operation.
    NotInCone { required_k: usize, max_k: usize },
    /// Quotient constraint σ_k/σ_l = C(n,k)/C(n,l) violated beyond tolerance.
    QuotientConstraint { actual: f64, target: f64 },
    /// Order indices out of range (need 0 <= l < k <= n).
    BadOrders { n: usize, k: usize, l: usize },
    /// Problem parameters do not admit the explicit radial solution.
    InadmissibleParams(String),
    /// Conformal factor V non-positive where a division by V is required.
    NonPositiveV { r: f64 },
    /// Shooting failed to bracket the boundary data in the admissible range.
    ShootingFailure(String),
    /// Profile is not a solution of the l = 0 problem (identity precondition).
    NotASolution { max_residual: f64 },
    /// Division by σ_l = 0; cannot happen on Γ_k data.
    SigmaLZero,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RadiusOutOfRange { r, r_max } => {
                write!(f, "radius {r} outside admissible range [0, {r_max})")
            }
            Error::PoleSingularity { h_prime } => {
                write!(
                    f,
                    "tangential eigenvalue at r = 0 needs h'(0) = 0, got {h_prime}"
                )
            }
            Error::NotSymmetric => write!(f, "matrix is not symmetric"),
            Error::NotInCone { required_k, max_k } => {
                write!(
                    f,
                    "spectrum not in Γ_{required_k} (largest cone: Γ_{max_k})"
                )
            }
            Error::QuotientConstraint { actual, target } => {
                write!(
                    f,
                    "quotient constraint violated: σ_k/σ_l = {actual}, target {target}"
                )
            }
            Error::BadOrders { n, k, l } => {
                write!(f, "need 0 <= l < k <= n, got n={n}, k={k}, l={l}")
            }
            Error::InadmissibleParams(msg) => write!(f, "inadmissible parameters: {msg}"),
            Error::NonPositiveV { r } => write!(f, "conformal factor V(r) <= 0 at r = {r}"),
            Error::ShootingFailure(msg) => write!(f, "shooting failure: {msg}"),
            Error::NotASolution { max_residual } => {
                write!(
                    f,
                    "not a solution: max PDE residual {max_residual:e} exceeds tolerance"
                )
            }
            Error::SigmaLZero => write!(f, "σ_l vanished on supposedly Γ_k data"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
