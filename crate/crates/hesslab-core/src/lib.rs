//! Numerical laboratory for radial solutions of k-Hessian and Hessian-quotient
//! overdetermined problems on space forms.
//!
//! The crate is split into four layers:
//! * [`geometry`] — the warped-product model of the space form `M^n(K)`:
//!   warping function, conformal factor, potential, and radial Hessian reduction.
//! * [`elemsym`] — elementary symmetric polynomials of spectra and symmetric
//!   matrices, their derivative tensors, Garding cones, Newton-MacLaurin and
//!   quotient-ratio inequalities.
//! * [`radial`] — explicit radial solutions of the overdetermined problem,
//!   the `b = ∇²u + Kug` tensor, PDE residuals and the auxiliary `P`, `P̃`, `w`
//!   functions.
//! * [`pohozaev`] — quadrature-based verification of the Rellich-Pohozaev
//!   integral identities with negative controls.
//!
//! Everything is pure computation over `f64`; the crate builds without `std`
//! (with `alloc`).

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod elemsym;
pub mod error;
pub mod geometry;
pub mod pohozaev;
pub mod radial;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Binomial coefficient C(n, k) in exact integer arithmetic (n ≤ 62).
pub fn binomial(n: usize, k: i64) -> u64 {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// C(n, k) as `f64`, zero outside `[0, n]`.
pub fn binomial_f(n: usize, k: i64) -> f64 {
    binomial(n, k) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_table() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(3, -1), 0);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(5, 0), 1);
    }

    // C(n,k-1) = k/(n-k+1) * C(n,k) holds exactly in integer arithmetic,
    // for all 1 <= k <= n <= 16.
    #[test]
    fn binomial_shift_identity_exact() {
        for n in 1..=16usize {
            for k in 1..=n {
                let lhs = binomial(n, k as i64 - 1) * (n - k + 1) as u64;
                let rhs = binomial(n, k as i64) * k as u64;
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }
}
