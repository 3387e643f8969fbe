//! Warped-product model of the space form `M^n(K)`.
//!
//! The metric is `g = dr² + f(r)² g_{S^{n-1}}` in geodesic polar coordinates
//! around a pole, where the warping function `f` solves `f'' + K f = 0` with
//! `f(0) = 0`, `f'(0) = 1`. The conformal factor is `V = f'` and the potential
//! `Φ` satisfies `Φ' = f` (so `∇Φ = f ∂/∂r` is the conformal Killing field,
//! with `∇²Φ = V g` and `∇²V = -K V g`).
//!
//! For `K > 0` only the open hemisphere is admissible: `r ∈ [0, π/(2√K))`.

use crate::{Error, Result};
use core::f64::consts::PI;

/// Switch to Taylor expansions in `K·r²` below this curvature magnitude;
/// the trigonometric/hyperbolic closed forms cancel catastrophically there.
const K_TAYLOR: f64 = 1e-8;

/// A radial scalar together with its first two arc-length derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialScalar {
    pub value: f64,
    pub first_derivative: f64,
    pub second_derivative: f64,
}

impl RadialScalar {
    pub fn new(value: f64, first_derivative: f64, second_derivative: f64) -> Self {
        Self {
            value,
            first_derivative,
            second_derivative,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.first_derivative.is_finite()
            && self.second_derivative.is_finite()
    }
}

/// Ambient space form `M^n(K)`: dimension `n >= 2` and sectional curvature `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    n: usize,
    curvature: f64,
}

impl SpaceForm {
    pub fn new(n: usize, curvature: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InadmissibleParams(alloc::format!(
                "dimension n = {n} < 2"
            )));
        }
        if !curvature.is_finite() {
            return Err(Error::InadmissibleParams(alloc::format!(
                "curvature K = {curvature}"
            )));
        }
        Ok(Self { n, curvature })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Upper end of the admissible radius range: `π/(2√K)` on the hemisphere
    /// for `K > 0`, unbounded otherwise. The endpoint itself is excluded.
    pub fn max_radius(&self) -> f64 {
        if self.curvature > 0.0 {
            PI / (2.0 * libm::sqrt(self.curvature))
        } else {
            f64::INFINITY
        }
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        let r_max = self.max_radius();
        if !r.is_finite() || r < 0.0 || r >= r_max {
            return Err(Error::RadiusOutOfRange { r, r_max });
        }
        Ok(())
    }

    /// Warping function `f(r)` with `f'`, `f''`.
    ///
    /// Closed forms: `r` for `K = 0`, `sin(√K r)/√K` for `K > 0`,
    /// `sinh(√-K r)/√-K` for `K < 0`. Satisfies `f'' + K f = 0`.
    pub fn warping(&self, r: f64) -> Result<RadialScalar> {
        self.check_radius(r)?;
        let k = self.curvature;
        if k.abs() < K_TAYLOR {
            let x = k * r * r;
            // f = r (1 - x/6 + x²/120 - x³/5040 + x⁴/362880)
            let f =
                r * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0 + x * x * x * x / 362880.0);
            let fp = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0 + x * x * x * x / 40320.0;
            return Ok(RadialScalar::new(f, fp, -k * f));
        }
        if k > 0.0 {
            let s = libm::sqrt(k);
            let f = libm::sin(s * r) / s;
            Ok(RadialScalar::new(f, libm::cos(s * r), -k * f))
        } else {
            let s = libm::sqrt(-k);
            let f = libm::sinh(s * r) / s;
            Ok(RadialScalar::new(f, libm::cosh(s * r), -k * f))
        }
    }

    /// Conformal factor `V(r) = f'(r)` with `V' = -K f`, `V'' = -K V`.
    ///
    /// Strictly positive inside the admissible range.
    pub fn conformal_factor(&self, r: f64) -> Result<RadialScalar> {
        let f = self.warping(r)?;
        let k = self.curvature;
        Ok(RadialScalar::new(
            f.first_derivative,
            -k * f.value,
            -k * f.first_derivative,
        ))
    }

    /// Potential `Φ(r)` with `Φ' = f`, `Φ'' = V`.
    ///
    /// Closed forms: `r²/2` for `K = 0`, `-cos(√K r)/K` for `K > 0`,
    /// `cosh(√-K r)/(-K)` for `K < 0`.
    pub fn potential(&self, r: f64) -> Result<RadialScalar> {
        let f = self.warping(r)?;
        let k = self.curvature;
        let phi = if k == 0.0 {
            0.5 * r * r
        } else if k.abs() < K_TAYLOR {
            // -cos(√K r)/K = -1/K + r²/2 (1 - x/12 + x²/360 - x³/20160 + x⁴/1814400)
            let x = k * r * r;
            -1.0 / k
                + 0.5
                    * r
                    * r
                    * (1.0 - x / 12.0 + x * x / 360.0 - x * x * x / 20160.0
                        + x * x * x * x / 1814400.0)
        } else if k > 0.0 {
            -libm::cos(libm::sqrt(k) * r) / k
        } else {
            libm::cosh(libm::sqrt(-k) * r) / (-k)
        };
        Ok(RadialScalar::new(phi, f.value, f.first_derivative))
    }

    /// Hessian eigenvalues of a radial function `h` at radius `r`:
    /// `h''` in the radial direction and `h' f'/f` with multiplicity `n-1`
    /// tangentially. At the pole both collapse to `h''(0)`, which requires
    /// `h'(0) = 0`.
    pub fn radial_hessian_eigenvalues(&self, h: &RadialScalar, r: f64) -> Result<(f64, f64)> {
        self.check_radius(r)?;
        if r == 0.0 {
            if h.first_derivative != 0.0 {
                return Err(Error::PoleSingularity {
                    h_prime: h.first_derivative,
                });
            }
            return Ok((h.second_derivative, h.second_derivative));
        }
        let f = self.warping(r)?;
        Ok((
            h.second_derivative,
            h.first_derivative * f.first_derivative / f.value,
        ))
    }

    /// Area of the geodesic sphere of radius `r`: `ω_{n-1} f(r)^{n-1}`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        let f = self.warping(r)?;
        Ok(unit_sphere_area(self.n) * libm::pow(f.value, (self.n - 1) as f64))
    }
}

/// Area `ω_{n-1} = 2 π^{n/2} / Γ(n/2)` of the unit sphere `S^{n-1}`,
/// from the closed form of Γ at integer and half-integer arguments.
pub fn unit_sphere_area(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        // Γ(n/2) = (n/2 - 1)!
        let m = n / 2;
        let mut fact = 1.0;
        for i in 1..m {
            fact *= i as f64;
        }
        2.0 * libm::pow(PI, m as f64) / fact
    } else {
        // n = 2m+1: ω_{n-1} = 2^{2m+1} π^m m! / (2m)!
        let m = n / 2;
        let mut ratio = 1.0; // m! / (2m)!
        for i in (m + 1)..=(2 * m) {
            ratio /= i as f64;
        }
        libm::pow(2.0, (2 * m + 1) as f64) * libm::pow(PI, m as f64) * ratio
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(n: usize, k: f64) -> SpaceForm {
        SpaceForm::new(n, k).unwrap()
    }

    #[test]
    fn warping_flat() {
        let w = sf(3, 0.0).warping(2.0).unwrap();
        assert_eq!(w.value, 2.0);
        assert_eq!(w.first_derivative, 1.0);
        assert_eq!(w.second_derivative, 0.0);
    }

    #[test]
    fn warping_sphere_at_equator_limit() {
        // π/2 is strictly inside the hemisphere bound π/(2√K) only for K < 1;
        // for K = 1 it is the excluded endpoint, so step just inside.
        let s = sf(3, 1.0);
        let r = core::f64::consts::FRAC_PI_2 * (1.0 - 1e-15);
        let w = s.warping(r).unwrap();
        assert!((w.value - 1.0).abs() < 1e-12);
        assert!(w.first_derivative.abs() < 1e-12);
        assert!((w.second_derivative + 1.0).abs() < 1e-12);
        assert!(s.warping(core::f64::consts::FRAC_PI_2).is_err());
    }

    #[test]
    fn warping_hyperbolic() {
        let w = sf(3, -1.0).warping(1.0).unwrap();
        assert!((w.value - 1.0f64.sinh()).abs() < 1e-15);
        assert!((w.value - 1.175201193643801).abs() < 1e-12);
    }

    #[test]
    fn potential_cases() {
        assert!((sf(3, 0.0).potential(2.0).unwrap().value - 2.0).abs() < 1e-15);
        assert!((sf(3, 1.0).potential(0.0).unwrap().value + 1.0).abs() < 1e-15);
        assert!((sf(3, -1.0).potential(1.0).unwrap().value - 1.543080634815244).abs() < 1e-12);
    }

    #[test]
    fn conformal_factor_cases() {
        assert_eq!(sf(3, 0.0).conformal_factor(7.3).unwrap().value, 1.0);
        let v = sf(3, 1.0).conformal_factor(PI / 3.0).unwrap().value;
        assert!((v - 0.5).abs() < 1e-15);
        let v = sf(3, -1.0).conformal_factor(1.0).unwrap().value;
        assert!((v - 1.543080634815244).abs() < 1e-12);
    }

    #[test]
    fn hessian_eigenvalues_of_potential_and_v() {
        // ∇²Φ = V g and ∇²V = -K V g, read off in the radial frame.
        let s = sf(3, 1.0);
        let r = 0.3;
        let phi = s.potential(r).unwrap();
        let v = s.conformal_factor(r).unwrap();
        let (lr, lt) = s.radial_hessian_eigenvalues(&phi, r).unwrap();
        assert!((lr - v.value).abs() < 1e-12);
        assert!((lt - v.value).abs() < 1e-12);
        let (lr, lt) = s.radial_hessian_eigenvalues(&v, r).unwrap();
        assert!((lr + v.value).abs() < 1e-12);
        assert!((lt + v.value).abs() < 1e-12);
    }

    #[test]
    fn hessian_eigenvalues_flat_quadratic() {
        // h(r) = r²/2 has Hessian = identity in Euclidean space.
        let s = sf(3, 0.0);
        let r = 1.7;
        let h = RadialScalar::new(0.5 * r * r, r, 1.0);
        let (lr, lt) = s.radial_hessian_eigenvalues(&h, r).unwrap();
        assert!((lr - 1.0).abs() < 1e-15);
        assert!((lt - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pole_requires_vanishing_gradient() {
        let s = sf(3, 0.0);
        let bad = RadialScalar::new(0.0, 1.0, 0.0);
        assert!(matches!(
            s.radial_hessian_eigenvalues(&bad, 0.0),
            Err(Error::PoleSingularity { .. })
        ));
        let good = RadialScalar::new(0.0, 0.0, 2.5);
        assert_eq!(
            s.radial_hessian_eigenvalues(&good, 0.0).unwrap(),
            (2.5, 2.5)
        );
    }

    #[test]
    fn sphere_areas() {
        assert!((sf(3, 0.0).sphere_area(2.0).unwrap() - 16.0 * PI).abs() < 1e-10);
        assert!((sf(2, 0.0).sphere_area(1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        // unit sphere "equator" sphere: 4π sin²(π/2 - ε) → 4π
        let a = sf(3, 1.0)
            .sphere_area(core::f64::consts::FRAC_PI_2 * (1.0 - 1e-14))
            .unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-9);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((unit_sphere_area(6) - PI * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn ode_identity_closed_form_and_fd() {
        // f'' + K f = 0, both in closed form and against central differences.
        let radii: [f64; 5] = [0.1, 0.37, 0.9, 1.2, 1.49];
        for &k in &[1.0, -1.0, 0.25, -2.0] {
            let s = sf(4, k);
            for &r in &radii {
                let w = s.warping(r).unwrap();
                assert!((w.second_derivative + k * w.value).abs() < 1e-12);
                let h = 1e-5;
                let fp = s.warping(r + h).unwrap().value;
                let fm = s.warping(r - h).unwrap().value;
                let fd2 = (fp - 2.0 * w.value + fm) / (h * h);
                assert!(
                    (fd2 - w.second_derivative).abs() < 1e-5,
                    "K={k} r={r}: fd {fd2} vs {}",
                    w.second_derivative
                );
            }
        }
    }

    #[test]
    fn gradient_identities() {
        // Φ' = f and V' = -K f (radial content of -K∇Φ = ∇V).
        for &k in &[1.0, -1.0, 0.5, 0.0, 1e-9] {
            let s = sf(3, k);
            for i in 0..20 {
                let r = 0.07 * (i as f64 + 0.5);
                if s.check_radius(r).is_err() {
                    continue;
                }
                let f = s.warping(r).unwrap();
                let phi = s.potential(r).unwrap();
                let v = s.conformal_factor(r).unwrap();
                assert!((phi.first_derivative - f.value).abs() <= 1e-12 * (1.0 + f.value.abs()));
                assert!((v.first_derivative + k * f.value).abs() <= 1e-12 * (1.0 + f.value.abs()));
            }
        }
    }

    #[test]
    fn near_zero_curvature_taylor_branch() {
        // The Taylor branch must limit to the flat forms: |f - r| is the true
        // K r³/6 leading term plus round-off.
        for &k in &[1e-8, -1e-8, 1e-10, -1e-12, 1e-16] {
            let s = sf(3, k);
            for i in 0..=20 {
                let r = 0.5 * i as f64;
                let f = s.warping(r).unwrap().value;
                let lead = k.abs() * r * r * r / 6.0;
                assert!(
                    (f - r).abs() <= 1.01 * lead + 1e-12 * (1.0 + r * r * r),
                    "K={k} r={r}"
                );
                // And against the exact closed form in extended precision terms:
                // compare the Taylor value with the naive closed form, which is
                // still accurate to ~1e-8 absolute here.
                if k.abs() >= 1e-10 {
                    let naive = if k > 0.0 {
                        libm::sin(libm::sqrt(k) * r) / libm::sqrt(k)
                    } else {
                        libm::sinh(libm::sqrt(-k) * r) / libm::sqrt(-k)
                    };
                    assert!((f - naive).abs() < 1e-7 * (1.0 + r));
                }
            }
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let s = sf(3, 4.0); // r_max = π/4
        assert!(s.warping(1.0).is_err());
        assert!(s.warping(-0.1).is_err());
        assert!(s.warping(0.7).is_ok());
        assert!(sf(3, -1.0).warping(50.0).is_ok());
        assert!(SpaceForm::new(1, 0.0).is_err());
    }
}
