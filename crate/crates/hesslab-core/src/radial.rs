//! Radial solutions of the overdetermined Hessian-quotient problem.
//!
//! The symmetric solution on a geodesic ball of radius `R` has the closed form
//!
//! * `K = 0`:  `u = (r² - c₂²)/2`, `R = c₂`;
//! * `K > 0`:  `u = 1/K - a cos(√K r)` with `a = c₂/(√K sin(√K R))` and
//!   `R = arctan(c₂√K / (1 - K²c₁)) / √K`;
//! * `K < 0`:  `u = 1/K + a cosh(√-K r)` with `a = c₂/(√-K sinh(√-K R))` and
//!   `R = arctanh(c₂√-K / (1 - K²c₁)) / √-K`.
//!
//! All three satisfy `∇²u + Kug = g`, i.e. both eigenvalues of the b-tensor
//! equal 1, together with `u(R) = Kc₁`, `u'(R) = c₂`, `u'(0) = 0`.
//!
//! The same module carries the `b = ∇²u + Kug` samples, the Hessian-quotient
//! PDE residual, the auxiliary functions `P = |∇u|² + Ku² - 2u`,
//! `P̃ = -g(∇u,∇Φ) + uV + Φ`, `w = (u - Kc₁)/V`, and an RK4 integrator with a
//! double-shooting inversion of the boundary map that cross-checks the closed
//! form for `R`.

use crate::elemsym::Spectrum;
use crate::geometry::SpaceForm;
use crate::{binomial_f, Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Parameters of the overdetermined problem on `M^n(K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub sf: SpaceForm,
    /// Hessian order k (numerator).
    pub k: usize,
    /// Quotient order l (denominator), 0 for the plain k-Hessian.
    pub l: usize,
    /// Dirichlet datum is K·c1.
    pub c1: f64,
    /// Neumann datum, c2 > 0.
    pub c2: f64,
}

impl ProblemParams {
    pub fn new(sf: SpaceForm, k: usize, l: usize, c1: f64, c2: f64) -> Result<Self> {
        let n = sf.dim();
        if k < 1 || k > n || l >= k {
            return Err(Error::BadOrders { n, k, l });
        }
        if !c1.is_finite() || !c2.is_finite() || c2 <= 0.0 {
            return Err(Error::InadmissibleParams(format!(
                "need c2 > 0, got c1={c1}, c2={c2}"
            )));
        }
        Ok(Self { sf, k, l, c1, c2 })
    }

    /// C(n,k)/C(n,l), the constant right-hand side of the equation.
    pub fn rhs_constant(&self) -> f64 {
        binomial_f(self.sf.dim(), self.k as i64) / binomial_f(self.sf.dim(), self.l as i64)
    }
}

/// Closed-form radial profile of the symmetric solution.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ExplicitForm {
    /// u = (r² - c2²)/2
    Flat { c2: f64 },
    /// u = 1/K - a cos(√K r)
    Sphere { curvature: f64, a: f64 },
    /// u = 1/K + a cosh(√-K r)
    Hyperbolic { curvature: f64, a: f64 },
}

impl ExplicitForm {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            ExplicitForm::Flat { c2 } => ((r * r - c2 * c2) / 2.0, r, 1.0),
            ExplicitForm::Sphere { curvature: k, a } => {
                let s = libm::sqrt(k);
                let (sin, cos) = (libm::sin(s * r), libm::cos(s * r));
                (1.0 / k - a * cos, a * s * sin, a * k * cos)
            }
            ExplicitForm::Hyperbolic { curvature: k, a } => {
                let s = libm::sqrt(-k);
                let (sinh, cosh) = (libm::sinh(s * r), libm::cosh(s * r));
                (1.0 / k + a * cosh, a * s * sinh, -a * k * cosh)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Explicit(ExplicitForm),
    /// Explicit form plus ε r²(R-r)², which preserves u(R), u'(R), u'(0).
    Perturbed {
        base: ExplicitForm,
        epsilon: f64,
        radius: f64,
    },
}

impl Profile {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        match self {
            Profile::Explicit(form) => form.eval(r),
            Profile::Perturbed {
                base,
                epsilon,
                radius,
            } => {
                let (u, up, upp) = base.eval(r);
                let d = radius - r;
                (
                    u + epsilon * r * r * d * d,
                    up + epsilon * 2.0 * r * d * (radius - 2.0 * r),
                    upp + epsilon * 2.0 * (radius * radius - 6.0 * r * radius + 6.0 * r * r),
                )
            }
        }
    }
}

/// Eigenvalues of `b = ∇²u + Kug` for a radial `u` at radius `r`:
/// `u'' + Ku` radially and `u' f'/f + Ku` with multiplicity `n-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BTensorSample {
    pub r: f64,
    pub lambda_radial: f64,
    pub lambda_tangential: f64,
}

/// A radial solution (or control profile) on the geodesic ball of radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    params: ProblemParams,
    radius: f64,
    profile: Profile,
    min_ku: f64,
}

/// Builds the explicit closed-form solution of the overdetermined problem.
///
/// Inadmissible parameter combinations (`1 - K²c₁ <= 0`, or an arctanh
/// argument outside `(0,1)` for `K < 0`) are hard errors.
pub fn explicit_solution(params: ProblemParams) -> Result<RadialSolution> {
    let k = params.sf.curvature();
    let (c1, c2) = (params.c1, params.c2);
    let (radius, form) = if k == 0.0 {
        (c2, ExplicitForm::Flat { c2 })
    } else {
        let denom = 1.0 - k * k * c1;
        if denom <= 0.0 {
            return Err(Error::InadmissibleParams(format!(
                "need 1 - K²c1 > 0, got K={k}, c1={c1} (1 - K²c1 = {denom})"
            )));
        }
        if k > 0.0 {
            let s = libm::sqrt(k);
            let radius = libm::atan(c2 * s / denom) / s;
            let a = c2 / (s * libm::sin(s * radius));
            (radius, ExplicitForm::Sphere { curvature: k, a })
        } else {
            let s = libm::sqrt(-k);
            let arg = c2 * s / denom;
            if arg >= 1.0 {
                return Err(Error::InadmissibleParams(format!(
                    "arctanh argument c2√-K/(1-K²c1) = {arg} >= 1 (K={k}, c1={c1}, c2={c2})"
                )));
            }
            let radius = libm::atanh(arg) / s;
            let a = c2 / (s * libm::sinh(s * radius));
            (radius, ExplicitForm::Hyperbolic { curvature: k, a })
        }
    };
    params.sf.check_radius(radius)?;
    let sol = RadialSolution::from_profile(params, radius, Profile::Explicit(form))?;
    // Boundary conditions must come out of the closed form at 1e-10.
    let (u_r, up_r, _) = sol.eval(radius)?;
    let (_, up_0, _) = sol.eval(0.0)?;
    if (u_r - k * c1).abs() > 1e-10 * (1.0 + (k * c1).abs())
        || (up_r - c2).abs() > 1e-10 * (1.0 + c2.abs())
        || up_0.abs() > 1e-12
    {
        return Err(Error::InadmissibleParams(format!(
            "closed form failed boundary check: u(R)={u_r}, u'(R)={up_r}, u'(0)={up_0}"
        )));
    }
    Ok(sol)
}

impl RadialSolution {
    fn from_profile(params: ProblemParams, radius: f64, profile: Profile) -> Result<Self> {
        // Ku >= 0 is recorded, not enforced: the closed form exists (and the
        // boundary data hold) on a wider parameter set than the sign condition.
        let min_ku = (0..=1000)
            .map(|i| {
                let r = radius * i as f64 / 1000.0;
                params.sf.curvature() * profile.eval(r).0
            })
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            params,
            radius,
            profile,
            min_ku,
        })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Minimum of K·u over a 1000-point grid; the problem statement requires
    /// this to be nonnegative.
    pub fn min_ku(&self) -> f64 {
        self.min_ku
    }

    pub fn ku_nonnegative(&self) -> bool {
        self.min_ku >= -1e-12
    }

    fn check_r(&self, r: f64) -> Result<()> {
        if !r.is_finite() || r < 0.0 || r > self.radius * (1.0 + 1e-12) {
            return Err(Error::RadiusOutOfRange {
                r,
                r_max: self.radius,
            });
        }
        Ok(())
    }

    /// (u, u', u'') at radius `r ∈ [0, R]`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64, f64)> {
        self.check_r(r)?;
        Ok(self.profile.eval(r))
    }

    /// Eigenvalues of `b = ∇²u + Kug` at `r`; at the pole both equal
    /// `u''(0) + Ku(0)`.
    pub fn b_tensor(&self, r: f64) -> Result<BTensorSample> {
        let (u, up, upp) = self.eval(r)?;
        let k = self.params.sf.curvature();
        let lambda_radial = upp + k * u;
        let lambda_tangential = if r == 0.0 {
            lambda_radial
        } else {
            let f = self.params.sf.warping(r)?;
            up * f.first_derivative / f.value + k * u
        };
        Ok(BTensorSample {
            r,
            lambda_radial,
            lambda_tangential,
        })
    }

    /// The b-spectrum at `r`: (λ_rad, λ_tan × (n-1)).
    pub fn b_spectrum(&self, r: f64) -> Result<Spectrum> {
        let b = self.b_tensor(r)?;
        let n = self.params.sf.dim();
        let mut vals = Vec::with_capacity(n);
        vals.push(b.lambda_radial);
        for _ in 1..n {
            vals.push(b.lambda_tangential);
        }
        Spectrum::new(vals)
    }

    /// σ_k(b)/σ_l(b) - C(n,k)/C(n,l) at `r`; vanishes for explicit solutions.
    pub fn pde_residual(&self, r: f64) -> Result<f64> {
        let spec = self.b_spectrum(r)?;
        let sig_l = spec.sigma(self.params.l as i64);
        if sig_l == 0.0 {
            return Err(Error::SigmaLZero);
        }
        Ok(spec.sigma(self.params.k as i64) / sig_l - self.params.rhs_constant())
    }

    /// Largest |PDE residual| over `samples + 1` equispaced radii.
    pub fn max_pde_residual(&self, samples: usize) -> Result<f64> {
        let mut max = 0.0f64;
        for i in 0..=samples {
            let r = self.radius * i as f64 / samples as f64;
            max = max.max(self.pde_residual(r)?.abs());
        }
        Ok(max)
    }

    /// P = |∇u|² + Ku² - 2u. Constant (= K³c₁² + c₂² - 2Kc₁) for the
    /// symmetric solution.
    pub fn p_function(&self, r: f64) -> Result<f64> {
        let (u, up, _) = self.eval(r)?;
        let k = self.params.sf.curvature();
        Ok(up * up + k * u * u - 2.0 * u)
    }

    /// The boundary value K³c₁² + c₂² - 2Kc₁ that P attains everywhere for
    /// the symmetric solution.
    pub fn p_boundary_value(&self) -> f64 {
        let k = self.params.sf.curvature();
        let (c1, c2) = (self.params.c1, self.params.c2);
        k * k * k * c1 * c1 + c2 * c2 - 2.0 * k * c1
    }

    /// P̃ = -u'(r)f(r) + u(r)V(r) + Φ(r). Constant for the symmetric solution.
    pub fn p_tilde_function(&self, r: f64) -> Result<f64> {
        let (u, up, _) = self.eval(r)?;
        let f = self.params.sf.warping(r)?;
        let phi = self.params.sf.potential(r)?;
        Ok(-up * f.value + u * f.first_derivative + phi.value)
    }

    /// w = (u - Kc₁)/V; negative inside the ball, zero at the boundary.
    pub fn w_function(&self, r: f64) -> Result<f64> {
        let (u, _, _) = self.eval(r)?;
        let v = self.params.sf.conformal_factor(r)?;
        if v.value <= 0.0 {
            return Err(Error::NonPositiveV { r });
        }
        let k = self.params.sf.curvature();
        Ok((u - k * self.params.c1) / v.value)
    }

    /// Radial form of the elliptic operator applied to w:
    /// `w'' + (n-1)(f'/f)w' + (2V'/V)w' - n(1-K²c1)/V`.
    /// Vanishes identically for explicit solutions.
    pub fn w_operator_residual(&self, r: f64) -> Result<f64> {
        let (u, up, upp) = self.eval(r)?;
        let sf = self.params.sf;
        let (k, n) = (sf.curvature(), sf.dim() as f64);
        let f = sf.warping(r)?;
        let v = sf.conformal_factor(r)?;
        if v.value <= 0.0 {
            return Err(Error::NonPositiveV { r });
        }
        let ubar = u - k * self.params.c1;
        let (vv, vp, vpp) = (v.value, v.first_derivative, v.second_derivative);
        let wp = (up * vv - vp * ubar) / (vv * vv);
        let wpp =
            (upp * vv - vpp * ubar) / (vv * vv) - 2.0 * vp * (up * vv - vp * ubar) / (vv * vv * vv);
        let laplace = if r == 0.0 {
            // w'(0) = 0; the (n-1) f'/f w' term limits to (n-1) w''(0).
            n * wpp
        } else {
            wpp + (n - 1.0) * (f.first_derivative / f.value) * wp
        };
        Ok(laplace + 2.0 * (vp / vv) * wp - n * (1.0 - k * k * self.params.c1) / vv)
    }

    /// Negative-control profile: u + ε r²(R-r)². Boundary data u(R), u'(R),
    /// u'(0) are preserved exactly; the PDE fails at O(ε).
    pub fn perturbed(&self, epsilon: f64) -> Result<RadialSolution> {
        let base = match &self.profile {
            Profile::Explicit(form) => *form,
            Profile::Perturbed { base, .. } => *base,
        };
        RadialSolution::from_profile(
            self.params,
            self.radius,
            if epsilon == 0.0 {
                Profile::Explicit(base)
            } else {
                Profile::Perturbed {
                    base,
                    epsilon,
                    radius: self.radius,
                }
            },
        )
    }

    pub fn is_perturbed(&self) -> bool {
        matches!(self.profile, Profile::Perturbed { .. })
    }
}

/// One node of an integrated radial ODE profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdePoint {
    pub r: f64,
    pub v: f64,
    pub v_prime: f64,
}

fn rk4_step(k: f64, v: f64, p: f64, h: f64) -> (f64, f64) {
    // v' = p, p' = 1 - K v
    let (k1v, k1p) = (p, 1.0 - k * v);
    let (k2v, k2p) = (p + 0.5 * h * k1p, 1.0 - k * (v + 0.5 * h * k1v));
    let (k3v, k3p) = (p + 0.5 * h * k2p, 1.0 - k * (v + 0.5 * h * k2v));
    let (k4v, k4p) = (p + h * k3p, 1.0 - k * (v + h * k3v));
    (
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

/// RK4 integration of `v'' + Kv = 1`, `v(0) = v0`, `v'(0) = 0` up to `r_max`.
pub fn ode_solve(sf: SpaceForm, v0: f64, r_max: f64, step: f64) -> Result<Vec<OdePoint>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InadmissibleParams(format!("step = {step}")));
    }
    sf.check_radius(r_max)?;
    let k = sf.curvature();
    let n_steps = libm::ceil(r_max / step) as usize;
    let h = r_max / n_steps as f64;
    let mut out = Vec::with_capacity(n_steps + 1);
    let (mut v, mut p) = (v0, 0.0);
    out.push(OdePoint {
        r: 0.0,
        v,
        v_prime: p,
    });
    for i in 1..=n_steps {
        let (nv, np) = rk4_step(k, v, p, h);
        v = nv;
        p = np;
        out.push(OdePoint {
            r: h * i as f64,
            v,
            v_prime: p,
        });
    }
    Ok(out)
}

/// Closed-form solution of `v'' + Kv = 1` with `v(0) = v0`, `v'(0) = 0`.
pub fn ode_closed_form(curvature: f64, v0: f64, r: f64) -> (f64, f64) {
    if curvature == 0.0 {
        (v0 + 0.5 * r * r, r)
    } else if curvature > 0.0 {
        let s = libm::sqrt(curvature);
        let amp = v0 - 1.0 / curvature;
        (
            1.0 / curvature + amp * libm::cos(s * r),
            -amp * s * libm::sin(s * r),
        )
    } else {
        let s = libm::sqrt(-curvature);
        let amp = v0 - 1.0 / curvature;
        (
            1.0 / curvature + amp * libm::cosh(s * r),
            amp * s * libm::sinh(s * r),
        )
    }
}

/// Integrates until the slope v' first reaches `c2`; returns `(R, v(R))`.
/// `None` when the slope never gets there inside `r_cap`.
fn integrate_until_slope(k: f64, v0: f64, c2: f64, r_cap: f64, h: f64) -> Option<(f64, f64)> {
    let (mut r, mut v, mut p) = (0.0f64, v0, 0.0f64);
    while r < r_cap {
        let step = h.min(r_cap - r);
        let (nv, np) = rk4_step(k, v, p, step);
        if np >= c2 {
            // bisect the fractional step
            let (mut lo, mut hi) = (0.0f64, step);
            let (mut v_hit, mut r_hit) = (nv, r + step);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (mv, mp) = rk4_step(k, v, p, mid);
                if mp >= c2 {
                    hi = mid;
                    v_hit = mv;
                    r_hit = r + mid;
                } else {
                    lo = mid;
                }
            }
            return Some((r_hit, v_hit));
        }
        r += step;
        v = nv;
        p = np;
        if step < h {
            break;
        }
    }
    None
}

/// Inverts the boundary map by shooting: finds `(R, v0)` such that the ODE
/// solution satisfies `v(R) = Kc₁` and `v'(R) = c₂`. Cross-validates the
/// closed-form `R` of [`explicit_solution`] without using it.
pub fn shoot_radius(params: &ProblemParams) -> Result<(f64, f64)> {
    let k = params.sf.curvature();
    let (c1, c2) = (params.c1, params.c2);
    let h = 5e-4;
    let r_cap = if k > 0.0 {
        params.sf.max_radius() * (1.0 - 1e-12)
    } else {
        50.0
    };
    let target = k * c1;

    // g(v0) = v(R(v0)) - Kc1 is increasing in v0; a failed slope event means
    // v0 was too high (K > 0, the slope maxes out before the hemisphere) or
    // too low (K < 0, the profile runs away downward).
    let eval_g = |v0: f64| -> Option<f64> {
        integrate_until_slope(k, v0, c2, r_cap, h).map(|(_, v)| v - target)
    };
    let fail_sign = if k > 0.0 { 1.0 } else { -1.0 };
    let g = |v0: f64| eval_g(v0).unwrap_or(fail_sign);

    let mut hi = target;
    let mut lo = target - 5.0 * (c2 * c2 + c2 + 1.0);
    if k < 0.0 {
        let floor = 1.0 / k;
        lo = lo.max(floor + 1e-9 * (1.0 + floor.abs()));
    }
    if g(lo) > 0.0 || g(hi) < 0.0 {
        return Err(Error::ShootingFailure(format!(
            "no sign change for v0 in [{lo}, {hi}] (K={k}, c1={c1}, c2={c2})"
        )));
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    let v0 = 0.5 * (lo + hi);
    match integrate_until_slope(k, v0, c2, r_cap, h) {
        Some((r_event, _)) => Ok((r_event, v0)),
        None => Err(Error::ShootingFailure(format!(
            "event lost at converged v0 = {v0}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, curvature: f64, k: usize, l: usize, c1: f64, c2: f64) -> ProblemParams {
        ProblemParams::new(SpaceForm::new(n, curvature).unwrap(), k, l, c1, c2).unwrap()
    }

    #[test]
    fn explicit_flat() {
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        assert_eq!(sol.radius(), 1.5);
        let (u, up, upp) = sol.eval(1.5).unwrap();
        assert!(u.abs() < 1e-15);
        assert!((up - 1.5).abs() < 1e-15);
        assert_eq!(upp, 1.0);
        let (u0, up0, _) = sol.eval(0.0).unwrap();
        assert!((u0 + 1.125).abs() < 1e-15);
        assert_eq!(up0, 0.0);
    }

    #[test]
    fn explicit_sphere() {
        // K=1, c1=0.5, c2=1: R = arctan(c2√K/(1-K²c1)) = arctan(2)
        let sol = explicit_solution(params(3, 1.0, 2, 0, 0.5, 1.0)).unwrap();
        assert!((sol.radius() - libm::atan(2.0)).abs() < 1e-14);
        assert!((sol.radius() - 1.1071487177940904).abs() < 1e-12);
        let (u, up, _) = sol.eval(sol.radius()).unwrap();
        assert!((u - 0.5).abs() < 1e-12);
        assert!((up - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_hyperbolic() {
        let sol = explicit_solution(params(3, -1.0, 2, 0, 0.0, 0.5)).unwrap();
        assert!((sol.radius() - 0.5493061443340549).abs() < 1e-12);
        let (u, up, _) = sol.eval(sol.radius()).unwrap();
        assert!(u.abs() < 1e-12);
        assert!((up - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_params_rejected() {
        // arctanh argument >= 1
        assert!(explicit_solution(params(3, -1.0, 2, 0, 0.0, 1.5)).is_err());
        // 1 - K²c1 <= 0
        assert!(explicit_solution(params(3, 1.0, 2, 0, 1.5, 1.0)).is_err());
        // c2 <= 0 rejected at the parameter level
        assert!(ProblemParams::new(SpaceForm::new(3, 0.0).unwrap(), 2, 0, 0.0, -1.0).is_err());
        assert!(ProblemParams::new(SpaceForm::new(3, 0.0).unwrap(), 0, 0, 0.0, 1.0).is_err());
    }

    #[test]
    fn b_tensor_is_identity_for_solutions() {
        for p in [
            params(3, 0.0, 2, 0, 0.0, 1.5),
            params(4, 1.0, 3, 1, 0.2, 0.8),
            params(3, -1.0, 2, 0, 0.0, 0.5),
        ] {
            let sol = explicit_solution(p).unwrap();
            for i in 0..=500 {
                let r = sol.radius() * i as f64 / 500.0;
                let b = sol.b_tensor(r).unwrap();
                assert!((b.lambda_radial - 1.0).abs() < 1e-10, "r={r}");
                assert!((b.lambda_tangential - 1.0).abs() < 1e-10, "r={r}");
            }
        }
    }

    #[test]
    fn pde_residual_vanishes_for_solutions() {
        for p in [
            params(3, 0.0, 2, 0, 0.0, 1.5),
            params(6, 1.0, 3, 1, 0.1, 0.6),
            params(4, -1.0, 4, 0, 0.3, 0.5),
        ] {
            let sol = explicit_solution(p).unwrap();
            assert!(sol.max_pde_residual(200).unwrap() < 1e-10);
        }
        // k-Hessian mode: σ_k(b) = C(n,k) exactly for b = g
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        let spec = sol.b_spectrum(0.7).unwrap();
        assert!((spec.sigma(2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_breaks_pde_but_not_boundary() {
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        let pert = sol.perturbed(1e-3).unwrap();
        let radius = pert.radius();
        let (u, up, _) = pert.eval(radius).unwrap();
        assert!(u.abs() < 1e-15);
        assert!((up - 1.5).abs() < 1e-15);
        assert_eq!(pert.eval(0.0).unwrap().1, 0.0);
        let res = pert.max_pde_residual(200).unwrap();
        assert!(res > 1e-5 && res < 1e-1, "residual {res}");
        // b deviates at O(ε)
        let b = pert.b_tensor(0.5 * radius).unwrap();
        assert!((b.lambda_radial - 1.0).abs() > 1e-5);
        // ε = 0 reduces to the base profile
        assert_eq!(sol, pert.perturbed(0.0).unwrap());
    }

    #[test]
    fn p_function_constant() {
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        for i in 0..=50 {
            let r = sol.radius() * i as f64 / 50.0;
            assert!((sol.p_function(r).unwrap() - 2.25).abs() < 1e-12);
        }
        let sol = explicit_solution(params(3, 1.0, 2, 0, 0.5, 1.0)).unwrap();
        assert!((sol.p_boundary_value() - 0.25).abs() < 1e-15);
        for i in 0..=50 {
            let r = sol.radius() * i as f64 / 50.0;
            assert!((sol.p_function(r).unwrap() - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn p_tilde_constant() {
        // K=0: P̃ = -c2²/2
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        for i in 0..=50 {
            let r = sol.radius() * i as f64 / 50.0;
            assert!((sol.p_tilde_function(r).unwrap() + 1.125).abs() < 1e-12);
        }
        // K=1: P̃ = -c2/(√K sin(√K R)) = -√((1-K²c1)² + Kc2²)/K
        let sol = explicit_solution(params(3, 1.0, 2, 0, 0.5, 1.0)).unwrap();
        let expect = -libm::sqrt(1.25);
        for i in 0..=50 {
            let r = sol.radius() * i as f64 / 50.0;
            assert!((sol.p_tilde_function(r).unwrap() - expect).abs() < 1e-10);
        }
        // K=-1: constancy via finite differences, value recorded
        let sol = explicit_solution(params(3, -1.0, 2, 0, 0.0, 0.5)).unwrap();
        let v0 = sol.p_tilde_function(0.0).unwrap();
        for i in 1..50 {
            let r = sol.radius() * i as f64 / 50.0;
            let h = 1e-5;
            let d = (sol.p_tilde_function(r + h).unwrap() - sol.p_tilde_function(r - h).unwrap())
                / (2.0 * h);
            assert!(d.abs() < 1e-9, "dP̃/dr = {d} at r={r}");
            assert!((sol.p_tilde_function(r).unwrap() - v0).abs() < 1e-10);
        }
    }

    #[test]
    fn w_negative_inside_zero_on_boundary() {
        for p in [
            params(3, 0.0, 2, 0, 0.0, 1.5),
            params(3, 1.0, 2, 0, 0.5, 1.0),
            params(3, -1.0, 2, 0, 0.0, 0.5),
        ] {
            let sol = explicit_solution(p).unwrap();
            assert!(sol.w_function(sol.radius()).unwrap().abs() < 1e-12);
            for i in 0..100 {
                let r = sol.radius() * i as f64 / 100.0;
                assert!(sol.w_function(r).unwrap() < 0.0, "w(r={r}) >= 0");
            }
        }
        let sol = explicit_solution(params(3, 0.0, 2, 0, 0.0, 1.5)).unwrap();
        assert!((sol.w_function(0.0).unwrap() + 1.125).abs() < 1e-15);
    }

    #[test]
    fn w_operator_residual_vanishes() {
        for p in [
            params(3, 0.0, 2, 0, 0.0, 1.5),
            params(3, 1.0, 2, 0, 0.5, 1.0),
            params(4, -1.0, 2, 1, 0.3, 0.5),
        ] {
            let sol = explicit_solution(p).unwrap();
            for i in 0..=200 {
                let r = sol.radius() * i as f64 / 200.0;
                let res = sol.w_operator_residual(r).unwrap();
                assert!(res.abs() < 1e-8, "residual {res} at r={r} for {p:?}");
            }
        }
    }

    #[test]
    fn monotone_and_parameter_gate() {
        for p in [
            params(3, 1.0, 2, 0, 0.5, 1.0),
            params(3, -1.0, 2, 0, 0.2, 0.5),
            params(3, 0.0, 1, 0, 0.0, 2.0),
        ] {
            let sol = explicit_solution(p).unwrap();
            let kk = p.sf.curvature();
            assert!(kk * kk * p.c1 < 1.0);
            for i in 1..=100 {
                let r = sol.radius() * i as f64 / 100.0;
                assert!(sol.eval(r).unwrap().1 > 0.0, "u' <= 0 at r={r}");
            }
        }
    }

    #[test]
    fn ode_against_closed_form() {
        // K=0, v0=-1.125: v(1.5) = 0, v'(1.5) = 1.5
        let sf = SpaceForm::new(3, 0.0).unwrap();
        let prof = ode_solve(sf, -1.125, 1.5, 1e-3).unwrap();
        let last = prof.last().unwrap();
        assert!(last.v.abs() < 1e-12);
        assert!((last.v_prime - 1.5).abs() < 1e-12);
        // K=1, v0=1: constant solution v ≡ 1
        let sf = SpaceForm::new(3, 1.0).unwrap();
        for pt in ode_solve(sf, 1.0, 1.5, 1e-2).unwrap() {
            assert!((pt.v - 1.0).abs() < 1e-13);
            assert!(pt.v_prime.abs() < 1e-13);
        }
        // K=-1, v0=0: v(1) = cosh(1) - 1
        let sf = SpaceForm::new(3, -1.0).unwrap();
        let prof = ode_solve(sf, 0.0, 1.0, 1e-3).unwrap();
        let last = prof.last().unwrap();
        assert!((last.v - (libm::cosh(1.0) - 1.0)).abs() < 1e-12);
        // generic RK4 order check at coarse step
        let step = 0.05;
        let prof = ode_solve(sf, 0.3, 2.0, step).unwrap();
        for pt in prof {
            let (v, _) = ode_closed_form(-1.0, 0.3, pt.r);
            assert!((pt.v - v).abs() < step * step * step * step * 1e3);
        }
    }

    #[test]
    fn shooting_matches_closed_form() {
        for p in [
            params(3, 1.0, 2, 0, 0.5, 1.0),
            params(3, 0.0, 2, 0, 0.0, 1.5),
            params(3, -1.0, 2, 0, 0.0, 0.5),
            params(5, -1.0, 3, 0, 0.4, 0.3),
        ] {
            let sol = explicit_solution(p).unwrap();
            let (r, v0) = shoot_radius(&p).unwrap();
            assert!(
                (r - sol.radius()).abs() < 1e-10,
                "R {r} vs {}",
                sol.radius()
            );
            assert!((v0 - sol.eval(0.0).unwrap().0).abs() < 1e-9, "v0 {v0}");
        }
    }

    #[test]
    fn shooting_failure_diagnosed() {
        // c2 too large for the hyperbolic closed form: explicit_solution
        // rejects, and the shot never meets the boundary data either.
        let p = params(3, -1.0, 2, 0, 0.0, 1.5);
        assert!(explicit_solution(p).is_err());
        assert!(shoot_radius(&p).is_err());
    }
}
