//! Library behind the `hesslab` binary: standard parameter matrices,
//! CSV/report formatting, and the seeded randomized property suites for the
//! elementary-symmetric-function machinery.

use hesslab_core::elemsym::{
    garding_cone, newton_maclaurin_check, quotient_derivative, quotient_ratio_bounds,
    reduced_expressions, rescale_to_quotient, sigma_k_grad, sigma_k_matrix, sigma_k_newton,
    Spectrum, SymMatrix,
};
use hesslab_core::pohozaev::IdentityReport;
use hesslab_core::radial::{ProblemParams, RadialSolution};
use hesslab_core::Result as CoreResult;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{self, Write};

/// Full-precision CSV float format: 17 significant digits.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Human-report float format: 6 significant digits.
pub fn fmt_human(x: f64) -> String {
    format!("{x:.5e}")
}

// ---------------------------------------------------------------------------
// Parameter matrices
// ---------------------------------------------------------------------------

/// Admissible (c1, c2) pairs used throughout the standard matrix, per
/// curvature sign.
pub fn standard_data(curvature: f64) -> Vec<(f64, f64)> {
    if curvature > 0.0 {
        vec![(0.0, 1.0), (0.5, 1.0)]
    } else if curvature < 0.0 {
        vec![(0.0, 0.5), (0.3, 0.5)]
    } else {
        vec![(0.0, 1.5)]
    }
}

/// The standard verification matrix. With `include_quotient` the Hessian
/// quotient orders (2,1) and (3,1) join the pure k-Hessian cases; otherwise
/// only l = 0 cases are produced (the integral identities need l = 0).
pub fn parameter_matrix(include_quotient: bool) -> Vec<ProblemParams> {
    let mut out = Vec::new();
    for n in [2usize, 3, 4, 6] {
        let mut orders = vec![(1usize, 0usize), (2, 0), (n, 0)];
        if include_quotient {
            orders.push((2, 1));
            orders.push((3, 1));
        }
        orders.sort_unstable();
        orders.dedup();
        for (k, l) in orders {
            if !(l < k && k <= n) {
                continue;
            }
            for curvature in [-1.0, 0.0, 1.0] {
                let sf = match hesslab_core::geometry::SpaceForm::new(n, curvature) {
                    Ok(sf) => sf,
                    Err(_) => continue,
                };
                for (c1, c2) in standard_data(curvature) {
                    if let Ok(p) = ProblemParams::new(sf, k, l, c1, c2) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

pub const SOLUTION_HEADER: &str = "r,u,u_prime,u_double_prime,lambda_rad,lambda_tan,P,P_tilde,w";

/// Writes one solution sampled at `samples` radii (both endpoints included)
/// in the fixed column order, preceded by a `#` metadata line.
pub fn write_solution_csv(
    w: &mut dyn Write,
    sol: &RadialSolution,
    samples: usize,
) -> io::Result<()> {
    let p = sol.params();
    writeln!(
        w,
        "# n={} k={} l={} K={} c1={} c2={} R={}",
        p.sf.dim(),
        p.k,
        p.l,
        fmt_full(p.sf.curvature()),
        fmt_full(p.c1),
        fmt_full(p.c2),
        fmt_full(sol.radius())
    )?;
    writeln!(w, "{SOLUTION_HEADER}")?;
    let radius = sol.radius();
    let denom = (samples.max(2) - 1) as f64;
    for i in 0..samples.max(2) {
        let r = radius * i as f64 / denom;
        let row = solution_row(sol, r).map_err(to_io)?;
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn solution_row(sol: &RadialSolution, r: f64) -> CoreResult<Vec<String>> {
    let (u, up, upp) = sol.eval(r)?;
    let b = sol.b_tensor(r)?;
    let p = sol.p_function(r)?;
    let pt = sol.p_tilde_function(r)?;
    let w = sol.w_function(r)?;
    Ok(vec![
        fmt_full(r),
        fmt_full(u),
        fmt_full(up),
        fmt_full(upp),
        fmt_full(b.lambda_radial),
        fmt_full(b.lambda_tangential),
        fmt_full(p),
        fmt_full(pt),
        fmt_full(w),
    ])
}

fn to_io(e: hesslab_core::Error) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

pub const REPORT_HEADER: &str =
    "identity_id,n,k,K,c1,c2,lhs,rhs,abs_residual,rel_residual,panels,converged";

pub fn report_csv_row(p: &ProblemParams, rep: &IdentityReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        rep.identity_id.as_str(),
        p.sf.dim(),
        p.k,
        fmt_full(p.sf.curvature()),
        fmt_full(p.c1),
        fmt_full(p.c2),
        fmt_full(rep.lhs),
        fmt_full(rep.rhs),
        fmt_full(rep.abs_residual),
        fmt_full(rep.rel_residual),
        rep.panels,
        rep.converged
    )
}

pub fn report_text_row(p: &ProblemParams, rep: &IdentityReport) -> String {
    format!(
        "{:<14} n={} k={} K={:+.1} c1={:.2} c2={:.2}  lhs={} rhs={} rel={}  panels={}{}{}",
        rep.identity_id.as_str(),
        p.sf.dim(),
        p.k,
        p.sf.curvature(),
        p.c1,
        p.c2,
        fmt_human(rep.lhs),
        fmt_human(rep.rhs),
        fmt_human(rep.rel_residual),
        rep.panels,
        if rep.converged {
            ""
        } else {
            "  [NOT CONVERGED]"
        },
        if rep.permissive { "  [permissive]" } else { "" }
    )
}

// ---------------------------------------------------------------------------
// Randomized property suites
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub trials: usize,
    /// Worst observed value of the suite's margin metric (see `metric`).
    pub worst: f64,
    /// The metric passes while `worst` stays on the right side of this.
    pub threshold: f64,
    /// "max" (worst must stay below threshold) or "min" (above).
    pub metric: &'static str,
    pub pass: bool,
}

impl PropertyResult {
    fn max_metric(name: &'static str, trials: usize, worst: f64, threshold: f64) -> Self {
        Self {
            name,
            trials,
            worst,
            threshold,
            metric: "max",
            pass: worst < threshold,
        }
    }

    fn min_metric(name: &'static str, trials: usize, worst: f64, threshold: f64) -> Self {
        Self {
            name,
            trials,
            worst,
            threshold,
            metric: "min",
            pass: worst > threshold,
        }
    }

    pub fn text_row(&self) -> String {
        format!(
            "{:<34} trials={:<5} {}={} threshold={}  {}",
            self.name,
            self.trials,
            self.metric,
            fmt_human(self.worst),
            fmt_human(self.threshold),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Random symmetric matrix with entries in U(-1, 1).
pub fn sample_symmetric(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// Rejection-samples a spectrum in Γ_k with entries from U(-0.5, 2.0).
pub fn sample_gamma_k(rng: &mut impl Rng, n: usize, k: usize) -> Spectrum {
    loop {
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..2.0)).collect();
        let spec = Spectrum::new(vals).expect("sampled spectrum is valid");
        if garding_cone(&spec).max_k >= k {
            return spec;
        }
    }
}

/// Random symmetric matrix whose spectrum lies in Γ_k and satisfies the
/// quotient constraint σ_k/σ_l = C(n,k)/C(n,l): a Γ_k diagonal conjugated by
/// random Jacobi rotations, then rescaled (scaling commutes with rotation).
pub fn sample_gamma_k_matrix(rng: &mut impl Rng, n: usize, k: usize, l: usize) -> SymMatrix {
    let spec = sample_gamma_k(rng, n, k);
    let spec = rescale_to_quotient(&spec, k, l).expect("Γ_k spectrum rescales");
    let mut m = SymMatrix::from_diag(spec.values());
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        m = rotate(&m, i, j, theta);
    }
    m
}

/// Conjugation by a Givens rotation in the (i, j) plane: preserves the
/// spectrum exactly up to rounding.
fn rotate(m: &SymMatrix, i: usize, j: usize, theta: f64) -> SymMatrix {
    let n = m.dim();
    let (c, s) = (theta.cos(), theta.sin());
    // out = Gᵀ M G with G the Givens rotation
    let mut out = SymMatrix::zeros(n);
    let g = |r: usize, cidx: usize| -> f64 {
        if r == cidx {
            if r == i || r == j {
                c
            } else {
                1.0
            }
        } else if r == i && cidx == j {
            s
        } else if r == j && cidx == i {
            -s
        } else {
            0.0
        }
    };
    for a in 0..n {
        for bb in a..n {
            let mut acc = 0.0;
            for p in 0..n {
                if g(p, a) == 0.0 {
                    continue;
                }
                for q in 0..n {
                    if g(q, bb) == 0.0 {
                        continue;
                    }
                    acc += g(p, a) * m.get(p, q) * g(q, bb);
                }
            }
            out.set_sym(a, bb, acc);
        }
    }
    out
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// (Σ_ij grad_ij (A²)_ij, Σ_ij |grad_ij (A²)_ij|): the contraction
/// tr(grad · A · A) and its pre-cancellation magnitude.
fn dot_with_square(grad: &SymMatrix, a: &SymMatrix) -> (f64, f64) {
    let n = a.dim();
    let mut acc = 0.0;
    let mut mag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut a2 = 0.0;
            for l in 0..n {
                a2 += a.get(i, l) * a.get(l, j);
            }
            acc += grad.get(i, j) * a2;
            mag += (grad.get(i, j) * a2).abs();
        }
    }
    (acc, mag)
}

/// σ_k contraction identities on random symmetric matrices:
/// Σσ_k^{ij}a_ij = kσ_k,  tr σ_k^{ij} = (n-k+1)σ_{k-1},
/// Σσ_k^{ij}(a²)_ij = σ_1σ_k - (k+1)σ_{k+1}.
pub fn suite_contraction_identities(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let a = sample_symmetric(&mut rng, n);
        for k in 1..=n {
            let grad = sigma_k_grad(&a, k).expect("gradient exists");
            let sk = sigma_k_matrix(&a, k as i64);
            worst = worst.max(rel_err(grad.dot(&a), k as f64 * sk));
            let skm1 = sigma_k_matrix(&a, k as i64 - 1);
            worst = worst.max(rel_err(grad.trace(), (n - k + 1) as f64 * skm1));
            let skp1 = sigma_k_matrix(&a, k as i64 + 1);
            let s1 = sigma_k_matrix(&a, 1);
            // both sides cancel internally; measure against the summed
            // magnitude rather than the (possibly tiny) net value
            let (lhs, lhs_mag) = dot_with_square(&grad, &a);
            let rhs = s1 * sk - (k as f64 + 1.0) * skp1;
            let scale = (lhs_mag + (s1 * sk).abs() + (k as f64 + 1.0) * skp1.abs()).max(1.0);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    PropertyResult::max_metric("sigma_k contraction identities", trials, worst, 1e-9)
}

/// Jacobi-eigenvalue vs Newton-identity σ_k agreement.
pub fn suite_dual_paths(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let a = sample_symmetric(&mut rng, n);
        for k in 0..=n as i64 {
            worst = worst.max(rel_err(sigma_k_matrix(&a, k), sigma_k_newton(&a, k)));
        }
    }
    PropertyResult::max_metric("sigma_k dual-path agreement", trials, worst, 1e-9)
}

/// σ_k^{ij} against central finite differences of σ_k.
pub fn suite_gradient_fd(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2);
    let mut worst = 0.0f64;
    let h = 1e-5;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let a = sample_symmetric(&mut rng, n);
        let k = rng.gen_range(1..=n);
        let grad = sigma_k_grad(&a, k).expect("gradient exists");
        for i in 0..n {
            for j in i..n {
                let mut ap = a.clone();
                let mut am = a.clone();
                ap.set_sym(i, j, a.get(i, j) + h);
                am.set_sym(i, j, a.get(i, j) - h);
                let fd =
                    (sigma_k_matrix(&ap, k as i64) - sigma_k_matrix(&am, k as i64)) / (2.0 * h);
                // a symmetric bump perturbs both (i,j) and (j,i)
                let expected = if i == j {
                    grad.get(i, i)
                } else {
                    2.0 * grad.get(i, j)
                };
                worst = worst.max((fd - expected).abs());
            }
        }
    }
    PropertyResult::max_metric("sigma_k gradient vs finite diff", trials, worst, 1e-6)
}

/// Positive definiteness of F^{ij} = ∂(σ_k/σ_l)/∂a_ij on Γ_k samples.
pub fn suite_operator_positivity(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let k = rng.gen_range(1..=n);
        let l = rng.gen_range(0..k);
        let a = sample_gamma_k_matrix(&mut rng, n, k, l);
        let f = quotient_derivative(&a, k, l).expect("Γ_k sample admits F^{ij}");
        let min_eig = f.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.min(min_eig);
    }
    if trials == 0 {
        worst = f64::INFINITY;
    }
    PropertyResult::min_metric("quotient operator positivity", trials, worst, 0.0)
}

/// Newton-MacLaurin inequality and the four constrained quotient ratio
/// bounds on rescaled Γ_k spectra; equality only at constant spectra.
pub fn suite_ratio_bounds(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let k = rng.gen_range(1..=n);
        let l = rng.gen_range(0..k);
        let spec = sample_gamma_k(&mut rng, n, k);
        let spec = rescale_to_quotient(&spec, k, l).expect("rescale on Γ_k");
        let b = quotient_ratio_bounds(&spec, k, l).expect("constraint holds after rescale");
        worst = worst
            .min(b.slack_km1)
            .min(b.slack_lp1)
            .min(b.slack_kp1)
            .min(b.slack_lm1);
        if k < n {
            let nm = newton_maclaurin_check(&spec, k).expect("Γ_k sample");
            worst = worst.min(nm.rhs - nm.lhs);
            // equality is attained by constant spectra and only there
            if nm.equality && !hesslab_core::elemsym::is_constant_spectrum(spec.values()) {
                worst = f64::NEG_INFINITY;
            }
        }
    }
    if trials == 0 {
        worst = f64::INFINITY;
    }
    // constant spectrum attains equality in every bound
    let ones = Spectrum::constant(nmax.max(2), 1.0);
    let b = quotient_ratio_bounds(&ones, 2, 0).expect("constant spectrum");
    if b.slack_km1.abs() > 1e-10 || b.slack_kp1.abs() > 1e-10 {
        worst = f64::NEG_INFINITY;
    }
    PropertyResult::min_metric("Newton-MacLaurin / ratio bounds", trials, worst, -1e-10)
}

/// Sign of the reduced ellipticity expressions on rescaled Γ_k spectra with
/// Ku drawn from U[0,1] and V from U[0.1,2]; zero at the constant spectrum.
pub fn suite_reduced_expressions(trials: usize, seed: u64, nmax: usize) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let n = rng.gen_range(2..=nmax);
        let k = rng.gen_range(1..=n);
        let l = rng.gen_range(0..k);
        let spec = sample_gamma_k(&mut rng, n, k);
        let spec = rescale_to_quotient(&spec, k, l).expect("rescale on Γ_k");
        let ku: f64 = rng.gen_range(0.0..1.0);
        let v: f64 = rng.gen_range(0.1..2.0);
        let ex = reduced_expressions(&spec, k, l, ku, v).expect("Γ_k sample");
        worst = worst.min(ex.p_expression).min(ex.p_tilde_expression);
    }
    if trials == 0 {
        worst = f64::INFINITY;
    }
    let ones = Spectrum::constant(nmax.max(3), 1.0);
    let ex = reduced_expressions(&ones, 2, 0, 0.5, 1.0).expect("constant spectrum");
    if ex.p_expression.abs() > 1e-10 || ex.p_tilde_expression.abs() > 1e-10 {
        worst = f64::NEG_INFINITY;
    }
    PropertyResult::min_metric("reduced ellipticity expressions", trials, worst, -1e-10)
}

/// All property suites under one seed, in fixed order.
pub fn run_property_suites(trials: usize, seed: u64, nmax: usize) -> Vec<PropertyResult> {
    let nmax = nmax.clamp(2, 8);
    vec![
        suite_contraction_identities(trials, seed, nmax),
        suite_dual_paths(trials, seed, nmax),
        suite_gradient_fd(trials, seed, nmax),
        suite_operator_positivity(trials, seed, nmax),
        suite_ratio_bounds(trials, seed, nmax),
        suite_reduced_expressions(trials, seed, nmax),
    ]
}
