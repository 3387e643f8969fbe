//! Elementary symmetric polynomial engine.
//!
//! σ_k of spectra and symmetric matrices, the derivative tensors σ_k^{ij},
//! Garding cones Γ_k, Newton-MacLaurin inequalities, and the Hessian-quotient
//! operator F = σ_k/σ_l with its derivative F^{ij}.
//!
//! σ_k of a matrix is computed along two independent routes (eigenvalues from
//! a cyclic Jacobi diagonalization, and Newton's identities on power sums
//! tr(A^j)) so each acts as an oracle for the other.

use crate::{binomial_f, Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Maximum matrix dimension supported (property-test scale).
pub const MAX_DIM: usize = 16;

/// Spread tolerance below which a spectrum counts as constant (`A = cI`).
pub fn is_constant_spectrum(values: &[f64]) -> bool {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    max - min < 1e-8 * (1.0 + mean.abs())
}

/// An eigenvalue multiset of a symmetric bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InadmissibleParams(alloc::format!(
                "spectrum must be nonempty and finite, got {values:?}"
            )));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// σ_k of this spectrum; σ_0 = 1 and σ_k = 0 outside [0, n].
    pub fn sigma(&self, k: i64) -> f64 {
        sigma_k(&self.values, k)
    }
}

/// k-th elementary symmetric function of `values`, by the O(nk) coefficient
/// recursion for ∏(1 + t λ_i). σ_0 = 1; zero for k < 0 or k > n.
pub fn sigma_k(values: &[f64], k: i64) -> f64 {
    let n = values.len();
    if k < 0 || k as usize > n {
        return 0.0;
    }
    let k = k as usize;
    let mut e = vec![0.0f64; k + 1];
    e[0] = 1.0;
    for (i, &lam) in values.iter().enumerate() {
        let top = k.min(i + 1);
        for j in (1..=top).rev() {
            e[j] += lam * e[j - 1];
        }
    }
    e[k]
}

/// Report of the largest Garding cone a spectrum belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    /// Largest k with σ_1, …, σ_k all positive (0 if σ_1 <= 0).
    pub max_k: usize,
    /// σ_1, …, σ_n of the spectrum.
    pub sigmas: Vec<f64>,
}

/// Largest Γ_k containing `lambda`, together with all σ_i values.
pub fn garding_cone(lambda: &Spectrum) -> ConeReport {
    let n = lambda.len();
    let sigmas: Vec<f64> = (1..=n as i64).map(|i| lambda.sigma(i)).collect();
    let mut max_k = 0;
    for (i, &s) in sigmas.iter().enumerate() {
        if s > 0.0 {
            max_k = i + 1;
        } else {
            break;
        }
    }
    ConeReport { max_k, sigmas }
}

/// A real symmetric n×n matrix, n <= 16.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>, // row-major
}

impl SymMatrix {
    /// Builds from row-major entries; requires exact symmetry.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_DIM || entries.len() != n * n {
            return Err(Error::NotSymmetric);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotSymmetric);
        }
        Ok(Self { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Sets both (i,j) and (j,i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    fn mul(&self, other: &SymMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.entries[l * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product Σ a_ij b_ij.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Eigenvalues by cyclic Jacobi rotations (unsorted order not guaranteed).
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigenvalues(self)
    }
}

/// Cyclic Jacobi diagonalization; adequate for dense symmetric n <= 16.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.n;
    let mut a = m.entries.clone();
    if n == 1 {
        return vec![a[0]];
    }
    let scale = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // t = sign(theta)/(|theta| + sqrt(theta² + 1)), the smaller root
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * aqj;
                    a[q * n + j] = s * apj + c * aqj;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// σ_k(A) = σ_k(λ(A)) via Jacobi eigenvalues.
pub fn sigma_k_matrix(a: &SymMatrix, k: i64) -> f64 {
    sigma_k(&jacobi_eigenvalues(a), k)
}

/// σ_k(A) via Newton's identities on power sums tr(A^j); independent oracle
/// for [`sigma_k_matrix`].
pub fn sigma_k_newton(a: &SymMatrix, k: i64) -> f64 {
    let n = a.n;
    if k < 0 || k as usize > n {
        return 0.0;
    }
    let k = k as usize;
    // power sums p_1..p_k
    let mut power = SymMatrix::identity(n);
    let mut p = vec![0.0f64; k + 1];
    for pj in p.iter_mut().skip(1) {
        power = SymMatrix {
            n,
            entries: power.mul(a),
        };
        *pj = power.trace();
    }
    // e_m = (1/m) Σ_{i=1..m} (-1)^{i-1} e_{m-i} p_i
    let mut e = vec![0.0f64; k + 1];
    e[0] = 1.0;
    for m in 1..=k {
        let mut acc = 0.0;
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[m - i] * p[i];
        }
        e[m] = acc / m as f64;
    }
    e[k]
}

/// The derivative tensor (σ_k^{ij}(A)) built from the recursion
/// S_k = σ_{k-1}(A) I - S_{k-1} A with S_1 = I; the scalars σ_m come from
/// the Euler relation σ_m = tr(S_m A)/m, so the whole construction is
/// eigenvalue-free.
pub fn sigma_k_grad(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let n = a.n;
    if k < 1 || k > n {
        return Err(Error::BadOrders { n, k, l: 0 });
    }
    let mut s = SymMatrix::identity(n); // S_1
    for m in 2..=k {
        let sigma_prev = s.dot(a) / (m - 1) as f64; // σ_{m-1}
        let sa = s.mul(a);
        let mut next = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                next.entries[i * n + j] = -sa[i * n + j];
            }
            next.entries[i * n + i] += sigma_prev;
        }
        // S_m is a polynomial in A, hence symmetric; resymmetrize round-off.
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (next.entries[i * n + j] + next.entries[j * n + i]);
                next.entries[i * n + j] = v;
                next.entries[j * n + i] = v;
            }
        }
        s = next;
    }
    Ok(s)
}

/// Outcome of one Newton-MacLaurin ratio comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonMacLaurin {
    /// (σ_{k+1}/C(n,k+1)) / (σ_k/C(n,k))
    pub lhs: f64,
    /// (σ_k/C(n,k)) / (σ_{k-1}/C(n,k-1))
    pub rhs: f64,
    /// lhs <= rhs + 1e-12
    pub holds: bool,
    /// |lhs - rhs| <= 1e-10; only constant spectra attain this.
    pub equality: bool,
}

/// Checks the Newton-MacLaurin inequality for `lambda` in Γ_k, 1 <= k <= n-1.
pub fn newton_maclaurin_check(lambda: &Spectrum, k: usize) -> Result<NewtonMacLaurin> {
    let n = lambda.len();
    if k < 1 || k > n - 1 {
        return Err(Error::BadOrders { n, k, l: 0 });
    }
    require_cone(lambda, k)?;
    let norm = |j: i64| lambda.sigma(j) / binomial_f(n, j);
    let lhs = norm(k as i64 + 1) / norm(k as i64);
    let rhs = norm(k as i64) / norm(k as i64 - 1);
    let holds = lhs <= rhs + 1e-12;
    let equality = (lhs - rhs).abs() <= 1e-10;
    Ok(NewtonMacLaurin {
        lhs,
        rhs,
        holds,
        equality,
    })
}

fn require_cone(lambda: &Spectrum, k: usize) -> Result<()> {
    let cone = garding_cone(lambda);
    if cone.max_k < k {
        return Err(Error::NotInCone {
            required_k: k,
            max_k: cone.max_k,
        });
    }
    Ok(())
}

/// Slack report for the four quotient ratio bounds of a spectrum satisfying
/// σ_k/σ_l = C(n,k)/C(n,l). All slacks are nonnegative when the bounds hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientBounds {
    /// σ_{k-1}/σ_k - k/(n-k+1)  (lower bound)
    pub slack_km1: f64,
    /// σ_{l+1}/σ_l - (n-l)/(l+1)  (lower bound)
    pub slack_lp1: f64,
    /// (n-k)/(k+1) - σ_{k+1}/σ_k  (upper bound)
    pub slack_kp1: f64,
    /// l/(n-l+1) - σ_{l-1}/σ_l  (upper bound)
    pub slack_lm1: f64,
    /// σ_{k+1} <= 0 branch: the upper bound on σ_{k+1}/σ_k is then immediate
    /// rather than a Newton-MacLaurin consequence. Recorded, not asserted.
    pub sigma_kp1_nonpositive: bool,
}

/// Evaluates the four ratio bounds for `lambda` in Γ_k under the quotient
/// constraint σ_k/σ_l = C(n,k)/C(n,l) (relative tolerance 1e-10).
pub fn quotient_ratio_bounds(lambda: &Spectrum, k: usize, l: usize) -> Result<QuotientBounds> {
    let n = lambda.len();
    if k > n || l >= k {
        return Err(Error::BadOrders { n, k, l });
    }
    require_cone(lambda, k)?;
    let target = binomial_f(n, k as i64) / binomial_f(n, l as i64);
    let actual = lambda.sigma(k as i64) / lambda.sigma(l as i64);
    if (actual - target).abs() > 1e-10 * target.abs() {
        return Err(Error::QuotientConstraint { actual, target });
    }
    let s = |j: i64| lambda.sigma(j);
    let (kf, lf, nf) = (k as f64, l as f64, n as f64);
    let sigma_kp1 = s(k as i64 + 1);
    Ok(QuotientBounds {
        slack_km1: s(k as i64 - 1) / s(k as i64) - kf / (nf - kf + 1.0),
        slack_lp1: s(l as i64 + 1) / s(l as i64) - (nf - lf) / (lf + 1.0),
        slack_kp1: (nf - kf) / (kf + 1.0) - sigma_kp1 / s(k as i64),
        slack_lm1: lf / (nf - lf + 1.0) - s(l as i64 - 1) / s(l as i64),
        sigma_kp1_nonpositive: sigma_kp1 <= 0.0,
    })
}

/// Rescales `lambda` in Γ_k by t = (C(n,k)/C(n,l) / (σ_k/σ_l))^{1/(k-l)} so
/// the quotient constraint holds; t > 0 since both quotients are positive
/// on Γ_k.
pub fn rescale_to_quotient(lambda: &Spectrum, k: usize, l: usize) -> Result<Spectrum> {
    let n = lambda.len();
    if k > n || l >= k {
        return Err(Error::BadOrders { n, k, l });
    }
    require_cone(lambda, k)?;
    let target = binomial_f(n, k as i64) / binomial_f(n, l as i64);
    let current = lambda.sigma(k as i64) / lambda.sigma(l as i64);
    let t = libm::pow(target / current, 1.0 / (k - l) as f64);
    Spectrum::new(lambda.values.iter().map(|v| t * v).collect())
}

/// F^{ij} = ∂(σ_k/σ_l)/∂a_ij = (σ_k^{ij} σ_l - σ_k σ_l^{ij}) / σ_l², for
/// A in Γ_k and 0 <= l < k <= n. Positive definite on Γ_k.
pub fn quotient_derivative(a: &SymMatrix, k: usize, l: usize) -> Result<SymMatrix> {
    let n = a.n;
    if k < 1 || k > n || l >= k {
        return Err(Error::BadOrders { n, k, l });
    }
    let spec = Spectrum::new(jacobi_eigenvalues(a))?;
    require_cone(&spec, k)?;
    let grad_k = sigma_k_grad(a, k)?;
    if l == 0 {
        return Ok(grad_k); // σ_0 = 1, σ_0^{ij} = 0
    }
    let sig_k = spec.sigma(k as i64);
    let sig_l = spec.sigma(l as i64);
    if sig_l == 0.0 {
        return Err(Error::SigmaLZero);
    }
    let grad_l = sigma_k_grad(a, l)?;
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.entries[i * n + j] = (grad_k.entries[i * n + j] * sig_l
                - sig_k * grad_l.entries[i * n + j])
                / (sig_l * sig_l);
        }
    }
    Ok(out)
}

/// The two reduced ellipticity expressions from the P and P̃ computations,
/// evaluated on a b-spectrum. Both vanish at b = g and are nonnegative on
/// Γ_k spectra satisfying the quotient constraint (with Ku >= 0 and V > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedExpressions {
    /// F(-(k+1)σ_{k+1}/σ_k + (l+1)σ_{l+1}/σ_l - (k-l))
    /// + KuF(-(k-l) + (n-k+1)σ_{k-1}/σ_k - (n-l+1)σ_{l-1}/σ_l)
    pub p_expression: f64,
    /// VF((n-k+1)σ_{k-1}/σ_k - (n-l+1)σ_{l-1}/σ_l - (k-l))
    pub p_tilde_expression: f64,
}

/// Evaluates the reduced expressions (½ F^{ij}∇²P and F^{ij}∇²P̃ in their
/// fully contracted radial form) for a spectrum, with the scalars Ku and V
/// supplied by the caller.
pub fn reduced_expressions(
    lambda: &Spectrum,
    k: usize,
    l: usize,
    ku: f64,
    v: f64,
) -> Result<ReducedExpressions> {
    let n = lambda.len();
    if k > n || l >= k {
        return Err(Error::BadOrders { n, k, l });
    }
    let s = |j: i64| lambda.sigma(j);
    let sig_k = s(k as i64);
    let sig_l = s(l as i64);
    if sig_k == 0.0 || sig_l == 0.0 {
        return Err(Error::SigmaLZero);
    }
    let f = sig_k / sig_l;
    let (kf, lf, nf) = (k as f64, l as f64, n as f64);
    let grad_part =
        -(kf + 1.0) * s(k as i64 + 1) / sig_k + (lf + 1.0) * s(l as i64 + 1) / sig_l - (kf - lf);
    let trace_part =
        (nf - kf + 1.0) * s(k as i64 - 1) / sig_k - (nf - lf + 1.0) * s(l as i64 - 1) / sig_l;
    Ok(ReducedExpressions {
        p_expression: f * grad_part + ku * f * (trace_part - (kf - lf)),
        p_tilde_expression: v * f * (trace_part - (kf - lf)),
    })
}
