//! Largest singular values, the exact spectrum of the distance matrix, and
//! the singular-value rigidity lower bound with every constant computed
//! from the interpolated polynomials.

use crate::error::{Error, Result};
use crate::exec;
use crate::lift::lift_constants;
use crate::matrix::SignMatrix;

/// How a singular value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    PowerIteration,
    ClosedForm,
    ExactGram,
}

/// Largest singular value plus convergence diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SpectralReport {
    pub sigma1: f64,
    pub method: SigmaMethod,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 10_000;

impl SignMatrix {
    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        exec::map_collect(self.rows(), |i| {
            let mut acc = 0.0;
            for (j, xv) in x.iter().enumerate() {
                acc += self.get(i, j) as f64 * xv;
            }
            acc
        })
    }

    /// y = A^T x.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        exec::map_collect(self.cols(), |j| {
            let mut acc = 0.0;
            for (i, xv) in x.iter().enumerate() {
                acc += self.get(i, j) as f64 * xv;
            }
            acc
        })
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on the Gram matrix A^T A,
/// started from the deterministic all-ones vector. If the start vector is
/// annihilated (it lies in the kernel of the Gram map, e.g. for matrices
/// with paired +-columns), restart once from the unit vector e_0.
pub fn largest_singular_value(a: &SignMatrix) -> SpectralReport {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return SpectralReport {
            sigma1: 0.0,
            method: SigmaMethod::ExactGram,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    if n == 1 && a.rows() == 1 {
        return SpectralReport {
            sigma1: 1.0,
            method: SigmaMethod::ExactGram,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut restarted = false;
    let mut lambda_prev = 0.0f64;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < POWER_MAX_ITERS {
        iterations += 1;
        let av = a.matvec(&v);
        let gv = a.matvec_t(&av);
        let gv_norm = norm2(&gv);
        if gv_norm <= 1e-280 {
            if restarted {
                // Gram map annihilates e_0 too; sigma is 0 on the explored
                // subspace
                return SpectralReport {
                    sigma1: 0.0,
                    method: SigmaMethod::PowerIteration,
                    iterations,
                    residual: 0.0,
                    converged: true,
                };
            }
            restarted = true;
            v = vec![0.0; n];
            v[0] = 1.0;
            lambda_prev = 0.0;
            continue;
        }
        // Rayleigh quotient of the Gram matrix at v (||v|| = 1)
        let lambda: f64 = gv.iter().zip(&v).map(|(g, x)| g * x).sum();
        residual = gv
            .iter()
            .zip(&v)
            .map(|(g, x)| (g - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
            / lambda.max(1.0);
        let done = (lambda - lambda_prev).abs() <= POWER_TOL * lambda.max(1.0);
        lambda_prev = lambda;
        for (vi, gi) in v.iter_mut().zip(&gv) {
            *vi = gi / gv_norm;
        }
        if done && iterations > 1 {
            return SpectralReport {
                sigma1: lambda.max(0.0).sqrt(),
                method: SigmaMethod::PowerIteration,
                iterations,
                residual,
                converged: true,
            };
        }
    }
    SpectralReport {
        sigma1: lambda_prev.max(0.0).sqrt(),
        method: SigmaMethod::PowerIteration,
        iterations,
        residual,
        converged: false,
    }
}

/// sigma_1(A^(x)n) = sigma_1(A)^n, without materializing the power.
pub fn kron_sigma(a: &SignMatrix, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    largest_singular_value(a).sigma1.powi(n as i32)
}

/// True when every row of the sign matrix is the first row or its negation
/// (rank over the reals is 1).
fn sign_rank_is_one(a: &SignMatrix) -> bool {
    let rows = a.rows();
    let cols = a.cols();
    if rows == 0 || cols == 0 {
        return false;
    }
    for i in 1..rows {
        let flip = a.get(i, 0) != a.get(0, 0);
        for j in 0..cols {
            let expect = if flip { -a.get(0, j) } else { a.get(0, j) };
            if a.get(i, j) != expect {
                return false;
            }
        }
    }
    true
}

/// sigma_1 together with the strict comparison against q. Strictness holds
/// exactly when the matrix has rank > 1, which is asserted.
pub fn sigma_lt_q_check(a: &SignMatrix) -> (f64, bool) {
    assert_eq!(a.rows(), a.cols(), "expected a square sign matrix");
    let q = a.rows() as f64;
    let sigma1 = largest_singular_value(a).sigma1;
    let strict = sigma1 < q - 1e-9;
    assert_eq!(
        strict,
        !sign_rank_is_one(a),
        "sigma_1 < q must coincide with rank > 1 (sigma_1 = {sigma1}, q = {q})"
    );
    (sigma1, strict)
}

/// One eigenvalue class of the distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceEigenvalue {
    /// Hamming weight |y| of the indexing character.
    pub weight: usize,
    pub lambda: i64,
    /// Number of y of this weight, binom(n, weight).
    pub multiplicity: u64,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc
}

/// The spectrum of M_n: for each weight class |y| = j, the eigenvalue
/// lambda_y = sum_w (2*[w <= n/2] - 1) K_w(j), where
/// K_w(j) = sum_i (-1)^i binom(j, i) binom(n-j, w-i) is the character sum
/// over weight-w strings. Exact integer arithmetic throughout.
pub fn distance_eigenvalues(n: usize) -> Result<Vec<DistanceEigenvalue>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "distance spectrum needs n >= 1".into(),
        ));
    }
    if n > 24 {
        return Err(Error::CapExceeded {
            what: "distance spectrum",
            needed: n as u128,
            cap: 24,
        });
    }
    let classes = exec::map_collect(n + 1, |j| {
        let mut lambda = 0i128;
        for w in 0..=n {
            let side: i128 = if 2 * w <= n { 1 } else { -1 };
            let mut kraw = 0i128;
            for i in 0..=w.min(j) {
                if w - i > n - j {
                    continue;
                }
                let term = (binomial(j, i) * binomial(n - j, w - i)) as i128;
                kraw += if i % 2 == 0 { term } else { -term };
            }
            lambda += side * kraw;
        }
        DistanceEigenvalue {
            weight: j,
            lambda: i64::try_from(lambda).expect("fits i64 for n <= 24"),
            multiplicity: binomial(n, j) as u64,
        }
    });
    Ok(classes)
}

/// sigma_1(M_n) = max |lambda| over the weight classes. The pairing bounds
/// behind the O(2^n / sqrt(n)) estimate are asserted on every class:
/// |lambda_0| <= binom(n, floor(n/2)) and, for y != 0,
/// |lambda_y| <= #{z : n/2 - 1 <= |z| <= n/2 + 1}.
pub fn hamming_sigma(n: usize) -> Result<f64> {
    let classes = distance_eigenvalues(n)?;
    let central = binomial(n, n / 2) as i64;
    // weights w with n/2 - 1 <= w <= n/2 + 1
    let window: u128 = (0..=n)
        .filter(|&w| 2 * w + 2 >= n && 2 * w <= n + 2)
        .map(|w| binomial(n, w))
        .sum();
    let mut max_abs = 0i64;
    for class in &classes {
        if class.weight == 0 {
            assert!(class.lambda.abs() <= central, "zero-weight pairing bound");
        } else {
            assert!(
                (class.lambda.unsigned_abs() as u128) <= window,
                "nonzero-weight pairing bound at weight {}",
                class.weight
            );
        }
        max_abs = max_abs.max(class.lambda.abs());
    }
    Ok(max_abs as f64)
}

/// hamming_sigma wrapped as a report, for callers that want the uniform
/// shape.
pub fn hamming_sigma_report(n: usize) -> Result<SpectralReport> {
    Ok(SpectralReport {
        sigma1: hamming_sigma(n)?,
        method: SigmaMethod::ClosedForm,
        iterations: 0,
        residual: 0.0,
        converged: true,
    })
}

/// The rigidity lower bound N^2 (1/2 - sigma_1 C^{2r} rtilde / (2N)) for a
/// sign matrix A at rank r over F_p. The 2N denominator is forced by
/// s = (1/4) sum (A - L~)^2 = N^2/2 - (1/2) sum A L~ for +-1 matrices; the
/// all-(-1) matrix at r = 0 (sigma_1 = N, rigidity 0) shows the bound is
/// tight and that any smaller penalty would be unsound.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub r: usize,
    pub p: u8,
    /// Entry-bound base C, recomputed from the interpolated polynomials.
    pub c: f64,
    pub ln_c: f64,
    pub sigma1: f64,
    /// (p^3 + 1)^r.
    pub rtilde: f64,
    pub bound: f64,
    pub positive: bool,
}

/// Evaluate the singular-value rigidity lower bound. The penalty term is
/// computed in log space so very large constants degrade to an honest
/// vacuous (negative) bound instead of NaN.
pub fn thm1_bound(a: &SignMatrix, r: usize, p: u64) -> Result<BoundReport> {
    let constants = lift_constants(p)?;
    let report = largest_singular_value(a);
    let n = a.rows() as f64;
    let pf = constants.p as f64;
    let ln_rtilde = r as f64 * (pf.powi(3) + 1.0).ln();
    let ln_term =
        report.sigma1.ln() + 2.0 * r as f64 * constants.ln_entry_base + ln_rtilde - (2.0 * n).ln();
    let bound = n * n * (0.5 - ln_term.exp());
    Ok(BoundReport {
        r,
        p: constants.p,
        c: constants.entry_base,
        ln_c: constants.ln_entry_base,
        sigma1: report.sigma1,
        rtilde: (pf.powi(3) + 1.0).powi(r as i32),
        bound,
        positive: bound > 0.0,
    })
}

/// The Kronecker lower-bound constants: the largest c1 = k/64 with
/// c^{c1} sigma1 / q <= 1 - 1e-6 where c = C^2 (p^3 + 1), and the resulting
/// c2 = c^{c1} sigma1 / q < 1. Errors on rank-1 inputs (sigma1 = q) and
/// when even k = 1 is infeasible.
pub fn kron_lb_constants(a: &SignMatrix, p: u64) -> Result<(f64, f64)> {
    let constants = lift_constants(p)?;
    assert_eq!(a.rows(), a.cols());
    let q = a.rows() as f64;
    let (sigma1, strict) = sigma_lt_q_check(a);
    if !strict {
        return Err(Error::RankOne);
    }
    let ln_c = 2.0 * constants.ln_entry_base + ((constants.p as f64).powi(3) + 1.0).ln();
    // need c^{k/64} <= (1 - 1e-6) q / sigma1
    let budget = ((1.0 - 1e-6) * q / sigma1).ln();
    let k = (64.0 * budget / ln_c).floor();
    if k < 1.0 {
        return Err(Error::NoFeasibleExponent { c: ln_c.exp() });
    }
    let c1 = k / 64.0;
    let c2 = (c1 * ln_c).exp() * sigma1 / q;
    Ok((c1, c2))
}
