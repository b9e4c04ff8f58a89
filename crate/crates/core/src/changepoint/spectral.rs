//! Segment model: Whittle likelihood of the periodogram with a smoothing
//! spline log-spectrum, and the Gaussian (Laplace) approximation to the
//! conditional posterior of the spline coefficients.
//!
//! The log-spectrum of a segment is `β₀ + Σ_s β_s ψ_s(ν)` with
//! `ψ_s(ν) = √2 cos(2πsν) / (2πs)`, the Demmler–Reinsch basis of a linear
//! smoothing spline with its eigenvalue scaling folded into the basis, so
//! that every spline coefficient has prior variance τ².

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_GRAD_TOL: f64 = 1e-8;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Periodogram ordinates of one segment at the Fourier frequencies
/// `k / n`, `k = 0..=n/2`, with their Whittle weights.
///
/// Interior frequencies carry two real degrees of freedom and weight 1;
/// the zero frequency and (for even `n`) the Nyquist frequency carry one
/// and weight ½. The weights therefore sum to `n / 2` for every segment
/// length, which keeps likelihoods of different partitions comparable.
#[derive(Debug, Clone)]
pub struct Periodogram {
    pub(crate) len: usize,
    pub(crate) ordinates: Vec<f64>,
    pub(crate) weights: Vec<f64>,
}

impl Periodogram {
    pub fn new(segment: &[f64], planner: &mut FftPlanner<f64>) -> Self {
        let n = segment.len();
        let mut buf: Vec<Complex<f64>> = segment.iter().map(|&x| Complex::new(x, 0.0)).collect();
        planner.plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let ordinates = buf[..=half].iter().map(|c| c.norm_sqr() / n as f64).collect();
        let weights = (0..=half)
            .map(|k| if k == 0 || (n % 2 == 0 && k == half) { 0.5 } else { 1.0 })
            .collect();
        Periodogram {
            len: n,
            ordinates,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Design matrix of the log-spectrum basis at a segment's Fourier frequencies.
/// Rows are frequencies; column 0 is the intercept.
pub fn basis_matrix(segment_len: usize, n_basis: usize) -> DMatrix<f64> {
    let n_freq = segment_len / 2 + 1;
    DMatrix::from_fn(n_freq, n_basis + 1, |k, s| {
        if s == 0 {
            1.0
        } else {
            let nu = k as f64 / segment_len as f64;
            let w = 2.0 * PI * s as f64;
            SQRT_2 * (w * nu).cos() / w
        }
    })
}

/// Whittle log-likelihood `Σ_k w_k (−η_k − I_k e^{−η_k})`, `η = Ψβ`.
pub fn whittle(periodogram: &Periodogram, basis: &DMatrix<f64>, beta: &DVector<f64>) -> f64 {
    let eta = basis * beta;
    periodogram
        .ordinates
        .iter()
        .zip(&periodogram.weights)
        .zip(eta.iter())
        .map(|((i, w), e)| w * (-e - i * (-e).exp()))
        .sum()
}

/// Whittle log-likelihood of a raw segment under log-spectrum coefficients
/// `beta` (intercept first, then `beta.len() - 1` spline coefficients).
pub fn log_whittle_likelihood(segment: &[f64], beta: &[f64], t_min: usize) -> Result<f64> {
    if segment.len() < t_min.max(1) {
        return Err(Error::SegmentTooShort {
            len: segment.len(),
            min: t_min,
        });
    }
    if beta.is_empty() {
        return Err(Error::InvalidSamplerConfig("beta needs an intercept".into()));
    }
    let mut planner = FftPlanner::new();
    let pg = Periodogram::new(segment, &mut planner);
    let basis = basis_matrix(segment.len(), beta.len() - 1);
    Ok(whittle(&pg, &basis, &DVector::from_column_slice(beta)))
}

/// Log density of the coefficient prior: intercept `N(0, V)`, spline
/// coefficients `N(0, τ²)`.
pub fn log_beta_prior(beta: &DVector<f64>, tau2: f64, intercept_variance: f64) -> f64 {
    let b0 = beta[0];
    let mut lp = -0.5 * (LN_2PI + intercept_variance.ln() + b0 * b0 / intercept_variance);
    let spline = beta.len() - 1;
    if spline > 0 {
        let ss: f64 = beta.iter().skip(1).map(|b| b * b).sum();
        lp += -0.5 * (spline as f64 * (LN_2PI + tau2.ln()) + ss / tau2);
    }
    lp
}

/// Shape of the inverse-gamma prior on τ²; the log density below assumes 1.
pub const TAU_PRIOR_SHAPE: f64 = 1.0;

/// Log density of the `InvGamma(1, scale)` prior on τ².
pub fn log_tau_prior(tau2: f64, scale: f64) -> f64 {
    scale.ln() - (TAU_PRIOR_SHAPE + 1.0) * tau2.ln() - scale / tau2
}

/// Gaussian approximation `N(mode, (−H)⁻¹)` to `p(β | x, τ²)`.
#[derive(Debug, Clone)]
pub struct GaussianApprox {
    pub mode: DVector<f64>,
    precision_chol: Cholesky<f64, Dyn>,
    log_det_precision: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl GaussianApprox {
    /// Newton iterations on the log conditional posterior, then the negative
    /// inverse Hessian at the mode as covariance.
    pub fn fit(
        periodogram: &Periodogram,
        basis: &DMatrix<f64>,
        tau2: f64,
        intercept_variance: f64,
    ) -> Result<Self> {
        let dim = basis.ncols();
        let prior_precision = DVector::from_fn(dim, |i, _| {
            if i == 0 {
                1.0 / intercept_variance
            } else {
                1.0 / tau2
            }
        });
        let objective = |beta: &DVector<f64>| {
            let pen: f64 = beta
                .iter()
                .zip(prior_precision.iter())
                .map(|(b, p)| b * b * p)
                .sum();
            whittle(periodogram, basis, beta) - 0.5 * pen
        };

        let wsum: f64 = periodogram.weights.iter().sum();
        let level: f64 = periodogram
            .ordinates
            .iter()
            .zip(&periodogram.weights)
            .map(|(i, w)| i * w)
            .sum::<f64>()
            / wsum;
        let mut beta = DVector::zeros(dim);
        beta[0] = level.max(f64::MIN_POSITIVE).ln();
        let mut value = objective(&beta);

        let mut iterations = 0;
        let mut converged = false;
        let mut neg_hess;
        loop {
            let (grad, nh) = grad_and_neg_hessian(periodogram, basis, &beta, &prior_precision);
            neg_hess = nh;
            if grad.amax() < NEWTON_GRAD_TOL {
                converged = true;
                break;
            }
            if iterations == NEWTON_MAX_ITER {
                break;
            }
            iterations += 1;
            let chol = Cholesky::new(neg_hess.clone())
                .ok_or_else(|| Error::Numerical("non-positive-definite Hessian".into()))?;
            let step = chol.solve(&grad);
            // Inside the rounding floor of the objective a line search can
            // no longer tell good steps from bad; the full step is taken.
            let floor = 64.0 * f64::EPSILON * value.abs().max(1.0);
            if grad.dot(&step) < floor {
                beta += step;
                neg_hess = grad_and_neg_hessian(periodogram, basis, &beta, &prior_precision).1;
                converged = true;
                break;
            }
            // Backtrack until the objective does not decrease.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = &beta + &step * scale;
                let tv = objective(&trial);
                if tv.is_finite() && tv >= value {
                    beta = trial;
                    value = tv;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if !beta.iter().all(|b| b.is_finite()) {
            return Err(Error::Numerical("Laplace mode is not finite".into()));
        }
        let precision_chol = Cholesky::new(neg_hess)
            .ok_or_else(|| Error::Numerical("non-positive-definite Hessian".into()))?;
        let log_det_precision = 2.0 * precision_chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(GaussianApprox {
            mode: beta,
            precision_chol,
            log_det_precision,
            iterations,
            converged,
        })
    }

    pub fn dim(&self) -> usize {
        self.mode.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        // precision = L Lᵀ, so Lᵀ x = z gives x ~ N(0, precision⁻¹)
        let lt = self.precision_chol.l().transpose();
        let x = lt
            .solve_upper_triangular(&z)
            .expect("Cholesky factor has a positive diagonal");
        &self.mode + x
    }

    pub fn log_density(&self, beta: &DVector<f64>) -> f64 {
        let diff = beta - &self.mode;
        let lt_diff = self.precision_chol.l().transpose() * &diff;
        -0.5 * (self.dim() as f64 * LN_2PI - self.log_det_precision + lt_diff.norm_squared())
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.precision_chol.inverse()
    }
}

fn grad_and_neg_hessian(
    periodogram: &Periodogram,
    basis: &DMatrix<f64>,
    beta: &DVector<f64>,
    prior_precision: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let dim = basis.ncols();
    let eta = basis * beta;
    // per-frequency first and second derivative weights
    let (g, h): (Vec<f64>, Vec<f64>) = periodogram
        .ordinates
        .iter()
        .zip(&periodogram.weights)
        .zip(eta.iter())
        .map(|((i, w), e)| {
            let r = i * (-e).exp();
            (w * (r - 1.0), w * r)
        })
        .unzip();
    let dot3 = |x: &[f64], y: &[f64], z: &[f64]| -> f64 {
        x.iter().zip(y).zip(z).map(|((a, b), c)| a * b * c).sum()
    };
    let cols: Vec<&[f64]> = (0..dim)
        .map(|a| {
            let n = basis.nrows();
            &basis.as_slice()[a * n..(a + 1) * n]
        })
        .collect();
    let mut grad = DVector::zeros(dim);
    let mut nh = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        grad[a] = cols[a].iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() - prior_precision[a] * beta[a];
        for b in 0..=a {
            let v = dot3(cols[a], cols[b], &h);
            nh[(a, b)] = v;
            nh[(b, a)] = v;
        }
        nh[(a, a)] += prior_precision[a];
    }
    (grad, nh)
}

/// Segment statistics shared by every state that contains the segment.
#[derive(Debug)]
pub(crate) struct SegmentData {
    pub periodogram: Periodogram,
    pub basis: Arc<DMatrix<f64>>,
}
