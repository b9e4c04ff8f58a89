//! Birth, death and within-model moves of the reversible-jump sampler.
//!
//! A birth splits segment `k` at `t`, maps `(τ²_k, u)` to the pair
//! `(u/(1−u)·τ²_k, (1−u)/u·τ²_k)` and draws fresh coefficients for both
//! halves from their Laplace approximations. A death merges two neighbours,
//! takes the geometric mean of their amplitudes and draws coefficients for
//! the merged segment. The two are exact mirrors, so the death ratio is the
//! negated log ratio of the birth that would undo it.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::proposals::{relocation_prob, sample_relocation, segment_count_prob};
use super::spectral::{log_beta_prior, TAU_PRIOR_SHAPE};
use super::state::{ChainState, SegmentModel};
use crate::error::{Error, Result};

/// Outcome of a Metropolis–Hastings step; `state` is the new current state
/// (unchanged on rejection).
#[derive(Debug, Clone)]
pub struct MoveResult {
    pub state: ChainState,
    pub accepted: bool,
    pub log_alpha: f64,
}

/// Split the amplitude `tau2` with auxiliary draw `u ∈ (0, 1)`.
pub fn split_tau2(tau2: f64, u: f64) -> (f64, f64) {
    (u / (1.0 - u) * tau2, (1.0 - u) / u * tau2)
}

/// Inverse of [`split_tau2`] for the amplitude: the geometric mean.
pub fn merge_tau2(left: f64, right: f64) -> f64 {
    (left * right).sqrt()
}

/// Inverse of [`split_tau2`] for the auxiliary draw.
pub fn recover_u(left: f64, right: f64) -> f64 {
    let r = (left / right).sqrt();
    r / (1.0 + r)
}

/// `|∂(τ²₁, τ²₂) / ∂(τ², u)| = 2τ² / (u(1−u))`.
pub fn split_jacobian(tau2: f64, u: f64) -> f64 {
    2.0 * tau2 / (u * (1.0 - u))
}

/// The same Jacobian written in the split amplitudes: `2(τ₁ + τ₂)²`.
pub fn split_jacobian_from_pair(left: f64, right: f64) -> f64 {
    let s = left.sqrt() + right.sqrt();
    2.0 * s * s
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirthProposal {
    /// Segment to split.
    pub segment: usize,
    /// New change point, strictly inside the segment.
    pub split: usize,
    pub u: f64,
    pub beta_left: DVector<f64>,
    pub beta_right: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeathProposal {
    /// Index into `xi` of the change point to remove (`1..m`).
    pub changepoint: usize,
    pub beta_merged: DVector<f64>,
}

pub fn apply_birth(state: &ChainState, p: &BirthProposal) -> ChainState {
    let k = p.segment;
    let (t1, t2) = split_tau2(state.tau2[k], p.u);
    let mut next = state.clone();
    next.xi.insert(k + 1, p.split);
    next.tau2.splice(k..=k, [t1, t2]);
    next.beta
        .splice(k..=k, [p.beta_left.clone(), p.beta_right.clone()]);
    next
}

pub fn apply_death(state: &ChainState, p: &DeathProposal) -> ChainState {
    let i = p.changepoint;
    let merged = merge_tau2(state.tau2[i - 1], state.tau2[i]);
    let mut next = state.clone();
    next.xi.remove(i);
    next.tau2.splice(i - 1..=i, [merged]);
    next.beta.splice(i - 1..=i, [p.beta_merged.clone()]);
    next
}

/// Log acceptance ratio of splitting `current` as described by `p`.
pub fn log_birth_ratio(model: &mut SegmentModel, current: &ChainState, p: &BirthProposal) -> Result<f64> {
    let cfg = model.config().clone();
    let t_min = cfg.t_min;
    let m = current.m();
    let k = p.segment;
    let (start, end) = current.segment(k);
    let t = p.split;
    if t < start + t_min || t + t_min > end {
        return Err(Error::Numerical(format!(
            "split {t} infeasible for segment [{start}, {end})"
        )));
    }
    let tau_old = current.tau2[k];
    let (t1, t2) = split_tau2(tau_old, p.u);

    let m2min_c = current.splittable(t_min);
    let long = |len: usize| usize::from(len >= 2 * t_min);
    let m2min_p = m2min_c - long(end - start) + long(t - start) + long(end - t);

    let target_new = model.segment_log_target(start, t, &p.beta_left, t1)
        + model.segment_log_target(t, end, &p.beta_right, t2)
        - model.log_partition_count(m + 1);
    let target_old = model.segment_log_target(start, end, &current.beta[k], tau_old)
        - model.log_partition_count(m);

    let q_reverse = segment_count_prob(m + 1, m, cfg.max_segments, m2min_p).ln()
        - (m as f64).ln()
        + model.approx(start, end, tau_old)?.log_density(&current.beta[k]);
    let q_forward = segment_count_prob(m, m + 1, cfg.max_segments, m2min_c).ln()
        - (m2min_c as f64).ln()
        - ((end - start - 2 * t_min + 1) as f64).ln()
        + model.approx(start, t, t1)?.log_density(&p.beta_left)
        + model.approx(t, end, t2)?.log_density(&p.beta_right);

    Ok(target_new - target_old + q_reverse - q_forward + split_jacobian(tau_old, p.u).ln())
}

/// Log acceptance ratio of the death `p`: the negated ratio of the birth
/// that maps the merged state back to `current`.
pub fn log_death_ratio(model: &mut SegmentModel, current: &ChainState, p: &DeathProposal) -> Result<f64> {
    let i = p.changepoint;
    let merged = apply_death(current, p);
    let mirror = BirthProposal {
        segment: i - 1,
        split: current.xi[i],
        u: recover_u(current.tau2[i - 1], current.tau2[i]),
        beta_left: current.beta[i - 1].clone(),
        beta_right: current.beta[i].clone(),
    };
    Ok(-log_birth_ratio(model, &merged, &mirror)?)
}

fn accept<R: Rng + ?Sized>(log_alpha: f64, rng: &mut R) -> bool {
    log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha
}

/// Draw a birth proposal: a splittable segment uniformly, a split point
/// uniformly in its feasible range, `u ~ U(0,1)` and both coefficient vectors
/// from their Laplace approximations.
pub fn propose_birth<R: Rng + ?Sized>(
    model: &mut SegmentModel,
    state: &ChainState,
    rng: &mut R,
) -> Result<BirthProposal> {
    let t_min = model.config().t_min;
    let candidates: Vec<usize> = (0..state.m())
        .filter(|&j| state.segment_len(j) >= 2 * t_min)
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoSplittableSegment);
    }
    let k = candidates[rng.random_range(0..candidates.len())];
    let (start, end) = state.segment(k);
    let split = rng.random_range(start + t_min..=end - t_min);
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let (t1, t2) = split_tau2(state.tau2[k], u);
    let beta_left = model.approx(start, split, t1)?.sample(rng);
    let beta_right = model.approx(split, end, t2)?.sample(rng);
    Ok(BirthProposal {
        segment: k,
        split,
        u,
        beta_left,
        beta_right,
    })
}

pub fn birth_move<R: Rng + ?Sized>(
    model: &mut SegmentModel,
    state: &ChainState,
    rng: &mut R,
) -> Result<MoveResult> {
    model.clear_fits();
    if state.m() >= model.config().max_segments {
        return Err(Error::NoSplittableSegment);
    }
    let p = propose_birth(model, state, rng)?;
    let log_alpha = log_birth_ratio(model, state, &p)?;
    Ok(if accept(log_alpha, rng) {
        MoveResult {
            state: apply_birth(state, &p),
            accepted: true,
            log_alpha,
        }
    } else {
        MoveResult {
            state: state.clone(),
            accepted: false,
            log_alpha,
        }
    })
}

pub fn death_move<R: Rng + ?Sized>(
    model: &mut SegmentModel,
    state: &ChainState,
    rng: &mut R,
) -> Result<MoveResult> {
    model.clear_fits();
    let m = state.m();
    if m < 2 {
        return Err(Error::NoRemovableChangePoint);
    }
    let i = rng.random_range(1..m);
    let tau = merge_tau2(state.tau2[i - 1], state.tau2[i]);
    let (start, end) = (state.xi[i - 1], state.xi[i + 1]);
    let beta_merged = model.approx(start, end, tau)?.sample(rng);
    let p = DeathProposal {
        changepoint: i,
        beta_merged,
    };
    let log_alpha = log_death_ratio(model, state, &p)?;
    Ok(if accept(log_alpha, rng) {
        MoveResult {
            state: apply_death(state, &p),
            accepted: true,
            log_alpha,
        }
    } else {
        MoveResult {
            state: state.clone(),
            accepted: false,
            log_alpha,
        }
    })
}

/// Gibbs draw of τ² from its conditional given the spline coefficients:
/// `InvGamma(a + J/2, b + Σ_s β_s² / 2)`.
pub fn draw_tau2<R: Rng + ?Sized>(beta: &DVector<f64>, prior_scale: f64, rng: &mut R) -> Result<f64> {
    let spline = beta.len() - 1;
    let ss: f64 = beta.iter().skip(1).map(|b| b * b).sum();
    let shape = TAU_PRIOR_SHAPE + 0.5 * spline as f64;
    let rate = prior_scale + 0.5 * ss;
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Numerical(e.to_string()))?;
    let draw: f64 = g.sample(rng);
    if draw > 0.0 && draw.is_finite() {
        Ok(1.0 / draw)
    } else {
        Err(Error::Numerical(format!("tau2 Gibbs draw {draw}")))
    }
}

/// Within-model step: relocate one change point (or, with a single segment,
/// refresh its coefficients), jointly accepting the coefficient update with a
/// Metropolis–Hastings step, then Gibbs-update the affected amplitudes.
pub fn within_move<R: Rng + ?Sized>(
    model: &mut SegmentModel,
    state: &ChainState,
    rng: &mut R,
) -> Result<MoveResult> {
    model.clear_fits();
    let cfg = model.config().clone();
    let m = state.m();
    let (mut next, accepted, log_alpha, touched) = if m == 1 {
        let n = model.n();
        let tau = state.tau2[0];
        let fit = model.approx(0, n, tau)?;
        let proposal = fit.sample(rng);
        let log_alpha = model.log_likelihood(0, n, &proposal)
            + log_beta_prior(&proposal, tau, cfg.intercept_variance)
            + fit.log_density(&state.beta[0])
            - model.log_likelihood(0, n, &state.beta[0])
            - log_beta_prior(&state.beta[0], tau, cfg.intercept_variance)
            - fit.log_density(&proposal);
        let accepted = accept(log_alpha, rng);
        let mut next = state.clone();
        if accepted {
            next.beta[0] = proposal;
        }
        (next, accepted, log_alpha, vec![0])
    } else {
        let i = rng.random_range(1..m);
        let (left, xi, right) = (state.xi[i - 1], state.xi[i], state.xi[i + 1]);
        let t = sample_relocation(xi, left, right, cfg.t_min, cfg.mixture_weight, rng);
        let (ta, tb) = (state.tau2[i - 1], state.tau2[i]);
        let fit_a = model.approx(left, t, ta)?;
        let fit_b = model.approx(t, right, tb)?;
        let beta_a = fit_a.sample(rng);
        let beta_b = fit_b.sample(rng);
        let cur_a = model.approx(left, xi, ta)?;
        let cur_b = model.approx(xi, right, tb)?;
        let prior = |b: &DVector<f64>, tau: f64| log_beta_prior(b, tau, cfg.intercept_variance);

        let new = model.log_likelihood(left, t, &beta_a)
            + model.log_likelihood(t, right, &beta_b)
            + prior(&beta_a, ta)
            + prior(&beta_b, tb)
            + cur_a.log_density(&state.beta[i - 1])
            + cur_b.log_density(&state.beta[i])
            + relocation_prob(xi, t, left, right, cfg.t_min, cfg.mixture_weight).ln();
        let old = model.log_likelihood(left, xi, &state.beta[i - 1])
            + model.log_likelihood(xi, right, &state.beta[i])
            + prior(&state.beta[i - 1], ta)
            + prior(&state.beta[i], tb)
            + fit_a.log_density(&beta_a)
            + fit_b.log_density(&beta_b)
            + relocation_prob(t, xi, left, right, cfg.t_min, cfg.mixture_weight).ln();
        let log_alpha = new - old;
        let accepted = accept(log_alpha, rng);
        let mut next = state.clone();
        if accepted {
            next.xi[i] = t;
            next.beta[i - 1] = beta_a;
            next.beta[i] = beta_b;
        }
        (next, accepted, log_alpha, vec![i - 1, i])
    };
    for j in touched {
        next.tau2[j] = draw_tau2(&next.beta[j], cfg.prior_scale, rng)?;
    }
    Ok(MoveResult {
        state: next,
        accepted,
        log_alpha,
    })
}
