//! Discrete proposal kernels of the sampler: the segment-count proposal of
//! the between-model moves and the relocation mixture of the within-model
//! move.

use rand::Rng;

/// Probability that the between-model step proposes `to` segments from `from`.
///
/// A birth needs `from < max` and at least one segment long enough to split
/// (`m2min > 0`); a death needs `from > 1`. When both are possible each is
/// proposed with probability ½, otherwise the possible one is forced.
pub fn segment_count_prob(from: usize, to: usize, max: usize, m2min: usize) -> f64 {
    let can_birth = from < max && m2min > 0;
    let can_death = from > 1;
    let birth = to == from + 1;
    let death = from > 0 && to == from - 1;
    match (can_birth, can_death) {
        (true, true) if birth || death => 0.5,
        (true, false) if birth => 1.0,
        (false, true) if death => 1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCountProposal {
    pub proposed: usize,
    /// `q(proposed | current)`.
    pub forward_prob: f64,
}

impl SegmentCountProposal {
    pub fn is_birth(&self, current: usize) -> bool {
        self.proposed > current
    }

    /// `q(current | proposed)`, given the number of splittable segments in the
    /// proposed partition.
    pub fn reverse_prob(&self, current: usize, max: usize, m2min_proposed: usize) -> f64 {
        segment_count_prob(self.proposed, current, max, m2min_proposed)
    }
}

/// Draw the proposed segment count; `None` when no between-model move exists.
pub fn propose_segment_count<R: Rng + ?Sized>(
    current: usize,
    max: usize,
    m2min: usize,
    rng: &mut R,
) -> Option<SegmentCountProposal> {
    let up = segment_count_prob(current, current + 1, max, m2min);
    let down = segment_count_prob(current, current.wrapping_sub(1), max, m2min);
    if up == 0.0 && down == 0.0 {
        return None;
    }
    let proposed = if up == 1.0 {
        current + 1
    } else if down == 1.0 {
        current - 1
    } else if rng.random_bool(0.5) {
        current + 1
    } else {
        current - 1
    };
    let forward_prob = if proposed > current { up } else { down };
    Some(SegmentCountProposal {
        proposed,
        forward_prob,
    })
}

/// Local relocation kernel q₂: mass on the at most three positions next to
/// the current change point `xi`, excluding moves that would shrink a
/// neighbouring segment already at `t_min`.
pub fn local_kernel_prob(t: usize, xi: usize, n_left: usize, n_right: usize, t_min: usize) -> f64 {
    if t.abs_diff(xi) > 1 {
        return 0.0;
    }
    match (n_left == t_min, n_right == t_min) {
        (false, false) => 1.0 / 3.0,
        (true, false) => {
            if t >= xi {
                0.5
            } else {
                0.0
            }
        }
        (false, true) => {
            if t <= xi {
                0.5
            } else {
                0.0
            }
        }
        (true, true) => {
            if t == xi {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Feasible positions `[left + t_min, right − t_min]` for a change point
/// between the neighbours `left` and `right`.
pub fn global_window(left: usize, right: usize, t_min: usize) -> (usize, usize) {
    (left + t_min, right - t_min)
}

/// Global relocation kernel q₁: uniform over the feasible window.
pub fn global_kernel_prob(t: usize, left: usize, right: usize, t_min: usize) -> f64 {
    let (lo, hi) = global_window(left, right, t_min);
    if t < lo || t > hi {
        0.0
    } else {
        1.0 / (hi - lo + 1) as f64
    }
}

/// Mixture `π q₁ + (1 − π) q₂` for moving the change point at `xi`, which
/// sits between `left` and `right`.
pub fn relocation_prob(t: usize, xi: usize, left: usize, right: usize, t_min: usize, weight: f64) -> f64 {
    weight * global_kernel_prob(t, left, right, t_min)
        + (1.0 - weight) * local_kernel_prob(t, xi, xi - left, right - xi, t_min)
}

pub fn sample_relocation<R: Rng + ?Sized>(
    xi: usize,
    left: usize,
    right: usize,
    t_min: usize,
    weight: f64,
    rng: &mut R,
) -> usize {
    if rng.random::<f64>() < weight {
        let (lo, hi) = global_window(left, right, t_min);
        rng.random_range(lo..=hi)
    } else {
        let candidates: Vec<usize> = [xi.wrapping_sub(1), xi, xi + 1]
            .into_iter()
            .filter(|&t| local_kernel_prob(t, xi, xi - left, right - xi, t_min) > 0.0)
            .collect();
        candidates[rng.random_range(0..candidates.len())]
    }
}
