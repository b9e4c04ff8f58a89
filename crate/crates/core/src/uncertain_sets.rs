//! Sets with uncertainty and the distances between point sets.
//!
//! Regular finite sets get the minimal distance, Hausdorff and MJ_p
//! distances. Sets with uncertainty (collections of densities with disjoint
//! supports) get the MJ-Wasserstein semi-metric, which replaces the ground
//! distance between points by the Wasserstein distance between members. On
//! sets of point masses the two coincide.

use crate::density::{root_order, wasserstein, DiscreteDensity};
use crate::error::{Error, Result};

/// A nonempty finite set of reals, stored sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSet {
    elements: Vec<f64>,
}

impl FiniteSet {
    pub fn new(mut elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(bad) = elements.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput(bad));
        }
        elements.sort_by(f64::total_cmp);
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0]));
        }
        Ok(FiniteSet { elements })
    }

    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `d(x, S) = min_{s ∈ S} |x − s|`.
pub fn min_distance_to_set(x: f64, set: &FiniteSet) -> f64 {
    let e = &set.elements;
    let k = e.partition_point(|&s| s < x);
    let right = e.get(k).map_or(f64::INFINITY, |s| s - x);
    let left = if k > 0 { x - e[k - 1] } else { f64::INFINITY };
    left.min(right)
}

/// Hausdorff distance: the largest minimal distance from either set to the other.
pub fn hausdorff(s: &FiniteSet, t: &FiniteSet) -> f64 {
    let st = s
        .elements
        .iter()
        .map(|&x| min_distance_to_set(x, t))
        .fold(0.0, f64::max);
    let ts = t
        .elements
        .iter()
        .map(|&x| min_distance_to_set(x, s))
        .fold(0.0, f64::max);
    st.max(ts)
}

/// MJ_p distance between finite sets.
pub fn mj_distance(s: &FiniteSet, t: &FiniteSet, p: f64) -> Result<f64> {
    check_p(p)?;
    let t_to_s: f64 = t
        .elements
        .iter()
        .map(|&x| pow_p(min_distance_to_set(x, s), p))
        .sum();
    let s_to_t: f64 = s
        .elements
        .iter()
        .map(|&x| pow_p(min_distance_to_set(x, t), p))
        .sum();
    Ok(combine(t_to_s, t.len(), s_to_t, s.len(), p))
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(p))
    }
}

#[inline]
fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

#[inline]
fn combine(sum_a: f64, len_a: usize, sum_b: f64, len_b: usize, p: f64) -> f64 {
    let inner = sum_a / (2 * len_a) as f64 + sum_b / (2 * len_b) as f64;
    if p == 1.0 {
        inner
    } else if p == 0.5 {
        inner * inner
    } else {
        root_order(inner, p)
    }
}

/// A nonempty collection of densities whose supports are pairwise disjoint
/// intervals, ordered by position.
#[derive(Debug, Clone, PartialEq)]
pub struct SetWithUncertainty {
    members: Vec<DiscreteDensity>,
}

impl SetWithUncertainty {
    /// Validate disjointness; members are sorted by support left endpoint.
    pub fn new(mut members: Vec<DiscreteDensity>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        members.sort_by(|a, b| a.support().0.total_cmp(&b.support().0));
        for pair in members.windows(2) {
            let (a_lo, a_hi) = pair[0].support();
            let (b_lo, b_hi) = pair[1].support();
            if a_hi >= b_lo {
                return Err(Error::OverlappingSupports {
                    left_lo: a_lo,
                    left_hi: a_hi,
                    right_lo: b_lo,
                    right_hi: b_hi,
                });
            }
        }
        Ok(SetWithUncertainty { members })
    }

    /// Build a set from densities that are ordered by location but may
    /// overlap, truncating neighbours at the midpoint between their modes.
    ///
    /// When the modes are not strictly increasing the midpoints between
    /// means are used instead. A member left with no mass is a data error.
    pub fn repaired(members: Vec<DiscreteDensity>) -> Result<Self> {
        if members.len() < 2 {
            return Self::new(members);
        }
        let modes: Vec<f64> = members.iter().map(DiscreteDensity::mode).collect();
        let anchors = if modes.windows(2).all(|w| w[0] < w[1]) {
            modes
        } else {
            members.iter().map(DiscreteDensity::mean).collect()
        };
        let cuts: Vec<f64> = anchors.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let last = members.len() - 1;
        let repaired = members
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let lo = if j == 0 { f64::NEG_INFINITY } else { cuts[j - 1] };
                let hi = if j == last { f64::INFINITY } else { cuts[j] };
                m.truncate(lo, hi)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(repaired)
    }

    /// Point masses at each of `points`.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        let set = FiniteSet::new(points.to_vec())?;
        let members = set
            .elements
            .iter()
            .map(|&x| DiscreteDensity::delta(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetWithUncertainty { members })
    }

    pub fn members(&self) -> &[DiscreteDensity] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The associated regular set, when every member is a point mass.
    pub fn as_regular_set(&self) -> Option<FiniteSet> {
        self.members
            .iter()
            .map(|m| m.is_delta().then(|| m.support().0))
            .collect::<Option<Vec<_>>>()
            .and_then(|e| FiniteSet::new(e).ok())
    }

    pub fn into_members(self) -> Vec<DiscreteDensity> {
        self.members
    }
}

/// `d_W(f, S̃)`: Wasserstein distance from `f` to its nearest member of `set`.
pub fn min_wasserstein_to_set(f: &DiscreteDensity, set: &SetWithUncertainty, q: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for h in &set.members {
        best = best.min(wasserstein(f, h, q)?);
    }
    Ok(best)
}

/// MJ-Wasserstein semi-metric between two sets with uncertainty.
pub fn mj_wasserstein(
    s: &SetWithUncertainty,
    t: &SetWithUncertainty,
    p: f64,
    q: f64,
) -> Result<f64> {
    check_p(p)?;
    let mut t_to_s = 0.0;
    for g in &t.members {
        t_to_s += pow_p(min_wasserstein_to_set(g, s, q)?, p);
    }
    let mut s_to_t = 0.0;
    for f in &s.members {
        s_to_t += pow_p(min_wasserstein_to_set(f, t, q)?, p);
    }
    Ok(combine(t_to_s, t.len(), s_to_t, s.len(), p))
}
