//! Reversible-jump MCMC over piecewise-stationary segmentations.
//!
//! Each segment's log-spectrum is a smoothing spline whose fit to the
//! segment periodogram is scored with the Whittle likelihood. The chain
//! moves between segment counts by births and deaths and relocates change
//! points within a count; the retained draws give a posterior over the
//! number of segments and, for the modal count, a density for every change
//! point.

mod config;
mod moves;
mod posterior;
mod proposals;
mod sampler;
mod spectral;
mod state;

pub use config::SamplerConfig;
pub use moves::{
    apply_birth, apply_death, birth_move, death_move, draw_tau2, log_birth_ratio,
    log_death_ratio, merge_tau2, propose_birth, recover_u, split_jacobian,
    split_jacobian_from_pair, split_tau2, within_move, BirthProposal, DeathProposal, MoveResult,
};
pub use posterior::{modal_changepoint_set, AcceptanceRates, Posterior, PosteriorRecord, Sample};
pub use proposals::{
    global_kernel_prob, global_window, local_kernel_prob, propose_segment_count,
    relocation_prob, sample_relocation, segment_count_prob, SegmentCountProposal,
};
pub use sampler::{chain_rng, run_chain, run_chain_stream};
pub use spectral::{
    basis_matrix, log_beta_prior, log_tau_prior, log_whittle_likelihood, whittle,
    GaussianApprox, Periodogram,
};
pub use state::{log_partition_count, ChainState, SegmentModel};
