use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::SamplerConfig;
use super::moves::{birth_move, death_move, within_move};
use super::posterior::{AcceptanceRates, Posterior, Sample};
use super::proposals::propose_segment_count;
use super::state::SegmentModel;
use crate::error::Result;

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    tried: u64,
    accepted: u64,
}

impl Tally {
    fn record(&mut self, accepted: bool) {
        self.tried += 1;
        self.accepted += u64::from(accepted);
    }

    fn rate(&self) -> f64 {
        if self.tried == 0 {
            0.0
        } else {
            self.accepted as f64 / self.tried as f64
        }
    }
}

/// Random stream for chain `stream` under `seed`. Distinct streams of the
/// same seed are independent.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run the sampler on `series` with the stream-0 generator of `config.seed`.
pub fn run_chain(series: &[f64], config: &SamplerConfig) -> Result<Posterior> {
    run_chain_stream(series, config, 0)
}

/// Run one chain. Each iteration attempts a between-model move (birth or
/// death, when `max_segments > 1`) followed by a within-model move.
pub fn run_chain_stream(series: &[f64], config: &SamplerConfig, stream: u64) -> Result<Posterior> {
    let mut model = SegmentModel::new(series, config.clone())?;
    let mut rng = chain_rng(config.seed, stream);
    let mut state = model.initial_state()?;
    let (mut birth, mut death, mut within, mut gibbs) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default());
    let mut samples = Vec::with_capacity(config.n_iterations - config.n_burnin);
    let mut histogram = vec![0u64; config.max_segments];

    for iteration in 0..config.n_iterations {
        let m = state.m();
        if let Some(p) = propose_segment_count(
            m,
            config.max_segments,
            state.splittable(config.t_min),
            &mut rng,
        ) {
            if p.is_birth(m) {
                let r = birth_move(&mut model, &state, &mut rng)?;
                birth.record(r.accepted);
                state = r.state;
            } else {
                let r = death_move(&mut model, &state, &mut rng)?;
                death.record(r.accepted);
                state = r.state;
            }
        }
        let r = within_move(&mut model, &state, &mut rng)?;
        within.record(r.accepted);
        let touched = if r.state.m() == 1 { 1 } else { 2 };
        for _ in 0..touched {
            gibbs.record(true);
        }
        state = r.state;
        debug_assert!(state.validate(series.len(), config.t_min).is_ok());

        if iteration >= config.n_burnin {
            histogram[state.m() - 1] += 1;
            samples.push(Sample {
                m: state.m(),
                changepoints: state.changepoints().to_vec(),
            });
        }
    }

    Ok(Posterior {
        n: series.len(),
        samples,
        m_histogram: histogram,
        acceptance: AcceptanceRates {
            birth: birth.rate(),
            death: death.rate(),
            within: within.rate(),
            gibbs: gibbs.rate(),
        },
    })
}
