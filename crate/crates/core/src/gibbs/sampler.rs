//! Systematic-scan single-site Gibbs sweeps.
//!
//! Each sweep resamples every site in vertex order from its exact one-site
//! conditional, so the chain is in detailed balance with the truncated
//! measure. Strong log-concavity of the conditionals makes the defaults
//! (200 burn-in sweeps, thinning 5) comfortable at desk scale; both are
//! knobs, and the `beta = lambda = 0` calibration checks them against
//! quadrature.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::monotonicity::Assignment;
use crate::rng::{substream_rng, substream_seed};

use super::density::one_site_conditional;
use super::GibbsModel;

#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub thin: usize,
    /// Parallel chains for batch sampling; 0 picks one chain per 16 samples.
    pub chains: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: 200,
            thin: 5,
            chains: 0,
        }
    }
}

/// One Markov chain over configurations in the box.
pub struct GibbsChain<'a> {
    model: &'a GibbsModel,
    values: Vec<f64>,
    rng: ChaCha8Rng,
    sweeps_done: usize,
}

impl<'a> GibbsChain<'a> {
    /// Start at the all-zero configuration with a dedicated substream.
    pub fn new(model: &'a GibbsModel, seed: u64) -> Self {
        GibbsChain {
            model,
            values: vec![0.0; model.n()],
            rng: substream_rng(seed, 0),
            sweeps_done: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::Float(self.values.clone())
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps_done
    }

    pub fn sweep(&mut self) -> Result<()> {
        for v in 0..self.model.n() {
            let cond = one_site_conditional(self.model, v, &self.values)?;
            self.values[v] = cond.sample(&mut self.rng);
        }
        self.sweeps_done += 1;
        Ok(())
    }

    pub fn run(&mut self, sweeps: usize) -> Result<()> {
        for _ in 0..sweeps {
            self.sweep()?;
        }
        Ok(())
    }
}

/// Run a fresh chain for `sweeps` sweeps and return the final configuration.
pub fn gibbs_sweep_sample(model: &GibbsModel, sweeps: usize, seed: u64) -> Result<Assignment> {
    let mut chain = GibbsChain::new(model, seed);
    chain.run(sweeps)?;
    Ok(chain.assignment())
}

/// Draw `count` configurations: independent chains in parallel, each burned
/// in and then thinned. Output order is a pure function of the seed.
pub fn sample_batch(
    model: &GibbsModel,
    count: usize,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let chains = if cfg.chains == 0 {
        count.div_ceil(16).min(count)
    } else {
        cfg.chains.min(count)
    };
    let per_chain = count.div_ceil(chains);
    let mut out: Vec<Vec<Vec<f64>>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = GibbsChain {
                model,
                values: vec![0.0; model.n()],
                rng: substream_rng(substream_seed(seed, c as u64), 0),
                sweeps_done: 0,
            };
            chain.run(cfg.burn_in)?;
            let mut samples = Vec::with_capacity(per_chain);
            for s in 0..per_chain {
                if s > 0 {
                    chain.run(cfg.thin.max(1))?;
                }
                samples.push(chain.values.clone());
            }
            Ok(samples)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut flat = Vec::with_capacity(count);
    for chain_samples in out.iter_mut() {
        flat.append(chain_samples);
    }
    flat.truncate(count);
    Ok(flat)
}
