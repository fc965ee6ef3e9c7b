//! Monte Carlo layer: heat-bath and cluster dynamics for the three
//! models, exact sequential couplings, and batch-means estimation.

mod coupling;
mod dynamics;
mod scratch;

pub use coupling::{
    coupling_kappa01, coupling_mu_e, CouplingAudit, Kappa01Coupling, Kappa01Draw, MuECoupling,
    COUPLING_EDGE_BUDGET,
};
pub use dynamics::{
    crcm_heat_bath_open_prob, crcm_heat_bath_sweep, crcm_sample, ising_glauber_sweep, rc_heat_bath_open_prob,
    rc_heat_bath_sweep, swendsen_wang_sweep, PottsState,
};

use alloc::vec::Vec;

use crate::error::SampleError;
use crate::exact::{
    event_holds_edges, event_holds_spins, CrcmParams, EventSpec, IsingBc, IsingParams, RcParams,
};
use crate::lattice::{EdgeConfig, LatticeGraph, SpinConfig};
use crate::rng::chain_rng;

/// Batch-means estimation uses this many batches per chain.
pub const BATCHES_PER_CHAIN: u32 = 16;

/// How many chains to run and how long, plus the master seed. Seed
/// expansion to per-chain streams is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainSpec {
    pub seed: u64,
    pub chains: u32,
    pub burnin_sweeps: u32,
    pub sample_sweeps: u32,
    pub thinning: u32,
}

impl ChainSpec {
    pub fn new(seed: u64, chains: u32, burnin_sweeps: u32, sample_sweeps: u32, thinning: u32) -> Self {
        Self { seed, chains, burnin_sweeps, sample_sweeps, thinning }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.chains < 1 || self.sample_sweeps < 1 || self.thinning < 1 {
            return Err(SampleError::InvalidChainSpec(
                "chains, sample sweeps, and thinning must all be at least one",
            ));
        }
        Ok(())
    }

    /// Retained samples per chain.
    pub fn samples_per_chain(&self) -> u64 {
        (self.sample_sweeps / self.thinning) as u64
    }
}

/// A Monte Carlo estimate with a batch-means standard error.
/// `std_error` is NaN (and `batch_count` zero) when a chain yields fewer
/// than [`BATCHES_PER_CHAIN`] samples; callers render this as degenerate
/// rather than as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub batch_count: u32,
}

impl Estimate {
    pub fn is_degenerate(&self) -> bool {
        self.batch_count == 0
    }
}

/// Aggregates per-sample indicator values (one stream per chain) into a
/// batch-means estimate. Each chain is split into [`BATCHES_PER_CHAIN`]
/// equal batches; the trailing remainder of each chain is dropped so that
/// the mean is exactly the grand mean of the batch means.
pub(crate) struct BatchAccumulator {
    per_chain: u64,
    batch_size: u64,
    batch_means: Vec<f64>,
    current_sum: f64,
    current_count: u64,
    chain_samples: u64,
}

impl BatchAccumulator {
    pub fn new(per_chain: u64) -> Self {
        let batch_size = per_chain / BATCHES_PER_CHAIN as u64;
        Self {
            per_chain,
            batch_size,
            batch_means: Vec::new(),
            current_sum: 0.0,
            current_count: 0,
            chain_samples: 0,
        }
    }

    pub fn push(&mut self, value: f64) {
        if self.batch_size == 0 {
            // Degenerate: too few samples per chain for batching; keep a
            // running mean via a single pseudo-batch per chain instead.
            self.current_sum += value;
            self.current_count += 1;
            return;
        }
        if self.chain_samples >= self.batch_size * BATCHES_PER_CHAIN as u64 {
            self.chain_samples += 1;
            return; // remainder dropped
        }
        self.current_sum += value;
        self.current_count += 1;
        self.chain_samples += 1;
        if self.current_count == self.batch_size {
            self.batch_means.push(self.current_sum / self.batch_size as f64);
            self.current_sum = 0.0;
            self.current_count = 0;
        }
    }

    pub fn end_chain(&mut self) {
        self.chain_samples = 0;
        if self.batch_size == 0 && self.current_count > 0 {
            self.batch_means.push(self.current_sum / self.current_count as f64);
            self.current_sum = 0.0;
            self.current_count = 0;
        }
    }

    pub fn finish(self, chains: u32) -> Estimate {
        let degenerate = self.batch_size == 0;
        let k = self.batch_means.len();
        let mean = if k == 0 {
            f64::NAN
        } else {
            self.batch_means.iter().sum::<f64>() / k as f64
        };
        if degenerate || k < 2 {
            return Estimate {
                mean,
                std_error: f64::NAN,
                n: self.per_chain * chains as u64,
                batch_count: 0,
            };
        }
        let var = self
            .batch_means
            .iter()
            .map(|&b| (b - mean) * (b - mean))
            .sum::<f64>()
            / (k - 1) as f64;
        Estimate {
            mean,
            std_error: crate::math::sqrt(var / k as f64),
            n: self.batch_size * k as u64,
            batch_count: k as u32,
        }
    }
}

/// Which sampler to drive for an event estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SampleModel {
    /// Random-cluster single-edge heat bath.
    Rc(RcParams),
    /// Spin-model single-site heat bath.
    Ising(IsingParams),
    /// Coloured-model edge-marginal heat bath.
    CrcmEdges(CrcmParams),
}

enum ChainState {
    Edges(EdgeConfig),
    Spins(SpinConfig),
}

fn initial_state(g: &LatticeGraph, model: &SampleModel) -> ChainState {
    match model {
        SampleModel::Rc(_) | SampleModel::CrcmEdges(_) => {
            ChainState::Edges(EdgeConfig::all_closed(g.edge_count()))
        }
        SampleModel::Ising(params) => {
            let mut s = SpinConfig::all_down(g.vertex_count());
            if params.bc == IsingBc::Plus {
                for v in g.boundary_vertices() {
                    s.set(v, true);
                }
            }
            ChainState::Spins(s)
        }
    }
}

/// Runs independent chains of the chosen dynamics and estimates the event
/// probability with a batch-means standard error. Deterministic in
/// `spec.seed`: identical inputs give a bit-identical [`Estimate`].
pub fn estimate_event(
    g: &LatticeGraph,
    model: &SampleModel,
    event: &EventSpec,
    spec: &ChainSpec,
) -> Result<Estimate, SampleError> {
    spec.validate()?;
    match model {
        SampleModel::Rc(p) => p.validate().map_err(SampleError::Exact)?,
        SampleModel::Ising(p) => p.validate().map_err(SampleError::Exact)?,
        SampleModel::CrcmEdges(p) => p.validate().map_err(SampleError::Exact)?,
    }
    // Fail fast on event/model mismatches before spending sweeps.
    let wants_spins = event.wants_spins();
    let model_is_spin = matches!(model, SampleModel::Ising(_));
    if wants_spins == Some(true) && !model_is_spin || wants_spins == Some(false) && model_is_spin {
        return Err(SampleError::Exact(crate::error::ExactError::EventKindMismatch));
    }
    let mut acc = BatchAccumulator::new(spec.samples_per_chain());
    for chain in 0..spec.chains {
        let mut rng = chain_rng(spec.seed, chain as u64);
        let mut state = initial_state(g, model);
        for _ in 0..spec.burnin_sweeps {
            step(g, model, &mut state, &mut rng)?;
        }
        let mut since_record = 0;
        for _ in 0..spec.sample_sweeps {
            step(g, model, &mut state, &mut rng)?;
            since_record += 1;
            if since_record == spec.thinning {
                since_record = 0;
                let hit = match &state {
                    ChainState::Edges(cfg) => {
                        event_holds_edges(g, event, cfg).map_err(SampleError::Exact)?
                    }
                    ChainState::Spins(s) => {
                        event_holds_spins(g, event, s).map_err(SampleError::Exact)?
                    }
                };
                acc.push(if hit { 1.0 } else { 0.0 });
            }
        }
        acc.end_chain();
    }
    Ok(acc.finish(spec.chains))
}

fn step(
    g: &LatticeGraph,
    model: &SampleModel,
    state: &mut ChainState,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(), SampleError> {
    match (model, state) {
        (SampleModel::Rc(params), ChainState::Edges(cfg)) => {
            rc_heat_bath_sweep(g, cfg, params, rng)
        }
        (SampleModel::CrcmEdges(params), ChainState::Edges(cfg)) => {
            crcm_heat_bath_sweep(g, cfg, params, rng)
        }
        (SampleModel::Ising(params), ChainState::Spins(s)) => {
            ising_glauber_sweep(g, s, params, rng)
        }
        _ => Err(SampleError::UnsupportedParams("model/state kind mismatch")),
    }
}
