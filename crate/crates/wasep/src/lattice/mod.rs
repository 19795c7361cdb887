//! Continuous-time Markov chain engine for the boundary-driven exclusion process.

mod engine;
mod exact;
mod grouped;
mod params;
mod rate_index;
mod state;

pub use engine::{
    replica_rng, simulate, Chain, ChainState, Engine, EngineError, Event, HeightState, Observer,
    TrajectorySummary, TreeEngine,
};
pub use exact::{
    bernoulli_weights, detailed_balance_defect, dirichlet_form, dirichlet_parts,
    dirichlet_upper_form, exact_generator, invariance_residual, DirichletParts, ExactError,
    MAX_EXACT_N,
};
pub use grouped::{ChannelIndex, GroupedIndex};
pub use params::{Model, ParamError, SimParams};
pub use rate_index::RateIndex;
pub use state::{
    apply_channel, channel_rates, sample_initial, Channel, Occupancy, RateTable,
    TransitionChannel,
};
