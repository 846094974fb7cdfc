//! Baseline diffusion models and the oversample/subsample ensemble protocol.
//!
//! | model | mechanism |
//! |-------|-----------|
//! | M1 | uniform random sample of tweets or users |
//! | M2 | random infected node passes the meme to a random neighbor, restarts with prob `1 - p` |
//! | M3 | as M2, but the user with most infected neighbors tweets next |
//! | M4 | as M2, restricted to neighbors in the infected node's community |
//!
//! Every model emits exactly `target_tweets * oversample_factor` events; the
//! ensemble then keeps a `sample_rate` share of them.

mod ensemble;
mod models;
mod params;
mod sampling;
mod trace;

pub use ensemble::{run_ensemble, Ensemble, EnsembleConfig, EnsembleSummary, MetricSummary};
pub use models::{
    simulate, simulate_m1, simulate_m2, simulate_m2_from, simulate_m3, simulate_m3_from, simulate_m4,
    simulate_m4_from, simulate_with_rng, M1Mode, Model,
};
pub use params::CascadeParams;
pub use sampling::subsample;
pub use trace::{read_traces, write_traces, MemeTrace, TraceEvent, TraceRecord};
