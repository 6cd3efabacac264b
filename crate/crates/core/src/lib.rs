//! Weather-forecast error audit and daily-peak PV energy forecasting.
//!
//! The crate covers the whole analysis chain: CSV ingestion and lead-day
//! alignment ([`ingest`]), error metrics ([`metrics`]), bootstrap confidence
//! intervals ([`resample`]), residual autocorrelation ([`diagnostics`]),
//! predictor selection ([`select`]), a small feedforward network trained with
//! Levenberg-Marquardt ([`mlp`]), the lead-day and sensitivity experiments
//! ([`experiment`]) and a synthetic data generator ([`synth`]).
//!
//! Data-parallel loops (bootstrap replicates, restarts, the subset sweep) go
//! through [`exec::Execution`]. With the default `parallel` feature they run
//! on rayon; without it every path is sequential. Results are identical
//! either way.

pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod ingest;
pub mod metrics;
pub mod mlp;
pub mod resample;
pub mod rng;
pub mod select;
pub mod synth;
pub mod variable;

pub use error::{Error, Result};
pub use exec::Execution;
pub use variable::WeatherVariable;
