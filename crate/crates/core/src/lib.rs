//! Competing diffusion: two teams of networked agents, each cooperatively
//! minimising a team cost by local adapt-then-combine steps, while tracking
//! the other team's model through cross-team consensus.
//!
//! * [`graph`]: team graphs, Metropolis combination matrices, cross matrices.
//! * [`games`]: the per-agent objective interface and a quadratic zero-sum game.
//! * [`gan`]: a toy GAN instance with hand-written backpropagation.
//! * [`engine`]: the synchronous diffusion recursion, the centralized baseline
//!   and the Monte-Carlo runner.
//! * [`diagnostics`]: centroids, disagreement metrics, bounds, step-size studies.

pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod games;
pub mod gan;
pub mod graph;
pub mod linalg;
pub mod rng;

pub use diagnostics::{MetricsRecord, PlateauSettings};
pub use engine::{run, Init, NetworkState, RunConfig, RunOutput};
pub use error::{Error, Result};
pub use games::{GameOracle, NashPoint, QuadraticZeroSumGame};
pub use gan::{GanGame, GanSpec};
pub use graph::{CrossLink, NetworkTopology, Team};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
