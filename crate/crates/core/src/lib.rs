//! Numerics for the depolarizing channel: states and channels, entropy and
//! Schatten-norm measures, the decomposition into uniform phase-damping
//! channels, trace-inequality checks and Holevo/Shannon capacity estimates.
//!
//! Entropies and capacities are in nats unless a function says otherwise.

pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod decomposition;
pub mod depolarizing;
pub mod error;
pub mod inequality;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod phase_damping;
pub mod random;
pub mod state;

pub use channel::{KrausChannel, QuantumChannel};
pub use depolarizing::DepolarizingChannel;
pub use error::{Error, Result};
pub use inequality::{EqualityCheck, InequalityCheck};
pub use linalg::{CMatrix, CVector, C64};
pub use phase_damping::PhaseDampingChannel;
pub use state::{BipartiteState, DensityMatrix, PureState, Subsystem};
