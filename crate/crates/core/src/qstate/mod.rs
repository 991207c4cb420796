//! Quantum states, mesostate partitions, and the measurement channels.

mod channel;
mod partition;
mod state;

pub use channel::{
    dephase, ideal_collapse, lueders_collapse, von_neumann_collapse, Collapse, Dephasing, Projector,
    ProjectorKind,
};
pub(crate) use channel::{block_weight, blockwise_trace, lueders_post, von_neumann_post};
pub use partition::{Block, MesostatePartition};
pub use state::DensityMatrix;
