//! Tied-weight equivariant MLPs.
//!
//! Each layer carries a group action on its index set and a channel count.
//! Between consecutive layers, every (out-channel, in-channel) pair has a
//! free-weight vector over the orbits of the layer's [`SharingPattern`], and
//! every out-channel a free bias per output orbit.
//!
//! [`SharingPattern`]: crate::sharing::SharingPattern

mod build;
mod checkpoint;
mod net;
mod train;

pub use build::{build_regular_net, symmetrize, ChannelWeights};
pub use checkpoint::{ActionDescriptor, Checkpoint, LayerJson};
pub use net::{EquivariantMLP, LayerParams, LayerSpec, Nonlinearity, Tensor};
pub use train::{train, Optimizer, Schedule, Target, TrainConfig, TrainReport};
