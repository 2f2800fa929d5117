//! The quantum training algorithm: fixed-point encoding of inputs, the
//! reversible sine and plus circuits, the network unitary built from
//! per-pair forward/check/uncompute blocks, phase estimation, the threshold
//! oracle, diffusion and the Grover loop.

pub mod blocks;
pub mod encoding;
pub mod instances;
pub mod network;
pub mod train;

pub use encoding::{encode_input, FixedPointEncoding, InputCodec, QDataset, QRow};
pub use network::{Layout, QsinnCircuit};
pub use train::{
    branch_eigenphases, grover_train, Backend, GroverCircuits, Outcome, QTrainConfig, QTrainResult, Readout,
};
