//! Minimal tape-based autodiff and the layers shared by the trainable
//! models. Everything runs in `f64` on the CPU, single-threaded, so training
//! and sampling are bit-reproducible given a seed.

mod ops;
mod optim;
mod params;
mod tape;

pub use ops::{
    log_softmax_rows, sinusoidal_positions, softmax_rows, timestep_embedding,
    timestep_embedding_batch,
};
pub use optim::{Optimizer, OptimizerKind};
pub use params::{
    init_linear, init_normal, init_ones, init_zeros, Bound, ParamId, ParamStore,
};
pub use tape::{finite_difference, max_relative_error, Grads, Tape, Var};
