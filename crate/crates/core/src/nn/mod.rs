//! The complex spectral GCN: two Hermitian convolution layers with a complex
//! ReLU, an unwind to real features, dropout, a linear head and softmax.
//! Gradients are derived by hand; complex parameters are optimized as
//! independent real and imaginary parts.

mod adam;
mod checkpoint;
mod layers;
mod model;

pub use adam::{AdamConfig, TrainState};
pub use checkpoint::Checkpoint;
pub use layers::{complex_relu, conv_forward, rewind, unwind, ConvLayerParams, Propagation};
pub use model::{
    loss, loss_and_gradients, model_forward, Mode, ModelParams, Queries, Readout, SigMaNetModel,
};
