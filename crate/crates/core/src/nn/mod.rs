//! Dense numerical substrate: matrices, activations, loss, optimizer,
//! dropout, and the finite-difference gradient checker.

pub mod activation;
pub mod adam;
pub mod dense;
pub mod dropout;
pub mod gradcheck;
pub mod linalg;
pub mod loss;

pub use activation::{relu, relu_vec, sigmoid, sigmoid_vec, tanh, tanh_vec};
pub use adam::{AdamHyper, AdamState};
pub use dense::{dense_forward, DenseParams};
pub use dropout::{sample_dropout, DropoutMask};
pub use gradcheck::grad_check;
pub use linalg::Matrix;
pub use loss::{mse_grad, mse_loss};
