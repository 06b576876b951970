//! Random walks on `SL`-type groups acting on tori: convolution powers,
//! Cesàro averages of characters and their predicted limits.

mod cesaro;
mod convolution;
mod measure;
mod predict;
mod trig;

pub use cesaro::{exact_cesaro, exact_cesaro_series, mc_cesaro, CesaroEstimate, CesaroMode};
pub use convolution::{convolve_step, ConvolutionOptions, ConvolutionState};
pub use measure::WalkMeasure;
pub use predict::{bq_limit_predict, choose_k, Prediction, DEFAULT_ORBIT_CAP};
pub use trig::{qa_kronecker, TrigPolynomial};
