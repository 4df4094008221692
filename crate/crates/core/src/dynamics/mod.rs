//! Propagation of the moment vector through unitary, open and dephasing strokes.

mod generators;
mod propagate;
mod rates;
mod trajectory;

pub use generators::{
    dephasing_generator, dissipative_generator, free_propagator, open_generator, unitary_generator,
};
pub use propagate::{
    propagate, propagate_dephasing, propagate_open, propagate_ste_beta, propagate_unitary,
    sample_times, BetaTrace, Generator, PropagationOptions, Sampling,
};
pub use rates::{name_rates, static_beta_dot, NameRates};
pub use trajectory::{Provenance, Trajectory};
