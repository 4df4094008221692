//! Frequency-protocol synthesis for every stroke type.

mod constant_mu;
mod io;
mod quintic;
mod sta;
mod ste;

pub use constant_mu::{build_constant_mu_protocol, mu_for_total_time, stroke_duration};
pub(crate) use io::fmt17 as io_fmt17;
pub use io::{read_protocol_csv, write_protocol_csv, ProtocolHeader};
pub use quintic::QuinticHermite;
pub use sta::{
    build_sta_protocol, build_sta_protocol_with_units, sta_expectation_values, ErmakovSolution,
};
pub use ste::{
    build_ste_nonthermal_protocol, build_ste_protocol, realized_beta_dot, SteSolution,
    STE_GRID_POINTS,
};
