//! Numerics for the multi-insider sequential auction with mandatory
//! post-trade disclosure of insider trades.
//!
//! - [`disclosure`]: the N-auction equilibrium and its two-auction closed form.
//! - [`benchmark`]: the same market without disclosure, solved by shooting.
//! - [`asymptotics`]: limits as the number of auctions grows.
//! - [`simulator`]: seeded Monte Carlo checks of the equilibrium coefficients.
//! - [`figures`] and [`report`]: tabular datasets and file output.

pub mod asymptotics;
pub mod benchmark;
pub mod disclosure;
pub mod error;
pub mod figures;
pub mod model;
pub mod report;
pub mod roots;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{
    validate, AuctionCoefficients, EquilibriumPath, MarketParams, SimulationPathRecord,
    TwoPeriodBundle, Variant,
};
