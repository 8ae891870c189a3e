use thiserror::Error;

/// Errors produced by the solvers, the benchmark, and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: expected {constraint}")]
    InvalidParams {
        field: &'static str,
        constraint: &'static str,
    },

    /// Σ fell below the smallest positive normal f64 before the last auction.
    #[error("posterior variance underflowed before auction {auction} (Σ = {value:e})")]
    DegenerateVariance { auction: usize, value: f64 },

    #[error("this computation requires exactly {expected} auctions, got {got}")]
    WrongN { expected: usize, got: usize },

    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("boundary shooting failed to match the prior variance: {reason}")]
    ShootingDiverged { reason: String },

    #[error(
        "second-order condition violated at auction {auction} (lambda = {lambda}, alpha = {alpha})"
    )]
    SecondOrderViolated {
        auction: usize,
        lambda: f64,
        alpha: f64,
    },

    #[error("MonopolistHasNoA: the limit constant A is only defined for two or more insiders")]
    MonopolistHasNoA,

    #[error("f(x) has no sign change on the analytic bracket ({lo}, {hi}): f(lo) = {f_lo}, f(hi) = {f_hi}")]
    BracketSignError {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("simulation needs at least one path")]
    EmptySimulation,

    #[error(
        "noise conventions disagree on {statistic}: {left} vs {right} ({z_score:.2} joint s.e.)"
    )]
    ConventionMismatch {
        statistic: String,
        left: f64,
        right: f64,
        z_score: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
