//! Behaviour of the disclosure equilibrium as the number of auctions in the
//! unit trading interval grows without bound.
//!
//! For two or more insiders everything is governed by the constant A, the
//! unique root in (0, M) of the cubic [`cubic_f`]. a_n² decreases toward A as
//! n moves away from the last auction, so Σ decays geometrically at rate
//! (1 − A/M) per auction.

use serde::Serialize;

use crate::disclosure::{a_squared_sequence, first_auction, log_variance_ratio, mixing_sequence};
use crate::error::{Error, Result};
use crate::model::MarketParams;
use crate::roots::bisect;

fn require_competition(insiders: u32) -> Result<f64> {
    if insiders < 2 {
        Err(Error::MonopolistHasNoA)
    } else {
        Ok(f64::from(insiders))
    }
}

fn cubic_terms(m: f64, x: f64) -> [f64; 4] {
    let mm1 = (m - 1.0) * (m - 1.0);
    [
        mm1 * x * x * x,
        -4.0 * (m + 1.0) * mm1 * x * x,
        (m * m - 1.0) * (6.0 * m * m - 4.0) * x,
        (m + 1.0) * (m + 1.0) * (4.0 * m * m - 3.0 * m * m * m),
    ]
}

/// f without the M ≥ 2 guard.
pub(crate) fn cubic_value(m: f64, x: f64) -> f64 {
    cubic_terms(m, x).iter().sum()
}

/// f(x) = (M−1)²x³ − 4(M+1)(M−1)²x² + (M²−1)(6M²−4)x + (M+1)²(4M² − 3M³).
pub fn cubic_f(insiders: u32, x: f64) -> Result<f64> {
    let m = require_competition(insiders)?;
    Ok(cubic_terms(m, x).iter().sum())
}

/// Analytic bracket known to contain A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// Analytic bracket for A: (M − 4M/((M−1)(M³+3M²+4M−4)), M − 4M/(M²(M+1)²+4)).
pub fn a_bracket(insiders: u32) -> Result<Bracket> {
    let m = require_competition(insiders)?;
    Ok(Bracket {
        lower: m - 4.0 * m / ((m - 1.0) * (m.powi(3) + 3.0 * m * m + 4.0 * m - 4.0)),
        upper: m - 4.0 * m / (m * m * (m + 1.0) * (m + 1.0) + 4.0),
    })
}

/// The constant A with its bracket and residual diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub insiders: u32,
    #[serde(rename = "A")]
    pub a: f64,
    pub bracket: Bracket,
    /// f(A).
    pub residual: f64,
    /// |f(A)| divided by the sum of the absolute values of the cubic's terms at A.
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Bisects f on the analytic bracket down to machine precision.
pub fn limit_constant_a(insiders: u32) -> Result<AsymptoticReport> {
    let m = require_competition(insiders)?;
    let bracket = a_bracket(insiders)?;
    let f = |x: f64| cubic_terms(m, x).iter().sum::<f64>();
    let (f_lo, f_hi) = (f(bracket.lower), f(bracket.upper));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::BracketSignError {
            lo: bracket.lower,
            hi: bracket.upper,
            f_lo,
            f_hi,
        });
    }
    let root = bisect(f, bracket.lower, bracket.upper, 0.0)?;
    let residual = f(root.root);
    let scale: f64 = cubic_terms(m, root.root).iter().map(|t| t.abs()).sum();
    Ok(AsymptoticReport {
        insiders,
        a: root.root,
        bracket,
        residual,
        relative_residual: residual.abs() / scale,
        iterations: root.iterations,
    })
}

/// Trading intensity in the limit; β diverges when M ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Intensity {
    Finite(f64),
    Infinite,
}

/// Limits of the equilibrium at any interior time t ∈ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum ContinuousLimits {
    /// One insider: Σ_t = (1 − t)Σ₀, λ_t = β_t = 0, σ²_z = σ_μ².
    Monopolist { prior_var: f64, noise_var: f64 },
    /// Two or more insiders: Σ_t = λ_t = 0, β_t = ∞ for every interior t,
    /// while the first auction converges to finite values.
    Competitive {
        constant: AsymptoticReport,
        /// lim λ₁ = √(Σ₀A)/((M+1)σ_μ).
        first_lambda: f64,
        /// lim β₁ = √A σ_μ/(M√Σ₀).
        first_beta: f64,
        /// Limit of the shared noise variance when all insiders use one common noise term.
        z_var_common: f64,
        /// Same limit under independent per-insider noise (M times `z_var_common`).
        z_var_independent: f64,
    },
}

impl ContinuousLimits {
    pub fn sigma_t(&self, t: f64) -> f64 {
        match self {
            Self::Monopolist { prior_var, .. } => (1.0 - t) * prior_var,
            Self::Competitive { .. } => 0.0,
        }
    }

    pub fn lambda_t(&self) -> f64 {
        0.0
    }

    pub fn beta_t(&self) -> Intensity {
        match self {
            Self::Monopolist { .. } => Intensity::Finite(0.0),
            Self::Competitive { .. } => Intensity::Infinite,
        }
    }

    /// σ²_z at interior times, in the common-noise bookkeeping.
    pub fn z_var_t(&self) -> f64 {
        match self {
            Self::Monopolist { noise_var, .. } => *noise_var,
            Self::Competitive { z_var_common, .. } => *z_var_common,
        }
    }
}

pub fn theorem31_limits(params: &MarketParams) -> Result<ContinuousLimits> {
    let params = params.validate()?;
    if params.insiders == 1 {
        return Ok(ContinuousLimits::Monopolist {
            prior_var: params.prior_var,
            noise_var: params.noise_var,
        });
    }
    let constant = limit_constant_a(params.insiders)?;
    let m = params.m();
    let (first_lambda, first_beta) = first_auction(&params, constant.a.sqrt());
    let z_var_independent = params.noise_var * (1.0 - constant.a / m);
    Ok(ContinuousLimits::Competitive {
        constant,
        first_lambda,
        first_beta,
        z_var_common: z_var_independent / m,
        z_var_independent,
    })
}

/// Upper envelope on Σ_{⌊tN⌋}/Σ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEnvelope {
    pub insiders: u32,
    pub t: f64,
    pub auctions: usize,
    /// ⌊tN⌋.
    pub steps: usize,
    /// Per-auction decay factor 1 − A/M.
    pub rate: f64,
    /// rate^steps.
    pub upper_bound: f64,
    /// steps · ln(rate); usable when `upper_bound` underflows.
    pub log_upper_bound: f64,
    /// The matching lower envelope carries an unquantified o(N) correction,
    /// so only its exponent (same rate) is reported.
    pub lower_exponent: f64,
}

pub fn decay_envelope(insiders: u32, t: f64, auctions: usize) -> Result<DecayEnvelope> {
    let m = require_competition(insiders)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParams {
            field: "t",
            constraint: "0 < t < 1",
        });
    }
    if auctions < 2 {
        return Err(Error::InvalidParams {
            field: "auctions",
            constraint: "auctions >= 2",
        });
    }
    let a = limit_constant_a(insiders)?.a;
    let steps = (t * auctions as f64).floor() as usize;
    let rate = 1.0 - a / m;
    let log_rate = (-a / m).ln_1p();
    Ok(DecayEnvelope {
        insiders,
        t,
        auctions,
        steps,
        rate,
        upper_bound: rate.powi(steps as i32),
        log_upper_bound: steps as f64 * log_rate,
        lower_exponent: log_rate,
    })
}

/// The solver's Σ_{⌊tN⌋}/Σ₀ set against the envelope, in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub envelope: DecayEnvelope,
    /// ln(Σ_{⌊tN⌋}/Σ₀) from the solver.
    pub log_ratio: f64,
    /// Per-auction decay actually realised, (Σ_{⌊tN⌋}/Σ₀)^(1/⌊tN⌋).
    pub empirical_rate: f64,
    /// Whether ratio ≤ upper_bound · (1 + slack).
    pub holds: bool,
}

pub fn check_envelope(insiders: u32, t: f64, auctions: usize, slack: f64) -> Result<EnvelopeCheck> {
    let envelope = decay_envelope(insiders, t, auctions)?;
    let seq = mixing_sequence(insiders, auctions);
    let log_ratio = log_variance_ratio(&seq, envelope.steps);
    let empirical_rate = if envelope.steps == 0 {
        1.0
    } else {
        (log_ratio / envelope.steps as f64).exp()
    };
    Ok(EnvelopeCheck {
        envelope,
        log_ratio,
        empirical_rate,
        holds: log_ratio <= envelope.log_upper_bound + slack.ln_1p(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub auctions: usize,
    pub a1: f64,
    pub lambda1: f64,
    pub beta1: f64,
    /// |a₁² − A|.
    pub gap: f64,
}

/// First-auction values across a grid of auction counts.
///
/// Reads λ₁ and β₁ straight off a₁ so that large N does not run into the
/// underflow of Σ_n late in the path.
pub fn convergence_probe(params: &MarketParams, grid: &[usize]) -> Result<Vec<ProbeRow>> {
    let params = params.validate()?;
    let a_limit = limit_constant_a(params.insiders)?.a;
    grid.iter()
        .map(|&n| {
            let p = params.with_auctions(n).validate()?;
            let b1 = a_squared_sequence(p.insiders, n)[0];
            let a1 = b1.sqrt();
            let (lambda1, beta1) = first_auction(&p, a1);
            Ok(ProbeRow {
                auctions: n,
                a1,
                lambda1,
                beta1,
                gap: (b1 - a_limit).abs(),
            })
        })
        .collect()
}
