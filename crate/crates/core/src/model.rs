//! Domain types shared by every solver.
//!
//! Variances are stored as variances throughout (never standard deviations).
//! Auctions are numbered `1..=N`; quantities "before the first auction" live in
//! dedicated fields (`alpha0`, `delta0`, and `prior_var` on [`MarketParams`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exogenous model inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Number of insiders M.
    pub insiders: u32,
    /// Number of auctions N.
    pub auctions: usize,
    /// Prior mean of the liquidation value, p₀.
    pub prior_mean: f64,
    /// Prior variance of the liquidation value, Σ₀.
    pub prior_var: f64,
    /// Variance of noise-trader demand per auction, σ_μ².
    pub noise_var: f64,
}

impl MarketParams {
    pub fn new(insiders: u32, auctions: usize, prior_var: f64, noise_var: f64) -> Self {
        Self {
            insiders,
            auctions,
            prior_mean: 0.0,
            prior_var,
            noise_var,
        }
    }

    pub fn with_prior_mean(mut self, prior_mean: f64) -> Self {
        self.prior_mean = prior_mean;
        self
    }

    pub fn with_auctions(mut self, auctions: usize) -> Self {
        self.auctions = auctions;
        self
    }

    /// Returns the params unchanged if every invariant holds, otherwise the
    /// first violated constraint.
    pub fn validate(self) -> Result<Self> {
        if self.insiders < 1 {
            return Err(Error::InvalidParams {
                field: "insiders",
                constraint: "insiders >= 1",
            });
        }
        if self.auctions < 1 {
            return Err(Error::InvalidParams {
                field: "auctions",
                constraint: "auctions >= 1",
            });
        }
        if !self.prior_mean.is_finite() {
            return Err(Error::InvalidParams {
                field: "prior_mean",
                constraint: "prior_mean finite",
            });
        }
        if !(self.prior_var.is_finite() && self.prior_var > 0.0) {
            return Err(Error::InvalidParams {
                field: "prior_var",
                constraint: "prior_var > 0",
            });
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return Err(Error::InvalidParams {
                field: "noise_var",
                constraint: "noise_var > 0",
            });
        }
        Ok(self)
    }

    pub fn m(&self) -> f64 {
        f64::from(self.insiders)
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_var.sqrt()
    }
}

/// Free-function form of [`MarketParams::validate`].
pub fn validate(params: MarketParams) -> Result<MarketParams> {
    params.validate()
}

/// Equilibrium coefficients of one auction of the disclosure model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuctionCoefficients {
    /// Auction number, 1-based.
    pub index: usize,
    /// Mixing coefficient a_n.
    pub a: f64,
    /// Price impact of order flow λ_n.
    pub lambda: f64,
    /// Per-insider trading intensity β_n.
    pub beta: f64,
    /// Price impact of the disclosed insider trades γ_n.
    pub gamma: f64,
    /// Quadratic coefficient α_n of the continuation value.
    pub alpha: f64,
    /// Constant δ_n of the continuation value.
    pub delta: f64,
    /// Residual variance Σ_n after the trades of auction n are disclosed.
    pub sigma_post: f64,
    /// Per-insider dissimulation noise variance σ²_{z,n} (independent-noise bookkeeping).
    pub z_var: f64,
}

/// Full disclosure equilibrium for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPath {
    pub params: MarketParams,
    pub rows: Vec<AuctionCoefficients>,
    pub alpha0: f64,
    pub delta0: f64,
    /// α₀Σ₀ + δ₀, the per-insider expected total profit.
    pub ex_ante_profit: f64,
}

impl EquilibriumPath {
    /// Row for auction `n` (1-based).
    pub fn row(&self, n: usize) -> &AuctionCoefficients {
        &self.rows[n - 1]
    }

    /// Σ_{n} with Σ₀ taken from the params.
    pub fn sigma(&self, n: usize) -> f64 {
        if n == 0 {
            self.params.prior_var
        } else {
            self.rows[n - 1].sigma_post
        }
    }

    /// α_n for n in `0..=N`.
    pub fn alpha(&self, n: usize) -> f64 {
        if n == 0 {
            self.alpha0
        } else {
            self.rows[n - 1].alpha
        }
    }

    /// δ_n for n in `0..=N`.
    pub fn delta(&self, n: usize) -> f64 {
        if n == 0 {
            self.delta0
        } else {
            self.rows[n - 1].delta
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Disclosure,
    NoDisclosure,
}

/// Closed-form two-period values for either variant of the model.
///
/// Fields that do not apply to a variant are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPeriodBundle {
    pub variant: Variant,
    pub insiders: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub sigma1: f64,
    /// No-disclosure only.
    pub sigma2: Option<f64>,
    /// Disclosure only.
    pub gamma1: Option<f64>,
    /// Disclosure only; per-insider independent noise variance.
    pub z_var1: Option<f64>,
    /// No-disclosure only; k = λ₁/λ₂.
    pub k: Option<f64>,
    /// Per-insider expected profit from the first-period trade.
    pub profit1: f64,
    /// Per-insider expected profit from the second-period trade.
    pub profit2: f64,
}

/// One simulated path, kept only when the simulator is asked to record paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPathRecord {
    pub path_index: u64,
    pub value: f64,
    /// Aggregate order flow y_n per auction.
    pub order_flow: Vec<f64>,
    /// Market-clearing price p_n per auction.
    pub price: Vec<f64>,
    /// Post-disclosure price p*_n per auction.
    pub post_price: Vec<f64>,
    /// `orders[n][i]` is insider i's order at auction n+1.
    pub orders: Vec<Vec<f64>>,
    /// Realized total profit per insider.
    pub profits: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_params() {
        let p = MarketParams::new(2, 10, 1.0, 1.0);
        assert_eq!(p.validate(), Ok(p));
    }

    #[test]
    fn rejects_zero_insiders() {
        let err = MarketParams::new(0, 10, 1.0, 1.0).validate().unwrap_err();
        assert_eq!(
            err,
            Error::InvalidParams {
                field: "insiders",
                constraint: "insiders >= 1"
            }
        );
    }

    #[test]
    fn rejects_negative_prior_var() {
        let err = MarketParams::new(2, 10, -1.0, 1.0).validate().unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParams {
                field: "prior_var",
                ..
            }
        ));
    }

    #[test]
    fn rejects_zero_auctions_and_bad_noise() {
        assert!(matches!(
            MarketParams::new(1, 0, 1.0, 1.0).validate(),
            Err(Error::InvalidParams {
                field: "auctions",
                ..
            })
        ));
        assert!(matches!(
            MarketParams::new(1, 1, 1.0, 0.0).validate(),
            Err(Error::InvalidParams {
                field: "noise_var",
                ..
            })
        ));
        assert!(matches!(
            MarketParams::new(1, 1, f64::NAN, 1.0).validate(),
            Err(Error::InvalidParams {
                field: "prior_var",
                ..
            })
        ));
    }
}
