//! The N-auction equilibrium with mandatory post-trade disclosure.
//!
//! The equilibrium is pinned down by a scalar sequence a_1..a_N solved
//! backward from a_N = √M with a closed-form step, after which every other
//! coefficient follows from a single forward pass over Σ_n.
//!
//! Noise bookkeeping: `z_var` is the variance of each insider's own
//! independent dissimulation noise. A model where all insiders share one
//! common noise term produces the same prices and expected profits when that
//! common term has variance `z_var / M`.

use serde::Serialize;

use crate::asymptotics::cubic_value;
use crate::error::{Error, Result};
use crate::model::{AuctionCoefficients, EquilibriumPath, MarketParams, TwoPeriodBundle, Variant};

/// One backward step of the mixing recursion on b = a²: returns b_{n-1} given b_n.
///
/// Evaluated as b_{n-1} = b_n · K / (K + b_n f(b_n)) with K = M⁴(M+1)² and f
/// the asymptotic cubic. Along the recursion b_n ≥ A, so f(b_n) ≥ 0; the
/// clamp removes cancellation noise near A and keeps the step a contraction
/// in floating point (b_{n-1} ≤ b_n exactly). For M = 1, f is not defined
/// and the step reduces to b / (b + 1).
pub fn previous_a_squared(insiders: u32, b: f64) -> f64 {
    if insiders == 1 {
        return b / (b + 1.0);
    }
    let m = f64::from(insiders);
    let k = m.powi(4) * (m + 1.0) * (m + 1.0);
    let f = cubic_value(m, b).max(0.0);
    b * (k / (k + b * f))
}

/// The same step written as the single closed-form quotient
/// b_{n-1} = M⁴(M+1)²b / (M³(M+1)²b + [2(M+1)(1−M)b + (M−1)b² + M²(M+1)]²).
pub fn previous_a_squared_direct(insiders: u32, b: f64) -> f64 {
    let m = f64::from(insiders);
    let m1 = m + 1.0;
    let q = 2.0 * m1 * (1.0 - m) * b + (m - 1.0) * b * b + m * m * m1;
    let num = m.powi(4) * m1 * m1 * b;
    let den = m.powi(3) * m1 * m1 * b + q * q;
    num / den
}

/// Solves the mixing coefficients a_1..a_N (returned in auction order).
///
/// The last entry is exactly √M.
pub fn solve_a_sequence(params: &MarketParams) -> Result<Vec<f64>> {
    let params = params.validate()?;
    Ok(a_squared_sequence(params.insiders, params.auctions)
        .into_iter()
        .map(f64::sqrt)
        .collect())
}

/// a_n² for n = 1..N, in auction order.
pub fn a_squared_sequence(insiders: u32, auctions: usize) -> Vec<f64> {
    mixing_sequence(insiders, auctions).a_squared
}

/// The mixing sequence together with the fraction of variance each auction
/// leaves unrevealed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingSequence {
    pub insiders: u32,
    /// a_n², auction order.
    pub a_squared: Vec<f64>,
    /// 1 − a_n²/M, auction order; exactly 0 at the last auction.
    pub retained: Vec<f64>,
}

impl MixingSequence {
    pub fn a(&self) -> Vec<f64> {
        self.a_squared.iter().map(|b| b.sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.a_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_squared.is_empty()
    }
}

/// Runs the backward recursion on b = a² and, alongside it, on c = M − b.
///
/// For many insiders b sits within a relative 4/M⁴ of M, so 1 − b/M computed
/// by subtraction loses most of its digits. The complement obeys
/// c_{n-1} = (c_n K + M b_n f(b_n)) / (K + b_n f(b_n)), a sum of non-negative
/// terms, and keeps full relative precision.
pub fn mixing_sequence(insiders: u32, auctions: usize) -> MixingSequence {
    let mut b = vec![0.0; auctions];
    let mut c = vec![0.0; auctions];
    if auctions > 0 {
        let m = f64::from(insiders);
        let k = m.powi(4) * (m + 1.0) * (m + 1.0);
        b[auctions - 1] = m;
        for n in (1..auctions).rev() {
            b[n - 1] = previous_a_squared(insiders, b[n]);
            let bf = b[n] * cubic_value(m, b[n]).max(0.0);
            c[n - 1] = (c[n] * k + m * bf) / (k + bf);
        }
    }
    let m = f64::from(insiders);
    MixingSequence {
        insiders,
        a_squared: b,
        retained: c.into_iter().map(|x| x / m).collect(),
    }
}

/// Forward pass: turns a mixing sequence a_1..a_N into the full coefficient
/// table. The retained fractions are taken as 1 − a_n²/M; [`solve`] uses the
/// more accurate values from [`mixing_sequence`].
pub fn derive_path(a_seq: &[f64], params: &MarketParams) -> Result<EquilibriumPath> {
    let m = params.m();
    let n = a_seq.len();
    let retained: Vec<f64> = a_seq
        .iter()
        .enumerate()
        .map(|(i, a)| if i + 1 == n { 0.0 } else { 1.0 - a * a / m })
        .collect();
    forward(a_seq, &retained, params)
}

fn forward(a_seq: &[f64], retained: &[f64], params: &MarketParams) -> Result<EquilibriumPath> {
    let params = params.validate()?;
    if a_seq.len() != params.auctions {
        return Err(Error::WrongN {
            expected: params.auctions,
            got: a_seq.len(),
        });
    }
    let n_auctions = params.auctions;
    let m = params.m();
    let m1 = m + 1.0;
    let sd = params.noise_sd();

    let mut rows = Vec::with_capacity(n_auctions);
    let mut sigma_prev = params.prior_var;
    for (i, (&a, &kept)) in a_seq.iter().zip(retained).enumerate() {
        let n = i + 1;
        if sigma_prev < f64::MIN_POSITIVE {
            return Err(Error::DegenerateVariance {
                auction: n,
                value: sigma_prev,
            });
        }
        let last = n == n_auctions;
        let root_sigma = sigma_prev.sqrt();
        let lambda = root_sigma * a / (m1 * sd);
        let beta = a * sd / (m * root_sigma);
        let gamma = m1 * lambda / m;
        let sigma_post = kept * sigma_prev;
        rows.push(AuctionCoefficients {
            index: n,
            a,
            lambda,
            beta,
            gamma,
            alpha: if last { 0.0 } else { 1.0 / (2.0 * gamma) },
            delta: 0.0,
            sigma_post,
            z_var: params.noise_var * kept,
        });
        sigma_prev = sigma_post;
    }

    let mut delta = 0.0;
    for row in rows.iter_mut().rev() {
        row.delta = delta;
        delta += delta_increment(m, row.gamma, row.z_var);
    }
    let delta0 = delta;

    let first = &rows[0];
    let alpha0 = alpha_step(m, first.lambda, first.beta, first.gamma, first.alpha);
    Ok(EquilibriumPath {
        params,
        ex_ante_profit: alpha0 * params.prior_var + delta0,
        rows,
        alpha0,
        delta0,
    })
}

/// Solve the equilibrium for validated params in one call.
pub fn solve(params: &MarketParams) -> Result<EquilibriumPath> {
    let params = params.validate()?;
    let seq = mixing_sequence(params.insiders, params.auctions);
    forward(&seq.a(), &seq.retained, &params)
}

/// α_{n-1} from the coefficients of auction n.
fn alpha_step(m: f64, lambda: f64, beta: f64, gamma: f64, alpha_next: f64) -> f64 {
    let keep = 1.0 - gamma * m * beta;
    beta * (1.0 - lambda * m * beta) + alpha_next * keep * keep
}

/// δ_{n-1} − δ_n.
fn delta_increment(m: f64, gamma: f64, z_var: f64) -> f64 {
    (m - 1.0) * m * gamma * z_var / (2.0 * (m + 1.0))
}

/// Σ_{n}/Σ₀ in log space, straight from the mixing sequence.
///
/// Stays finite long after Σ_n itself underflows. Returns `-inf` at n = N.
pub fn log_variance_ratio(seq: &MixingSequence, n: usize) -> f64 {
    seq.retained[..n].iter().map(|r| r.ln()).sum()
}

/// (λ₁, β₁) from the first mixing coefficient. Needs no forward pass.
pub fn first_auction(params: &MarketParams, a1: f64) -> (f64, f64) {
    let m = params.m();
    let sd = params.noise_sd();
    let root_sigma = params.prior_var.sqrt();
    (
        root_sigma * a1 / ((m + 1.0) * sd),
        a1 * sd / (m * root_sigma),
    )
}

/// Expected continuation profit α(v − p*)² + δ.
pub fn value_function(alpha: f64, delta: f64, v: f64, p_star: f64) -> f64 {
    let gap = v - p_star;
    alpha * gap * gap + delta
}

/// Closed-form two-auction equilibrium, independent of the recursion.
pub fn two_period_closed_form(params: &MarketParams) -> Result<TwoPeriodBundle> {
    let params = params.validate()?;
    if params.auctions != 2 {
        return Err(Error::WrongN {
            expected: 2,
            got: params.auctions,
        });
    }
    let m = params.m();
    let m1 = m + 1.0;
    let sd = params.noise_sd();
    let s0 = params.prior_var;
    let d = 4.0 + m * m * m1 * m1;
    let root = (m * s0 / d).sqrt();

    let lambda1 = m / sd * root;
    let lambda2 = 2.0 / (m1 * sd) * root;
    let gamma1 = m1 / sd * root;
    let beta1 = m1 * sd * (m / (d * s0)).sqrt();
    let beta2 = sd / 2.0 * (d / (m * s0)).sqrt();
    let z_var1 = 4.0 * params.noise_var / d;
    let sigma1 = 4.0 * s0 / d;
    let profit1 = beta1 * (1.0 - lambda1 * m * beta1) * s0 - lambda1 * z_var1;
    let profit2 = sigma1 / (m1 * m1 * lambda2);
    Ok(TwoPeriodBundle {
        variant: Variant::Disclosure,
        insiders: params.insiders,
        lambda1,
        lambda2,
        beta1,
        beta2,
        sigma1,
        sigma2: None,
        gamma1: Some(gamma1),
        z_var1: Some(z_var1),
        k: None,
        profit1,
        profit2,
    })
}

/// Worst residual of one equation across all auctions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationResidual {
    pub equation: &'static str,
    pub max_residual: f64,
    /// Auction where the worst residual occurs.
    pub worst_auction: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    pub equations: Vec<EquationResidual>,
}

impl ResidualReport {
    pub fn all_pass(&self) -> bool {
        self.equations.iter().all(|e| e.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.equations
            .iter()
            .map(|e| e.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn get(&self, equation: &str) -> Option<&EquationResidual> {
        self.equations.iter().find(|e| e.equation == equation)
    }
}

/// |lhs − rhs| relative to max(1, |lhs|, |rhs|).
fn scaled(lhs: f64, rhs: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / lhs.abs().max(rhs.abs()).max(1.0)
}

/// Evaluates every equilibrium identity on a path and reports the worst
/// scaled residual per equation.
pub fn verify_difference_system(path: &EquilibriumPath, tol: f64) -> ResidualReport {
    let p = &path.params;
    let m = p.m();
    let m1 = m + 1.0;
    let s2 = p.noise_var;
    let n_auctions = path.rows.len();

    let mut per_eq: Vec<(&'static str, Vec<f64>)> = [
        "alpha_recursion",
        "beta_lambda_link",
        "lambda_alpha_link",
        "sigma_recursion",
        "gamma_lambda_link",
        "order_flow_variance",
        "delta_recursion",
    ]
    .into_iter()
    .map(|name| (name, Vec::with_capacity(n_auctions)))
    .collect();

    for r in &path.rows {
        let n = r.index;
        let sigma_prev = path.sigma(n - 1);
        let last = n == n_auctions;
        let alpha_prev = path.alpha(n - 1);
        let alpha_n = path.alpha(n);

        per_eq[0].1.push(scaled(
            alpha_prev,
            alpha_step(m, r.lambda, r.beta, r.gamma, alpha_n),
        ));
        per_eq[1]
            .1
            .push(scaled(r.beta, m1 * r.lambda * s2 / (m * sigma_prev)));
        let link = if last {
            scaled(r.lambda, (m * sigma_prev).sqrt() / (m1 * p.noise_sd()))
        } else {
            scaled(r.lambda, m / (2.0 * m1 * alpha_n))
        };
        per_eq[2].1.push(link);
        per_eq[3].1.push(scaled(
            r.sigma_post,
            sigma_prev - m1 * m1 / m * r.lambda * r.lambda * s2,
        ));
        per_eq[4].1.push(scaled(r.gamma, m1 * r.lambda / m));
        per_eq[5].1.push(scaled(
            m * m * r.beta * r.beta * sigma_prev + m * r.z_var,
            m * s2,
        ));
        per_eq[6].1.push(scaled(
            path.delta(n - 1),
            path.delta(n) + delta_increment(m, r.gamma, r.z_var),
        ));
    }

    let equations = per_eq
        .into_iter()
        .map(|(equation, values)| {
            let (worst, max_residual) =
                values
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, 0.0_f64), |acc, (i, v)| {
                        if v > acc.1 || v.is_nan() {
                            (i, v)
                        } else {
                            acc
                        }
                    });
            EquationResidual {
                equation,
                max_residual,
                worst_auction: worst + 1,
                pass: max_residual <= tol,
            }
        })
        .collect();
    ResidualReport {
        tolerance: tol,
        equations,
    }
}
