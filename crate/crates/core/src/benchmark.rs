//! The same market without disclosure of insider trades.
//!
//! Insiders play pure linear strategies x = β_n(v − p_{n−1}) and the market
//! maker only sees order flow. Two auctions have a closed form through the
//! ratio k = λ₁/λ₂; longer horizons are solved by backward induction from a
//! guessed terminal variance Σ_N, shooting on Σ_N until the implied prior
//! matches Σ₀.
//!
//! The N-auction backward step generalises the two-auction relations:
//!
//! ```text
//! β_n     = (1 − 2α_nλ_n) / (λ_n [M(1 − 2α_nλ_n) + 1])
//! α_{n−1} = (1 − α_nλ_n) / (λ_n [M(1 − 2α_nλ_n) + 1]²)
//! λ_n     = Mβ_nΣ_n / σ_μ²
//! Σ_n     = (1 − Mβ_nλ_n) Σ_{n−1}
//! ```
//!
//! with α_N = 0. Paths with N > 2 are labelled as a reconstructed benchmark
//! since only the two-auction instance has an independent closed form.

use serde::Serialize;

use crate::disclosure::two_period_closed_form;
use crate::error::{Error, Result};
use crate::model::{MarketParams, TwoPeriodBundle, Variant};
use crate::roots::bisect;

/// 2Mk³ − (M+1)³k² − 2(M+1)²k + (M+1)⁴.
pub fn k_cubic(insiders: u32, k: f64) -> f64 {
    let m = f64::from(insiders);
    let m1 = m + 1.0;
    2.0 * m * k.powi(3) - m1.powi(3) * k * k - 2.0 * m1 * m1 * k + m1.powi(4)
}

/// The admissible root k ∈ (0, (M+1)²/2) of [`k_cubic`].
pub fn solve_k_cubic(insiders: u32) -> Result<f64> {
    if insiders < 1 {
        return Err(Error::InvalidParams {
            field: "insiders",
            constraint: "insiders >= 1",
        });
    }
    let upper = (f64::from(insiders) + 1.0).powi(2) / 2.0;
    let eps = upper * 1e-12;
    let root = bisect(|k| k_cubic(insiders, k), eps, upper - eps, 1e-13)?;
    Ok(root.root)
}

/// Two-auction equilibrium without disclosure.
pub fn two_period_no_disclosure(params: &MarketParams) -> Result<TwoPeriodBundle> {
    let params = params.validate()?;
    if params.auctions != 2 {
        return Err(Error::WrongN {
            expected: 2,
            got: params.auctions,
        });
    }
    let k = solve_k_cubic(params.insiders)?;
    let m = params.m();
    let m1 = m + 1.0;
    let sd = params.noise_sd();
    let s0 = params.prior_var;
    let d = m1.powi(3) - 2.0 * k * m;
    let lambda1 = (m * m1 * m1 * (m1 * m1 - 2.0 * k) * s0).sqrt() / (d * sd);
    let lambda2 = (m * s0 / d).sqrt() / sd;
    let beta1 = (m1 * m1 - 2.0 * k) / (lambda1 * d);
    let beta2 = 1.0 / (lambda2 * m1);
    let sigma1 = m1 * m1 * s0 / d;
    let sigma2 = sigma1 / m1;
    Ok(TwoPeriodBundle {
        variant: Variant::NoDisclosure,
        insiders: params.insiders,
        lambda1,
        lambda2,
        beta1,
        beta2,
        sigma1,
        sigma2: Some(sigma2),
        gamma1: None,
        z_var1: None,
        k: Some(k),
        profit1: beta1 * (1.0 - lambda1 * m * beta1) * s0,
        profit2: beta2 * (1.0 - lambda2 * m * beta2) * sigma1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsRow {
    pub index: usize,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
    /// Posterior variance Σ_n after auction n.
    pub sigma_post: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingOptions {
    /// Relative tolerance on the implied prior variance.
    pub boundary_tol: f64,
    pub max_iterations: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            boundary_tol: 1e-12,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsPath {
    pub params: MarketParams,
    pub rows: Vec<HsRow>,
    pub alpha0: f64,
    /// Outer shooting iterations used.
    pub iterations: usize,
    /// |implied Σ₀ / requested Σ₀ − 1| at the accepted terminal variance.
    pub boundary_mismatch: f64,
    /// True for N > 2, where no independent closed form exists.
    pub reconstructed: bool,
}

impl HsPath {
    pub fn row(&self, n: usize) -> &HsRow {
        &self.rows[n - 1]
    }

    pub fn sigma(&self, n: usize) -> f64 {
        if n == 0 {
            self.params.prior_var
        } else {
            self.rows[n - 1].sigma_post
        }
    }
}

/// Price impact at auction n given the continuation coefficient α_n and the
/// posterior Σ_n.
///
/// With u = α_nλ_n the defining equation λ²σ_μ²[M(1−2u)+1] = MΣ_n(1−2u)
/// becomes the cubic u²[M(1−2u)+1] − c(1−2u) = 0, c = MΣ_nα_n²/σ_μ². It is
/// negative at u = 0 and positive at u = 1/2, and its leading coefficient is
/// negative, so it has exactly one root in (0, 1/2): the smallest positive
/// one, and the only one with β_n > 0 and u < 1/2.
fn step_lambda(m: f64, alpha: f64, sigma: f64, noise_var: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok((m * sigma / ((m + 1.0) * noise_var)).sqrt());
    }
    let c = m * sigma * alpha * alpha / noise_var;
    let phi = |u: f64| u * u * (m * (1.0 - 2.0 * u) + 1.0) - c * (1.0 - 2.0 * u);
    let u = bisect(phi, 0.0, 0.5, 0.0)?.root;
    Ok(u / alpha)
}

/// Backward pass from a terminal posterior Σ_N. Returns the rows and the
/// implied Σ₀ and α₀.
fn backward_pass(params: &MarketParams, sigma_terminal: f64) -> Result<(Vec<HsRow>, f64, f64)> {
    let m = params.m();
    let s2 = params.noise_var;
    let n_auctions = params.auctions;
    let mut rows = vec![
        HsRow {
            index: 0,
            lambda: 0.0,
            beta: 0.0,
            alpha: 0.0,
            sigma_post: 0.0,
        };
        n_auctions
    ];
    let mut sigma = sigma_terminal;
    let mut alpha = 0.0;
    for n in (1..=n_auctions).rev() {
        let lambda = step_lambda(m, alpha, sigma, s2)?;
        let u = alpha * lambda;
        if !(lambda > 0.0 && lambda * (1.0 - u) > 0.0) {
            return Err(Error::SecondOrderViolated {
                auction: n,
                lambda,
                alpha,
            });
        }
        let beta = lambda * s2 / (m * sigma);
        rows[n - 1] = HsRow {
            index: n,
            lambda,
            beta,
            alpha,
            sigma_post: sigma,
        };
        let spread = m * (1.0 - 2.0 * u) + 1.0;
        alpha = (1.0 - u) / (lambda * spread * spread);
        sigma /= 1.0 - lambda * lambda * s2 / sigma;
    }
    Ok((rows, sigma, alpha))
}

/// Multi-auction no-disclosure equilibrium by backward induction and
/// shooting on the terminal variance.
pub fn solve_hs_multiperiod(params: &MarketParams) -> Result<HsPath> {
    solve_hs_multiperiod_with(params, ShootingOptions::default())
}

pub fn solve_hs_multiperiod_with(params: &MarketParams, opts: ShootingOptions) -> Result<HsPath> {
    let params = params.validate()?;
    let target = params.prior_var;
    let implied = |log_terminal: f64| backward_pass(&params, log_terminal.exp());

    // Implied Σ₀ increases with Σ_N; Σ_N = Σ₀ always overshoots.
    let mut hi = target.ln();
    let mut lo = hi - 600.0;
    let (_, at_lo, _) = implied(lo)?;
    if at_lo.is_nan() || at_lo >= target {
        return Err(Error::ShootingDiverged {
            reason: format!(
                "terminal variance {:e} already implies Σ₀ = {at_lo:e}",
                lo.exp()
            ),
        });
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (rows, sigma0, alpha0) = implied(mid)?;
        let mismatch = (sigma0 / target - 1.0).abs();
        if mismatch <= opts.boundary_tol || hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            if mismatch > opts.boundary_tol.max(1e-9) {
                return Err(Error::ShootingDiverged {
                    reason: format!("bracket collapsed with relative mismatch {mismatch:e}"),
                });
            }
            return Ok(HsPath {
                params,
                rows,
                alpha0,
                iterations,
                boundary_mismatch: mismatch,
                reconstructed: params.auctions > 2,
            });
        }
        if iterations >= opts.max_iterations {
            return Err(Error::ShootingDiverged {
                reason: format!(
                    "no match after {iterations} iterations (relative mismatch {mismatch:e})"
                ),
            });
        }
        if sigma0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    Greater,
}

/// One cross-model comparison: `value` against `baseline`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: &'static str,
    pub value: f64,
    pub baseline: f64,
    pub ratio: f64,
    pub expected: Relation,
    pub holds: bool,
}

impl Comparison {
    fn new(quantity: &'static str, value: f64, baseline: f64, expected: Relation) -> Self {
        let holds = match expected {
            Relation::Less => value < baseline,
            Relation::Greater => value > baseline,
        };
        Self {
            quantity,
            value,
            baseline,
            ratio: value / baseline,
            expected,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub insiders: u32,
    /// Disclosure with M insiders against disclosure with a single insider.
    pub vs_monopolist: Vec<Comparison>,
    /// Disclosure against no disclosure, both with M insiders.
    pub vs_no_disclosure: Vec<Comparison>,
}

impl ComparisonReport {
    pub fn all_hold(&self) -> bool {
        self.vs_monopolist
            .iter()
            .chain(&self.vs_no_disclosure)
            .all(|c| c.holds)
    }

    pub fn find(&self, quantity: &str) -> Option<&Comparison> {
        self.vs_monopolist.iter().find(|c| c.quantity == quantity)
    }
}

/// Two-auction comparisons of the disclosure equilibrium against the
/// single-insider disclosure equilibrium and the no-disclosure equilibrium.
pub fn compare_two_period(params: &MarketParams) -> Result<ComparisonReport> {
    let params = params.validate()?;
    if params.auctions != 2 {
        return Err(Error::WrongN {
            expected: 2,
            got: params.auctions,
        });
    }
    if params.insiders < 2 {
        return Err(Error::InvalidParams {
            field: "insiders",
            constraint: "insiders >= 2 for a cross-model comparison",
        });
    }
    let ours = two_period_closed_form(&params)?;
    let mono = two_period_closed_form(&MarketParams {
        insiders: 1,
        ..params
    })?;
    let hs = two_period_no_disclosure(&params)?;

    use Relation::*;
    let lambda1_rel = if params.insiders <= 5 { Greater } else { Less };
    let vs_monopolist = vec![
        Comparison::new("lambda1", ours.lambda1, mono.lambda1, lambda1_rel),
        Comparison::new("lambda2", ours.lambda2, mono.lambda2, Less),
        Comparison::new("beta1", ours.beta1, mono.beta1, Less),
        Comparison::new("beta2", ours.beta2, mono.beta2, Greater),
        Comparison::new("sigma1", ours.sigma1, mono.sigma1, Less),
        Comparison::new("profit1", ours.profit1, mono.profit1, Less),
        Comparison::new("profit2", ours.profit2, mono.profit2, Less),
    ];
    let vs_no_disclosure = vec![
        Comparison::new("lambda1", ours.lambda1, hs.lambda1, Less),
        Comparison::new("lambda2", ours.lambda2, hs.lambda2, Less),
        Comparison::new("beta1", ours.beta1, hs.beta1, Greater),
        Comparison::new("beta2", ours.beta2, hs.beta2, Greater),
        Comparison::new("sigma1", ours.sigma1, hs.sigma1, Less),
    ];
    Ok(ComparisonReport {
        insiders: params.insiders,
        vs_monopolist,
        vs_no_disclosure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // 40-digit polynomial roots and closed-form evaluations.
    const K_M1: f64 = 1.109_916_264_174_742_4;
    const K_M2: f64 = 1.592_719_666_545_655_6;

    fn p(m: u32, n: usize) -> MarketParams {
        MarketParams::new(m, n, 1.0, 1.0)
    }

    #[test]
    fn k_roots() {
        assert_relative_eq!(solve_k_cubic(2).unwrap(), K_M2, max_relative = 1e-12);
        assert!((solve_k_cubic(2).unwrap() - 1.5927).abs() < 5e-4);
        assert_relative_eq!(solve_k_cubic(1).unwrap(), K_M1, max_relative = 1e-12);
        let k10 = solve_k_cubic(10).unwrap();
        assert!(k10 > 0.0 && k10 < 60.5);
        assert!(k_cubic(10, k10).abs() < 1e-6 * 11f64.powi(4));
    }

    #[test]
    fn two_insider_closed_form() {
        let b = two_period_no_disclosure(&p(2, 2)).unwrap();
        assert_relative_eq!(
            b.sigma1,
            1.0 / (3.0 - 4.0 * K_M2 / 9.0),
            max_relative = 1e-12
        );
        assert_relative_eq!(b.lambda1, 0.495_922_685_783_013_7, max_relative = 1e-12);
        assert_relative_eq!(b.lambda2, 0.311_368_470_045_069_3, max_relative = 1e-12);
        assert_relative_eq!(b.beta1, 0.568_358_292_067_243_3, max_relative = 1e-12);
        assert_relative_eq!(b.beta2, 1.070_542_991_347_469_3, max_relative = 1e-12);
        assert_relative_eq!(b.sigma1, 0.436_276_458_621_932_4, max_relative = 1e-12);
    }

    #[test]
    fn monopolist_halves_variance() {
        let b = two_period_no_disclosure(&p(1, 2)).unwrap();
        assert_relative_eq!(b.sigma2.unwrap(), b.sigma1 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(b.lambda1 / b.lambda2, K_M1, max_relative = 1e-12);
    }

    #[test]
    fn wrong_n() {
        assert!(matches!(
            two_period_no_disclosure(&p(2, 3)),
            Err(Error::WrongN {
                expected: 2,
                got: 3
            })
        ));
        assert!(matches!(
            compare_two_period(&p(2, 4)),
            Err(Error::WrongN { .. })
        ));
    }

    #[test]
    fn shooting_matches_closed_form() {
        for m in 1..=10 {
            let params = MarketParams::new(m, 2, 1.7, 0.6);
            let closed = two_period_no_disclosure(&params).unwrap();
            let hs = solve_hs_multiperiod(&params).unwrap();
            assert!(!hs.reconstructed);
            assert_relative_eq!(hs.row(1).lambda, closed.lambda1, max_relative = 1e-10);
            assert_relative_eq!(hs.row(2).lambda, closed.lambda2, max_relative = 1e-10);
            assert_relative_eq!(hs.row(1).beta, closed.beta1, max_relative = 1e-10);
            assert_relative_eq!(hs.row(2).beta, closed.beta2, max_relative = 1e-10);
            assert_relative_eq!(hs.sigma(1), closed.sigma1, max_relative = 1e-10);
            assert_relative_eq!(hs.sigma(2), closed.sigma2.unwrap(), max_relative = 1e-10);
        }
    }

    #[test]
    fn single_auction_is_kyle_static() {
        let hs = solve_hs_multiperiod(&p(3, 1)).unwrap();
        // λ = √(MΣ₀)/((M+1)σ_μ) in the one-shot game.
        assert_relative_eq!(hs.row(1).lambda, 3f64.sqrt() / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn longer_horizon_is_consistent() {
        let hs = solve_hs_multiperiod(&p(2, 4)).unwrap();
        assert!(hs.reconstructed);
        assert!(hs.boundary_mismatch <= 1e-9);
        let mut prev = 1.0;
        for r in &hs.rows {
            assert!(r.sigma_post < prev && r.sigma_post > 0.0);
            assert!(r.lambda * (1.0 - r.alpha * r.lambda) > 0.0);
            // λ_n = Mβ_nΣ_n/σ_μ²
            assert_relative_eq!(r.lambda, 2.0 * r.beta * r.sigma_post, max_relative = 1e-12);
            prev = r.sigma_post;
        }
        let disclosure = crate::disclosure::solve(&p(2, 4)).unwrap();
        assert!(hs.row(1).lambda > disclosure.row(1).lambda);
    }

    #[test]
    fn crossover_between_five_and_six() {
        let five = compare_two_period(&p(5, 2)).unwrap();
        let six = compare_two_period(&p(6, 2)).unwrap();
        assert_relative_eq!(
            five.find("lambda1").unwrap().ratio,
            (1000.0f64 / 904.0).sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(
            six.find("lambda1").unwrap().ratio,
            (1728.0f64 / 1768.0).sqrt(),
            max_relative = 1e-13
        );
        assert!(five.find("lambda1").unwrap().ratio > 1.0);
        assert!(six.find("lambda1").unwrap().ratio < 1.0);
    }

    #[test]
    fn two_insider_verdicts() {
        let report = compare_two_period(&p(2, 2)).unwrap();
        assert_eq!(report.vs_no_disclosure.len(), 5);
        assert!(
            report.vs_no_disclosure.iter().all(|c| c.holds),
            "{report:?}"
        );
        assert!(report.all_hold());
    }

    #[test]
    fn monopolist_comparison_rejected() {
        assert!(compare_two_period(&p(1, 2)).is_err());
    }
}
