//! Seeded Monte Carlo verification of an equilibrium path.
//!
//! Every path owns a ChaCha8 stream selected by its index, so draws do not
//! depend on scheduling. Paths are processed in fixed-size chunks on the
//! rayon pool and chunk accumulators are folded in index order, which makes
//! reports bit-identical for any number of worker threads. Moments are two-pass:
//! the first pass fixes the means and the second regenerates each path to
//! accumulate centered cross-products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EquilibriumPath, MarketParams, SimulationPathRecord};

const CHUNK: u64 = 4096;

/// Half-width of every statistical band, in standard errors.
pub const BAND: f64 = 3.0;

/// How the dissimulation noise of one auction is shared among insiders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    /// Each insider draws its own noise with variance σ²_{z,n}.
    Independent,
    /// One draw with variance σ²_{z,n}/M added by every insider.
    Common,
}

impl std::str::FromStr for NoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Self::Independent),
            "common" => Ok(Self::Common),
            _ => Err(Error::InvalidParams {
                field: "convention",
                constraint: "convention is independent or common",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub paths: u64,
    pub master_seed: u64,
    pub noise_convention: NoiseConvention,
    /// Number of leading paths kept in full in the report. Zero keeps none.
    pub record_paths: usize,
}

impl SimulationConfig {
    pub fn new(paths: u64, master_seed: u64, noise_convention: NoiseConvention) -> Self {
        Self {
            paths,
            master_seed,
            noise_convention,
            record_paths: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            Err(Error::EmptySimulation)
        } else {
            Ok(())
        }
    }
}

/// A sample statistic set against its model value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
    /// (estimate − expected) / std_error; zero when the standard error
    /// vanishes and the gap is within the floor tolerance.
    pub z_score: f64,
    pub pass: bool,
}

impl Estimate {
    /// `floor` is an absolute tolerance for statistics whose sampling error
    /// is zero by construction, such as anything measured at the last auction.
    fn new(estimate: f64, std_error: f64, expected: f64, floor: f64) -> Self {
        let gap = estimate - expected;
        let z_score = if std_error > 0.0 {
            gap / std_error
        } else if gap.abs() <= floor {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        };
        let pass = estimate.is_finite() && gap.abs() <= BAND * std_error + floor;
        Self {
            estimate,
            std_error,
            expected,
            z_score,
            pass,
        }
    }
}

/// Per-auction statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuctionStats {
    pub index: usize,
    /// OLS slope of p_n − p*_{n−1} on y_n. Equals λ_n by construction.
    pub plumbing_lambda: f64,
    /// Cov(v − p*_{n−1}, y_n) / Var(y_n) against λ_n.
    pub structural_lambda: Estimate,
    /// OLS slope of p*_n − p*_{n−1} on the aggregate insider order.
    pub plumbing_gamma: f64,
    /// Cov(v − p*_{n−1}, X_n) / Var(X_n) against γ_n.
    pub structural_gamma: Estimate,
    /// Var(y_n) against (M+1)σ_μ².
    pub order_flow_var: Estimate,
    /// Var(v − p*_n) against Σ_n.
    pub posterior_var: Estimate,
    /// Mean of p*_n − p*_{n−1} against zero.
    pub price_increment: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub params: MarketParams,
    pub config: SimulationConfig,
    /// Paths that produced finite values throughout.
    pub valid_paths: u64,
    /// Paths dropped because a value overflowed.
    pub excluded_paths: u64,
    pub auctions: Vec<AuctionStats>,
    /// Per-insider total profit (averaged over insiders within a path)
    /// against α₀Σ₀ + δ₀.
    pub profit: Estimate,
    /// max over paths of |p*_N − v|.
    pub max_final_error: f64,
    pub final_error_tolerance: f64,
    pub records: Vec<SimulationPathRecord>,
}

impl SimulationReport {
    pub fn final_revelation_pass(&self) -> bool {
        self.max_final_error <= self.final_error_tolerance
    }

    /// Every statistic this report checks, labelled, in a fixed order.
    pub fn checks(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        for a in &self.auctions {
            let n = a.index;
            let lambda =
                self.plumbing_tolerance_ok(a.plumbing_lambda, a.structural_lambda.expected);
            let gamma = self.plumbing_tolerance_ok(a.plumbing_gamma, a.structural_gamma.expected);
            out.push((format!("plumbing_lambda[{n}]"), lambda));
            out.push((format!("structural_lambda[{n}]"), a.structural_lambda.pass));
            out.push((format!("plumbing_gamma[{n}]"), gamma));
            out.push((format!("structural_gamma[{n}]"), a.structural_gamma.pass));
            out.push((format!("order_flow_var[{n}]"), a.order_flow_var.pass));
            out.push((format!("posterior_var[{n}]"), a.posterior_var.pass));
            out.push((format!("price_increment[{n}]"), a.price_increment.pass));
        }
        out.push(("profit".into(), self.profit.pass));
        out.push((
            "profit_positive".into(),
            self.profit.estimate > BAND * self.profit.std_error,
        ));
        out.push(("final_revelation".into(), self.final_revelation_pass()));
        out
    }

    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }

    fn plumbing_tolerance_ok(&self, estimate: f64, expected: f64) -> bool {
        (estimate - expected).abs() <= 1e-9 * expected.abs().max(1.0)
    }
}

/// Observables of one path.
struct Observation {
    /// v − p*_{n−1}
    gap: Vec<f64>,
    flow: Vec<f64>,
    /// Aggregate insider order X_n.
    insider: Vec<f64>,
    /// p_n − p*_{n−1}
    impact: Vec<f64>,
    /// p*_n − p*_{n−1}
    step: Vec<f64>,
    /// v − p*_n
    post_gap: Vec<f64>,
    profit: f64,
    final_error: f64,
}

impl Observation {
    fn is_finite(&self) -> bool {
        [
            &self.gap,
            &self.flow,
            &self.insider,
            &self.impact,
            &self.step,
            &self.post_gap,
        ]
        .iter()
        .all(|v| v.iter().all(|x| x.is_finite()))
            && self.profit.is_finite()
            && self.final_error.is_finite()
    }
}

fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates one path. Both conventions consume M + 1 normals per auction
/// (plus one for v) so their streams stay aligned; the common draw reuses the
/// first insider's normal, which makes the conventions identical when M = 1.
fn simulate_one(
    path: &EquilibriumPath,
    convention: NoiseConvention,
    seed: u64,
    index: u64,
    record: bool,
) -> (Observation, Option<SimulationPathRecord>) {
    let p = &path.params;
    let m = p.insiders as usize;
    let n_auctions = path.rows.len();
    let mut rng = path_rng(seed, index);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };

    let v = p.prior_mean + p.prior_var.sqrt() * normal();
    let mut obs = Observation {
        gap: Vec::with_capacity(n_auctions),
        flow: Vec::with_capacity(n_auctions),
        insider: Vec::with_capacity(n_auctions),
        impact: Vec::with_capacity(n_auctions),
        step: Vec::with_capacity(n_auctions),
        post_gap: Vec::with_capacity(n_auctions),
        profit: 0.0,
        final_error: 0.0,
    };
    let mut rec = record.then(|| SimulationPathRecord {
        path_index: index,
        value: v,
        order_flow: Vec::with_capacity(n_auctions),
        price: Vec::with_capacity(n_auctions),
        post_price: Vec::with_capacity(n_auctions),
        orders: Vec::with_capacity(n_auctions),
        profits: vec![0.0; m],
    });
    let mut profits = vec![0.0; m];
    let mut orders = vec![0.0; m];
    let mut post = p.prior_mean;
    let sigma_mu = p.noise_sd();

    for row in &path.rows {
        let gap = v - post;
        let z_sd = row.z_var.sqrt();
        for x in orders.iter_mut() {
            *x = normal();
        }
        let common = z_sd / p.m().sqrt() * orders[0];
        for x in orders.iter_mut() {
            let z = match convention {
                NoiseConvention::Independent => z_sd * *x,
                NoiseConvention::Common => common,
            };
            *x = row.beta * gap + z;
        }
        let mu = sigma_mu * normal();
        let insider: f64 = orders.iter().sum();
        let flow = insider + mu;
        let price = post + row.lambda * flow;
        let new_post = post + row.gamma * insider;
        for (pi, x) in profits.iter_mut().zip(&orders) {
            *pi += x * (v - price);
        }
        obs.gap.push(gap);
        obs.flow.push(flow);
        obs.insider.push(insider);
        obs.impact.push(price - post);
        obs.step.push(new_post - post);
        obs.post_gap.push(v - new_post);
        if let Some(r) = rec.as_mut() {
            r.order_flow.push(flow);
            r.price.push(price);
            r.post_price.push(new_post);
            r.orders.push(orders.clone());
        }
        post = new_post;
    }
    obs.profit = profits.iter().sum::<f64>() / m as f64;
    obs.final_error = (post - v).abs();
    if let Some(r) = rec.as_mut() {
        r.profits = profits;
    }
    (obs, rec)
}

/// First-pass sums.
#[derive(Clone)]
struct Sums {
    count: u64,
    excluded: u64,
    gap: Vec<f64>,
    flow: Vec<f64>,
    insider: Vec<f64>,
    impact: Vec<f64>,
    step: Vec<f64>,
    post_gap: Vec<f64>,
    profit: f64,
    max_final_error: f64,
}

impl Sums {
    fn zero(n: usize) -> Self {
        Self {
            count: 0,
            excluded: 0,
            gap: vec![0.0; n],
            flow: vec![0.0; n],
            insider: vec![0.0; n],
            impact: vec![0.0; n],
            step: vec![0.0; n],
            post_gap: vec![0.0; n],
            profit: 0.0,
            max_final_error: 0.0,
        }
    }

    fn add(&mut self, o: &Observation) {
        self.count += 1;
        for n in 0..self.gap.len() {
            self.gap[n] += o.gap[n];
            self.flow[n] += o.flow[n];
            self.insider[n] += o.insider[n];
            self.impact[n] += o.impact[n];
            self.step[n] += o.step[n];
            self.post_gap[n] += o.post_gap[n];
        }
        self.profit += o.profit;
        self.max_final_error = self.max_final_error.max(o.final_error);
    }

    fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.excluded += other.excluded;
        for n in 0..self.gap.len() {
            self.gap[n] += other.gap[n];
            self.flow[n] += other.flow[n];
            self.insider[n] += other.insider[n];
            self.impact[n] += other.impact[n];
            self.step[n] += other.step[n];
            self.post_gap[n] += other.post_gap[n];
        }
        self.profit += other.profit;
        self.max_final_error = self.max_final_error.max(other.max_final_error);
    }

    fn means(&self) -> Sums {
        let k = self.count as f64;
        let scale = |v: &Vec<f64>| v.iter().map(|x| x / k).collect::<Vec<_>>();
        Sums {
            count: self.count,
            excluded: self.excluded,
            gap: scale(&self.gap),
            flow: scale(&self.flow),
            insider: scale(&self.insider),
            impact: scale(&self.impact),
            step: scale(&self.step),
            post_gap: scale(&self.post_gap),
            profit: self.profit / k,
            max_final_error: self.max_final_error,
        }
    }
}

/// Second-pass centered cross-products, per auction.
#[derive(Clone, Copy, Default)]
struct Centered {
    gap_gap: f64,
    flow_flow: f64,
    gap_flow: f64,
    impact_flow: f64,
    ins_ins: f64,
    gap_ins: f64,
    step_ins: f64,
    step_step: f64,
    post_post: f64,
}

#[derive(Clone)]
struct Second {
    per_auction: Vec<Centered>,
    profit: f64,
}

impl Second {
    fn zero(n: usize) -> Self {
        Self {
            per_auction: vec![Centered::default(); n],
            profit: 0.0,
        }
    }

    fn add(&mut self, o: &Observation, mean: &Sums) {
        for (n, c) in self.per_auction.iter_mut().enumerate() {
            let g = o.gap[n] - mean.gap[n];
            let y = o.flow[n] - mean.flow[n];
            let x = o.insider[n] - mean.insider[n];
            let d = o.impact[n] - mean.impact[n];
            let s = o.step[n] - mean.step[n];
            let e = o.post_gap[n] - mean.post_gap[n];
            c.gap_gap += g * g;
            c.flow_flow += y * y;
            c.gap_flow += g * y;
            c.impact_flow += d * y;
            c.ins_ins += x * x;
            c.gap_ins += g * x;
            c.step_ins += s * x;
            c.step_step += s * s;
            c.post_post += e * e;
        }
        let q = o.profit - mean.profit;
        self.profit += q * q;
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.per_auction.iter_mut().zip(&other.per_auction) {
            a.gap_gap += b.gap_gap;
            a.flow_flow += b.flow_flow;
            a.gap_flow += b.gap_flow;
            a.impact_flow += b.impact_flow;
            a.ins_ins += b.ins_ins;
            a.gap_ins += b.gap_ins;
            a.step_ins += b.step_ins;
            a.step_step += b.step_step;
            a.post_post += b.post_post;
        }
        self.profit += other.profit;
    }
}

/// Slope of y on x with its OLS standard error, from centered sums.
fn ols(sxy: f64, sxx: f64, syy: f64, count: f64) -> (f64, f64) {
    let slope = sxy / sxx;
    let rss = (syy - slope * sxy).max(0.0);
    let se = (rss / (count - 2.0) / sxx).sqrt();
    (slope, se)
}

fn chunk_ranges(paths: u64) -> Vec<(u64, u64)> {
    (0..paths.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(paths)))
        .collect()
}

/// Runs the Monte Carlo check of `path` under `config`.
pub fn simulate_paths(
    path: &EquilibriumPath,
    config: &SimulationConfig,
) -> Result<SimulationReport> {
    config.validate()?;
    let params = path.params.validate()?;
    let n_auctions = path.rows.len();
    let conv = config.noise_convention;
    let seed = config.master_seed;
    let chunks = chunk_ranges(config.paths);
    let record_cap = config.record_paths as u64;

    let first: Vec<(Sums, Vec<SimulationPathRecord>)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sums = Sums::zero(n_auctions);
            let mut recs = Vec::new();
            for i in lo..hi {
                let (obs, rec) = simulate_one(path, conv, seed, i, i < record_cap);
                recs.extend(rec);
                if obs.is_finite() {
                    sums.add(&obs);
                } else {
                    sums.excluded += 1;
                }
            }
            (sums, recs)
        })
        .collect();
    let mut total = Sums::zero(n_auctions);
    let mut records = Vec::new();
    for (s, r) in &first {
        total.merge(s);
        records.extend(r.iter().cloned());
    }
    if total.count == 0 {
        return Err(Error::EmptySimulation);
    }
    if total.count < 3 {
        return Err(Error::InvalidParams {
            field: "paths",
            constraint: "at least 3 finite paths, so that standard errors exist",
        });
    }
    let mean = total.means();

    let second: Vec<Second> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = Second::zero(n_auctions);
            for i in lo..hi {
                let (obs, _) = simulate_one(path, conv, seed, i, false);
                if obs.is_finite() {
                    acc.add(&obs, &mean);
                }
            }
            acc
        })
        .collect();
    let mut centered = Second::zero(n_auctions);
    for s in &second {
        centered.merge(s);
    }

    let k = total.count as f64;
    let var_se = |var: f64| var * (2.0 / (k - 1.0)).sqrt();
    let scale = params.prior_var;
    let order_flow_expected = (params.m() + 1.0) * params.noise_var;
    let auctions = path
        .rows
        .iter()
        .zip(&centered.per_auction)
        .enumerate()
        .map(|(n, (row, c))| {
            let (plumbing_lambda, _) = ols(c.impact_flow, c.flow_flow, 0.0, k);
            let (lam, lam_se) = ols(c.gap_flow, c.flow_flow, c.gap_gap, k);
            let (plumbing_gamma, _) = ols(c.step_ins, c.ins_ins, 0.0, k);
            let (gam, gam_se) = ols(c.gap_ins, c.ins_ins, c.gap_gap, k);
            let var_y = c.flow_flow / (k - 1.0);
            let var_post = c.post_post / (k - 1.0);
            let var_step = c.step_step / (k - 1.0);
            let sigma_prev = path.sigma(n);
            AuctionStats {
                index: row.index,
                plumbing_lambda,
                structural_lambda: Estimate::new(lam, lam_se, row.lambda, 1e-12 * row.lambda),
                plumbing_gamma,
                structural_gamma: Estimate::new(gam, gam_se, row.gamma, 1e-9 * row.gamma),
                order_flow_var: Estimate::new(var_y, var_se(var_y), order_flow_expected, 0.0),
                posterior_var: Estimate::new(
                    var_post,
                    var_se(var_post),
                    row.sigma_post,
                    1e-12 * scale,
                ),
                price_increment: Estimate::new(
                    mean.step[n],
                    (var_step / k).sqrt(),
                    0.0,
                    1e-12 * sigma_prev.sqrt(),
                ),
            }
        })
        .collect();

    let profit_var = centered.profit / (k - 1.0);
    let profit = Estimate::new(
        mean.profit,
        (profit_var / k).sqrt(),
        path.ex_ante_profit,
        0.0,
    );

    Ok(SimulationReport {
        params,
        config: *config,
        valid_paths: total.count,
        excluded_paths: total.excluded,
        auctions,
        profit,
        max_final_error: total.max_final_error,
        final_error_tolerance: 1e-9 * final_scale(&params),
        records,
    })
}

/// Magnitude against which the final pricing error is judged.
fn final_scale(p: &MarketParams) -> f64 {
    p.prior_mean.abs().max(p.prior_var.sqrt()).max(1.0)
}

/// One statistic compared across the two noise conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionComparison {
    pub statistic: String,
    pub left: f64,
    pub right: f64,
    /// √(se_left² + se_right²).
    pub joint_std_error: f64,
    pub z_score: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub comparisons: Vec<ConventionComparison>,
}

impl EquivalenceVerdict {
    pub fn agree(&self) -> bool {
        self.comparisons.iter().all(|c| c.agree)
    }

    pub fn first_mismatch(&self) -> Option<&ConventionComparison> {
        self.comparisons.iter().find(|c| !c.agree)
    }
}

fn compare(statistic: String, a: &Estimate, b: &Estimate, floor: f64) -> ConventionComparison {
    let joint = a.std_error.hypot(b.std_error);
    let gap = a.estimate - b.estimate;
    let z_score = if joint > 0.0 {
        gap / joint
    } else if gap.abs() <= floor {
        0.0
    } else {
        gap.signum() * f64::INFINITY
    };
    ConventionComparison {
        statistic,
        left: a.estimate,
        right: b.estimate,
        joint_std_error: joint,
        z_score,
        agree: gap.abs() <= BAND * joint + floor,
    }
}

/// Compares every shared statistic of two reports, without failing.
///
/// Within each auction the order is Var(y), λ̂, γ̂, Var(v − p*); the profit
/// comparison comes last.
pub fn compare_conventions(
    a: &SimulationReport,
    b: &SimulationReport,
) -> Result<EquivalenceVerdict> {
    if a.params != b.params
        || a.config.paths != b.config.paths
        || a.config.master_seed != b.config.master_seed
    {
        return Err(Error::InvalidParams {
            field: "reports",
            constraint: "reports share params, path count and seed",
        });
    }
    let floor = 1e-12 * a.params.prior_var;
    let mut comparisons = Vec::new();
    for (x, y) in a.auctions.iter().zip(&b.auctions) {
        let n = x.index;
        comparisons.push(compare(
            format!("order_flow_var[{n}]"),
            &x.order_flow_var,
            &y.order_flow_var,
            0.0,
        ));
        comparisons.push(compare(
            format!("structural_lambda[{n}]"),
            &x.structural_lambda,
            &y.structural_lambda,
            1e-12 * x.structural_lambda.expected,
        ));
        comparisons.push(compare(
            format!("structural_gamma[{n}]"),
            &x.structural_gamma,
            &y.structural_gamma,
            1e-9 * x.structural_gamma.expected,
        ));
        comparisons.push(compare(
            format!("posterior_var[{n}]"),
            &x.posterior_var,
            &y.posterior_var,
            floor,
        ));
    }
    comparisons.push(compare("profit".into(), &a.profit, &b.profit, 0.0));
    Ok(EquivalenceVerdict { comparisons })
}

/// Fails with [`Error::ConventionMismatch`] on the first statistic that
/// differs by more than three joint standard errors.
pub fn convention_equivalence(
    a: &SimulationReport,
    b: &SimulationReport,
) -> Result<EquivalenceVerdict> {
    let verdict = compare_conventions(a, b)?;
    if let Some(c) = verdict.first_mismatch() {
        return Err(Error::ConventionMismatch {
            statistic: c.statistic.clone(),
            left: c.left,
            right: c.right,
            z_score: c.z_score,
        });
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disclosure::solve;

    fn m2n2() -> EquilibriumPath {
        solve(&MarketParams::new(2, 2, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn zero_paths_rejected() {
        let cfg = SimulationConfig::new(0, 1, NoiseConvention::Independent);
        assert_eq!(simulate_paths(&m2n2(), &cfg), Err(Error::EmptySimulation));
    }

    #[test]
    fn chunks_cover_every_path_once() {
        let r = chunk_ranges(2 * CHUNK + 5);
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], (0, CHUNK));
        assert_eq!(r[2], (2 * CHUNK, 2 * CHUNK + 5));
    }

    #[test]
    fn final_auction_reveals_value() {
        let path = solve(&MarketParams::new(3, 6, 2.0, 0.5).with_prior_mean(10.0)).unwrap();
        let cfg = SimulationConfig::new(2000, 7, NoiseConvention::Independent);
        let rep = simulate_paths(&path, &cfg).unwrap();
        assert!(rep.final_revelation_pass(), "{}", rep.max_final_error);
    }

    #[test]
    fn records_are_capped() {
        let mut cfg = SimulationConfig::new(100, 3, NoiseConvention::Common);
        cfg.record_paths = 4;
        let rep = simulate_paths(&m2n2(), &cfg).unwrap();
        assert_eq!(rep.records.len(), 4);
        assert_eq!(rep.records[3].path_index, 3);
        assert_eq!(rep.records[0].orders.len(), 2);
        assert_eq!(rep.records[0].orders[0].len(), 2);
    }

    #[test]
    fn common_noise_shares_one_draw() {
        let mut cfg = SimulationConfig::new(5, 3, NoiseConvention::Common);
        cfg.record_paths = 5;
        let rep = simulate_paths(&m2n2(), &cfg).unwrap();
        for r in &rep.records {
            // Orders differ only through noise, so equal orders mean equal noise.
            assert_eq!(r.orders[0][0], r.orders[0][1]);
        }
    }

    #[test]
    fn convention_parse() {
        assert_eq!(
            "common".parse::<NoiseConvention>(),
            Ok(NoiseConvention::Common)
        );
        assert!("shared".parse::<NoiseConvention>().is_err());
    }
}
