//! Tabular output in CSV and JSON.
//!
//! Numbers are written with 17 significant digits in exponent form, which is
//! locale independent and round-trips every f64. Metadata and trailer lines
//! are `#` comments so that standard CSV readers can skip them.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::asymptotics::{AsymptoticReport, ContinuousLimits, Intensity};
use crate::benchmark::HsPath;
use crate::model::EquilibriumPath;
use crate::simulator::{EquivalenceVerdict, Estimate, SimulationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// 17 significant digits, exponent form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Num(x) => fmt_f64(*x),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(i) => json!(i),
            // Non-finite values have no JSON number form.
            Self::Num(x) if !x.is_finite() => json!(x.to_string()),
            Self::Num(x) => json!(x),
            Self::Text(s) => json!(s),
            Self::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Self::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Self::Int(i)
    }
}

impl From<u32> for Cell {
    fn from(i: u32) -> Self {
        Self::Int(u64::from(i))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

/// A table with leading metadata and an optional one-row trailer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub trailer: Vec<(String, Cell)>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn trail(&mut self, key: &str, value: impl Into<Cell>) {
        self.trailer.push((key.to_string(), value.into()));
    }

    /// Column `name` as floats; integers are widened.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match &r[j] {
                Cell::Num(x) => Some(*x),
                Cell::Int(i) => Some(*i as f64),
                _ => None,
            })
            .collect()
    }

    pub fn meta_value(&self, key: &str) -> Option<&Cell> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.metadata.is_empty() {
            let pairs: Vec<String> = self
                .metadata
                .iter()
                .map(|(k, v)| format!("{k}={}", v.csv()))
                .collect();
            let _ = writeln!(out, "# {}", pairs.join(","));
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        if !self.trailer.is_empty() {
            let keys: Vec<&str> = self.trailer.iter().map(|(k, _)| k.as_str()).collect();
            let vals: Vec<String> = self.trailer.iter().map(|(_, v)| v.csv()).collect();
            let _ = writeln!(out, "# {}", keys.join(","));
            let _ = writeln!(out, "# {}", vals.join(","));
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let object = |pairs: &[(String, Cell)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.clone(), v.json()))
                    .collect::<Map<_, _>>(),
            )
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("metadata".into(), object(&self.metadata));
        top.insert("columns".into(), json!(self.columns));
        top.insert("rows".into(), Value::Array(rows));
        if !self.trailer.is_empty() {
            top.insert("trailer".into(), object(&self.trailer));
        }
        Value::Object(top)
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.to_json_value()).expect("table is valid JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> std::io::Result<()> {
        std::fs::write(path, self.render(format))
    }
}

/// Column order of the equilibrium table.
pub const SOLVE_COLUMNS: [&str; 9] = [
    "n",
    "a",
    "lambda",
    "beta",
    "gamma",
    "alpha",
    "delta",
    "sigma_post",
    "z_var",
];

pub fn solve_table(path: &EquilibriumPath) -> Table {
    let p = &path.params;
    let mut t = Table::new(&SOLVE_COLUMNS)
        .meta("model", "disclosure")
        .meta("insiders", p.insiders)
        .meta("auctions", p.auctions)
        .meta("prior_mean", p.prior_mean)
        .meta("prior_var", p.prior_var)
        .meta("noise_var", p.noise_var);
    for r in &path.rows {
        t.push(vec![
            r.index.into(),
            r.a.into(),
            r.lambda.into(),
            r.beta.into(),
            r.gamma.into(),
            r.alpha.into(),
            r.delta.into(),
            r.sigma_post.into(),
            r.z_var.into(),
        ]);
    }
    t.trail("alpha0", path.alpha0);
    t.trail("delta0", path.delta0);
    t.trail("ex_ante_profit", path.ex_ante_profit);
    t
}

pub const BENCHMARK_COLUMNS: [&str; 5] = ["n", "lambda", "beta", "alpha", "sigma_post"];

/// `k` is λ₁/λ₂ from the two-auction closed form, when N = 2.
pub fn benchmark_table(path: &HsPath, k: Option<f64>) -> Table {
    let p = &path.params;
    let mut t = Table::new(&BENCHMARK_COLUMNS)
        .meta("model", "no_disclosure")
        .meta("insiders", p.insiders)
        .meta("auctions", p.auctions)
        .meta("prior_mean", p.prior_mean)
        .meta("prior_var", p.prior_var)
        .meta("noise_var", p.noise_var);
    if let Some(k) = k {
        t = t.meta("k", k);
    }
    if path.reconstructed {
        t = t.meta("label", "reconstructed benchmark");
    }
    t = t
        .meta("shooting_iterations", path.iterations)
        .meta("boundary_mismatch", path.boundary_mismatch);
    for r in &path.rows {
        t.push(vec![
            r.index.into(),
            r.lambda.into(),
            r.beta.into(),
            r.alpha.into(),
            r.sigma_post.into(),
        ]);
    }
    t.trail("alpha0", path.alpha0);
    t
}

/// Key/value table of the continuous-trading limits, with A when requested.
pub fn limits_table(limits: &ContinuousLimits, constant: Option<&AsymptoticReport>) -> Table {
    let mut t = Table::new(&["quantity", "value"]).meta("model", "disclosure_limit");
    let mut kv = |k: &str, v: Cell| t.push(vec![k.into(), v]);
    match limits {
        ContinuousLimits::Monopolist {
            prior_var,
            noise_var,
        } => {
            kv("insiders", 1u32.into());
            kv("sigma_t", "(1-t)*Sigma0".into());
            kv("prior_var", (*prior_var).into());
            kv("lambda_t", limits.lambda_t().into());
            kv("beta_t", 0.0.into());
            kv("z_var_t", (*noise_var).into());
        }
        ContinuousLimits::Competitive {
            constant: c,
            first_lambda,
            first_beta,
            z_var_common,
            z_var_independent,
        } => {
            kv("insiders", c.insiders.into());
            kv("sigma_t", 0.0.into());
            kv("lambda_t", limits.lambda_t().into());
            let beta = match limits.beta_t() {
                Intensity::Finite(x) => x.into(),
                Intensity::Infinite => "inf".into(),
            };
            kv("beta_t", beta);
            kv("lambda_1", (*first_lambda).into());
            kv("beta_1", (*first_beta).into());
            kv("z_var_common", (*z_var_common).into());
            kv("z_var_independent", (*z_var_independent).into());
        }
    }
    if let Some(a) = constant {
        kv("A", a.a.into());
        kv("bracket_lower", a.bracket.lower.into());
        kv("bracket_upper", a.bracket.upper.into());
        kv("residual", a.residual.into());
        kv("relative_residual", a.relative_residual.into());
        kv("iterations", a.iterations.into());
    }
    t
}

pub const SIMULATION_COLUMNS: [&str; 7] = [
    "statistic",
    "n",
    "estimate",
    "std_error",
    "expected",
    "z_score",
    "pass",
];

fn push_estimate(t: &mut Table, name: &str, n: usize, e: &Estimate) {
    t.push(vec![
        name.into(),
        n.into(),
        e.estimate.into(),
        e.std_error.into(),
        e.expected.into(),
        e.z_score.into(),
        e.pass.into(),
    ]);
}

/// One row per checked statistic. Auction 0 marks path-level statistics.
pub fn simulation_table(rep: &SimulationReport) -> Table {
    let p = &rep.params;
    let convention = match rep.config.noise_convention {
        crate::simulator::NoiseConvention::Independent => "independent",
        crate::simulator::NoiseConvention::Common => "common",
    };
    let mut t = Table::new(&SIMULATION_COLUMNS)
        .meta("model", "disclosure_simulation")
        .meta("insiders", p.insiders)
        .meta("auctions", p.auctions)
        .meta("prior_mean", p.prior_mean)
        .meta("prior_var", p.prior_var)
        .meta("noise_var", p.noise_var)
        .meta("paths", rep.config.paths)
        .meta("seed", rep.config.master_seed)
        .meta("convention", convention)
        .meta("valid_paths", rep.valid_paths)
        .meta("excluded_paths", rep.excluded_paths);
    for a in &rep.auctions {
        let n = a.index;
        let exact = |x: f64, expected: f64| Estimate {
            estimate: x,
            std_error: 0.0,
            expected,
            z_score: 0.0,
            pass: (x - expected).abs() <= 1e-9 * expected.abs().max(1.0),
        };
        push_estimate(
            &mut t,
            "plumbing_lambda",
            n,
            &exact(a.plumbing_lambda, a.structural_lambda.expected),
        );
        push_estimate(&mut t, "structural_lambda", n, &a.structural_lambda);
        push_estimate(
            &mut t,
            "plumbing_gamma",
            n,
            &exact(a.plumbing_gamma, a.structural_gamma.expected),
        );
        push_estimate(&mut t, "structural_gamma", n, &a.structural_gamma);
        push_estimate(&mut t, "order_flow_var", n, &a.order_flow_var);
        push_estimate(&mut t, "posterior_var", n, &a.posterior_var);
        push_estimate(&mut t, "price_increment", n, &a.price_increment);
    }
    push_estimate(&mut t, "profit", 0, &rep.profit);
    t.push(vec![
        "max_final_error".into(),
        0usize.into(),
        rep.max_final_error.into(),
        0.0.into(),
        rep.final_error_tolerance.into(),
        0.0.into(),
        rep.final_revelation_pass().into(),
    ]);
    t.trail("all_pass", rep.all_pass());
    t
}

/// JSON form of [`simulation_table`], plus the recorded paths when any were kept.
pub fn simulation_json(rep: &SimulationReport) -> String {
    let mut value = simulation_table(rep).to_json_value();
    if !rep.records.is_empty() {
        value["records"] = serde_json::to_value(&rep.records).expect("records serialize");
    }
    let mut s = serde_json::to_string_pretty(&value).expect("report is valid JSON");
    s.push('\n');
    s
}

pub const EQUIVALENCE_COLUMNS: [&str; 6] = [
    "statistic",
    "independent",
    "common",
    "joint_std_error",
    "z_score",
    "agree",
];

pub fn equivalence_table(v: &EquivalenceVerdict) -> Table {
    let mut t = Table::new(&EQUIVALENCE_COLUMNS).meta("model", "convention_equivalence");
    for c in &v.comparisons {
        t.push(vec![
            c.statistic.as_str().into(),
            c.left.into(),
            c.right.into(),
            c.joint_std_error.into(),
            c.z_score.into(),
            c.agree.into(),
        ]);
    }
    t.trail("agree", v.agree());
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disclosure::solve;
    use crate::model::MarketParams;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, 0.4472135954999579] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn solve_csv_shape() {
        let path = solve(&MarketParams::new(2, 3, 1.0, 1.0)).unwrap();
        let csv = solve_table(&path).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# model=disclosure,insiders=2,auctions=3"));
        assert_eq!(
            lines[1],
            "n,a,lambda,beta,gamma,alpha,delta,sigma_post,z_var"
        );
        assert_eq!(lines.len(), 2 + 3 + 2);
        assert_eq!(lines[5], "# alpha0,delta0,ex_ante_profit");
        let trailer: Vec<f64> = lines[6][2..]
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(trailer, vec![path.alpha0, path.delta0, path.ex_ante_profit]);
    }

    #[test]
    fn json_round_trips_numbers() {
        let path = solve(&MarketParams::new(3, 4, 2.0, 0.5)).unwrap();
        let t = solve_table(&path);
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        for (i, row) in path.rows.iter().enumerate() {
            assert_eq!(v["rows"][i]["lambda"].as_f64().unwrap(), row.lambda);
            assert_eq!(v["rows"][i]["n"].as_u64().unwrap(), row.index as u64);
        }
        assert_eq!(v["trailer"]["alpha0"].as_f64().unwrap(), path.alpha0);
    }

    #[test]
    fn column_extraction() {
        let path = solve(&MarketParams::new(1, 4, 1.0, 1.0)).unwrap();
        let t = solve_table(&path);
        assert_eq!(t.column("n").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(t.column("missing").is_none());
    }
}
