//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kyle_disclosure::asymptotics::{
    check_envelope, convergence_probe, cubic_f, limit_constant_a, theorem31_limits,
    ContinuousLimits,
};
use kyle_disclosure::benchmark::{
    compare_two_period, solve_hs_multiperiod, solve_k_cubic, two_period_no_disclosure,
};
use kyle_disclosure::disclosure::{a_squared_sequence, solve, two_period_closed_form};
use kyle_disclosure::figures::{figure, FigureOptions};
use kyle_disclosure::report::OutputFormat;
use kyle_disclosure::simulator::{
    convention_equivalence, simulate_paths, NoiseConvention, SimulationConfig,
};
use kyle_disclosure::MarketParams;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn two_auction_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for m in 1..=10 {
        for s0 in [0.25, 1.0, 4.0] {
            for su in [0.5, 1.0, 2.0] {
                let p = MarketParams::new(m, 2, s0, su);
                let path = solve(&p).map_err(|e| e.to_string())?;
                let cf = two_period_closed_form(&p).map_err(|e| e.to_string())?;
                let gamma1 = cf.gamma1.ok_or("closed form lacks gamma1")?;
                let pairs = [
                    ("lambda1", path.rows[0].lambda, cf.lambda1),
                    ("lambda2", path.rows[1].lambda, cf.lambda2),
                    ("gamma1", path.rows[0].gamma, gamma1),
                    ("beta1", path.rows[0].beta, cf.beta1),
                    ("beta2", path.rows[1].beta, cf.beta2),
                    ("sigma1", path.sigma(1), cf.sigma1),
                ];
                for (name, got, want) in pairs {
                    let r = rel(got, want);
                    ensure(r <= 1e-10, || {
                        format!("{name} M={m} S0={s0} su={su}: {got} vs {want}")
                    })?;
                    worst = worst.max(r);
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} parameter sets, max relative error {worst:.2e}"
    ))
}

fn single_insider() -> Outcome {
    let s0 = 1.0;
    for n in 2..=200 {
        let path = solve(&MarketParams::new(1, n, s0, 1.0)).map_err(|e| e.to_string())?;
        let l1 = path.rows[0].lambda;
        for (k, r) in path.rows.iter().enumerate() {
            ensure(rel(r.lambda, l1) <= 1e-12, || {
                format!("N={n} lambda_{} = {} vs {l1}", k + 1, r.lambda)
            })?;
            let want = (1.0 - (k + 1) as f64 / n as f64) * s0;
            let got = path.sigma(k + 1);
            ensure((got - want).abs() <= 1e-12, || {
                format!("N={n} Sigma_{} = {got} vs {want}", k + 1)
            })?;
        }
    }
    Ok("N = 2..200 flat lambda and linear variance".into())
}

fn point_values() -> Outcome {
    let k = solve_k_cubic(2).map_err(|e| e.to_string())?;
    ensure((k - 1.5927).abs() <= 5e-4, || format!("k(2) = {k}"))?;
    let s0 = 3.0;
    let path = solve(&MarketParams::new(2, 2, s0, 1.0)).map_err(|e| e.to_string())?;
    let ratio = path.sigma(1) / s0;
    ensure((ratio - 0.1).abs() <= 1e-12, || {
        format!("Sigma1/Sigma0 = {ratio}")
    })?;
    for m in 2..=50u32 {
        let f = cubic_f(m, f64::from(m)).map_err(|e| e.to_string())?;
        ensure(f == 4.0 * f64::from(m), || format!("f(M) = {f} at M={m}"))?;
    }
    Ok(format!(
        "k(2) = {k:.7}, Sigma1/Sigma0 = {ratio}, f(M) = 4M on 2..50"
    ))
}

fn inequality_suite() -> Outcome {
    for m in 2..=50 {
        let rep =
            compare_two_period(&MarketParams::new(m, 2, 1.0, 1.0)).map_err(|e| e.to_string())?;
        if let Some(c) = rep.vs_monopolist.iter().find(|c| !c.holds) {
            return Err(format!(
                "M={m} vs single insider: {} ratio {}",
                c.quantity, c.ratio
            ));
        }
    }
    let rep = compare_two_period(&MarketParams::new(2, 2, 1.0, 1.0)).map_err(|e| e.to_string())?;
    if let Some(c) = rep.vs_no_disclosure.iter().find(|c| !c.holds) {
        return Err(format!(
            "M=2 vs no disclosure: {} ratio {}",
            c.quantity, c.ratio
        ));
    }
    let lambda1_ratio = |m| {
        compare_two_period(&MarketParams::new(m, 2, 1.0, 1.0))
            .ok()
            .and_then(|r| r.find("lambda1").map(|c| c.ratio))
            .unwrap_or(f64::NAN)
    };
    let (r5, r6) = (lambda1_ratio(5), lambda1_ratio(6));
    ensure(r5 > 1.0 && r6 < 1.0, || {
        format!("lambda1 ratio {r5} at M=5, {r6} at M=6")
    })?;
    Ok(format!(
        "M = 2..50 hold; lambda1 crossover {r5:.4} -> {r6:.4}"
    ))
}

fn limit_root() -> Outcome {
    let mut worst = 0.0f64;
    for m in 2..=100 {
        let r = limit_constant_a(m).map_err(|e| e.to_string())?;
        ensure(r.bracket.lower < r.a && r.a < r.bracket.upper, || {
            format!(
                "M={m}: A = {} outside ({}, {})",
                r.a, r.bracket.lower, r.bracket.upper
            )
        })?;
        ensure(r.relative_residual <= 1e-10, || {
            format!("M={m}: residual {}", r.relative_residual)
        })?;
        worst = worst.max(r.relative_residual);
    }
    let a2 = limit_constant_a(2).map_err(|e| e.to_string())?.a;
    ensure((a2 - 1.69171).abs() <= 1e-4, || format!("A(2) = {a2}"))?;
    Ok(format!("A(2) = {a2:.7}, max relative residual {worst:.1e}"))
}

fn monotone_range() -> Outcome {
    let start = Instant::now();
    for m in 2..=20 {
        let a_lim = limit_constant_a(m).map_err(|e| e.to_string())?.a;
        for n in 2..=500 {
            let b = a_squared_sequence(m, n);
            for (i, w) in b.windows(2).enumerate() {
                ensure(w[0] <= w[1], || {
                    format!("M={m} N={n}: a_{} > a_{}", i + 1, i + 2)
                })?;
            }
            for (i, &x) in b[..n - 1].iter().enumerate() {
                ensure(x >= a_lim - 1e-9, || {
                    format!("M={m} N={n}: a_{}^2 = {x} < A = {a_lim}", i + 1)
                })?;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("M = 2..20, N = 2..500 in {took:.2?}"))
}

fn decay_and_convergence() -> Outcome {
    for m in [2, 3, 4] {
        for t in [0.25, 0.5, 0.75] {
            for n in [20, 100, 400] {
                let c = check_envelope(m, t, n, 1e-9).map_err(|e| e.to_string())?;
                ensure(c.holds, || {
                    format!("M={m} t={t} N={n}: log ratio {}", c.log_ratio)
                })?;
            }
        }
    }
    let p = MarketParams::new(2, 2, 1.0, 1.0);
    let grid = [2, 5, 10, 50, 100, 500];
    let probe = convergence_probe(&p, &grid).map_err(|e| e.to_string())?;
    for w in probe.windows(2) {
        // Once the gap reaches zero in double precision it can only stay there.
        let ok = if w[0].gap > 0.0 {
            w[1].gap < w[0].gap
        } else {
            w[1].gap == 0.0
        };
        ensure(ok, || {
            format!(
                "gap {} at N={} then {} at N={}",
                w[0].gap, w[0].auctions, w[1].gap, w[1].auctions
            )
        })?;
    }
    let limit = match theorem31_limits(&p).map_err(|e| e.to_string())? {
        ContinuousLimits::Competitive { first_lambda, .. } => first_lambda,
        ContinuousLimits::Monopolist { .. } => return Err("expected competitive limit".into()),
    };
    let l500 = probe.last().map(|r| r.lambda1).unwrap_or(f64::NAN);
    ensure((l500 - limit).abs() <= 1e-3, || {
        format!("lambda1(500) = {l500} vs {limit}")
    })?;
    Ok(format!(
        "27 envelope cases; lambda1(500) - limit = {:.1e}",
        l500 - limit
    ))
}

fn benchmark_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for m in 1..=10 {
        let p = MarketParams::new(m, 2, 1.0, 1.0);
        let hs = solve_hs_multiperiod(&p).map_err(|e| e.to_string())?;
        let cf = two_period_no_disclosure(&p).map_err(|e| e.to_string())?;
        let pairs = [
            ("lambda1", hs.rows[0].lambda, cf.lambda1),
            ("lambda2", hs.rows[1].lambda, cf.lambda2),
            ("beta1", hs.rows[0].beta, cf.beta1),
            ("beta2", hs.rows[1].beta, cf.beta2),
            ("sigma1", hs.sigma(1), cf.sigma1),
        ];
        for (name, got, want) in pairs {
            let r = rel(got, want);
            ensure(r <= 1e-8, || format!("M={m} {name}: {got} vs {want}"))?;
            worst = worst.max(r);
        }
    }
    for n in [4, 20, 50] {
        let hs =
            solve_hs_multiperiod(&MarketParams::new(2, n, 1.0, 1.0)).map_err(|e| e.to_string())?;
        ensure(hs.boundary_mismatch <= 1e-9, || {
            format!("N={n}: mismatch {}", hs.boundary_mismatch)
        })?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!(
        "max relative error {worst:.1e}, shooting in {took:.2?}"
    ))
}

fn monte_carlo() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let path = solve(&MarketParams::new(2, 2, 1.0, 1.0)).map_err(|e| e.to_string())?;
    let run = |c| pool.install(|| simulate_paths(&path, &SimulationConfig::new(200_000, 42, c)));
    let ind = run(NoiseConvention::Independent).map_err(|e| e.to_string())?;
    let com = run(NoiseConvention::Common).map_err(|e| e.to_string())?;
    let took = start.elapsed();

    for (i, a) in ind.auctions.iter().enumerate() {
        let e = &a.structural_lambda;
        ensure(e.pass, || {
            format!(
                "lambda_{}: {} vs {} (se {})",
                i + 1,
                e.estimate,
                e.expected,
                e.std_error
            )
        })?;
        let v = &a.order_flow_var;
        ensure(v.pass, || {
            format!("Var(y_{}): {} vs {}", i + 1, v.estimate, v.expected)
        })?;
        ensure((v.expected - 3.0).abs() < 1e-12, || {
            format!("Var(y) oracle {}", v.expected)
        })?;
    }
    let pr = &ind.profit;
    ensure(pr.pass, || {
        format!(
            "profit {} vs {} (se {})",
            pr.estimate, pr.expected, pr.std_error
        )
    })?;
    ensure(ind.final_revelation_pass(), || {
        format!("final error {}", ind.max_final_error)
    })?;
    ensure(ind.all_pass() && com.all_pass(), || {
        "a secondary check failed".into()
    })?;
    convention_equivalence(&ind, &com).map_err(|e| e.to_string())?;
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!(
        "profit {:.5} (z {:.2}), final error {:.1e}, two conventions in {took:.2?}",
        pr.estimate, pr.z_score, ind.max_final_error
    ))
}

fn figure_datasets() -> Outcome {
    let opts = FigureOptions::default();
    let emit = |dir: &std::path::Path| -> Result<Vec<(String, Vec<u8>)>, String> {
        let mut files = Vec::new();
        for which in 1..=6 {
            let out = figure(which, &opts).map_err(|e| e.to_string())?;
            if let Some(a) = out.assertions.iter().find(|a| a.gating && !a.pass) {
                return Err(format!("fig{which}: {} ({})", a.claim, a.detail));
            }
            for p in out
                .write(dir, OutputFormat::Csv)
                .map_err(|e| e.to_string())?
            {
                let bytes = std::fs::read(&p).map_err(|e| e.to_string())?;
                files.push((p.file_name().unwrap().to_string_lossy().into_owned(), bytes));
            }
        }
        files.sort();
        Ok(files)
    };
    let d1 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = emit(d1.path())?;
    let second = emit(d2.path())?;
    ensure(first == second, || "re-run differs".into())?;
    Ok(format!("{} files, byte-identical on re-run", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two-auction disclosure oracle", two_auction_oracle),
        ("single-insider reduction", single_insider),
        ("point values", point_values),
        ("two-auction inequality suite", inequality_suite),
        ("limit constant A", limit_root),
        ("mixing monotonicity and range", monotone_range),
        (
            "decay envelope and first-auction convergence",
            decay_and_convergence,
        ),
        ("no-disclosure benchmark oracle", benchmark_oracle),
        ("Monte Carlo consistency", monte_carlo),
        ("figure datasets", figure_datasets),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
