//! Acceptance runner: one PASS/FAIL line per criterion, with the measured values
//! and pinned tolerances underneath. Exits nonzero if any criterion fails.

mod common;

use std::process::Command;
use std::time::Instant;

use qclab::calibration::{lemma4_cells, JL_FAILURE_CONSTANT, LEMMA4_CONSTANT, LEMMA4_HELD_OUT_T};
use qclab::covering::{absorption_check, absorption_radius, covering_from_centers, greedy_net, lemma4_formula};
use qclab::explorer::{pearson, relative_spread, run, ExperimentConfig, ExperimentKind};
use qclab::functionals::{estimate_c_theta, estimate_m, estimate_mkb, factor_a, sample_sphere};
use qclab::projections::jl_concentration;
use qclab::{Body64, RngStream};

struct Criterion {
    lines: Vec<String>,
    pass: bool,
}

impl Criterion {
    fn new() -> Self {
        Self { lines: Vec::new(), pass: true }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {line}", if ok { "ok" } else { "FAIL" }));
    }

    fn timed(&mut self, label: &str, limit_s: f64, start: Instant) {
        let s = start.elapsed().as_secs_f64();
        self.record(s < limit_s, format!("{label} runtime {s:.1} s (limit {limit_s} s)"));
    }
}

fn exact_identities() -> Criterion {
    let mut c = Criterion::new();

    let d10 = Body64::euclidean_ball(10).unwrap();
    let c2 = estimate_c_theta(&d10, 2.0, 100_000, RngStream::new(1001)).unwrap();
    c.record((c2 - 1.0).abs() <= 1e-9, format!("c_2(D) on 1e5 pairs = {c2:?} (tol 1e-9)"));

    let start = Instant::now();
    for n in [2usize, 10, 100] {
        let d = Body64::euclidean_ball(n).unwrap();
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + (i % 4) as f64).collect();
        let bodies = [
            Body64::lp_ball(1.0, n).unwrap(),
            Body64::lp_ball(0.5, n).unwrap(),
            Body64::ellipsoid_diag(&diag).unwrap(),
        ];
        for (i, b) in bodies.iter().enumerate() {
            let seed = 1100 + 10 * n as u64 + i as u64;
            let mkb = estimate_mkb(&d, b, 1_000_000, RngStream::new(seed)).unwrap();
            let mb = estimate_m(b, 1_000_000, RngStream::new(seed + 5000)).unwrap();
            let ratio = n as f64 / (n as f64 + 1.0);
            let sigma = (mkb.std_error.powi(2) + (ratio * mb.std_error).powi(2)).sqrt();
            let diff = mkb.value - ratio * mb.value;
            c.record(
                diff.abs() <= 3.0 * sigma,
                format!("M(D,{}) - n/(n+1) M_B = {diff:.3e} (3σ = {:.3e})", b.label(), 3.0 * sigma),
            );
        }
    }
    c.timed("M(D,B)", 60.0, start);

    let start = Instant::now();
    let t_half = absorption_radius(1.0f64, 0.5).unwrap();
    c.record((t_half - 2.0).abs() <= 1e-9, format!("t_r(p=1, r=1/2) = {t_half:?} (tol 1e-9)"));
    let d = Body64::euclidean_ball(3).unwrap();
    for p in [0.5, 2.0 / 3.0, 1.0] {
        for r in [0.25, 0.5, 0.75] {
            let seed = 1200 + (100.0 * p) as u64 + (100.0 * r) as u64;
            let lp = Body64::lp_ball(p, 3).unwrap();
            let net = greedy_net(&d.scaled(r).unwrap(), &d, r / 2.0, 20_000, RngStream::new(seed)).unwrap();
            let raw = covering_from_centers(&d, &lp, &net.centers, 50_000, RngStream::new(seed + 1)).unwrap();
            let k = lp.scaled(raw.t).unwrap();
            let cov = covering_from_centers(&d, &k, &net.centers, 50_000, RngStream::new(seed + 1)).unwrap();
            let a = absorption_check(&d, &k, r, &cov, 50_000, RngStream::new(seed + 2)).unwrap();
            c.record(
                a.holds,
                format!(
                    "absorption p={p:.4} r={r}: {} centers, max ‖y‖_K = {:.6} <= t_r = {:.6}",
                    net.centers.len(),
                    a.max_gauge,
                    a.t_r
                ),
            );
        }
    }
    c.timed("absorption grid", 300.0, start);

    let start = Instant::now();
    let mut ones = true;
    let mut below = true;
    for n in 1..=100usize {
        ones &= (factor_a::<f64>(n, n).unwrap() - 1.0).abs() <= 1e-9;
        below &= (1..n).all(|k| factor_a::<f64>(n, k).unwrap() < 1.0);
    }
    c.record(ones, "A(n,n) = 1 for n <= 100 (tol 1e-9)".into());
    c.record(below, "A(n,k) < 1 for k < n <= 100".into());
    for (i, (n, k)) in [(4usize, 2usize), (10, 5), (50, 25)].into_iter().enumerate() {
        let check = common::factor_a_mc(n, k, 10_000_000, 1300 + i as u64);
        c.record(check.pass, format!("{}: {} (3σ)", check.name, check.detail));
    }
    c.timed("factor_A", 120.0, start);
    c
}

fn calibrated_bounds() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let base = RngStream::new(0xACCE_97ED);
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    let mut ok_all = true;
    for num_points in [1usize, 10, 100] {
        let points = sample_sphere::<f64>(200, num_points, base.fork(&format!("points-{num_points}"))).unwrap();
        for k in [50usize, 100, 150] {
            for eps in [0.3, 0.5, 0.8] {
                let r = jl_concentration(&points, k, eps, 10_000, base.fork(&format!("trials-{num_points}-{k}"))).unwrap();
                let bound = r.bound_failure(JL_FAILURE_CONSTANT);
                let ok = r.empirical_failure <= bound;
                ok_all &= ok;
                cells += 1;
                worst = worst.max(r.empirical_failure / bound);
                if !ok || r.empirical_failure > 0.0 {
                    c.lines.push(format!(
                        "      k={k} ε={eps} N={num_points}: failure {} vs bound {bound:.4e}",
                        r.empirical_failure
                    ));
                }
            }
        }
    }
    c.record(
        ok_all,
        format!("JL held-out grid: {cells} cells at c = {JL_FAILURE_CONSTANT}, max failure/bound = {worst:.4}"),
    );
    c.timed("JL grid", 600.0, start);

    let start = Instant::now();
    for p in [0.5, 1.0] {
        let held = lemma4_cells(p, &LEMMA4_HELD_OUT_T, 100_000, 4242).unwrap();
        for cell in held {
            let bound = lemma4_formula(2, 2.0, cell.mean_norm, cell.t, p, 1.0, LEMMA4_CONSTANT).unwrap();
            c.record(
                cell.count as f64 <= bound,
                format!("covering B_p^2 by tD, p={p} t={}: count {} <= bound {bound:.2}", cell.t, cell.count),
            );
        }
    }
    c.timed("covering bound", 300.0, start);
    c
}

fn oracle_equivalence() -> Criterion {
    let mut c = Criterion::new();
    for check in common::oracle_checks() {
        let r = check();
        c.record(r.pass, format!("{}: {}", r.name, r.detail));
    }
    for lock in common::locks() {
        let r = common::check_lock(&lock);
        c.record(r.pass, format!("{}: {} (tol 1e-9 rel)", r.name, r.detail));
    }
    c
}

fn l1_example() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(ExperimentKind::L1Compare);
    cfg.n = vec![16, 64, 256, 1024];
    cfg.samples = 1_000_000;
    cfg.seed = 4001;
    let r = run(&cfg).unwrap();
    let scaled = r.floats("m_tilde_sqrt_n");
    let ratios = r.floats("ratio");
    let logs = r.floats("sqrt_log_n");
    let spread = relative_spread(&scaled);
    c.record(spread <= 0.15, format!("M̃·√n = {scaled:.4?}, relative spread {spread:.4} (<= 0.15)"));
    c.record(ratios.windows(2).all(|w| w[1] > w[0]), format!("M*/M̃ = {ratios:.4?} strictly increasing"));
    let corr = pearson(&ratios, &logs);
    c.record(corr >= 0.99, format!("correlation with √log n = {corr:.5} (>= 0.99)"));
    c.timed("l1", 300.0, start);
    c
}

fn section_soundness() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let lambdas = [0.25, 0.5, 0.75];
    for body in ["lp(p=2,n=200)", "lp(p=1,n=200)", "lp(p=0.5,n=200)"] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::SectionDiameter);
        cfg.body = Some(body.into());
        cfg.lambda = lambdas.to_vec();
        cfg.trials = 50;
        cfg.seed = 5001;
        let r = run(&cfg).unwrap();
        let g = r.floats("g_min");
        let implied = r.floats("implied_a_p");
        let p = r.floats("p");
        let lam = r.floats("lambda");
        if body.starts_with("lp(p=2") {
            let n = 200.0;
            let err = (0..implied.len())
                .map(|i| (implied[i] - (1.0 - lam[i]).powf(0.5 + 1.0 / p[i]) * (n + 1.0) / n).abs())
                .fold(0.0, f64::max);
            c.record(err <= 1e-6, format!("{body}: max |a_p - (1-λ)^(1/2+1/p)(n+1)/n| = {err:.2e} (tol 1e-6)"));
        } else {
            let finite = implied.iter().all(|v| v.is_finite() && *v > 0.0);
            let max = implied.iter().copied().fold(0.0, f64::max);
            c.record(finite, format!("{body}: implied a_p finite and positive, max {max:.6}"));
        }
        // Rows are trial-major with λ ascending.
        let monotone = g.chunks(lambdas.len()).all(|t| t.windows(2).all(|w| w[1] <= w[0]));
        c.record(monotone, format!("{body}: g_min nonincreasing in λ in all 50 trials"));
    }
    c.timed("section", 900.0, start);
    c
}

fn determinism() -> Criterion {
    let mut c = Criterion::new();
    let invocations: [&[&str]; 8] = [
        &["estimate", "--body", "ellipsoid(diag=1,2,3)", "--functional", "Mstar", "--samples", "20000", "--seed", "7"],
        &["cover", "--outer", "lp(p=0.5,n=2)", "--inner", "ellipsoid(diag=1,1)", "--t", "0.3,0.5", "--cloud", "20000", "--seed", "7"],
        &["jl", "--n", "50", "--k", "10,25", "--epsilon", "0.3,0.5", "--trials", "2000", "--seed", "7"],
        &["section", "--body", "lp(p=1,n=100)", "--lambda", "0.5", "--trials", "10", "--seed", "7"],
        &["project", "--body", "lp(p=0.5,n=5)", "--lambda", "0.4", "--trials", "3", "--cloud", "20000", "--seed", "7"],
        &["global", "--body", "lp(p=0.5,n=3)", "--trials", "3", "--cloud", "10000", "--directions", "300", "--seed", "7"],
        &["l1", "--n", "16,64", "--samples", "20000", "--seed", "7"],
        &["fact", "--body", "lp(p=0.5,n=4)", "--cloud", "5000", "--fact-c", "0.2", "--seed", "7"],
    ];
    for args in invocations {
        let outputs: Vec<_> = [None, Some("1"), Some("2"), None]
            .into_iter()
            .map(|threads| {
                let mut cmd = Command::new(env!("CARGO_BIN_EXE_qclab"));
                cmd.args(args);
                match threads {
                    Some(t) => cmd.env("QCLAB_THREADS", t),
                    None => cmd.env_remove("QCLAB_THREADS"),
                };
                cmd.output().expect("binary runs")
            })
            .collect();
        let ok = outputs.iter().all(|o| o.status.success() && o.stdout == outputs[0].stdout && !o.stdout.is_empty());
        c.record(ok, format!("{}: identical CSV over 4 runs (default, 1, 2 workers, repeat)", args[0]));
    }
    c
}

type Runner = (&'static str, fn() -> Criterion);

fn main() {
    let criteria: [Runner; 6] = [
        ("exact identities", exact_identities),
        ("calibrated bounds on held-out configurations", calibrated_bounds),
        ("oracle equivalence", oracle_equivalence),
        ("l1 ball mean norm against mean width", l1_example),
        ("section diameter soundness", section_soundness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let c = f();
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {}: {name} ({:.1} s)", i + 1, start.elapsed().as_secs_f64());
        for line in &c.lines {
            println!("{line}");
        }
        failed += usize::from(!c.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
