use rand::Rng;

use crate::bodies::Body;
use crate::calibration::JL_FAILURE_CONSTANT;
use crate::error::{invalid, Error, Result};
use crate::explorer::config::ExperimentConfig;
use crate::explorer::report::{ExperimentReport, Value};
use crate::functionals::{estimate_m_star, estimate_mean_norm};
use crate::linalg::haar_frame;
use crate::rng::{map_trials, RngStream};

const POLISH_STARTS: usize = 10;
const POLISH_SWEEPS: usize = 60;
const POLISH_MIN_STEP: f64 = 1e-6;

/// `[λn]`, the dimension of the random subspace.
pub fn section_dim(n: usize, lambda: f64) -> usize {
    (lambda * n as f64 + 1e-12).floor() as usize
}

/// Minimum of `‖x‖_K / |x|` over the span of `frame`, from `directions` random
/// directions plus `seeds`, each of the best candidates refined by coordinate
/// search with shrinking steps. Returns the minimum and its coefficient vector.
fn minimize_on_span<R: Rng + ?Sized>(
    body: &Body<f64>,
    frame: &[Vec<f64>],
    directions: usize,
    seeds: &[Vec<f64>],
    rng: &mut R,
) -> (f64, Vec<f64>) {
    let m = frame.len();
    let n = body.dim();
    let combine = |a: &[f64], x: &mut [f64]| {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (w, &aj) in frame.iter().zip(a) {
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi += aj * wi;
            }
        }
    };
    let objective = |a: &[f64], x: &mut [f64]| {
        combine(a, x);
        body.gauge_unchecked(x) / crate::linalg::norm(a)
    };

    let mut x = vec![0.0; n];
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::with_capacity(POLISH_STARTS + 1);
    let consider = |val: f64, a: Vec<f64>, pool: &mut Vec<(f64, Vec<f64>)>| {
        if pool.len() < POLISH_STARTS {
            pool.push((val, a));
        } else if let Some(worst) = pool.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).map(|w| w.0) {
            if val < pool[worst].0 {
                pool[worst] = (val, a);
            }
        }
    };
    let mut a = vec![0.0; m];
    for _ in 0..directions {
        crate::functionals::gaussian_into(rng, &mut a);
        let val = objective(&a, &mut x);
        if val.is_finite() {
            consider(val, a.clone(), &mut pool);
        }
    }
    let mut starts: Vec<(f64, Vec<f64>)> = seeds.iter().map(|s| (objective(s, &mut x), s.clone())).collect();
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.extend(pool);

    let mut best = (f64::INFINITY, vec![0.0; m]);
    let mut trial = vec![0.0; n];
    for (_, start) in starts {
        let scale = crate::linalg::norm(&start);
        let mut a: Vec<f64> = start.iter().map(|v| v / scale).collect();
        let mut val = objective(&a, &mut x);
        let mut step = 0.25;
        let mut sweeps = 0;
        while step > POLISH_MIN_STEP && sweeps < POLISH_SWEEPS {
            sweeps += 1;
            let mut improved = false;
            for j in 0..m {
                for s in [step, -step] {
                    for ((t, xi), wi) in trial.iter_mut().zip(&x).zip(&frame[j]) {
                        *t = xi + s * wi;
                    }
                    let len = (1.0 + 2.0 * s * a[j] + s * s).sqrt();
                    let cand = body.gauge_unchecked(&trial) / len;
                    if cand < val {
                        a[j] += s;
                        a.iter_mut().for_each(|v| *v /= len);
                        x.iter_mut().zip(&trial).for_each(|(xi, t)| *xi = t / len);
                        val = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step /= 2.0;
                val = objective(&a, &mut x);
            }
        }
        let val = objective(&a, &mut x);
        if val < best.0 {
            best = (val, a);
        }
    }
    best
}

/// Per trial, `g_min` for each `λ` (in the given order). Subspaces of one trial
/// are nested, built from one gaussian frame, and each larger subspace starts its
/// search from the previous minimizer, so `g_min` is nonincreasing in `λ`. The
/// carried minimizer stays feasible, so its value is kept when re-evaluation in
/// the larger frame only differs by rounding.
pub fn section_minima(
    body: &Body<f64>,
    lambdas: &[f64],
    trials: usize,
    directions: usize,
    stream: RngStream,
) -> Result<Vec<Vec<f64>>> {
    let n = body.dim();
    let dims: Vec<usize> = lambdas.iter().map(|&l| section_dim(n, l)).collect();
    if let Some(i) = dims.iter().position(|&m| m == 0) {
        return Err(invalid(format!("[λn] = 0 for λ = {} and n = {n}", lambdas[i])));
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(invalid("lambda must lie in (0, 1)"));
    }
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let m_max = *dims.iter().max().expect("nonempty lambda list");
    Ok(map_trials(trials, stream, |_, rng| {
        let frame: Vec<Vec<f64>> = haar_frame(n, m_max, rng);
        let mut out = vec![0.0; lambdas.len()];
        let mut carried: Option<Vec<f64>> = None;
        let mut prev = f64::INFINITY;
        for &i in &order {
            let m = dims[i];
            let seeds: Vec<Vec<f64>> = carried
                .iter()
                .map(|c| {
                    let mut s = c.clone();
                    s.resize(m, 0.0);
                    s
                })
                .collect();
            let (val, arg) = minimize_on_span(body, &frame[..m], directions, &seeds, rng);
            prev = prev.min(val);
            out[i] = prev;
            carried = Some(arg);
        }
        out
    }))
}

fn body_p(body: &Body<f64>) -> Result<f64> {
    body.class()
        .p()
        .map(|p| p.min(1.0))
        .ok_or_else(|| Error::PreconditionViolated(format!("{} is not declared p-convex", body.label())))
}

pub fn run_section_diameter(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let body = cfg.body64()?;
    let n = body.dim();
    let p = body_p(&body)?;
    let stream = RngStream::new(cfg.seed);
    let mean_norm = match body.mean_norm_closed_form() {
        Some(v) => v,
        None => estimate_mean_norm(&body, cfg.samples, stream.fork("mean-norm"))?.value,
    };
    let m_star = if body.class().is_convex() {
        Some(estimate_m_star(&body, cfg.samples, stream.fork("m-star"), cfg.samples)?.value)
    } else {
        None
    };
    let minima = section_minima(&body, &cfg.lambda, cfg.trials, cfg.directions, stream.fork("trials"))?;

    let mut report = ExperimentReport::new(
        "section_diameter",
        &[
            "trial",
            "lambda",
            "n",
            "dim_e",
            "g_min",
            "p",
            "mean_norm",
            "implied_a_p",
            "m_star",
            "implied_c_sqrt",
            "implied_c_linear",
            "n_large_enough",
        ],
    );
    let mut worst = vec![0.0f64; cfg.lambda.len()];
    for (trial, row) in minima.iter().enumerate() {
        for (i, (&lambda, &g)) in cfg.lambda.iter().zip(row).enumerate() {
            let implied = (1.0 - lambda).powf(0.5 + 1.0 / p) / (g * mean_norm);
            worst[i] = worst[i].max(implied);
            let c_sqrt = m_star.map(|ms| g * ms / (1.0 - lambda).sqrt());
            let c_lin = m_star.map(|ms| g * ms / (1.0 - lambda));
            report.push(vec![
                trial.into(),
                lambda.into(),
                n.into(),
                section_dim(n, lambda).into(),
                g.into(),
                p.into(),
                mean_norm.into(),
                implied.into(),
                m_star.into(),
                c_sqrt.into(),
                c_lin.into(),
                Value::Bool(n as f64 >= JL_FAILURE_CONSTANT / (1.0 - lambda).powi(2)),
            ]);
        }
    }
    let parts: Vec<String> = cfg.lambda.iter().zip(&worst).map(|(l, w)| format!("λ={l}: {w:.6}")).collect();
    report.summary = format!(
        "section_diameter {} n={n} trials={}: max implied a_p {}",
        body.label(),
        cfg.trials,
        parts.join(", ")
    );
    Ok(report)
}
