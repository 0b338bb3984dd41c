use crate::calibration::LEMMA4_CONSTANT;
use crate::covering::{lemma2_bound, lemma4_bound, write_points, CoverOptions, CoverSession, LEMMA2_CONSTANT};
use crate::error::{Error, Result};
use crate::explorer::config::{ExperimentConfig, Functional};
use crate::explorer::report::{ExperimentReport, Value};
use crate::functionals::{
    estimate_c_theta, estimate_m, estimate_m_star, estimate_mean_norm, estimate_mkb, factor_a, sample_sphere,
};
use crate::projections::jl_concentration;
use crate::rng::RngStream;

pub fn run_estimate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let body = cfg.body64()?;
    let f = cfg.functional.ok_or_else(|| Error::InvalidParameter("--functional is required".into()))?;
    let stream = RngStream::new(cfg.seed);
    let (value, std_error, samples): (f64, Value, usize) = match f {
        Functional::M => {
            let e = estimate_m(&body, cfg.samples, stream)?;
            (e.value, e.std_error.into(), e.samples as usize)
        }
        Functional::MStar => {
            let e = estimate_m_star(&body, cfg.samples, stream, cfg.samples)?;
            (e.value, e.std_error.into(), e.samples as usize)
        }
        Functional::MTilde => {
            let e = estimate_mean_norm(&body, cfg.samples, stream)?;
            (e.value, e.std_error.into(), e.samples as usize)
        }
        Functional::Mkb => {
            let inner = cfg.inner64()?;
            let e = estimate_mkb(&body, &inner, cfg.samples, stream)?;
            (e.value, e.std_error.into(), e.samples as usize)
        }
        Functional::A => (factor_a(body.dim(), cfg.k[0])?, 0.0.into(), 0),
        Functional::CTheta => {
            let theta = cfg.theta.expect("validated");
            (estimate_c_theta(&body, theta, cfg.samples, stream)?, Value::Empty, cfg.samples)
        }
    };
    let mut report =
        ExperimentReport::new("estimate", &["functional", "body", "value", "std_error", "samples", "seed"]);
    report.push(vec![f.name().into(), body.label().into(), value.into(), std_error, samples.into(), cfg.seed.into()]);
    report.summary = format!("estimate {} of {}: {value:?}", f.name(), body.label());
    Ok(report)
}

pub fn run_jl(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n[0];
    let stream = RngStream::new(cfg.seed);
    let points = sample_sphere::<f64>(n, cfg.points, stream.fork("points"))?;
    let mut report = ExperimentReport::new(
        "jl",
        &[
            "n",
            "k",
            "epsilon",
            "N",
            "trials",
            "empirical_failure",
            "seed",
            "in_regime",
            "bound_failure",
            "implied_c",
        ],
    );
    let head = (std::f64::consts::PI / 2.0).sqrt();
    let mut worst: f64 = 0.0;
    for &k in &cfg.k {
        for &eps in &cfg.epsilon {
            let r = jl_concentration(&points, k, eps, cfg.trials, stream.fork("trials"))?;
            let f = r.empirical_failure;
            let implied = (f > 0.0).then(|| eps * eps * k as f64 / (head / f).ln());
            if let Some(c) = implied {
                worst = worst.max(c);
            }
            let bound = r.bound_failure(crate::calibration::JL_FAILURE_CONSTANT);
            let mut row: Vec<Value> = r.csv_fields().iter().map(|c| Value::parse_cell(c)).collect();
            row.extend([r.in_regime.into(), bound.into(), implied.into()]);
            report.push(row);
        }
    }
    report.summary = format!("jl n={n}: {} cells, largest implied c {worst:.4}", report.rows.len());
    Ok(report)
}

pub fn run_cover(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let outer = cfg.outer64()?;
    let inner = cfg.inner64()?;
    let stream = RngStream::new(cfg.seed);
    let mut session = CoverSession::new(&outer, &inner, cfg.cloud, stream, CoverOptions::default())?;
    let m_kb = {
        let cloud = session.cloud();
        cloud.iter().map(|x| inner.gauge_unchecked(x)).sum::<f64>() / cloud.len() as f64
    };
    let m_inner = if outer.is_euclidean_ball() && inner.class().sum_constant().is_some() {
        Some(estimate_m(&inner, 100_000, stream.fork("M-inner"))?.value)
    } else {
        None
    };
    let theta = outer.class().p().map(|p| p.min(1.0));
    let mut report = ExperimentReport::new(
        "cover",
        &[
            "t",
            "upper_count",
            "net_size",
            "radius",
            "volume_lower",
            "cloud_size",
            "seed",
            "m_kb",
            "lemma2_bound",
            "lemma4_bound",
        ],
    );
    let mut counts = Vec::new();
    for &t in &cfg.t {
        let r = session.cover(t)?;
        let l2 = m_inner.map(|m| lemma2_bound(&inner, m, t, LEMMA2_CONSTANT)).transpose()?;
        let l4 = match (theta, inner.class().sum_constant()) {
            (Some(th), Some(_)) => Some(lemma4_bound(&outer, &inner, m_kb, t, th, 1.0, LEMMA4_CONSTANT)?),
            _ => None,
        };
        let mut row: Vec<Value> = r.csv_fields().iter().map(|c| Value::parse_cell(c)).collect();
        row.extend([m_kb.into(), l2.into(), l4.into()]);
        report.push(row);
        counts.push(r.upper_count);
        if let Some(path) = &cfg.centers_out {
            write_points(path, &r.centers)?;
        }
    }
    report.summary = format!("cover {} by {}: counts {:?}", outer.label(), inner.label(), counts);
    Ok(report)
}
