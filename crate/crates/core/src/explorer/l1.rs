use crate::bodies::Body;
use crate::error::Result;
use crate::explorer::config::ExperimentConfig;
use crate::explorer::report::ExperimentReport;
use crate::functionals::{estimate_m_star, estimate_mean_norm};
use crate::rng::RngStream;

/// `(max − min) / mean`.
pub fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Mean norm and mean support function of the ℓ₁ ball across dimensions.
pub fn run_l1_compare(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(
        "l1_compare",
        &["n", "m_tilde", "m_tilde_se", "m_star", "m_star_se", "m_tilde_sqrt_n", "ratio", "sqrt_log_n"],
    );
    let stream = RngStream::new(cfg.seed);
    let (mut scaled, mut ratios, mut logs) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &cfg.n {
        let body = Body::<f64>::lp_ball(1.0, n)?;
        let mt = estimate_mean_norm(&body, cfg.samples, stream.fork(&format!("mean-norm-{n}")))?;
        let ms = estimate_m_star(&body, cfg.samples, stream.fork(&format!("m-star-{n}")), cfg.samples)?;
        let s = mt.value * (n as f64).sqrt();
        let ratio = ms.value / mt.value;
        let sl = (n as f64).ln().sqrt();
        scaled.push(s);
        ratios.push(ratio);
        logs.push(sl);
        report.push(vec![
            n.into(),
            mt.value.into(),
            mt.std_error.into(),
            ms.value.into(),
            ms.std_error.into(),
            s.into(),
            ratio.into(),
            sl.into(),
        ]);
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let corr = if ratios.len() > 1 { pearson(&ratios, &logs) } else { f64::NAN };
    report.summary = format!(
        "l1_compare: spread of M̃·√n {:.4}, M*/M̃ increasing {increasing}, correlation with √log n {corr:.5}",
        relative_spread(&scaled)
    );
    Ok(report)
}
