use super::*;
use crate::functionals::factor_a;

fn cfg(kind: ExperimentKind, body: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.body = Some(body.into());
    c
}

#[test]
fn section_of_the_ball_is_exact() {
    let n = 20;
    let mut c = cfg(ExperimentKind::SectionDiameter, "lp(p=2,n=20)");
    c.lambda = vec![0.25, 0.5];
    c.trials = 3;
    c.directions = 200;
    let r = run(&c).unwrap();
    let g = r.floats("g_min");
    assert_eq!(g.len(), 6);
    assert!(g.iter().all(|v| (v - 1.0).abs() < 1e-12));
    for (row, implied) in r.floats("implied_a_p").iter().enumerate() {
        let lambda = r.value(row, "lambda").unwrap().as_f64().unwrap();
        let expected = (1.0 - lambda).powf(1.5) * (n as f64 + 1.0) / n as f64;
        assert!((implied - expected).abs() < 1e-12);
    }
}

#[test]
fn section_minimum_decreases_with_lambda() {
    let body = crate::bodies::parse_body::<f64>("lp(p=1,n=30)").unwrap();
    let minima = section_minima(&body, &[0.8, 0.2, 0.5], 4, 300, crate::rng::RngStream::new(5)).unwrap();
    for row in minima {
        assert!(row[1] >= row[2] && row[2] >= row[0], "{row:?}");
    }
    assert_eq!(section_dim(200, 0.5), 100);
    assert_eq!(section_dim(10, 0.3), 3);
}

#[test]
fn projected_ball_contains_the_ball() {
    let mut c = cfg(ExperimentKind::ProjectionContainment, "lp(p=2,n=4)");
    c.lambda = vec![0.5];
    c.trials = 2;
    c.cloud = 20_000;
    c.directions = 200;
    c.cone = 0.1;
    let r = run(&c).unwrap();
    for v in r.floats("c_meas") {
        assert!((1.0..1.1).contains(&v), "{v}");
    }
}

#[test]
fn projection_constant_is_scale_free() {
    let mut a = cfg(ExperimentKind::ProjectionContainment, "lp(p=0.5,n=4)");
    a.lambda = vec![0.5];
    a.trials = 2;
    a.cloud = 5_000;
    a.directions = 100;
    a.samples = 10_000;
    let mut b = a.clone();
    b.body = Some("scale(lp(p=0.5,n=4),2)".into());
    let (ra, rb) = (run(&a).unwrap(), run(&b).unwrap());
    for (x, y) in ra.floats("implied_a_p").iter().zip(rb.floats("implied_a_p")) {
        assert!((x - y).abs() < 1e-9 * x, "{x} vs {y}");
    }
}

#[test]
fn ball_plus_rotated_ball_is_twice_the_ball() {
    for transpose in [false, true] {
        let mut c = cfg(ExperimentKind::GlobalForm, "lp(p=2,n=3)");
        c.trials = 2;
        c.cloud = 5_000;
        c.directions = 100;
        c.samples = 10_000;
        c.transpose_u = transpose;
        let r = run(&c).unwrap();
        for v in r.floats("c_meas") {
            assert!((0.5..0.52).contains(&v), "{v}");
        }
    }
}

#[test]
fn fact_check_for_the_ball() {
    let mut c = cfg(ExperimentKind::FactCheck, "lp(p=2,n=4)");
    c.cloud = 20_000;
    c.directions = 100;
    c.cone = 0.2;
    let r = run(&c).unwrap();
    assert_eq!(r.floats("covering_number"), vec![1.0; 3]);
    assert_eq!(r.floats("k"), vec![1.0, 2.0, 3.0]);
    for row in 0..3 {
        assert_eq!(r.value(row, "holds").unwrap().as_bool(), Some(true));
    }
}

#[test]
fn fact_factor_limits() {
    assert!((fact_factor(1.0, 0.0) - 0.5).abs() < 1e-15);
    assert!((fact_factor(0.5, 0.25) - 0.015625).abs() < 1e-15);
    assert!(fact_factor(0.5, 1.0 - 1e-12) < 1e-20);
    assert!(admissible_ranks(10, 0.6).is_empty());
    assert_eq!(admissible_ranks(10, 0.1), (1..=6).collect::<Vec<_>>());
}

#[test]
fn l1_plane_matches_quadrature() {
    let mut c = ExperimentConfig::new(ExperimentKind::L1Compare);
    c.n = vec![2];
    let r = run(&c).unwrap();
    let m_star = 2.0 * 2f64.sqrt() / std::f64::consts::PI;
    let se = r.floats("m_star_se")[0];
    assert!((r.floats("m_star")[0] - m_star).abs() < 4.0 * se);
    // Mean norm over the triangle x, y ≥ 0, x + y ≤ 1, by the midpoint rule.
    let g = 2048;
    let h = 1.0 / g as f64;
    let (mut sum, mut count) = (0.0, 0usize);
    for i in 0..g {
        for j in 0..g {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            if x + y <= 1.0 {
                sum += x.hypot(y);
                count += 1;
            }
        }
    }
    let m_tilde = sum / count as f64;
    let se = r.floats("m_tilde_se")[0];
    assert!((r.floats("m_tilde")[0] - m_tilde).abs() < 4.0 * se + 1e-4);
}

#[test]
fn estimate_and_cover_runners() {
    let mut c = cfg(ExperimentKind::Estimate, "lp(p=2,n=5)");
    c.functional = Some(Functional::M);
    c.samples = 1_000;
    let r = run(&c).unwrap();
    assert_eq!(r.value(0, "value"), Some(&Value::Float(1.0)));
    assert_eq!(r.value(0, "std_error"), Some(&Value::Float(0.0)));

    let mut a = cfg(ExperimentKind::Estimate, "lp(p=2,n=10)");
    a.functional = Some(Functional::A);
    a.k = vec![5];
    let r = run(&a).unwrap();
    assert_eq!(r.floats("value"), vec![factor_a(10, 5).unwrap()]);

    let mut cov = ExperimentConfig::new(ExperimentKind::Cover);
    cov.outer = Some("lp(p=2,n=2)".into());
    cov.inner = Some("lp(p=2,n=2)".into());
    cov.t = vec![1.0, 0.5];
    cov.cloud = 2_000;
    let r = run(&cov).unwrap();
    assert_eq!(r.floats("upper_count")[0], 1.0);
    let counts = r.floats("upper_count");
    let lower = r.floats("volume_lower");
    assert!(counts.iter().zip(&lower).all(|(u, l)| u >= l));
}

#[test]
fn jl_runner_rows() {
    let mut c = ExperimentConfig::new(ExperimentKind::Jl);
    c.n = vec![30];
    c.k = vec![30, 10];
    c.epsilon = vec![0.3];
    c.trials = 200;
    let r = run(&c).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.floats("empirical_failure")[0], 0.0);
}
