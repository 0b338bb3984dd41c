use rand::seq::SliceRandom;

use crate::bodies::Body;
use crate::covering::{entropy_number_in, CoverOptions, CoverSession};
use crate::error::{Error, Result};
use crate::explorer::config::ExperimentConfig;
use crate::explorer::report::{ExperimentReport, Value};
use crate::functionals::{estimate_m, sample_body_uniform, sample_sphere};
use crate::linalg::{dot, haar_frame, norm};
use crate::projections::haar_orthogonal;
use crate::rng::{map_trials, RngStream};

/// Largest dimension accepted by the point-cloud containment experiments.
pub const MAX_CLOUD_DIM: usize = 8;
/// Points per side taken in the direction-wise Minkowski-sum search.
const SUM_TOP: usize = 64;
/// Cap on the boundary points scanned per direction in the Minkowski-sum search.
const SUM_POOL: usize = 25_000;
/// Boundary points per side used as anchors for exact ray solves.
const RAY_ANCHORS: usize = 16;
const RAY_GRID: usize = 48;
const RAY_BISECTIONS: usize = 40;

/// Star-shaped point set stored as unit directions and lengths, indexed per
/// coordinate so that cone queries only visit a thin slab of directions.
pub struct RadialCloud {
    dirs: Vec<Vec<f64>>,
    lens: Vec<f64>,
    slabs: Vec<Vec<(f64, u32)>>,
}

impl RadialCloud {
    pub fn new(points: impl IntoIterator<Item = Vec<f64>>) -> Self {
        let (lens, dirs): (Vec<f64>, Vec<Vec<f64>>) = points
            .into_iter()
            .filter_map(|p| {
                let r = norm(&p);
                (r > 0.0).then(|| (r, p.iter().map(|v| v / r).collect()))
            })
            .unzip();
        let dim = dirs.first().map_or(0, Vec::len);
        let slabs = (0..dim)
            .map(|i| {
                let mut s: Vec<(f64, u32)> = dirs.iter().enumerate().map(|(j, d)| (d[i], j as u32)).collect();
                s.sort_by(|a, b| a.0.total_cmp(&b.0));
                s
            })
            .collect();
        Self { dirs, lens, slabs }
    }

    pub fn len(&self) -> usize {
        self.lens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lens.is_empty()
    }

    /// Length of the longest point within angle `delta` of the unit vector `u`.
    pub fn radial_max(&self, u: &[f64], delta: f64) -> Option<f64> {
        self.radial_max_above(u, delta, 0.0)
    }

    /// As `radial_max`, but only points longer than `floor` count.
    pub fn radial_max_above(&self, u: &[f64], delta: f64, floor: f64) -> Option<f64> {
        let axis = (0..u.len()).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))?;
        let slab = self.slabs.get(axis)?;
        // Unit vectors within angle δ differ by at most 2·sin(δ/2) in every coordinate.
        let w = 2.0 * (delta / 2.0).sin() + 1e-12;
        let lo = slab.partition_point(|e| e.0 < u[axis] - w);
        let hi = slab.partition_point(|e| e.0 <= u[axis] + w);
        let c = delta.cos();
        let mut best: Option<f64> = None;
        for &(_, j) in &slab[lo..hi] {
            let r = self.lens[j as usize];
            if r > floor && best.is_none_or(|b| r > b) && dot(&self.dirs[j as usize], u) >= c {
                best = Some(r);
            }
        }
        best
    }
}

/// Unit directions: random sphere points plus the signed coordinate axes.
pub fn probe_directions(k: usize, count: usize, stream: RngStream) -> Result<Vec<Vec<f64>>> {
    let mut dirs = sample_sphere::<f64>(k, count, stream)?;
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; k];
            e[i] = s;
            dirs.push(e);
        }
    }
    Ok(dirs)
}

/// Smallest `C` with the unit ball inside `C·S`, where `S` is approximated radially
/// by the cloud: `max_u 1/ρ(u)`.
pub fn containment_factor(cloud: &RadialCloud, directions: &[Vec<f64>], delta: f64) -> Result<f64> {
    let mut c = 0.0f64;
    for u in directions {
        let r = cloud.radial_max(u, delta).ok_or(Error::EmptyCone)?;
        c = c.max(1.0 / r);
    }
    Ok(c)
}

fn require_pconvex(body: &Body<f64>) -> Result<f64> {
    if body.dim() > MAX_CLOUD_DIM {
        return Err(Error::PreconditionViolated(format!(
            "point-cloud containment supports n <= {MAX_CLOUD_DIM}, got {}",
            body.dim()
        )));
    }
    body.class()
        .p()
        .map(|p| p.min(1.0))
        .ok_or_else(|| Error::PreconditionViolated(format!("{} is not declared p-convex", body.label())))
}

fn project(frame: &[Vec<f64>], points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points.iter().map(|x| frame.iter().map(|b| dot(b, x)).collect()).collect()
}

/// `C_meas(PK)` for the projection onto `span(frame)`, on the full cloud and on its
/// first quarter.
fn projected_factor(frame: &[Vec<f64>], cloud: &[Vec<f64>], dirs: &[Vec<f64>], delta: f64) -> Result<(f64, f64)> {
    let projected = project(frame, cloud);
    let quarter = projected.len().div_ceil(4);
    let full = containment_factor(&RadialCloud::new(projected.iter().cloned()), dirs, delta)?;
    let part = containment_factor(&RadialCloud::new(projected.into_iter().take(quarter)), dirs, delta)?;
    Ok((full, part))
}

pub fn run_projection_containment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let body = cfg.body64()?;
    let p = require_pconvex(&body)?;
    let n = body.dim();
    let stream = RngStream::new(cfg.seed);
    let ks: Vec<usize> = cfg.lambda.iter().map(|&l| super::section::section_dim(n, l)).collect();
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("[λn] = 0 for some λ".into()));
    }
    let m_k = estimate_m(&body, cfg.samples, stream.fork("M"))?.value;
    let cloud = sample_body_uniform(&body, cfg.cloud, stream.fork("cloud"))?;
    let dir_sets: Vec<Vec<Vec<f64>>> = ks
        .iter()
        .map(|&k| probe_directions(k, cfg.directions, stream.fork(&format!("directions-{k}"))))
        .collect::<Result<_>>()?;

    let results = map_trials(cfg.trials, stream.fork("trials"), |_, rng| {
        ks.iter()
            .zip(&dir_sets)
            .map(|(&k, dirs)| {
                let frame: Vec<Vec<f64>> = haar_frame(n, k, rng);
                projected_factor(&frame, &cloud, dirs, cfg.cone)
            })
            .collect::<Result<Vec<_>>>()
    });

    let mut report = ExperimentReport::new(
        "projection_containment",
        &["trial", "lambda", "n", "k", "c_meas", "c_meas_quarter", "relative_change", "m_k", "p", "implied_a_p"],
    );
    let mut worst = 0.0f64;
    for (trial, per_lambda) in results.into_iter().enumerate() {
        for ((&lambda, &k), (c, cq)) in cfg.lambda.iter().zip(&ks).zip(per_lambda?) {
            let implied = c * (1.0 - lambda).powf(1.0 + 1.0 / p) / m_k;
            worst = worst.max(implied);
            report.push(vec![
                trial.into(),
                lambda.into(),
                n.into(),
                k.into(),
                c.into(),
                cq.into(),
                ((cq - c).abs() / c).into(),
                m_k.into(),
                p.into(),
                implied.into(),
            ]);
        }
    }
    report.summary = format!(
        "projection_containment {} trials={}: max implied A_p {worst:.6}",
        body.label(),
        cfg.trials
    );
    Ok(report)
}

/// Largest `r ∈ [0, r_max]` on a grid, refined by bisection, with `gauge(r·u − a) ≤ 1`;
/// then `r·u = a + (r·u − a)` splits along the ray exactly. Zero if no grid point fits.
fn ray_extent(u: &[f64], a: &[f64], r_max: f64, gauge: impl Fn(&[f64]) -> f64) -> f64 {
    let mut z = vec![0.0; u.len()];
    let mut fits = |r: f64| {
        for ((zi, ui), ai) in z.iter_mut().zip(u).zip(a) {
            *zi = r * ui - ai;
        }
        gauge(&z) <= 1.0
    };
    let step = r_max / RAY_GRID as f64;
    let Some(i) = (0..=RAY_GRID).rev().find(|&i| fits(i as f64 * step)) else { return 0.0 };
    let (mut lo, mut hi) = (i as f64 * step, (i as f64 + 1.0) * step);
    if i == RAY_GRID {
        return lo;
    }
    for _ in 0..RAY_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `C` with `D ⊂ C·(K + UK)` for one rotation `u_rows`, approximated on the cloud
/// of `K`; also returns the value from the first quarter of the cloud. Per direction
/// the radius combines in-cone Minkowski sums with exact ray solves anchored at the
/// boundary points furthest along the direction.
fn global_factor(
    body: &Body<f64>,
    u_rows: &[Vec<f64>],
    cloud: &[Vec<f64>],
    dirs: &[Vec<f64>],
    delta: f64,
    rng: &mut impl rand::Rng,
) -> Result<(f64, f64)> {
    let rotate = |x: &[f64]| -> Vec<f64> { u_rows.iter().map(|r| dot(r, x)).collect() };
    let n = u_rows.len();
    let gauge_k = |z: &[f64]| body.gauge_unchecked(z);
    let gauge_uk = |z: &[f64]| {
        let mut w = [0.0; MAX_CLOUD_DIM];
        let w = &mut w[..n];
        for (row, zi) in u_rows.iter().zip(z) {
            for (wj, rj) in w.iter_mut().zip(row) {
                *wj += zi * rj;
            }
        }
        body.gauge_unchecked(w)
    };
    let boundary: Vec<Vec<f64>> = cloud
        .iter()
        .filter_map(|x| {
            let g = body.gauge_unchecked(x);
            (g > 0.0).then(|| x.iter().map(|v| v / g).collect())
        })
        .collect();
    let rotated_boundary: Vec<Vec<f64>> = boundary.iter().map(|x| rotate(x)).collect();
    let mut perm: Vec<usize> = (0..cloud.len()).collect();
    perm.shuffle(rng);

    let factor = |size: usize| -> Result<f64> {
        let pool = size.min(boundary.len());
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(3 * pool);
        pts.extend(boundary[..pool].iter().cloned());
        pts.extend(rotated_boundary[..pool].iter().cloned());
        let partners = perm.iter().copied().filter(|&j| j < size);
        for (x, j) in cloud[..size].iter().zip(partners) {
            let uy = rotate(&cloud[j]);
            pts.push(x.iter().zip(&uy).map(|(a, b)| a + b).collect());
        }
        let general = RadialCloud::new(pts);
        let scan = pool.min(SUM_POOL);
        let r_max = 2.0 * boundary[..pool].iter().map(|x| norm(x)).fold(0.0, f64::max) * 1.01;
        let cos_delta = delta.cos();
        let mut c = 0.0f64;
        for u in dirs {
            let top = |set: &[Vec<f64>]| -> Vec<usize> {
                let mut idx: Vec<(f64, usize)> = set[..scan].iter().enumerate().map(|(i, x)| (dot(x, u), i)).collect();
                let keep = SUM_TOP.min(idx.len());
                idx.select_nth_unstable_by(keep - 1, |a, b| b.0.total_cmp(&a.0));
                idx.truncate(keep);
                idx.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                idx.iter().map(|x| x.1).collect()
            };
            let (ta, tb) = (top(&boundary), top(&rotated_boundary));
            let origin = [0.0; MAX_CLOUD_DIM];
            let origin = &origin[..n];
            let mut rho = ray_extent(u, origin, r_max, gauge_k).max(ray_extent(u, origin, r_max, gauge_uk));
            for &i in ta.iter().take(RAY_ANCHORS) {
                rho = rho.max(ray_extent(u, &boundary[i], r_max, gauge_uk));
            }
            for &j in tb.iter().take(RAY_ANCHORS) {
                rho = rho.max(ray_extent(u, &rotated_boundary[j], r_max, gauge_k));
            }
            if let Some(r) = general.radial_max_above(u, delta, rho) {
                rho = r;
            }
            let mut sum = [0.0; MAX_CLOUD_DIM];
            let sum = &mut sum[..n];
            for &i in &ta {
                for &j in &tb {
                    for ((sk, a), b) in sum.iter_mut().zip(&boundary[i]).zip(&rotated_boundary[j]) {
                        *sk = a + b;
                    }
                    let r = norm(sum);
                    if r > rho && dot(sum, u) >= cos_delta * r {
                        rho = r;
                    }
                }
            }
            if rho <= 0.0 {
                return Err(Error::EmptyCone);
            }
            c = c.max(1.0 / rho);
        }
        Ok(c)
    };
    Ok((factor(cloud.len())?, factor(cloud.len().div_ceil(4))?))
}

pub fn run_global_form(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let body = cfg.body64()?;
    let p = require_pconvex(&body)?;
    let n = body.dim();
    let stream = RngStream::new(cfg.seed);
    let m_k = estimate_m(&body, cfg.samples, stream.fork("M"))?.value;
    let cloud = sample_body_uniform(&body, cfg.cloud, stream.fork("cloud"))?;
    let dirs = probe_directions(n, cfg.directions, stream.fork("directions"))?;
    let results = map_trials(cfg.trials, stream.fork("trials"), |_, rng| {
        let mut u: Vec<Vec<f64>> = haar_orthogonal(n, rng);
        if cfg.transpose_u {
            u = (0..n).map(|i| (0..n).map(|j| u[j][i]).collect()).collect();
        }
        global_factor(&body, &u, &cloud, &dirs, cfg.cone, rng)
    });
    let mut report = ExperimentReport::new(
        "global_form",
        &["trial", "n", "c_meas", "c_meas_quarter", "relative_change", "m_k", "p", "implied_a_prime"],
    );
    let mut implied_all = Vec::new();
    for (trial, res) in results.into_iter().enumerate() {
        let (c, cq) = res?;
        let implied = c / m_k;
        implied_all.push(implied);
        report.push(vec![
            trial.into(),
            n.into(),
            c.into(),
            cq.into(),
            ((cq - c).abs() / c).into(),
            m_k.into(),
            p.into(),
            implied.into(),
        ]);
    }
    implied_all.sort_by(f64::total_cmp);
    report.summary = format!(
        "global_form {} trials={}: implied A'_p median {:.6}, max {:.6}",
        body.label(),
        cfg.trials,
        implied_all[implied_all.len() / 2],
        implied_all[implied_all.len() - 1]
    );
    Ok(report)
}

/// `(p(1−√λ)/2)^{1/p}`.
pub fn fact_factor(p: f64, lambda: f64) -> f64 {
    (p * (1.0 - lambda.sqrt()) / 2.0).powf(1.0 / p)
}

/// Integers strictly inside `(γ²n, (1−2γ)²n)` and below `n`.
pub fn admissible_ranks(n: usize, gamma: f64) -> Vec<usize> {
    let lo = gamma * gamma * n as f64;
    let hi = (1.0 - 2.0 * gamma).max(0.0).powi(2) * n as f64;
    (1..n).filter(|&k| (k as f64) > lo && (k as f64) < hi && gamma < 0.5).collect()
}

pub fn run_fact_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let body = cfg.body64()?;
    let p = require_pconvex(&body)?;
    let n = body.dim();
    let stream = RngStream::new(cfg.seed);
    let d = Body::<f64>::euclidean_ball(n)?;
    let mut session = CoverSession::new(&d, &body, cfg.cloud, stream.fork("cover"), CoverOptions::default())?;
    let covering_number = session.cover(1.0)?.upper_count;
    let alpha = (covering_number as f64).ln() / n as f64;
    let gamma = cfg.fact_c * alpha.sqrt();
    let k_low = gamma * gamma * n as f64;
    let k_high = (1.0 - 2.0 * gamma).max(0.0).powi(2) * n as f64;
    let admissible = admissible_ranks(n, gamma);
    let ks = if cfg.k.is_empty() { admissible.clone() } else { cfg.k.clone() };
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k >= n) {
        return Err(Error::InvalidParameter(format!("rank k = {bad} must satisfy 1 <= k < n")));
    }

    let mut report = ExperimentReport::new(
        "fact_check",
        &[
            "trial",
            "k",
            "lambda",
            "n",
            "p",
            "covering_number",
            "alpha",
            "gamma",
            "k_low",
            "k_high",
            "in_range",
            "factor",
            "c_meas",
            "slack",
            "holds",
            "e_k",
            "entropy_factor",
            "entropy_slack",
            "entropy_holds",
            "status",
        ],
    );
    if ks.is_empty() {
        report.push(vec![
            Value::Empty,
            Value::Empty,
            Value::Empty,
            n.into(),
            p.into(),
            covering_number.into(),
            alpha.into(),
            gamma.into(),
            k_low.into(),
            k_high.into(),
            false.into(),
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            "range_empty".into(),
        ]);
        report.summary = format!("fact_check {}: admissible rank range empty (gamma = {gamma:.4})", body.label());
        return Ok(report);
    }

    let entropy: Vec<f64> =
        ks.iter().map(|&k| entropy_number_in(&mut session, k, cfg.tol).map(|e| e.e_k)).collect::<Result<_>>()?;
    let cloud = sample_body_uniform(&body, cfg.cloud, stream.fork("cloud"))?;
    let dir_sets: Vec<Vec<Vec<f64>>> = ks
        .iter()
        .map(|&k| probe_directions(k, cfg.directions, stream.fork(&format!("directions-{k}"))))
        .collect::<Result<_>>()?;
    let results = map_trials(cfg.trials, stream.fork("trials"), |_, rng| {
        ks.iter()
            .zip(&dir_sets)
            .map(|(&k, dirs)| {
                let frame: Vec<Vec<f64>> = haar_frame(n, k, rng);
                let projected = project(&frame, &cloud);
                containment_factor(&RadialCloud::new(projected), dirs, cfg.cone)
            })
            .collect::<Result<Vec<f64>>>()
    });
    let mut holds_all = true;
    for (trial, res) in results.into_iter().enumerate() {
        for ((&k, &e_k), c) in ks.iter().zip(&entropy).zip(res?) {
            let lambda = k as f64 / n as f64;
            let factor = fact_factor(p, lambda);
            let slack = 1.0 / (factor * c);
            let entropy_factor = factor / e_k;
            let entropy_slack = 1.0 / (entropy_factor * c);
            holds_all &= slack >= 1.0;
            report.push(vec![
                trial.into(),
                k.into(),
                lambda.into(),
                n.into(),
                p.into(),
                covering_number.into(),
                alpha.into(),
                gamma.into(),
                k_low.into(),
                k_high.into(),
                admissible.contains(&k).into(),
                factor.into(),
                c.into(),
                slack.into(),
                (slack >= 1.0).into(),
                e_k.into(),
                entropy_factor.into(),
                entropy_slack.into(),
                (entropy_slack >= 1.0).into(),
                "ok".into(),
            ]);
        }
    }
    report.summary = format!(
        "fact_check {}: N(D,K)={covering_number}, alpha={alpha:.4}, ranks {:?}, containment {}",
        body.label(),
        ks,
        if holds_all { "holds" } else { "fails" }
    );
    Ok(report)
}
