use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bodies::Body;
use crate::error::{invalid, Error, Result};
use crate::functionals::{sample_body_uniform, sample_sphere};
use crate::rng::{RngStream, SHARD_SIZE};
use crate::scalar::Scalar;

/// Default ceiling on the number of centers before `greedy_net` gives up.
pub const DEFAULT_CENTER_CAP: usize = 1_000_000;
/// Slack allowed when checking membership and coverage.
pub const COVER_TOLERANCE: f64 = 1e-9;

const LLOYD_SUBSAMPLE: usize = 4096;
const LLOYD_MAX_ITERS: usize = 40;
const LLOYD_FULL_ITERS: usize = 3;
const BADOIU_CLARKSON_ITERS: usize = 16;
/// Nets with more farthest-point centers than this are reported unrefined.
pub const REFINE_MAX_CENTERS: usize = 128;
const POLISH_STARTS: usize = 10;
const POLISH_ROUNDS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverOptions {
    pub center_cap: usize,
    /// Try to shrink the greedy net with minimax Lloyd iterations.
    pub refine: bool,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self { center_cap: DEFAULT_CENTER_CAP, refine: true }
    }
}

/// A covering of a point cloud of `K` by translates of `tB`.
#[derive(Debug, Clone)]
pub struct CoveringReport<T> {
    /// Radius in gauge-`B` units.
    pub t: T,
    /// Centers, all inside `K`.
    pub centers: Vec<Vec<T>>,
    pub upper_count: usize,
    /// Size of the farthest-point net; its points are pairwise more than `t` apart.
    pub net_size: Option<usize>,
    /// Largest gauge-`B` distance from a cloud point to its nearest center.
    pub radius: T,
    /// `|K| / |tB|`, when both volumes have closed forms.
    pub volume_lower: Option<T>,
    pub cloud_size: usize,
    pub seed: u64,
    cloud: Arc<Vec<Vec<T>>>,
}

impl<T: Scalar> CoveringReport<T> {
    pub fn cloud(&self) -> &[Vec<T>] {
        &self.cloud
    }

    /// Re-checks that every center lies in `outer` and every cloud point is within
    /// gauge-`inner` distance `t` of some center.
    pub fn verify(&self, outer: &Body<T>, inner: &Body<T>) -> Result<bool> {
        let tol = T::lit(COVER_TOLERANCE);
        for c in &self.centers {
            if outer.gauge(c)? > T::one() + tol {
                return Ok(false);
            }
        }
        let centers = &self.centers;
        let ok = self.cloud.par_iter().all(|x| nearest(inner, centers, x).0 <= self.t + tol);
        Ok(ok)
    }

    pub const CSV_HEADER: [&'static str; 7] =
        ["t", "upper_count", "net_size", "radius", "volume_lower", "cloud_size", "seed"];

    pub fn csv_fields(&self) -> [String; 7] {
        [
            format!("{:?}", self.t.as_f64()),
            self.upper_count.to_string(),
            self.net_size.map(|m| m.to_string()).unwrap_or_default(),
            format!("{:?}", self.radius.as_f64()),
            self.volume_lower.map(|v| format!("{:?}", v.as_f64())).unwrap_or_default(),
            self.cloud_size.to_string(),
            self.seed.to_string(),
        ]
    }

    /// Writes the centers to a plain-text file, one point per row.
    pub fn write_centers(&self, path: &Path) -> Result<()> {
        write_points(path, &self.centers)
    }
}

/// Writes points as whitespace-separated rows.
pub fn write_points<T: Scalar>(path: &Path, points: &[Vec<T>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{:?}", v.as_f64())).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

fn gauge_diff<T: Scalar>(body: &Body<T>, x: &[T], c: &[T], scratch: &mut [T]) -> T {
    for ((s, &a), &b) in scratch.iter_mut().zip(x).zip(c) {
        *s = a - b;
    }
    body.gauge_unchecked(scratch)
}

/// Distance to and index of the nearest center; ties go to the lowest index.
fn nearest<T: Scalar>(body: &Body<T>, centers: &[Vec<T>], x: &[T]) -> (T, usize) {
    let mut scratch = vec![T::zero(); x.len()];
    let mut best = (T::infinity(), 0);
    for (i, c) in centers.iter().enumerate() {
        let d = gauge_diff(body, x, c, &mut scratch);
        if d < best.0 {
            best = (d, i);
        }
    }
    best
}

/// Covering radius of `points` by `centers`, and the nearest-center assignment.
fn assign<T: Scalar>(body: &Body<T>, points: &[Vec<T>], centers: &[Vec<T>]) -> (T, Vec<usize>) {
    let parts: Vec<(T, Vec<usize>)> = points
        .par_chunks(SHARD_SIZE)
        .map(|chunk| {
            let mut radius = T::zero();
            let idx = chunk
                .iter()
                .map(|x| {
                    let (d, i) = nearest(body, centers, x);
                    radius = radius.max(d);
                    i
                })
                .collect();
            (radius, idx)
        })
        .collect();
    let mut radius = T::zero();
    let mut out = Vec::with_capacity(points.len());
    for (r, idx) in parts {
        radius = radius.max(r);
        out.extend(idx);
    }
    (radius, out)
}

struct Refined<T> {
    sub_radius: T,
    sub_centers: Vec<Vec<T>>,
    full: Option<(T, Vec<Vec<T>>)>,
}

/// Covering state over a fixed cloud. The farthest-point ordering does not depend
/// on `t`, so counts for many radii can be read off one session and are
/// nonincreasing in `t`.
pub struct CoverSession<'a, T: Scalar> {
    outer: &'a Body<T>,
    inner: &'a Body<T>,
    cloud: Arc<Vec<Vec<T>>>,
    seed: u64,
    options: CoverOptions,
    greedy: Vec<Vec<T>>,
    /// `radii[j]` is the covering radius of the first `j + 1` greedy centers.
    radii: Vec<T>,
    min_dist: Vec<T>,
    refined: Vec<Option<Refined<T>>>,
}

impl<'a, T: Scalar> CoverSession<'a, T> {
    pub fn new(
        outer: &'a Body<T>,
        inner: &'a Body<T>,
        cloud_size: usize,
        stream: RngStream,
        options: CoverOptions,
    ) -> Result<Self> {
        if options.center_cap == 0 {
            return Err(invalid("center cap must be positive"));
        }
        let cloud = sample_body_uniform(outer, cloud_size, stream.fork("cover-cloud"))?;
        Self::with_cloud(outer, inner, cloud, stream.seed, options)
    }

    pub fn with_cloud(
        outer: &'a Body<T>,
        inner: &'a Body<T>,
        cloud: Vec<Vec<T>>,
        seed: u64,
        options: CoverOptions,
    ) -> Result<Self> {
        if outer.dim() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
        }
        if cloud.is_empty() {
            return Err(invalid("cloud must be nonempty"));
        }
        for x in &cloud {
            inner.check_point(x)?;
        }
        let origin = vec![T::zero(); outer.dim()];
        let min_dist: Vec<T> = cloud.par_iter().map(|x| inner.gauge_unchecked(x)).collect();
        let r0 = min_dist.iter().fold(T::zero(), |m, &d| m.max(d));
        Ok(Self {
            outer,
            inner,
            cloud: Arc::new(cloud),
            seed,
            options,
            greedy: vec![origin],
            radii: vec![r0],
            min_dist,
            refined: Vec::new(),
        })
    }

    pub fn cloud(&self) -> &[Vec<T>] {
        &self.cloud
    }

    /// Largest inner-gauge norm over the cloud; the origin alone covers at this radius.
    pub fn max_radius(&self) -> T {
        self.radii[0]
    }

    fn farthest(&self) -> (T, usize) {
        let parts: Vec<(T, usize)> = self
            .min_dist
            .par_chunks(SHARD_SIZE)
            .enumerate()
            .map(|(s, chunk)| {
                let mut best = (T::neg_infinity(), 0);
                for (i, &d) in chunk.iter().enumerate() {
                    if d > best.0 {
                        best = (d, s * SHARD_SIZE + i);
                    }
                }
                best
            })
            .collect();
        parts.into_iter().fold((T::neg_infinity(), 0), |b, p| if p.0 > b.0 { p } else { b })
    }

    /// Adds farthest-point centers until the covering radius is at most `t`.
    fn extend_until(&mut self, t: T) -> Result<usize> {
        while *self.radii.last().expect("origin center") > t {
            if self.greedy.len() >= self.options.center_cap {
                return Err(Error::CenterCap { cap: self.options.center_cap, partial: self.greedy.len() });
            }
            let (_, idx) = self.farthest();
            let center = self.cloud[idx].clone();
            let inner = self.inner;
            let cloud = &self.cloud;
            let radius = self
                .min_dist
                .par_chunks_mut(SHARD_SIZE)
                .enumerate()
                .map(|(s, chunk)| {
                    let mut scratch = vec![T::zero(); center.len()];
                    let mut r = T::zero();
                    for (i, d) in chunk.iter_mut().enumerate() {
                        let g = gauge_diff(inner, &cloud[s * SHARD_SIZE + i], &center, &mut scratch);
                        if g < *d {
                            *d = g;
                        }
                        r = r.max(*d);
                    }
                    r
                })
                .collect::<Vec<T>>()
                .into_iter()
                .fold(T::zero(), T::max);
            self.greedy.push(center);
            self.radii.push(radius);
        }
        Ok(self.radii.iter().position(|&r| r <= t).expect("loop exit") + 1)
    }

    /// Minimax center of `members` among a few candidates, kept inside `outer`.
    fn minimax_center(&self, points: &[Vec<T>], members: &[usize], current: &[T]) -> Vec<T> {
        let n = current.len();
        let mut lo = vec![T::infinity(); n];
        let mut hi = vec![T::neg_infinity(); n];
        let mut centroid = vec![T::zero(); n];
        for &m in members {
            for (i, &v) in points[m].iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
                centroid[i] += v;
            }
        }
        let count = T::of_usize(members.len());
        centroid.iter_mut().for_each(|v| *v = *v / count);
        let mid: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| (a + b) / T::lit(2.0)).collect();

        let mut scratch = vec![T::zero(); n];
        let mut spread = |c: &[T]| -> (T, usize) {
            let mut best = (T::neg_infinity(), members[0]);
            for &m in members {
                let d = gauge_diff(self.inner, &points[m], c, &mut scratch);
                if d > best.0 {
                    best = (d, m);
                }
            }
            best
        };
        let mut bc = centroid.clone();
        for i in 0..BADOIU_CLARKSON_ITERS {
            let (_, far) = spread(&bc);
            let step = T::one() / T::of_usize(i + 2);
            for (c, &f) in bc.iter_mut().zip(&points[far]) {
                *c += (f - *c) * step;
            }
        }

        let tol = T::lit(COVER_TOLERANCE);
        let mut best = (spread(current).0, current.to_vec());
        for mut cand in [mid, centroid, bc] {
            let g = self.outer.gauge_unchecked(&cand);
            if g > T::one() + tol {
                cand.iter_mut().for_each(|v| *v = *v / g);
            }
            let r = spread(&cand).0;
            if r < best.0 {
                best = (r, cand);
            }
        }
        best.1
    }

    /// Alternates nearest-center assignment and per-cluster minimax updates; the
    /// covering radius never increases. Returns the best radius and its centers.
    fn lloyd(&self, points: &[Vec<T>], mut centers: Vec<Vec<T>>, iters: usize) -> (T, Vec<Vec<T>>) {
        let mut best = (T::infinity(), centers.clone());
        for it in 0..=iters {
            let (radius, owner) = assign(self.inner, points, &centers);
            if radius < best.0 {
                best = (radius, centers.clone());
            } else if it > 0 {
                break;
            }
            if it == iters {
                break;
            }
            let mut clusters = vec![Vec::new(); centers.len()];
            for (i, &o) in owner.iter().enumerate() {
                clusters[o].push(i);
            }
            centers = clusters
                .par_iter()
                .zip(centers.par_iter())
                .map(|(members, c)| if members.is_empty() { c.clone() } else { self.minimax_center(points, members, c) })
                .collect();
        }
        best
    }

    fn refined_sub(&mut self, j: usize) -> T {
        if self.refined.len() <= j {
            self.refined.resize_with(j + 1, || None);
        }
        if self.refined[j].is_none() {
            let sub = &self.cloud[..self.cloud.len().min(LLOYD_SUBSAMPLE)];
            let (r, c) = self.lloyd(sub, self.greedy[..j].to_vec(), LLOYD_MAX_ITERS);
            self.refined[j] = Some(Refined { sub_radius: r, sub_centers: c, full: None });
        }
        self.refined[j].as_ref().expect("just filled").sub_radius
    }

    fn refined_full(&mut self, j: usize) -> (T, Vec<Vec<T>>) {
        let entry = self.refined[j].as_ref().expect("subsample pass first");
        if entry.full.is_none() {
            let init = entry.sub_centers.clone();
            let full = self.lloyd(&self.cloud, init, LLOYD_FULL_ITERS);
            self.refined[j].as_mut().expect("present").full = Some(full);
        }
        let entry = self.refined[j].as_ref().expect("present");
        let (r, c) = entry.full.clone().expect("just filled");
        (r.max(entry.sub_radius), c)
    }

    /// Covering of the cloud by translates of `tB`.
    ///
    /// With `m` the farthest-point count, the reported count is the least
    /// `j ∈ [⌈m/2⌉, m]` whose refined `j`-center radius is at most `t`. Each refined
    /// radius depends only on `j`, which keeps the count nonincreasing in `t`. Nets with
    /// `m > REFINE_MAX_CENTERS` are reported as is; their counts exceed every refined one.
    pub fn cover(&mut self, t: T) -> Result<CoveringReport<T>> {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(invalid("t must be positive and finite"));
        }
        let m = self.extend_until(t)?;
        let mut chosen = (self.radii[m - 1], self.greedy[..m].to_vec());
        if self.options.refine && m <= REFINE_MAX_CENTERS {
            for j in m.div_ceil(2)..m {
                if self.refined_sub(j) > t {
                    continue;
                }
                let (r, c) = self.refined_full(j);
                if r <= t {
                    chosen = (r, c);
                    break;
                }
            }
        }
        let volume_lower = super::volume_lower(self.outer, self.inner, t).ok();
        Ok(CoveringReport {
            t,
            upper_count: chosen.1.len(),
            centers: chosen.1,
            net_size: Some(m),
            radius: chosen.0,
            volume_lower,
            cloud_size: self.cloud.len(),
            seed: self.seed,
            cloud: Arc::clone(&self.cloud),
        })
    }
}

/// Farthest-point covering of a uniform cloud of `k` by translates of `tB`,
/// started from a center at the origin.
pub fn greedy_net<T: Scalar>(
    k: &Body<T>,
    b: &Body<T>,
    t: T,
    cloud_size: usize,
    stream: RngStream,
) -> Result<CoveringReport<T>> {
    greedy_net_with(k, b, t, cloud_size, stream, CoverOptions::default())
}

pub fn greedy_net_with<T: Scalar>(
    k: &Body<T>,
    b: &Body<T>,
    t: T,
    cloud_size: usize,
    stream: RngStream,
    options: CoverOptions,
) -> Result<CoveringReport<T>> {
    if !(t > T::zero()) {
        return Err(invalid("t must be positive"));
    }
    CoverSession::new(k, b, cloud_size, stream, options)?.cover(t)
}

/// Smallest radius `t` such that translates of `t·inner` at `centers` cover `outer`,
/// estimated on a uniform cloud plus boundary points of `outer`, with the worst
/// points pushed further by local search.
pub fn covering_from_centers<T: Scalar>(
    outer: &Body<T>,
    inner: &Body<T>,
    centers: &[Vec<T>],
    cloud_size: usize,
    stream: RngStream,
) -> Result<CoveringReport<T>> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: outer.dim(), got: inner.dim() });
    }
    if centers.is_empty() {
        return Err(invalid("at least one center is required"));
    }
    for c in centers {
        outer.check_point(c)?;
    }
    let mut cloud = sample_body_uniform(outer, cloud_size, stream.fork("cloud"))?;
    for mut u in sample_sphere::<T>(outer.dim(), cloud_size.div_ceil(4), stream.fork("boundary"))? {
        let g = outer.gauge_unchecked(&u);
        u.iter_mut().for_each(|v| *v = *v / g);
        cloud.push(u);
    }
    let dists: Vec<T> = cloud.par_iter().map(|x| nearest(inner, centers, x).0).collect();
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| dists[b].partial_cmp(&dists[a]).expect("finite distances").then(a.cmp(&b)));
    let mut radius = dists[order[0]];

    let mut rng = stream.fork("polish").rng();
    let n = outer.dim();
    let objective = |y: &[T]| nearest(inner, centers, y).0;
    for &start in order.iter().take(POLISH_STARTS) {
        let mut y = cloud[start].clone();
        let mut val = dists[start];
        let mut step = T::lit(0.1) / T::of_usize(n).sqrt();
        for _ in 0..POLISH_ROUNDS {
            let mut improved = false;
            for _ in 0..4 * n {
                let mut cand: Vec<T> =
                    y.iter().map(|&v| v + step * (T::lit(2.0) * T::unit(&mut rng) - T::one())).collect();
                let g = outer.gauge_unchecked(&cand);
                if g > T::one() {
                    cand.iter_mut().for_each(|v| *v = *v / g);
                }
                let f = objective(&cand);
                if f > val {
                    val = f;
                    y = cand;
                    improved = true;
                }
            }
            if !improved {
                step = step / T::lit(2.0);
            }
        }
        if val > radius {
            radius = val;
        }
        cloud.push(y);
    }

    Ok(CoveringReport {
        t: radius,
        centers: centers.to_vec(),
        upper_count: centers.len(),
        net_size: None,
        radius,
        volume_lower: super::volume_lower(outer, inner, radius).ok(),
        cloud_size: cloud.len(),
        seed: stream.seed,
        cloud: Arc::new(cloud),
    })
}
