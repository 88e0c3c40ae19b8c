use super::PixelSet;
use crate::color::{rgb_distance_sq, RgbColor};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// A real-valued RGB point, channels in `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Centroid {
    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    fn from_array([r, g, b]: [f64; 3]) -> Self {
        Centroid { r, g, b }
    }

    /// Nearest 8-bit color.
    pub fn round(self) -> RgbColor {
        let ch = |v: f64| v.round().clamp(0.0, 255.0) as u8;
        RgbColor::new(ch(self.r), ch(self.g), ch(self.b))
    }
}

impl From<RgbColor> for Centroid {
    fn from(c: RgbColor) -> Self {
        Centroid { r: f64::from(c.r), g: f64::from(c.g), b: f64::from(c.b) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub centroid: Centroid,
    /// Share of pixels assigned to this centroid.
    pub weight: f64,
}

/// Dominant colors of one image, heaviest first. Weights sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub entries: Vec<PaletteEntry>,
}

impl Palette {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seeding {
    /// First centroid uniform over pixels, each further centroid drawn with
    /// probability proportional to squared distance from the nearest one
    /// already chosen.
    #[default]
    DistanceWeighted,
    /// Centroids drawn uniformly over pixels, without repeating a color.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansOptions {
    pub k: usize,
    pub seed: u64,
    /// Stop once no centroid moves by this much (RGB units) and the
    /// assignment is stable.
    pub tol: f64,
    pub max_iter: usize,
    pub seeding: Seeding,
    /// Independent runs; the one with the lowest objective wins.
    pub restarts: usize,
}

impl Default for KmeansOptions {
    fn default() -> Self {
        KmeansOptions { k: 5, seed: 42, tol: 1e-3, max_iter: 100, seeding: Seeding::DistanceWeighted, restarts: 1 }
    }
}

impl KmeansOptions {
    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::InvalidParameter("max_iter and restarts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Initialization {
    pub centroids: Vec<Centroid>,
    pub requested_k: usize,
}

impl Initialization {
    /// The effective k, reduced when the image has fewer distinct colors.
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn was_reduced(&self) -> bool {
        self.k() < self.requested_k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub palette: Palette,
    /// Within-cluster sum of squared RGB distances at termination.
    pub objective: f64,
    /// Objective after every assignment step of the winning run.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub k: usize,
    pub requested_k: usize,
}

/// Distinct colors with multiplicities, in ascending color order so that
/// nothing downstream depends on pixel order.
struct Histogram {
    points: Vec<[f64; 3]>,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    fn new(pixels: &PixelSet) -> Self {
        let mut map: BTreeMap<RgbColor, u64> = BTreeMap::new();
        for p in pixels.pixels() {
            *map.entry(*p).or_default() += 1;
        }
        let total = pixels.len() as u64;
        let (points, counts) = map.into_iter().map(|(c, n)| (Centroid::from(c).to_array(), n)).unzip();
        Histogram { points, counts, total }
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

/// Index `i` such that the cumulative weight first exceeds `target`,
/// skipping zero-weight items.
fn pick_weighted(weights: &[f64], target: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if acc > target {
                return i;
            }
        }
    }
    last_positive
}

fn init_on(hist: &Histogram, k: usize, seeding: Seeding, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let k = k.min(hist.len());
    let counts: Vec<f64> = hist.counts.iter().map(|&n| n as f64).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    match seeding {
        Seeding::DistanceWeighted => {
            let total = hist.total as f64;
            chosen.push(pick_weighted(&counts, rng.random::<f64>() * total));
            let mut nearest: Vec<f64> =
                hist.points.iter().map(|p| rgb_distance_sq(*p, hist.points[chosen[0]])).collect();
            while chosen.len() < k {
                let weights: Vec<f64> = nearest.iter().zip(&counts).map(|(d, n)| d * n).collect();
                let sum: f64 = weights.iter().sum();
                let next = pick_weighted(&weights, rng.random::<f64>() * sum);
                chosen.push(next);
                for (d, p) in nearest.iter_mut().zip(&hist.points) {
                    *d = d.min(rgb_distance_sq(*p, hist.points[next]));
                }
            }
        }
        Seeding::Uniform => {
            let mut weights = counts;
            while chosen.len() < k {
                let sum: f64 = weights.iter().sum();
                let next = pick_weighted(&weights, rng.random::<f64>() * sum);
                chosen.push(next);
                weights[next] = 0.0;
            }
        }
    }
    chosen.into_iter().map(|i| hist.points[i]).collect()
}

/// Picks initial centroids for `k` clusters, fully determined by `seed`.
///
/// When the image has fewer than `k` distinct colors, k is reduced to that
/// count; [`Initialization::was_reduced`] reports it.
pub fn kmeans_init(pixels: &PixelSet, k: usize, seed: u64, seeding: Seeding) -> Result<Initialization> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    let hist = Histogram::new(pixels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = init_on(&hist, k, seeding, &mut rng).into_iter().map(Centroid::from_array).collect();
    let init = Initialization { centroids, requested_k: k };
    if init.was_reduced() {
        log::info!("k reduced from {} to {} distinct colors", k, init.k());
    }
    Ok(init)
}

/// Nearest centroid per point, ties to the lowest index.
fn assign(hist: &Histogram, centroids: &[[f64; 3]], labels: &mut [usize], dists: &mut [f64]) -> f64 {
    let mut objective = 0.0;
    for (i, p) in hist.points.iter().enumerate() {
        let mut best = (f64::INFINITY, 0);
        for (j, c) in centroids.iter().enumerate() {
            let d = rgb_distance_sq(*p, *c);
            if d < best.0 {
                best = (d, j);
            }
        }
        labels[i] = best.1;
        dists[i] = best.0;
        objective += best.0 * hist.counts[i] as f64;
    }
    objective
}

/// Cluster means; empty clusters move onto the point farthest from its
/// current centroid.
fn update(hist: &Histogram, labels: &[usize], dists: &[f64], k: usize) -> Vec<[f64; 3]> {
    let mut sums = vec![[0.0f64; 3]; k];
    let mut sizes = vec![0u64; k];
    for (i, &j) in labels.iter().enumerate() {
        let n = hist.counts[i];
        let w = n as f64;
        for (sum, x) in sums[j].iter_mut().zip(hist.points[i]) {
            *sum += x * w;
        }
        sizes[j] += n;
    }
    let mut taken = vec![false; hist.len()];
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        if sizes[j] > 0 {
            let n = sizes[j] as f64;
            out.push(sums[j].map(|s| s / n));
        } else {
            let far = (0..hist.len())
                .filter(|&i| !taken[i])
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                .expect("k never exceeds the number of distinct colors");
            taken[far] = true;
            out.push(hist.points[far]);
        }
    }
    out
}

fn run_once(hist: &Histogram, opts: &KmeansOptions, seed: u64) -> Clustering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = init_on(hist, opts.k, opts.seeding, &mut rng);
    let k = centroids.len();
    let mut labels = vec![0; hist.len()];
    let mut dists = vec![0.0; hist.len()];
    let mut next_labels = labels.clone();
    let mut trace = vec![assign(hist, &centroids, &mut labels, &mut dists)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let moved = update(hist, &labels, &dists, k);
        let shift = moved.iter().zip(&centroids).map(|(a, b)| rgb_distance_sq(*a, *b).sqrt()).fold(0.0, f64::max);
        centroids = moved;
        trace.push(assign(hist, &centroids, &mut next_labels, &mut dists));
        let stable = next_labels == labels;
        std::mem::swap(&mut labels, &mut next_labels);
        if stable && shift < opts.tol {
            converged = true;
            break;
        }
    }

    let mut sizes = vec![0u64; k];
    for (i, &j) in labels.iter().enumerate() {
        sizes[j] += hist.counts[i];
    }
    let total = hist.total as f64;
    let mut entries: Vec<PaletteEntry> = centroids
        .iter()
        .zip(&sizes)
        .filter(|(_, &n)| n > 0)
        .map(|(c, &n)| PaletteEntry { centroid: Centroid::from_array(*c), weight: n as f64 / total })
        .collect();
    entries.sort_by(|a, b| {
        b.weight.total_cmp(&a.weight).then_with(|| {
            a.centroid
                .to_array()
                .iter()
                .zip(b.centroid.to_array())
                .map(|(x, y)| x.total_cmp(&y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });

    Clustering {
        palette: Palette { entries },
        objective: *trace.last().expect("trace holds the initial assignment"),
        objective_trace: trace,
        iterations,
        converged,
        k,
        requested_k: opts.k,
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed.wrapping_add((restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Lloyd's k-means over the pixels in RGB space.
///
/// Assignment uses Euclidean RGB distance; each centroid then moves to the
/// mean of its pixels. Iteration stops when no centroid moves by `tol` or
/// more and the assignment no longer changes, which leaves every pixel
/// with its nearest centroid and every centroid at its cluster mean. With
/// `restarts > 1` the run with the lowest objective is kept.
pub fn kmeans_cluster(pixels: &PixelSet, opts: &KmeansOptions) -> Result<Clustering> {
    opts.validate()?;
    if pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    let hist = Histogram::new(pixels);
    if hist.len() < opts.k {
        log::info!("k reduced from {} to {} distinct colors", opts.k, hist.len());
    }
    let mut best: Option<Clustering> = None;
    for r in 0..opts.restarts {
        let run = run_once(&hist, opts, restart_seed(opts.seed, r));
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}
