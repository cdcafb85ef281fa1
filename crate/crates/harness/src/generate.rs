//! Seeded workload generators.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{InstanceDoc, InstanceKind, MetricDoc, RequestDoc};

/// Environment variable that overrides every generator seed.
pub const SEED_ENV: &str = "BOUNDEDWFA_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Random connected weighted graph with integer edge weights and task costs.
    MtsRandom,
    /// Points on an integer grid, row-major, `ceil(sqrt(size))` columns.
    KServerGrid,
    /// Integer points in well separated clusters.
    KServerClustered,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MtsRandom => "mts-random",
            Self::KServerGrid => "kserver-grid",
            Self::KServerClustered => "kserver-clustered",
        })
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mts-random" => Ok(Self::MtsRandom),
            "kserver-grid" => Ok(Self::KServerGrid),
            "kserver-clustered" => Ok(Self::KServerClustered),
            other => Err(format!("unknown generator kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    /// |S| for MTS, the number of points for k-server.
    pub size: usize,
    /// Servers (ignored for MTS).
    pub k: usize,
    /// Number of requests.
    pub n: usize,
    /// Largest edge weight (MTS graphs).
    pub max_weight: u32,
    /// Largest task cost (MTS).
    pub max_cost: u32,
    /// Never request one of the k most recently requested distinct points
    /// (the initial positions count as requested before step 0).
    pub avoid_recent: bool,
    /// Request i is drawn from the first ⌈size·(i+1)/n⌉ points only, so the
    /// set of requested points keeps growing for the whole run.
    pub expanding: bool,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, size: usize, k: usize, n: usize, seed: u64) -> Self {
        Self { kind, size, k, n, max_weight: 10, max_cost: 10, avoid_recent: false, expanding: false, seed }
    }

    /// Replaces the seed with `BOUNDEDWFA_SEED` when that variable is set.
    pub fn with_env_seed(mut self) -> Result<Self, String> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| format!("{SEED_ENV}={v:?} is not an unsigned integer"))?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.size == 0 {
            return Err("size must be positive".into());
        }
        if self.kind != GenKind::MtsRandom {
            if self.k == 0 {
                return Err("k must be positive".into());
            }
            if self.avoid_recent && self.size <= self.k {
                return Err(format!("avoiding the last {} requests needs more than {} points", self.k, self.k));
            }
        }
        if self.kind == GenKind::MtsRandom && self.max_weight == 0 {
            return Err("max weight must be positive".into());
        }
        Ok(())
    }
}

/// Builds an instance document from `spec`. The output is a pure function of
/// the spec; callers apply [`GenSpec::with_env_seed`] first if they want the
/// environment override.
pub fn generate(spec: &GenSpec) -> InstanceDoc {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::MtsRandom => mts_random(spec, &mut rng),
        GenKind::KServerGrid => {
            let cols = (spec.size as f64).sqrt().ceil() as usize;
            let points = (0..spec.size).map(|i| vec![(i % cols) as f64, (i / cols) as f64]).collect();
            kserver(spec, points, &mut rng)
        }
        GenKind::KServerClustered => {
            let points = clustered_points(spec.size, &mut rng);
            kserver(spec, points, &mut rng)
        }
    }
}

fn mts_random(spec: &GenSpec, rng: &mut ChaCha8Rng) -> InstanceDoc {
    let n = spec.size;
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, f64::from(rng.gen_range(1..=spec.max_weight))));
    }
    for u in 0..n {
        for v in u + 2..n {
            if rng.gen_bool(0.3) {
                edges.push((u, v, f64::from(rng.gen_range(1..=spec.max_weight))));
            }
        }
    }
    let metric = if n == 1 {
        MetricDoc { matrix: Some(vec![vec![0.0]]), ..MetricDoc::default() }
    } else {
        MetricDoc { graph: Some(edges), ..MetricDoc::default() }
    };
    let requests = (0..spec.n)
        .map(|_| RequestDoc::Costs((0..n).map(|_| Some(f64::from(rng.gen_range(0..=spec.max_cost)))).collect()))
        .collect();
    InstanceDoc { kind: InstanceKind::Mts, metric, k: None, initial: vec![rng.gen_range(0..n)], requests }
}

fn clustered_points(size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let clusters = size.div_ceil(8).max(1);
    let spread = 1000 * clusters as i64;
    let centers: Vec<(i64, i64)> = (0..clusters).map(|_| (rng.gen_range(0..spread), rng.gen_range(0..spread))).collect();
    let mut seen = BTreeSet::new();
    let mut points = Vec::with_capacity(size);
    while points.len() < size {
        let (cx, cy) = centers[points.len() % clusters];
        let p = (cx + rng.gen_range(-20..=20), cy + rng.gen_range(-20..=20));
        if seen.insert(p) {
            points.push(vec![p.0 as f64, p.1 as f64]);
        }
    }
    points
}

fn kserver(spec: &GenSpec, points: Vec<Vec<f64>>, rng: &mut ChaCha8Rng) -> InstanceDoc {
    let m = points.len();
    let mut initial: Vec<usize> = if spec.k <= m {
        sample(rng, m, spec.k).into_vec()
    } else {
        (0..spec.k).map(|i| i % m).collect()
    };
    initial.sort_unstable();
    // The initial servers count as the most recent requests.
    let mut recent: Vec<usize> = initial.clone();
    recent.dedup();
    let mut requests = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let reach = if spec.expanding { (m * (i + 1)).div_ceil(spec.n).clamp(1, m) } else { m };
        let r = loop {
            let r = rng.gen_range(0..reach);
            if !spec.avoid_recent || !recent.contains(&r) || reach <= recent.len() {
                break r;
            }
        };
        if spec.avoid_recent {
            recent.retain(|&p| p != r);
            recent.push(r);
            if recent.len() > spec.k {
                recent.remove(0);
            }
        }
        requests.push(RequestDoc::Point(r));
    }
    InstanceDoc {
        kind: InstanceKind::Kserver,
        metric: MetricDoc { points: Some(points), ..MetricDoc::default() },
        k: Some(spec.k),
        initial,
        requests,
    }
}
