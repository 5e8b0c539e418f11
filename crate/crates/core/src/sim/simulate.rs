use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::skorohod::skorohod_step;
use crate::domain;
use crate::error::{Error, Result};
use crate::geometry::Vector2;
use crate::srbm::Srbm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub burn_in: f64,
    pub seed: u64,
    pub replications: usize,
    pub bins: usize,
    /// Histogram range; `None` picks 10/min(τ1, τ2).
    pub x_max: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            horizon: 2e5,
            burn_in: 100.0,
            seed: 1,
            replications: 4,
            bins: 200,
            x_max: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, s: &Srbm) -> Result<()> {
        let fail = |m: String| Err(Error::ConfigError(m));
        if !(self.dt > 0.0) {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        let dt_max = 0.01 * 1f64.min(1.0 / s.mu().norm());
        if self.dt > dt_max {
            return fail(format!("dt = {} exceeds {dt_max}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return fail(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.horizon) {
            return fail(format!(
                "burn-in {} must lie in [0, horizon = {})",
                self.burn_in, self.horizon
            ));
        }
        if self.replications == 0 {
            return fail("replications must be at least 1".into());
        }
        if self.bins < 2 {
            return fail("bins must be at least 2".into());
        }
        if let Some(x) = self.x_max {
            if !(x > 0.0 && x.is_finite()) {
                return fail(format!("x_max must be positive, got {x}"));
            }
        }
        Ok(())
    }

    fn resolved_x_max(&self, s: &Srbm) -> Result<f64> {
        match self.x_max {
            Some(x) => Ok(x),
            None => {
                let t = domain::tau(s)?.tau;
                Ok(10.0 / t.x1.min(t.x2))
            }
        }
    }
}

/// Pooled estimates over all replications, with across-replication
/// standard errors in `replication_spread`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Bin edges x_0 = 0 < … < x_bins = x_max.
    pub edges: Vec<f64>,
    /// Density estimates of Z_1 and Z_2 per bin.
    pub marginal_hist: [Vec<f64>; 2],
    /// Across-replication standard error of each density estimate.
    pub marginal_hist_se: [Vec<f64>; 2],
    /// log P̂(Z_i > x) at each edge; `None` where no sample exceeds it.
    pub tail_log: [Vec<Option<f64>>; 2],
    /// log ν̂_i((x, ∞)) at each edge, ν_i living on face F_i.
    pub boundary_tail_log: [Vec<Option<f64>>; 2],
    /// Regulator increase per unit time, y_i(T)/T.
    pub y_increments: [f64; 2],
    pub means: [f64; 2],
    /// Means over the first and second half of the kept trajectory.
    pub half_means: [[f64; 2]; 2],
    pub marginal_decay: [f64; 2],
    pub boundary_decay: [f64; 2],
    pub replication_spread: Spread,
    pub steps_per_replication: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub means: [f64; 2],
    pub y_increments: [f64; 2],
    pub marginal_decay: [f64; 2],
    pub boundary_decay: [f64; 2],
}

/// Raw accumulators of one replication.
#[derive(Debug, Clone)]
struct Tally {
    kept: u64,
    hist: [Vec<u64>; 2],
    over: [u64; 2],
    /// dy_i accumulated by the bin of Z_(3−i).
    push: [Vec<f64>; 2],
    push_over: [f64; 2],
    sum: [f64; 2],
    half_sum: [[f64; 2]; 2],
    y: [f64; 2],
}

impl Tally {
    fn new(bins: usize) -> Self {
        Tally {
            kept: 0,
            hist: [vec![0; bins], vec![0; bins]],
            over: [0; 2],
            push: [vec![0.0; bins], vec![0.0; bins]],
            push_over: [0.0; 2],
            sum: [0.0; 2],
            half_sum: [[0.0; 2]; 2],
            y: [0.0; 2],
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.kept += o.kept;
        for i in 0..2 {
            for (a, b) in self.hist[i].iter_mut().zip(&o.hist[i]) {
                *a += b;
            }
            for (a, b) in self.push[i].iter_mut().zip(&o.push[i]) {
                *a += b;
            }
            self.over[i] += o.over[i];
            self.push_over[i] += o.push_over[i];
            self.sum[i] += o.sum[i];
            self.y[i] += o.y[i];
            for h in 0..2 {
                self.half_sum[h][i] += o.half_sum[h][i];
            }
        }
    }
}

/// Euler scheme dx = μ dt + L √dt ξ regulated by `skorohod_step`, with
/// replication k drawing from stream k of a ChaCha8 generator keyed by the
/// seed. Results do not depend on the number of worker threads.
pub fn simulate(s: &Srbm, config: &SimConfig) -> Result<SimResult> {
    config.validate(s)?;
    let x_max = config.resolved_x_max(s)?;
    let tallies: Vec<Tally> = (0..config.replications)
        .into_par_iter()
        .map(|k| run_replication(s, config, x_max, k as u64))
        .collect::<Result<_>>()?;

    let mut pooled = Tally::new(config.bins);
    for t in &tallies {
        pooled.merge(t);
    }
    let time_per_rep = config.horizon - config.burn_in;
    let summary = summarize(&pooled, config, x_max, time_per_rep * config.replications as f64);
    let per_rep: Vec<Summary> = tallies
        .iter()
        .map(|t| summarize(t, config, x_max, time_per_rep))
        .collect();
    let se = |f: &dyn Fn(&Summary) -> [f64; 2]| -> [f64; 2] {
        let mut out = [f64::NAN; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let vals: Vec<f64> = per_rep.iter().map(|r| f(r)[i]).collect();
            *o = standard_error(&vals);
        }
        out
    };
    let spread = Spread {
        means: se(&|r| r.means),
        y_increments: se(&|r| r.y_rate),
        marginal_decay: se(&|r| r.marginal_decay),
        boundary_decay: se(&|r| r.boundary_decay),
    };

    let hist_se: [Vec<f64>; 2] = std::array::from_fn(|i| {
        (0..config.bins)
            .map(|b| standard_error(&per_rep.iter().map(|r| r.density[i][b]).collect::<Vec<_>>()))
            .collect()
    });

    let n = pooled.kept as f64;
    let half_n = n / 2.0;
    Ok(SimResult {
        edges: summary.edges,
        marginal_hist: summary.density,
        marginal_hist_se: hist_se,
        tail_log: summary.tail_log,
        boundary_tail_log: summary.boundary_tail_log,
        y_increments: summary.y_rate,
        means: summary.means,
        half_means: [
            [pooled.half_sum[0][0] / half_n, pooled.half_sum[0][1] / half_n],
            [pooled.half_sum[1][0] / half_n, pooled.half_sum[1][1] / half_n],
        ],
        marginal_decay: summary.marginal_decay,
        boundary_decay: summary.boundary_decay,
        replication_spread: spread,
        steps_per_replication: (config.horizon / config.dt).round() as u64,
    })
}

fn run_replication(s: &Srbm, config: &SimConfig, x_max: f64, k: u64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(k);
    let chol = s.sigma().cholesky_lower();
    let drift = config.dt * s.mu();
    let sd = config.dt.sqrt();
    let r = s.r();
    let total = (config.horizon / config.dt).round() as u64;
    let burn = (config.burn_in / config.dt).round() as u64;
    let half = burn + (total - burn) / 2;
    let width = x_max / config.bins as f64;
    let bin = |x: f64| -> Option<usize> {
        let b = (x / width) as usize;
        (b < config.bins).then_some(b)
    };

    let mut tally = Tally::new(config.bins);
    let mut z = Vector2::ZERO;
    for step in 0..total {
        let xi = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let dx = drift + sd * (chol * xi);
        let (next, dy) = skorohod_step(&r, z, dx)?;
        z = next;
        if step < burn {
            continue;
        }
        tally.kept += 1;
        let h = usize::from(step >= half);
        for i in 0..2 {
            let zi = z.get(i + 1);
            tally.sum[i] += zi;
            tally.half_sum[h][i] += zi;
            match bin(zi) {
                Some(b) => tally.hist[i][b] += 1,
                None => tally.over[i] += 1,
            }
            let push = dy.get(i + 1);
            if push > 0.0 {
                tally.y[i] += push;
                match bin(z.get(2 - i)) {
                    Some(b) => tally.push[i][b] += push,
                    None => tally.push_over[i] += push,
                }
            }
        }
    }
    Ok(tally)
}

struct Summary {
    edges: Vec<f64>,
    density: [Vec<f64>; 2],
    tail_log: [Vec<Option<f64>>; 2],
    boundary_tail_log: [Vec<Option<f64>>; 2],
    y_rate: [f64; 2],
    means: [f64; 2],
    marginal_decay: [f64; 2],
    boundary_decay: [f64; 2],
}

fn summarize(t: &Tally, config: &SimConfig, x_max: f64, time: f64) -> Summary {
    let bins = config.bins;
    let width = x_max / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * width).collect();
    let n = t.kept as f64;

    let mut density: [Vec<f64>; 2] = Default::default();
    let mut tail_log: [Vec<Option<f64>>; 2] = Default::default();
    let mut boundary_tail_log: [Vec<Option<f64>>; 2] = Default::default();
    let mut marginal_decay = [f64::NAN; 2];
    let mut boundary_decay = [f64::NAN; 2];
    for i in 0..2 {
        density[i] = t.hist[i].iter().map(|&c| c as f64 / (n * width)).collect();

        let mut above = vec![0.0; bins + 1];
        above[bins] = t.over[i] as f64;
        for k in (0..bins).rev() {
            above[k] = above[k + 1] + t.hist[i][k] as f64;
        }
        let probs: Vec<f64> = above.iter().map(|c| c / n).collect();
        tail_log[i] = probs.iter().map(|&p| (p > 0.0).then(|| p.ln())).collect();
        marginal_decay[i] = fit_decay(&edges, &probs, 0.5, 1e-4);

        let mut pushed = vec![0.0; bins + 1];
        pushed[bins] = t.push_over[i];
        for k in (0..bins).rev() {
            pushed[k] = pushed[k + 1] + t.push[i][k];
        }
        let nu: Vec<f64> = pushed.iter().map(|p| p / time).collect();
        boundary_tail_log[i] = nu.iter().map(|&p| (p > 0.0).then(|| p.ln())).collect();
        // ν_i is a finite measure of total mass y_i(T)/T, so the cutoffs are
        // taken relative to that.
        let mass = nu[0];
        boundary_decay[i] = fit_decay(&edges, &nu.iter().map(|p| p / mass).collect::<Vec<_>>(), 0.5, 1e-3);
    }
    Summary {
        edges,
        density,
        tail_log,
        boundary_tail_log,
        y_rate: [t.y[0] / time, t.y[1] / time],
        means: [t.sum[0] / n, t.sum[1] / n],
        marginal_decay,
        boundary_decay,
    }
}

/// Slope of −log p against x over the points with lo ≤ p ≤ hi.
fn fit_decay(x: &[f64], p: &[f64], hi: f64, lo: f64) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(p)
        .filter(|(_, &q)| q >= lo && q <= hi)
        .map(|(&a, &q)| (a, q.ln()))
        .collect();
    if pts.len() < 3 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -sxy / sxx
}

fn standard_error(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (var / m).sqrt()
}
