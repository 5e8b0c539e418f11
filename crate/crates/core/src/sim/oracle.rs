//! Brute-force values of the variational problem over two-segment paths.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::skorohod::skorohod_step;
use crate::error::{Error, Result};
use crate::geometry::Vector2;
use crate::srbm::Srbm;

/// A piecewise-linear free path x(·) from the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// (duration, velocity) of each segment.
    pub segments: Vec<(f64, Vector2)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOpts {
    /// Skorohod steps per path.
    pub steps: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for OracleOpts {
    fn default() -> Self {
        OracleOpts {
            steps: 2000,
            restarts: 3,
            seed: 7,
            max_evals: 1500,
        }
    }
}

/// Σ_k (t_k/2) ⟨w_k − μ, Σ⁻¹(w_k − μ)⟩
pub fn vp_cost(s: &Srbm, path: &PathSpec) -> f64 {
    let sinv = s.sigma_inv();
    path.segments
        .iter()
        .map(|&(t, w)| {
            let d = w - s.mu();
            0.5 * t * sinv.form(d, d)
        })
        .sum()
}

/// End point of the regulated path z = Φ(x), stepping the Skorohod map on
/// `steps` equal time steps.
pub fn regulated_endpoint(s: &Srbm, path: &PathSpec, steps: usize) -> Result<Vector2> {
    let total: f64 = path.segments.iter().map(|p| p.0).sum();
    if !total.is_finite() || path.segments.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::NoFeasiblePath);
    }
    let h = total / steps as f64;
    let r = s.r();
    let mut z = Vector2::ZERO;
    for &(t, w) in &path.segments {
        let n = (t / h).round() as usize;
        let dt = t / n.max(1) as f64;
        for _ in 0..n.max(1) {
            z = skorohod_step(&r, z, dt * w)?.0;
        }
    }
    Ok(z)
}

/// Penalty weight on the end-point mismatch.
const PENALTY: f64 = 1e6;

/// Path of class H^(1) for v (in the frame of the instance): a first
/// segment with c2 < 0 that slides along F_2, then the straight line to v.
/// c1 may be negative as long as the pushing on F_2 moves z to the right.
/// Parameters are unconstrained: log T, logit(s/T), logit of the angle of
/// c in (−π, 0), log |c|.
fn h1_path(s: &Srbm, v: Vector2, p: &[f64], steps: usize) -> Result<(PathSpec, Vector2)> {
    let t = p[0].exp();
    let frac = logistic(p[1]);
    let angle = -PI * logistic(p[2]);
    let c = p[3].exp() * Vector2::new(angle.cos(), angle.sin());
    // z must move along F_2 with only face 2 pushing.
    let r = s.r();
    if c.x1 - r.a12 * c.x2 / r.a22 <= 0.0 {
        return Err(Error::NoFeasiblePath);
    }
    // Snap s to the step grid so the first segment is stepped exactly.
    let n1 = ((frac * steps as f64).round() as usize).clamp(1, steps - 1);
    let s1 = t * n1 as f64 / steps as f64;
    let first = PathSpec {
        segments: vec![(s1, c)],
    };
    let z1 = regulated_endpoint(s, &first, n1)?;
    let w2 = (1.0 / (t - s1)) * (v - z1);
    let path = PathSpec {
        segments: vec![(s1, c), (t - s1, w2)],
    };
    let end = regulated_endpoint(s, &path, steps)?;
    Ok((path, end))
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Best value over straight paths x(t) = vt/T, optimized over T by a
/// golden-section search in log T.
fn direct_value(s: &Srbm, v: Vector2) -> f64 {
    let cost = |lt: f64| {
        let t = f64::exp(lt);
        vp_cost(s, &PathSpec { segments: vec![(t, (1.0 / t) * v)] })
    };
    let scale = v.norm() / s.mu().norm();
    let (mut a, mut b) = ((scale * 1e-3).ln(), (scale * 1e3).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    cost(0.5 * (a + b))
}

/// I^(i)(v) by minimizing the path cost over H^(0) ∪ H^(i).
pub fn vp_oracle_i(s: &Srbm, i: usize, v: Vector2, opts: &OracleOpts) -> Result<f64> {
    if v.x1 < 0.0 || v.x2 < 0.0 || !v.is_finite() {
        return Err(Error::NegativeDirection(v.x1, v.x2));
    }
    if v == Vector2::ZERO {
        return Ok(0.0);
    }
    if i == 2 {
        return vp_oracle_i(&s.swapped(), 1, v.swap(), opts);
    }
    let direct = direct_value(s, v);

    let tol = 1e-3 * (1.0 + v.norm());
    let objective = |p: &[f64]| -> f64 {
        match h1_path(s, v, p, opts.steps) {
            Ok((path, end)) => vp_cost(s, &path) + PENALTY * (end - v).norm().powi(2),
            Err(_) => f64::INFINITY,
        }
    };

    // Coarse grid.
    let scale = v.norm() / s.mu().norm();
    let mut seeds: Vec<(f64, [f64; 4])> = Vec::new();
    for &tm in &[0.1, 0.3, 1.0, 3.0, 10.0] {
        for k in 1..=9 {
            let frac = 0.1 * k as f64;
            for a in 1..=9 {
                let ang = a as f64 / 10.0;
                for &speed in &[0.3, 1.0, 3.0] {
                    let p = [
                        (tm * scale).ln(),
                        logit(frac),
                        logit(ang),
                        (speed * (1.0 + s.mu().norm()) * v.norm().max(1.0) / (tm * scale).max(1e-9)).ln(),
                    ];
                    let f = objective(&p);
                    if f.is_finite() {
                        seeds.push((f, p));
                    }
                }
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::INFINITY;
    let mut best_p = None;
    for k in 0..opts.restarts.max(1) {
        let start = match seeds.get(k) {
            Some(&(_, p)) => p,
            None => break,
        };
        let mut start = start;
        if k > 0 {
            for x in start.iter_mut() {
                *x += rng.random_range(-0.3..0.3);
            }
        }
        let (p, f) = nelder_mead(&objective, start, 0.5, opts.max_evals);
        if f < best {
            best = f;
            best_p = Some(p);
        }
    }

    let two_segment = match best_p {
        Some(p) => {
            let (path, end) = h1_path(s, v, &p, opts.steps)?;
            ((end - v).norm() <= tol).then(|| vp_cost(s, &path))
        }
        None => None,
    };
    let value = match two_segment {
        Some(c) => c.min(direct),
        None => direct,
    };
    if !value.is_finite() {
        return Err(Error::NoFeasiblePath);
    }
    Ok(value)
}

/// I(v) = min(I^(1)(v), I^(2)(v)) by brute force.
pub fn vp_oracle(s: &Srbm, v: Vector2, opts: &OracleOpts) -> Result<f64> {
    let a = vp_oracle_i(s, 1, v, opts)?;
    let b = vp_oracle_i(s, 2, v, opts)?;
    Ok(a.min(b))
}

/// Plain Nelder–Mead on a 4-dimensional parameter vector.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: [f64; 4],
    step: f64,
    max_evals: usize,
) -> ([f64; 4], f64) {
    const N: usize = 4;
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for j in 0..N {
        let mut p = start;
        p[j] += step;
        simplex.push((p, f(&p)));
    }
    let mut evals = N + 1;
    let lerp = |a: &[f64; N], b: &[f64; N], t: f64| {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[N].1 - simplex[0].1;
        if spread.abs() <= 1e-12 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let worst = simplex[N];
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                lerp(&centroid, &reflected, 0.5)
            } else {
                lerp(&centroid, &worst.0, 0.5)
            };
            let fc = f(&contracted);
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[N] = (contracted, fc);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let p = lerp(&best, &entry.0, 0.5);
                    *entry = (p, f(&p));
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Matrix2;
    use crate::srbm::SrbmData;

    fn identity() -> Srbm {
        SrbmData::identity().validated().unwrap()
    }

    #[test]
    fn costs() {
        let s = identity();
        let free = PathSpec {
            segments: vec![(3.0, s.mu())],
        };
        assert_eq!(vp_cost(&s, &free), 0.0);
        let one = PathSpec {
            segments: vec![(1.0, Vector2::new(1.0, 1.0))],
        };
        assert!((vp_cost(&s, &one) - 4.0).abs() < 1e-15);
        let split = PathSpec {
            segments: vec![(0.5, Vector2::new(1.0, 1.0)), (0.5, Vector2::new(1.0, 1.0))],
        };
        assert!((vp_cost(&s, &split) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn identity_oracle() {
        let s = identity();
        let o = OracleOpts::default();
        let a = vp_oracle_i(&s, 1, Vector2::new(1.0, 1.0), &o).unwrap();
        assert!((a / 4.0 - 1.0).abs() < 0.02, "{a}");
        let b = vp_oracle_i(&s, 1, Vector2::E1, &o).unwrap();
        assert!((b / 2.0 - 1.0).abs() < 0.02, "{b}");
        assert_eq!(vp_oracle(&s, Vector2::ZERO, &o).unwrap(), 0.0);
    }

    #[test]
    fn e1_oracle() {
        let s = SrbmData::new(
            Matrix2::IDENTITY,
            Vector2::new(-1.0, -1.0),
            Matrix2::new(1.0, 0.0, 0.5, 1.0),
        )
        .validated()
        .unwrap();
        let v = vp_oracle(&s, Vector2::new(1.0, 1.0), &OracleOpts::default()).unwrap();
        assert!((v / 3.2 - 1.0).abs() < 0.02, "{v}");
    }
}
