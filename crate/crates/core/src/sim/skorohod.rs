use crate::error::{Error, Result};
use crate::geometry::{Matrix2, Vector2};

/// Feasibility slack for the complementarity system.
const SLACK: f64 = 1e-12;

/// One step of the R-regulation: find dy ≥ 0 with z' = z + dx + R dy ≥ 0 and
/// ⟨z', dy⟩ = 0. The active sets ∅, {1}, {2}, {1,2} are tried in turn; for a
/// P-matrix exactly one of them is feasible.
pub fn skorohod_step(r: &Matrix2, z: Vector2, dx: Vector2) -> Result<(Vector2, Vector2)> {
    let w = z + dx;
    for active in 0..4 {
        if let Some(sol) = solve_active(r, w, active) {
            return Ok(sol);
        }
    }
    Err(Error::NoSolution)
}

/// All feasible solutions over the four active sets.
pub fn skorohod_candidates(r: &Matrix2, z: Vector2, dx: Vector2) -> Vec<(Vector2, Vector2)> {
    let w = z + dx;
    (0..4).filter_map(|a| solve_active(r, w, a)).collect()
}

fn solve_active(r: &Matrix2, w: Vector2, active: u8) -> Option<(Vector2, Vector2)> {
    let slack = SLACK * (1.0 + w.max_abs());
    let (z, dy) = match active {
        0 => (w, Vector2::ZERO),
        1 => {
            let y1 = -w.x1 / r.a11;
            (Vector2::new(0.0, w.x2 + r.a21 * y1), Vector2::new(y1, 0.0))
        }
        2 => {
            let y2 = -w.x2 / r.a22;
            (Vector2::new(w.x1 + r.a12 * y2, 0.0), Vector2::new(0.0, y2))
        }
        _ => (Vector2::ZERO, -(r.inverse() * w)),
    };
    if z.x1 < -slack || z.x2 < -slack || dy.x1 < -slack || dy.x2 < -slack {
        return None;
    }
    let clamp = |v: Vector2| Vector2::new(v.x1.max(0.0), v.x2.max(0.0));
    Some((clamp(z), clamp(dy)))
}
