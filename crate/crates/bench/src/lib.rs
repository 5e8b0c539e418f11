//! Fixed instances shared by the benchmarks in `benches/`.

use srbm2d::{Matrix2, Srbm, SrbmData, Vector2};

pub fn identity() -> Srbm {
    SrbmData::identity().validated().expect("identity is valid")
}

pub fn e1() -> Srbm {
    SrbmData::new(Matrix2::IDENTITY, Vector2::new(-1.0, -1.0), Matrix2::new(1.0, 0.0, 0.5, 1.0))
        .validated()
        .expect("E1 is valid")
}

/// Correlated covariance and a non-symmetric reflection matrix.
pub fn skewed() -> Srbm {
    let r = Matrix2::new(1.3, -0.6, 0.9, 1.1);
    let mu = -(r * Vector2::new(0.8, 0.5));
    SrbmData::new(Matrix2::new(1.5, -0.4, -0.4, 0.8), mu, r)
        .validated()
        .expect("fixture is valid")
}

pub fn all() -> [(&'static str, Srbm); 3] {
    [("identity", identity()), ("e1", e1()), ("skewed", skewed())]
}

/// Directions evenly spaced in angle over the closed quadrant.
pub fn directions(n: usize) -> Vec<Vector2> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
            Vector2::new(t.cos(), t.sin())
        })
        .collect()
}
