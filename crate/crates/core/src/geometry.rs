//! Plain 2-vectors and 2×2 matrices.
//!
//! Everything in this crate lives in the plane, so a pair of small `Copy`
//! types is all the linear algebra we need.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or direction in the plane (θ-space or state space).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { x1: 0.0, x2: 0.0 };
    pub const E1: Vector2 = Vector2 { x1: 1.0, x2: 0.0 };
    pub const E2: Vector2 = Vector2 { x1: 0.0, x2: 1.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Vector2 { x1, x2 }
    }

    /// Unit vector of axis `i` (1-based).
    pub fn unit(i: usize) -> Self {
        match i {
            1 => Self::E1,
            2 => Self::E2,
            _ => panic!("axis index must be 1 or 2, got {i}"),
        }
    }

    /// Component `i` (1-based).
    pub fn get(&self, i: usize) -> f64 {
        match i {
            1 => self.x1,
            2 => self.x2,
            _ => panic!("component index must be 1 or 2, got {i}"),
        }
    }

    pub fn dot(self, other: Vector2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// `self × other`, positive when `other` is counter-clockwise from `self`.
    pub fn cross(self, other: Vector2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs())
    }

    /// Exchange the two coordinates.
    pub fn swap(self) -> Self {
        Vector2::new(self.x2, self.x1)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Strict componentwise order `self < other`.
    pub fn lt(self, other: Vector2) -> bool {
        self.x1 < other.x1 && self.x2 < other.x2
    }

    /// Componentwise order `self <= other`.
    pub fn le(self, other: Vector2) -> bool {
        self.x1 <= other.x1 && self.x2 <= other.x2
    }

    pub fn is_nonnegative(self) -> bool {
        self.x1 >= 0.0 && self.x2 >= 0.0
    }

    pub fn distance(self, other: Vector2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vector2 {
    type Output = Vector2;
    fn add(self, rhs: Vector2) -> Vector2 {
        Vector2::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for Vector2 {
    type Output = Vector2;
    fn sub(self, rhs: Vector2) -> Vector2 {
        Vector2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Neg for Vector2 {
    type Output = Vector2;
    fn neg(self) -> Vector2 {
        Vector2::new(-self.x1, -self.x2)
    }
}

impl Mul<Vector2> for f64 {
    type Output = Vector2;
    fn mul(self, rhs: Vector2) -> Vector2 {
        Vector2::new(self * rhs.x1, self * rhs.x2)
    }
}

impl Mul<f64> for Vector2 {
    type Output = Vector2;
    fn mul(self, rhs: f64) -> Vector2 {
        rhs * self
    }
}

/// Row-major 2×2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn to_rows(self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a21, self.a22]]
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Matrix2::new(d1, 0.0, 0.0, d2)
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (1, 1) => self.a11,
            (1, 2) => self.a12,
            (2, 1) => self.a21,
            (2, 2) => self.a22,
            _ => panic!("matrix index out of range: ({i}, {j})"),
        }
    }

    /// Column `j` (1-based).
    pub fn column(&self, j: usize) -> Vector2 {
        Vector2::new(self.get(1, j), self.get(2, j))
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn transpose(&self) -> Matrix2 {
        Matrix2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Inverse via the adjugate. Callers guarantee a nonzero determinant.
    pub fn inverse(&self) -> Matrix2 {
        let d = self.det();
        Matrix2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)
    }

    /// Matrix with only the diagonal of `self`.
    pub fn diagonal(&self) -> Matrix2 {
        Matrix2::diag(self.a11, self.a22)
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Conjugation by the coordinate swap, `P A P` with `P = [[0,1],[1,0]]`.
    pub fn swap(&self) -> Matrix2 {
        Matrix2::new(self.a22, self.a21, self.a12, self.a11)
    }

    /// Quadratic form `⟨x, A y⟩`.
    pub fn form(&self, x: Vector2, y: Vector2) -> f64 {
        x.dot(*self * y)
    }

    /// Lower Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky_lower(&self) -> Matrix2 {
        let l11 = self.a11.sqrt();
        let l21 = self.a21 / l11;
        let l22 = (self.a22 - l21 * l21).sqrt();
        Matrix2::new(l11, 0.0, l21, l22)
    }

    /// Eigen-decomposition of a symmetric matrix: eigenvalues `(λ1, λ2)` in
    /// descending order and the unit eigenvector of `λ1`. The second
    /// eigenvector is its counter-clockwise rotation by a right angle.
    pub fn symmetric_eigen(&self) -> (f64, f64, Vector2) {
        let half_trace = 0.5 * (self.a11 + self.a22);
        let half_gap = 0.5 * (self.a11 - self.a22);
        let off = 0.5 * (self.a12 + self.a21);
        let radius = half_gap.hypot(off);
        let l1 = half_trace + radius;
        let l2 = half_trace - radius;
        let angle = 0.5 * off.atan2(half_gap);
        (l1, l2, Vector2::new(angle.cos(), angle.sin()))
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Mul<Vector2> for Matrix2 {
    type Output = Vector2;
    fn mul(self, v: Vector2) -> Vector2 {
        Vector2::new(
            self.a11 * v.x1 + self.a12 * v.x2,
            self.a21 * v.x1 + self.a22 * v.x2,
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, b: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * b.a11 + self.a12 * b.a21,
            self.a11 * b.a12 + self.a12 * b.a22,
            self.a21 * b.a11 + self.a22 * b.a21,
            self.a21 * b.a12 + self.a22 * b.a22,
        )
    }
}

impl Mul<Matrix2> for f64 {
    type Output = Matrix2;
    fn mul(self, m: Matrix2) -> Matrix2 {
        Matrix2::new(self * m.a11, self * m.a12, self * m.a21, self * m.a22)
    }
}

/// Roots of `a t² + b t + c = 0` (a ≠ 0) in ascending order, computed
/// without cancellation. `None` when the discriminant is negative beyond
/// roundoff.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    let disc = if disc < 0.0 && disc > -1e-12 * scale {
        0.0
    } else {
        disc
    };
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a, c / q)
    };
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}
