//! Convex scalar functions with subgradients and Lipschitz certificates.
//!
//! These carry both the per-round costs `f_t` and the constraint functions
//! `g_t`. The canonical constraint is the set margin `x -> dist(x, G_t)`,
//! which is 1-Lipschitz and ties the violation directly to the geometry of
//! the revealed sets; affine margins cover the one-dimensional construction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::ConvexSet;
use crate::vector::Vector;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `a . x + b`
    Affine {
        slope: Vector,
        intercept: f64,
    },
    /// `c ||x - a||^2`, `c > 0`
    Quadratic {
        scale: f64,
        center: Vector,
    },
    /// `c x_1^2`, the one-dimensional worst-case cost embedded in any d
    ScaledSquare {
        scale: f64,
    },
    Zero,
    /// `dist(x, set)`: zero inside, Euclidean distance outside
    SetMargin {
        set: ConvexSet,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalarConvexFunction {
    pub kind: FunctionKind,
    /// Certified bound on the subgradient norm over the admissible set.
    pub lipschitz_bound: f64,
}

impl ScalarConvexFunction {
    pub fn affine(slope: Vector, intercept: f64) -> Self {
        let lip = slope.norm();
        ScalarConvexFunction {
            kind: FunctionKind::Affine { slope, intercept },
            lipschitz_bound: lip,
        }
    }

    /// `c ||x - a||^2`; the Lipschitz bound must cover the admissible set
    /// (`2c * max ||x - a||`), so the caller supplies it.
    pub fn quadratic(scale: f64, center: Vector, lipschitz_bound: f64) -> Self {
        ScalarConvexFunction {
            kind: FunctionKind::Quadratic { scale, center },
            lipschitz_bound,
        }
    }

    pub fn scaled_square(scale: f64, lipschitz_bound: f64) -> Self {
        ScalarConvexFunction {
            kind: FunctionKind::ScaledSquare { scale },
            lipschitz_bound,
        }
    }

    pub fn zero() -> Self {
        ScalarConvexFunction {
            kind: FunctionKind::Zero,
            lipschitz_bound: 0.0,
        }
    }

    pub fn set_margin(set: ConvexSet) -> Self {
        ScalarConvexFunction {
            kind: FunctionKind::SetMargin { set },
            lipschitz_bound: 1.0,
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        Ok(match &self.kind {
            FunctionKind::Affine { slope, intercept } => slope.dot(x) + intercept,
            FunctionKind::Quadratic { scale, center } => {
                let d = x.sub(center);
                scale * d.dot(&d)
            }
            FunctionKind::ScaledSquare { scale } => scale * x[0] * x[0],
            FunctionKind::Zero => 0.0,
            FunctionKind::SetMargin { set } => set.distance(x)?,
        })
    }

    /// A valid subgradient at `x`. At the kink of `SetMargin` (distance below
    /// `1e-10`) the zero vector is returned.
    pub fn subgradient(&self, x: &Vector) -> Result<Vector> {
        Ok(match &self.kind {
            FunctionKind::Affine { slope, .. } => slope.clone(),
            FunctionKind::Quadratic { scale, center } => x.sub(center).scale(2.0 * scale),
            FunctionKind::ScaledSquare { scale } => {
                let mut g = Vector::zeros(x.dim());
                g[0] = 2.0 * scale * x[0];
                g
            }
            FunctionKind::Zero => Vector::zeros(x.dim()),
            FunctionKind::SetMargin { set } => {
                let p = set.project(x)?;
                let dist = x.dist(&p);
                if dist > 1e-10 {
                    x.sub(&p).scale(1.0 / dist)
                } else {
                    Vector::zeros(x.dim())
                }
            }
        })
    }

    /// Strong convexity modulus, zero unless the function is a full quadratic
    /// (a coordinate square is only strongly convex in one dimension).
    pub fn strong_convexity(&self, d: usize) -> f64 {
        match &self.kind {
            FunctionKind::Quadratic { scale, .. } => 2.0 * scale,
            FunctionKind::ScaledSquare { scale } if d == 1 => 2.0 * scale,
            _ => 0.0,
        }
    }

    /// Worst central-difference error over coordinates, for verifying the
    /// subgradient at smooth points.
    pub fn check_gradient(&self, x: &Vector, h: f64) -> Result<f64> {
        let g = self.subgradient(x)?;
        let mut worst = 0.0f64;
        for i in 0..x.dim() {
            let mut plus = x.clone();
            plus[i] += h;
            let mut minus = x.clone();
            minus[i] -= h;
            let fd = (self.eval(&plus)? - self.eval(&minus)?) / (2.0 * h);
            worst = worst.max((fd - g[i]).abs());
        }
        Ok(worst)
    }
}

/// `max(z, 0)`.
pub fn positive_part(z: f64) -> f64 {
    z.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball;

    #[test]
    fn eval_closed_forms() {
        let q = ScalarConvexFunction::quadratic(1.0, Vector::zeros(2), 10.0);
        assert_eq!(q.eval(&Vector::from_slice(&[3.0, 4.0])).unwrap(), 25.0);
        let z = ScalarConvexFunction::zero();
        assert_eq!(z.eval(&Vector::from_slice(&[9.0, -1.0])).unwrap(), 0.0);
        let m = ScalarConvexFunction::set_margin(ball(&[0.0, 0.0], 1.0));
        assert!((m.eval(&Vector::from_slice(&[2.0, 0.0])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subgradients() {
        let q = ScalarConvexFunction::quadratic(1.0, Vector::zeros(2), 10.0);
        assert_eq!(
            q.subgradient(&Vector::from_slice(&[1.0, 0.0])).unwrap(),
            Vector::from_slice(&[2.0, 0.0])
        );
        let m = ScalarConvexFunction::set_margin(ball(&[0.0, 0.0], 1.0));
        let g = m.subgradient(&Vector::from_slice(&[2.0, 0.0])).unwrap();
        assert!(g.dist(&Vector::from_slice(&[1.0, 0.0])) < 1e-12);
        let a = ScalarConvexFunction::affine(Vector::from_slice(&[3.0, -1.0]), 7.0);
        assert_eq!(
            a.subgradient(&Vector::from_slice(&[5.0, 5.0])).unwrap(),
            Vector::from_slice(&[3.0, -1.0])
        );
        // inside the set the margin is flat
        let inside = m.subgradient(&Vector::from_slice(&[0.2, 0.1])).unwrap();
        assert_eq!(inside, Vector::zeros(2));
    }

    #[test]
    fn positive_part_cases() {
        assert_eq!(positive_part(-2.0), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(3.5), 3.5);
    }

    #[test]
    fn gradient_check_bounds() {
        let q = ScalarConvexFunction::quadratic(2.0, Vector::zeros(2), 100.0);
        let err = q
            .check_gradient(&Vector::from_slice(&[1.0, 1.0]), 1e-5)
            .unwrap();
        assert!(err <= 1e-6, "quadratic central difference error {err}");

        let a = ScalarConvexFunction::affine(Vector::from_slice(&[3.0, -1.0]), 7.0);
        let err = a
            .check_gradient(&Vector::from_slice(&[0.3, 0.4]), 1e-5)
            .unwrap();
        assert!(err <= 1e-9, "affine error {err}");

        let z = ScalarConvexFunction::zero();
        assert_eq!(
            z.check_gradient(&Vector::from_slice(&[1.0, 2.0]), 1e-5)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn strong_convexity_moduli() {
        let q = ScalarConvexFunction::quadratic(3.0, Vector::zeros(2), 1.0);
        assert_eq!(q.strong_convexity(2), 6.0);
        let s = ScalarConvexFunction::scaled_square(10.0, 80.0);
        assert_eq!(s.strong_convexity(1), 20.0);
        assert_eq!(s.strong_convexity(2), 0.0);
        assert_eq!(ScalarConvexFunction::zero().strong_convexity(3), 0.0);
    }
}
