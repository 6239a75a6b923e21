//! Hyperbolic plane primitives in the hyperboloid model.
//!
//! Points live on the upper sheet of `<x,x> = -1` where `<.,.>` is the
//! Minkowski form `-x0*y0 + x1*y1 + x2*y2`. Geodesics are intersections with
//! planes through the origin and are represented by their unit spacelike
//! normal. All consumers outside this module see only distances.

use crate::scalar::Real;

/// A point on the upper hyperboloid sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint<F: Real> {
    pub coords: [F; 3],
}

/// A complete geodesic, stored as a unit spacelike Minkowski normal.
#[derive(Debug, Clone, Copy)]
pub struct Wall<F: Real> {
    pub normal: [F; 3],
}

pub fn minkowski_dot<F: Real>(a: &[F; 3], b: &[F; 3]) -> F {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl<F: Real> HPoint<F> {
    /// The basepoint (1, 0, 0).
    pub fn origin() -> Self {
        HPoint {
            coords: [F::one(), F::zero(), F::zero()],
        }
    }

    /// Rescales onto the hyperboloid sheet; counters accumulated roundoff.
    pub fn normalized(self) -> Self {
        let q = -minkowski_dot(&self.coords, &self.coords);
        let s = q.sqrt().recip();
        HPoint {
            coords: [self.coords[0] * s, self.coords[1] * s, self.coords[2] * s],
        }
    }

    pub fn distance_to(&self, other: &HPoint<F>) -> F {
        let c = -minkowski_dot(&self.coords, &other.coords);
        c.acosh_clamped()
    }

    /// Minkowski cosh of the distance; monotone proxy used in inner loops.
    pub fn cosh_distance_to(&self, other: &HPoint<F>) -> F {
        -minkowski_dot(&self.coords, &other.coords)
    }

    /// Signed side of a wall: positive/negative half-planes, zero on the wall.
    pub fn side_of(&self, wall: &Wall<F>) -> F {
        minkowski_dot(&self.coords, &wall.normal)
    }

    /// Distance from the point to a complete geodesic.
    pub fn distance_to_wall(&self, wall: &Wall<F>) -> F {
        self.side_of(wall).abs().asinh()
    }
}

impl<F: Real> Wall<F> {
    /// The geodesic through two distinct points.
    pub fn through(a: &HPoint<F>, b: &HPoint<F>) -> Self {
        // Euclidean cross product, then lower the first index with the form.
        let p = &a.coords;
        let q = &b.coords;
        let cross = [
            p[1] * q[2] - p[2] * q[1],
            p[2] * q[0] - p[0] * q[2],
            p[0] * q[1] - p[1] * q[0],
        ];
        let u = [-cross[0], cross[1], cross[2]];
        let norm = minkowski_dot(&u, &u).sqrt();
        Wall {
            normal: [u[0] / norm, u[1] / norm, u[2] / norm],
        }
    }

    /// Reflection across the wall as an isometry matrix.
    pub fn reflection(&self) -> Isometry<F> {
        let u = self.normal;
        let bu = [-u[0], u[1], u[2]];
        let two = F::from_f64_const(2.0);
        let mut m = Isometry::identity();
        for i in 0..3 {
            for j in 0..3 {
                m.mat[i][j] = m.mat[i][j] - two * u[i] * bu[j];
            }
        }
        m
    }
}

/// Orientation-agnostic isometry of the hyperboloid (3x3 matrix preserving
/// the Minkowski form).
#[derive(Debug, Clone, Copy)]
pub struct Isometry<F: Real> {
    pub mat: [[F; 3]; 3],
}

impl<F: Real> Isometry<F> {
    pub fn identity() -> Self {
        let z = F::zero();
        let o = F::one();
        Isometry {
            mat: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// Translation by distance `t` along the geodesic through the origin in
    /// the x1 direction.
    pub fn translation_x(t: F) -> Self {
        let z = F::zero();
        let o = F::one();
        let c = t.cosh();
        let s = t.sinh();
        Isometry {
            mat: [[c, s, z], [s, c, z], [z, z, o]],
        }
    }

    /// Rotation by `theta` about the origin.
    pub fn rotation(theta: F) -> Self {
        let z = F::zero();
        let o = F::one();
        let c = theta.cos();
        let s = theta.sin();
        Isometry {
            mat: [[o, z, z], [z, c, -s], [z, s, c]],
        }
    }

    pub fn apply(&self, p: &HPoint<F>) -> HPoint<F> {
        let x = &p.coords;
        let m = &self.mat;
        HPoint {
            coords: [
                m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
                m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
                m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
            ],
        }
    }

    /// Pushes a wall normal through the isometry (normals transform like
    /// points because the matrix preserves the form).
    pub fn apply_wall(&self, w: &Wall<F>) -> Wall<F> {
        let p = HPoint { coords: w.normal };
        Wall {
            normal: self.apply(&p).coords,
        }
    }

    pub fn compose(&self, rhs: &Isometry<F>) -> Isometry<F> {
        let a = &self.mat;
        let b = &rhs.mat;
        let mut out = [[F::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Isometry { mat: out }
    }
}

/// Point at arc length `s` from `a` along the geodesic toward `b`.
pub fn point_along<F: Real>(a: &HPoint<F>, b: &HPoint<F>, s: F) -> HPoint<F> {
    let d = a.distance_to(b);
    if d == F::zero() {
        return *a;
    }
    let sh = d.sinh();
    let ch = d.cosh();
    // Unit tangent at a toward b.
    let mut t = [F::zero(); 3];
    for i in 0..3 {
        t[i] = (b.coords[i] - a.coords[i] * ch) / sh;
    }
    let cs = s.cosh();
    let ss = s.sinh();
    HPoint {
        coords: [
            a.coords[0] * cs + t[0] * ss,
            a.coords[1] * cs + t[1] * ss,
            a.coords[2] * cs + t[2] * ss,
        ],
    }
    .normalized()
}

/// Unit tangent vector at `a` pointing toward `b` (Minkowski-orthogonal
/// to `a`). Used for the right-angle checks on charts.
pub fn tangent<F: Real>(a: &HPoint<F>, b: &HPoint<F>) -> [F; 3] {
    let d = a.distance_to(b);
    let sh = d.sinh();
    let ch = d.cosh();
    let mut t = [F::zero(); 3];
    for i in 0..3 {
        t[i] = (b.coords[i] - a.coords[i] * ch) / sh;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_moves_origin_by_t() {
        let t = 1.25_f64;
        let p = Isometry::translation_x(t).apply(&HPoint::origin());
        assert!((p.distance_to(&HPoint::origin()) - t).abs() < 1e-12);
    }

    #[test]
    fn reflection_is_isometric_involution() {
        let a = Isometry::translation_x(0.7_f64).apply(&HPoint::origin());
        let b = Isometry::rotation(1.1)
            .compose(&Isometry::translation_x(1.3))
            .apply(&HPoint::origin());
        let w = Wall::through(&a, &b);
        let r = w.reflection();
        // Fixes the defining points, preserves distances, squares to identity.
        assert!(r.apply(&a).distance_to(&a) < 1e-7);
        assert!(r.apply(&b).distance_to(&b) < 1e-7);
        let c = Isometry::rotation(-0.4)
            .compose(&Isometry::translation_x(2.0))
            .apply(&HPoint::origin());
        let rc = r.apply(&c);
        assert!((rc.distance_to(&a) - c.distance_to(&a)).abs() < 1e-12);
        assert!(r.apply(&rc).distance_to(&c) < 1e-7);
    }

    #[test]
    fn point_along_interpolates_distance() {
        let a = HPoint::<f64>::origin();
        let b = Isometry::rotation(0.3)
            .compose(&Isometry::translation_x(2.0))
            .apply(&HPoint::origin());
        let p = point_along(&a, &b, 0.75);
        assert!((a.distance_to(&p) - 0.75).abs() < 1e-12);
        assert!((p.distance_to(&b) - (a.distance_to(&b) - 0.75)).abs() < 1e-12);
    }

    #[test]
    fn wall_distance_matches_foot() {
        let a = Isometry::translation_x(-1.0_f64).apply(&HPoint::origin());
        let b = Isometry::translation_x(1.0).apply(&HPoint::origin());
        let w = Wall::through(&a, &b);
        // The wall is the x-axis geodesic; a rotated-off point at distance d.
        let p = Isometry::rotation(std::f64::consts::FRAC_PI_2)
            .compose(&Isometry::translation_x(0.9))
            .apply(&HPoint::origin());
        assert!((p.distance_to_wall(&w) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn generic_over_f32_smoke() {
        let t = 0.5_f32;
        let p = Isometry::translation_x(t).apply(&HPoint::origin());
        assert!((p.distance_to(&HPoint::origin()) - t).abs() < 1e-5);
    }
}

