//! Support oracle of the Minkowski difference `D = A1 - A2`.
//!
//! The shapes intersect iff the origin lies in `D`, and their distance is the
//! distance from the origin to `D`. Every support point carries its two
//! witness points so closest points fall out of the barycentric coordinates.

use std::sync::Arc;

use crate::shapes::{posed_support, ConvexShape, Pose};
use crate::{Result, Vec3};

/// Two posed shapes plus the hill-climbing warm-start hints of the current
/// query. Cloning is cheap: shapes are shared.
#[derive(Debug, Clone)]
pub struct CollisionPair {
    pub shape1: Arc<ConvexShape>,
    pub pose1: Pose,
    pub shape2: Arc<ConvexShape>,
    pub pose2: Pose,
    hints: [Option<usize>; 2],
}

impl CollisionPair {
    pub fn new(
        shape1: Arc<ConvexShape>,
        pose1: Pose,
        shape2: Arc<ConvexShape>,
        pose2: Pose,
    ) -> Self {
        let hints = [hint_for(&shape1), hint_for(&shape2)];
        CollisionPair {
            shape1,
            pose1,
            shape2,
            pose2,
            hints,
        }
    }

    pub fn from_shapes(shape1: ConvexShape, pose1: Pose, shape2: ConvexShape, pose2: Pose) -> Self {
        Self::new(Arc::new(shape1), pose1, Arc::new(shape2), pose2)
    }

    pub fn hints(&self) -> [Option<usize>; 2] {
        self.hints
    }

    pub fn set_hints(&mut self, hints: [Option<usize>; 2]) {
        self.hints = hints;
    }

    /// Resets mesh hints to vertex 0.
    pub fn reset_hints(&mut self) {
        self.hints = [hint_for(&self.shape1), hint_for(&self.shape2)];
    }

    /// Same pair with shape 2 moved by `offset`.
    pub fn with_shape2_translated(&self, offset: &Vec3) -> Self {
        let mut pair = self.clone();
        pair.pose2 = self.pose2.translated(offset);
        pair.reset_hints();
        pair
    }

    /// `s_D(d) = s_A1(d) - s_A2(-d)`, minimizing `<x, d>` over `D`.
    /// Uses the stored hints but does not update them.
    pub fn support_difference(&self, d: &Vec3) -> Result<SupportPair> {
        let s1 = posed_support(&self.shape1, &self.pose1, d, self.hints[0])?;
        let s2 = posed_support(&self.shape2, &self.pose2, &-d, self.hints[1])?;
        Ok(SupportPair {
            w1: s1.point,
            w2: s2.point,
            hints: [s1.vertex_index, s2.vertex_index],
        })
    }

    /// Support call that also stores the returned vertex indices as the
    /// next warm start.
    pub fn support_difference_mut(&mut self, d: &Vec3) -> Result<SupportPair> {
        let sp = self.support_difference(d)?;
        self.hints = sp.hints;
        Ok(sp)
    }
}

fn hint_for(shape: &ConvexShape) -> Option<usize> {
    shape.is_mesh().then_some(0)
}

/// Support point of `D` with its witnesses on each posed shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportPair {
    pub w1: Vec3,
    pub w2: Vec3,
    pub hints: [Option<usize>; 2],
}

impl SupportPair {
    /// Point of `D`: `w1 - w2`.
    #[inline]
    pub fn p(&self) -> Vec3 {
        self.w1 - self.w2
    }
}

/// Frank-Wolfe duality gap `<x, x - s>` of `f(x) = |x|^2 / 2` at `x`, where
/// `s` is a support point of `D` in direction `x`.
#[inline]
pub fn duality_gap(x: &Vec3, s: &Vec3) -> f64 {
    x.dot(&(x - s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{Cuboid, Sphere};

    #[test]
    fn collinear_spheres() {
        let s = ConvexShape::from(Sphere::new(1.0).unwrap());
        let pair = CollisionPair::from_shapes(
            s.clone(),
            Pose::identity(),
            s,
            Pose::from_translation(Vec3::new(3.0, 0.0, 0.0)),
        );
        let sp = pair.support_difference(&Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        assert_eq!(sp.w1, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(sp.w2, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(sp.p(), Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn boxes_match_corner_brute_force() {
        let b = Cuboid::new(Vec3::repeat(0.5)).unwrap();
        let pose2 = Pose::from_translation(Vec3::new(0.0, 0.0, 5.0));
        let pair = CollisionPair::from_shapes(b.into(), Pose::identity(), b.into(), pose2);
        let d = Vec3::z();
        let sp = pair.support_difference(&d).unwrap();
        assert_eq!(sp.p(), Vec3::new(0.0, 0.0, -6.0));

        let corners: Vec<Vec3> = (0..8)
            .map(|k| {
                Vec3::new(
                    if k & 1 == 0 { -0.5 } else { 0.5 },
                    if k & 2 == 0 { -0.5 } else { 0.5 },
                    if k & 4 == 0 { -0.5 } else { 0.5 },
                )
            })
            .collect();
        let best = corners
            .iter()
            .flat_map(|a| corners.iter().map(move |b| (a - (b + pose2.translation())).dot(&d)))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(sp.p().dot(&d), best);
    }

    #[test]
    fn self_difference_contains_origin() {
        let b = ConvexShape::from(Cuboid::new(Vec3::new(0.3, 0.2, 0.7)).unwrap());
        let pose = Pose::from_axis_angle(Vec3::new(0.1, 0.4, -0.2), Vec3::new(1.0, 2.0, 3.0));
        let pair = CollisionPair::from_shapes(b.clone(), pose, b, pose);
        for d in [Vec3::x(), Vec3::new(-1.0, 2.0, 0.3), Vec3::new(0.0, -1.0, -1.0)] {
            assert!(pair.support_difference(&d).unwrap().p().dot(&d) <= 0.0);
        }
    }

    #[test]
    fn gap_values() {
        assert_eq!(duality_gap(&Vec3::x(), &-Vec3::x()), 2.0);
        let x = Vec3::new(0.3, -0.1, 2.0);
        assert_eq!(duality_gap(&x, &x), 0.0);
        // 1-D projection: x = 1, s = 0.25 along y gives 1 * (1 - 0.25).
        let g = duality_gap(&Vec3::y(), &Vec3::new(0.0, 0.25, 0.0));
        let scalar = 1.0_f64 * (1.0 - 0.25);
        assert_eq!(g, scalar);
        assert_eq!(g, 0.75);
    }
}
