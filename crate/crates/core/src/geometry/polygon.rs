use alloc::vec::Vec;

use super::{GeometryError, PointPx, RigidTransform};

/// A simple closed polygon. The closing edge from the last vertex back to
/// the first is implicit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Outline {
    vertices: Vec<PointPx>,
}

fn cross(o: PointPx, a: PointPx, b: PointPx) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn within_box(p: PointPx, a: PointPx, b: PointPx) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Closed-segment intersection test (touching counts).
fn segments_touch(p1: PointPx, p2: PointPx, q1: PointPx, q2: PointPx) -> bool {
    let d1 = sign(cross(q1, q2, p1));
    let d2 = sign(cross(q1, q2, p2));
    let d3 = sign(cross(p1, p2, q1));
    let d4 = sign(cross(p1, p2, q2));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && within_box(p1, q1, q2))
        || (d2 == 0 && within_box(p2, q1, q2))
        || (d3 == 0 && within_box(q1, p1, p2))
        || (d4 == 0 && within_box(q2, p1, p2))
}

impl Outline {
    pub fn new(vertices: Vec<PointPx>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeometryError::RepeatedVertex((i + 1) % n));
            }
        }
        let outline = Outline { vertices };
        if outline.signed_area() == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        outline.check_simple()?;
        Ok(outline)
    }

    fn edge(&self, i: usize) -> (PointPx, PointPx) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    fn check_simple(&self) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        for i in 0..n {
            let (a1, a2) = self.edge(i);
            for j in (i + 1)..n {
                let (b1, b2) = self.edge(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Neighbours share one vertex; they must not fold back onto each other.
                    let (shared, other_a, other_b) = if j == i + 1 { (a2, a1, b2) } else { (a1, a2, b1) };
                    let folds = cross(shared, other_a, other_b) == 0.0
                        && (other_a.x - shared.x) * (other_b.x - shared.x) + (other_a.y - shared.y) * (other_b.y - shared.y) > 0.0;
                    if folds {
                        return Err(GeometryError::SelfIntersecting(i, j));
                    }
                } else if segments_touch(a1, a2, b1, b2) {
                    return Err(GeometryError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[PointPx] {
        &self.vertices
    }

    /// Shoelace area; positive when the vertices turn clockwise on screen.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = self.edge(i);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }

    /// Largest distance between any two vertices.
    pub fn max_vertex_distance(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                best = best.max(v[i].distance(v[j]));
            }
        }
        best
    }

    /// Scales about the origin, then moves the origin to `center`.
    pub fn scaled_about(&self, factor: f64, center: PointPx) -> Vec<PointPx> {
        self.vertices
            .iter()
            .map(|v| PointPx::new(center.x + v.x * factor, center.y + v.y * factor))
            .collect()
    }

    pub fn transformed(&self, t: &RigidTransform) -> Outline {
        Outline {
            vertices: self.vertices.iter().map(|&v| t.apply(v)).collect(),
        }
    }

    pub fn on_boundary(&self, p: PointPx) -> bool {
        (0..self.vertices.len()).any(|i| {
            let (a, b) = self.edge(i);
            let len = a.distance(b);
            within_box(p, a, b) && cross(a, b, p).abs() <= 1e-12 * len * len.max(1.0)
        })
    }

    /// Even-odd crossing test of a horizontal ray toward +x. Boundary points
    /// give an arbitrary answer; see [`hit_test`].
    pub fn contains_ray_casting(&self, p: PointPx) -> bool {
        let v = &self.vertices;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (vi, vj) = (v[i], v[j]);
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = (vj.x - vi.x) * (p.y - vi.y) / (vj.y - vi.y) + vi.x;
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Winding number of the outline around `p`.
    pub fn winding_number(&self, p: PointPx) -> i32 {
        let mut wn = 0;
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            if a.y <= p.y {
                if b.y > p.y && cross(a, b, p) > 0.0 {
                    wn += 1;
                }
            } else if b.y <= p.y && cross(a, b, p) < 0.0 {
                wn -= 1;
            }
        }
        wn
    }
}

/// True when `p` is inside `outline` or on its boundary.
pub fn hit_test(p: PointPx, outline: &Outline) -> Result<bool, GeometryError> {
    let p = p.check()?;
    Ok(outline.on_boundary(p) || outline.contains_ray_casting(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> Outline {
        Outline::new(vec![
            PointPx::new(0.0, 0.0),
            PointPx::new(1.0, 0.0),
            PointPx::new(1.0, 1.0),
            PointPx::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn regular(n: usize, r: f64, c: PointPx) -> Outline {
        let pts = (0..n)
            .map(|k| {
                let a = core::f64::consts::TAU * k as f64 / n as f64;
                PointPx::new(c.x + r * libm::cos(a), c.y + r * libm::sin(a))
            })
            .collect();
        Outline::new(pts).unwrap()
    }

    #[test]
    fn square_hits() {
        let sq = unit_square();
        assert_eq!(hit_test(PointPx::new(0.5, 0.5), &sq), Ok(true));
        assert_eq!(hit_test(PointPx::new(2.0, 2.0), &sq), Ok(false));
        assert_eq!(hit_test(PointPx::new(1.0, 0.5), &sq), Ok(true));
        assert_eq!(hit_test(PointPx::new(0.0, 0.0), &sq), Ok(true));
        assert_eq!(hit_test(PointPx::new(f64::NAN, 0.0), &sq), Err(GeometryError::NonFinite));
    }

    #[test]
    fn inscribed_circle_polygon() {
        let c = PointPx::new(100.0, 100.0);
        let poly = regular(64, 29.0, c);
        for (p, expected) in [(PointPx::new(100.0, 129.5), false), (PointPx::new(100.0, 128.0), true)] {
            // Outside the circumscribed circle is outside the polygon; inside the
            // inscribed circle (apothem r cos(pi/64)) is inside.
            let apothem = 29.0 * libm::cos(core::f64::consts::PI / 64.0);
            let oracle = p.distance(c) < apothem;
            assert!(p.distance(c) < apothem || p.distance(c) > 29.0);
            assert_eq!(oracle, expected);
            assert_eq!(hit_test(p, &poly), Ok(expected));
            assert_eq!(poly.winding_number(p) != 0, expected);
        }
    }

    #[test]
    fn rejects_degenerate_outlines() {
        assert_eq!(
            Outline::new(vec![PointPx::new(0.0, 0.0), PointPx::new(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices(2))
        );
        assert_eq!(
            Outline::new(vec![PointPx::new(0.0, 0.0), PointPx::new(1.0, 0.0), PointPx::new(2.0, 0.0)]),
            Err(GeometryError::ZeroArea)
        );
        let bowtie = Outline::new(vec![
            PointPx::new(0.0, 0.0),
            PointPx::new(2.0, 2.0),
            PointPx::new(2.0, 0.0),
            PointPx::new(0.0, 1.0),
        ]);
        assert!(matches!(bowtie, Err(GeometryError::SelfIntersecting(_, _))));
        let repeated = Outline::new(vec![
            PointPx::new(0.0, 0.0),
            PointPx::new(1.0, 0.0),
            PointPx::new(1.0, 0.0),
            PointPx::new(0.0, 1.0),
        ]);
        assert_eq!(repeated, Err(GeometryError::RepeatedVertex(2)));
        let spike = Outline::new(vec![
            PointPx::new(0.0, 0.0),
            PointPx::new(2.0, 0.0),
            PointPx::new(1.0, 0.0),
            PointPx::new(1.0, 1.0),
        ]);
        assert!(matches!(spike, Err(GeometryError::SelfIntersecting(_, _))));
        assert!(matches!(
            Outline::new(vec![PointPx::new(0.0, 0.0), PointPx::new(1.0, f64::NAN), PointPx::new(1.0, 1.0)]),
            Err(GeometryError::NonFinite)
        ));
    }

    #[test]
    fn concave_outline() {
        // U shape: notch between x in (1,2) for y < 2.
        let u = Outline::new(vec![
            PointPx::new(0.0, 0.0),
            PointPx::new(1.0, 0.0),
            PointPx::new(1.0, 2.0),
            PointPx::new(2.0, 2.0),
            PointPx::new(2.0, 0.0),
            PointPx::new(3.0, 0.0),
            PointPx::new(3.0, 3.0),
            PointPx::new(0.0, 3.0),
        ])
        .unwrap();
        assert_eq!(hit_test(PointPx::new(1.5, 1.0), &u), Ok(false));
        assert_eq!(hit_test(PointPx::new(1.5, 2.5), &u), Ok(true));
        assert_eq!(hit_test(PointPx::new(0.5, 1.0), &u), Ok(true));
        assert_eq!(u.signed_area(), 7.0);
    }
}
