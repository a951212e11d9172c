use super::{GeometryError, PointPx};

/// A rotation about `pivot` followed by a translation by `(dx, dy)`.
///
/// `apply(p) = R(rotation_deg) * (p - pivot) + pivot + (dx, dy)`. With y
/// pointing down, a positive angle turns clockwise on screen, so a quarter
/// turn maps `(1, 0)` to `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RigidTransform {
    pub rotation_deg: f64,
    pub pivot: PointPx,
    pub dx: f64,
    pub dy: f64,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// `deg` wrapped into `[0, 360)`.
fn wrap_deg(deg: f64) -> f64 {
    let r = libm::fmod(deg, 360.0);
    if r < 0.0 {
        let r = r + 360.0;
        if r >= 360.0 {
            0.0
        } else {
            r
        }
    } else {
        r
    }
}

/// Sine and cosine of an angle in degrees, exact on quarter turns.
fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let turns = wrap_deg(deg);
    if turns == 0.0 {
        (0.0, 1.0)
    } else if turns == 90.0 {
        (1.0, 0.0)
    } else if turns == 180.0 {
        (0.0, -1.0)
    } else if turns == 270.0 {
        (-1.0, 0.0)
    } else {
        libm::sincos(deg.to_radians())
    }
}

/// Maps an angle into `(-180, 180]`.
fn normalize_deg(deg: f64) -> f64 {
    let r = wrap_deg(deg);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation_deg: 0.0,
        pivot: PointPx::ORIGIN,
        dx: 0.0,
        dy: 0.0,
    };

    pub const fn new(rotation_deg: f64, pivot: PointPx, dx: f64, dy: f64) -> Self {
        RigidTransform { rotation_deg, pivot, dx, dy }
    }

    pub const fn translation(dx: f64, dy: f64) -> Self {
        RigidTransform::new(0.0, PointPx::ORIGIN, dx, dy)
    }

    pub const fn rotation(rotation_deg: f64, pivot: PointPx) -> Self {
        RigidTransform::new(rotation_deg, pivot, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.rotation_deg.is_finite() && self.pivot.is_finite() && self.dx.is_finite() && self.dy.is_finite()
    }

    pub fn validate(self) -> Result<Self, GeometryError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    /// Translation part of the equivalent `p -> R p + offset` form.
    fn offset(&self, sin: f64, cos: f64) -> (f64, f64) {
        let PointPx { x: px, y: py } = self.pivot;
        (
            px - (cos * px - sin * py) + self.dx,
            py - (sin * px + cos * py) + self.dy,
        )
    }

    /// Builds the transform `p -> R(rotation_deg) p + offset` expressed about `pivot`.
    fn from_offset(rotation_deg: f64, pivot: PointPx, offset: (f64, f64)) -> Self {
        let (sin, cos) = sin_cos_deg(rotation_deg);
        let rotated_pivot = (cos * pivot.x - sin * pivot.y, sin * pivot.x + cos * pivot.y);
        RigidTransform {
            rotation_deg,
            pivot,
            dx: offset.0 - pivot.x + rotated_pivot.0,
            dy: offset.1 - pivot.y + rotated_pivot.1,
        }
    }

    pub fn apply(&self, p: PointPx) -> PointPx {
        let (sin, cos) = sin_cos_deg(self.rotation_deg);
        let rx = p.x - self.pivot.x;
        let ry = p.y - self.pivot.y;
        PointPx::new(
            cos * rx - sin * ry + self.pivot.x + self.dx,
            sin * rx + cos * ry + self.pivot.y + self.dy,
        )
    }

    /// `self` applied after `inner`. The result keeps `inner`'s pivot so that
    /// a placement pose stays expressed about its anchor across edits.
    pub fn compose(&self, inner: &RigidTransform) -> RigidTransform {
        let (s1, c1) = sin_cos_deg(self.rotation_deg);
        let (s2, c2) = sin_cos_deg(inner.rotation_deg);
        let o1 = self.offset(s1, c1);
        let o2 = inner.offset(s2, c2);
        let offset = (c1 * o2.0 - s1 * o2.1 + o1.0, s1 * o2.0 + c1 * o2.1 + o1.1);
        let rotation = normalize_deg(self.rotation_deg + inner.rotation_deg);
        RigidTransform::from_offset(rotation, inner.pivot, offset)
    }

    pub fn inverse(&self) -> RigidTransform {
        let (sin, cos) = sin_cos_deg(self.rotation_deg);
        let (ox, oy) = self.offset(sin, cos);
        // R^T * -offset
        let offset = (-(cos * ox + sin * oy), -(-sin * ox + cos * oy));
        RigidTransform::from_offset(normalize_deg(-self.rotation_deg), self.pivot, offset)
    }
}

/// Applies `t` to `p`.
pub fn apply_transform(t: &RigidTransform, p: PointPx) -> PointPx {
    t.apply(p)
}
