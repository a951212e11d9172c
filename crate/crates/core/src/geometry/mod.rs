//! Image-space measurement geometry.
//!
//! Coordinates are image pixels with the origin at the top-left corner and y
//! growing downward. Positive rotation turns clockwise on screen.

mod polygon;
mod transform;

pub use polygon::{hit_test, Outline};
pub use transform::{apply_transform, RigidTransform};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("invalid calibration: {0} mm/px (must be positive and finite)")]
    InvalidCalibration(f64),
    #[error("invalid calibration reference: marker {marker_mm} mm over {marker_px} px")]
    InvalidReference { marker_px: f64, marker_mm: f64 },
    #[error("outline needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("outline vertex {0} repeats its predecessor")]
    RepeatedVertex(usize),
    #[error("outline has zero area")]
    ZeroArea,
    #[error("outline edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
}

/// A point in image pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointPx {
    pub x: f64,
    pub y: f64,
}

impl PointPx {
    pub const ORIGIN: PointPx = PointPx { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        PointPx { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: PointPx) -> f64 {
        libm::hypot(other.x - self.x, other.y - self.y)
    }

    pub(crate) fn check(self) -> Result<Self, GeometryError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(GeometryError::NonFinite)
        }
    }
}

/// A directed segment from `a` to `b`; the acetabulum diameter line.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentPx {
    pub a: PointPx,
    pub b: PointPx,
}

impl SegmentPx {
    pub const fn new(a: PointPx, b: PointPx) -> Self {
        SegmentPx { a, b }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn midpoint(&self) -> PointPx {
        PointPx::new((self.a.x + self.b.x) / 2.0, (self.a.y + self.b.y) / 2.0)
    }

    /// Direction of `a -> b` in degrees, in `(-180, 180]`.
    pub fn angle_deg(&self) -> f64 {
        libm::atan2(self.b.y - self.a.y, self.b.x - self.a.x).to_degrees()
    }

    pub fn reversed(&self) -> Self {
        SegmentPx::new(self.b, self.a)
    }
}

/// Euclidean length of `s` in pixels.
pub fn distance_px(s: &SegmentPx) -> Result<f64, GeometryError> {
    if !s.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    Ok(s.a.distance(s.b))
}

/// Isotropic pixel-to-millimeter scale.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Calibration {
    mm_per_px: f64,
}

impl Calibration {
    pub fn new(mm_per_px: f64) -> Result<Self, GeometryError> {
        if mm_per_px.is_finite() && mm_per_px > 0.0 {
            Ok(Calibration { mm_per_px })
        } else {
            Err(GeometryError::InvalidCalibration(mm_per_px))
        }
    }

    pub fn mm_per_px(&self) -> f64 {
        self.mm_per_px
    }

    pub fn px_to_mm(&self, px: f64) -> f64 {
        px * self.mm_per_px
    }

    pub fn mm_to_px(&self, mm: f64) -> f64 {
        mm / self.mm_per_px
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Calibration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            mm_per_px: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        Calibration::new(raw.mm_per_px).map_err(serde::de::Error::custom)
    }
}

/// Derives the scale from a marker of known physical length.
pub fn calibrate_from_reference(marker_px: f64, marker_mm: f64) -> Result<Calibration, GeometryError> {
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !valid(marker_px) || !valid(marker_mm) {
        return Err(GeometryError::InvalidReference { marker_px, marker_mm });
    }
    Calibration::new(marker_mm / marker_px)
}
