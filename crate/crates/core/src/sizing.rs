//! Measured diameter to catalog cup size.
//!
//! The measurement is floored to whole millimeters, an odd result drops to
//! the even size below it, and only then is the catalog range checked. No
//! step ever rounds up.

use core::fmt;

use thiserror::Error;

use crate::catalog::{ImplantCatalog, ImplantSpec, Side};
use crate::geometry::{distance_px, Calibration, GeometryError, SegmentPx};

/// Decimal places kept before flooring, so pixel arithmetic noise such as
/// `58 - 1e-13` still sizes as 58.
const GUARD_DECIMALS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RejectReason {
    BelowMin,
    AboveMax,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::BelowMin => "below_min",
            RejectReason::AboveMax => "above_max",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeOutcome {
    Accepted(u32),
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizingResult {
    /// Diameter before snapping, full precision.
    pub measured_mm: f64,
    pub outcome: SizeOutcome,
}

impl SizingResult {
    pub fn snapped_size_mm(&self) -> Option<u32> {
        match self.outcome {
            SizeOutcome::Accepted(size) => Some(size),
            SizeOutcome::Rejected(_) => None,
        }
    }

    pub fn rejected_reason(&self) -> Option<RejectReason> {
        match self.outcome {
            SizeOutcome::Accepted(_) => None,
            SizeOutcome::Rejected(reason) => Some(reason),
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self.outcome, SizeOutcome::Accepted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SizingError {
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no {side} implant of size {size_mm} mm in catalog")]
    NotFound { side: Side, size_mm: u32 },
}

/// Snaps a measured diameter to a catalog size.
pub fn snap_to_size(measured_mm: f64, catalog: &ImplantCatalog) -> Result<SizingResult, SizingError> {
    if !measured_mm.is_finite() {
        return Err(SizingError::InvalidMeasurement("measurement is not finite"));
    }
    if measured_mm <= 0.0 {
        return Err(SizingError::InvalidMeasurement("measurement must be positive"));
    }
    let guarded = libm::round(measured_mm * GUARD_DECIMALS) / GUARD_DECIMALS;
    // Saturating cast; anything huge lands far above the catalog anyway.
    let mut whole = libm::floor(guarded) as i64;
    if whole % 2 != 0 {
        whole -= 1;
    }
    let outcome = if whole < i64::from(catalog.min_size()) {
        SizeOutcome::Rejected(RejectReason::BelowMin)
    } else if whole > i64::from(catalog.max_size()) {
        SizeOutcome::Rejected(RejectReason::AboveMax)
    } else {
        SizeOutcome::Accepted(whole as u32)
    };
    Ok(SizingResult { measured_mm, outcome })
}

/// Measures `segment` in millimeters and snaps it to a catalog size.
pub fn measure_and_size(
    segment: &SegmentPx,
    calibration: &Calibration,
    catalog: &ImplantCatalog,
) -> Result<SizingResult, SizingError> {
    let px = distance_px(segment)?;
    if px == 0.0 {
        return Err(SizingError::InvalidMeasurement("zero-length segment"));
    }
    snap_to_size(calibration.px_to_mm(px), catalog)
}

/// Catalog entry for a snapped size on one side.
pub fn lookup_template(catalog: &ImplantCatalog, side: Side, size_mm: u32) -> Result<&ImplantSpec, SizingError> {
    catalog.lookup(side, size_mm)
}
