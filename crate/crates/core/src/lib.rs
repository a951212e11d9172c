//! Acetabular cup templating core.
//!
//! Measures a diameter line drawn on a calibrated radiograph, snaps the
//! measurement to an even catalog cup size, places the cup outline over the
//! image and keeps the resulting plan record consistent. Everything here is
//! pure computation over values; file and network IO live in the `acetab`
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catalog;
pub mod evaluation;
pub mod fmt;
pub mod geometry;
pub mod plan_format;
pub mod planning;
pub mod sizing;

pub use catalog::{ImplantCatalog, ImplantKey, ImplantSpec, Side};
pub use evaluation::{compare, AgreementReport, ComparisonRow, EvalError, SizePair};
pub use geometry::{
    calibrate_from_reference, distance_px, hit_test, Calibration, GeometryError, Outline, PointPx,
    RigidTransform, SegmentPx,
};
pub use planning::{
    adjust_placement, default_placement, Gender, PatientInfo, Placement, PlanError, PlanRecord,
    Session, SessionError,
};
pub use sizing::{measure_and_size, snap_to_size, RejectReason, SizingError, SizingResult};
