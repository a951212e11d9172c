//! Implant placement, plan records and the per-image planning session.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::catalog::{ImplantCatalog, ImplantKey, ImplantSpec, Side};
use crate::geometry::{Calibration, Outline, PointPx, RigidTransform, SegmentPx};
use crate::sizing::{measure_and_size, SizingError, SizingResult};

/// A cup template positioned over the image.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Placement {
    pub implant: ImplantKey,
    /// Cumulative pose applied to the template as first placed.
    pub pose: RigidTransform,
    /// Current cup center in image space, i.e. the pose applied to the
    /// original measurement midpoint.
    pub anchor: PointPx,
}

impl Placement {
    /// Template outline in image pixels: the millimeter silhouette scaled by
    /// `1 / mm_per_px`, centered on the original anchor, then posed.
    pub fn outline_px(&self, outline: &Outline, calibration: &Calibration) -> Vec<PointPx> {
        let base = self.pose.inverse().apply(self.anchor);
        outline
            .scaled_about(1.0 / calibration.mm_per_px(), base)
            .into_iter()
            .map(|v| self.pose.apply(v))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("no placement: sizing was rejected or does not match the template")]
    NoPlacement,
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("field {field} is invalid: {reason}")]
    InvalidField { field: &'static str, reason: &'static str },
    #[error(transparent)]
    Sizing(#[from] SizingError),
}

/// Initial placement right after sizing: centered on the measurement
/// midpoint with the template diameter lying along the measured line.
pub fn default_placement(
    measurement: &SegmentPx,
    sizing: &SizingResult,
    spec: &ImplantSpec,
) -> Result<Placement, PlanError> {
    if sizing.snapped_size_mm() != Some(spec.size_mm) || measurement.is_degenerate() {
        return Err(PlanError::NoPlacement);
    }
    let anchor = measurement.midpoint();
    Ok(Placement {
        implant: spec.key(),
        pose: RigidTransform::rotation(measurement.angle_deg(), anchor),
        anchor,
    })
}

/// Applies `delta` on top of the current pose. The implant never changes.
pub fn adjust_placement(placement: &Placement, delta: &RigidTransform) -> Placement {
    Placement {
        implant: placement.implant.clone(),
        pose: delta.compose(&placement.pose),
        anchor: delta.apply(placement.anchor),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gender {
    M,
    F,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::M => "M",
            Gender::F => "F",
        })
    }
}

impl FromStr for Gender {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "M" => Ok(Gender::M),
            "F" => Ok(Gender::F),
            _ => Err(()),
        }
    }
}

/// Patient identity as typed into the plan form.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PatientInfo {
    pub patient_name: String,
    pub gender: Gender,
    pub patient_id: String,
    /// Kept verbatim; formats like `195805` are ambiguous.
    pub dob: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanRecord {
    pub patient_name: String,
    pub gender: Gender,
    pub patient_id: String,
    pub dob: String,
    pub acetabular_size: u32,
    pub acetabular_brand: String,
    pub measurement: SegmentPx,
    pub calibration: Calibration,
    pub placement: Placement,
}

fn check_text(field: &'static str, value: &str) -> Result<(), PlanError> {
    if value.trim().is_empty() {
        return Err(PlanError::InvalidField { field, reason: "must not be empty" });
    }
    if value.chars().any(char::is_control) {
        return Err(PlanError::InvalidField {
            field,
            reason: "must not contain control characters",
        });
    }
    Ok(())
}

impl PlanRecord {
    pub fn patient(&self) -> PatientInfo {
        PatientInfo {
            patient_name: self.patient_name.clone(),
            gender: self.gender,
            patient_id: self.patient_id.clone(),
            dob: self.dob.clone(),
        }
    }

    /// Checks that the stored size is what the stored measurement sizes to
    /// under `catalog`, and that the placement refers to that same cup.
    pub fn verify(&self, catalog: &ImplantCatalog) -> Result<(), PlanError> {
        check_text("patient_name", &self.patient_name)?;
        check_text("patient_id", &self.patient_id)?;
        check_text("dob", &self.dob)?;
        check_text("acetabular_brand", &self.acetabular_brand)?;
        if self.acetabular_brand.chars().any(char::is_whitespace) {
            return Err(PlanError::InvalidField {
                field: "acetabular_brand",
                reason: "must be a single word",
            });
        }
        let sizing = measure_and_size(&self.measurement, &self.calibration, catalog)?;
        match sizing.snapped_size_mm() {
            Some(size) if size == self.acetabular_size => {}
            Some(size) => {
                return Err(PlanError::Consistency(alloc::format!(
                    "acetabular_size {} but measurement sizes to {size}",
                    self.acetabular_size
                )))
            }
            None => {
                return Err(PlanError::Consistency(alloc::format!(
                    "acetabular_size {} but measurement is rejected ({})",
                    self.acetabular_size,
                    sizing.rejected_reason().map(|r| r.as_str()).unwrap_or("")
                )))
            }
        }
        let implant = &self.placement.implant;
        if implant.size_mm != self.acetabular_size || implant.brand != self.acetabular_brand {
            return Err(PlanError::Consistency(alloc::format!(
                "placement implant {} {} mm differs from acetabular {} {} mm",
                implant.brand,
                implant.size_mm,
                self.acetabular_brand,
                self.acetabular_size
            )));
        }
        if implant.brand != catalog.brand() {
            return Err(PlanError::Consistency(alloc::format!(
                "brand {} is not the catalog brand {}",
                implant.brand,
                catalog.brand()
            )));
        }
        catalog.lookup(implant.side, implant.size_mm)?;
        if !self.placement.pose.is_finite() || !self.placement.anchor.is_finite() {
            return Err(PlanError::InvalidField {
                field: "placement",
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("calibration must be set before measuring")]
    CalibrationMissing,
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("{0}")]
    State(&'static str),
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// One planner working on one image. Later steps are only reachable through
/// earlier ones: sizing needs a calibration and a measurement, placement
/// needs an accepted size.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    id: String,
    image_ref: String,
    calibration: Option<Calibration>,
    measurement: Option<SegmentPx>,
    sizing: Option<SizingResult>,
    placement: Option<Placement>,
}

impl Session {
    pub fn new(id: impl Into<String>, image_ref: impl Into<String>) -> Self {
        Session {
            id: id.into(),
            image_ref: image_ref.into(),
            calibration: None,
            measurement: None,
            sizing: None,
            placement: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn image_ref(&self) -> &str {
        &self.image_ref
    }

    pub fn calibration(&self) -> Option<&Calibration> {
        self.calibration.as_ref()
    }

    pub fn measurement(&self) -> Option<&SegmentPx> {
        self.measurement.as_ref()
    }

    pub fn sizing(&self) -> Option<&SizingResult> {
        self.sizing.as_ref()
    }

    pub fn placement(&self) -> Option<&Placement> {
        self.placement.as_ref()
    }

    /// Sets the scale. Any sizing and placement computed under the old scale
    /// is dropped; the drawn line is kept.
    pub fn set_calibration(&mut self, calibration: Calibration) {
        self.calibration = Some(calibration);
        self.sizing = None;
        self.placement = None;
    }

    /// Records the diameter line, sizes it and, when accepted, places the
    /// matching `side` template at its default position. A previous
    /// placement is always discarded.
    pub fn set_measurement(
        &mut self,
        measurement: SegmentPx,
        side: Side,
        catalog: &ImplantCatalog,
    ) -> Result<SizingResult, SessionError> {
        let calibration = self.calibration.ok_or(SessionError::CalibrationMissing)?;
        if !measurement.is_finite() {
            return Err(SessionError::InvalidMeasurement("coordinates must be finite".to_string()));
        }
        if measurement.is_degenerate() {
            return Err(SessionError::InvalidMeasurement("zero-length segment".to_string()));
        }
        let sizing = measure_and_size(&measurement, &calibration, catalog)?;
        let placement = match sizing.snapped_size_mm() {
            Some(size) => Some(default_placement(&measurement, &sizing, catalog.lookup(side, size)?)?),
            None => None,
        };
        self.measurement = Some(measurement);
        self.sizing = Some(sizing);
        self.placement = placement;
        Ok(sizing)
    }

    pub fn adjust(&mut self, delta: &RigidTransform) -> Result<&Placement, SessionError> {
        if !delta.is_finite() {
            return Err(SessionError::InvalidMeasurement("transform must be finite".to_string()));
        }
        let current = self.placement.as_ref().ok_or(SessionError::State("no accepted sizing to adjust"))?;
        let next = adjust_placement(current, delta);
        Ok(self.placement.insert(next))
    }

    /// Builds the plan record for the current placement.
    pub fn plan_record(&self, patient: PatientInfo, catalog: &ImplantCatalog) -> Result<PlanRecord, SessionError> {
        let (Some(placement), Some(measurement), Some(calibration)) =
            (&self.placement, self.measurement, self.calibration)
        else {
            return Err(SessionError::State("no placement to save"));
        };
        let record = PlanRecord {
            patient_name: patient.patient_name,
            gender: patient.gender,
            patient_id: patient.patient_id,
            dob: patient.dob,
            acetabular_size: placement.implant.size_mm,
            acetabular_brand: placement.implant.brand.clone(),
            measurement,
            calibration,
            placement: placement.clone(),
        };
        record.verify(catalog)?;
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sizing::snap_to_size;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> SegmentPx {
        SegmentPx::new(PointPx::new(ax, ay), PointPx::new(bx, by))
    }

    fn catalog() -> ImplantCatalog {
        ImplantCatalog::standard("Versys")
    }

    fn placed(m: SegmentPx) -> Placement {
        let c = catalog();
        let sizing = snap_to_size(58.0, &c).unwrap();
        default_placement(&m, &sizing, c.lookup(Side::Left, 58).unwrap()).unwrap()
    }

    #[test]
    fn default_positions() {
        let p = placed(seg(0.0, 0.0, 100.0, 0.0));
        assert_eq!((p.anchor, p.pose.rotation_deg), (PointPx::new(50.0, 0.0), 0.0));
        let p = placed(seg(0.0, 0.0, 0.0, 100.0));
        assert_eq!((p.anchor, p.pose.rotation_deg), (PointPx::new(0.0, 50.0), 90.0));
        let p = placed(seg(10.0, 10.0, 110.0, 60.0));
        assert_eq!(p.anchor, PointPx::new(60.0, 35.0));
        assert!((p.pose.rotation_deg - 26.56505117707799).abs() < 1e-12);
        assert_eq!((p.pose.dx, p.pose.dy), (0.0, 0.0));
    }

    #[test]
    fn rejected_sizing_has_no_placement() {
        let c = catalog();
        let sizing = snap_to_size(30.0, &c).unwrap();
        let spec = c.lookup(Side::Left, 36).unwrap();
        assert_eq!(
            default_placement(&seg(0.0, 0.0, 60.0, 0.0), &sizing, spec),
            Err(PlanError::NoPlacement)
        );
    }

    #[test]
    fn default_outline_spans_the_measurement() {
        let c = catalog();
        let cal = Calibration::new(0.5).unwrap();
        let m = seg(0.0, 0.0, 116.0, 0.0);
        let p = placed(m);
        let pts = p.outline_px(&c.lookup(Side::Left, 58).unwrap().outline, &cal);
        // 58 mm at 0.5 mm/px spans 116 px, endpoints on the drawn line.
        assert!(pts.iter().any(|v| v.distance(m.a) < 1e-9));
        assert!(pts.iter().any(|v| v.distance(m.b) < 1e-9));
    }

    #[test]
    fn translations_accumulate() {
        let p = placed(seg(0.0, 0.0, 100.0, 0.0));
        assert_eq!(adjust_placement(&p, &RigidTransform::IDENTITY), p);
        let step = RigidTransform::translation(5.0, -3.0);
        let q = adjust_placement(&adjust_placement(&p, &step), &step);
        assert_eq!((q.pose.dx, q.pose.dy), (10.0, -6.0));
        assert_eq!(q.anchor, PointPx::new(60.0, -6.0));
        assert_eq!(q.implant, p.implant);
    }

    #[test]
    fn six_small_turns_match_one_quarter_turn() {
        let c = catalog();
        let cal = Calibration::new(0.5).unwrap();
        let outline = &c.lookup(Side::Left, 58).unwrap().outline;
        let p = placed(seg(10.0, 10.0, 110.0, 60.0));
        let mut stepped = p.clone();
        for _ in 0..6 {
            stepped = adjust_placement(&stepped, &RigidTransform::rotation(15.0, stepped.anchor));
        }
        let once = adjust_placement(&p, &RigidTransform::rotation(90.0, p.anchor));
        let a = stepped.outline_px(outline, &cal);
        let b = once.outline_px(outline, &cal);
        for (u, v) in a.iter().zip(&b) {
            assert!(u.distance(*v) < 1e-6);
        }
        let before = Outline::new(p.outline_px(outline, &cal)).unwrap().max_vertex_distance();
        let after = Outline::new(a).unwrap().max_vertex_distance();
        assert!((before - after).abs() < 1e-6);
    }

    #[test]
    fn session_rejects_out_of_order_steps() {
        let c = catalog();
        let mut s = Session::new("s1", "img");
        assert_eq!(
            s.set_measurement(seg(0.0, 0.0, 116.56, 0.0), Side::Left, &c),
            Err(SessionError::CalibrationMissing)
        );
        assert!(matches!(s.adjust(&RigidTransform::IDENTITY), Err(SessionError::State(_))));
        let patient = PatientInfo {
            patient_name: "JEY".into(),
            gender: Gender::F,
            patient_id: "N089682.2008".into(),
            dob: "195805".into(),
        };
        assert!(matches!(s.plan_record(patient.clone(), &c), Err(SessionError::State(_))));

        s.set_calibration(Calibration::new(0.5).unwrap());
        assert!(matches!(
            s.set_measurement(seg(1.0, 1.0, 1.0, 1.0), Side::Left, &c),
            Err(SessionError::InvalidMeasurement(_))
        ));
        let sizing = s.set_measurement(seg(0.0, 0.0, 116.56, 0.0), Side::Left, &c).unwrap();
        assert_eq!(sizing.snapped_size_mm(), Some(58));
        assert!(s.placement().is_some());
        s.adjust(&RigidTransform::translation(4.0, 2.0)).unwrap();
        let record = s.plan_record(patient, &c).unwrap();
        assert_eq!(record.acetabular_size, 58);
        assert_eq!(record.acetabular_brand, "Versys");

        // Re-measuring replaces the adjusted placement with a fresh default.
        s.set_measurement(seg(0.0, 0.0, 116.56, 0.0), Side::Left, &c).unwrap();
        assert_eq!(s.placement().unwrap().pose.dx, 0.0);
        // A rejected size leaves no placement.
        s.set_measurement(seg(0.0, 0.0, 60.0, 0.0), Side::Left, &c).unwrap();
        assert!(s.placement().is_none());
        assert!(s.sizing().is_some());
        // New calibration drops sizing and placement.
        s.set_measurement(seg(0.0, 0.0, 116.56, 0.0), Side::Left, &c).unwrap();
        s.set_calibration(Calibration::new(0.4).unwrap());
        assert!(s.sizing().is_none() && s.placement().is_none());
        assert!(s.measurement().is_some());
    }

    #[test]
    fn verify_catches_mismatched_size() {
        let c = catalog();
        let mut s = Session::new("s1", "img");
        s.set_calibration(Calibration::new(0.5).unwrap());
        s.set_measurement(seg(0.0, 0.0, 116.56, 0.0), Side::Right, &c).unwrap();
        let patient = PatientInfo {
            patient_name: "A B".into(),
            gender: Gender::M,
            patient_id: "X-1".into(),
            dob: "1960".into(),
        };
        let mut r = s.plan_record(patient, &c).unwrap();
        r.acetabular_size = 60;
        assert!(matches!(r.verify(&c), Err(PlanError::Consistency(_))));
        r.acetabular_size = 58;
        r.placement.implant.size_mm = 60;
        assert!(matches!(r.verify(&c), Err(PlanError::Consistency(_))));
        r.placement.implant.size_mm = 58;
        r.patient_name = "two\nlines".into();
        assert!(matches!(r.verify(&c), Err(PlanError::InvalidField { field: "patient_name", .. })));
    }
}
