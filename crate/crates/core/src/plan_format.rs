//! Plan record text format.
//!
//! UTF-8 `key: value` lines, one per [`PlanRecord`] field in declaration
//! order, followed by one blank line. Text values are everything after the
//! first `": "` and are kept verbatim. Numbers use [`crate::fmt::decimal`],
//! which round-trips exactly.
//!
//! ```text
//! patient_name: JEY
//! gender: F
//! patient_id: N089682.2008
//! dob: 195805
//! acetabular_size: 58
//! acetabular_brand: Versys
//! measurement: <ax> <ay> <bx> <by>
//! calibration: <mm_per_px>
//! placement: <side> <size_mm> <rotation_deg> <pivot_x> <pivot_y> <dx> <dy> <anchor_x> <anchor_y>
//!
//! ```
//!
//! The placement brand is the `acetabular_brand`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::catalog::{ImplantKey, Side};
use crate::fmt::decimal;
use crate::geometry::{Calibration, PointPx, RigidTransform, SegmentPx};
use crate::planning::{Gender, Placement, PlanRecord};

pub const FIELDS: [&str; 9] = [
    "patient_name",
    "gender",
    "patient_id",
    "dob",
    "acetabular_size",
    "acetabular_brand",
    "measurement",
    "calibration",
    "placement",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingField(&'static str),
    MissingTerminator,
    Malformed,
    UnknownKey(String),
    DuplicateKey(&'static str),
    BadValue { field: &'static str, reason: String },
    TrailingData,
}

/// Parse failure at a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for PlanParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::MissingField(name) => write!(f, "missing field `{name}`"),
            ParseErrorKind::MissingTerminator => f.write_str("record is not terminated by a blank line"),
            ParseErrorKind::Malformed => f.write_str("expected `key: value`"),
            ParseErrorKind::UnknownKey(key) => write!(f, "unknown key `{key}`"),
            ParseErrorKind::DuplicateKey(key) => write!(f, "key `{key}` appears twice"),
            ParseErrorKind::BadValue { field, reason } => write!(f, "bad value for `{field}`: {reason}"),
            ParseErrorKind::TrailingData => f.write_str("unexpected data after the record"),
        }
    }
}

impl core::error::Error for PlanParseError {}

pub fn to_text(record: &PlanRecord) -> String {
    let m = &record.measurement;
    let p = &record.placement;
    let nums = |vals: &[f64]| vals.iter().map(|v| decimal(*v)).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let mut line = |key: &str, value: &str| {
        out.push_str(key);
        out.push_str(": ");
        out.push_str(value);
        out.push('\n');
    };
    line("patient_name", &record.patient_name);
    line("gender", &record.gender.to_string());
    line("patient_id", &record.patient_id);
    line("dob", &record.dob);
    line("acetabular_size", &record.acetabular_size.to_string());
    line("acetabular_brand", &record.acetabular_brand);
    line("measurement", &nums(&[m.a.x, m.a.y, m.b.x, m.b.y]));
    line("calibration", &decimal(record.calibration.mm_per_px()));
    line(
        "placement",
        &format!(
            "{} {} {}",
            p.implant.side,
            p.implant.size_mm,
            nums(&[
                p.pose.rotation_deg,
                p.pose.pivot.x,
                p.pose.pivot.y,
                p.pose.dx,
                p.pose.dy,
                p.anchor.x,
                p.anchor.y,
            ])
        ),
    );
    out.push('\n');
    out
}

fn numbers<const N: usize>(field: &'static str, value: &str) -> Result<[f64; N], ParseErrorKind> {
    let bad = |reason: String| ParseErrorKind::BadValue { field, reason };
    let parts: Vec<&str> = value.split(' ').collect();
    if parts.len() != N {
        return Err(bad(format!("expected {N} numbers, found {}", parts.len())));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        let v: f64 = part.parse().map_err(|_| bad(format!("{part:?} is not a number")))?;
        if !v.is_finite() {
            return Err(bad(format!("{part:?} is not finite")));
        }
        *slot = v;
    }
    Ok(out)
}

#[derive(Default)]
struct Fields<'a> {
    values: [Option<(usize, &'a str)>; 9],
}

fn build(fields: &Fields<'_>) -> Result<PlanRecord, PlanParseError> {
    let get = |i: usize| fields.values[i].expect("presence checked");
    let fail = |i: usize, kind: ParseErrorKind| PlanParseError { offset: get(i).0, kind };
    let bad = |i: usize, reason: String| {
        fail(
            i,
            ParseErrorKind::BadValue {
                field: FIELDS[i],
                reason,
            },
        )
    };
    let text = |i: usize| get(i).1.to_string();

    let gender = match get(1).1 {
        "M" => Gender::M,
        "F" => Gender::F,
        other => return Err(bad(1, format!("{other:?} is not M or F"))),
    };
    let acetabular_size: u32 = get(4)
        .1
        .parse()
        .map_err(|_| bad(4, format!("{:?} is not a whole number", get(4).1)))?;
    let [ax, ay, bx, by] = numbers::<4>(FIELDS[6], get(6).1).map_err(|k| fail(6, k))?;
    let [mm_per_px] = numbers::<1>(FIELDS[7], get(7).1).map_err(|k| fail(7, k))?;
    let calibration = Calibration::new(mm_per_px).map_err(|e| bad(7, e.to_string()))?;

    let placement_text = get(8).1;
    let mut parts = placement_text.splitn(3, ' ');
    let (Some(side), Some(size), Some(rest)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(bad(8, "expected side, size and 7 numbers".to_string()));
    };
    let side: Side = side.parse().map_err(|e: String| bad(8, e))?;
    let size_mm: u32 = size.parse().map_err(|_| bad(8, format!("{size:?} is not a whole number")))?;
    let [rotation_deg, pivot_x, pivot_y, dx, dy, anchor_x, anchor_y] =
        numbers::<7>(FIELDS[8], rest).map_err(|k| fail(8, k))?;
    let acetabular_brand = text(5);

    Ok(PlanRecord {
        patient_name: text(0),
        gender,
        patient_id: text(2),
        dob: text(3),
        acetabular_size,
        acetabular_brand: acetabular_brand.clone(),
        measurement: SegmentPx::new(PointPx::new(ax, ay), PointPx::new(bx, by)),
        calibration,
        placement: Placement {
            implant: ImplantKey {
                brand: acetabular_brand,
                side,
                size_mm,
            },
            pose: RigidTransform::new(rotation_deg, PointPx::new(pivot_x, pivot_y), dx, dy),
            anchor: PointPx::new(anchor_x, anchor_y),
        },
    })
}

/// Parses one plan record. An unterminated final line is treated as
/// truncation, so a cut-off file reports the first field it lacks.
pub fn parse(input: &str) -> Result<PlanRecord, PlanParseError> {
    let mut fields = Fields::default();
    let mut offset = 0;
    let mut terminated = false;
    while offset < input.len() {
        let rest = &input[offset..];
        let Some(nl) = rest.find('\n') else {
            break;
        };
        let line = &rest[..nl];
        let line_start = offset;
        offset += nl + 1;
        if line.is_empty() {
            terminated = true;
            break;
        }
        let Some((key, value)) = line.split_once(": ") else {
            return Err(PlanParseError {
                offset: line_start,
                kind: ParseErrorKind::Malformed,
            });
        };
        let Some(index) = FIELDS.iter().position(|f| *f == key) else {
            return Err(PlanParseError {
                offset: line_start,
                kind: ParseErrorKind::UnknownKey(key.to_string()),
            });
        };
        if fields.values[index].is_some() {
            return Err(PlanParseError {
                offset: line_start,
                kind: ParseErrorKind::DuplicateKey(FIELDS[index]),
            });
        }
        fields.values[index] = Some((line_start + key.len() + 2, value));
    }
    if let Some(i) = fields.values.iter().position(Option::is_none) {
        return Err(PlanParseError {
            offset,
            kind: ParseErrorKind::MissingField(FIELDS[i]),
        });
    }
    if !terminated {
        return Err(PlanParseError {
            offset: input.len(),
            kind: ParseErrorKind::MissingTerminator,
        });
    }
    if offset < input.len() {
        return Err(PlanParseError {
            offset,
            kind: ParseErrorKind::TrailingData,
        });
    }
    build(&fields)
}
