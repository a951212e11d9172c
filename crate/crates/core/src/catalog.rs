//! Acetabular cup catalog and its two-file text format.
//!
//! Entry file, one cup per line:
//!
//! ```text
//! # brand side size_mm outline_id
//! Versys left 36 cup36
//! Versys right 36 cup36
//! ```
//!
//! Outline file, a whitespace-separated token stream of records
//! `outline_id vertex_count x1 y1 ... xn yn` in millimeters (unit scale,
//! origin at the cup center, diameter along the x axis). In both files `#`
//! starts a comment that runs to the end of the line.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::{GeometryError, Outline, PointPx};
use crate::sizing::SizingError;

/// Smallest cup diameter the sizing rule can produce.
pub const SIZE_MIN_MM: u32 = 36;
/// Largest cup diameter the sizing rule can produce.
pub const SIZE_MAX_MM: u32 = 80;

const ARC_SEGMENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("unknown side {other:?} (expected left or right)")),
        }
    }
}

/// Identity of a cup without its geometry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImplantKey {
    pub brand: String,
    pub side: Side,
    pub size_mm: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplantSpec {
    pub brand: String,
    pub side: Side,
    pub size_mm: u32,
    pub outline_id: String,
    /// Silhouette in millimeters, centered on the cup center.
    pub outline: Outline,
}

impl ImplantSpec {
    pub fn key(&self) -> ImplantKey {
        ImplantKey {
            brand: self.brand.clone(),
            side: self.side,
            size_mm: self.size_mm,
        }
    }
}

/// Where a catalog problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueLocation {
    EntryLine(usize),
    OutlineLine(usize),
    Catalog,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IssueKind {
    Syntax(String),
    OddSize(u32),
    OutOfRange(u32),
    DuplicateEntry { side: Side, size_mm: u32 },
    BrandMismatch { expected: String, found: String },
    UnknownOutline(String),
    DuplicateOutline(String),
    InvalidOutline { id: String, error: GeometryError },
    MissingSize(u32),
    MissingSide { side: Side, size_mm: u32 },
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogIssue {
    pub location: IssueLocation,
    pub kind: IssueKind,
}

impl fmt::Display for CatalogIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            IssueLocation::EntryLine(n) => write!(f, "catalog line {n}: ")?,
            IssueLocation::OutlineLine(n) => write!(f, "outline line {n}: ")?,
            IssueLocation::Catalog => f.write_str("catalog: ")?,
        }
        match &self.kind {
            IssueKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            IssueKind::OddSize(s) => write!(f, "parity violation: size {s} mm is odd"),
            IssueKind::OutOfRange(s) => {
                write!(f, "range violation: size {s} mm outside {SIZE_MIN_MM}-{SIZE_MAX_MM} mm")
            }
            IssueKind::DuplicateEntry { side, size_mm } => {
                write!(f, "duplicate entry: {side} {size_mm} mm")
            }
            IssueKind::BrandMismatch { expected, found } => {
                write!(f, "brand violation: {found:?} differs from catalog brand {expected:?}")
            }
            IssueKind::UnknownOutline(id) => write!(f, "outline {id:?} is not defined"),
            IssueKind::DuplicateOutline(id) => write!(f, "outline {id:?} defined twice"),
            IssueKind::InvalidOutline { id, error } => write!(f, "outline {id:?} invalid: {error}"),
            IssueKind::MissingSize(s) => write!(f, "contiguity violation: size {s} mm missing"),
            IssueKind::MissingSide { side, size_mm } => {
                write!(f, "side violation: no {side} entry for size {size_mm} mm")
            }
            IssueKind::Empty => f.write_str("no entries"),
        }
    }
}

fn issue(location: IssueLocation, kind: IssueKind) -> CatalogIssue {
    CatalogIssue { location, kind }
}

/// Validated set of cups: one brand, even sizes contiguous in steps of two,
/// both sides for every size.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplantCatalog {
    brand: String,
    /// Sorted by (size, side).
    entries: Vec<ImplantSpec>,
}

impl ImplantCatalog {
    pub fn new(entries: Vec<ImplantSpec>) -> Result<Self, Vec<CatalogIssue>> {
        let located: Vec<_> = entries.into_iter().map(|e| (IssueLocation::Catalog, e)).collect();
        Self::from_located(located)
    }

    fn from_located(mut entries: Vec<(IssueLocation, ImplantSpec)>) -> Result<Self, Vec<CatalogIssue>> {
        let mut issues = Vec::new();
        let Some(brand) = entries.first().map(|(_, e)| e.brand.clone()) else {
            return Err(alloc::vec![issue(IssueLocation::Catalog, IssueKind::Empty)]);
        };
        let mut seen: BTreeMap<(u32, Side), ()> = BTreeMap::new();
        entries.retain(|(loc, e)| {
            let kind = if e.brand != brand {
                Some(IssueKind::BrandMismatch {
                    expected: brand.clone(),
                    found: e.brand.clone(),
                })
            } else if e.size_mm % 2 != 0 {
                Some(IssueKind::OddSize(e.size_mm))
            } else if !(SIZE_MIN_MM..=SIZE_MAX_MM).contains(&e.size_mm) {
                Some(IssueKind::OutOfRange(e.size_mm))
            } else if seen.insert((e.size_mm, e.side), ()).is_some() {
                Some(IssueKind::DuplicateEntry {
                    side: e.side,
                    size_mm: e.size_mm,
                })
            } else {
                None
            };
            match kind {
                Some(kind) => {
                    issues.push(issue(loc.clone(), kind));
                    false
                }
                None => true,
            }
        });
        if let (Some(&(min, _)), Some(&(max, _))) = (seen.keys().next(), seen.keys().next_back()) {
            for size in (min..=max).step_by(2) {
                let present: Vec<Side> = Side::BOTH
                    .into_iter()
                    .filter(|s| seen.contains_key(&(size, *s)))
                    .collect();
                match present.as_slice() {
                    [] => issues.push(issue(IssueLocation::Catalog, IssueKind::MissingSize(size))),
                    [only] => {
                        let missing = if *only == Side::Left { Side::Right } else { Side::Left };
                        issues.push(issue(
                            IssueLocation::Catalog,
                            IssueKind::MissingSide {
                                side: missing,
                                size_mm: size,
                            },
                        ));
                    }
                    _ => {}
                }
            }
        } else if issues.is_empty() {
            issues.push(issue(IssueLocation::Catalog, IssueKind::Empty));
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        let mut entries: Vec<ImplantSpec> = entries.into_iter().map(|(_, e)| e).collect();
        entries.sort_by_key(|e| (e.size_mm, e.side));
        Ok(ImplantCatalog { brand, entries })
    }

    /// Even sizes 36-80 mm for both hips, with half-disc cup silhouettes.
    pub fn standard(brand: &str) -> Self {
        let mut entries = Vec::new();
        for size in (SIZE_MIN_MM..=SIZE_MAX_MM).step_by(2) {
            for side in Side::BOTH {
                entries.push(ImplantSpec {
                    brand: brand.to_string(),
                    side,
                    size_mm: size,
                    outline_id: format!("cup{size}{}", if side == Side::Left { "L" } else { "R" }),
                    outline: cup_silhouette(f64::from(size), side),
                });
            }
        }
        ImplantCatalog::new(entries).expect("standard catalog is valid")
    }

    pub fn brand(&self) -> &str {
        &self.brand
    }

    pub fn entries(&self) -> &[ImplantSpec] {
        &self.entries
    }

    pub fn min_size(&self) -> u32 {
        self.entries[0].size_mm
    }

    pub fn max_size(&self) -> u32 {
        self.entries[self.entries.len() - 1].size_mm
    }

    /// Distinct sizes in increasing order.
    pub fn sizes(&self) -> impl Iterator<Item = u32> + '_ {
        (self.min_size()..=self.max_size()).step_by(2)
    }

    pub fn lookup(&self, side: Side, size_mm: u32) -> Result<&ImplantSpec, SizingError> {
        self.entries
            .binary_search_by_key(&(size_mm, side), |e| (e.size_mm, e.side))
            .map(|i| &self.entries[i])
            .map_err(|_| SizingError::NotFound { side, size_mm })
    }

    /// Renders the entry file and the outline file.
    pub fn to_text(&self) -> (String, String) {
        let mut entries = String::from("# brand side size_mm outline_id\n");
        let mut outlines = String::from("# outline_id vertex_count x y ...\n");
        let mut written: BTreeMap<&str, ()> = BTreeMap::new();
        for e in &self.entries {
            entries.push_str(&format!("{} {} {} {}\n", e.brand, e.side, e.size_mm, e.outline_id));
            if written.insert(&e.outline_id, ()).is_none() {
                outlines.push_str(&format!("{} {}\n", e.outline_id, e.outline.vertices().len()));
                for v in e.outline.vertices() {
                    outlines.push_str(&format!("{} {}\n", crate::fmt::decimal(v.x), crate::fmt::decimal(v.y)));
                }
            }
        }
        (entries, outlines)
    }
}

/// Half-disc of the given diameter: the diameter lies on the x axis and the
/// dome points toward -y (up on screen). The right-hip cup mirrors the left.
pub fn cup_silhouette(diameter_mm: f64, side: Side) -> Outline {
    let r = diameter_mm / 2.0;
    let mirror = if side == Side::Left { 1.0 } else { -1.0 };
    let mut pts: Vec<PointPx> = (0..=ARC_SEGMENTS)
        .map(|k| {
            let a = core::f64::consts::PI * (1.0 + k as f64 / ARC_SEGMENTS as f64);
            let (sin, cos) = libm::sincos(a);
            PointPx::new(mirror * r * cos, r * sin)
        })
        .collect();
    // Pin the diameter endpoints and the apex exactly.
    pts[0] = PointPx::new(-mirror * r, 0.0);
    pts[ARC_SEGMENTS / 2] = PointPx::new(0.0, -r);
    pts[ARC_SEGMENTS] = PointPx::new(mirror * r, 0.0);
    if side == Side::Right {
        pts.reverse();
    }
    Outline::new(pts).expect("half-disc is a simple polygon")
}

struct Tokens<'a> {
    lines: core::iter::Enumerate<core::str::Lines<'a>>,
    current: Option<(usize, core::str::SplitWhitespace<'a>)>,
}

impl<'a> Tokens<'a> {
    fn new(src: &'a str) -> Self {
        Tokens {
            lines: src.lines().enumerate(),
            current: None,
        }
    }
}

impl<'a> Iterator for Tokens<'a> {
    /// (1-based line, token)
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some((line, words)) = &mut self.current {
                if let Some(w) = words.next() {
                    return Some((*line, w));
                }
            }
            let (i, raw) = self.lines.next()?;
            let text = raw.split('#').next().unwrap_or("");
            self.current = Some((i + 1, text.split_whitespace()));
        }
    }
}

/// Parses outline records keyed by id, recording the line each starts on.
fn parse_outlines(src: &str) -> (BTreeMap<String, (usize, Outline)>, Vec<CatalogIssue>) {
    let mut out = BTreeMap::new();
    let mut issues = Vec::new();
    let mut tokens = Tokens::new(src);
    let syntax = |line: usize, msg: String| issue(IssueLocation::OutlineLine(line), IssueKind::Syntax(msg));
    while let Some((line, id)) = tokens.next() {
        let count = match tokens.next() {
            Some((l, t)) => match t.parse::<usize>() {
                Ok(n) => n,
                Err(_) => {
                    issues.push(syntax(l, format!("vertex count {t:?} for outline {id:?} is not a whole number")));
                    return (out, issues);
                }
            },
            None => {
                issues.push(syntax(line, format!("outline {id:?} has no vertex count")));
                return (out, issues);
            }
        };
        let mut vertices = Vec::with_capacity(count);
        for _ in 0..count {
            let mut coord = || match tokens.next() {
                Some((l, t)) => t
                    .parse::<f64>()
                    .map_err(|_| syntax(l, format!("coordinate {t:?} in outline {id:?} is not a number"))),
                None => Err(syntax(line, format!("outline {id:?} ends before {count} vertices"))),
            };
            match coord().and_then(|x| coord().map(|y| PointPx::new(x, y))) {
                Ok(p) => vertices.push(p),
                Err(e) => {
                    issues.push(e);
                    return (out, issues);
                }
            }
        }
        match Outline::new(vertices) {
            Ok(outline) => {
                if out.insert(id.to_string(), (line, outline)).is_some() {
                    issues.push(issue(IssueLocation::OutlineLine(line), IssueKind::DuplicateOutline(id.to_string())));
                }
            }
            Err(error) => issues.push(issue(
                IssueLocation::OutlineLine(line),
                IssueKind::InvalidOutline { id: id.to_string(), error },
            )),
        }
    }
    (out, issues)
}

/// Parses and validates a catalog from its entry and outline files,
/// collecting every problem found rather than stopping at the first.
pub fn parse_catalog(entries_src: &str, outlines_src: &str) -> Result<ImplantCatalog, Vec<CatalogIssue>> {
    let (outlines, mut issues) = parse_outlines(outlines_src);
    let bad_outlines: Vec<String> = issues
        .iter()
        .filter_map(|i| match &i.kind {
            IssueKind::InvalidOutline { id, .. } => Some(id.clone()),
            _ => None,
        })
        .collect();
    let mut entries = Vec::new();
    for (i, raw) in entries_src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let at = IssueLocation::EntryLine(line);
        let [brand, side, size, outline_id] = fields[..] else {
            issues.push(issue(
                at,
                IssueKind::Syntax(format!("expected `brand side size_mm outline_id`, found {} fields", fields.len())),
            ));
            continue;
        };
        let side = match side.parse::<Side>() {
            Ok(s) => s,
            Err(msg) => {
                issues.push(issue(at, IssueKind::Syntax(msg)));
                continue;
            }
        };
        let Ok(size_mm) = size.parse::<u32>() else {
            issues.push(issue(at, IssueKind::Syntax(format!("size {size:?} is not a whole number of mm"))));
            continue;
        };
        let outline = match outlines.get(outline_id) {
            Some((_, o)) => o.clone(),
            None => {
                if !bad_outlines.iter().any(|b| b == outline_id) {
                    issues.push(issue(at, IssueKind::UnknownOutline(outline_id.to_string())));
                }
                continue;
            }
        };
        entries.push((
            at,
            ImplantSpec {
                brand: brand.to_string(),
                side,
                size_mm,
                outline_id: outline_id.to_string(),
                outline,
            },
        ));
    }
    match ImplantCatalog::from_located(entries) {
        Ok(catalog) if issues.is_empty() => Ok(catalog),
        Ok(_) => Err(issues),
        Err(more) => {
            let had_issues = !issues.is_empty();
            issues.extend(more.into_iter().filter(|i| i.kind != IssueKind::Empty || !had_issues));
            Err(issues)
        }
    }
}
