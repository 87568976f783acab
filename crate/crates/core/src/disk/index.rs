use serde::Serialize;

use super::{DiskDiagram, Token, Vertex};
use crate::perm::common_edge;
use crate::taut::TautStructure;
use crate::tri::Triangulation;

/// Counts read off a region's walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub components: usize,
    pub corners: usize,
    pub cusps: usize,
    pub inward_corners: usize,
}

impl Shape {
    pub fn chi(&self) -> i64 {
        2 - self.components as i64
    }

    /// Index in quarter units; an inward corner adds one quarter.
    pub fn index_q(&self) -> i64 {
        4 * self.chi() - 2 * self.cusps as i64 - self.corners as i64 + self.inward_corners as i64
    }
}

pub(crate) fn region_shape(d: &DiskDiagram, r: usize) -> Shape {
    let mut shape = Shape { components: d.regions[r].walk.len(), corners: 0, cusps: 0, inward_corners: 0 };
    for comp in &d.regions[r].walk {
        for (i, &t) in comp.iter().enumerate() {
            match d.vertex_between(t, comp[(i + 1) % comp.len()]) {
                Vertex::Corner { .. } => shape.corners += 1,
                Vertex::Cusp { .. } => shape.cusps += 1,
                _ => {}
            }
        }
    }
    shape
}

/// Named disk regions of non-negative index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    Nullgon,
    CuspedMonogon,
    CuspedBigon,
    BoundaryBigon,
    BoundaryTrigon,
    Rectangle,
    Other,
}

impl RegionKind {
    /// Classification by `(corners, cusps)` of a disk region.
    pub fn classify(disk: bool, corners: usize, cusps: usize) -> Self {
        if !disk {
            return RegionKind::Other;
        }
        match (corners, cusps) {
            (0, 0) => RegionKind::Nullgon,
            (0, 1) => RegionKind::CuspedMonogon,
            (0, 2) => RegionKind::CuspedBigon,
            (2, 0) => RegionKind::BoundaryBigon,
            (2, 1) => RegionKind::BoundaryTrigon,
            (4, 0) => RegionKind::Rectangle,
            _ => RegionKind::Other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionReport {
    pub region: usize,
    pub tet: usize,
    pub disk: bool,
    pub corners: usize,
    pub cusps: usize,
    pub index_q: i64,
    pub kind: RegionKind,
}

pub fn region_census(d: &DiskDiagram) -> Vec<RegionReport> {
    (0..d.regions.len())
        .map(|r| {
            let s = region_shape(d, r);
            let disk = s.components == 1;
            RegionReport {
                region: r,
                tet: d.regions[r].tet,
                disk,
                corners: s.corners,
                cusps: s.cusps,
                index_q: s.index_q(),
                kind: RegionKind::classify(disk, s.corners, s.cusps),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TotalIndex {
    pub total_q: i64,
    pub pass: bool,
}

pub fn audit_total_index(d: &DiskDiagram) -> TotalIndex {
    let total_q = region_census(d).iter().map(|r| r.index_q).sum();
    TotalIndex { total_q, pass: total_q == 4 }
}

/// One side of a region: a maximal run of its walk between corners and cusps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Side {
    pub tokens: Vec<Token>,
    /// Switches passed smoothly in the interior of the side.
    pub switches: Vec<usize>,
}

pub fn region_sides(d: &DiskDiagram, r: usize) -> Vec<Side> {
    let mut sides = Vec::new();
    for comp in &d.regions[r].walk {
        let n = comp.len();
        let breaks: Vec<bool> = (0..n)
            .map(|i| matches!(d.vertex_between(comp[i], comp[(i + 1) % n]), Vertex::Corner { .. } | Vertex::Cusp { .. }))
            .collect();
        // start right after a break so runs are contiguous
        let start = match breaks.iter().position(|&b| b) {
            Some(p) => (p + 1) % n,
            None => {
                let switches = (0..n)
                    .filter_map(|i| match d.vertex_between(comp[i], comp[(i + 1) % n]) {
                        Vertex::Smooth { switch } => Some(switch),
                        _ => None,
                    })
                    .collect();
                sides.push(Side { tokens: comp.clone(), switches });
                continue;
            }
        };
        let mut cur = Side { tokens: vec![], switches: vec![] };
        for step in 0..n {
            let i = (start + step) % n;
            cur.tokens.push(comp[i]);
            match d.vertex_between(comp[i], comp[(i + 1) % n]) {
                Vertex::Smooth { switch } => cur.switches.push(switch),
                Vertex::Corner { .. } | Vertex::Cusp { .. } => {
                    sides.push(std::mem::replace(&mut cur, Side { tokens: vec![], switches: vec![] }));
                }
                Vertex::None => {}
            }
        }
    }
    sides
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MinimalityViolation {
    /// Advisory: compress the region along an essential arc or curve.
    NotDisk { region: usize, components: usize },
    /// Advisory: collapse the bigon between the side and the track.
    SideSwitches { region: usize, side: Vec<Token>, switches: Vec<usize> },
    Nullgon { region: usize },
    CuspedMonogon { region: usize },
    /// The conclusion fails although no reduction applies.
    PositiveNotBoundaryBigon { region: usize, index_q: i64 },
}

impl MinimalityViolation {
    pub fn advisory(&self) -> &'static str {
        match self {
            MinimalityViolation::NotDisk { .. } => "compress the region",
            MinimalityViolation::SideSwitches { .. } => "collapse the bigon cut off by the side",
            MinimalityViolation::Nullgon { .. } => "remove the closed branch bounding the nullgon",
            MinimalityViolation::CuspedMonogon { .. } => "collapse the monogon into its switch",
            MinimalityViolation::PositiveNotBoundaryBigon { .. } => "re-examine the region labels",
        }
    }
}

pub fn audit_minimality(d: &DiskDiagram) -> Vec<MinimalityViolation> {
    let mut out = Vec::new();
    for rep in region_census(d) {
        let r = rep.region;
        if !rep.disk {
            out.push(MinimalityViolation::NotDisk { region: r, components: d.regions[r].walk.len() });
        }
        for side in region_sides(d, r) {
            if side.switches.len() > 1 {
                out.push(MinimalityViolation::SideSwitches { region: r, side: side.tokens, switches: side.switches });
            }
        }
        match rep.kind {
            RegionKind::Nullgon => out.push(MinimalityViolation::Nullgon { region: r }),
            RegionKind::CuspedMonogon => out.push(MinimalityViolation::CuspedMonogon { region: r }),
            _ => {}
        }
    }
    if out.is_empty() {
        for rep in region_census(d) {
            if rep.index_q > 0 && rep.kind != RegionKind::BoundaryBigon {
                out.push(MinimalityViolation::PositiveNotBoundaryBigon { region: rep.region, index_q: rep.index_q });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SwitchViolation {
    /// Both branches present the same face of the region's tetrahedron.
    SameFace { switch: usize, region: usize, tet: usize, face: u8 },
    /// A smooth passage must be at a π edge, a cusp at a zero edge.
    Angle { switch: usize, region: usize, tet: usize, edge: (u8, u8), cusp: bool },
    /// The sectors of one switch see different edges of the triangulation.
    EdgeClasses { switch: usize, classes: Vec<usize> },
}

/// Checks every sector at every switch against the angles of the region's
/// tetrahedron.
pub fn audit_switches(d: &DiskDiagram, tri: &Triangulation, taut: &TautStructure) -> Vec<SwitchViolation> {
    let mut out = Vec::new();
    for (s, sw) in d.switches.iter().enumerate() {
        let mut classes = Vec::new();
        for e in sw.rotation() {
            // the dart arriving through `e` and the walk's next piece share a sector
            let arriving = Token::Side { branch: e.branch, plus: e.head };
            let next = d.next_token(arriving);
            let Token::Side { branch: nb, plus: np } = next else { continue };
            let region = d.region_at(arriving);
            let tet = d.regions[region].tet;
            let f = d.slot(e.branch, e.head).face;
            let g = d.slot(nb, np).face;
            if f == g {
                out.push(SwitchViolation::SameFace { switch: s, region, tet, face: f });
                continue;
            }
            let edge = common_edge(f, g);
            classes.push(tri.germ_of(tet, edge.0, edge.1).class);
            let cusp = matches!(d.vertex_between(arriving, next), Vertex::Cusp { .. });
            if cusp == taut.is_pi(tet, edge.0, edge.1) {
                out.push(SwitchViolation::Angle { switch: s, region, tet, edge, cusp });
            }
        }
        classes.sort();
        classes.dedup();
        if classes.len() > 1 {
            out.push(SwitchViolation::EdgeClasses { switch: s, classes });
        }
    }
    out
}
