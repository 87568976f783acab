use std::fmt;

use serde::Serialize;

use super::index::region_shape;
use super::{DiskDiagram, DiskError, Token};
use crate::transverse::Coorientation;
use crate::tri::Triangulation;

/// Transverse orientation of a branch: `Plus` points to the left of `b+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    Plus,
    Minus,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Plus => "+",
            Orientation::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BigonKind {
    Min,
    Max,
}

/// A boundary bigon and whether the track's orientation points into it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BigonTag {
    pub region: usize,
    /// Its boundary arc `d_arc`.
    pub arc: usize,
    pub kind: BigonKind,
}

impl DiskDiagram {
    /// True when the orientation of `branch` points into the region on the
    /// given side.
    pub fn points_into_side(&self, branch: usize, plus: bool) -> Option<bool> {
        self.branches[branch].orient.map(|o| (o == Orientation::Plus) == plus)
    }

    /// Whether the orientation at stop `k` points along the boundary
    /// counter-clockwise.
    pub fn stop_agrees(&self, k: usize) -> Option<bool> {
        let end = self.stop_end(k);
        let o = self.branches[end.branch].orient?;
        // leaving a tail end the normal on the left points clockwise
        Some((o == Orientation::Plus) == end.head)
    }

    /// Boundary bigons: disks with two corners, no cusps and one boundary arc.
    pub fn boundary_bigons(&self) -> Vec<(usize, usize)> {
        (0..self.regions.len())
            .filter_map(|r| {
                let shape = region_shape(self, r);
                let arcs: Vec<usize> = self.regions[r]
                    .walk
                    .iter()
                    .flatten()
                    .filter_map(|t| match t {
                        Token::Arc(k) => Some(*k),
                        _ => None,
                    })
                    .collect();
                (shape.components == 1 && shape.corners == 2 && shape.cusps == 0 && arcs.len() == 1).then(|| (r, arcs[0]))
            })
            .collect()
    }
}

/// Pulls the coorientation back to the branches (or uses the orientations in
/// the document), checks consistency at switches, and tags boundary bigons.
pub fn orient_and_classify_bigons(
    diagram: &DiskDiagram,
    tri: &Triangulation,
    coor: Option<&Coorientation>,
) -> Result<(DiskDiagram, Vec<BigonTag>), DiskError> {
    let mut out = diagram.clone();
    for b in 0..out.branches.len() {
        let given = out.branches[b].orient;
        let pulled = coor.map(|c| {
            if c.points_into(tri, out.slot(b, true)) {
                Orientation::Plus
            } else {
                Orientation::Minus
            }
        });
        out.branches[b].orient = match (given, pulled) {
            (Some(g), Some(p)) if g != p => {
                return Err(DiskError::Orientation(format!("b{b} is marked {g} but the coorientation gives {p}")))
            }
            (_, Some(p)) => Some(p),
            (Some(g), None) => Some(g),
            (None, None) => return Err(DiskError::Orientation(format!("b{b} has no orientation"))),
        };
    }
    for (s, sw) in out.switches.iter().enumerate() {
        let left = |e: &super::EndRef| (out.branches[e.branch].orient == Some(Orientation::Plus)) != e.head;
        let a: Vec<bool> = sw.sides[0].iter().map(left).collect();
        let b: Vec<bool> = sw.sides[1].iter().map(left).collect();
        let ok = a.iter().all(|&x| x == a[0]) && b.iter().all(|&x| x != a[0]);
        if !ok {
            return Err(DiskError::Orientation(format!("orientations disagree at s{s}")));
        }
    }
    let mut tags = Vec::new();
    for (region, arc) in out.boundary_bigons() {
        let into: Vec<bool> = out.regions[region]
            .walk
            .iter()
            .flatten()
            .filter_map(|t| match *t {
                Token::Side { branch, plus } => out.points_into_side(branch, plus),
                _ => None,
            })
            .collect();
        if into.iter().any(|&x| x != into[0]) {
            return Err(DiskError::Orientation(format!("bigon r{region} has a mixed side")));
        }
        let kind = if into[0] { BigonKind::Max } else { BigonKind::Min };
        tags.push(BigonTag { region, arc, kind });
    }
    Ok((out, tags))
}
