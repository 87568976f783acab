use std::collections::BTreeMap;

use serde::Serialize;

use super::orient::{BigonKind, BigonTag};
use super::{build_diagram, DiagramDoc, DiskDiagram, DiskError, EndRef, Map, Node, Region, Switch, Token, Vertex};
use crate::loops::DualLoop;
use crate::tri::Triangulation;

#[derive(Clone, Debug, Serialize)]
pub struct PushReport {
    pub diagram: DiskDiagram,
    pub removed_region: usize,
    pub regions_before: usize,
    pub regions_after: usize,
    /// Boundary loop read off the new labels.
    pub boundary_loop: Option<DualLoop>,
}

fn bigon_tag(d: &DiskDiagram, region: usize) -> Result<BigonTag, DiskError> {
    let (_, arc) = d
        .boundary_bigons()
        .into_iter()
        .find(|&(r, _)| r == region)
        .ok_or(DiskError::WrongRegion { region, expected: "boundary bigon" })?;
    let into = d.regions[region].walk[0].iter().find_map(|t| match *t {
        Token::Side { branch, plus } => Some(d.points_into_side(branch, plus)),
        _ => None,
    });
    match into.flatten() {
        None => Err(DiskError::Orientation(format!("r{region} has an unoriented side"))),
        Some(true) => Ok(BigonTag { region, arc, kind: BigonKind::Max }),
        Some(false) => Ok(BigonTag { region, arc, kind: BigonKind::Min }),
    }
}

/// Slides the boundary across a min-bigon: the bigon and its track side go,
/// and the far ends at the side's switches become stops.
pub fn push_min_bigon(d: &DiskDiagram, tri: &Triangulation, region: usize) -> Result<PushReport, DiskError> {
    let tag = bigon_tag(d, region)?;
    if tag.kind != BigonKind::Min {
        return Err(DiskError::WrongRegion { region, expected: "min-bigon" });
    }
    let n = d.stops;
    let k = tag.arc;
    let comp = &d.regions[region].walk[0];
    let at = comp.iter().position(|t| *t == Token::Arc(k)).unwrap();
    let mut side: Vec<(usize, bool)> = Vec::new();
    for i in 1..comp.len() {
        match comp[(at + i) % comp.len()] {
            Token::Side { branch, plus } => side.push((branch, plus)),
            other => return Err(DiskError::Walk { region, msg: format!("unexpected {other} on the track side") }),
        }
    }
    let mut removed: Vec<usize> = side.iter().map(|s| s.0).collect();
    removed.sort();
    removed.dedup();
    if removed.len() != side.len() {
        return Err(DiskError::Walk { region, msg: "track side repeats a branch".into() });
    }
    // switches on the side, in walk order, with their far ends in new boundary order
    let mut sigmas: Vec<(usize, Vec<EndRef>)> = Vec::new();
    for j in 0..side.len() - 1 {
        let (b, plus) = side[j];
        let Vertex::Smooth { switch } = d.vertex_between(Token::Side { branch: b, plus }, Token::Side { branch: side[j + 1].0, plus: side[j + 1].1 }) else {
            return Err(DiskError::Walk { region, msg: "the track side of a bigon must pass switches smoothly".into() });
        };
        if sigmas.iter().any(|(s, _)| *s == switch) {
            return Err(DiskError::Walk { region, msg: format!("the track side meets s{switch} twice") });
        }
        let rot = d.switches[switch].rotation();
        let e_in = EndRef { branch: b, head: plus };
        let pos = rot.iter().position(|e| *e == e_in).unwrap();
        // ends strictly counter-clockwise between the arrival and departure ends
        let far: Vec<EndRef> = (1..rot.len() - 1).map(|i| rot[(pos + i) % rot.len()]).collect();
        let mut along = far;
        along.reverse();
        sigmas.push((switch, along));
    }
    // new boundary order: surviving old stops from k+2, then far ends of the
    // switches in reverse walk order
    enum NewStop {
        Old(usize),
        End(EndRef),
    }
    let mut order: Vec<NewStop> = (2..n).map(|i| NewStop::Old((k + i) % n)).collect();
    for (_, ends) in sigmas.iter().rev() {
        order.extend(ends.iter().map(|e| NewStop::End(*e)));
    }
    let start = order
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            NewStop::Old(o) => Some((*o, i)),
            _ => None,
        })
        .min()
        .map_or(0, |(_, i)| i);
    order.rotate_left(start);
    let mut old_stop_new = BTreeMap::new();
    let mut end_stop_new = BTreeMap::new();
    for (i, s) in order.iter().enumerate() {
        match s {
            NewStop::Old(o) => old_stop_new.insert(*o, i),
            NewStop::End(e) => end_stop_new.insert(*e, i),
        };
    }
    let removed_switch: Vec<usize> = sigmas.iter().map(|s| s.0).collect();
    let switch_new: Vec<Option<usize>> = {
        let mut next = 0;
        (0..d.switches.len())
            .map(|s| {
                (!removed_switch.contains(&s)).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let mut branch_new = vec![None; d.branches.len()];
    let mut branch_old = Vec::new();
    for (b, slot) in branch_new.iter_mut().enumerate() {
        if !removed.contains(&b) {
            *slot = Some(branch_old.len());
            branch_old.push(b);
        }
    }
    let map_node = |node: Node, end: EndRef| -> Node {
        match node {
            Node::Stop(o) => Node::Stop(old_stop_new[&o]),
            Node::Switch(s) => match switch_new[s] {
                Some(ns) => Node::Switch(ns),
                None => Node::Stop(end_stop_new[&end]),
            },
        }
    };
    let branches = branch_old
        .iter()
        .map(|&b| {
            let mut br = d.branches[b].clone();
            br.ends = br.ends.map(|(v, w)| {
                (map_node(v, EndRef { branch: b, head: false }), map_node(w, EndRef { branch: b, head: true }))
            });
            br
        })
        .collect();
    let switches = (0..d.switches.len())
        .filter(|s| switch_new[*s].is_some())
        .map(|s| {
            let m = |e: &EndRef| EndRef { branch: branch_new[e.branch].expect("surviving switch keeps its branches"), head: e.head };
            Switch { sides: [d.switches[s].sides[0].iter().map(m).collect(), d.switches[s].sides[1].iter().map(m).collect()] }
        })
        .collect();
    let mut doc = DiagramDoc { stops: order.len(), switches, branches, regions: vec![], boundary: None };
    let faces = Map::new(&doc).faces();
    let far_region = d.region_at(Token::Side { branch: side[0].0, plus: !side[0].1 });
    let mut walks: BTreeMap<usize, Vec<Vec<Token>>> = BTreeMap::new();
    for face in faces {
        let owner = face
            .iter()
            .find_map(|t| match *t {
                Token::Side { branch, plus } => Some(d.region_at(Token::Side { branch: branch_old[branch], plus })),
                _ => None,
            })
            .unwrap_or(far_region);
        walks.entry(owner).or_default().push(face);
    }
    for (r, old) in d.regions.iter().enumerate() {
        if r == region {
            continue;
        }
        let walk = walks.remove(&r).ok_or(DiskError::Walk { region: r, msg: "region vanished in the push".into() })?;
        doc.regions.push(Region { walk, tet: old.tet });
    }
    let diagram = build_diagram(doc, tri)?;
    Ok(PushReport {
        boundary_loop: diagram.boundary_dual_loop(),
        regions_before: d.regions.len(),
        regions_after: diagram.regions.len(),
        removed_region: region,
        diagram,
    })
}
