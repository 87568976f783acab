use std::collections::BTreeSet;

use serde::Serialize;

use super::index::{region_shape, RegionKind, Shape};
use super::orient::BigonKind;
use super::{DiskDiagram, DiskError, Token, Vertex};
use crate::loops::DualStep;
use crate::perm::common_edge;
use crate::taut::TautStructure;
use crate::transverse::Coorientation;
use crate::tri::Triangulation;

/// Where a traced point stays during the homotopy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "cell")]
pub enum Cell {
    Edge { class: usize },
    Face { class: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub region: usize,
    pub cell: Cell,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub region: usize,
    /// The boundary arc `d_k` of the region.
    pub arc: usize,
    /// Corner branch shared with the next region of the chain.
    pub corner_branch: usize,
    pub index_q: i64,
    pub kind: RegionKind,
    /// Switches in the interior of the side opposite the boundary arc.
    pub side_switches: Vec<usize>,
    /// Lower faces met by the boundary arc's step.
    pub lower_faces: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainEnd {
    NegativeRegion,
    Reversal,
}

/// Regular neighbourhood of the last corner branch inside the terminal region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quadrilateral {
    pub region: usize,
    pub branch: usize,
    pub stop: usize,
    /// The fourth side runs from this boundary arc to this branch of the region.
    pub fourth_side: (usize, usize),
    pub corners: usize,
    pub cusps: usize,
    pub index_q: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxBigonReport {
    pub bigon: usize,
    pub arc: usize,
    pub right: Vec<ChainStep>,
    pub left: Vec<ChainStep>,
    pub right_end: ChainEnd,
    pub left_end: ChainEnd,
    pub q_right: Quadrilateral,
    pub q_left: Quadrilateral,
    /// Regions of the two bigons `B(k)` on either side, sharing the max-bigon.
    pub b_regions: Vec<usize>,
    pub s_corners: usize,
    pub s_cusps: usize,
    pub s_index_q: i64,
    pub traces: Vec<TracePoint>,
    pub embedded: bool,
    pub rectangle: bool,
}

struct Ctx<'a> {
    d: &'a DiskDiagram,
    tri: &'a Triangulation,
    coor: &'a Coorientation,
    steps: Vec<DualStep>,
}

fn claim(name: &'static str, detail: String) -> DiskError {
    DiskError::Claim { claim: name, detail }
}

impl Ctx<'_> {
    fn lower_count(&self, arc: usize) -> usize {
        let s = self.steps[arc];
        [s.face_in, s.face_out].iter().filter(|&&f| self.coor.is_lower(self.tri, s.tet, f)).count()
    }

    fn bottom_edge(&self, tet: usize) -> (u8, u8) {
        let lower = self.coor.lower_faces(self.tri, tet);
        common_edge(lower[0], lower[1])
    }

    fn edge_class(&self, tet: usize, e: (u8, u8)) -> usize {
        self.tri.germ_of(tet, e.0, e.1).class
    }

    /// Faces of the region's tetrahedron on either side of a smooth passage.
    fn passage_faces(&self, a: Token, b: Token) -> (u8, u8) {
        let face = |t: Token| match t {
            Token::Side { branch, plus } => self.d.slot(branch, plus).face,
            _ => unreachable!("passages join branch sides"),
        };
        (face(a), face(b))
    }

    fn agrees(&self, stop: usize) -> bool {
        self.d.stop_agrees(stop).expect("oriented diagram")
    }
}

fn rotate_to(walk: &[Token], first: Token) -> Option<Vec<Token>> {
    let p = walk.iter().position(|t| *t == first)?;
    let mut w = walk.to_vec();
    w.rotate_left(p);
    Some(w)
}

struct Chain {
    steps: Vec<ChainStep>,
    end: ChainEnd,
    q: Quadrilateral,
    glued_cusps: usize,
    traces: Vec<TracePoint>,
}

fn chain(ctx: &Ctx, bigon: usize, k: usize, right: bool) -> Result<Chain, DiskError> {
    let d = ctx.d;
    let n = d.stops;
    let name = if right { "right" } else { "left" };
    let mut steps = Vec::new();
    let mut traces = Vec::new();
    let mut seen = BTreeSet::from([bigon]);
    for i in 1..n {
        let arc = if right { (k + n - i) % n } else { (k + i) % n };
        let glue = if right { (arc + 1) % n } else { arc };
        let outer = if right { arc } else { (arc + 1) % n };
        let region = d.region_at(Token::Arc(arc));
        if !seen.insert(region) {
            return Err(claim("Induct", format!("the {name} chain meets r{region} twice")));
        }
        let comp = d.regions[region].walk.first().filter(|_| d.regions[region].walk.len() == 1);
        let Some(comp) = comp else {
            return Err(claim("Induct", format!("r{region} is not a disk")));
        };
        let walk = rotate_to(comp, Token::Arc(arc)).unwrap();
        let glue_end = d.stop_end(glue);
        // the side opposite the arc, from the glued branch's inner end to the outer corner
        let (glued_tok, side): (Token, Vec<Token>) = if right {
            (walk[1], walk[2..].to_vec())
        } else {
            (walk[walk.len() - 1], walk[1..walk.len() - 1].to_vec())
        };
        debug_assert_eq!(
            glued_tok,
            Token::Side { branch: glue_end.branch, plus: if right { !glue_end.head } else { glue_end.head } }
        );
        let cusp_at_glue = if right {
            walk.get(2).is_some_and(|&nx| matches!(d.vertex_between(glued_tok, nx), Vertex::Cusp { .. }))
        } else {
            walk.len() >= 3 && matches!(d.vertex_between(walk[walk.len() - 2], glued_tok), Vertex::Cusp { .. })
        };
        let side_switches: Vec<usize> = side
            .windows(2)
            .filter_map(|w| match d.vertex_between(w[0], w[1]) {
                Vertex::Smooth { switch } => Some(switch),
                _ => None,
            })
            .collect();
        let shape = region_shape(d, region);
        let index_q = shape.index_q();
        let kind = RegionKind::classify(true, shape.corners, shape.cusps);
        let outer_end = d.stop_end(outer);
        let step = ChainStep {
            region,
            arc,
            corner_branch: outer_end.branch,
            index_q,
            kind,
            side_switches: side_switches.clone(),
            lower_faces: ctx.lower_count(arc),
        };
        if !cusp_at_glue {
            return Err(claim("Induct", format!("r{region} has no cusp at the inner end of b{}", glue_end.branch)));
        }
        let reversal = ctx.agrees(outer) != ctx.agrees(glue);
        let end = if index_q < 0 {
            Some(ChainEnd::NegativeRegion)
        } else if reversal {
            Some(ChainEnd::Reversal)
        } else {
            None
        };
        if let Some(end) = end {
            if kind == RegionKind::BoundaryTrigon {
                return Err(claim("NotTrigon", format!("the {name} chain ends at the boundary trigon r{region}")));
            }
            let q_shape = Shape { components: 1, corners: 3, cusps: 1, inward_corners: 0 };
            let q = Quadrilateral {
                region,
                branch: glue_end.branch,
                stop: glue,
                fourth_side: (arc, side.first().map_or(glue_end.branch, |t| match t {
                    Token::Side { branch, .. } => *branch,
                    _ => glue_end.branch,
                })),
                corners: q_shape.corners,
                cusps: q_shape.cusps,
                index_q: q_shape.index_q(),
            };
            return Ok(Chain { steps, end, q, glued_cusps: i, traces });
        }
        if index_q > 0 {
            return Err(claim("Induct", format!("r{region} has positive index in the {name} chain")));
        }
        if kind != RegionKind::BoundaryTrigon {
            return Err(claim("Induct", format!("r{region} in the {name} chain is not a boundary trigon")));
        }
        if side_switches.len() > 1 {
            return Err(claim("Induct", format!("the side of r{region} meets {} switches", side_switches.len())));
        }
        let tet = d.regions[region].tet;
        let class_of = |branch: usize| d.branches[branch].face;
        traces.push(TracePoint { region, cell: Cell::Face { class: class_of(outer_end.branch) }, ok: step.lower_faces == 1 });
        for w in side.windows(2) {
            if let Vertex::Smooth { .. } = d.vertex_between(w[0], w[1]) {
                let (f, g) = ctx.passage_faces(w[0], w[1]);
                let ok = f != g && common_edge(f, g) == ctx.bottom_edge(tet);
                let class = if f != g { ctx.edge_class(tet, common_edge(f, g)) } else { usize::MAX };
                traces.push(TracePoint { region, cell: Cell::Edge { class }, ok });
            }
        }
        steps.push(step);
    }
    Err(claim("Induct", format!("the {name} chain never stops")))
}

/// Builds the left and right trigon chains of a max-bigon and the rectangle
/// they bound together with two quadrilaterals.
pub fn max_bigon_surgery(
    d: &DiskDiagram,
    tri: &Triangulation,
    _taut: &TautStructure,
    coor: &Coorientation,
    bigon: usize,
) -> Result<MaxBigonReport, DiskError> {
    let (_, arc) = d
        .boundary_bigons()
        .into_iter()
        .find(|&(r, _)| r == bigon)
        .ok_or(DiskError::WrongRegion { region: bigon, expected: "boundary bigon" })?;
    if d.branches.iter().any(|b| b.orient.is_none()) {
        return Err(DiskError::Precondition("orientations must be assigned".into()));
    }
    let into = d.regions[bigon].walk[0].iter().find_map(|t| match *t {
        Token::Side { branch, plus } => d.points_into_side(branch, plus),
        _ => None,
    });
    let kind = if into == Some(true) { BigonKind::Max } else { BigonKind::Min };
    if kind != BigonKind::Max {
        return Err(DiskError::WrongRegion { region: bigon, expected: "max-bigon" });
    }
    let steps = d.boundary_dual_loop().map(|l| l.steps).unwrap_or_default();
    let ctx = Ctx { d, tri, coor, steps };
    let base = ctx.steps[arc];
    if ctx.lower_count(arc) != 2 {
        return Err(claim("Base", format!("d{arc} does not enter and leave t{} through lower faces", base.tet)));
    }
    let walk = rotate_to(&d.regions[bigon].walk[0], Token::Arc(arc)).unwrap();
    let passages: Vec<(Token, Token)> = walk[1..]
        .windows(2)
        .filter(|w| matches!(d.vertex_between(w[0], w[1]), Vertex::Smooth { .. }))
        .map(|w| (w[0], w[1]))
        .collect();
    if passages.len() != 1 {
        return Err(claim("Base", format!("the side of r{bigon} meets {} switches", passages.len())));
    }
    let (f, g) = ctx.passage_faces(passages[0].0, passages[0].1);
    if f == g || common_edge(f, g) != ctx.bottom_edge(base.tet) {
        return Err(claim("Base", format!("the switch on r{bigon} is not at the bottom edge of t{}", base.tet)));
    }
    let mut traces = vec![TracePoint {
        region: bigon,
        cell: Cell::Edge { class: ctx.edge_class(base.tet, common_edge(f, g)) },
        ok: true,
    }];
    let r = chain(&ctx, bigon, arc, true)?;
    let l = chain(&ctx, bigon, arc, false)?;
    let mut b_regions = vec![bigon];
    b_regions.extend(r.steps.iter().map(|s| s.region));
    b_regions.extend(l.steps.iter().map(|s| s.region));
    let distinct: BTreeSet<usize> = b_regions.iter().copied().collect();
    let embedded = distinct.len() == b_regions.len()
        && !distinct.contains(&r.q.region)
        && !distinct.contains(&l.q.region)
        && (r.q.region != l.q.region || r.q.branch != l.q.branch);
    // gluing along a corner branch merges two corners; a trigon's cusp at the
    // glued branch merges with the neighbour's smooth passage
    let glued = b_regions.len() - 1;
    let sum_corners: usize = b_regions.iter().map(|&x| region_shape(d, x).corners).sum();
    let sum_cusps: usize = b_regions.iter().map(|&x| region_shape(d, x).cusps).sum();
    let absorbed = (r.glued_cusps - 1) + (l.glued_cusps - 1);
    let b_corners = sum_corners - 2 * glued;
    let b_cusps = sum_cusps - absorbed;
    let s_corners = b_corners - 2 + (r.q.corners - 1) + (l.q.corners - 1);
    let s_cusps = b_cusps + (r.q.cusps - 1) + (l.q.cusps - 1);
    let s_index_q = Shape { components: 1, corners: s_corners, cusps: s_cusps, inward_corners: 0 }.index_q();
    let additive: i64 = b_regions.iter().map(|&x| region_shape(d, x).index_q()).sum::<i64>() + r.q.index_q + l.q.index_q;
    if additive != s_index_q {
        return Err(claim("Induct", format!("S(r{bigon}) has index {s_index_q} but its pieces sum to {additive}")));
    }
    traces.extend(r.traces);
    traces.extend(l.traces);
    Ok(MaxBigonReport {
        bigon,
        arc,
        rectangle: s_corners == 4 && s_cusps == 0 && s_index_q == 0,
        right: r.steps,
        left: l.steps,
        right_end: r.end,
        left_end: l.end,
        q_right: r.q,
        q_left: l.q,
        b_regions,
        s_corners,
        s_cusps,
        s_index_q,
        traces,
        embedded,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarvedRegion {
    pub region: usize,
    pub index_q: i64,
    /// Quadrilaterals removed from this region.
    pub removed_quads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarveReport {
    pub regions: Vec<CarvedRegion>,
    pub total_q: i64,
    pub positive: Vec<usize>,
    /// Rectangles sharing a region or a quadrilateral.
    pub overlaps: Vec<(usize, usize)>,
}

/// Removes every rectangle: the regions of the bigons disappear and each
/// quadrilateral is cut from its region, which gains one quarter.
pub fn carve(d: &DiskDiagram, reports: &[MaxBigonReport]) -> CarveReport {
    let mut overlaps = Vec::new();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let quads = |r: &MaxBigonReport| [(r.q_right.region, r.q_right.branch), (r.q_left.region, r.q_left.branch)];
            let share = a.b_regions.iter().any(|x| b.b_regions.contains(x))
                || quads(a).iter().any(|q| quads(b).contains(q))
                || quads(a).iter().any(|q| b.b_regions.contains(&q.0))
                || quads(b).iter().any(|q| a.b_regions.contains(&q.0));
            if share {
                overlaps.push((a.bigon, b.bigon));
            }
        }
    }
    let removed: BTreeSet<usize> = reports.iter().flat_map(|r| r.b_regions.iter().copied()).collect();
    let mut regions = Vec::new();
    for r in 0..d.regions.len() {
        if removed.contains(&r) {
            continue;
        }
        let quads: Vec<i64> = reports
            .iter()
            .flat_map(|rep| [&rep.q_right, &rep.q_left])
            .filter(|q| q.region == r)
            .map(|q| q.index_q)
            .collect();
        let index_q = region_shape(d, r).index_q() - quads.iter().sum::<i64>();
        regions.push(CarvedRegion { region: r, index_q, removed_quads: quads.len() });
    }
    let total_q = regions.iter().map(|r| r.index_q).sum();
    let positive = regions.iter().filter(|r| r.index_q > 0).map(|r| r.region).collect();
    CarveReport { regions, total_q, positive, overlaps }
}
