//! Loops transverse to the branched surface (dual loops) and loops immersed in
//! it (normal loops), plus the raised copy of a normal loop and upward pushes.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::perm::faces_of_edge;
use crate::taut::{all_branch_sides, Color, Equator, EdgeSides, TautStructure};
use crate::transverse::{verify_coorientation, Coorientation, CoverTriangulation};
use crate::tri::{EdgeClass, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("loop has no steps")]
    Empty,
    #[error("step {step} references a simplex outside the triangulation")]
    OutOfRange { step: usize },
    #[error("step {step}: {msg}")]
    Malformed { step: usize, msg: String },
    #[error("dual loop does not close up between step {step} and the next")]
    Closure { step: usize },
    #[error("a valid co-orientation is required")]
    NoCoorientation,
    #[error("loop is not normal")]
    NotNormal(Vec<NormalViolation>),
    #[error("site {site} is out of range")]
    SiteOutOfRange { site: usize },
    #[error("site {site}: {edge:?} is not an equatorial edge of tetrahedron {tet}")]
    NotEquatorial { site: usize, tet: usize, edge: (u8, u8) },
    #[error("raised curve is degenerate at arc {arc}")]
    Degenerate { arc: usize },
}

/// One passage of a dual loop through a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DualStep {
    pub tet: usize,
    pub face_in: u8,
    pub face_out: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualLoop {
    pub steps: Vec<DualStep>,
}

/// A normal arc in face `face` of `tet`, cutting off the corner at `apex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NormalArc {
    pub tet: usize,
    pub face: u8,
    pub apex: u8,
}

impl NormalArc {
    /// The two model edges cut by the arc, ordered by their far vertex.
    pub fn cut_edges(self) -> [(u8, u8); 2] {
        let mut others = (0..4u8).filter(|&v| v != self.face && v != self.apex);
        let w1 = others.next().unwrap();
        let w2 = others.next().unwrap();
        [sorted(self.apex, w1), sorted(self.apex, w2)]
    }

    fn from_edges(tet: usize, face: u8, x: (u8, u8), y: (u8, u8)) -> Self {
        let apex = if x.0 == y.0 || x.0 == y.1 { x.0 } else { x.1 };
        NormalArc { tet, face, apex }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalLoop {
    pub arcs: Vec<NormalArc>,
}

fn sorted(a: u8, b: u8) -> (u8, u8) {
    (a.min(b), a.max(b))
}

fn parse_groups(text: &str, keyword: &str) -> Result<Vec<[u64; 3]>, LoopError> {
    let body: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
    let body = body.trim();
    let rest = body
        .strip_prefix(keyword)
        .ok_or_else(|| LoopError::Syntax(format!("expected `{keyword}`")))?;
    let mut groups = Vec::new();
    let mut chunks = rest.split('(');
    if !chunks.next().unwrap_or("").trim().is_empty() {
        return Err(LoopError::Syntax("text before first group".into()));
    }
    for chunk in chunks {
        let (inside, after) = chunk
            .split_once(')')
            .ok_or_else(|| LoopError::Syntax("unclosed group".into()))?;
        if !after.trim().is_empty() {
            return Err(LoopError::Syntax(format!("stray text `{}`", after.trim())));
        }
        let nums: Vec<u64> = inside
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| LoopError::Syntax(format!("bad number `{w}`"))))
            .collect::<Result<_, _>>()?;
        let triple: [u64; 3] = nums
            .try_into()
            .map_err(|_| LoopError::Syntax("each group needs three numbers".into()))?;
        groups.push(triple);
    }
    Ok(groups)
}

fn small(v: u64, step: usize) -> Result<u8, LoopError> {
    u8::try_from(v)
        .ok()
        .filter(|&x| x < 4)
        .ok_or(LoopError::Malformed { step, msg: format!("vertex or face label {v} is not in 0..3") })
}

impl DualLoop {
    pub fn parse(text: &str) -> Result<Self, LoopError> {
        let steps = parse_groups(text, "dual")?
            .into_iter()
            .enumerate()
            .map(|(step, [t, f, g])| {
                Ok(DualStep { tet: t as usize, face_in: small(f, step)?, face_out: small(g, step)? })
            })
            .collect::<Result<_, _>>()?;
        Ok(DualLoop { steps })
    }

    pub fn to_text(&self) -> String {
        let groups: Vec<String> = self.steps.iter().map(|s| format!("({} {} {})", s.tet, s.face_in, s.face_out)).collect();
        format!("dual {}\n", groups.join(" "))
    }

    /// Structural checks: non-empty, in range, distinct faces, cyclic gluing linkage.
    pub fn check_closure(&self, tri: &Triangulation) -> Result<(), LoopError> {
        self.check_linkage(tri)?;
        match self.steps.iter().position(|s| s.face_in == s.face_out) {
            Some(step) => Err(LoopError::Malformed { step, msg: "face_in equals face_out".into() }),
            None => Ok(()),
        }
    }

    /// Non-empty, in range and glued up cyclically. A step may leave through the
    /// face it came in by; raised curves do this over a shortening site.
    pub fn check_linkage(&self, tri: &Triangulation) -> Result<(), LoopError> {
        if self.steps.is_empty() {
            return Err(LoopError::Empty);
        }
        for (i, s) in self.steps.iter().enumerate() {
            if s.tet >= tri.tet_count() {
                return Err(LoopError::OutOfRange { step: i });
            }
        }
        for (i, s) in self.steps.iter().enumerate() {
            let next = self.steps[(i + 1) % self.steps.len()];
            let g = tri.gluing(s.tet, s.face_out);
            if g.tet != next.tet || g.perm.apply(s.face_out) != next.face_in {
                return Err(LoopError::Closure { step: i });
            }
        }
        Ok(())
    }
}

impl NormalLoop {
    pub fn parse(text: &str) -> Result<Self, LoopError> {
        let arcs = parse_groups(text, "normal")?
            .into_iter()
            .enumerate()
            .map(|(step, [t, f, v])| {
                let face = small(f, step)?;
                let apex = small(v, step)?;
                if face == apex {
                    return Err(LoopError::Malformed { step, msg: "apex must be a vertex of the face".into() });
                }
                Ok(NormalArc { tet: t as usize, face, apex })
            })
            .collect::<Result<_, _>>()?;
        Ok(NormalLoop { arcs })
    }

    pub fn to_text(&self) -> String {
        let groups: Vec<String> = self.arcs.iter().map(|a| format!("({} {} {})", a.tet, a.face, a.apex)).collect();
        format!("normal {}\n", groups.join(" "))
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerticalViolation {
    pub step: usize,
    pub tet: usize,
    pub faces: (u8, u8),
}

/// Steps whose two faces lie on the same side of the equator.
pub fn check_vertical(
    tri: &Triangulation,
    taut: &TautStructure,
    dual: &DualLoop,
) -> Result<Vec<VerticalViolation>, LoopError> {
    dual.check_closure(tri)?;
    Ok(dual
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let eq = Equator::of(taut.pair(s.tet));
            eq.side(s.face_in) == eq.side(s.face_out)
        })
        .map(|(step, s)| VerticalViolation { step, tet: s.tet, faces: (s.face_in, s.face_out) })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalViolation {
    /// Arc `crossing` leaves along a different edge class than arc `crossing + 1` enters.
    EdgeMismatch { crossing: usize, exit_class: usize, entry_class: usize },
    /// Both faces at the crossing lie on the same branching side.
    NotSmooth { crossing: usize, class: usize, colors: [Color; 2] },
}

/// A normal arc together with the direction the loop runs through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedArc {
    pub arc: NormalArc,
    pub entry: (u8, u8),
    pub exit: (u8, u8),
}

impl OrientedArc {
    fn with_choice(arc: NormalArc, choice: usize) -> Self {
        let cut = arc.cut_edges();
        OrientedArc { arc, entry: cut[1 - choice], exit: cut[choice] }
    }
}

/// Face-germ positions and colours at the crossing from `a` into `b`.
struct CrossingData {
    class: usize,
    from: usize,
    to: usize,
    colors: [Color; 2],
}

fn crossing_data(tri: &Triangulation, sides: &[EdgeSides], a: &OrientedArc, b: &OrientedArc) -> Result<CrossingData, (usize, usize)> {
    let p = tri.face_germ_position(a.arc.tet, a.arc.face, a.exit.0, a.exit.1);
    let q = tri.face_germ_position(b.arc.tet, b.arc.face, b.entry.0, b.entry.1);
    if p.class != q.class {
        return Err((p.class, q.class));
    }
    let colors = [sides[p.class].colors[p.position], sides[q.class].colors[q.position]];
    Ok(CrossingData { class: p.class, from: p.position, to: q.position, colors })
}

fn crossing_ok(tri: &Triangulation, sides: &[EdgeSides], a: &OrientedArc, b: &OrientedArc) -> bool {
    matches!(crossing_data(tri, sides, a, b), Ok(d) if d.colors[0] != d.colors[1])
}

fn check_arcs_in_range(tri: &Triangulation, normal: &NormalLoop) -> Result<(), LoopError> {
    if normal.arcs.is_empty() {
        return Err(LoopError::Empty);
    }
    for (step, a) in normal.arcs.iter().enumerate() {
        if a.tet >= tri.tet_count() {
            return Err(LoopError::OutOfRange { step });
        }
        if a.face > 3 || a.apex > 3 || a.face == a.apex {
            return Err(LoopError::Malformed { step, msg: "not a normal arc".into() });
        }
    }
    Ok(())
}

/// Finds directions for the arcs so that every crossing matches edge classes
/// and is smooth. Arc `i` runs out through its first cut edge whenever that
/// still admits a consistent completion.
pub fn orient_normal(
    tri: &Triangulation,
    taut: &TautStructure,
    normal: &NormalLoop,
) -> Result<Result<Vec<OrientedArc>, Vec<NormalViolation>>, LoopError> {
    check_arcs_in_range(tri, normal)?;
    let sides = all_branch_sides(tri, taut);
    let n = normal.arcs.len();
    let options: Vec<[OrientedArc; 2]> = normal
        .arcs
        .iter()
        .map(|&a| [OrientedArc::with_choice(a, 0), OrientedArc::with_choice(a, 1)])
        .collect();
    for first in 0..2 {
        // feasible[i][c]: choice c at arc i extends to a consistent tail ending at arc 0's choice `first`
        let mut feasible = vec![[false; 2]; n];
        for i in (0..n).rev() {
            for c in 0..2 {
                if i == 0 && c != first {
                    continue;
                }
                feasible[i][c] = if i == n - 1 {
                    crossing_ok(tri, &sides, &options[i][c], &options[0][first])
                } else {
                    (0..2).any(|d| feasible[i + 1][d] && crossing_ok(tri, &sides, &options[i][c], &options[i + 1][d]))
                };
            }
        }
        if feasible[0][first] {
            let mut out = vec![options[0][first]];
            for i in 1..n {
                let prev = out[i - 1];
                let c = (0..2)
                    .find(|&d| feasible[i][d] && crossing_ok(tri, &sides, &prev, &options[i][d]))
                    .expect("feasibility table is consistent");
                out.push(options[i][c]);
            }
            return Ok(Ok(out));
        }
    }
    // no consistent direction: report against a greedy choice
    let mut chosen = vec![options[0][0]];
    for i in 1..n {
        let prev = chosen[i - 1];
        let pick = (0..2)
            .find(|&d| crossing_ok(tri, &sides, &prev, &options[i][d]))
            .or_else(|| (0..2).find(|&d| crossing_data(tri, &sides, &prev, &options[i][d]).is_ok()))
            .unwrap_or(0);
        chosen.push(options[i][pick]);
    }
    let mut report = Vec::new();
    for i in 0..n {
        match crossing_data(tri, &sides, &chosen[i], &chosen[(i + 1) % n]) {
            Err((exit_class, entry_class)) => {
                report.push(NormalViolation::EdgeMismatch { crossing: i, exit_class, entry_class })
            }
            Ok(d) if d.colors[0] == d.colors[1] => {
                report.push(NormalViolation::NotSmooth { crossing: i, class: d.class, colors: d.colors })
            }
            Ok(_) => {}
        }
    }
    Ok(Err(report))
}

/// Empty iff the arcs can be run in a direction making every crossing match
/// and smooth.
pub fn check_normal(
    tri: &Triangulation,
    taut: &TautStructure,
    normal: &NormalLoop,
) -> Result<Vec<NormalViolation>, LoopError> {
    Ok(orient_normal(tri, taut, normal)?.err().unwrap_or_default())
}

/// The six kinds of raised arc, by where their ends sit and what lies below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ArcType {
    A1,
    A2,
    A3,
    B1,
    B2,
    C,
}

impl ArcType {
    pub fn is_a(self) -> bool {
        matches!(self, ArcType::A1 | ArcType::A2 | ArcType::A3)
    }

    pub fn is_b(self) -> bool {
        matches!(self, ArcType::B1 | ArcType::B2)
    }
}

impl fmt::Display for ArcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// What a raised arc projects to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lowering {
    /// The crossing point of the loop after arc `crossing` with edge class `class`.
    Vertex { crossing: usize, class: usize },
    /// Consecutive arcs of the loop, by index.
    Arcs { indices: Vec<usize>, arcs: Vec<NormalArc> },
}

impl Lowering {
    pub fn arc_count(&self) -> usize {
        match self {
            Lowering::Vertex { .. } => 0,
            Lowering::Arcs { arcs, .. } => arcs.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaisedArc {
    pub tet: usize,
    pub face_in: u8,
    pub face_out: u8,
    pub in_lower: bool,
    pub out_lower: bool,
    /// Model edges of `tet` at which the arc's ends sit over the loop.
    pub edge_in: (u8, u8),
    pub edge_out: (u8, u8),
    pub kind: ArcType,
    pub lowering: Lowering,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaisedCurve {
    pub arcs: Vec<RaisedArc>,
    /// The directions used for the loop's arcs.
    pub oriented: Vec<OrientedArc>,
}

impl RaisedCurve {
    pub fn as_dual_loop(&self) -> DualLoop {
        DualLoop {
            steps: self
                .arcs
                .iter()
                .map(|a| DualStep { tet: a.tet, face_in: a.face_in, face_out: a.face_out })
                .collect(),
        }
    }

    /// The arcs below the raised curve, read in order.
    pub fn lowered_arcs(&self) -> Vec<NormalArc> {
        self.arcs
            .iter()
            .flat_map(|a| match &a.lowering {
                Lowering::Vertex { .. } => vec![],
                Lowering::Arcs { arcs, .. } => arcs.clone(),
            })
            .collect()
    }

    pub fn count(&self, kind: ArcType) -> usize {
        self.arcs.iter().filter(|a| a.kind == kind).count()
    }
}

/// One tetrahedron visited while the raised curve passes over a crossing.
#[derive(Clone, Copy, Debug)]
struct PathTet {
    tet: usize,
    edge: (u8, u8),
    /// Face the raised curve arrives through, or for the first tetrahedron the
    /// face of the arc below it.
    enter: u8,
    /// Face it leaves through, or for the last tetrahedron the face of the next arc.
    leave: u8,
}

/// Tetrahedra over the crossing from face germ `from` to face germ `to`, going
/// the way round the edge that passes the tetrahedron sitting on top of it.
fn crossing_path(tri: &Triangulation, coor: &Coorientation, class: &EdgeClass, from: usize, to: usize) -> Vec<PathTet> {
    let d = class.degree();
    let top = class
        .germs
        .iter()
        .position(|g| coor.is_lower(tri, g.tet, g.entry_face) && coor.is_lower(tri, g.tet, g.exit_face))
        .expect("transverse taut edge has a top tetrahedron");
    let forward: Vec<usize> = (0..(to + d - from) % d).map(|k| (from + k) % d).collect();
    if forward.contains(&top) {
        forward
            .into_iter()
            .map(|g| {
                let germ = class.germs[g];
                PathTet { tet: germ.tet, edge: germ.edge, enter: germ.entry_face, leave: germ.exit_face }
            })
            .collect()
    } else {
        (0..(from + d - to) % d)
            .map(|k| {
                let germ = class.germs[(from + d - 1 - k) % d];
                PathTet { tet: germ.tet, edge: germ.edge, enter: germ.exit_face, leave: germ.entry_face }
            })
            .collect()
    }
}

fn upper_path(coor_lower: impl Fn(u8) -> bool, tet: usize, x: (u8, u8), y: (u8, u8)) -> Vec<OrientedArc> {
    if x == y {
        return vec![];
    }
    let upper_face_of = |e: (u8, u8)| {
        let (f, g) = faces_of_edge(e.0, e.1);
        if coor_lower(f) {
            g
        } else {
            f
        }
    };
    let ux = upper_face_of(x);
    let uy = upper_face_of(y);
    let piece = |face, a, b| OrientedArc { arc: NormalArc::from_edges(tet, face, a, b), entry: a, exit: b };
    if ux == uy {
        vec![piece(ux, x, y)]
    } else {
        let top = crate::perm::common_edge(ux, uy);
        vec![piece(ux, x, top), piece(uy, top, y)]
    }
}

fn a_subtype(lowered: usize, replacement: usize) -> ArcType {
    match replacement.cmp(&lowered) {
        std::cmp::Ordering::Less => ArcType::A1,
        std::cmp::Ordering::Equal => ArcType::A2,
        std::cmp::Ordering::Greater => ArcType::A3,
    }
}

/// Lifts a normal loop slightly upwards and records what lies under each
/// piece of the lifted loop.
pub fn raise_loop(
    tri: &Triangulation,
    taut: &TautStructure,
    coor: &Coorientation,
    normal: &NormalLoop,
) -> Result<RaisedCurve, LoopError> {
    let oriented = orient_normal(tri, taut, normal)?.map_err(LoopError::NotNormal)?;
    raise_oriented(tri, taut, coor, &oriented)
}

/// [`raise_loop`] for a loop whose arc directions are already fixed.
pub fn raise_oriented(
    tri: &Triangulation,
    taut: &TautStructure,
    coor: &Coorientation,
    oriented: &[OrientedArc],
) -> Result<RaisedCurve, LoopError> {
    match verify_coorientation(tri, taut, coor) {
        Ok(v) if v.is_empty() => {}
        _ => return Err(LoopError::NoCoorientation),
    }
    let sides = all_branch_sides(tri, taut);
    let n = oriented.len();
    if n == 0 {
        return Err(LoopError::Empty);
    }
    let mut report = Vec::new();
    for i in 0..n {
        match crossing_data(tri, &sides, &oriented[i], &oriented[(i + 1) % n]) {
            Err((exit_class, entry_class)) => {
                report.push(NormalViolation::EdgeMismatch { crossing: i, exit_class, entry_class })
            }
            Ok(d) if d.colors[0] == d.colors[1] => {
                report.push(NormalViolation::NotSmooth { crossing: i, class: d.class, colors: d.colors })
            }
            Ok(_) => {}
        }
    }
    if !report.is_empty() {
        return Err(LoopError::NotNormal(report));
    }
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let data = crossing_data(tri, &sides, &oriented[i], &oriented[(i + 1) % n]).expect("oriented loop");
        paths.push(crossing_path(tri, coor, &tri.edge_classes()[data.class], data.from, data.to));
    }
    let classes: Vec<usize> = (0..n)
        .map(|i| crossing_data(tri, &sides, &oriented[i], &oriented[(i + 1) % n]).ok().unwrap().class)
        .collect();
    for i in 0..n {
        if paths[i].len() == 1 && paths[(i + 1) % n].len() == 1 {
            return Err(LoopError::Degenerate { arc: (i + 1) % n });
        }
        if paths[(i + n - 1) % n].last().unwrap().tet != paths[i][0].tet {
            return Err(LoopError::Degenerate { arc: i });
        }
    }
    let lower = |tet: usize, face: u8| coor.is_lower(tri, tet, face);
    let start = if paths[n - 1].len() == 1 { 1 % n } else { 0 };
    let mut arcs = Vec::new();
    let mut covered = 0;
    let mut j = start;
    while covered < n {
        let before = paths[(j + n - 1) % n].last().copied().unwrap();
        let merged = paths[j].len() == 1;
        let indices: Vec<usize> = if merged { vec![j, (j + 1) % n] } else { vec![j] };
        let after_path = (j + indices.len() - 1) % n;
        let after = paths[after_path][0];
        let tet = before.tet;
        let (face_in, face_out) = (before.enter, after.leave);
        let (in_lower, out_lower) = (lower(tet, face_in), lower(tet, face_out));
        let kind = match (in_lower, out_lower) {
            (false, false) => {
                let replacement = upper_path(|f| lower(tet, f), tet, before.edge, after.edge);
                a_subtype(indices.len(), replacement.len())
            }
            (true, true) => ArcType::C,
            _ => ArcType::B2,
        };
        arcs.push(RaisedArc {
            tet,
            face_in,
            face_out,
            in_lower,
            out_lower,
            edge_in: before.edge,
            edge_out: after.edge,
            kind,
            lowering: Lowering::Arcs { arcs: indices.iter().map(|&k| oriented[k].arc).collect(), indices: indices.clone() },
        });
        covered += indices.len();
        let path = &paths[after_path];
        for p in &path[1..path.len().saturating_sub(1)] {
            let (il, ol) = (lower(p.tet, p.enter), lower(p.tet, p.leave));
            let kind = match (il, ol) {
                (true, true) => ArcType::C,
                (false, false) => return Err(LoopError::Degenerate { arc: after_path }),
                _ => ArcType::B1,
            };
            arcs.push(RaisedArc {
                tet: p.tet,
                face_in: p.enter,
                face_out: p.leave,
                in_lower: il,
                out_lower: ol,
                edge_in: p.edge,
                edge_out: p.edge,
                kind,
                lowering: Lowering::Vertex { crossing: after_path, class: classes[after_path] },
            });
        }
        j = (after_path + 1) % n;
    }
    Ok(RaisedCurve { arcs, oriented: oriented.to_vec() })
}

/// Outcome of pushing a loop up across one tetrahedron.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushUp {
    pub result: NormalLoop,
    /// Directions of the new loop, inherited from the old one.
    pub oriented: Vec<OrientedArc>,
    pub tet: usize,
    pub removed: Vec<usize>,
    pub replacement: Vec<NormalArc>,
    pub site_type: ArcType,
}

impl PushUp {
    pub fn length_change(&self) -> i64 {
        self.replacement.len() as i64 - self.removed.len() as i64
    }
}

/// Indices of loop arcs that start a push-up site, in loop order.
pub fn push_sites(curve: &RaisedCurve) -> Vec<usize> {
    let mut out: Vec<usize> = curve
        .arcs
        .iter()
        .filter(|a| a.kind.is_a())
        .filter_map(|a| match &a.lowering {
            Lowering::Arcs { indices, .. } => indices.first().copied(),
            Lowering::Vertex { .. } => None,
        })
        .collect();
    out.sort_unstable();
    out
}

/// Replaces the maximal run of arcs containing arc `site` that lies in the
/// lower faces of one tetrahedron by the normal path through its upper faces.
pub fn push_up(
    tri: &Triangulation,
    taut: &TautStructure,
    coor: &Coorientation,
    normal: &NormalLoop,
    site: usize,
) -> Result<PushUp, LoopError> {
    if site >= normal.arcs.len() {
        return Err(LoopError::SiteOutOfRange { site });
    }
    let oriented = orient_normal(tri, taut, normal)?.map_err(LoopError::NotNormal)?;
    push_up_oriented(tri, taut, coor, &oriented, site)
}

pub fn push_up_oriented(
    tri: &Triangulation,
    taut: &TautStructure,
    coor: &Coorientation,
    oriented: &[OrientedArc],
    site: usize,
) -> Result<PushUp, LoopError> {
    if site >= oriented.len() {
        return Err(LoopError::SiteOutOfRange { site });
    }
    let curve = raise_oriented(tri, taut, coor, oriented)?;
    let raised = curve
        .arcs
        .iter()
        .find(|a| matches!(&a.lowering, Lowering::Arcs { indices, .. } if indices.contains(&site)))
        .expect("every arc lies under the raised curve");
    let Lowering::Arcs { indices, .. } = &raised.lowering else { unreachable!() };
    let tet = raised.tet;
    for e in [raised.edge_in, raised.edge_out] {
        if taut.is_pi(tet, e.0, e.1) {
            return Err(LoopError::NotEquatorial { site, tet, edge: e });
        }
    }
    let replacement = upper_path(|f| coor.is_lower(tri, tet, f), tet, raised.edge_in, raised.edge_out);
    let n = oriented.len();
    let first = indices[0];
    let new: Vec<OrientedArc> = if first + indices.len() <= n {
        let mut v = oriented[..first].to_vec();
        v.extend(replacement.iter().copied());
        v.extend_from_slice(&oriented[first + indices.len()..]);
        v
    } else {
        // the run wraps past the end of the loop
        let mut v = oriented[1..first].to_vec();
        v.extend(replacement.iter().copied());
        v
    };
    if new.is_empty() {
        return Err(LoopError::Degenerate { arc: site });
    }
    let result = NormalLoop { arcs: new.iter().map(|o| o.arc).collect() };
    let sides = all_branch_sides(tri, taut);
    for i in 0..new.len() {
        if !crossing_ok(tri, &sides, &new[i], &new[(i + 1) % new.len()]) {
            return Err(LoopError::NotNormal(check_normal(tri, taut, &result)?));
        }
    }
    Ok(PushUp {
        result,
        oriented: new,
        tet,
        removed: indices.clone(),
        replacement: replacement.iter().map(|o| o.arc).collect(),
        site_type: raised.kind,
    })
}

/// Lifts a normal loop to the double cover, starting in the first copy of
/// its first tetrahedron. The lift runs twice around when one pass does not
/// close up.
pub fn lift_to_cover(
    tri: &Triangulation,
    taut: &TautStructure,
    cover: &CoverTriangulation,
    normal: &NormalLoop,
) -> Result<NormalLoop, LoopError> {
    let oriented = orient_normal(tri, taut, normal)?.map_err(LoopError::NotNormal)?;
    let n = oriented.len();
    let up = &cover.tri;
    let mut copy = 0;
    let mut arcs = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        if i == n && copy == 0 {
            break;
        }
        let (here, next) = (oriented[i % n], oriented[(i + 1) % n]);
        let tet = 2 * here.arc.tet + copy;
        arcs.push(NormalArc { tet, ..here.arc });
        let class = up.germ_of(tet, here.exit.0, here.exit.1).class;
        // an edge neighbourhood is simply connected, so exactly one copy matches
        copy = (0..2)
            .find(|&c| up.germ_of(2 * next.arc.tet + c, next.entry.0, next.entry.1).class == class)
            .ok_or(LoopError::Closure { step: i % n })?;
    }
    Ok(NormalLoop { arcs })
}

/// True when `a` is a cyclic rotation of `b`.
pub fn is_rotation<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && (b.is_empty() || (0..b.len()).any(|r| (0..b.len()).all(|k| a[k] == b[(k + r) % b.len()])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;
    use crate::taut::enumerate_taut;
    use crate::transverse::solve_parity;

    #[test]
    fn document_roundtrip() {
        let d = DualLoop::parse("dual (0 1 2) (1 3 0)\n").unwrap();
        assert_eq!(DualLoop::parse(&d.to_text()).unwrap(), d);
        let n = NormalLoop::parse("normal (0 1 2)\n(1 0 3) # comment\n").unwrap();
        assert_eq!(n.arcs.len(), 2);
        assert_eq!(NormalLoop::parse(&n.to_text()).unwrap(), n);
        assert!(NormalLoop::parse("normal (0 1 1)").is_err());
        assert!(DualLoop::parse("dual (0 1)").is_err());
        assert!(DualLoop::parse("normal (0 1 2)").is_err());
    }

    #[test]
    fn empty_loops_are_errors() {
        let tri = census::figure_eight();
        let taut = enumerate_taut(&tri).remove(0);
        let d = DualLoop { steps: vec![] };
        assert_eq!(check_vertical(&tri, &taut, &d), Err(LoopError::Empty));
        let n = NormalLoop { arcs: vec![] };
        assert_eq!(check_normal(&tri, &taut, &n), Err(LoopError::Empty));
    }

    #[test]
    fn cut_edges_avoid_face_vertex() {
        let a = NormalArc { tet: 0, face: 0, apex: 2 };
        assert_eq!(a.cut_edges(), [(1, 2), (2, 3)]);
    }

    #[test]
    fn same_side_step_reported() {
        let tri = census::figure_eight();
        let taut = enumerate_taut(&tri).remove(0);
        // walk straight through faces and close up after returning to the start
        let eq = Equator::of(taut.pair(0));
        let (f, g) = eq.side_a;
        let mut steps = vec![DualStep { tet: 0, face_in: f, face_out: g }];
        let mut cur = tri.gluing(0, g);
        let mut face_in = cur.perm.apply(g);
        for _ in 0..50 {
            if cur.tet == 0 && face_in == f {
                break;
            }
            let out = (0..4u8).find(|&k| k != face_in).unwrap();
            steps.push(DualStep { tet: cur.tet, face_in, face_out: out });
            let next = tri.gluing(cur.tet, out);
            face_in = next.perm.apply(out);
            cur = next;
        }
        let d = DualLoop { steps };
        if d.check_closure(&tri).is_ok() {
            let report = check_vertical(&tri, &taut, &d).unwrap();
            assert!(report.iter().any(|v| v.step == 0));
        }
    }

    fn transverse_examples() -> Vec<(Triangulation, TautStructure, Coorientation)> {
        let mut out = Vec::new();
        for tri in census::one_tetrahedron().into_iter().chain([census::figure_eight()]) {
            for taut in enumerate_taut(&tri) {
                if let Some(c) = solve_parity(&tri, &taut) {
                    out.push((tri.clone(), taut, c));
                }
            }
        }
        out
    }

    #[test]
    fn raise_reconstructs_random_loops() {
        let mut seen = 0;
        for (tri, taut, coor) in transverse_examples() {
            for seed in 0..10 {
                let Some(normal) = crate::corpus::random_normal_loop(&tri, &taut, seed, 12) else { continue };
                let curve = raise_loop(&tri, &taut, &coor, &normal).unwrap();
                let lowered = curve.lowered_arcs();
                assert!(is_rotation(&lowered, &normal.arcs), "{lowered:?} vs {:?}", normal.arcs);
                assert_eq!(curve.as_dual_loop().check_linkage(&tri), Ok(()));
                for a in &curve.arcs {
                    match a.kind {
                        ArcType::B1 | ArcType::C => assert_eq!(a.lowering.arc_count(), 0),
                        ArcType::B2 => assert_eq!(a.lowering.arc_count(), 1),
                        _ => assert!(!a.in_lower && !a.out_lower),
                    }
                }
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn push_up_changes_length_by_replacement() {
        for (tri, taut, coor) in transverse_examples() {
            for seed in 0..10 {
                let Some(normal) = crate::corpus::random_normal_loop(&tri, &taut, seed, 12) else { continue };
                let curve = raise_loop(&tri, &taut, &coor, &normal).unwrap();
                for site in push_sites(&curve) {
                    let push = push_up(&tri, &taut, &coor, &normal, site).unwrap();
                    assert_eq!(push.result.len() as i64 - normal.len() as i64, push.length_change());
                    assert!((-2..=2).contains(&push.length_change()));
                }
            }
        }
    }

    #[test]
    fn lifted_loops_are_normal_and_project_back() {
        use crate::transverse::{build_double_cover, Labelling};
        let mut lifted = 0;
        let mut doubled = 0;
        for tri in census::one_tetrahedron().into_iter().chain([census::figure_eight()]) {
            for taut in enumerate_taut(&tri) {
                let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
                for seed in 0..8 {
                    let Some(normal) = crate::corpus::random_normal_loop(&tri, &taut, seed, 10) else { continue };
                    let up = lift_to_cover(&tri, &taut, &cover, &normal).unwrap();
                    let n = normal.arcs.len();
                    assert!(up.arcs.len() == n || up.arcs.len() == 2 * n);
                    doubled += usize::from(up.arcs.len() == 2 * n);
                    for (i, a) in up.arcs.iter().enumerate() {
                        let b = normal.arcs[i % n];
                        assert_eq!((cover.covering[a.tet], a.face, a.apex), (b.tet, b.face, b.apex));
                    }
                    assert_eq!(check_normal(&cover.tri, &cover.taut, &up), Ok(vec![]));
                    let curve = raise_loop(&cover.tri, &cover.taut, &cover.coor, &up).unwrap();
                    assert!(is_rotation(&curve.lowered_arcs(), &up.arcs));
                    lifted += 1;
                }
            }
        }
        assert!(lifted > 0 && doubled > 0);
    }
}
