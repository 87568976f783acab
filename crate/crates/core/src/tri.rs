//! Ideal triangulations given by face-gluing tables.
//!
//! Face `k` of a tetrahedron is the face opposite vertex `k`. A gluing of face
//! `k` of tetrahedron `i` is a pair `(j, σ)` where `σ` sends the vertex labels
//! of `i` to those of `j`; face `k` lands on face `σ(k)` of `j`.
//!
//! [`GluingTable`] is the raw, possibly broken, table as read from a document.
//! [`Triangulation`] is a table that passed the structural checks, together
//! with its derived edge and face classes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::perm::{faces_of_edge, Perm4, MODEL_EDGES};
use crate::unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: tetrahedron index {index} out of range (tets {count})")]
    OutOfRange { line: usize, index: usize, count: usize },
    #[error("face {face} of tetrahedron {tet} is glued twice")]
    Duplicate { tet: usize, face: u8 },
    #[error("face {face} of tetrahedron {tet} is not glued")]
    Unglued { tet: usize, face: u8 },
    #[error("gluing of face {face} of tetrahedron {tet} is not matched by its partner")]
    Involution { tet: usize, face: u8 },
    #[error("face {face} of tetrahedron {tet} is glued to itself")]
    SelfGluing { tet: usize, face: u8 },
}

/// Target of one face gluing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

/// A (tetrahedron, face) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaceSlot {
    pub tet: usize,
    pub face: u8,
}

/// A gluing table as written in a document; faces may be missing or mismatched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingTable {
    pub entries: Vec<[Option<Gluing>; 4]>,
}

impl GluingTable {
    pub fn new(tet_count: usize) -> Self {
        GluingTable { entries: vec![[None; 4]; tet_count] }
    }

    pub fn tet_count(&self) -> usize {
        self.entries.len()
    }

    /// Parses the line-oriented document format:
    ///
    /// ```text
    /// tets 2
    /// glue 0 0 -> 1 0132
    /// ```
    pub fn parse(text: &str) -> Result<Self, TriError> {
        let mut table: Option<GluingTable> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            match words[0] {
                "tets" => {
                    if table.is_some() {
                        return Err(syntax(line, "repeated `tets` header"));
                    }
                    if words.len() != 2 {
                        return Err(syntax(line, "expected `tets N`"));
                    }
                    let n = words[1]
                        .parse::<usize>()
                        .map_err(|_| syntax(line, "tetrahedron count is not a number"))?;
                    table = Some(GluingTable::new(n));
                }
                "glue" => {
                    let table = table
                        .as_mut()
                        .ok_or_else(|| syntax(line, "`glue` before `tets` header"))?;
                    if words.len() != 6 || words[3] != "->" {
                        return Err(syntax(line, "expected `glue i k -> j pppp`"));
                    }
                    let i = words[1]
                        .parse::<usize>()
                        .map_err(|_| syntax(line, "bad tetrahedron index"))?;
                    let k = words[2]
                        .parse::<u8>()
                        .ok()
                        .filter(|k| *k < 4)
                        .ok_or_else(|| syntax(line, "face index must be 0..3"))?;
                    let j = words[4]
                        .parse::<usize>()
                        .map_err(|_| syntax(line, "bad tetrahedron index"))?;
                    let perm = words[5].parse::<Perm4>().map_err(|m| syntax(line, &m))?;
                    let count = table.tet_count();
                    for index in [i, j] {
                        if index >= count {
                            return Err(TriError::OutOfRange { line, index, count });
                        }
                    }
                    let slot = &mut table.entries[i][k as usize];
                    if slot.is_some() {
                        return Err(TriError::Duplicate { tet: i, face: k });
                    }
                    *slot = Some(Gluing { tet: j, perm });
                }
                other => return Err(syntax(line, &format!("unknown keyword `{other}`"))),
            }
        }
        Ok(table.unwrap_or_else(|| GluingTable::new(0)))
    }

    /// Bit-exact serialization: faces in `(i, k)` order, single spaces, `\n` line ends.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "tets {}", self.tet_count()).unwrap();
        for (i, faces) in self.entries.iter().enumerate() {
            for (k, g) in faces.iter().enumerate() {
                if let Some(g) = g {
                    writeln!(out, "glue {i} {k} -> {} {}", g.tet, g.perm).unwrap();
                }
            }
        }
        out
    }

    /// Structural problems, in `(tet, face)` order. Empty means the table can
    /// be turned into a [`Triangulation`].
    pub fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, faces) in self.entries.iter().enumerate() {
            for k in 0..4u8 {
                let Some(g) = faces[k as usize] else {
                    out.push(Violation::UngluedFace { tet: i, face: k });
                    continue;
                };
                let back_face = g.perm.apply(k);
                if g.tet == i && back_face == k {
                    out.push(Violation::SelfGluedFace { tet: i, face: k });
                    continue;
                }
                let partner = self.entries.get(g.tet).and_then(|f| f[back_face as usize]);
                match partner {
                    Some(p) if p.tet == i && p.perm == g.perm.inverse() => {}
                    Some(_) => out.push(Violation::Involution { tet: i, face: k }),
                    // reported when the partner face itself is visited
                    None => {}
                }
            }
        }
        out
    }
}

fn syntax(line: usize, msg: &str) -> TriError {
    TriError::Syntax { line, msg: msg.to_string() }
}

/// One model edge of one tetrahedron, as seen while walking around its edge class.
///
/// The walk enters the tetrahedron through `entry_face` and leaves through
/// `exit_face`; both faces contain the model edge `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EdgeGerm {
    pub tet: usize,
    pub edge: (u8, u8),
    pub entry_face: u8,
    pub exit_face: u8,
}

/// An edge of the triangulation with its germs in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub id: usize,
    pub germs: Vec<EdgeGerm>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.germs.len()
    }
}

/// A face of the triangulation: the two `(tet, face)` slots glued together.
/// `slots[0]` is the lexicographically smaller one and serves as representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaceClass {
    pub id: usize,
    pub slots: [FaceSlot; 2],
}

/// Where a model edge sits inside its edge class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GermRef {
    pub class: usize,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UngluedFace { tet: usize, face: u8 },
    SelfGluedFace { tet: usize, face: u8 },
    Involution { tet: usize, face: u8 },
    /// Vertex link with Euler characteristic other than zero.
    NonTorusLink { vertex: usize, euler: i64 },
    /// An edge glued to itself with its ends swapped.
    ReversedEdge { class: usize },
}

/// Result of [`validate_triangulation`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Informational only; `None` when the table is structurally broken.
    pub orientable: Option<bool>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A structurally valid ideal triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    table: GluingTable,
    edges: Vec<EdgeClass>,
    edge_lookup: Vec<[GermRef; 6]>,
    faces: Vec<FaceClass>,
    face_lookup: Vec<[(usize, usize); 4]>,
}

impl Triangulation {
    pub fn from_table(table: GluingTable) -> Result<Self, TriError> {
        if let Some(v) = table.structural_violations().into_iter().next() {
            return Err(match v {
                Violation::UngluedFace { tet, face } => TriError::Unglued { tet, face },
                Violation::SelfGluedFace { tet, face } => TriError::SelfGluing { tet, face },
                Violation::Involution { tet, face } => TriError::Involution { tet, face },
                _ => unreachable!("only structural violations are produced"),
            });
        }
        let (faces, face_lookup) = compute_face_classes(&table);
        let (edges, edge_lookup) = compute_edge_classes(&table);
        Ok(Triangulation { table, edges, edge_lookup, faces, face_lookup })
    }

    pub fn parse(text: &str) -> Result<Self, TriError> {
        Self::from_table(GluingTable::parse(text)?)
    }

    pub fn tet_count(&self) -> usize {
        self.table.tet_count()
    }

    pub fn table(&self) -> &GluingTable {
        &self.table
    }

    pub fn to_text(&self) -> String {
        self.table.to_text()
    }

    pub fn gluing(&self, tet: usize, face: u8) -> Gluing {
        self.table.entries[tet][face as usize].expect("validated table")
    }

    /// The slot on the other side of `(tet, face)`.
    pub fn partner(&self, slot: FaceSlot) -> FaceSlot {
        let g = self.gluing(slot.tet, slot.face);
        FaceSlot { tet: g.tet, face: g.perm.apply(slot.face) }
    }

    pub fn edge_classes(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn face_classes(&self) -> &[FaceClass] {
        &self.faces
    }

    /// Edge class and cyclic position of model edge `{a, b}` of `tet`.
    pub fn germ_of(&self, tet: usize, a: u8, b: u8) -> GermRef {
        self.edge_lookup[tet][crate::perm::edge_index(a, b)]
    }

    /// Face class id of `(tet, face)` and which of its two slots this is.
    pub fn face_class_of(&self, slot: FaceSlot) -> (usize, usize) {
        self.face_lookup[slot.tet][slot.face as usize]
    }

    /// Position of the face germ `(tet, face)` around edge `{a, b}` of `tet`:
    /// face germ `p` is the entry face of germ `p` (equivalently the exit face of germ `p - 1`).
    pub fn face_germ_position(&self, tet: usize, face: u8, a: u8, b: u8) -> GermRef {
        let r = self.germ_of(tet, a, b);
        let germ = &self.edges[r.class].germs[r.position];
        let degree = self.edges[r.class].degree();
        if germ.entry_face == face {
            r
        } else {
            debug_assert_eq!(germ.exit_face, face);
            GermRef { class: r.class, position: (r.position + 1) % degree }
        }
    }

    /// Euler characteristic of the link of each ideal vertex.
    pub fn vertex_link_euler(&self) -> Vec<i64> {
        vertex_link_check(&self.table)
    }

    pub fn is_orientable(&self) -> bool {
        orientability(&self.table).unwrap_or(false)
    }
}

fn compute_face_classes(table: &GluingTable) -> (Vec<FaceClass>, Vec<[(usize, usize); 4]>) {
    let n = table.tet_count();
    let mut lookup = vec![[(usize::MAX, 0); 4]; n];
    let mut classes = Vec::with_capacity(2 * n);
    for i in 0..n {
        for k in 0..4u8 {
            if lookup[i][k as usize].0 != usize::MAX {
                continue;
            }
            let g = table.entries[i][k as usize].unwrap();
            let other = FaceSlot { tet: g.tet, face: g.perm.apply(k) };
            let id = classes.len();
            classes.push(FaceClass { id, slots: [FaceSlot { tet: i, face: k }, other] });
            lookup[i][k as usize] = (id, 0);
            lookup[other.tet][other.face as usize] = (id, 1);
        }
    }
    (classes, lookup)
}

fn step(table: &GluingTable, germ: EdgeGerm) -> EdgeGerm {
    let g = table.entries[germ.tet][germ.exit_face as usize].unwrap();
    let a = g.perm.apply(germ.edge.0);
    let b = g.perm.apply(germ.edge.1);
    let entry = g.perm.apply(germ.exit_face);
    let exit = (0..4u8).find(|&v| v != a && v != b && v != entry).unwrap();
    EdgeGerm { tet: g.tet, edge: (a.min(b), a.max(b)), entry_face: entry, exit_face: exit }
}

fn compute_edge_classes(table: &GluingTable) -> (Vec<EdgeClass>, Vec<[GermRef; 6]>) {
    let n = table.tet_count();
    let unset = GermRef { class: usize::MAX, position: 0 };
    let mut lookup = vec![[unset; 6]; n];
    let mut classes = Vec::new();
    for t in 0..n {
        for (e, &(a, b)) in MODEL_EDGES.iter().enumerate() {
            if lookup[t][e].class != usize::MAX {
                continue;
            }
            // (t, e) is the least unvisited germ, hence the least germ of its class.
            let (c, d) = faces_of_edge(a, b);
            let forward = EdgeGerm { tet: t, edge: (a, b), entry_face: d, exit_face: c };
            let backward = EdgeGerm { tet: t, edge: (a, b), entry_face: c, exit_face: d };
            let nf = step(table, forward);
            let nb = step(table, backward);
            let start = if (nb.tet, nb.edge) < (nf.tet, nf.edge) { backward } else { forward };
            let id = classes.len();
            let mut germs = Vec::new();
            let mut cur = start;
            loop {
                let slot = &mut lookup[cur.tet][crate::perm::edge_index(cur.edge.0, cur.edge.1)];
                if slot.class == usize::MAX {
                    *slot = GermRef { class: id, position: germs.len() };
                }
                germs.push(cur);
                cur = step(table, cur);
                if cur == start || germs.len() > 6 * n {
                    break;
                }
            }
            classes.push(EdgeClass { id, germs });
        }
    }
    (classes, lookup)
}

/// Euler characteristic of each vertex link, vertices numbered by their least
/// `(tet, vertex)` corner. Works on any table whose present gluings are valid.
pub fn vertex_link_check(table: &GluingTable) -> Vec<i64> {
    let n = table.tet_count();
    let corner = |t: usize, v: u8| t * 4 + v as usize;
    // link vertex at corner (t, v) in direction of w
    let end = |t: usize, v: u8, w: u8| (t * 4 + v as usize) * 4 + w as usize;
    let mut corners = UnionFind::new(4 * n);
    let mut ends = UnionFind::new(16 * n);
    let mut link_edges = vec![0i64; 4 * n];
    for t in 0..n {
        for k in 0..4u8 {
            let Some(g) = table.entries[t][k as usize] else { continue };
            for v in (0..4u8).filter(|&v| v != k) {
                corners.union(corner(t, v), corner(g.tet, g.perm.apply(v)));
                link_edges[corner(t, v)] += 1;
                for w in (0..4u8).filter(|&w| w != k && w != v) {
                    ends.union(end(t, v, w), end(g.tet, g.perm.apply(v), g.perm.apply(w)));
                }
            }
        }
    }
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..4 * n {
        let r = corners.find(c);
        let next = index.len();
        index.entry(r).or_insert(next);
    }
    // χ = V - E + F per vertex class; F counts corners, E counts link edges
    // (two glued sides make one edge, a free side is an edge on its own),
    // V counts classes of edge ends.
    let mut twice_euler = vec![0i64; index.len()];
    let mut seen_end = vec![false; 16 * n];
    for t in 0..n {
        for v in 0..4u8 {
            let c = corner(t, v);
            let vid = index[&corners.find(c)];
            let free = (0..4u8)
                .filter(|&k| k != v && table.entries[t][k as usize].is_none())
                .count() as i64;
            twice_euler[vid] += 2 - link_edges[c] - 2 * free;
            for w in (0..4u8).filter(|&w| w != v) {
                let r = ends.find(end(t, v, w));
                if !seen_end[r] {
                    seen_end[r] = true;
                    twice_euler[vid] += 2;
                }
            }
        }
    }
    twice_euler.into_iter().map(|x| x / 2).collect()
}

/// `Some(orientable)` for a fully glued table, `None` otherwise.
pub fn orientability(table: &GluingTable) -> Option<bool> {
    let n = table.tet_count();
    let mut sign: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if sign[s].is_some() {
            continue;
        }
        sign[s] = Some(true);
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            for k in 0..4 {
                let g = table.entries[t][k]?;
                // orientation-compatible gluings are odd permutations between like-signed tets
                let want = if g.perm.is_even() { !sign[t].unwrap() } else { sign[t].unwrap() };
                match sign[g.tet] {
                    None => {
                        sign[g.tet] = Some(want);
                        stack.push(g.tet);
                    }
                    Some(have) if have != want => return Some(false),
                    Some(_) => {}
                }
            }
        }
    }
    Some(true)
}

/// Aggregates structural checks, vertex-link Euler characteristics and edge
/// self-identifications into one report.
pub fn validate_triangulation(table: &GluingTable) -> ValidationReport {
    let mut violations = table.structural_violations();
    if !violations.is_empty() {
        return ValidationReport { violations, orientable: None };
    }
    for (vertex, euler) in vertex_link_check(table).into_iter().enumerate() {
        if euler != 0 {
            violations.push(Violation::NonTorusLink { vertex, euler });
        }
    }
    let (edges, _) = compute_edge_classes(table);
    for class in &edges {
        let mut seen = std::collections::HashSet::new();
        if class.germs.iter().any(|g| !seen.insert((g.tet, g.edge))) {
            violations.push(Violation::ReversedEdge { class: class.id });
        }
    }
    ValidationReport { violations, orientable: orientability(table) }
}

/// Parses a triangulation document into a validated [`Triangulation`].
pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriError> {
    Triangulation::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;

    #[test]
    fn empty_document() {
        let tri = parse_triangulation("tets 0\n").unwrap();
        assert_eq!(tri.tet_count(), 0);
        assert!(tri.edge_classes().is_empty());
        assert!(tri.vertex_link_euler().is_empty());
        assert_eq!(parse_triangulation("# nothing\n").unwrap().tet_count(), 0);
    }

    #[test]
    fn involution_error() {
        // face 0 -> (0, 1023) lands on face 1; face 1 claims (0, 2301), not the inverse 1023
        let text = "tets 1\nglue 0 0 -> 0 1023\nglue 0 1 -> 0 2301\nglue 0 2 -> 0 0132\nglue 0 3 -> 0 0132\n";
        let err = parse_triangulation(text).unwrap_err();
        assert!(matches!(err, TriError::Involution { tet: 0, face: 0 }), "{err:?}");
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_triangulation("tets 1\nglue 0 4 -> 0 0123\n"),
            Err(TriError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_triangulation("tets 1\nglue 0 0 -> 3 0123\n"),
            Err(TriError::OutOfRange { index: 3, .. })
        ));
        assert!(matches!(parse_triangulation("glue 0 0 -> 0 0123\n"), Err(TriError::Syntax { .. })));
        assert!(matches!(parse_triangulation("tets x\n"), Err(TriError::Syntax { .. })));
    }

    #[test]
    fn unglued_face_reported() {
        let mut table = census::figure_eight().table().clone();
        table.entries[1][2] = None;
        let report = validate_triangulation(&table);
        assert_eq!(report.violations, vec![Violation::UngluedFace { tet: 1, face: 2 }]);
        assert!(matches!(Triangulation::from_table(table), Err(TriError::Unglued { tet: 1, face: 2 })));
    }

    #[test]
    fn figure_eight_counts() {
        let tri = census::figure_eight();
        assert_eq!(tri.tet_count(), 2);
        assert_eq!(tri.face_classes().len(), 4);
        let degrees: Vec<_> = tri.edge_classes().iter().map(|e| e.degree()).collect();
        assert_eq!(degrees, vec![6, 6]);
        assert_eq!(tri.vertex_link_euler(), vec![0]);
        let report = validate_triangulation(tri.table());
        assert!(report.is_valid());
        assert_eq!(report.orientable, Some(true));
    }

    #[test]
    fn sphere_link_reported() {
        // One tetrahedron, faces 0<->1 and 2<->3 glued by transpositions: a
        // triangulated 3-sphere whose vertex links are spheres.
        let text = "tets 1\nglue 0 0 -> 0 1023\nglue 0 1 -> 0 1023\nglue 0 2 -> 0 0132\nglue 0 3 -> 0 0132\n";
        let table = GluingTable::parse(text).unwrap();
        let eulers = vertex_link_check(&table);
        assert!(eulers.contains(&2), "{eulers:?}");
        let report = validate_triangulation(&table);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonTorusLink { euler: 2, .. })));
    }

    #[test]
    fn canonical_germ_order() {
        let tri = census::figure_eight();
        for class in tri.edge_classes() {
            let first = class.germs[0];
            let least = class.germs.iter().map(|g| (g.tet, g.edge)).min().unwrap();
            assert_eq!((first.tet, first.edge), least);
            if class.degree() > 2 {
                let next = class.germs[1];
                let prev = class.germs[class.degree() - 1];
                assert!((next.tet, next.edge) <= (prev.tet, prev.edge));
            }
        }
    }
}
