//! Transverse taut structures: co-orientations on the faces compatible with a
//! taut structure, found through the orientation double cover of the
//! branched surface and cross-checked by a parity solver.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::perm::{common_edge, faces_of_edge};
use crate::taut::{is_taut, PiPair, TautStructure};
use crate::tri::{FaceSlot, Gluing, GluingTable, Triangulation};
use crate::unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransverseError {
    #[error("co-orientation has {got} face classes, triangulation has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("taut structure fails the edge equalities")]
    Unverified,
    #[error("labelled edge {edge:?} of tetrahedron {tet} does not carry angle π")]
    BadLabelling { tet: usize, edge: (u8, u8) },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// One sign per face class: `+1` when the co-orientation points out of the
/// tetrahedron of the class's representative slot, `-1` when it points in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Coorientation {
    pub signs: Vec<i8>,
}

impl Coorientation {
    /// Whether the co-orientation on `slot` points into `slot.tet`.
    pub fn points_into(&self, tri: &Triangulation, slot: FaceSlot) -> bool {
        let (class, which) = tri.face_class_of(slot);
        let into_rep = self.signs[class] < 0;
        if which == 0 {
            into_rep
        } else {
            !into_rep
        }
    }

    pub fn flipped(&self) -> Self {
        Coorientation { signs: self.signs.iter().map(|s| -s).collect() }
    }

    /// Faces of `tet` into which the co-orientation points.
    pub fn lower_faces(&self, tri: &Triangulation, tet: usize) -> Vec<u8> {
        (0..4u8).filter(|&face| self.points_into(tri, FaceSlot { tet, face })).collect()
    }

    pub fn is_lower(&self, tri: &Triangulation, tet: usize, face: u8) -> bool {
        self.points_into(tri, FaceSlot { tet, face })
    }

    /// `coor i k s` for the representative slot of every face class.
    pub fn to_text(&self, tri: &Triangulation) -> String {
        let mut out = String::new();
        for class in tri.face_classes() {
            let rep = class.slots[0];
            let s = if self.signs[class.id] > 0 { '+' } else { '-' };
            writeln!(out, "coor {} {} {s}", rep.tet, rep.face).unwrap();
        }
        out
    }

    /// Accepts either slot of a face class; each class must be given once.
    pub fn parse(text: &str, tri: &Triangulation) -> Result<Self, TransverseError> {
        let mut signs: Vec<Option<i8>> = vec![None; tri.face_classes().len()];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| TransverseError::Syntax { line, msg: msg.to_string() };
            let words: Vec<&str> = content.split_whitespace().collect();
            if words.len() != 4 || words[0] != "coor" {
                return Err(err("expected `coor i k s`"));
            }
            let tet: usize = words[1].parse().map_err(|_| err("bad tetrahedron index"))?;
            let face: u8 = words[2].parse().ok().filter(|f| *f < 4).ok_or_else(|| err("bad face"))?;
            if tet >= tri.tet_count() {
                return Err(err("tetrahedron index out of range"));
            }
            let sign: i8 = match words[3] {
                "+" => 1,
                "-" => -1,
                _ => return Err(err("sign must be + or -")),
            };
            let (class, which) = tri.face_class_of(FaceSlot { tet, face });
            let rep_sign = if which == 0 { sign } else { -sign };
            if signs[class].replace(rep_sign).is_some() {
                return Err(err("face class given twice"));
            }
        }
        let signs = signs
            .into_iter()
            .enumerate()
            .map(|(c, s)| s.ok_or(TransverseError::Syntax { line: 0, msg: format!("face class {c} missing") }))
            .collect::<Result<_, _>>()?;
        Ok(Coorientation { signs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoorViolation {
    /// The local rule fails for the two faces of `tet` meeting along `edge`.
    TetEdge { tet: usize, edge: (u8, u8) },
    /// Co-orientations around the edge class do not change direction exactly twice.
    DirectionChanges { class: usize, changes: usize },
}

/// Number of direction changes of the co-orientation around each edge class.
pub fn direction_changes(tri: &Triangulation, coor: &Coorientation) -> Vec<usize> {
    tri.edge_classes()
        .iter()
        .map(|class| {
            // face germ i points forward iff it points into the tetrahedron of germ i
            let forward: Vec<bool> = class
                .germs
                .iter()
                .map(|g| coor.points_into(tri, FaceSlot { tet: g.tet, face: g.entry_face }))
                .collect();
            let d = forward.len();
            (0..d).filter(|&i| forward[i] != forward[(i + 1) % d]).count()
        })
        .collect()
}

pub fn verify_coorientation(
    tri: &Triangulation,
    taut: &TautStructure,
    coor: &Coorientation,
) -> Result<Vec<CoorViolation>, TransverseError> {
    if coor.signs.len() != tri.face_classes().len() {
        return Err(TransverseError::SizeMismatch { expected: tri.face_classes().len(), got: coor.signs.len() });
    }
    if taut.pi_pairs.len() != tri.tet_count() {
        return Err(TransverseError::Unverified);
    }
    let mut out = Vec::new();
    for tet in 0..tri.tet_count() {
        for f in 0..4u8 {
            for g in (f + 1)..4u8 {
                let (a, b) = common_edge(f, g);
                let equatorial = !taut.is_pi(tet, a, b);
                let into_f = coor.points_into(tri, FaceSlot { tet, face: f });
                let into_g = coor.points_into(tri, FaceSlot { tet, face: g });
                if equatorial != (into_f != into_g) {
                    out.push(CoorViolation::TetEdge { tet, edge: (a, b) });
                }
            }
        }
    }
    for (class, changes) in direction_changes(tri, coor).into_iter().enumerate() {
        if changes != 2 {
            out.push(CoorViolation::DirectionChanges { class, changes });
        }
    }
    Ok(out)
}

/// Ordered π edges `(e', e'')` for every tetrahedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling(pub Vec<[(u8, u8); 2]>);

impl Labelling {
    /// π edges in lexicographic order of their vertex pairs.
    pub fn default_for(taut: &TautStructure) -> Self {
        Labelling(taut.pi_pairs.iter().map(|p| p.edges()).collect())
    }
}

/// The double cover built from a labelled taut structure.
#[derive(Clone, Debug)]
pub struct CoverTriangulation {
    pub tri: Triangulation,
    pub taut: TautStructure,
    pub coor: Coorientation,
    /// Cover tetrahedron `2i` is `t'_i`, `2i + 1` is `t''_i`.
    pub covering: Vec<usize>,
}

impl CoverTriangulation {
    /// Connected components, as a component id per cover tetrahedron (ids in
    /// order of first appearance).
    pub fn components(&self) -> Vec<usize> {
        let n = self.tri.tet_count();
        let mut uf = UnionFind::new(n);
        for t in 0..n {
            for k in 0..4u8 {
                uf.union(t, self.tri.gluing(t, k).tet);
            }
        }
        let mut ids: Vec<Option<usize>> = vec![None; n];
        let mut next = 0;
        (0..n)
            .map(|t| {
                let r = uf.find(t);
                *ids[r].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }
}

fn copy_points_into(label: [(u8, u8); 2], copy: usize, face: u8) -> bool {
    let (a, b) = label[copy];
    let (f, g) = faces_of_edge(a, b);
    face == f || face == g
}

/// Builds the two-sheeted cover in which each tetrahedron `t` has copies `t'`
/// and `t''`, co-oriented into the copy along the faces incident to `e'`
/// (respectively `e''`), glued so that co-orientations agree across faces.
pub fn build_double_cover(
    tri: &Triangulation,
    taut: &TautStructure,
    labelling: &Labelling,
) -> Result<CoverTriangulation, TransverseError> {
    if !is_taut(tri, taut) {
        return Err(TransverseError::Unverified);
    }
    let n = tri.tet_count();
    for (tet, pair) in labelling.0.iter().enumerate() {
        for &(a, b) in pair {
            if !taut.is_pi(tet, a, b) {
                return Err(TransverseError::BadLabelling { tet, edge: (a, b) });
            }
        }
        if pair[0] == pair[1] {
            return Err(TransverseError::BadLabelling { tet, edge: pair[0] });
        }
    }
    let mut table = GluingTable::new(2 * n);
    for i in 0..n {
        for copy in 0..2 {
            for k in 0..4u8 {
                let Gluing { tet: j, perm } = tri.gluing(i, k);
                let into_here = copy_points_into(labelling.0[i], copy, k);
                let target = (0..2)
                    .find(|&c| copy_points_into(labelling.0[j], c, perm.apply(k)) != into_here)
                    .expect("copies have complementary co-orientations");
                table.entries[2 * i + copy][k as usize] = Some(Gluing { tet: 2 * j + target, perm });
            }
        }
    }
    let cover_tri = Triangulation::from_table(table).expect("lifted gluings form an involution");
    let signs = cover_tri
        .face_classes()
        .iter()
        .map(|class| {
            let rep = class.slots[0];
            if copy_points_into(labelling.0[rep.tet / 2], rep.tet % 2, rep.face) {
                -1
            } else {
                1
            }
        })
        .collect();
    let lifted = TautStructure::new((0..2 * n).map(|t| taut.pair(t / 2)).collect());
    Ok(CoverTriangulation {
        tri: cover_tri,
        taut: lifted,
        coor: Coorientation { signs },
        covering: (0..2 * n).map(|t| t / 2).collect(),
    })
}

/// Pushes the co-orientation of the component containing `t'_0` down to the base.
/// `None` when the cover is connected.
pub fn push_down(base: &Triangulation, cover: &CoverTriangulation) -> Option<Coorientation> {
    let comps = cover.components();
    if base.tet_count() == 0 {
        return Some(Coorientation { signs: vec![] });
    }
    if comps.iter().any(|&c| c > 1) || comps.iter().all(|&c| c == 0) {
        return None;
    }
    let chosen = comps[0];
    let copy_of = |i: usize| if comps[2 * i] == chosen { 2 * i } else { 2 * i + 1 };
    let signs = base
        .face_classes()
        .iter()
        .map(|class| {
            let rep = class.slots[0];
            let upstairs = FaceSlot { tet: copy_of(rep.tet), face: rep.face };
            if cover.coor.points_into(&cover.tri, upstairs) {
                -1
            } else {
                1
            }
        })
        .collect();
    Some(Coorientation { signs })
}

/// The co-orientation read off the double cover, or `None` if the taut
/// structure is not transverse taut.
pub fn detect_transverse_taut(
    tri: &Triangulation,
    taut: &TautStructure,
) -> Result<Option<Coorientation>, TransverseError> {
    let cover = build_double_cover(tri, taut, &Labelling::default_for(taut))?;
    Ok(push_down(tri, &cover))
}

/// Direct solver: the local rule is a system of XOR equations on one boolean per
/// face class, solved with a parity union-find. Free components take sign `+`
/// on their least face class.
pub fn solve_parity(tri: &Triangulation, taut: &TautStructure) -> Option<Coorientation> {
    let m = tri.face_classes().len();
    // node 2c: "class c points into its representative", node 2c+1: its negation
    let mut uf = UnionFind::new(2 * m);
    let literal = |slot: FaceSlot| {
        let (class, which) = tri.face_class_of(slot);
        2 * class + which
    };
    let negate = |lit: usize| lit ^ 1;
    for tet in 0..tri.tet_count() {
        let pair: PiPair = taut.pair(tet);
        for f in 0..4u8 {
            for g in (f + 1)..4u8 {
                let (a, b) = common_edge(f, g);
                let lf = literal(FaceSlot { tet, face: f });
                let lg = literal(FaceSlot { tet, face: g });
                if pair.is_pi(a, b) {
                    uf.union(lf, lg);
                    uf.union(negate(lf), negate(lg));
                } else {
                    uf.union(lf, negate(lg));
                    uf.union(negate(lf), lg);
                }
            }
        }
    }
    let mut value: Vec<Option<bool>> = vec![None; 2 * m];
    let mut signs = Vec::with_capacity(m);
    for c in 0..m {
        if uf.find(2 * c) == uf.find(2 * c + 1) {
            return None;
        }
        let root = uf.find(2 * c);
        let neg_root = uf.find(2 * c + 1);
        let into = match (value[root], value[neg_root]) {
            (Some(v), _) => v,
            (None, Some(v)) => !v,
            (None, None) => {
                value[root] = Some(false);
                value[neg_root] = Some(true);
                false
            }
        };
        signs.push(if into { -1 } else { 1 });
    }
    Some(Coorientation { signs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census;
    use crate::taut::enumerate_taut;

    #[test]
    fn empty_cover() {
        let tri = Triangulation::parse("tets 0\n").unwrap();
        let taut = TautStructure::new(vec![]);
        let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
        assert_eq!(cover.tri.tet_count(), 0);
        assert_eq!(verify_coorientation(&tri, &taut, &Coorientation { signs: vec![] }).unwrap(), vec![]);
    }

    #[test]
    fn cover_agrees_with_parity_solver() {
        let tri = census::figure_eight();
        for taut in enumerate_taut(&tri) {
            let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
            let solved = solve_parity(&tri, &taut);
            assert_eq!(cover.component_count() == 2, solved.is_some());
            assert!(cover.component_count() == 1 || cover.component_count() == 2);
            if let Some(c) = detect_transverse_taut(&tri, &taut).unwrap() {
                assert_eq!(verify_coorientation(&tri, &taut, &c).unwrap(), vec![]);
            }
        }
    }

    #[test]
    fn cover_is_transverse_taut() {
        let tri = census::figure_eight();
        for taut in enumerate_taut(&tri) {
            let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
            assert_eq!(verify_coorientation(&cover.tri, &cover.taut, &cover.coor).unwrap(), vec![]);
            // covering map commutes with gluings
            for t in 0..cover.tri.tet_count() {
                for k in 0..4u8 {
                    let up = cover.tri.gluing(t, k);
                    let down = tri.gluing(cover.covering[t], k);
                    assert_eq!(cover.covering[up.tet], down.tet);
                    assert_eq!(up.perm, down.perm);
                }
            }
        }
    }

    #[test]
    fn already_transverse_splits() {
        let tri = census::figure_eight();
        for taut in enumerate_taut(&tri) {
            if solve_parity(&tri, &taut).is_some() {
                let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
                assert_eq!(cover.component_count(), 2);
            }
        }
    }

    #[test]
    fn flipped_face_is_reported() {
        for tri in census::one_tetrahedron().into_iter().chain([census::figure_eight()]) {
            for taut in enumerate_taut(&tri) {
                if let Some(coor) = solve_parity(&tri, &taut) {
                    assert_eq!(verify_coorientation(&tri, &taut, &coor).unwrap(), vec![]);
                    let mut bad = coor.clone();
                    bad.signs[0] = -bad.signs[0];
                    let report = verify_coorientation(&tri, &taut, &bad).unwrap();
                    assert!(report.iter().any(|v| matches!(v, CoorViolation::TetEdge { .. })));
                }
            }
        }
    }

    #[test]
    fn labelling_errors() {
        let tri = census::figure_eight();
        let taut = enumerate_taut(&tri).remove(0);
        let mut lab = Labelling::default_for(&taut);
        let [(a, b), _] = lab.0[0];
        let wrong = crate::taut::Equator::of(taut.pair(0)).cycle[0];
        lab.0[0] = [(a, b), wrong];
        assert!(matches!(
            build_double_cover(&tri, &taut, &lab),
            Err(TransverseError::BadLabelling { tet: 0, .. })
        ));
    }

    #[test]
    fn document_roundtrip() {
        let tri = census::figure_eight();
        let coor = Coorientation { signs: vec![1, -1, -1, 1] };
        assert_eq!(Coorientation::parse(&coor.to_text(&tri), &tri).unwrap(), coor);
        assert!(Coorientation::parse("coor 0 0 +\n", &tri).is_err());
    }
}
