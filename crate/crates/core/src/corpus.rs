//! Deterministic generators for test inputs: normal loops, taut census
//! entries and small disk diagrams.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Serialize;

use crate::census::{figure_eight, one_tetrahedron, random_ideal};
use crate::disk::{audit_minimality, build_diagram, trace_regions, Branch, DiagramDoc, DiskDiagram, EndRef, Node, Region, Switch, Token};
use crate::loops::{raise_loop, DualStep, NormalArc, NormalLoop};
use crate::taut::{all_branch_sides, enumerate_taut, Equator, TautStructure};
use crate::transverse::{detect_transverse_taut, Coorientation};
use crate::tri::{FaceSlot, Triangulation};

// (tet, face, entry edge, exit edge)
type WalkState = (usize, u8, (u8, u8), (u8, u8));

/// A normal loop found by a seeded random walk on directed normal arcs, with at
/// most `max_len` arcs. `None` if the walk keeps producing longer cycles.
pub fn random_normal_loop(tri: &Triangulation, taut: &TautStructure, seed: u64, max_len: usize) -> Option<NormalLoop> {
    if tri.tet_count() == 0 {
        return None;
    }
    let sides = all_branch_sides(tri, taut);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let tet = rng.gen_range(0..tri.tet_count());
        let face = rng.gen_range(0..4u8);
        let verts: Vec<u8> = (0..4u8).filter(|&v| v != face).collect();
        let apex = *verts.choose(&mut rng).unwrap();
        let cut = NormalArc { tet, face, apex }.cut_edges();
        let flip = rng.gen_bool(0.5) as usize;
        // state: (tet, face, entry edge, exit edge)
        let mut state = (tet, face, cut[flip], cut[1 - flip]);
        let mut trail: Vec<WalkState> = Vec::new();
        for _ in 0..(8 * max_len + 16) {
            let (t, f, _, exit) = state;
            let p = tri.face_germ_position(t, f, exit.0, exit.1);
            let class = &tri.edge_classes()[p.class];
            let color = sides[p.class].colors[p.position];
            let choices: Vec<usize> = (0..class.degree()).filter(|&q| sides[p.class].colors[q] != color).collect();
            let q = *choices.choose(&mut rng)?;
            let germ = class.germs[q];
            let (x, y) = germ.edge;
            let z = (0..4u8).find(|&v| v != germ.entry_face && v != x && v != y).unwrap();
            let pivot = if rng.gen_bool(0.5) { x } else { y };
            let exit = (pivot.min(z), pivot.max(z));
            state = (germ.tet, germ.entry_face, germ.edge, exit);
            if let Some(start) = trail.iter().position(|s| *s == state) {
                let cycle = &trail[start..];
                if cycle.len() <= max_len {
                    return Some(NormalLoop {
                        arcs: cycle
                            .iter()
                            .map(|&(t, f, a, b)| {
                                let apex = if a.0 == b.0 || a.0 == b.1 { a.0 } else { a.1 };
                                NormalArc { tet: t, face: f, apex }
                            })
                            .collect(),
                    });
                }
                break;
            }
            trail.push(state);
        }
    }
    None
}

/// Non-crossing partitions of a sorted run of stops into blocks of two to four.
fn noncrossing(stops: &[usize], max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    if stops.is_empty() {
        return vec![vec![]];
    }
    if max_blocks == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let first = stops[0];
    let rest = &stops[1..];
    // choose the other members of the first block by their positions in `rest`
    fn pick(rest: &[usize], from: usize, chosen: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if (1..=3).contains(&chosen.len()) {
            acc.push(chosen.clone());
        }
        if chosen.len() == 3 {
            return;
        }
        for i in from..rest.len() {
            chosen.push(i);
            pick(rest, i + 1, chosen, acc);
            chosen.pop();
        }
    }
    let mut choices = Vec::new();
    pick(rest, 0, &mut vec![], &mut choices);
    for positions in choices {
        let mut block = vec![first];
        block.extend(positions.iter().map(|&p| rest[p]));
        // gaps between consecutive members and after the last one
        let mut gaps: Vec<&[usize]> = Vec::new();
        let mut prev = 0;
        for &p in &positions {
            gaps.push(&rest[prev..p]);
            prev = p + 1;
        }
        gaps.push(&rest[prev..]);
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for gap in gaps {
            let mut next = Vec::new();
            for base in &partial {
                if base.len() > max_blocks {
                    continue;
                }
                for sub in noncrossing(gap, max_blocks - base.len()) {
                    let mut p = base.clone();
                    p.extend(sub);
                    if p.len() <= max_blocks {
                        next.push(p);
                    }
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

fn variants(size: usize) -> usize {
    match size {
        2 => 2,
        3 => 3,
        _ => 6,
    }
}

/// Unlabelled tree-shaped diagrams on `n` stops with at most `max_regions`
/// regions: every block of stops is joined by a chord, a chord through a
/// two-ended switch, or a single switch with three or four ends.
pub fn skeletons(n: usize, max_regions: usize) -> Vec<DiagramDoc> {
    if n == 0 || max_regions < 2 {
        return vec![];
    }
    let stops: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for partition in noncrossing(&stops, max_regions - 1) {
        // a block of k stops splits one region into k, or into 2 for a chord
        let regions = 1 + partition.iter().map(|b| b.len().max(2) - 1).sum::<usize>();
        if regions > max_regions {
            continue;
        }
        let counts: Vec<usize> = partition.iter().map(|b| variants(b.len())).collect();
        let total: usize = counts.iter().product();
        for mut code in 0..total {
            let mut doc = DiagramDoc { stops: n, switches: vec![], branches: vec![], regions: vec![], boundary: None };
            for (block, &count) in partition.iter().zip(&counts) {
                let variant = code % count;
                code /= count;
                add_block(&mut doc, block, variant);
            }
            out.push(doc);
        }
    }
    out
}

fn add_block(doc: &mut DiagramDoc, block: &[usize], variant: usize) {
    let tail = |b| EndRef { branch: b, head: false };
    let base = doc.branches.len();
    let branch = |v, w| Branch { ends: Some((v, w)), face: 0, orient: None };
    if block.len() == 2 && variant == 0 {
        doc.branches.push(branch(Node::Stop(block[0]), Node::Stop(block[1])));
        return;
    }
    let s = doc.switches.len();
    if block.len() == 2 {
        doc.branches.push(branch(Node::Stop(block[0]), Node::Switch(s)));
        doc.branches.push(branch(Node::Switch(s), Node::Stop(block[1])));
        doc.switches.push(Switch { sides: [vec![EndRef { branch: base, head: true }], vec![tail(base + 1)]] });
        return;
    }
    for &k in block {
        doc.branches.push(branch(Node::Switch(s), Node::Stop(k)));
    }
    // ends around the switch follow the stops counter-clockwise
    let ends: Vec<EndRef> = (0..block.len()).map(|i| tail(base + i)).collect();
    let m = ends.len();
    let (start, len) = if m == 3 || variant < 4 { (variant, 1) } else { (variant - 4, 2) };
    let rot: Vec<EndRef> = (0..m).map(|i| ends[(start + i) % m]).collect();
    doc.switches.push(Switch { sides: [rot[..len].to_vec(), rot[len..].to_vec()] });
}

/// Labels a skeleton by a boundary loop whose step `k` runs along `d_k`.
pub fn label_skeleton(doc: &DiagramDoc, tri: &Triangulation, delta: &[DualStep]) -> Option<DiskDiagram> {
    if delta.len() != doc.stops {
        return None;
    }
    let mut doc = doc.clone();
    for b in &mut doc.branches {
        let stop = match b.ends? {
            (Node::Stop(k), _) | (_, Node::Stop(k)) => k,
            _ => return None,
        };
        let step = delta[stop];
        b.face = tri.face_class_of(FaceSlot { tet: step.tet, face: step.face_in }).0;
        if let Some((Node::Stop(a), Node::Stop(c))) = b.ends {
            let other = if a == stop { c } else { a };
            let s = delta[other];
            if tri.face_class_of(FaceSlot { tet: s.tet, face: s.face_in }).0 != b.face {
                return None;
            }
        }
    }
    // a face class inside one tetrahedron gives its first slot to the `+`
    // side, so point such branches the way the loop needs
    for i in 0..doc.branches.len() {
        let b = &doc.branches[i];
        let class = tri.face_classes()[b.face];
        if class.slots[0].tet != class.slots[1].tet {
            continue;
        }
        let (v, w) = b.ends?;
        let (stop, head) = match (v, w) {
            (_, Node::Stop(k)) => (k, true),
            (Node::Stop(k), _) => (k, false),
            _ => return None,
        };
        let seen = FaceSlot { tet: delta[stop].tet, face: delta[stop].face_in };
        // the region on d_stop lies on the `+` side exactly when the stop is the head
        let plus_slot_is_seen = class.slots[0] == seen;
        if plus_slot_is_seen != head {
            reverse_branch(&mut doc, i);
        }
    }
    let mut regions = Vec::new();
    for face in trace_regions(&doc) {
        let mut tets = face.iter().filter_map(|t| match t {
            Token::Arc(k) => Some(delta[*k].tet),
            _ => None,
        });
        let tet = tets.next()?;
        if tets.any(|t| t != tet) {
            return None;
        }
        regions.push(Region { walk: vec![face], tet });
    }
    doc.regions = regions;
    let d = build_diagram(doc, tri).ok()?;
    (d.boundary_dual_loop()?.steps == delta).then_some(d)
}

fn reverse_branch(doc: &mut DiagramDoc, b: usize) {
    let br = &mut doc.branches[b];
    br.ends = br.ends.map(|(v, w)| (w, v));
    for sw in &mut doc.switches {
        for side in &mut sw.sides {
            for e in side.iter_mut().filter(|e| e.branch == b) {
                e.head = !e.head;
            }
        }
    }
}

/// Which boundary loops the search may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopFilter {
    Any,
    Vertical,
}

/// Closed dual loops compatible with a skeleton's chords and regions, found by
/// depth-first search; at most `limit` labelled diagrams are returned.
pub fn label_search(
    doc: &DiagramDoc,
    tri: &Triangulation,
    taut: &TautStructure,
    filter: LoopFilter,
    limit: usize,
) -> Vec<DiskDiagram> {
    let n = doc.stops;
    let faces = trace_regions(doc);
    let mut region_of_arc = vec![0; n];
    for (i, f) in faces.iter().enumerate() {
        for t in f {
            if let Token::Arc(k) = t {
                region_of_arc[*k] = i;
            }
        }
    }
    let mut chord_partner = vec![None; n];
    for b in &doc.branches {
        if let Some((Node::Stop(a), Node::Stop(c))) = b.ends {
            chord_partner[a] = Some(c);
            chord_partner[c] = Some(a);
        }
    }
    struct Search<'a> {
        tri: &'a Triangulation,
        taut: &'a TautStructure,
        filter: LoopFilter,
        region_of_arc: Vec<usize>,
        chord_partner: Vec<Option<usize>>,
        steps: Vec<DualStep>,
        found: Vec<Vec<DualStep>>,
        limit: usize,
    }
    impl Search<'_> {
        fn class(&self, s: DualStep) -> usize {
            self.tri.face_class_of(FaceSlot { tet: s.tet, face: s.face_in }).0
        }
        fn go(&mut self, n: usize, tet: usize, face_in: u8) {
            if self.found.len() >= self.limit {
                return;
            }
            let k = self.steps.len();
            if let Some(j) = (0..k).find(|&j| self.region_of_arc[j] == self.region_of_arc[k]) {
                if self.steps[j].tet != tet {
                    return;
                }
            }
            let probe = DualStep { tet, face_in, face_out: face_in };
            if let Some(j) = self.chord_partner[k].filter(|&j| j < k) {
                if self.class(self.steps[j]) != self.class(probe) {
                    return;
                }
            }
            let eq = Equator::of(self.taut.pair(tet));
            for face_out in 0..4u8 {
                if face_out == face_in || (self.filter == LoopFilter::Vertical && eq.side(face_out) == eq.side(face_in)) {
                    continue;
                }
                let step = DualStep { tet, face_in, face_out };
                let next = self.tri.partner(FaceSlot { tet, face: face_out });
                self.steps.push(step);
                if k + 1 == n {
                    if next == (FaceSlot { tet: self.steps[0].tet, face: self.steps[0].face_in }) {
                        self.found.push(self.steps.clone());
                    }
                } else {
                    self.go(n, next.tet, next.face);
                }
                self.steps.pop();
                if self.found.len() >= self.limit {
                    return;
                }
            }
        }
    }
    let mut search = Search { tri, taut, filter, region_of_arc, chord_partner, steps: vec![], found: vec![], limit: limit.max(1) * 8 };
    for tet in 0..tri.tet_count() {
        for face_in in 0..4u8 {
            search.go(n, tet, face_in);
        }
    }
    let mut out = Vec::new();
    for delta in search.found {
        if out.len() >= limit {
            break;
        }
        if let Some(d) = label_skeleton(doc, tri, &delta) {
            out.push(d);
        }
    }
    out
}

/// Bounds for [`build_corpus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusBounds {
    pub max_tets: usize,
    pub max_regions: usize,
    /// Stops of general and vertical diagrams.
    pub max_stops: usize,
    /// Length of raised curves used as normal boundaries.
    pub max_raised: usize,
    /// Random triangulations per tetrahedron count.
    pub random_per_size: usize,
    pub loops_per_structure: usize,
    pub target_diagrams: usize,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        CorpusBounds {
            max_tets: 4,
            max_regions: 6,
            max_stops: 7,
            max_raised: 7,
            random_per_size: 4,
            loops_per_structure: 12,
            target_diagrams: 1200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusTri {
    pub name: String,
    pub tri: Triangulation,
    pub tauts: Vec<TautStructure>,
    /// Coorientation of each taut structure, when it is transverse.
    pub coors: Vec<Option<Coorientation>>,
}

#[derive(Clone, Debug)]
pub struct CorpusDiagram {
    pub tri: usize,
    pub taut: usize,
    pub diagram: DiskDiagram,
    /// The normal loop whose raised curve is the boundary.
    pub normal: Option<NormalLoop>,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub seed: u64,
    pub tris: Vec<CorpusTri>,
    pub loops: Vec<(usize, usize, NormalLoop)>,
    pub diagrams: Vec<CorpusDiagram>,
    pub vertical: Vec<CorpusDiagram>,
    pub normal: Vec<CorpusDiagram>,
}

/// The seed from `TAUTTRACK_SEED`, else `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("TAUTTRACK_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(default)
}

pub fn census_triangulations(seed: u64, bounds: &CorpusBounds) -> Vec<(String, Triangulation)> {
    let mut tris = vec![("figure_eight".to_string(), figure_eight())];
    for (i, t) in one_tetrahedron().into_iter().enumerate() {
        tris.push((format!("one_tet_{i}"), t));
    }
    for n in 2..=bounds.max_tets {
        for (i, t) in random_ideal(seed.wrapping_add(n as u64), n, bounds.random_per_size, 500 * n * n).into_iter().enumerate() {
            tris.push((format!("random_{n}_{i}"), t));
        }
    }
    tris
}

/// Deterministic corpus: triangulations with their taut and transverse
/// structures, normal loops, and labelled diagrams of three flavours.
pub fn build_corpus(seed: u64, bounds: &CorpusBounds) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tris: Vec<CorpusTri> = census_triangulations(seed, bounds)
        .into_iter()
        .map(|(name, tri)| {
            let tauts = enumerate_taut(&tri);
            let coors = tauts.iter().map(|t| detect_transverse_taut(&tri, t).ok().flatten()).collect();
            CorpusTri { name, tri, tauts, coors }
        })
        .collect();
    let skel: Vec<Vec<DiagramDoc>> = (0..=bounds.max_stops.max(bounds.max_raised)).map(|n| skeletons(n, bounds.max_regions)).collect();
    let mut corpus = Corpus { seed, tris: vec![], loops: vec![], diagrams: vec![], vertical: vec![], normal: vec![] };
    for (ti, ct) in tris.iter().enumerate() {
        for (ai, taut) in ct.tauts.iter().enumerate() {
            for (n, docs) in skel.iter().enumerate().take(bounds.max_stops + 1).skip(1) {
                let mut order: Vec<&DiagramDoc> = docs.iter().collect();
                order.shuffle(&mut rng);
                if corpus.diagrams.len() < bounds.target_diagrams {
                    for doc in order.iter().take(64) {
                        for d in label_search(doc, &ct.tri, taut, LoopFilter::Any, 1) {
                            corpus.diagrams.push(CorpusDiagram { tri: ti, taut: ai, diagram: d, normal: None });
                        }
                    }
                }
                if n <= 6 && corpus.vertical.len() < bounds.target_diagrams {
                    for doc in order.iter().take(48) {
                        for d in label_search(doc, &ct.tri, taut, LoopFilter::Vertical, 1) {
                            if audit_minimality(&d).is_empty() {
                                corpus.vertical.push(CorpusDiagram { tri: ti, taut: ai, diagram: d, normal: None });
                            }
                        }
                    }
                }
            }
            let Some(coor) = &ct.coors[ai] else { continue };
            let mut seen = std::collections::BTreeSet::new();
            for k in 0..bounds.loops_per_structure as u64 * 4 {
                if seen.len() >= bounds.loops_per_structure {
                    break;
                }
                let Some(g) = random_normal_loop(&ct.tri, taut, rng.gen::<u64>() ^ k, 4) else { continue };
                if !seen.insert(g.to_text()) {
                    continue;
                }
                corpus.loops.push((ti, ai, g.clone()));
                let Ok(curve) = raise_loop(&ct.tri, taut, coor, &g) else { continue };
                let delta = curve.as_dual_loop().steps;
                if delta.len() > bounds.max_raised {
                    continue;
                }
                for rot in 0..delta.len() {
                    let mut dl = delta.clone();
                    dl.rotate_left(rot);
                    for doc in &skel[delta.len()] {
                        if let Some(d) = label_skeleton(doc, &ct.tri, &dl) {
                            corpus.normal.push(CorpusDiagram { tri: ti, taut: ai, diagram: d, normal: Some(g.clone()) });
                        }
                    }
                }
            }
        }
    }
    corpus.tris = tris;
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::verify_taut;

    #[test]
    fn skeleton_counts() {
        // n = 4: one block of four (6 shapes) or two chords paired two ways (2 x 2 each)
        let counts: Vec<usize> = (1..=9).map(|n| skeletons(n, 6).len()).collect();
        assert_eq!(counts, [0, 2, 3, 14, 30, 139, 378, 1400, 2016]);
    }

    #[test]
    fn skeletons_respect_the_region_bound() {
        let tri = one_tetrahedron().remove(0);
        for n in 2..=8 {
            for max in [3, 6] {
                for mut doc in skeletons(n, max) {
                    let faces = trace_regions(&doc);
                    assert!(faces.len() <= max, "{n} stops: {} regions", faces.len());
                    doc.regions = faces.into_iter().map(|w| Region { walk: vec![w], tet: 0 }).collect();
                    build_diagram(doc, &tri).unwrap();
                }
            }
        }
    }

    #[test]
    fn labelled_skeletons_bound_the_requested_loop() {
        let tri = figure_eight();
        let taut = enumerate_taut(&tri).remove(0);
        let mut found = 0;
        for doc in skeletons(4, 6).iter().take(10) {
            for d in label_search(doc, &tri, &taut, LoopFilter::Any, 3) {
                let delta = d.boundary_dual_loop().unwrap();
                assert_eq!(label_skeleton(doc, &tri, &delta.steps).map(|e| e.to_text()), Some(d.to_text()));
                found += 1;
            }
        }
        assert!(found > 0);
    }

    fn small() -> CorpusBounds {
        CorpusBounds { max_stops: 4, max_raised: 4, random_per_size: 1, loops_per_structure: 2, target_diagrams: 50, ..CorpusBounds::default() }
    }

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = build_corpus(5, &small());
        let b = build_corpus(5, &small());
        let text = |c: &Corpus| {
            c.diagrams.iter().chain(&c.vertical).chain(&c.normal).map(|d| d.diagram.to_text()).collect::<Vec<_>>()
        };
        assert_eq!(text(&a), text(&b));
        assert_eq!(a.loops, b.loops);
        for ct in &a.tris {
            assert!(ct.tri.tet_count() <= 4);
            for t in &ct.tauts {
                assert!(verify_taut(&ct.tri, t).unwrap().is_empty());
            }
        }
        for cd in a.diagrams.iter().chain(&a.vertical).chain(&a.normal) {
            let tri = &a.tris[cd.tri].tri;
            let again = build_diagram(DiagramDoc::parse(&cd.diagram.to_text()).unwrap(), tri).unwrap();
            assert_eq!(again, cd.diagram);
        }
        assert!(!a.diagrams.is_empty() && !a.vertical.is_empty());
    }

    #[test]
    fn seed_changes_the_random_part() {
        let names = |seed| census_triangulations(seed, &small()).into_iter().map(|(_, t)| t.to_text()).collect::<Vec<_>>();
        assert_ne!(names(1), names(2));
    }
}
