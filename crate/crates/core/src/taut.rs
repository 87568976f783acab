//! Taut angle structures encoded as one π-angled pair of opposite edges per
//! tetrahedron.
//!
//! With this encoding every model vertex meets exactly one π edge, so the
//! vertex (triangle) condition holds automatically and only the edge condition,
//! two π germs per edge class, has to be checked.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{faces_of_edge, MODEL_EDGES};
use crate::tri::{EdgeClass, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TautError {
    #[error("taut structure has {got} tetrahedra, triangulation has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("taut structure fails the edge equalities")]
    Unverified,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Which pair of opposite model edges carries angle π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PiPair {
    #[serde(rename = "01|23")]
    P01_23,
    #[serde(rename = "02|13")]
    P02_13,
    #[serde(rename = "03|12")]
    P03_12,
}

impl PiPair {
    pub const ALL: [PiPair; 3] = [PiPair::P01_23, PiPair::P02_13, PiPair::P03_12];

    /// The two π edges; the first one contains vertex 0.
    pub fn edges(self) -> [(u8, u8); 2] {
        match self {
            PiPair::P01_23 => [(0, 1), (2, 3)],
            PiPair::P02_13 => [(0, 2), (1, 3)],
            PiPair::P03_12 => [(0, 3), (1, 2)],
        }
    }

    pub fn is_pi(self, a: u8, b: u8) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges().contains(&e)
    }

    /// Side of a face: [`Side::A`] if it contains the π edge through vertex 0.
    pub fn side_of_face(self, face: u8) -> Side {
        let [(a, b), _] = self.edges();
        let (f, g) = faces_of_edge(a, b);
        if face == f || face == g {
            Side::A
        } else {
            Side::B
        }
    }

    /// The two faces on one side.
    pub fn faces_on(self, side: Side) -> (u8, u8) {
        let [e0, e1] = self.edges();
        let (a, b) = if side == Side::A { e0 } else { e1 };
        faces_of_edge(a, b)
    }
}

impl fmt::Display for PiPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [(a, b), (c, d)] = self.edges();
        write!(f, "{a}{b}|{c}{d}")
    }
}

impl FromStr for PiPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "01|23" | "23|01" => Ok(PiPair::P01_23),
            "02|13" | "13|02" => Ok(PiPair::P02_13),
            "03|12" | "12|03" => Ok(PiPair::P03_12),
            _ => Err(format!("`{s}` is not one of 01|23, 02|13, 03|12")),
        }
    }
}

/// The two halves of a taut tetrahedron's boundary, separated by the equator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

/// A candidate taut structure: one [`PiPair`] per tetrahedron.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TautStructure {
    pub pi_pairs: Vec<PiPair>,
}

impl TautStructure {
    pub fn new(pi_pairs: Vec<PiPair>) -> Self {
        TautStructure { pi_pairs }
    }

    pub fn pair(&self, tet: usize) -> PiPair {
        self.pi_pairs[tet]
    }

    pub fn is_pi(&self, tet: usize, a: u8, b: u8) -> bool {
        self.pi_pairs[tet].is_pi(a, b)
    }

    /// Reads `taut i P` lines; every tetrahedron must appear exactly once.
    pub fn parse(text: &str) -> Result<Self, TautError> {
        let mut entries: Vec<Option<PiPair>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let err = |msg: &str| TautError::Syntax { line, msg: msg.to_string() };
            if words.len() != 3 || words[0] != "taut" {
                return Err(err("expected `taut i P`"));
            }
            let tet: usize = words[1].parse().map_err(|_| err("bad tetrahedron index"))?;
            let pair: PiPair = words[2].parse().map_err(|m: String| err(&m))?;
            if entries.len() <= tet {
                entries.resize(tet + 1, None);
            }
            if entries[tet].replace(pair).is_some() {
                return Err(err("tetrahedron listed twice"));
            }
        }
        let pi_pairs = entries
            .into_iter()
            .enumerate()
            .map(|(t, p)| {
                p.ok_or(TautError::Syntax { line: 0, msg: format!("tetrahedron {t} missing") })
            })
            .collect::<Result<_, _>>()?;
        Ok(TautStructure { pi_pairs })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.pi_pairs.iter().enumerate() {
            writeln!(out, "taut {i} {p}").unwrap();
        }
        out
    }
}

/// An edge class whose π count is not two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeEqualityFailure {
    pub class: usize,
    pub pi_count: usize,
}

pub fn pi_count(class: &EdgeClass, taut: &TautStructure) -> usize {
    class
        .germs
        .iter()
        .filter(|g| taut.is_pi(g.tet, g.edge.0, g.edge.1))
        .count()
}

/// Checks the edge equalities. The returned list is empty iff `cand` is taut.
pub fn verify_taut(tri: &Triangulation, cand: &TautStructure) -> Result<Vec<EdgeEqualityFailure>, TautError> {
    if cand.pi_pairs.len() != tri.tet_count() {
        return Err(TautError::SizeMismatch { expected: tri.tet_count(), got: cand.pi_pairs.len() });
    }
    Ok(tri
        .edge_classes()
        .iter()
        .filter_map(|class| {
            let count = pi_count(class, cand);
            (count != 2).then_some(EdgeEqualityFailure { class: class.id, pi_count: count })
        })
        .collect())
}

pub fn is_taut(tri: &Triangulation, cand: &TautStructure) -> bool {
    matches!(verify_taut(tri, cand), Ok(f) if f.is_empty())
}

/// All taut structures, in lexicographic order of the π pairs (tetrahedron 0
/// most significant, [`PiPair::ALL`] order within a tetrahedron).
pub fn enumerate_taut(tri: &Triangulation) -> Vec<TautStructure> {
    let n = tri.tet_count();
    let classes = tri.edge_classes();
    // germ counts per (tet, class) for each pi pair, and how many germs of each
    // class live in tetrahedra at or after a given index
    let mut pi_hits: Vec<[Vec<(usize, usize)>; 3]> = Vec::with_capacity(n);
    let mut remaining = vec![vec![0usize; classes.len()]; n + 1];
    for t in 0..n {
        let mut hits: [Vec<(usize, usize)>; 3] = Default::default();
        for (p, pair) in PiPair::ALL.iter().enumerate() {
            let mut per_class: Vec<(usize, usize)> = Vec::new();
            for (a, b) in pair.edges() {
                let c = tri.germ_of(t, a, b).class;
                match per_class.iter_mut().find(|(cc, _)| *cc == c) {
                    Some(entry) => entry.1 += 1,
                    None => per_class.push((c, 1)),
                }
            }
            hits[p] = per_class;
        }
        pi_hits.push(hits);
    }
    for t in (0..n).rev() {
        remaining[t] = remaining[t + 1].clone();
        for &(a, b) in &MODEL_EDGES {
            remaining[t][tri.germ_of(t, a, b).class] += 1;
        }
    }
    // A tetrahedron carries at most two π germs; a class can still be completed
    // iff its current count plus the π germs available in later tetrahedra reaches two.
    let mut capacity = vec![vec![0usize; classes.len()]; n + 1];
    for t in (0..n).rev() {
        capacity[t] = capacity[t + 1].clone();
        let mut best = vec![0usize; classes.len()];
        for hits in &pi_hits[t] {
            for &(c, k) in hits {
                best[c] = best[c].max(k);
            }
        }
        for (c, k) in best.into_iter().enumerate() {
            capacity[t][c] += k;
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; classes.len()];
    let mut choice = Vec::with_capacity(n);
    backtrack(0, n, &pi_hits, &capacity, &mut counts, &mut choice, &mut out);
    out
}

fn backtrack(
    t: usize,
    n: usize,
    pi_hits: &[[Vec<(usize, usize)>; 3]],
    capacity: &[Vec<usize>],
    counts: &mut Vec<usize>,
    choice: &mut Vec<PiPair>,
    out: &mut Vec<TautStructure>,
) {
    if t == n {
        if counts.iter().all(|&c| c == 2) {
            out.push(TautStructure::new(choice.clone()));
        }
        return;
    }
    for (p, pair) in PiPair::ALL.iter().enumerate() {
        let hits = &pi_hits[t][p];
        for &(c, k) in hits {
            counts[c] += k;
        }
        let feasible = counts
            .iter()
            .enumerate()
            .all(|(c, &have)| have <= 2 && have + capacity[t + 1][c] >= 2);
        if feasible {
            choice.push(*pair);
            backtrack(t + 1, n, pi_hits, capacity, counts, choice, out);
            choice.pop();
        }
        for &(c, k) in hits {
            counts[c] -= k;
        }
    }
}

/// The zero-angle edges of a taut tetrahedron and the induced face pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equator {
    /// The four equatorial edges as a cycle: consecutive edges share a vertex.
    pub cycle: [(u8, u8); 4],
    /// Faces on side A (containing the π edge through vertex 0) and side B.
    pub side_a: (u8, u8),
    pub side_b: (u8, u8),
}

impl Equator {
    pub fn of(pair: PiPair) -> Self {
        let [(a, b), (c, d)] = pair.edges();
        let sorted = |x: u8, y: u8| (x.min(y), x.max(y));
        Equator {
            cycle: [sorted(a, c), sorted(c, b), sorted(b, d), sorted(d, a)],
            side_a: pair.faces_on(Side::A),
            side_b: pair.faces_on(Side::B),
        }
    }

    pub fn side(&self, face: u8) -> Side {
        if face == self.side_a.0 || face == self.side_a.1 {
            Side::A
        } else {
            Side::B
        }
    }

    pub fn contains(&self, a: u8, b: u8) -> bool {
        let e = (a.min(b), a.max(b));
        self.cycle.contains(&e)
    }
}

pub fn equator_and_sides(tri: &Triangulation, taut: &TautStructure, tet: usize) -> Result<Equator, TautError> {
    if !verify_taut(tri, taut)?.is_empty() {
        return Err(TautError::Unverified);
    }
    Ok(Equator::of(taut.pair(tet)))
}

/// Branching side of a face germ around an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Color {
    L,
    R,
}

impl Color {
    pub fn flip(self) -> Self {
        match self {
            Color::L => Color::R,
            Color::R => Color::L,
        }
    }
}

/// Two-colouring of the face germs around one edge class. `colors[i]` belongs to
/// the entry face of germ `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeSides {
    pub class: usize,
    pub colors: Vec<Color>,
}

/// Colours face germs by walking the class and flipping at every π germ.
/// Only meaningful for taut structures, where the colouring closes up.
pub fn branch_sides(class: &EdgeClass, taut: &TautStructure) -> EdgeSides {
    let mut colors = Vec::with_capacity(class.degree());
    let mut color = Color::L;
    for germ in &class.germs {
        colors.push(color);
        if taut.is_pi(germ.tet, germ.edge.0, germ.edge.1) {
            color = color.flip();
        }
    }
    EdgeSides { class: class.id, colors }
}

pub fn edge_branch_sides(tri: &Triangulation, taut: &TautStructure, class: usize) -> Result<EdgeSides, TautError> {
    if !verify_taut(tri, taut)?.is_empty() {
        return Err(TautError::Unverified);
    }
    Ok(branch_sides(&tri.edge_classes()[class], taut))
}

/// All edge colourings of a taut structure, indexed by edge class.
pub fn all_branch_sides(tri: &Triangulation, taut: &TautStructure) -> Vec<EdgeSides> {
    tri.edge_classes().iter().map(|c| branch_sides(c, taut)).collect()
}
