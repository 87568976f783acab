//! Disks carrying a train track with stops: a half-edge map whose faces are
//! labelled by tetrahedra and whose branches are labelled by face classes.
//!
//! Darts: branch `b` has dart `2b` (tail to head, the `b+` side on its left)
//! and dart `2b + 1` (head to tail). Boundary arc `d_k` runs from stop `k` to
//! stop `k + 1` with the disk on its left. Regions lie to the left of the darts
//! of their walks.

mod index;
mod lift;
mod orient;
mod push;
mod refute;
mod surgery;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::tri::{FaceSlot, Triangulation};

pub use index::{
    audit_minimality, audit_switches, audit_total_index, region_census, region_sides, MinimalityViolation, RegionKind,
    RegionReport, Shape, Side, SwitchViolation, TotalIndex,
};
pub use lift::lift_diagram;
pub use orient::{orient_and_classify_bigons, BigonKind, BigonTag, Orientation};
pub use push::{push_min_bigon, PushReport};
pub use refute::{refute_certificate, Certificate, LoopKind, Reason, RefuteContext, Verdict};
pub use surgery::{
    carve, max_bigon_surgery, CarveReport, CarvedRegion, Cell, ChainEnd, ChainStep, MaxBigonReport, Quadrilateral,
    TracePoint,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiskError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("stop {stop} has {count} branch ends, expected one")]
    StopDegree { stop: usize, count: usize },
    #[error("switch {switch} has an empty side")]
    EmptySide { switch: usize },
    #[error("branch end {branch}{end} is not listed exactly once at its switch")]
    SwitchEnd { branch: usize, end: &'static str },
    #[error("region {region}: {msg}")]
    Walk { region: usize, msg: String },
    #[error("Euler relation fails: V - E + sum chi = {value}, expected 1")]
    Euler { value: i64 },
    #[error("branch {branch}: {msg}")]
    Label { branch: usize, msg: String },
    #[error("orientation: {0}")]
    Orientation(String),
    #[error("region {region} is not a {expected}")]
    WrongRegion { region: usize, expected: &'static str },
    #[error("claim {claim} fails: {detail}")]
    Claim { claim: &'static str, detail: String },
    #[error("{0}")]
    Precondition(String),
}

/// Where a branch end sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Node {
    Stop(usize),
    Switch(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Stop(k) => write!(f, "p{k}"),
            Node::Switch(k) => write!(f, "s{k}"),
        }
    }
}

/// One end of a branch: `head` is the end at `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndRef {
    pub branch: usize,
    pub head: bool,
}

impl EndRef {
    /// Dart leaving the node through this end.
    pub fn out_dart(self) -> usize {
        2 * self.branch + self.head as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    /// `None` for a closed circle without switches.
    pub ends: Option<(Node, Node)>,
    pub face: usize,
    pub orient: Option<Orientation>,
}

/// Tangency partition; the counter-clockwise rotation is `sides[0]` then `sides[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Switch {
    pub sides: [Vec<EndRef>; 2],
}

impl Switch {
    pub fn rotation(&self) -> Vec<EndRef> {
        self.sides[0].iter().chain(self.sides[1].iter()).copied().collect()
    }

    pub fn side_of(&self, end: EndRef) -> usize {
        if self.sides[0].contains(&end) {
            0
        } else {
            1
        }
    }
}

/// A piece of a region's boundary walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Token {
    /// Boundary arc from stop `k` to stop `k + 1`.
    Arc(usize),
    /// The whole boundary circle of a disk without stops.
    Circle,
    /// Branch side: `plus` walks tail to head.
    Side { branch: usize, plus: bool },
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Arc(k) => write!(f, "d{k}"),
            Token::Circle => write!(f, "d"),
            Token::Side { branch, plus } => write!(f, "b{branch}{}", if *plus { '+' } else { '-' }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    /// Boundary components, each a cyclic walk.
    pub walk: Vec<Vec<Token>>,
    pub tet: usize,
}

/// A validated disk diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiskDiagram {
    pub stops: usize,
    pub switches: Vec<Switch>,
    pub branches: Vec<Branch>,
    pub regions: Vec<Region>,
    pub boundary: Option<String>,
    /// Slot of each branch's face class on its `+` and `-` sides.
    #[serde(skip)]
    pub(crate) slots: Vec<[FaceSlot; 2]>,
    #[serde(skip)]
    pub(crate) region_of_token: BTreeMap<Token, usize>,
}

/// Unvalidated document contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramDoc {
    pub stops: usize,
    pub switches: Vec<Switch>,
    pub branches: Vec<Branch>,
    pub regions: Vec<Region>,
    pub boundary: Option<String>,
}

fn parse_index(word: &str, prefix: char, line: usize) -> Result<usize, DiskError> {
    word.strip_prefix(prefix)
        .and_then(|w| w.parse().ok())
        .ok_or(DiskError::Syntax { line, msg: format!("expected `{prefix}<n>`, found `{word}`") })
}

fn parse_token(word: &str, line: usize) -> Result<Token, DiskError> {
    let err = || DiskError::Syntax { line, msg: format!("bad walk token `{word}`") };
    if word == "d" {
        return Ok(Token::Circle);
    }
    if let Some(rest) = word.strip_prefix('d') {
        return rest.parse().map(Token::Arc).map_err(|_| err());
    }
    let rest = word.strip_prefix('b').ok_or_else(err)?;
    let (num, plus) = if let Some(n) = rest.strip_suffix('+') {
        (n, true)
    } else if let Some(n) = rest.strip_suffix('-') {
        (n, false)
    } else {
        return Err(err());
    };
    Ok(Token::Side { branch: num.parse().map_err(|_| err())?, plus })
}

// branch and optional end (`.h` is true) on one side of a switch
type RawSide = Vec<(usize, Option<bool>)>;

impl DiagramDoc {
    pub fn parse(text: &str) -> Result<Self, DiskError> {
        let mut doc = DiagramDoc { stops: 0, switches: vec![], branches: vec![], regions: vec![], boundary: None };
        let mut section = "";
        let mut raw_switches: Vec<(usize, [RawSide; 2])> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| DiskError::Syntax { line, msg };
            let words: Vec<&str> = content.split_whitespace().collect();
            match words[0] {
                "stops" => {
                    let n = words.get(1).and_then(|w| w.parse().ok()).ok_or_else(|| err("expected `stops N`".into()))?;
                    doc.stops = n;
                    section = "stops";
                    continue;
                }
                "switches" | "branches" | "regions" if words.len() == 1 => {
                    section = words[0];
                    continue;
                }
                "boundary" => {
                    let value = content["boundary".len()..].trim();
                    let path = value.strip_prefix("loop=").ok_or_else(|| err("expected `boundary loop=<file>`".into()))?;
                    doc.boundary = Some(path.to_string());
                    continue;
                }
                _ => {}
            }
            let (label, rest) = content.split_once(':').ok_or_else(|| err("expected `<id>: ...`".into()))?;
            let label = label.trim();
            match section {
                "switches" => {
                    let id = parse_index(label, 's', line)?;
                    if id != raw_switches.len() {
                        return Err(err(format!("switch `{label}` out of order")));
                    }
                    let mut sides: [RawSide; 2] = [vec![], vec![]];
                    let groups: Vec<&str> = rest.split('(').skip(1).collect();
                    if groups.len() != 2 || !rest.trim_start().starts_with('(') {
                        return Err(err("a switch needs two parenthesised sides".into()));
                    }
                    for (side, g) in groups.iter().enumerate() {
                        let inside = g.split(')').next().ok_or_else(|| err("unclosed side".into()))?;
                        for w in inside.split_whitespace() {
                            let (num, which) = match w.split_once('.') {
                                Some((n, "t")) => (n, Some(false)),
                                Some((n, "h")) => (n, Some(true)),
                                Some(_) => return Err(err(format!("bad branch end `{w}`"))),
                                None => (w, None),
                            };
                            sides[side].push((parse_index(num, 'b', line)?, which));
                        }
                    }
                    raw_switches.push((line, sides));
                }
                "branches" => {
                    let id = parse_index(label, 'b', line)?;
                    if id != doc.branches.len() {
                        return Err(err(format!("branch `{label}` out of order")));
                    }
                    let ws: Vec<&str> = rest.split_whitespace().collect();
                    let mut face = None;
                    let mut orient = None;
                    let mut nodes = Vec::new();
                    for w in ws {
                        if let Some(v) = w.strip_prefix("face=") {
                            face = Some(v.parse().map_err(|_| err(format!("bad face `{v}`")))?);
                        } else if let Some(v) = w.strip_prefix("orient=") {
                            orient = Some(match v {
                                "+" => Orientation::Plus,
                                "-" => Orientation::Minus,
                                _ => return Err(err(format!("bad orientation `{v}`"))),
                            });
                        } else if w == "circle" {
                            nodes.push(None);
                        } else if w.starts_with('p') {
                            nodes.push(Some(Node::Stop(parse_index(w, 'p', line)?)));
                        } else {
                            nodes.push(Some(Node::Switch(parse_index(w, 's', line)?)));
                        }
                    }
                    let ends = match nodes.as_slice() {
                        [None] => None,
                        [Some(v), Some(w)] => Some((*v, *w)),
                        _ => return Err(err("a branch needs `v w` or `circle`".into())),
                    };
                    let face = face.ok_or_else(|| err("missing face=".into()))?;
                    doc.branches.push(Branch { ends, face, orient });
                }
                "regions" => {
                    let id = parse_index(label, 'r', line)?;
                    if id != doc.regions.len() {
                        return Err(err(format!("region `{label}` out of order")));
                    }
                    let rest = rest.trim();
                    let walk_text = rest.strip_prefix("walk=").ok_or_else(|| err("expected walk=".into()))?;
                    let (walk_text, tet_text) = walk_text.rsplit_once("tet=").ok_or_else(|| err("missing tet=".into()))?;
                    let tet = tet_text.trim().parse().map_err(|_| err("bad tet".into()))?;
                    let mut walk = Vec::new();
                    for comp in walk_text.split('|') {
                        let toks = comp.split_whitespace().map(|w| parse_token(w, line)).collect::<Result<Vec<_>, _>>()?;
                        if toks.is_empty() {
                            return Err(err("empty walk component".into()));
                        }
                        walk.push(toks);
                    }
                    doc.regions.push(Region { walk, tet });
                }
                _ => return Err(err("line outside a section".into())),
            }
        }
        // resolve switch ends now that branch endpoints are known
        for (s, (line, raw)) in raw_switches.into_iter().enumerate() {
            let mut sides: [Vec<EndRef>; 2] = [vec![], vec![]];
            for side in 0..2 {
                for &(branch, which) in &raw[side] {
                    let b = doc.branches.get(branch).ok_or(DiskError::Syntax { line, msg: format!("unknown branch b{branch}") })?;
                    let here = Node::Switch(s);
                    let head = match (which, b.ends) {
                        (Some(h), _) => h,
                        (None, Some((v, w))) if v == here && w != here => false,
                        (None, Some((v, w))) if w == here && v != here => true,
                        _ => {
                            return Err(DiskError::Syntax { line, msg: format!("end of b{branch} at s{s} is ambiguous or absent") })
                        }
                    };
                    sides[side].push(EndRef { branch, head });
                }
            }
            doc.switches.push(Switch { sides });
        }
        Ok(doc)
    }
}

impl DiskDiagram {
    pub fn parse(text: &str, tri: &Triangulation) -> Result<Self, DiskError> {
        build_diagram(DiagramDoc::parse(text)?, tri)
    }

    pub fn doc(&self) -> DiagramDoc {
        DiagramDoc {
            stops: self.stops,
            switches: self.switches.clone(),
            branches: self.branches.clone(),
            regions: self.regions.clone(),
            boundary: self.boundary.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "stops {}", self.stops).unwrap();
        writeln!(out, "switches").unwrap();
        for (s, sw) in self.switches.iter().enumerate() {
            let fmt_end = |e: &EndRef| {
                let b = &self.branches[e.branch];
                match b.ends {
                    Some((v, w)) if v == w => format!("b{}.{}", e.branch, if e.head { 'h' } else { 't' }),
                    _ => format!("b{}", e.branch),
                }
            };
            let a: Vec<String> = sw.sides[0].iter().map(fmt_end).collect();
            let b: Vec<String> = sw.sides[1].iter().map(fmt_end).collect();
            writeln!(out, "s{s}: ({}) ({})", a.join(" "), b.join(" ")).unwrap();
        }
        writeln!(out, "branches").unwrap();
        for (i, b) in self.branches.iter().enumerate() {
            let ends = match b.ends {
                Some((v, w)) => format!("{v} {w}"),
                None => "circle".to_string(),
            };
            let orient = match b.orient {
                Some(o) => format!(" orient={o}"),
                None => String::new(),
            };
            writeln!(out, "b{i}: {ends} face={}{orient}", b.face).unwrap();
        }
        writeln!(out, "regions").unwrap();
        for (i, r) in self.regions.iter().enumerate() {
            let comps: Vec<String> = r
                .walk
                .iter()
                .map(|c| c.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            writeln!(out, "r{i}: walk={} tet={}", comps.join(" | "), r.tet).unwrap();
        }
        if let Some(b) = &self.boundary {
            writeln!(out, "boundary loop={b}").unwrap();
        }
        out
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// Region on the left of a walk token.
    pub fn region_at(&self, token: Token) -> usize {
        self.region_of_token[&token]
    }

    /// The face slot a branch presents to the region on its `plus` side.
    pub fn slot(&self, branch: usize, plus: bool) -> FaceSlot {
        self.slots[branch][if plus { 0 } else { 1 }]
    }

    /// End of the branch at stop `k`.
    pub fn stop_end(&self, k: usize) -> EndRef {
        self.branches
            .iter()
            .enumerate()
            .find_map(|(i, b)| match b.ends {
                Some((Node::Stop(v), _)) if v == k => Some(EndRef { branch: i, head: false }),
                Some((_, Node::Stop(w))) if w == k => Some(EndRef { branch: i, head: true }),
                _ => None,
            })
            .expect("validated diagram has one branch per stop")
    }

    /// Node at the far end of a dart.
    pub fn head_of(&self, dart: usize) -> Option<Node> {
        let (v, w) = self.branches[dart / 2].ends?;
        Some(if dart.is_multiple_of(2) { w } else { v })
    }

    /// The walk successor of a branch side.
    pub(crate) fn next_token(&self, token: Token) -> Token {
        Map::from_parts(self.stops, &self.branches, &self.switches).next(token)
    }

    /// Walk successors and what lies between consecutive pieces.
    pub fn vertex_between(&self, a: Token, b: Token) -> Vertex {
        Map::from_parts(self.stops, &self.branches, &self.switches).vertex_between(a, b)
    }

    /// The boundary loop read off the labels: step `k` is the tetrahedron of the
    /// region on `d_k` entered through the face of the branch at stop `k` and
    /// left through the face of the branch at stop `k + 1`.
    pub fn boundary_dual_loop(&self) -> Option<crate::loops::DualLoop> {
        if self.stops == 0 {
            return None;
        }
        let steps = (0..self.stops)
            .map(|k| {
                let region = self.region_at(Token::Arc(k));
                let into = self.stop_end(k);
                // the branch at stop k arrives there with the region on its left
                let slot_in = self.slot(into.branch, into.head);
                let out = self.stop_end((k + 1) % self.stops);
                let slot_out = self.slot(out.branch, !out.head);
                crate::loops::DualStep { tet: self.regions[region].tet, face_in: slot_in.face, face_out: slot_out.face }
            })
            .collect();
        Some(crate::loops::DualLoop { steps })
    }
}

/// What the walk passes between two consecutive pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Vertex {
    Corner { stop: usize },
    Smooth { switch: usize },
    Cusp { switch: usize },
    /// Closed circle pieces meet nothing.
    None,
}

/// Rotation data used for tracing.
pub(crate) struct Map<'a> {
    stops: usize,
    branches: &'a [Branch],
    switches: &'a [Switch],
    stop_out: Vec<Option<EndRef>>,
    rotation: Vec<Vec<EndRef>>,
}

impl<'a> Map<'a> {
    pub(crate) fn new(doc: &'a DiagramDoc) -> Self {
        Self::from_parts(doc.stops, &doc.branches, &doc.switches)
    }

    pub(crate) fn from_parts(stops: usize, branches: &'a [Branch], switches: &'a [Switch]) -> Self {
        let mut stop_out = vec![None; stops];
        for (i, b) in branches.iter().enumerate() {
            if let Some((v, w)) = b.ends {
                if let Node::Stop(k) = v {
                    if k < stops {
                        stop_out[k] = Some(EndRef { branch: i, head: false });
                    }
                }
                if let Node::Stop(k) = w {
                    if k < stops {
                        stop_out[k] = Some(EndRef { branch: i, head: true });
                    }
                }
            }
        }
        Map { stops, branches, switches, stop_out, rotation: switches.iter().map(|s| s.rotation()).collect() }
    }

    fn token_of_dart(dart: usize) -> Token {
        Token::Side { branch: dart / 2, plus: dart.is_multiple_of(2) }
    }

    fn end_arrived(dart: usize) -> EndRef {
        EndRef { branch: dart / 2, head: dart.is_multiple_of(2) }
    }

    pub(crate) fn next(&self, token: Token) -> Token {
        match token {
            Token::Circle => Token::Circle,
            Token::Arc(k) => {
                let end = self.stop_out[(k + 1) % self.stops].expect("stop has a branch");
                Self::token_of_dart(end.out_dart())
            }
            Token::Side { branch, plus } => {
                let dart = 2 * branch + (!plus) as usize;
                let b = &self.branches[branch];
                match b.ends {
                    None => token,
                    Some((v, w)) => match if plus { w } else { v } {
                        Node::Stop(k) => Token::Arc(k),
                        Node::Switch(s) => {
                            let rot = &self.rotation[s];
                            let arrived = Self::end_arrived(dart);
                            let pos = rot.iter().position(|e| *e == arrived).expect("end listed at switch");
                            let pred = rot[(pos + rot.len() - 1) % rot.len()];
                            Self::token_of_dart(pred.out_dart())
                        }
                    },
                }
            }
        }
    }

    pub(crate) fn vertex_between(&self, a: Token, _b: Token) -> Vertex {
        match a {
            Token::Circle => Vertex::None,
            Token::Arc(k) => Vertex::Corner { stop: (k + 1) % self.stops },
            Token::Side { branch, plus } => match self.branches[branch].ends {
                None => Vertex::None,
                Some((v, w)) => match if plus { w } else { v } {
                    Node::Stop(k) => Vertex::Corner { stop: k },
                    Node::Switch(s) => {
                        let sw = &self.switches[s];
                        let arrived = EndRef { branch, head: plus };
                        let rot = &self.rotation[s];
                        let pos = rot.iter().position(|e| *e == arrived).unwrap();
                        let pred = rot[(pos + rot.len() - 1) % rot.len()];
                        if sw.side_of(arrived) == sw.side_of(pred) {
                            Vertex::Cusp { switch: s }
                        } else {
                            Vertex::Smooth { switch: s }
                        }
                    }
                },
            },
        }
    }

    /// All face cycles, each starting at its least token.
    pub(crate) fn faces(&self) -> Vec<Vec<Token>> {
        let mut tokens: Vec<Token> = Vec::new();
        if self.stops == 0 {
            tokens.push(Token::Circle);
        }
        tokens.extend((0..self.stops).map(Token::Arc));
        for b in 0..self.branches.len() {
            tokens.push(Token::Side { branch: b, plus: true });
            tokens.push(Token::Side { branch: b, plus: false });
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut faces = Vec::new();
        for &t in &tokens {
            if seen.contains(&t) {
                continue;
            }
            let mut cycle = vec![t];
            seen.insert(t);
            let mut cur = self.next(t);
            while cur != t {
                if !seen.insert(cur) {
                    break;
                }
                cycle.push(cur);
                cur = self.next(cur);
            }
            faces.push(canonical_cycle(&cycle));
        }
        faces
    }
}

pub(crate) fn canonical_cycle(cycle: &[Token]) -> Vec<Token> {
    let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    let mut c = cycle.to_vec();
    c.rotate_left(start);
    c
}

fn check_structure(doc: &DiagramDoc) -> Result<(), DiskError> {
    let mut stop_count = vec![0usize; doc.stops];
    for (i, b) in doc.branches.iter().enumerate() {
        if let Some((v, w)) = b.ends {
            for (node, head) in [(v, false), (w, true)] {
                match node {
                    Node::Stop(k) => {
                        let slot = stop_count.get_mut(k).ok_or(DiskError::Label { branch: i, msg: format!("stop p{k} does not exist") })?;
                        *slot += 1;
                    }
                    Node::Switch(s) => {
                        let sw = doc.switches.get(s).ok_or(DiskError::Label { branch: i, msg: format!("switch s{s} does not exist") })?;
                        let count = sw.rotation().iter().filter(|e| **e == EndRef { branch: i, head }).count();
                        if count != 1 {
                            return Err(DiskError::SwitchEnd { branch: i, end: if head { ".h" } else { ".t" } });
                        }
                    }
                }
            }
        }
    }
    if let Some((stop, &count)) = stop_count.iter().enumerate().find(|(_, &c)| c != 1) {
        return Err(DiskError::StopDegree { stop, count });
    }
    for (s, sw) in doc.switches.iter().enumerate() {
        if sw.sides.iter().any(|side| side.is_empty()) {
            return Err(DiskError::EmptySide { switch: s });
        }
        for e in sw.rotation() {
            let ok = doc.branches.get(e.branch).and_then(|b| b.ends).is_some_and(|(v, w)| {
                (if e.head { w } else { v }) == Node::Switch(s)
            });
            if !ok {
                return Err(DiskError::SwitchEnd { branch: e.branch, end: if e.head { ".h" } else { ".t" } });
            }
        }
    }
    Ok(())
}

/// Validates a document against the triangulation: map structure, region
/// walks against the traced faces, the Euler relation and label compatibility.
pub fn build_diagram(doc: DiagramDoc, tri: &Triangulation) -> Result<DiskDiagram, DiskError> {
    check_structure(&doc)?;
    let map = Map::new(&doc);
    let faces = map.faces();
    let mut owner: BTreeMap<Vec<Token>, usize> = BTreeMap::new();
    for (r, region) in doc.regions.iter().enumerate() {
        if region.tet >= tri.tet_count() {
            return Err(DiskError::Walk { region: r, msg: format!("tetrahedron {} does not exist", region.tet) });
        }
        for comp in &region.walk {
            let canon = canonical_cycle(comp);
            if !faces.contains(&canon) {
                return Err(DiskError::Walk { region: r, msg: format!("walk component {} is not a face of the map", fmt_walk(comp)) });
            }
            if owner.insert(canon, r).is_some() {
                return Err(DiskError::Walk { region: r, msg: "face claimed by two regions".into() });
            }
        }
    }
    if let Some(face) = faces.iter().find(|f| !owner.contains_key(*f)) {
        return Err(DiskError::Walk { region: doc.regions.len(), msg: format!("face {} belongs to no region", fmt_walk(face)) });
    }
    let vertices = doc.stops + doc.switches.len();
    let edges = doc.branches.iter().filter(|b| b.ends.is_some()).count() + doc.stops;
    let chi: i64 = doc.regions.iter().map(|r| 2 - r.walk.len() as i64).sum();
    let value = vertices as i64 - edges as i64 + chi;
    if value != 1 {
        return Err(DiskError::Euler { value });
    }
    let mut region_of_token = BTreeMap::new();
    for (face, &r) in &owner {
        for &t in face {
            region_of_token.insert(t, r);
        }
    }
    let mut slots = Vec::with_capacity(doc.branches.len());
    for (i, b) in doc.branches.iter().enumerate() {
        let class = tri
            .face_classes()
            .get(b.face)
            .ok_or(DiskError::Label { branch: i, msg: format!("face class {} does not exist", b.face) })?;
        let t_plus = doc.regions[region_of_token[&Token::Side { branch: i, plus: true }]].tet;
        let t_minus = doc.regions[region_of_token[&Token::Side { branch: i, plus: false }]].tet;
        let [s0, s1] = class.slots;
        let pair = if t_plus == s0.tet && t_minus == s1.tet {
            [s0, s1]
        } else if t_plus == s1.tet && t_minus == s0.tet {
            [s1, s0]
        } else {
            return Err(DiskError::Label {
                branch: i,
                msg: format!(
                    "face class {} joins tetrahedra {} and {}, but the branch separates regions in {} and {}",
                    b.face, s0.tet, s1.tet, t_plus, t_minus
                ),
            });
        };
        slots.push(pair);
    }
    Ok(DiskDiagram {
        stops: doc.stops,
        switches: doc.switches,
        branches: doc.branches,
        regions: doc.regions,
        boundary: doc.boundary,
        slots,
        region_of_token,
    })
}

pub(crate) fn fmt_walk(walk: &[Token]) -> String {
    walk.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

/// The faces of a document's map, each starting at its least token.
pub fn trace_regions(doc: &DiagramDoc) -> Vec<Vec<Token>> {
    Map::new(doc).faces()
}

#[cfg(test)]
mod tests;
