use serde::Serialize;

use super::index::{audit_minimality, audit_switches, audit_total_index};
use super::orient::{orient_and_classify_bigons, BigonKind};
use super::push::push_min_bigon;
use super::surgery::{carve, max_bigon_surgery, CarveReport, MaxBigonReport};
use super::{DiskDiagram, DiskError, Token, Vertex};
use crate::loops::{check_vertical, push_up_oriented, raise_loop, raise_oriented, DualStep, Lowering, NormalLoop, RaisedCurve};
use crate::perm::common_edge;
use crate::taut::{Equator, TautStructure};
use crate::transverse::Coorientation;
use crate::tri::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    Vertical,
    Normal,
}

pub struct RefuteContext<'a> {
    pub tri: &'a Triangulation,
    pub taut: &'a TautStructure,
    pub coor: Option<&'a Coorientation>,
    /// The normal loop whose raised curve should bound the disk.
    pub normal: Option<&'a NormalLoop>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Reason {
    /// A bigon side passes smoothly through a zero-angle edge.
    Parity { region: usize, tet: usize, switch: usize, edge: (u8, u8), side_changes: usize },
    Claim { claim: String, detail: String },
    Inconsistent { detail: String },
    CarvedIndex { total_q: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Refuted(Reason),
    /// No contradiction; `audit` names the precondition to re-examine.
    Accepted { audit: String, diagnostic: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub kind: LoopKind,
    pub verdict: Verdict,
    pub pushes: usize,
    pub surgeries: Vec<MaxBigonReport>,
    pub carved: Option<CarveReport>,
    pub transcript: Vec<String>,
}

impl Certificate {
    pub fn is_refuted(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted(_))
    }
}

pub fn refute_certificate(d: &DiskDiagram, kind: LoopKind, ctx: &RefuteContext) -> Result<Certificate, DiskError> {
    if d.stops == 0 || d.branches.is_empty() {
        return Err(DiskError::Precondition("the boundary loop must cross the branched surface".into()));
    }
    let mut cert = Certificate { kind, verdict: Verdict::Accepted { audit: String::new(), diagnostic: String::new() }, pushes: 0, surgeries: vec![], carved: None, transcript: vec![] };
    let total = audit_total_index(d);
    cert.transcript.push(format!("Index sum: {} quarter units", total.total_q));
    for v in audit_switches(d, ctx.tri, ctx.taut) {
        cert.transcript.push(format!("Switch audit: {}", serde_json::to_string(&v).unwrap_or_default()));
    }
    cert.verdict = match kind {
        LoopKind::Vertical => vertical(d, ctx, &mut cert.transcript)?,
        LoopKind::Normal => normal(d, ctx, &mut cert)?,
    };
    match &cert.verdict {
        Verdict::Refuted(r) => cert.transcript.push(format!("Refuted: {}", serde_json::to_string(r).unwrap_or_default())),
        Verdict::Accepted { audit, diagnostic } => cert.transcript.push(format!("Accepted; re-examine {audit}: {diagnostic}")),
    }
    Ok(cert)
}

fn minimality_notes(d: &DiskDiagram, transcript: &mut Vec<String>) -> bool {
    let violations = audit_minimality(d);
    for v in &violations {
        transcript.push(format!("Lemma Minimality: {} ({})", serde_json::to_string(v).unwrap_or_default(), v.advisory()));
    }
    if violations.is_empty() {
        transcript.push("Lemma Minimality: diagram is in minimal form".into());
    }
    violations.is_empty()
}

fn vertical(d: &DiskDiagram, ctx: &RefuteContext, transcript: &mut Vec<String>) -> Result<Verdict, DiskError> {
    let delta = d.boundary_dual_loop().expect("stops exist");
    let bad = check_vertical(ctx.tri, ctx.taut, &delta).map_err(|e| DiskError::Precondition(e.to_string()))?;
    if !bad.is_empty() {
        let steps: Vec<String> = bad.iter().map(|v| v.step.to_string()).collect();
        return Ok(Verdict::Accepted { audit: "check_vertical".into(), diagnostic: format!("boundary steps {} stay on one side of the equator", steps.join(", ")) });
    }
    transcript.push(format!("Boundary loop of length {} is vertical", delta.steps.len()));
    let minimal = minimality_notes(d, transcript);
    for (region, arc) in d.boundary_bigons() {
        let tet = d.regions[region].tet;
        let eq = Equator::of(ctx.taut.pair(tet));
        let walk = &d.regions[region].walk[0];
        let at = walk.iter().position(|t| *t == Token::Arc(arc)).unwrap();
        let side: Vec<Token> = (1..walk.len()).map(|i| walk[(at + i) % walk.len()]).collect();
        let face = |t: Token| match t {
            Token::Side { branch, plus } => d.slot(branch, plus).face,
            _ => unreachable!(),
        };
        let mut changes = 0;
        let mut first = None;
        for w in side.windows(2) {
            let (f, g) = (face(w[0]), face(w[1]));
            if eq.side(f) != eq.side(g) {
                changes += 1;
                if first.is_none() {
                    if let Vertex::Smooth { switch } = d.vertex_between(w[0], w[1]) {
                        first = Some((switch, common_edge(f, g)));
                    }
                }
            }
        }
        transcript.push(format!(
            "Boundary bigon r{region} in t{tet}: its track side changes equator side {changes} times"
        ));
        if let Some((switch, edge)) = first.filter(|_| changes % 2 == 1) {
            transcript.push(format!(
                "Vertical parity: the side passes s{switch} smoothly at edge {}{} of t{tet}, which has angle zero",
                edge.0, edge.1
            ));
            return Ok(Verdict::Refuted(Reason::Parity { region, tet, switch, edge, side_changes: changes }));
        }
    }
    let audit = if minimal { "region labels" } else { "audit_minimality" };
    Ok(Verdict::Accepted { audit: audit.into(), diagnostic: "no boundary bigon carries an odd equator crossing".into() })
}

/// Offset `r` with `delta[k] == raised[(k + r) % n]`.
fn alignment(raised: &RaisedCurve, delta: &[DualStep]) -> Option<usize> {
    let steps = raised.as_dual_loop().steps;
    let n = steps.len();
    (n == delta.len()).then_some(())?;
    (0..n).find(|&r| (0..n).all(|k| delta[k] == steps[(k + r) % n]))
}

fn claim(name: &str, detail: String) -> Verdict {
    Verdict::Refuted(Reason::Claim { claim: name.into(), detail })
}

fn normal(d: &DiskDiagram, ctx: &RefuteContext, cert: &mut Certificate) -> Result<Verdict, DiskError> {
    let Some(coor) = ctx.coor else {
        return Err(DiskError::Precondition("a coorientation is required; lift to the double cover".into()));
    };
    let Some(gamma) = ctx.normal else {
        return Err(DiskError::Precondition("the normal loop on the boundary is required".into()));
    };
    let delta = d.boundary_dual_loop().expect("stops exist");
    let mut curve = raise_loop(ctx.tri, ctx.taut, coor, gamma).map_err(|e| DiskError::Precondition(e.to_string()))?;
    let Some(mut offset) = alignment(&curve, &delta.steps) else {
        return Ok(Verdict::Accepted { audit: "raise_loop".into(), diagnostic: "the boundary is not the raised curve of the loop".into() });
    };
    cert.transcript.push(format!("Boundary is the raised curve of a normal loop with {} arcs", gamma.len()));
    let (mut cur, _) = match orient_and_classify_bigons(d, ctx.tri, Some(coor)) {
        Ok(x) => x,
        Err(e) => return Ok(Verdict::Refuted(Reason::Inconsistent { detail: e.to_string() })),
    };
    minimality_notes(&cur, &mut cert.transcript);
    loop {
        let (oriented, tags) = match orient_and_classify_bigons(&cur, ctx.tri, Some(coor)) {
            Ok(x) => x,
            Err(e) => return Ok(Verdict::Refuted(Reason::Inconsistent { detail: e.to_string() })),
        };
        cur = oriented;
        let Some(min) = tags.iter().filter(|t| t.kind == BigonKind::Min).min_by_key(|t| t.arc).copied() else { break };
        // the bigon's arc must be a raised arc that can be pushed up
        let raised = &curve.arcs[(min.arc + offset) % curve.arcs.len()];
        let site = match (&raised.lowering, raised.kind.is_a()) {
            (Lowering::Arcs { indices, .. }, true) => indices[0],
            _ => return Ok(claim("MinBigon", format!("d{} lies over a raised arc of type {:?}", min.arc, raised.kind))),
        };
        let report = match push_min_bigon(&cur, ctx.tri, min.region) {
            Ok(r) => r,
            Err(e) => return Ok(Verdict::Refuted(Reason::Inconsistent { detail: e.to_string() })),
        };
        let pushed = match push_up_oriented(ctx.tri, ctx.taut, coor, &curve.oriented, site) {
            Ok(p) => p,
            Err(e) => return Ok(claim("MinBigon", format!("the loop cannot be pushed up at arc {site}: {e}"))),
        };
        curve = match raise_oriented(ctx.tri, ctx.taut, coor, &pushed.oriented) {
            Ok(c) => c,
            Err(e) => return Ok(claim("MinBigon", format!("the pushed loop does not raise: {e}"))),
        };
        let new_delta = report.boundary_loop.clone().map(|l| l.steps).unwrap_or_default();
        offset = match alignment(&curve, &new_delta) {
            Some(o) => o,
            None => {
                return Ok(claim("MinBigon", format!("the push at d{} does not follow the push-up of the loop", min.arc)))
            }
        };
        cert.transcript.push(format!(
            "Min-bigon push at d{}: {} -> {} regions; loop pushed up at arc {site}",
            min.arc, report.regions_before, report.regions_after
        ));
        cert.pushes += 1;
        cur = report.diagram;
    }
    let (_, tags) = orient_and_classify_bigons(&cur, ctx.tri, Some(coor)).map_err(|e| DiskError::Orientation(e.to_string()))?;
    for tag in tags.iter().filter(|t| t.kind == BigonKind::Max) {
        match max_bigon_surgery(&cur, ctx.tri, ctx.taut, coor, tag.region) {
            Ok(rep) => {
                cert.transcript.push(format!(
                    "Max-bigon r{}: chains of {} and {} trigons, S has {} corners and {} cusps",
                    tag.region,
                    rep.right.len(),
                    rep.left.len(),
                    rep.s_corners,
                    rep.s_cusps
                ));
                cert.surgeries.push(rep);
            }
            Err(DiskError::Claim { claim: name, detail }) => {
                cert.transcript.push(format!("Claim {name} fails at r{}: {detail}", tag.region));
                return Ok(claim(name, detail));
            }
            Err(e) => return Err(e),
        }
    }
    let carved = carve(&cur, &cert.surgeries);
    if let Some(&(a, b)) = carved.overlaps.first() {
        cert.carved = Some(carved);
        return Ok(claim("Disjoint", format!("S(r{a}) and S(r{b}) overlap")));
    }
    cert.transcript.push(format!("Carved disk: total {} quarter units over {} regions", carved.total_q, carved.regions.len()));
    let verdict = if carved.total_q <= 0 {
        Verdict::Refuted(Reason::CarvedIndex { total_q: carved.total_q })
    } else {
        let pos: Vec<String> = carved.positive.iter().map(|r| format!("r{r}")).collect();
        Verdict::Accepted {
            audit: "audit_total_index".into(),
            diagnostic: format!("carved total is {} with positive regions {}", carved.total_q, pos.join(" ")),
        }
    };
    cert.carved = Some(carved);
    Ok(verdict)
}
