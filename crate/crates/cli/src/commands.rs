use std::path::{Path, PathBuf};

use serde_json::json;

use tauttrack::corpus::{build_corpus, seed_from_env, CorpusBounds};
use tauttrack::disk::{
    audit_minimality, audit_switches, audit_total_index, lift_diagram, max_bigon_surgery, orient_and_classify_bigons,
    push_min_bigon, refute_certificate, region_census, BigonKind, DiskDiagram, DiskError, LoopKind, RefuteContext,
    Verdict,
};
use tauttrack::loops::{check_normal, check_vertical, lift_to_cover, push_up, raise_loop, NormalArc, NormalLoop};
use tauttrack::taut::{enumerate_taut, verify_taut, TautStructure};
use tauttrack::transverse::{
    build_double_cover, detect_transverse_taut, verify_coorientation, Coorientation, CoverTriangulation, Labelling,
};
use tauttrack::tri::{validate_triangulation, Triangulation};

use crate::input::{self, InputError};
use crate::report::{Report, Status};
use crate::{Command, CorpusCmd, CoverCmd, DiskCmd, Kind, LoopCmd, Structure, TautCmd, TransverseCmd, TriCmd};

pub fn run(cmd: &Command) -> Result<Report, InputError> {
    match cmd {
        Command::Tri(TriCmd::Validate { tri }) => tri_validate(tri),
        Command::Taut(TautCmd::Verify { tri, taut }) => taut_verify(tri, taut),
        Command::Taut(TautCmd::Enumerate { tri }) => taut_enumerate(tri),
        Command::Transverse(TransverseCmd::Detect { tri, taut }) => transverse_detect(tri, taut),
        Command::Transverse(TransverseCmd::Verify { tri, taut, coor }) => transverse_verify(tri, taut, coor),
        Command::Cover(CoverCmd::Build { tri, taut, out }) => cover_build(tri, taut, out),
        Command::Loop(cmd) => loop_cmd(cmd),
        Command::Disk(cmd) => disk_cmd(cmd),
        Command::Corpus(CorpusCmd::Generate { out, seed, max_normal }) => corpus_generate(out, *seed, *max_normal),
    }
}

fn invalid(e: impl ToString) -> InputError {
    InputError::Invalid(e.to_string())
}

fn tri_validate(path: &Path) -> Result<Report, InputError> {
    let table = input::table(path)?;
    let report = validate_triangulation(&table);
    let mut out = Report::new("tri validate", Status::pass_if(report.is_valid()))
        .with("tetrahedra", table.tet_count())
        .with("violations", &report.violations)
        .with("orientable", report.orientable)
        .line(format!("{} tetrahedra", table.tet_count()));
    for v in &report.violations {
        out = out.line(format!("violation: {v:?}"));
    }
    if let Some(o) = report.orientable {
        out = out.line(format!("orientable: {o}"));
    }
    Ok(out)
}

fn taut_verify(tri: &Path, taut: &Path) -> Result<Report, InputError> {
    let tri = input::tri(tri)?;
    let taut = input::taut(taut, &tri)?;
    let failures = verify_taut(&tri, &taut).map_err(invalid)?;
    let mut out = Report::new("taut verify", Status::pass_if(failures.is_empty())).with("failures", &failures);
    for f in &failures {
        out = out.line(format!("edge class {} has {} pi angles", f.class, f.pi_count));
    }
    Ok(out)
}

fn taut_enumerate(tri: &Path) -> Result<Report, InputError> {
    let tri = input::tri(tri)?;
    let all = enumerate_taut(&tri);
    let mut out = Report::new("taut enumerate", Status::Pass)
        .with("count", all.len())
        .with("structures", all.iter().map(|t| t.to_text()).collect::<Vec<_>>())
        .line(format!("{} taut structures", all.len()));
    for (i, t) in all.iter().enumerate() {
        let pairs: Vec<String> = t.pi_pairs.iter().map(|p| p.to_string()).collect();
        out = out.line(format!("{i}: {}", pairs.join(" ")));
    }
    Ok(out)
}

fn transverse_detect(tri: &Path, taut: &Path) -> Result<Report, InputError> {
    let tri = input::tri(tri)?;
    let taut = input::taut(taut, &tri)?;
    let coor = detect_transverse_taut(&tri, &taut).map_err(invalid)?;
    let text = coor.as_ref().map(|c| c.to_text(&tri));
    let out = Report::new("transverse detect", Status::Pass)
        .with("transverse", coor.is_some())
        .with("coorientation", &text)
        .line(match &text {
            Some(t) => t.trim_end().to_string(),
            None => "not transverse taut; `tauttrack cover build` gives the double cover".into(),
        });
    Ok(out)
}

fn transverse_verify(tri: &Path, taut: &Path, coor: &Path) -> Result<Report, InputError> {
    let tri = input::tri(tri)?;
    let taut = input::taut(taut, &tri)?;
    let coor = input::coor(coor, &tri)?;
    let bad = verify_coorientation(&tri, &taut, &coor).map_err(invalid)?;
    let mut out = Report::new("transverse verify", Status::pass_if(bad.is_empty())).with("violations", &bad);
    for v in &bad {
        out = out.line(format!("violation: {v:?}"));
    }
    Ok(out)
}

fn cover_build(tri: &Path, taut: &Path, out: &Path) -> Result<Report, InputError> {
    let tri = input::tri(tri)?;
    let taut = input::taut(taut, &tri)?;
    let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).map_err(invalid)?;
    let with_ext = |ext: &str| {
        let mut p = out.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    input::write(out, &cover.tri.to_text())?;
    input::write(&with_ext(".taut"), &cover.taut.to_text())?;
    input::write(&with_ext(".coor"), &cover.coor.to_text(&cover.tri))?;
    let components = cover.component_count();
    Ok(Report::new("cover build", Status::Pass)
        .with("tetrahedra", cover.tri.tet_count())
        .with("components", components)
        .with("covering", &cover.covering)
        .with("transverse", components == 2)
        .line(format!("{} tetrahedra in {components} component(s), written to {}", cover.tri.tet_count(), out.display())))
}

/// Where the normal-loop pipeline runs: on the base with a verified
/// co-orientation, or on the double cover when there is none.
enum Setting {
    Base { coor: Coorientation, source: &'static str },
    Cover(CoverTriangulation),
}

impl Setting {
    fn name(&self) -> &'static str {
        match self {
            Setting::Base { source, .. } => source,
            Setting::Cover(_) => "double cover",
        }
    }
}

fn structure(s: &Structure) -> Result<(Triangulation, TautStructure), InputError> {
    let tri = input::tri(&s.tri)?;
    let taut = input::taut(&s.taut, &tri)?;
    Ok((tri, taut))
}

fn setting(s: &Structure, tri: &Triangulation, taut: &TautStructure) -> Result<Setting, InputError> {
    if let Some(path) = &s.coor {
        let coor = input::coor(path, tri)?;
        let bad = verify_coorientation(tri, taut, &coor).map_err(invalid)?;
        if !bad.is_empty() {
            return Err(InputError::Invalid(format!(
                "{}: co-orientation fails verification in {} place(s); `tauttrack cover build` gives a transverse taut cover",
                path.display(),
                bad.len()
            )));
        }
        return Ok(Setting::Base { coor, source: "given" });
    }
    match detect_transverse_taut(tri, taut).map_err(invalid)? {
        Some(coor) => Ok(Setting::Base { coor, source: "detected" }),
        None => Ok(Setting::Cover(build_double_cover(tri, taut, &Labelling::default_for(taut)).map_err(invalid)?)),
    }
}

fn loop_cmd(cmd: &LoopCmd) -> Result<Report, InputError> {
    match cmd {
        LoopCmd::CheckVertical { structure: s, dual } => {
            let (tri, taut) = structure(s)?;
            let dual = input::dual(dual)?;
            let bad = check_vertical(&tri, &taut, &dual).map_err(invalid)?;
            let mut out = Report::new("loop check-vertical", Status::pass_if(bad.is_empty())).with("violations", &bad);
            for v in &bad {
                out = out.line(format!("step {} in t{}: faces {} and {} lie on one side of the equator", v.step, v.tet, v.faces.0, v.faces.1));
            }
            Ok(out)
        }
        LoopCmd::CheckNormal { structure: s, normal } => {
            let (tri, taut) = structure(s)?;
            let normal = input::normal(normal)?;
            let bad = check_normal(&tri, &taut, &normal).map_err(invalid)?;
            let mut out = Report::new("loop check-normal", Status::pass_if(bad.is_empty())).with("violations", &bad);
            for v in &bad {
                out = out.line(format!("violation: {v:?}"));
            }
            Ok(out)
        }
        LoopCmd::Raise { structure: s, normal } => {
            let (tri, taut) = structure(s)?;
            let normal = input::normal(normal)?;
            let setting = setting(s, &tri, &taut)?;
            let (curve, lifted) = match &setting {
                Setting::Base { coor, .. } => (raise_loop(&tri, &taut, coor, &normal).map_err(invalid)?, None),
                Setting::Cover(cover) => {
                    let up = lift_to_cover(&tri, &taut, cover, &normal).map_err(invalid)?;
                    (raise_loop(&cover.tri, &cover.taut, &cover.coor, &up).map_err(invalid)?, Some(up))
                }
            };
            let mut out = Report::new("loop raise", Status::Pass)
                .with("setting", setting.name())
                .with("lifted_loop", lifted.as_ref().map(NormalLoop::to_text))
                .with("raised", &curve)
                .with("dual", curve.as_dual_loop().to_text());
            if let Some(up) = &lifted {
                out = out.line(format!("not transverse taut: lifted to the double cover as {}", up.to_text().trim_end()));
            }
            for a in &curve.arcs {
                let lu = |lower: bool| if lower { "L" } else { "U" };
                out = out.line(format!(
                    "t{} {}{} -> {}{} {} over {}",
                    a.tet,
                    a.face_in,
                    lu(a.in_lower),
                    a.face_out,
                    lu(a.out_lower),
                    a.kind,
                    serde_json::to_string(&a.lowering).unwrap()
                ));
            }
            Ok(out.line(curve.as_dual_loop().to_text().trim_end().to_string()))
        }
        LoopCmd::PushUp { structure: s, normal, site } => {
            let (tri, taut) = structure(s)?;
            let normal = input::normal(normal)?;
            let setting = setting(s, &tri, &taut)?;
            let pushed = match &setting {
                Setting::Base { coor, .. } => push_up(&tri, &taut, coor, &normal, *site),
                Setting::Cover(cover) => {
                    let up = lift_to_cover(&tri, &taut, cover, &normal).map_err(invalid)?;
                    push_up(&cover.tri, &cover.taut, &cover.coor, &up, *site)
                }
            }
            .map_err(invalid)?;
            let text = pushed.result.to_text();
            Ok(Report::new("loop push-up", Status::Pass)
                .with("setting", setting.name())
                .with("tet", pushed.tet)
                .with("site_type", pushed.site_type)
                .with("removed", &pushed.removed)
                .with("replacement", &pushed.replacement)
                .with("length_change", pushed.length_change())
                .with("result", &text)
                .line(format!(
                    "pushed {} arc(s) across t{} ({} site), length change {}",
                    pushed.removed.len(),
                    pushed.tet,
                    pushed.site_type,
                    pushed.length_change()
                ))
                .line(text.trim_end().to_string()))
        }
    }
}

/// The diagram with the co-orientation to read it against, lifted to the
/// double cover when the base has none.
fn oriented_setting(
    s: &Structure,
    tri: &Triangulation,
    taut: &TautStructure,
    d: DiskDiagram,
) -> Result<(Setting, DiskDiagram), InputError> {
    let setting = setting(s, tri, taut)?;
    let d = match &setting {
        Setting::Base { .. } => d,
        Setting::Cover(cover) => lift_diagram(&d, cover, 0).map_err(invalid)?,
    };
    Ok((setting, d))
}

fn parts<'a>(setting: &'a Setting, tri: &'a Triangulation, taut: &'a TautStructure) -> (&'a Triangulation, &'a TautStructure, &'a Coorientation) {
    match setting {
        Setting::Base { coor, .. } => (tri, taut, coor),
        Setting::Cover(c) => (&c.tri, &c.taut, &c.coor),
    }
}

fn census_lines(d: &DiskDiagram, mut out: Report) -> Report {
    let census = region_census(d);
    for r in &census {
        out = out.line(format!(
            "r{} t{}: {} corners, {} cusps, index {}/4, {:?}{}",
            r.region,
            r.tet,
            r.corners,
            r.cusps,
            r.index_q,
            r.kind,
            if r.disk { "" } else { " (not a disk)" }
        ));
    }
    out.with("regions", census)
}

/// The pulled-back orientation disagrees somewhere: an audit failure.
fn orientation_failure(command: &'static str, e: DiskError) -> Report {
    Report::new(command, Status::Fail).with("orientation_error", e.to_string()).line(e.to_string())
}

fn disk_cmd(cmd: &DiskCmd) -> Result<Report, InputError> {
    match cmd {
        DiskCmd::Census { tri, diagram } => {
            let tri = input::tri(tri)?;
            let (d, _) = input::diagram(diagram, &tri)?;
            let total = audit_total_index(&d);
            let out = Report::new("disk census", Status::Pass).with("total_q", total.total_q);
            Ok(census_lines(&d, out).line(format!("total index {}/4", total.total_q)))
        }
        DiskCmd::Audit { structure: s, diagram } => {
            let (tri, taut) = structure(s)?;
            let (d, _) = input::diagram(diagram, &tri)?;
            let total = audit_total_index(&d);
            let minimality = audit_minimality(&d);
            let switches = audit_switches(&d, &tri, &taut);
            let status = Status::pass_if(total.pass && minimality.is_empty());
            let mut out = Report::new("disk audit", status)
                .with("total", total)
                .with("minimality", &minimality)
                .with("switches", &switches);
            out = census_lines(&d, out).line(format!(
                "total index {}/4 ({})",
                total.total_q,
                if total.pass { "ok" } else { "should be 4/4" }
            ));
            for v in &minimality {
                out = out.line(format!("Lemma Minimality: {}", v.advisory()));
            }
            for v in &switches {
                out = out.line(format!("switch: {}", serde_json::to_string(v).unwrap()));
            }
            if let Ok((setting, d)) = oriented_setting(s, &tri, &taut, d) {
                let (tri, _, coor) = parts(&setting, &tri, &taut);
                match orient_and_classify_bigons(&d, tri, Some(coor)) {
                    Ok((_, tags)) => {
                        for t in &tags {
                            out = out.line(format!("r{} at d{}: {:?}-bigon", t.region, t.arc, t.kind));
                        }
                        out = out.with("bigons", tags);
                    }
                    Err(e) => out = out.line(e.to_string()).with("orientation_error", e.to_string()),
                }
            }
            Ok(out)
        }
        DiskCmd::PushMin { structure: s, diagram, bigon, out: dest } => {
            let (tri, taut) = structure(s)?;
            let (d, _) = input::diagram(diagram, &tri)?;
            let (setting, d) = oriented_setting(s, &tri, &taut, d)?;
            let (tri, _, coor) = parts(&setting, &tri, &taut);
            let (d, tags) = match orient_and_classify_bigons(&d, tri, Some(coor)) {
                Ok(x) => x,
                Err(e) => return Ok(orientation_failure("disk push-min", e)),
            };
            let mins: Vec<usize> = tags.iter().filter(|t| t.kind == BigonKind::Min).map(|t| t.region).collect();
            let Some(region) = bigon.or(mins.first().copied()) else {
                return Ok(Report::new("disk push-min", Status::Fail).with("min_bigons", mins).line("no min-bigon"));
            };
            if !mins.contains(&region) {
                return Ok(Report::new("disk push-min", Status::Fail)
                    .with("min_bigons", mins)
                    .line(format!("r{region} is not a min-bigon")));
            }
            let pushed = push_min_bigon(&d, tri, region).map_err(invalid)?;
            let text = pushed.diagram.to_text();
            let mut out = Report::new("disk push-min", Status::Pass)
                .with("setting", setting.name())
                .with("removed_region", pushed.removed_region)
                .with("regions_before", pushed.regions_before)
                .with("regions_after", pushed.regions_after)
                .with("total_q", audit_total_index(&pushed.diagram).total_q)
                .with("boundary_loop", pushed.boundary_loop.as_ref().map(|l| l.to_text()))
                .line(format!("pushed r{region}: {} -> {} regions", pushed.regions_before, pushed.regions_after));
            match dest {
                Some(p) => {
                    input::write(p, &text)?;
                    out = out.line(format!("written to {}", p.display()));
                }
                None => out = out.line(text.trim_end().to_string()).with("diagram", &text),
            }
            Ok(out)
        }
        DiskCmd::Surgery { structure: s, diagram, bigon } => {
            let (tri, taut) = structure(s)?;
            let (d, _) = input::diagram(diagram, &tri)?;
            let (setting, d) = oriented_setting(s, &tri, &taut, d)?;
            let (tri, taut, coor) = parts(&setting, &tri, &taut);
            let d = match orient_and_classify_bigons(&d, tri, Some(coor)) {
                Ok((d, _)) => d,
                Err(e) => return Ok(orientation_failure("disk surgery", e)),
            };
            match max_bigon_surgery(&d, tri, taut, coor, *bigon) {
                Ok(rep) => Ok(Report::new("disk surgery", Status::Pass)
                    .line(format!(
                        "r{bigon}: right chain {} and left chain {} trigon(s); Q indices {}/4 and {}/4; S has {} corners, {} cusps, index {}/4",
                        rep.right.len(),
                        rep.left.len(),
                        rep.q_right.index_q,
                        rep.q_left.index_q,
                        rep.s_corners,
                        rep.s_cusps,
                        rep.s_index_q
                    ))
                    .with("report", rep)),
                Err(DiskError::Claim { claim, detail }) => Ok(Report::new("disk surgery", Status::Fail)
                    .with("claim", claim)
                    .with("detail", &detail)
                    .line(format!("Claim {claim} fails: {detail}"))),
                Err(e) => Err(invalid(e)),
            }
        }
        DiskCmd::Refute { structure: s, diagram, kind, normal } => refute(s, diagram, *kind, normal.as_deref()),
    }
}

fn refute(s: &Structure, diagram: &Path, kind: Kind, normal: Option<&Path>) -> Result<Report, InputError> {
    let (tri, taut) = structure(s)?;
    let (d, boundary) = input::diagram(diagram, &tri)?;
    let cert = match kind {
        Kind::Vertical => {
            let ctx = RefuteContext { tri: &tri, taut: &taut, coor: None, normal: None };
            refute_certificate(&d, LoopKind::Vertical, &ctx).map_err(invalid)?
        }
        Kind::Normal => {
            let path = normal
                .map(Path::to_path_buf)
                .or(boundary)
                .ok_or_else(|| InputError::Invalid("a normal loop is required (--normal or `boundary loop=`)".into()))?;
            let gamma = input::normal(&path)?;
            match setting(s, &tri, &taut)? {
                Setting::Base { coor, .. } => {
                    let ctx = RefuteContext { tri: &tri, taut: &taut, coor: Some(&coor), normal: Some(&gamma) };
                    refute_certificate(&d, LoopKind::Normal, &ctx).map_err(invalid)?
                }
                Setting::Cover(cover) => {
                    let up = lift_to_cover(&tri, &taut, &cover, &gamma).map_err(invalid)?;
                    let deck = NormalLoop { arcs: up.arcs.iter().map(|a| NormalArc { tet: a.tet ^ 1, ..*a }).collect() };
                    let ctx_for = |g| RefuteContext { tri: &cover.tri, taut: &cover.taut, coor: Some(&cover.coor), normal: Some(g) };
                    let lifted = lift_diagram(&d, &cover, 0).map_err(invalid)?;
                    let mut cert = refute_certificate(&lifted, LoopKind::Normal, &ctx_for(&up)).map_err(invalid)?;
                    if matches!(&cert.verdict, Verdict::Accepted { audit, .. } if audit == "raise_loop") {
                        cert = refute_certificate(&lifted, LoopKind::Normal, &ctx_for(&deck)).map_err(invalid)?;
                    }
                    cert.transcript.insert(0, "Not transverse taut: diagram and loop lifted to the double cover".into());
                    cert
                }
            }
        }
    };
    let status = if cert.is_refuted() { Status::Refuted } else { Status::Accepted };
    let mut out = Report::new("disk refute", status);
    // the verdict is the last transcript line; the argument leading to it is detail
    if let Some((verdict, argument)) = cert.transcript.split_last() {
        out.detail = argument.to_vec();
        out = out.line(verdict.clone());
    }
    Ok(out.with("certificate", cert))
}

fn corpus_generate(out: &Path, seed: u64, max_normal: usize) -> Result<Report, InputError> {
    let seed = seed_from_env(seed);
    let bounds = CorpusBounds::default();
    let corpus = build_corpus(seed, &bounds);
    let mut tris = Vec::new();
    for ct in &corpus.tris {
        let file = format!("tris/{}.tri", ct.name);
        input::write(&out.join(&file), &ct.tri.to_text())?;
        let mut tauts = Vec::new();
        for (k, (taut, coor)) in ct.tauts.iter().zip(&ct.coors).enumerate() {
            let taut_file = format!("tris/{}.{k}.taut", ct.name);
            input::write(&out.join(&taut_file), &taut.to_text())?;
            let coor_file = match coor {
                Some(c) => {
                    let f = format!("tris/{}.{k}.coor", ct.name);
                    input::write(&out.join(&f), &c.to_text(&ct.tri))?;
                    Some(f)
                }
                None => None,
            };
            tauts.push(json!({ "taut": taut_file, "coor": coor_file }));
        }
        tris.push(json!({ "name": ct.name, "tri": file, "tauts": tauts }));
    }
    let mut loops = Vec::new();
    for (i, (t, k, l)) in corpus.loops.iter().enumerate() {
        let file = format!("loops/l{i:04}.loop");
        input::write(&out.join(&file), &l.to_text())?;
        loops.push(json!({ "file": file, "tri": t, "taut": k }));
    }
    let step = corpus.normal.len().div_ceil(max_normal.max(1)).max(1);
    let normal: Vec<_> = corpus.normal.iter().step_by(step).take(max_normal).collect();
    let groups = [
        ("general", corpus.diagrams.iter().collect::<Vec<_>>()),
        ("vertical", corpus.vertical.iter().collect()),
        ("normal", normal),
    ];
    let mut diagrams = Vec::new();
    for (kind, list) in &groups {
        for (i, cd) in list.iter().enumerate() {
            let mut d = cd.diagram.clone();
            if let Some(l) = &cd.normal {
                let loop_file = format!("loops/{kind}_{i:05}.loop");
                input::write(&out.join(&loop_file), &l.to_text())?;
                d.boundary = Some(format!("../{loop_file}"));
            }
            let file = format!("diagrams/{kind}_{i:05}.disk");
            input::write(&out.join(&file), &d.to_text())?;
            diagrams.push(json!({ "file": file, "kind": kind, "tri": cd.tri, "taut": cd.taut }));
        }
    }
    let manifest = json!({
        "seed": seed,
        "bounds": bounds,
        "tris": tris,
        "loops": loops,
        "diagrams": diagrams,
        "normal_generated": corpus.normal.len(),
    });
    input::write(&out.join("manifest.json"), &(serde_json::to_string_pretty(&manifest).unwrap() + "\n"))?;
    let counts = [corpus.diagrams.len(), corpus.vertical.len(), groups[2].1.len()];
    Ok(Report::new("corpus generate", Status::Pass)
        .with("seed", seed)
        .with("triangulations", corpus.tris.len())
        .with("loops", corpus.loops.len())
        .with("diagrams", counts)
        .line(format!(
            "seed {seed}: {} triangulations, {} loops, {} general, {} vertical and {} normal diagrams (of {}) in {}",
            corpus.tris.len(),
            corpus.loops.len(),
            counts[0],
            counts[1],
            counts[2],
            corpus.normal.len(),
            out.display()
        )))
}
