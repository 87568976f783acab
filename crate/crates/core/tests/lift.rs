use tauttrack::corpus::{build_corpus, CorpusBounds};
use tauttrack::disk::{audit_switches, audit_total_index, lift_diagram};
use tauttrack::loops::lift_to_cover;
use tauttrack::transverse::{build_double_cover, Labelling};

#[test]
fn diagrams_lift_to_the_double_cover() {
    let bounds = CorpusBounds { target_diagrams: 200, ..CorpusBounds::default() };
    let corpus = build_corpus(7, &bounds);
    let mut checked = 0;
    for cd in corpus.normal.iter().step_by(97).chain(corpus.diagrams.iter().step_by(13)) {
        let ct = &corpus.tris[cd.tri];
        let taut = &ct.tauts[cd.taut];
        let cover = build_double_cover(&ct.tri, taut, &Labelling::default_for(taut)).unwrap();
        let base = cd.diagram.boundary_dual_loop().unwrap();
        for first in 0..2 {
            let up = match lift_diagram(&cd.diagram, &cover, first) {
                Ok(up) => up,
                Err(e) => {
                    // only diagrams whose switches do not sit at edges can fail to lift
                    assert!(!audit_switches(&cd.diagram, &ct.tri, taut).is_empty(), "{e}");
                    continue;
                }
            };
            assert_eq!(up.regions[0].tet, 2 * cd.diagram.regions[0].tet + first);
            assert_eq!(audit_total_index(&up).total_q, audit_total_index(&cd.diagram).total_q);
            let lifted = up.boundary_dual_loop().unwrap();
            assert_eq!(lifted.steps.len(), base.steps.len());
            for (a, b) in lifted.steps.iter().zip(&base.steps) {
                assert_eq!((a.tet / 2, a.face_in, a.face_out), (b.tet, b.face_in, b.face_out));
            }
            assert_eq!(lifted.check_linkage(&cover.tri), Ok(()));
        }
        if let Some(normal) = &cd.normal {
            let up = lift_to_cover(&ct.tri, taut, &cover, normal).unwrap();
            assert_eq!(up.arcs.len(), normal.arcs.len(), "the boundary bounds a disk, so the loop lifts closed");
        }
        checked += 1;
    }
    assert!(checked > 20, "{checked}");
}
