use std::collections::VecDeque;

use super::{build_diagram, DiskDiagram, DiskError, Token};
use crate::transverse::CoverTriangulation;
use crate::tri::FaceSlot;

/// Lifts a diagram to the double cover, putting `first_copy` over region 0.
/// The disk is simply connected, so the copy of every other region is forced
/// by the gluings across its branches.
pub fn lift_diagram(d: &DiskDiagram, cover: &CoverTriangulation, first_copy: usize) -> Result<DiskDiagram, DiskError> {
    let n = d.regions.len();
    let mut copy: Vec<Option<usize>> = vec![None; n];
    copy[0] = Some(first_copy);
    let mut queue = VecDeque::from([0]);
    while let Some(r) = queue.pop_front() {
        for (b, _) in d.branches.iter().enumerate() {
            for plus in [true, false] {
                if d.region_at(Token::Side { branch: b, plus }) != r {
                    continue;
                }
                let here = d.slot(b, plus);
                let up = cover.tri.gluing(2 * here.tet + copy[r].unwrap(), here.face).tet;
                let other = d.region_at(Token::Side { branch: b, plus: !plus });
                match copy[other] {
                    None => {
                        copy[other] = Some(up % 2);
                        queue.push_back(other);
                    }
                    Some(c) if c != up % 2 => {
                        return Err(DiskError::Label { branch: b, msg: "the diagram does not lift consistently".into() })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let mut doc = d.doc();
    for (r, region) in doc.regions.iter_mut().enumerate() {
        let c = copy[r].ok_or(DiskError::WrongRegion { region: r, expected: "a region meeting a branch" })?;
        region.tet = 2 * region.tet + c;
    }
    for (b, branch) in doc.branches.iter_mut().enumerate() {
        let here = d.slot(b, true);
        let r = d.region_at(Token::Side { branch: b, plus: true });
        branch.face = cover.tri.face_class_of(FaceSlot { tet: 2 * here.tet + copy[r].unwrap(), face: here.face }).0;
    }
    build_diagram(doc, &cover.tri)
}
