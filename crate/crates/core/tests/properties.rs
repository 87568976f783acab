use proptest::prelude::*;

use tauttrack::census;
use tauttrack::corpus::{label_search, random_normal_loop, skeletons, LoopFilter};
use tauttrack::disk::{
    audit_total_index, build_diagram, orient_and_classify_bigons, push_min_bigon, BigonKind, DiagramDoc,
};
use tauttrack::loops::{check_normal, is_rotation, lift_to_cover, push_sites, push_up, raise_loop};
use tauttrack::taut::{enumerate_taut, verify_taut, PiPair, TautStructure};
use tauttrack::transverse::{build_double_cover, solve_parity, verify_coorientation, Labelling};
use tauttrack::tri::Triangulation;

/// An ideal triangulation with 1 to 3 tetrahedra, or none if sampling missed.
fn sample(seed: u64, n: usize) -> Option<Triangulation> {
    if n == 1 {
        let all = census::one_tetrahedron();
        return Some(all[seed as usize % all.len()].clone());
    }
    census::random_ideal(seed, n, 1, 400).pop()
}

fn brute_force(tri: &Triangulation) -> Vec<TautStructure> {
    let all = [PiPair::P01_23, PiPair::P02_13, PiPair::P03_12];
    let n = tri.tet_count();
    let mut out: Vec<_> = (0..3usize.pow(n as u32))
        .map(|code| TautStructure::new((0..n).map(|i| all[code / 3usize.pow(i as u32) % 3]).collect()))
        .filter(|c| verify_taut(tri, c).unwrap().is_empty())
        .collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_degrees_sum_to_six_per_tetrahedron(seed in any::<u64>(), n in 1usize..=3) {
        let Some(tri) = sample(seed, n) else { return Ok(()) };
        let total: usize = tri.edge_classes().iter().map(|c| c.degree()).sum();
        prop_assert_eq!(total, 6 * n);
        let again = Triangulation::parse(&tri.to_text()).unwrap();
        prop_assert_eq!(again.table(), tri.table());
    }

    #[test]
    fn enumeration_matches_exhaustive_filter(seed in any::<u64>(), n in 1usize..=3) {
        let Some(tri) = sample(seed, n) else { return Ok(()) };
        let mut got = enumerate_taut(&tri);
        got.sort();
        prop_assert_eq!(got, brute_force(&tri));
    }

    #[test]
    fn cover_splits_exactly_when_parity_solves(seed in any::<u64>(), n in 1usize..=3) {
        let Some(tri) = sample(seed, n) else { return Ok(()) };
        for taut in enumerate_taut(&tri) {
            let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
            let parity = solve_parity(&tri, &taut);
            prop_assert_eq!(cover.component_count() == 2, parity.is_some());
            prop_assert!(verify_coorientation(&cover.tri, &cover.taut, &cover.coor).unwrap().is_empty());
            if let Some(c) = parity {
                prop_assert!(verify_coorientation(&tri, &taut, &c).unwrap().is_empty());
                prop_assert!(verify_coorientation(&tri, &taut, &c.flipped()).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn raising_and_pushing_keep_the_loop(seed in any::<u64>(), n in 1usize..=3, len in 2usize..12) {
        let Some(tri) = sample(seed, n) else { return Ok(()) };
        for taut in enumerate_taut(&tri) {
            let Some(normal) = random_normal_loop(&tri, &taut, seed, len) else { continue };
            let cover = build_double_cover(&tri, &taut, &Labelling::default_for(&taut)).unwrap();
            let up = lift_to_cover(&tri, &taut, &cover, &normal).unwrap();
            prop_assert!(check_normal(&cover.tri, &cover.taut, &up).unwrap().is_empty());
            let Some(coor) = solve_parity(&tri, &taut) else { continue };
            let curve = raise_loop(&tri, &taut, &coor, &normal).unwrap();
            prop_assert!(is_rotation(&curve.lowered_arcs(), &normal.arcs));
            prop_assert_eq!(curve.as_dual_loop().check_linkage(&tri), Ok(()));
            for site in push_sites(&curve) {
                let p = push_up(&tri, &taut, &coor, &normal, site).unwrap();
                prop_assert_eq!(
                    p.result.arcs.len() as i64,
                    normal.arcs.len() as i64 + p.replacement.len() as i64 - p.removed.len() as i64
                );
                prop_assert!(check_normal(&tri, &taut, &p.result).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn labelled_diagrams_have_total_index_four(stops in 2usize..=6, pick in any::<prop::sample::Index>(), which in 0usize..3) {
        let tri = census::figure_eight();
        let taut = enumerate_taut(&tri).remove(which);
        let skel = skeletons(stops, 6);
        prop_assume!(!skel.is_empty());
        let doc = &skel[pick.index(skel.len())];
        let coor = solve_parity(&tri, &taut);
        for d in label_search(doc, &tri, &taut, LoopFilter::Any, 2) {
            prop_assert_eq!(audit_total_index(&d).total_q, 4);
            let again = build_diagram(DiagramDoc::parse(&d.to_text()).unwrap(), &tri).unwrap();
            prop_assert_eq!(&again, &d);
            let Some(coor) = &coor else { continue };
            let Ok((oriented, tags)) = orient_and_classify_bigons(&d, &tri, Some(coor)) else { continue };
            for tag in tags.iter().filter(|t| t.kind == BigonKind::Min) {
                let pushed = push_min_bigon(&oriented, &tri, tag.region).unwrap();
                prop_assert_eq!(pushed.regions_after + 1, pushed.regions_before);
                prop_assert_eq!(audit_total_index(&pushed.diagram).total_q, 4);
            }
        }
    }
}
