//! Small ideal triangulations: a fixed figure-eight table plus seeded searches
//! over random gluings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::perm::Perm4;
use crate::tri::{validate_triangulation, FaceSlot, Gluing, GluingTable, Triangulation};
use crate::unionfind::UnionFind;

/// The two-tetrahedron triangulation of the figure-eight knot complement.
pub const FIGURE_EIGHT: &str = "\
# figure-eight knot complement
tets 2
glue 0 0 -> 1 0132
glue 0 1 -> 1 1230
glue 0 2 -> 1 2310
glue 0 3 -> 1 2103
glue 1 0 -> 0 0132
glue 1 1 -> 0 3201
glue 1 2 -> 0 3012
glue 1 3 -> 0 2103
";

pub fn figure_eight() -> Triangulation {
    Triangulation::parse(FIGURE_EIGHT).expect("built-in table is valid")
}

/// Ideal in the sense used here: fully glued, connected, every vertex link of
/// Euler characteristic zero, no edge identified with itself in reverse.
pub fn is_ideal(table: &GluingTable) -> bool {
    validate_triangulation(table).is_valid() && is_connected(table)
}

fn is_connected(table: &GluingTable) -> bool {
    let n = table.tet_count();
    let mut uf = UnionFind::new(n);
    for (t, faces) in table.entries.iter().enumerate() {
        for g in faces.iter().flatten() {
            uf.union(t, g.tet);
        }
    }
    n == 0 || uf.component_count() == 1
}

/// Every ideal one-tetrahedron triangulation, in a fixed order (duplicates up to
/// relabelling are kept).
pub fn one_tetrahedron() -> Vec<Triangulation> {
    let pairings: [[(u8, u8); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let perms: Vec<Perm4> = Perm4::all().collect();
    let mut out = Vec::new();
    for pairing in pairings {
        let [(a, b), (c, d)] = pairing;
        for &p in perms.iter().filter(|p| p.apply(a) == b) {
            for &q in perms.iter().filter(|q| q.apply(c) == d) {
                let mut table = GluingTable::new(1);
                table.entries[0][a as usize] = Some(Gluing { tet: 0, perm: p });
                table.entries[0][b as usize] = Some(Gluing { tet: 0, perm: p.inverse() });
                table.entries[0][c as usize] = Some(Gluing { tet: 0, perm: q });
                table.entries[0][d as usize] = Some(Gluing { tet: 0, perm: q.inverse() });
                if is_ideal(&table) {
                    out.push(Triangulation::from_table(table).unwrap());
                }
            }
        }
    }
    out
}

/// A uniformly random complete gluing of `n` tetrahedra (not necessarily ideal).
pub fn random_table<R: Rng>(n: usize, rng: &mut R) -> GluingTable {
    let mut slots: Vec<FaceSlot> = (0..n)
        .flat_map(|tet| (0..4u8).map(move |face| FaceSlot { tet, face }))
        .collect();
    slots.shuffle(rng);
    let perms: Vec<Perm4> = Perm4::all().collect();
    let mut table = GluingTable::new(n);
    for pair in slots.chunks(2) {
        let (x, y) = (pair[0], pair[1]);
        let candidates: Vec<Perm4> = perms.iter().copied().filter(|p| p.apply(x.face) == y.face).collect();
        let p = *candidates.choose(rng).unwrap();
        table.entries[x.tet][x.face as usize] = Some(Gluing { tet: y.tet, perm: p });
        table.entries[y.tet][y.face as usize] = Some(Gluing { tet: x.tet, perm: p.inverse() });
    }
    table
}

/// Up to `count` distinct ideal triangulations with `n` tetrahedra, found by
/// seeded rejection sampling.
pub fn random_ideal(seed: u64, n: usize, count: usize, max_attempts: usize) -> Vec<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut out: Vec<Triangulation> = Vec::new();
    for _ in 0..max_attempts {
        if out.len() >= count {
            break;
        }
        let table = random_table(n, &mut rng);
        if is_ideal(&table) && !out.iter().any(|t| t.table() == &table) {
            out.push(Triangulation::from_table(table).unwrap());
        }
    }
    out
}
