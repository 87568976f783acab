//! Permutations of the four vertex labels of a model tetrahedron.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A permutation of `{0, 1, 2, 3}`, stored as the image of each label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its images, or `None` if `images` is not a bijection.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &v in &images {
            if v > 3 || seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
        }
        Some(Perm4(images))
    }

    #[inline]
    pub fn apply(self, v: u8) -> u8 {
        self.0[v as usize]
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    pub fn inverse(self) -> Self {
        let mut out = [0u8; 4];
        for (i, &v) in self.0.iter().enumerate() {
            out[v as usize] = i as u8;
        }
        Perm4(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm4) -> Self {
        Perm4([0, 1, 2, 3].map(|v| self.apply(other.apply(v))))
    }

    /// True for even permutations.
    pub fn is_even(self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 0
    }

    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..24u8).map(|mut code| {
            let mut pool = vec![0u8, 1, 2, 3];
            let mut out = [0u8; 4];
            for (slot, radix) in [6u8, 2, 1, 1].iter().enumerate() {
                let idx = code / radix;
                code %= radix;
                out[slot] = pool.remove(idx as usize);
            }
            Perm4(out)
        })
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm4({self})")
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.0 {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Perm4 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 4 {
            return Err(format!("permutation `{s}` must have four digits"));
        }
        let mut images = [0u8; 4];
        for (i, b) in bytes.iter().enumerate() {
            if !(b'0'..=b'3').contains(b) {
                return Err(format!("permutation `{s}` has a digit outside 0..3"));
            }
            images[i] = b - b'0';
        }
        Perm4::new(images).ok_or_else(|| format!("`{s}` is not a permutation"))
    }
}

/// The six model edges of a tetrahedron, as sorted vertex pairs, in lexicographic order.
pub const MODEL_EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the model edge `{a, b}` in [`MODEL_EDGES`].
pub fn edge_index(a: u8, b: u8) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    MODEL_EDGES
        .iter()
        .position(|&e| e == (a, b))
        .expect("distinct vertex labels")
}

/// The model edge opposite `{a, b}`.
pub fn opposite_edge(a: u8, b: u8) -> (u8, u8) {
    let mut rest = (0..4u8).filter(|&v| v != a && v != b);
    let c = rest.next().unwrap();
    let d = rest.next().unwrap();
    (c, d)
}

/// The two faces containing model edge `{a, b}` (the faces opposite the other two vertices).
pub fn faces_of_edge(a: u8, b: u8) -> (u8, u8) {
    opposite_edge(a, b)
}

/// The model edge shared by two distinct faces.
pub fn common_edge(f: u8, g: u8) -> (u8, u8) {
    debug_assert_ne!(f, g);
    opposite_edge(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_perms_distinct() {
        let mut v: Vec<_> = Perm4::all().collect();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), 24);
        assert_eq!(Perm4::all().filter(|p| p.is_even()).count(), 12);
    }

    #[test]
    fn inverse_roundtrip() {
        for p in Perm4::all() {
            assert_eq!(p.compose(p.inverse()), Perm4::IDENTITY);
            assert_eq!(p.to_string().parse::<Perm4>().unwrap(), p);
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!("0012".parse::<Perm4>().is_err());
        assert!("0124".parse::<Perm4>().is_err());
        assert!("012".parse::<Perm4>().is_err());
    }

    #[test]
    fn edge_helpers() {
        assert_eq!(opposite_edge(0, 1), (2, 3));
        assert_eq!(common_edge(2, 3), (0, 1));
        assert_eq!(edge_index(3, 1), 4);
    }
}
