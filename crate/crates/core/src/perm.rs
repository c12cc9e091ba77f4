//! Permutations of the four vertex labels `{0,1,2,3}` of a tetrahedron.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A permutation of `{0,1,2,3}`, stored as the image tuple `(p(0),p(1),p(2),p(3))`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its image tuple. Returns `None` unless the
    /// images are exactly `{0,1,2,3}` in some order.
    pub fn new(images: [u8; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    /// The transposition swapping `a` and `b`.
    pub fn swap(a: u8, b: u8) -> Perm4 {
        let mut im = [0u8, 1, 2, 3];
        im.swap(a as usize, b as usize);
        Perm4(im)
    }

    /// Parses a 4-character word like `"1203"` (the images of 0,1,2,3).
    pub fn parse(word: &str) -> Option<Perm4> {
        let bytes = word.as_bytes();
        if bytes.len() != 4 {
            return None;
        }
        let mut im = [0u8; 4];
        for (i, &b) in bytes.iter().enumerate() {
            if !(b'0'..=b'3').contains(&b) {
                return None;
            }
            im[i] = b - b'0';
        }
        Perm4::new(im)
    }

    #[inline]
    pub fn apply(&self, v: u8) -> u8 {
        self.0[v as usize]
    }

    /// Composition `self ∘ other` (first `other`, then `self`).
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        Perm4([
            self.apply(other.0[0]),
            self.apply(other.0[1]),
            self.apply(other.0[2]),
            self.apply(other.0[3]),
        ])
    }

    pub fn inverse(&self) -> Perm4 {
        let mut im = [0u8; 4];
        for v in 0..4u8 {
            im[self.apply(v) as usize] = v;
        }
        Perm4(im)
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i8 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }

    /// The 4-character word form, e.g. `"1203"`.
    pub fn word(&self) -> String {
        self.0.iter().map(|d| (b'0' + d) as char).collect()
    }

    /// All 24 permutations, in lexicographic order of their image tuples.
    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if let Some(p) = Perm4::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm4({})", self.word())
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}
