//! The dual spine of a triangulation: a presentation of the fundamental
//! group and explicit dual loops.
//!
//! The dual graph has one node per tetrahedron and one arc per interior face
//! pair. Collapsing a spanning tree presents the fundamental group with one
//! generator per non-tree pair and one relator per interior edge class (the
//! word read off by walking the fan of tetrahedra around the edge). Loops are
//! also materialized as step sequences `(tet, face_in, face_out)` through
//! face centers, which is the form intersection pairings consume.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::Perm4;
use crate::tri::Triangulation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpineError {
    #[error("triangulation is not connected")]
    Disconnected,
}

/// An interior face pair `(i, f) <-> (j, g)` with the gluing permutation of
/// the `(i, f)` side, in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacePair {
    pub from: (usize, u8),
    pub to: (usize, u8),
    pub perm: Perm4,
}

/// A word in the spine generators; each letter is `(generator, exponent)`
/// with exponent `+1` or `-1`.
pub type Word = Vec<(usize, i8)>;

/// One step of a dual loop: enter tetrahedron `tet` through the center of
/// face `face_in` and leave through the center of `face_out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopStep {
    pub tet: usize,
    pub face_in: u8,
    pub face_out: u8,
}

/// Fundamental group presentation from the dual spine.
#[derive(Debug, Clone)]
pub struct FundamentalPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
    pub basepoint: usize,
}

impl FundamentalPresentation {
    /// Exponent-sum matrix of the relators, one column per relator.
    pub fn relator_matrix(&self) -> crate::snf::Mat {
        let mut m = crate::snf::Mat::zeros(self.generators, self.relators.len());
        for (c, word) in self.relators.iter().enumerate() {
            for &(g, e) in word {
                m[(g, c)] += e as i128;
            }
        }
        m
    }

    /// `(rank, torsion)` of the abelianization.
    pub fn abelianization(&self) -> (usize, Vec<i128>) {
        let s = crate::snf::smith(&self.relator_matrix());
        let torsion: Vec<i128> = s.invariant_factors().into_iter().filter(|&d| d > 1).collect();
        (self.generators - s.rank, torsion)
    }
}

/// The dual spine with everything downstream modules consume: the face
/// pairs, the spanning tree, generator labels, and loop realizations.
#[derive(Debug, Clone)]
pub struct DualSpine {
    pub pairs: Vec<FacePair>,
    /// Index into `pairs` for each generator.
    pub generator_pairs: Vec<usize>,
    /// `Some(generator)` for non-tree pairs.
    pub generator_of_pair: Vec<Option<usize>>,
    /// Per tetrahedron: `(parent tet, pair index, direction)` on the tree
    /// path toward the basepoint; `None` at the basepoint.
    tree_parent: Vec<Option<(usize, usize, i8)>>,
    pub basepoint: usize,
    /// One relator word per closed edge fan.
    pub relators: Vec<Word>,
    /// The same relators as face-center step loops.
    pub relator_loops: Vec<Vec<LoopStep>>,
}

/// Crossing sequence representation of a loop: `(pair index, direction)`,
/// direction `+1` meaning `from -> to`.
type Crossings = Vec<(usize, i8)>;

pub fn dual_spine(tri: &Triangulation) -> Result<DualSpine, SpineError> {
    let t = tri.t();
    let pairs: Vec<FacePair> = tri
        .interior_faces()
        .map(|((i, f), g)| FacePair {
            from: (i, f),
            to: (g.tet, g.perm.apply(f)),
            perm: g.perm,
        })
        .collect();

    // BFS spanning tree of the dual graph from tetrahedron 0.
    let mut tree_parent: Vec<Option<(usize, usize, i8)>> = vec![None; t];
    let mut seen = vec![false; t];
    let mut in_tree = vec![false; pairs.len()];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (idx, p) in pairs.iter().enumerate() {
            let (a, b) = (p.from.0, p.to.0);
            let next = if a == i && !seen[b] {
                Some((b, 1i8))
            } else if b == i && !seen[a] {
                Some((a, -1i8))
            } else {
                None
            };
            if let Some((j, d)) = next {
                seen[j] = true;
                in_tree[idx] = true;
                tree_parent[j] = Some((i, idx, d));
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(SpineError::Disconnected);
    }

    let mut generator_of_pair = vec![None; pairs.len()];
    let mut generator_pairs = Vec::new();
    for (idx, &in_t) in in_tree.iter().enumerate() {
        if !in_t {
            generator_of_pair[idx] = Some(generator_pairs.len());
            generator_pairs.push(idx);
        }
    }

    let (relators, relator_loops) = edge_relators(tri, &pairs, &generator_of_pair);

    Ok(DualSpine {
        pairs,
        generator_pairs,
        generator_of_pair,
        tree_parent,
        basepoint: 0,
        relators,
        relator_loops,
    })
}

/// Dual-spine presentation of the fundamental group.
pub fn presentation(tri: &Triangulation) -> Result<FundamentalPresentation, SpineError> {
    let spine = dual_spine(tri)?;
    Ok(FundamentalPresentation {
        generators: spine.generator_pairs.len(),
        relators: spine.relators.clone(),
        basepoint: spine.basepoint,
    })
}

impl DualSpine {
    /// Tree crossings from the basepoint down to tetrahedron `i`.
    fn path_from_root(&self, mut i: usize) -> Crossings {
        let mut up = Vec::new();
        while let Some((parent, idx, d)) = self.tree_parent[i] {
            up.push((idx, d));
            i = parent;
        }
        up.reverse();
        up
    }

    /// The loop realizing generator `g`: down the tree to the pair's source,
    /// across it, and back. The shared tree prefix is cancelled, so the loop
    /// is based at the meet of the two endpoints and never backtracks
    /// through a face; pairings downstream are conjugation-invariant, so the
    /// base shift is immaterial.
    pub fn generator_loop(&self, g: usize) -> Vec<LoopStep> {
        let idx = self.generator_pairs[g];
        let p = &self.pairs[idx];
        let mut down = self.path_from_root(p.from.0);
        let mut back = self.path_from_root(p.to.0);
        let common = down
            .iter()
            .zip(back.iter())
            .take_while(|(a, b)| a == b)
            .count();
        down.drain(..common);
        back.drain(..common);
        back.reverse();
        for c in &mut back {
            c.1 = -c.1;
        }
        let mut crossings = down;
        crossings.push((idx, 1));
        crossings.extend(back);
        self.crossings_to_steps(&crossings)
    }

    pub fn generator_loops(&self) -> Vec<Vec<LoopStep>> {
        (0..self.generator_pairs.len()).map(|g| self.generator_loop(g)).collect()
    }

    /// Convert a closed crossing sequence through the basepoint (or any
    /// closed sequence) into face-center steps.
    fn crossings_to_steps(&self, crossings: &Crossings) -> Vec<LoopStep> {
        steps_of_closed_crossings(&self.pairs, crossings)
    }
}

/// Walk every edge fan; closed fans yield one relator each (as a word in the
/// generators, tree crossings dropped) plus the same loop in step form.
fn edge_relators(
    tri: &Triangulation,
    pairs: &[FacePair],
    generator_of_pair: &[Option<usize>],
) -> (Vec<Word>, Vec<Vec<LoopStep>>) {
    let mut pair_of_face = std::collections::HashMap::new();
    for (idx, p) in pairs.iter().enumerate() {
        pair_of_face.insert(p.from, (idx, 1i8));
        pair_of_face.insert(p.to, (idx, -1i8));
    }

    let mut words = Vec::new();
    let mut loops = Vec::new();
    let mut done = std::collections::HashSet::new();
    for i0 in 0..tri.t() {
        for a0 in 0..4u8 {
            for b0 in (a0 + 1)..4 {
                if done.contains(&(i0, a0, b0)) {
                    continue;
                }
                let others: Vec<u8> = (0..4).filter(|&x| x != a0 && x != b0).collect();
                let mut crossings: Crossings = Vec::new();
                let mut visited = vec![(i0, a0, b0)];
                let (mut cur, mut exit_face) = ((i0, a0, b0), others[0]);
                let closed = loop {
                    let (ci, ca, cb) = cur;
                    let Some(gl) = tri.gluing(ci, exit_face) else {
                        break false;
                    };
                    crossings.push(pair_of_face[&(ci, exit_face)]);
                    let p = gl.perm;
                    let (na, nb) = (p.apply(ca), p.apply(cb));
                    let entered = p.apply(exit_face);
                    let next_exit = (0..4)
                        .find(|&x| x != na && x != nb && x != entered)
                        .unwrap();
                    cur = (gl.tet, na, nb);
                    exit_face = next_exit;
                    if cur == (i0, a0, b0) && exit_face == others[0] {
                        break true;
                    }
                    visited.push(cur);
                    assert!(crossings.len() <= 24 * tri.t() + 4);
                };
                if !closed {
                    // Walk the other way so the whole open fan is marked.
                    let (mut cur, mut exit_face) = ((i0, a0, b0), others[1]);
                    while let Some(gl) = tri.gluing(cur.0, exit_face) {
                        let p = gl.perm;
                        let (na, nb) = (p.apply(cur.1), p.apply(cur.2));
                        let entered = p.apply(exit_face);
                        exit_face = (0..4)
                            .find(|&x| x != na && x != nb && x != entered)
                            .unwrap();
                        cur = (gl.tet, na, nb);
                        visited.push(cur);
                        assert!(visited.len() <= 24 * tri.t() + 4);
                    }
                }
                for &(ci, ca, cb) in &visited {
                    done.insert((ci, ca.min(cb), ca.max(cb)));
                }
                if closed && !crossings.is_empty() {
                    let word: Word = crossings
                        .iter()
                        .filter_map(|&(idx, d)| generator_of_pair[idx].map(|g| (g, d)))
                        .collect();
                    words.push(word);
                    loops.push(steps_of_closed_crossings(pairs, &crossings));
                }
            }
        }
    }
    (words, loops)
}

fn steps_of_closed_crossings(pairs: &[FacePair], crossings: &Crossings) -> Vec<LoopStep> {
    let faces: Vec<(usize, u8, usize, u8)> = crossings
        .iter()
        .map(|&(idx, d)| {
            let p = &pairs[idx];
            if d == 1 {
                (p.from.0, p.from.1, p.to.0, p.to.1)
            } else {
                (p.to.0, p.to.1, p.from.0, p.from.1)
            }
        })
        .collect();
    let n = faces.len();
    (0..n)
        .map(|k| {
            let (_, _, tet, face_in) = faces[k];
            let (next_tet, face_out, _, _) = faces[(k + 1) % n];
            assert_eq!(tet, next_tet);
            LoopStep { tet, face_in, face_out }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology;
    use crate::tri::Triangulation;

    const BALL: &str = include_str!("../../../corpus/ball.tri");
    const SOLID_TORUS: &str = include_str!("../../../corpus/solidtorus.tri");
    const FIG8_IDEAL: &str = include_str!("../../../corpus/fig8_ideal.tri");
    const FIG8: &str = include_str!("../../../corpus/fig8.tri");
    const TREFOIL: &str = include_str!("../../../corpus/trefoil.tri");
    const LENS4: &str = include_str!("../../../corpus/lens4.tri");
    const LENS5: &str = include_str!("../../../corpus/lens5.tri");

    #[test]
    fn generator_counts() {
        let cases = [(BALL, 0), (SOLID_TORUS, 1), (FIG8_IDEAL, 3)];
        for (text, gens) in cases {
            let tri = Triangulation::from_text(text).unwrap();
            let p = presentation(&tri).unwrap();
            assert_eq!(p.generators, gens);
            assert_eq!(
                p.generators,
                tri.interior_faces().count() - (tri.t() - 1)
            );
        }
    }

    #[test]
    fn abelianization_matches_homology() {
        for text in [BALL, SOLID_TORUS, FIG8_IDEAL, FIG8, TREFOIL, LENS4, LENS5] {
            let tri = Triangulation::from_text(text).unwrap();
            let p = presentation(&tri).unwrap();
            let (rank, torsion) = p.abelianization();
            let h1 = homology(&tri, 1, false);
            assert_eq!(rank, h1.rank, "rank mismatch");
            assert_eq!(torsion, h1.torsion, "torsion mismatch");
        }
    }

    #[test]
    fn disconnected_is_rejected() {
        let tri = Triangulation::from_text("tet 0: - - - -\ntet 1: - - - -").unwrap();
        assert_eq!(presentation(&tri).unwrap_err(), SpineError::Disconnected);
    }

    #[test]
    fn loops_chain_and_close() {
        for text in [SOLID_TORUS, FIG8_IDEAL, FIG8, TREFOIL, LENS4] {
            let tri = Triangulation::from_text(text).unwrap();
            let spine = dual_spine(&tri).unwrap();
            let all: Vec<Vec<LoopStep>> = spine
                .generator_loops()
                .into_iter()
                .chain(spine.relator_loops.iter().cloned())
                .collect();
            for steps in all {
                assert!(!steps.is_empty());
                for (k, s) in steps.iter().enumerate() {
                    assert_ne!(s.face_in, s.face_out);
                    let gl = tri.gluing(s.tet, s.face_out).unwrap();
                    let next = steps[(k + 1) % steps.len()];
                    assert_eq!(gl.tet, next.tet);
                    assert_eq!(gl.perm.apply(s.face_out), next.face_in);
                }
            }
        }
    }

    #[test]
    fn relator_count_is_closed_fan_count() {
        // Closed manifolds: every edge fan closes, one relator per edge class.
        for text in [LENS4, LENS5] {
            let tri = Triangulation::from_text(text).unwrap();
            let spine = dual_spine(&tri).unwrap();
            assert_eq!(spine.relators.len(), tri.edge_classes().len());
        }
    }
}
