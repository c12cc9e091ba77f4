//! Cellular homology of the truncated cell complex.
//!
//! Ideal ends are truncated honestly: every corner of a tetrahedron whose
//! vertex class is an ideal end is cut off, which introduces corner vertices
//! (edge-end orbits), corner arcs (link edges), and corner triangles (link
//! triangles) as genuine cells. Material vertices keep their degenerate
//! corners, so for material triangulations the complex is the usual one.
//!
//! Boundary maps follow fixed orientation conventions: a 2-cell is traversed
//! along the ascending cyclic order of its representative slot's corner
//! labels, edge classes carry the orbit orientation chosen by the
//! triangulation, and a corner triangle at vertex `v` enters the boundary of
//! its tetrahedron with sign `(-1)^(v+1)`, opposite to the face it faces.
//! `d . d = 0` is asserted by the test suite over the whole corpus.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::snf::{smith, Mat};
use crate::tri::{Triangulation, VertexKind};

/// 0-cells: material vertex classes, then edge-end orbits at ideal corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell0 {
    Vertex(usize),
    /// Orbit representative `(tet, corner, toward)`.
    End(usize, u8, u8),
}

/// 1-cells: edge classes, then corner arcs at ideal corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell1 {
    Edge(usize),
    /// Slot representative `(tet, face, corner)`.
    Arc(usize, u8, u8),
}

/// 2-cells: triangle classes, then one corner triangle per ideal corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell2 {
    Face(usize),
    Corner(usize, u8),
}

/// Rank, torsion, and cycle representatives of one homology group.
///
/// Representatives are vectors over the full cell basis of their degree
/// (boundary cells hold zeros in the relative case): free generators first,
/// then one representative per torsion factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub rank: usize,
    pub torsion: Vec<i128>,
    pub representatives: Vec<Vec<i128>>,
}

/// The truncated cell complex of a triangulation, with integral boundary
/// maps `d1: C1 -> C0`, `d2: C2 -> C1`, `d3: C3 -> C2`.
pub struct TruncatedComplex {
    pub cells0: Vec<Cell0>,
    pub cells1: Vec<Cell1>,
    pub cells2: Vec<Cell2>,
    pub n3: usize,
    pub d1: Mat,
    pub d2: Mat,
    pub d3: Mat,
    bd0: Vec<bool>,
    bd1: Vec<bool>,
    bd2: Vec<bool>,
    end_cell: HashMap<(usize, u8, u8), usize>,
    vertex_cell: Vec<Option<usize>>,
}

/// Sorted labels of face `f`, as the ascending traversal cycle.
pub(crate) fn face_corners(f: u8) -> [u8; 3] {
    let mut out = [0u8; 3];
    let mut k = 0;
    for v in 0..4u8 {
        if v != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// +1 if the cyclic orders (a0,a1,a2) and (b0,b1,b2) of one 3-element set
/// agree up to rotation, -1 otherwise.
pub(crate) fn cycle_sign(a: [u8; 3], b: [u8; 3]) -> i128 {
    let rot = |x: [u8; 3]| [[x[0], x[1], x[2]], [x[1], x[2], x[0]], [x[2], x[0], x[1]]];
    if rot(a).contains(&b) {
        1
    } else {
        -1
    }
}

impl TruncatedComplex {
    pub fn build(tri: &Triangulation) -> TruncatedComplex {
        let t = tri.t();
        let ideal = |class: usize| {
            matches!(tri.vertex_kind(class), VertexKind::Cusp | VertexKind::Ideal)
        };
        let ideal_corner = |i: usize, v: u8| ideal(tri.vertex_class_of(i, v));

        // 0-cells: material vertex classes, then end orbits at ideal corners
        let mut cells0 = Vec::new();
        let mut vertex_cell = vec![None; tri.vertex_classes().len()];
        for c in 0..tri.vertex_classes().len() {
            if !ideal(c) {
                vertex_cell[c] = Some(cells0.len());
                cells0.push(Cell0::Vertex(c));
            }
        }
        let mut end_cell: HashMap<(usize, u8, u8), usize> = HashMap::new();
        for i in 0..t {
            for v in 0..4u8 {
                if !ideal_corner(i, v) {
                    continue;
                }
                for w in 0..4u8 {
                    if w == v || end_cell.contains_key(&(i, v, w)) {
                        continue;
                    }
                    // flood the orbit of this edge end across face gluings
                    let idx = cells0.len();
                    cells0.push(Cell0::End(i, v, w));
                    let mut stack = vec![(i, v, w)];
                    end_cell.insert((i, v, w), idx);
                    while let Some((j, x, y)) = stack.pop() {
                        for f in 0..4u8 {
                            if f == x || f == y {
                                continue;
                            }
                            if let Some(g) = tri.gluing(j, f) {
                                let nxt = (g.tet, g.perm.apply(x), g.perm.apply(y));
                                if !end_cell.contains_key(&nxt) {
                                    end_cell.insert(nxt, idx);
                                    stack.push(nxt);
                                }
                            }
                        }
                    }
                }
            }
        }
        let end_of = |i: usize, v: u8, w: u8| -> usize {
            if ideal_corner(i, v) {
                end_cell[&(i, v, w)]
            } else {
                vertex_cell[tri.vertex_class_of(i, v)].unwrap()
            }
        };

        // 1-cells: edge classes, then corner arcs (each arc has exactly two
        // slots since ideal links are closed); arc_slots maps a slot to its
        // cell and ordered end labels (tail, head)
        let mut cells1: Vec<Cell1> = (0..tri.edge_classes().len()).map(Cell1::Edge).collect();
        let mut arc_slots: HashMap<(usize, u8, u8), (usize, u8, u8)> = HashMap::new();
        for i in 0..t {
            for f in 0..4u8 {
                for v in 0..4u8 {
                    if v == f || !ideal_corner(i, v) || arc_slots.contains_key(&(i, f, v)) {
                        continue;
                    }
                    let idx = cells1.len();
                    cells1.push(Cell1::Arc(i, f, v));
                    let [a, b] = {
                        let c = face_corners(f);
                        let mut it = c.into_iter().filter(|&w| w != v);
                        [it.next().unwrap(), it.next().unwrap()]
                    };
                    arc_slots.insert((i, f, v), (idx, a, b));
                    let g = tri
                        .gluing(i, f)
                        .expect("ideal corner on an unglued face would make the link bounded");
                    arc_slots.insert(
                        (g.tet, g.face, g.perm.apply(v)),
                        (idx, g.perm.apply(a), g.perm.apply(b)),
                    );
                }
            }
        }
        // slot traversed from end (v,x) to (v,y): sign vs the stored arc cell
        let arc_signed = |i: usize, f: u8, v: u8, x: u8, y: u8| -> (usize, i128) {
            let (idx, ta, hb) = arc_slots[&(i, f, v)];
            if (x, y) == (ta, hb) {
                (idx, 1)
            } else {
                debug_assert_eq!((x, y), (hb, ta));
                (idx, -1)
            }
        };

        // 2-cells
        let mut cells2: Vec<Cell2> = (0..tri.face_classes().len()).map(Cell2::Face).collect();
        let mut corner_cell: HashMap<(usize, u8), usize> = HashMap::new();
        for i in 0..t {
            for v in 0..4u8 {
                if ideal_corner(i, v) {
                    corner_cell.insert((i, v), cells2.len());
                    cells2.push(Cell2::Corner(i, v));
                }
            }
        }

        // d1
        let mut d1 = Mat::zeros(cells0.len(), cells1.len());
        for (e, members) in tri.edge_classes().iter().enumerate() {
            let (i, a, b) = members[0];
            d1[(end_of(i, b, a), e)] += 1;
            d1[(end_of(i, a, b), e)] -= 1;
        }
        for (slot, &(idx, ta, hb)) in &arc_slots {
            let (i, _, v) = *slot;
            if cells1[idx] != Cell1::Arc(slot.0, slot.1, slot.2) {
                continue; // record each arc once, from its representative slot
            }
            d1[(end_of(i, v, hb), idx)] += 1;
            d1[(end_of(i, v, ta), idx)] -= 1;
        }

        // d2 for triangle classes: traverse the ascending corner cycle of
        // the representative slot; each side contributes its truncated edge
        // and, at ideal corners, the connecting corner arc
        let mut d2 = Mat::zeros(cells1.len(), cells2.len());
        for (fc_idx, fc) in tri.face_classes().iter().enumerate() {
            let (i, f) = fc.rep;
            let [a, b, c] = face_corners(f);
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                let (e, s) = tri.edge_class_of(i, x, y);
                d2[(e, fc_idx)] += s as i128;
                if ideal_corner(i, y) {
                    // around corner y: from the x side to the z side
                    let (arc, s) = arc_signed(i, f, y, x, z);
                    d2[(arc, fc_idx)] += s;
                }
            }
        }
        for (&(i, v), &cell) in &corner_cell {
            let [w1, w2, w3] = face_corners(v);
            for (x, y) in [(w1, w2), (w2, w3), (w3, w1)] {
                let f = 6 - v - x - y;
                let (arc, s) = arc_signed(i, f, v, x, y);
                d2[(arc, cell)] += s;
            }
        }

        // d3: faces with the simplicial sign vs the class's rep traversal,
        // corner triangles opposite their facing face
        let mut d3 = Mat::zeros(cells2.len(), t);
        for i in 0..t {
            for f in 0..4u8 {
                let class = tri.face_class_of(i, f);
                let fc = tri.face_classes()[class];
                let sign_f = if f % 2 == 0 { 1 } else { -1 };
                let tau = if fc.rep == (i, f) {
                    1
                } else {
                    let g = fc.gluing.expect("non-rep slot implies a gluing");
                    debug_assert_eq!((g.tet, g.face), (i, f));
                    let [ra, rb, rc] = face_corners(fc.rep.1);
                    cycle_sign(
                        [g.perm.apply(ra), g.perm.apply(rb), g.perm.apply(rc)],
                        face_corners(f),
                    )
                };
                d3[(class, i)] += sign_f * tau;
            }
            for v in 0..4u8 {
                if let Some(&cell) = corner_cell.get(&(i, v)) {
                    let sign_v = if v % 2 == 0 { -1 } else { 1 };
                    d3[(cell, i)] += sign_v;
                }
            }
        }

        // boundary flags for the relative complex
        let bd0 = cells0
            .iter()
            .map(|c| match *c {
                Cell0::Vertex(cl) => tri.vertex_kind(cl) == VertexKind::Disk,
                Cell0::End(..) => true,
            })
            .collect();
        let bd1 = cells1
            .iter()
            .map(|c| match *c {
                Cell1::Edge(e) => tri.edge_classes()[e].iter().any(|&(i, a, b)| {
                    (0..4u8).any(|f| f != a && f != b && tri.gluing(i, f).is_none())
                }),
                Cell1::Arc(..) => true,
            })
            .collect();
        let bd2 = cells2
            .iter()
            .map(|c| match *c {
                Cell2::Face(fc) => tri.face_classes()[fc].gluing.is_none(),
                Cell2::Corner(..) => true,
            })
            .collect();

        TruncatedComplex {
            cells0,
            cells1,
            cells2,
            n3: t,
            d1,
            d2,
            d3,
            bd0,
            bd1,
            bd2,
            end_cell,
            vertex_cell,
        }
    }

    pub fn n_cells(&self, k: usize) -> usize {
        match k {
            0 => self.cells0.len(),
            1 => self.cells1.len(),
            2 => self.cells2.len(),
            3 => self.n3,
            _ => panic!("degree out of range"),
        }
    }

    /// Cell indices surviving in the relative (mod boundary) complex.
    pub fn interior_cells(&self, k: usize) -> Vec<usize> {
        let flags: &[bool] = match k {
            0 => &self.bd0,
            1 => &self.bd1,
            2 => &self.bd2,
            3 => return (0..self.n3).collect(),
            _ => panic!("degree out of range"),
        };
        (0..flags.len()).filter(|&i| !flags[i]).collect()
    }

    /// The 0-cell of the truncated edge end `(tet, corner, toward)` if that
    /// corner is ideal, or the 0-cell of the material vertex class.
    pub fn corner_zero_cell(&self, tet: usize, v: u8, w: u8, vclass: usize) -> usize {
        match self.end_cell.get(&(tet, v, w)) {
            Some(&c) => c,
            None => self.vertex_cell[vclass].expect("material class has a 0-cell"),
        }
    }

    pub fn homology(&self, k: usize, rel_boundary: bool) -> HomologyProfile {
        assert!(k <= 3, "degree out of range");
        let sel: [Vec<usize>; 4] = if rel_boundary {
            [
                self.interior_cells(0),
                self.interior_cells(1),
                self.interior_cells(2),
                self.interior_cells(3),
            ]
        } else {
            [
                (0..self.n_cells(0)).collect(),
                (0..self.n_cells(1)).collect(),
                (0..self.n_cells(2)).collect(),
                (0..self.n_cells(3)).collect(),
            ]
        };
        let d = |k: usize| -> &Mat {
            match k {
                1 => &self.d1,
                2 => &self.d2,
                3 => &self.d3,
                _ => unreachable!(),
            }
        };
        let dk = if k == 0 {
            Mat::zeros(0, sel[0].len())
        } else {
            d(k).select(&sel[k - 1], &sel[k])
        };
        let dk1 = if k == 3 {
            Mat::zeros(sel[3].len(), 0)
        } else {
            d(k + 1).select(&sel[k], &sel[k + 1])
        };

        let snf_k = smith(&dk);
        let kernel = snf_k.kernel_basis();
        let m = kernel.cols();
        let mut x = Mat::zeros(m, dk1.cols());
        for j in 0..dk1.cols() {
            let y = snf_k.v_coords(&dk1.col(j));
            for (r, &val) in y.iter().enumerate().take(snf_k.rank) {
                assert_eq!(val, 0, "boundary of a boundary is nonzero in degree {k} row {r}");
            }
            for r in 0..m {
                x[(r, j)] = y[snf_k.rank + r];
            }
        }
        let snf_x = smith(&x);
        let rank = m - snf_x.rank;
        let torsion: Vec<i128> = snf_x
            .invariant_factors()
            .into_iter()
            .filter(|&f| f > 1)
            .collect();

        // generator i of the cokernel pulls back through u_inv, then
        // through the kernel basis into cell coordinates
        let mut gen_order: Vec<usize> = (snf_x.rank..m).collect();
        gen_order.extend((0..snf_x.rank).filter(|&i| snf_x.s[(i, i)] > 1));
        let representatives = gen_order
            .into_iter()
            .map(|i| {
                let cycle_sel = kernel.mul_vec(&snf_x.u_inv.col(i));
                let mut full = vec![0i128; self.n_cells(k)];
                for (pos, &cell) in sel[k].iter().enumerate() {
                    full[cell] = cycle_sel[pos];
                }
                full
            })
            .collect();

        HomologyProfile {
            rank,
            torsion,
            representatives,
        }
    }
}

/// Homology of the triangulation's truncated complex, absolute or relative
/// to the boundary (material boundary cells and all ideal-end cells).
pub fn homology(tri: &Triangulation, k: usize, rel_boundary: bool) -> HomologyProfile {
    TruncatedComplex::build(tri).homology(k, rel_boundary)
}
