//! Normal surface coordinates: disk types, matching equations,
//! admissibility, Haken sums, and edge weights.
//!
//! A normal surface in a triangulation with `t` tetrahedra is recorded by
//! `7t` nonnegative integers: for each tetrahedron, four triangle
//! coordinates (the triangle cutting off vertex `v` at local index `v`)
//! followed by three quadrilateral coordinates (the quad separating vertices
//! `{0, q+1}` from the other two at local index `4 + q`). The ordering is
//! tetrahedron-major and fixed once and for all; every consumer of raw
//! coordinate vectors in this crate uses it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::Mat;
use crate::tri::Triangulation;

pub const DISKS_PER_TET: usize = 7;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NormalError {
    #[error("coordinate vectors have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("summands carry different quadrilateral types in tetrahedron {tet}")]
    IncompatibleQuadTypes { tet: usize },
    #[error("coordinate vector is not admissible")]
    NotAdmissible,
    #[error("enumeration exceeded the resource budget ({rays} intermediate rays, cap {cap})")]
    ResourceBudgetExceeded { rays: usize, cap: usize },
}

/// The seven disk types of one tetrahedron.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum DiskKind {
    /// Triangle cutting off vertex `v`.
    Tri(u8),
    /// Quadrilateral separating `{0, q+1}` from the remaining two vertices.
    Quad(u8),
}

impl DiskKind {
    pub fn local_index(self) -> usize {
        match self {
            DiskKind::Tri(v) => v as usize,
            DiskKind::Quad(q) => 4 + q as usize,
        }
    }

    pub fn from_local_index(k: usize) -> DiskKind {
        match k {
            0..=3 => DiskKind::Tri(k as u8),
            4..=6 => DiskKind::Quad(k as u8 - 4),
            _ => panic!("local disk index out of range"),
        }
    }

    /// The two vertex pairs a quad separates; `None` for triangles.
    pub fn quad_sides(self) -> Option<([u8; 2], [u8; 2])> {
        match self {
            DiskKind::Tri(_) => None,
            DiskKind::Quad(q) => {
                let b = q + 1;
                let mut rest = (1..4u8).filter(|&x| x != b);
                Some(([0, b], [rest.next().unwrap(), rest.next().unwrap()]))
            }
        }
    }
}

/// One disk type with its position in the global coordinate order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiskTypeIndex {
    pub tet: usize,
    pub kind: DiskKind,
    pub position: usize,
}

pub fn disk_position(tet: usize, kind: DiskKind) -> usize {
    DISKS_PER_TET * tet + kind.local_index()
}

pub fn disk_type(position: usize) -> DiskTypeIndex {
    DiskTypeIndex {
        tet: position / DISKS_PER_TET,
        kind: DiskKind::from_local_index(position % DISKS_PER_TET),
        position,
    }
}

/// All disk types of a `t`-tetrahedron triangulation in coordinate order.
pub fn disk_types(t: usize) -> Vec<DiskTypeIndex> {
    (0..DISKS_PER_TET * t).map(disk_type).collect()
}

/// Local index of the quad whose arc on face `f` cuts off corner `v`: the
/// quad separating `{v, f}` from the other two labels.
pub fn quad_cutting(face: u8, v: u8) -> u8 {
    debug_assert!(face != v);
    // the quad index is determined by the partner of 0 in its partition
    if face == 0 || v == 0 {
        (face + v) - 1 // the nonzero one of the pair
    } else {
        let rest_with_zero = (1..4u8).find(|&x| x != face && x != v).unwrap();
        rest_with_zero - 1
    }
}

/// A length-`7t` coordinate vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct NormalCoordinates(pub Vec<i128>);

impl NormalCoordinates {
    pub fn zeros(t: usize) -> NormalCoordinates {
        NormalCoordinates(vec![0; DISKS_PER_TET * t])
    }

    pub fn t(&self) -> usize {
        self.0.len() / DISKS_PER_TET
    }

    pub fn get(&self, tet: usize, kind: DiskKind) -> i128 {
        self.0[disk_position(tet, kind)]
    }

    pub fn set(&mut self, tet: usize, kind: DiskKind, value: i128) {
        self.0[disk_position(tet, kind)] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// The nonzero quad kinds per tetrahedron, `None` where quad-free.
    pub fn quad_support(&self) -> Vec<Option<u8>> {
        (0..self.t())
            .map(|i| (0..3u8).find(|&q| self.get(i, DiskKind::Quad(q)) != 0))
            .collect()
    }

    /// Divides out the gcd of the entries (zero vectors stay zero).
    pub fn primitive(&self) -> NormalCoordinates {
        let mut g: i128 = 0;
        for &x in &self.0 {
            g = gcd(g, x.abs());
        }
        if g <= 1 {
            return self.clone();
        }
        NormalCoordinates(self.0.iter().map(|&x| x / g).collect())
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `x_i + x_j = x_k + x_l`, one equation per arc type of an interior
/// triangle: (i, j) on one side of the face, (k, l) on the other.
pub type MatchingEquation = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingSystem {
    pub n_coords: usize,
    pub equations: Vec<MatchingEquation>,
}

impl MatchingSystem {
    pub fn is_satisfied(&self, x: &NormalCoordinates) -> bool {
        x.0.len() == self.n_coords
            && self
                .equations
                .iter()
                .all(|&(i, j, k, l)| x.0[i] + x.0[j] == x.0[k] + x.0[l])
    }

    /// The system as an integer matrix with rows `e_i + e_j - e_k - e_l`.
    pub fn as_matrix(&self) -> Mat {
        let mut m = Mat::zeros(self.equations.len(), self.n_coords);
        for (r, &(i, j, k, l)) in self.equations.iter().enumerate() {
            m[(r, i)] += 1;
            m[(r, j)] += 1;
            m[(r, k)] -= 1;
            m[(r, l)] -= 1;
        }
        m
    }
}

/// One equation per corner arc of each interior triangle class: the disks
/// inducing the arc on one side match those on the other.
pub fn matching_system(tri: &Triangulation) -> MatchingSystem {
    let mut equations = Vec::new();
    for ((i, f), g) in tri.interior_faces() {
        for v in 0..4u8 {
            if v == f {
                continue;
            }
            let w = g.perm.apply(v);
            equations.push((
                disk_position(i, DiskKind::Tri(v)),
                disk_position(i, DiskKind::Quad(quad_cutting(f, v))),
                disk_position(g.tet, DiskKind::Tri(w)),
                disk_position(g.tet, DiskKind::Quad(quad_cutting(g.face, w))),
            ));
        }
    }
    MatchingSystem {
        n_coords: DISKS_PER_TET * tri.t(),
        equations,
    }
}

/// At most one quadrilateral type per tetrahedron.
pub fn is_admissible(x: &NormalCoordinates) -> bool {
    (0..x.t()).all(|i| {
        (0..3u8)
            .filter(|&q| x.get(i, DiskKind::Quad(q)) != 0)
            .count()
            <= 1
    })
}

/// Coordinate-wise sum of two admissible, quad-compatible vectors.
pub fn haken_sum(
    g: &NormalCoordinates,
    h: &NormalCoordinates,
) -> Result<NormalCoordinates, NormalError> {
    if g.0.len() != h.0.len() {
        return Err(NormalError::DimensionMismatch(g.0.len(), h.0.len()));
    }
    if !is_admissible(g) || !is_admissible(h) {
        return Err(NormalError::NotAdmissible);
    }
    for (tet, (qg, qh)) in g.quad_support().into_iter().zip(h.quad_support()).enumerate() {
        if let (Some(a), Some(b)) = (qg, qh) {
            if a != b {
                return Err(NormalError::IncompatibleQuadTypes { tet });
            }
        }
    }
    Ok(NormalCoordinates(
        g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect(),
    ))
}

/// Intersection count of the surface with each edge class, evaluated on the
/// class representative (well defined once the matching equations hold).
pub fn edge_weights(tri: &Triangulation, x: &NormalCoordinates) -> Vec<i128> {
    tri.edge_classes()
        .iter()
        .map(|members| {
            let (i, u, v) = members[0];
            let tris = x.get(i, DiskKind::Tri(u)) + x.get(i, DiskKind::Tri(v));
            let quads: i128 = (0..3u8)
                .filter(|&q| {
                    let (s, _) = DiskKind::Quad(q).quad_sides().unwrap();
                    s.contains(&u) != s.contains(&v)
                })
                .map(|q| x.get(i, DiskKind::Quad(q)))
                .sum();
            tris + quads
        })
        .collect()
}

/// Total weight: the number of intersection points with the 1-skeleton.
pub fn weight(tri: &Triangulation, x: &NormalCoordinates) -> i128 {
    edge_weights(tri, x).iter().sum()
}

/// The (all-triangle) link coordinates of a vertex class.
pub fn vertex_link_coords(tri: &Triangulation, class: usize) -> NormalCoordinates {
    let mut x = NormalCoordinates::zeros(tri.t());
    for &(i, v) in &tri.vertex_classes()[class] {
        x.set(i, DiskKind::Tri(v), 1);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALL: &str = include_str!("../../../corpus/ball.tri");
    const FIG8_IDEAL: &str = include_str!("../../../corpus/fig8_ideal.tri");
    const FIG8: &str = include_str!("../../../corpus/fig8.tri");
    const LENS4: &str = include_str!("../../../corpus/lens4.tri");
    const TREFOIL: &str = include_str!("../../../corpus/trefoil.tri");

    fn tri(src: &str) -> Triangulation {
        Triangulation::from_text(src).unwrap()
    }

    #[test]
    fn quad_conventions() {
        // {1,0}|{2,3} is the partition of quad 0
        assert_eq!(quad_cutting(0, 1), 0);
        assert_eq!(quad_cutting(1, 0), 0);
        // {2,3} avoids 0, so the quad is named by the complement {0,1}
        assert_eq!(quad_cutting(3, 2), 0);
        assert_eq!(quad_cutting(1, 3), 1);
        assert_eq!(quad_cutting(2, 1), 2);
        for f in 0..4u8 {
            for v in 0..4u8 {
                if f == v {
                    continue;
                }
                let q = quad_cutting(f, v);
                let (s, o) = DiskKind::Quad(q).quad_sides().unwrap();
                // the quad must separate {v, f} from the rest
                assert!(
                    (s.contains(&v) && s.contains(&f)) || (o.contains(&v) && o.contains(&f))
                );
            }
        }
    }

    #[test]
    fn position_round_trip() {
        for d in disk_types(3) {
            assert_eq!(disk_position(d.tet, d.kind), d.position);
            assert_eq!(disk_type(d.position), d);
        }
    }

    #[test]
    fn matching_counts() {
        assert_eq!(matching_system(&tri(BALL)).equations.len(), 0);
        assert_eq!(matching_system(&tri(FIG8_IDEAL)).equations.len(), 12);
        // closed with t tetrahedra: 3 * 2t equations
        assert_eq!(matching_system(&tri(LENS4)).equations.len(), 6);
    }

    #[test]
    fn vertex_links_satisfy_matching() {
        for src in [BALL, FIG8_IDEAL, FIG8, LENS4, TREFOIL] {
            let tri = tri(src);
            let sys = matching_system(&tri);
            for c in 0..tri.vertex_classes().len() {
                let link = vertex_link_coords(&tri, c);
                assert!(sys.is_satisfied(&link));
                assert!(is_admissible(&link));
                assert!(weight(&tri, &link) > 0);
            }
        }
    }

    #[test]
    fn fiber_witness_of_material_bundles() {
        // one triangle-quad-triangle sheet per prism of the fiber layer
        // (tets 0..9); the flip tetrahedra above it carry no disks
        for src in [FIG8, TREFOIL] {
            let tri = tri(src);
            let mut x = NormalCoordinates::zeros(tri.t());
            for p in 0..3 {
                x.set(3 * p, DiskKind::Tri(3), 1);
                x.set(3 * p + 1, DiskKind::Quad(0), 1);
                x.set(3 * p + 2, DiskKind::Tri(0), 1);
            }
            assert!(matching_system(&tri).is_satisfied(&x), "{src:.30}");
            assert!(is_admissible(&x));
        }
    }

    #[test]
    fn haken_sum_rules() {
        let t = 2;
        let zero = NormalCoordinates::zeros(t);
        let mut g = NormalCoordinates::zeros(t);
        g.set(0, DiskKind::Quad(1), 2);
        g.set(1, DiskKind::Tri(0), 1);
        assert_eq!(haken_sum(&g, &zero).unwrap(), g);

        let mut h = NormalCoordinates::zeros(t);
        h.set(0, DiskKind::Quad(2), 1);
        assert_eq!(
            haken_sum(&g, &h),
            Err(NormalError::IncompatibleQuadTypes { tet: 0 })
        );

        let mut two_quads = NormalCoordinates::zeros(t);
        two_quads.set(0, DiskKind::Quad(0), 1);
        two_quads.set(0, DiskKind::Quad(1), 1);
        assert!(!is_admissible(&two_quads));
        assert_eq!(haken_sum(&two_quads, &zero), Err(NormalError::NotAdmissible));

        let mut h = NormalCoordinates::zeros(t);
        h.set(0, DiskKind::Quad(1), 5);
        h.set(1, DiskKind::Tri(2), 3);
        let sum = haken_sum(&g, &h).unwrap();
        assert!(is_admissible(&sum));
        assert_eq!(sum.get(0, DiskKind::Quad(1)), 7);
    }

    #[test]
    fn weight_is_linear() {
        let tri = tri(FIG8_IDEAL);
        let link = vertex_link_coords(&tri, 0);
        let double = haken_sum(&link, &link).unwrap();
        assert_eq!(weight(&tri, &double), 2 * weight(&tri, &link));
    }

    #[test]
    fn primitive_scaling() {
        let x = NormalCoordinates(vec![0, 2, 4, 6, 0, 0, 8]);
        assert_eq!(x.primitive().0, vec![0, 1, 2, 3, 0, 0, 4]);
        let z = NormalCoordinates::zeros(1);
        assert_eq!(z.primitive(), z);
    }
}
