//! Topology of an embedded normal surface.
//!
//! An admissible integral vector is realized as a stack of disjoint disks
//! (`copy` numbers count parallel sheets from the canonical side). The disks
//! are glued into a CW complex: 0-cells are the points where the surface
//! crosses an edge of the triangulation, grouped as chains of disk corners
//! around the edge fan; 1-cells are the arcs where neighbouring disks meet
//! inside a face. Components, Euler characteristics, boundary curves and
//! transverse orientability are read off that complex, and the class in
//! `H₂(M, ∂M)` is recovered by intersecting with dual loops.
//!
//! At ideal vertex classes, complete copies of the vertex link are peeled
//! off first and reported as closed components of their own; leftover
//! triangles spiralling into an ideal end are cut, which turns the cut locus
//! into extra boundary on the remaining pieces.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::homology::{cycle_sign, face_corners, homology};
use crate::normal::{
    disk_position, is_admissible, matching_system, quad_cutting, weight, DiskKind,
    NormalCoordinates,
};
use crate::snf::{smith, Mat, Snf};
use crate::spine::{dual_spine, LoopStep};
use crate::tri::{Triangulation, VertexKind};

/// One disk of the realized surface: `slot` is the local disk type
/// (0..=3 triangles, 4..=6 quads), `copy` the 1-based sheet number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiskId {
    pub tet: usize,
    pub slot: u8,
    pub copy: i128,
}

impl DiskId {
    fn kind(self) -> DiskKind {
        DiskKind::from_local_index(self.slot as usize)
    }
}

/// Whether vertex `v` lies on the `P` side (the side containing vertex 0)
/// of quad family `q`.
fn on_p_side(q: u8, v: u8) -> bool {
    v == 0 || v == q + 1
}

/// Copy numbers of quad family `q` ordered nearest to corner `v` first.
fn near_corner_copies(q: u8, v: u8, count: i128) -> Vec<i128> {
    if on_p_side(q, v) {
        (1..=count).collect()
    } else {
        (1..=count).rev().collect()
    }
}

pub(crate) struct Fan {
    /// Oriented slots `(tet, a, b)` in fan order.
    pub(crate) slots: Vec<(usize, u8, u8)>,
    pub(crate) closed: bool,
    /// Common stack height (the edge weight, stripped disks included).
    pub(crate) height: usize,
    /// Disk corners per slot, ordered from the oriented `a` end.
    pub(crate) stacks: Vec<Vec<DiskId>>,
}

/// A 0-cell: a maximal run of kept disk corners at one height of one fan.
pub(crate) struct Chain {
    /// Dense index of a disk owning a corner in this chain.
    pub(crate) rep_disk: usize,
}

pub(crate) enum Arc {
    /// Two kept disks meeting inside an interior face; `corner` is the
    /// `(tet, face, vertex)` the arc cuts off and `k` its nesting position
    /// counted from that corner.
    Int {
        a: usize,
        b: usize,
        corner: (usize, u8, u8),
        k: usize,
        ends: [usize; 2],
    },
    /// A free arc of a kept disk: on a boundary face (`cusp = None`) or
    /// along the cut locus toward an ideal class (`cusp = Some(class)`).
    Bd {
        d: usize,
        ends: [usize; 2],
        cusp: Option<usize>,
        corner: (usize, u8, u8),
        k: usize,
    },
}

/// The realized disk complex of an admissible integral vector.
pub struct Surface<'a> {
    tri: &'a Triangulation,
    /// Post-peel disk counts per coordinate (stripped corners included).
    xs: Vec<i128>,
    /// Kept disks in deterministic order.
    pub disks: Vec<DiskId>,
    pub(crate) index: HashMap<DiskId, usize>,
    /// `(vertex class, layers)` of peeled ideal links.
    pub peeled: Vec<(usize, i128)>,
    pub(crate) chains: Vec<Chain>,
    pub(crate) arcs: Vec<Arc>,
    pub(crate) fans: Vec<Fan>,
    /// `(tet, low corner, high corner)` -> `(fan, slot, reversed)`.
    pub(crate) slot_pos: HashMap<(usize, u8, u8), (usize, usize, bool)>,
    /// `(fan, slot, height)` -> chain index of the kept corner there.
    pub(crate) pt_chain: HashMap<(usize, usize, usize), usize>,
}

/// Connectivity data of one component of the disk complex.
pub struct ComponentData {
    /// Dense indices of the member disks.
    pub disks: Vec<usize>,
    pub euler: i128,
    pub boundary_arcs: usize,
    pub boundary_curves: usize,
    pub closed: bool,
    /// Boundary arc counts by ideal class (`None` = arcs on ∂M).
    pub cusp_arcs: BTreeMap<Option<usize>, usize>,
}

impl<'a> Surface<'a> {
    /// Realize `x` as a disk complex. `x` must be admissible, nonnegative
    /// and satisfy the matching equations.
    pub fn new(tri: &'a Triangulation, x: &NormalCoordinates) -> Surface<'a> {
        assert_eq!(x.0.len(), 7 * tri.t(), "coordinate length mismatch");
        assert!(x.is_nonnegative(), "surface requires nonnegative coordinates");
        assert!(is_admissible(x), "surface requires an admissible vector");
        assert!(
            matching_system(tri).is_satisfied(x),
            "surface requires a matching solution"
        );

        let ideal = |class: usize| {
            matches!(tri.vertex_kind(class), VertexKind::Cusp | VertexKind::Ideal)
        };

        // Peel complete link layers at ideal classes.
        let mut xs = x.0.clone();
        let mut peeled = Vec::new();
        for (class, members) in tri.vertex_classes().iter().enumerate() {
            if !ideal(class) {
                continue;
            }
            let mu = members
                .iter()
                .map(|&(i, v)| xs[disk_position(i, DiskKind::Tri(v))])
                .min()
                .unwrap();
            if mu > 0 {
                peeled.push((class, mu));
                for &(i, v) in members {
                    xs[disk_position(i, DiskKind::Tri(v))] -= mu;
                }
            }
        }

        // Kept disks: leftover triangles at ideal corners are stripped (they
        // spiral into the end), everything else is realized.
        let mut disks = Vec::new();
        for i in 0..tri.t() {
            for v in 0..4u8 {
                if ideal(tri.vertex_class_of(i, v)) {
                    continue;
                }
                for c in 1..=xs[disk_position(i, DiskKind::Tri(v))] {
                    disks.push(DiskId { tet: i, slot: v, copy: c });
                }
            }
            for q in 0..3u8 {
                for c in 1..=xs[disk_position(i, DiskKind::Quad(q))] {
                    disks.push(DiskId { tet: i, slot: 4 + q, copy: c });
                }
            }
        }
        let index: HashMap<DiskId, usize> =
            disks.iter().enumerate().map(|(k, &d)| (d, k)).collect();

        let mut surf = Surface {
            tri,
            xs,
            disks,
            index,
            peeled,
            chains: Vec::new(),
            arcs: Vec::new(),
            fans: Vec::new(),
            slot_pos: HashMap::new(),
            pt_chain: HashMap::new(),
        };
        surf.build();
        surf
    }

    fn tri_count(&self, i: usize, v: u8) -> i128 {
        self.xs[disk_position(i, DiskKind::Tri(v))]
    }

    fn quad_count(&self, i: usize, q: u8) -> i128 {
        self.xs[disk_position(i, DiskKind::Quad(q))]
    }

    /// Arcs cutting corner `v` on face `f`, nearest the corner first
    /// (stripped disks included).
    fn arc_stack(&self, i: usize, f: u8, v: u8) -> Vec<DiskId> {
        let mut out = Vec::new();
        for c in 1..=self.tri_count(i, v) {
            out.push(DiskId { tet: i, slot: v, copy: c });
        }
        let q = quad_cutting(f, v);
        for c in near_corner_copies(q, v, self.quad_count(i, q)) {
            out.push(DiskId { tet: i, slot: 4 + q, copy: c });
        }
        out
    }

    /// Disk corners along edge `{a, b}` of tet `i`, from the `a` end.
    fn corner_stack(&self, i: usize, a: u8, b: u8) -> Vec<DiskId> {
        let mut out = Vec::new();
        for c in 1..=self.tri_count(i, a) {
            out.push(DiskId { tet: i, slot: a, copy: c });
        }
        for q in 0..3u8 {
            if on_p_side(q, a) != on_p_side(q, b) {
                for c in near_corner_copies(q, a, self.quad_count(i, q)) {
                    out.push(DiskId { tet: i, slot: 4 + q, copy: c });
                }
            }
        }
        for c in (1..=self.tri_count(i, b)).rev() {
            out.push(DiskId { tet: i, slot: b, copy: c });
        }
        out
    }

    fn build(&mut self) {
        let tri = self.tri;

        // Fans: walk each edge orbit once, transporting the oriented slot.
        let mut fans: Vec<Fan> = Vec::new();
        let mut slot_pos: HashMap<(usize, u8, u8), (usize, usize, bool)> = HashMap::new();
        let walk = |start: (usize, u8, u8), exit0: u8| -> (Vec<((usize, u8, u8), u8)>, bool) {
            let mut seq = vec![(start, exit0)];
            let (mut cur, mut ef) = (start, exit0);
            loop {
                let Some(gl) = tri.gluing(cur.0, ef) else {
                    return (seq, false);
                };
                let p = gl.perm;
                let ncur = (gl.tet, p.apply(cur.1), p.apply(cur.2));
                let entered = p.apply(ef);
                let nef = (0..4u8)
                    .find(|&x| x != ncur.1 && x != ncur.2 && x != entered)
                    .unwrap();
                if ncur == start && nef == exit0 {
                    return (seq, true);
                }
                seq.push((ncur, nef));
                (cur, ef) = (ncur, nef);
                assert!(seq.len() <= 24 * tri.t() + 4);
            }
        };
        for i0 in 0..tri.t() {
            for a0 in 0..4u8 {
                for b0 in (a0 + 1)..4 {
                    if slot_pos.contains_key(&(i0, a0, b0)) {
                        continue;
                    }
                    let others: Vec<u8> =
                        (0..4u8).filter(|&x| x != a0 && x != b0).collect();
                    let (seq, closed) = walk((i0, a0, b0), others[0]);
                    let slots: Vec<(usize, u8, u8)> = if closed {
                        seq.into_iter().map(|(s, _)| s).collect()
                    } else {
                        let (seq2, c2) = walk((i0, a0, b0), others[1]);
                        assert!(!c2, "fan closed one way but not the other");
                        seq2.into_iter()
                            .rev()
                            .map(|(s, _)| s)
                            .chain(seq.into_iter().skip(1).map(|(s, _)| s))
                            .collect()
                    };
                    let fid = fans.len();
                    let mut stacks = Vec::with_capacity(slots.len());
                    for (s, &(ci, ca, cb)) in slots.iter().enumerate() {
                        let key = (ci, ca.min(cb), ca.max(cb));
                        let prev = slot_pos.insert(key, (fid, s, ca > cb));
                        assert!(prev.is_none(), "edge slot revisited by its own fan");
                        let st = if ca < cb {
                            self.corner_stack(ci, ca, cb)
                        } else {
                            let mut st = self.corner_stack(ci, cb, ca);
                            st.reverse();
                            st
                        };
                        stacks.push(st);
                    }
                    let height = stacks[0].len();
                    assert!(
                        stacks.iter().all(|st| st.len() == height),
                        "edge weight differs along a fan"
                    );
                    fans.push(Fan { slots, closed, height, stacks });
                }
            }
        }

        // 0-cells: per fan and height, maximal runs of kept corners.
        let mut chains: Vec<Chain> = Vec::new();
        let mut pt_chain: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (fid, fan) in fans.iter().enumerate() {
            let n = fan.slots.len();
            for h in 0..fan.height {
                let kept: Vec<Option<usize>> = (0..n)
                    .map(|s| self.index.get(&fan.stacks[s][h]).copied())
                    .collect();
                if kept.iter().all(|k| k.is_none()) {
                    continue;
                }
                let mut runs: Vec<Vec<usize>> = Vec::new();
                if fan.closed && kept.iter().all(|k| k.is_some()) {
                    runs.push((0..n).collect());
                } else {
                    let order: Vec<usize> = if fan.closed {
                        let gap = kept.iter().position(|k| k.is_none()).unwrap();
                        (1..=n).map(|off| (gap + off) % n).collect()
                    } else {
                        (0..n).collect()
                    };
                    let mut cur = Vec::new();
                    for s in order {
                        if kept[s].is_some() {
                            cur.push(s);
                        } else if !cur.is_empty() {
                            runs.push(std::mem::take(&mut cur));
                        }
                    }
                    if !cur.is_empty() {
                        runs.push(cur);
                    }
                }
                for run in runs {
                    let cid = chains.len();
                    chains.push(Chain { rep_disk: kept[run[0]].unwrap() });
                    for s in run {
                        pt_chain.insert((fid, s, h), cid);
                    }
                }
            }
        }

        // Endpoint chains of the arc at nesting position k from corner v on
        // face f: one on each edge of the face incident to v.
        let arc_ends = |i: usize, f: u8, v: u8, k: usize| -> [usize; 2] {
            let mut out = [0usize; 2];
            let mut n = 0;
            for w in 0..4u8 {
                if w == f || w == v {
                    continue;
                }
                let key = (i, v.min(w), v.max(w));
                let (fid, s, flipped) = slot_pos[&key];
                let height = fans[fid].height;
                let h_from_a = if v < w { k } else { height - 1 - k };
                let h = if flipped { height - 1 - h_from_a } else { h_from_a };
                out[n] = pt_chain[&(fid, s, h)];
                n += 1;
            }
            debug_assert_eq!(n, 2);
            out
        };

        // 1-cells.
        let mut arcs: Vec<Arc> = Vec::new();
        for ((i, f), gl) in tri.interior_faces() {
            let (j, g, p) = (gl.tet, gl.perm.apply(f), gl.perm);
            for v in 0..4u8 {
                if v == f {
                    continue;
                }
                let w = p.apply(v);
                let a_stack = self.arc_stack(i, f, v);
                let b_stack = self.arc_stack(j, g, w);
                assert_eq!(a_stack.len(), b_stack.len(), "face arcs must match");
                for (k, (&da, &db)) in a_stack.iter().zip(&b_stack).enumerate() {
                    match (self.index.get(&da), self.index.get(&db)) {
                        (Some(&ia), Some(&ib)) => arcs.push(Arc::Int {
                            a: ia,
                            b: ib,
                            corner: (i, f, v),
                            k,
                            ends: arc_ends(i, f, v, k),
                        }),
                        (Some(&ia), None) => arcs.push(Arc::Bd {
                            d: ia,
                            ends: arc_ends(i, f, v, k),
                            cusp: Some(tri.vertex_class_of(i, v)),
                            corner: (i, f, v),
                            k,
                        }),
                        (None, Some(&ib)) => arcs.push(Arc::Bd {
                            d: ib,
                            ends: arc_ends(j, g, w, k),
                            cusp: Some(tri.vertex_class_of(j, w)),
                            corner: (j, g, w),
                            k,
                        }),
                        (None, None) => {}
                    }
                }
            }
        }
        for (i, f) in tri.boundary_faces() {
            for v in 0..4u8 {
                if v == f {
                    continue;
                }
                for (k, &da) in self.arc_stack(i, f, v).iter().enumerate() {
                    if let Some(&ia) = self.index.get(&da) {
                        arcs.push(Arc::Bd {
                            d: ia,
                            ends: arc_ends(i, f, v, k),
                            cusp: None,
                            corner: (i, f, v),
                            k,
                        });
                    }
                }
            }
        }

        self.chains = chains;
        self.arcs = arcs;
        self.fans = fans;
        self.slot_pos = slot_pos;
        self.pt_chain = pt_chain;
    }

    /// Connected components with their cell counts and boundary structure.
    pub fn components(&self) -> Vec<ComponentData> {
        let n = self.disks.len();
        let mut uf = UnionFind::new(n);
        for arc in &self.arcs {
            if let Arc::Int { a, b, .. } = *arc {
                uf.union(a, b);
            }
        }
        // Deterministic component numbering by smallest member disk.
        let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for d in 0..n {
            let r = uf.find(d);
            let c = *comp_of_root.entry(r).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[c].push(d);
        }

        let mut edges = vec![0usize; members.len()];
        let mut verts = vec![0usize; members.len()];
        let mut bd: Vec<Vec<(&[usize; 2], Option<usize>)>> =
            vec![Vec::new(); members.len()];
        for arc in &self.arcs {
            match arc {
                Arc::Int { a, .. } => edges[comp_of_root[&uf.find(*a)]] += 1,
                Arc::Bd { d, ends, cusp, .. } => {
                    let c = comp_of_root[&uf.find(*d)];
                    edges[c] += 1;
                    bd[c].push((ends, *cusp));
                }
            }
        }
        for chain in &self.chains {
            verts[comp_of_root[&uf.find(chain.rep_disk)]] += 1;
        }

        members
            .into_iter()
            .enumerate()
            .map(|(c, disks)| {
                // Boundary arcs must form closed curves: every endpoint
                // 0-cell meets exactly two of them.
                let mut deg: HashMap<usize, usize> = HashMap::new();
                let mut ends: Vec<usize> = Vec::new();
                for (e, _) in &bd[c] {
                    for &p in e.iter() {
                        *deg.entry(p).or_insert(0) += 1;
                        ends.push(p);
                    }
                }
                assert!(
                    deg.values().all(|&v| v == 2),
                    "boundary of a component is not 2-regular"
                );
                ends.sort_unstable();
                ends.dedup();
                let pos: HashMap<usize, usize> =
                    ends.iter().enumerate().map(|(k, &p)| (p, k)).collect();
                let mut buf = UnionFind::new(ends.len());
                for (e, _) in &bd[c] {
                    buf.union(pos[&e[0]], pos[&e[1]]);
                }
                let curves = (0..ends.len()).filter(|&k| buf.find(k) == k).count();
                let mut cusp_arcs: BTreeMap<Option<usize>, usize> = BTreeMap::new();
                for (_, cusp) in &bd[c] {
                    *cusp_arcs.entry(*cusp).or_insert(0) += 1;
                }
                ComponentData {
                    euler: verts[c] as i128 - edges[c] as i128 + disks.len() as i128,
                    boundary_arcs: bd[c].len(),
                    boundary_curves: curves,
                    closed: bd[c].is_empty(),
                    cusp_arcs,
                    disks,
                }
            })
            .collect()
    }

    /// Transverse 2-coloring: `color[d] = +1` means the disk's transverse
    /// orientation points to its canonical side (the cut-off vertex for a
    /// triangle, the side containing vertex 0 for a quad). Returns the
    /// coloring plus a per-disk flag marking disks in non-orientable
    /// components.
    pub fn orient(&self) -> (Vec<i8>, Vec<bool>) {
        // A disk's canonical side faces corner v iff the disk is a triangle
        // (it always cuts toward its vertex) or v lies on the quad's P side.
        let toward = |d: DiskId, v: u8| -> bool {
            match d.kind() {
                DiskKind::Tri(_) => true,
                DiskKind::Quad(q) => on_p_side(q, v),
            }
        };
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.disks.len()];
        for arc in &self.arcs {
            let Arc::Int { a, b, corner: (i, f, v), .. } = *arc else {
                continue;
            };
            let w = self.tri.gluing(i, f).unwrap().perm.apply(v);
            let same = toward(self.disks[a], v) == toward(self.disks[b], w);
            adj[a].push((b, same));
            adj[b].push((a, same));
        }
        let mut color = vec![0i8; self.disks.len()];
        let mut conflict = vec![false; self.disks.len()];
        for d0 in 0..self.disks.len() {
            if color[d0] != 0 {
                continue;
            }
            color[d0] = 1;
            let mut queue = VecDeque::from([d0]);
            while let Some(d) = queue.pop_front() {
                for &(e, same) in &adj[d] {
                    let want = if same { color[d] } else { -color[d] };
                    if color[e] == 0 {
                        color[e] = want;
                        queue.push_back(e);
                    } else if color[e] != want {
                        conflict[d] = true;
                        conflict[e] = true;
                    }
                }
            }
        }
        (color, conflict)
    }

    /// Signed count of quad crossings along each face-center loop, weighted
    /// by the transverse coloring; `only` restricts to a disk subset.
    pub fn pairing(
        &self,
        loops: &[Vec<LoopStep>],
        color: &[i8],
        only: Option<&[bool]>,
    ) -> Vec<i128> {
        loops
            .iter()
            .map(|steps| {
                let mut tot = 0i128;
                for s in steps {
                    for q in 0..3u8 {
                        // The center of face m lies on the P side iff m is
                        // on the N side, so the segment crosses the quads
                        // exactly when the two flags differ.
                        let s_in = !on_p_side(q, s.face_in);
                        let s_out = !on_p_side(q, s.face_out);
                        if s_in == s_out {
                            continue;
                        }
                        let dir = if s_out { 1 } else { -1 };
                        for c in 1..=self.quad_count(s.tet, q) {
                            let d = self.index
                                [&DiskId { tet: s.tet, slot: 4 + q, copy: c }];
                            if only.map_or(true, |m| m[d]) {
                                tot += color[d] as i128 * dir;
                            }
                        }
                    }
                }
                tot
            })
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx] = ry;
        }
    }
}

/// Precomputed pairing data for reading homology classes off surfaces:
/// dual loops plus the intersection matrix of the relative 2-cycle basis,
/// in Smith form. Build once per triangulation and reuse across surfaces.
pub struct ClassContext {
    /// Rank of `H₂(M, ∂M)`; classes are coordinate vectors of this length.
    pub rank: usize,
    pub gen_loops: Vec<Vec<LoopStep>>,
    pub rel_loops: Vec<Vec<LoopStep>>,
    /// Pairing matrix: `a[(b, r)]` = basis cycle `r` against generator loop `b`.
    a: Mat,
    snf: Snf,
}

/// Intersection number of a relative 2-cycle (full `cells2` coordinates)
/// with a face-center loop: each crossing into a tetrahedron through face
/// `g` hits the face-class cell with a sign fixed by the tetrahedron's
/// orientation and the cell's chosen traversal.
fn cycle_loop_pairing(tri: &Triangulation, rep: &[i128], steps: &[LoopStep]) -> i128 {
    let mut tot = 0i128;
    for s in steps {
        let gl = tri.gluing(s.tet, s.face_out).unwrap();
        let (j, g) = (gl.tet, gl.perm.apply(s.face_out));
        let class = tri.face_class_of(j, g);
        let coeff = rep[class];
        if coeff == 0 {
            continue;
        }
        let fc = tri.face_classes()[class];
        let tau = if fc.rep == (j, g) {
            1
        } else {
            let rg = fc.gluing.expect("shared face class has a gluing");
            let [ra, rb, rc] = face_corners(fc.rep.1);
            cycle_sign(
                [rg.perm.apply(ra), rg.perm.apply(rb), rg.perm.apply(rc)],
                face_corners(g),
            )
        };
        let face_sign = if g % 2 == 0 { -1 } else { 1 };
        tot += coeff * tri.orientation(j) as i128 * face_sign * tau;
    }
    tot
}

impl ClassContext {
    pub fn new(tri: &Triangulation) -> ClassContext {
        let spine = dual_spine(tri).expect("class computation needs a connected triangulation");
        let gen_loops = spine.generator_loops();
        let rel_loops = spine.relator_loops.clone();
        let h2 = homology(tri, 2, true);
        let rank = h2.rank;

        let mut a = Mat::zeros(gen_loops.len(), rank);
        for (col, rep) in h2.representatives.iter().take(rank).enumerate() {
            for (row, steps) in gen_loops.iter().enumerate() {
                a[(row, col)] = cycle_loop_pairing(tri, rep, steps);
            }
            for steps in &rel_loops {
                assert_eq!(
                    cycle_loop_pairing(tri, rep, steps),
                    0,
                    "relative cycle pairs nonzero with an edge relator loop"
                );
            }
        }
        let snf = smith(&a);
        assert_eq!(snf.rank, rank, "loop pairing must separate the basis");
        ClassContext { rank, gen_loops, rel_loops, a, snf }
    }

    /// The pairing vector `A·z` a surface in class `z` must realize against
    /// `gen_loops`.
    pub fn phi_of_class(&self, z: &[i128]) -> Vec<i128> {
        self.a.mul_vec(z)
    }

    /// Coordinates `c` with `A·c = phi`, where `phi` pairs a surface against
    /// `gen_loops`. Panics if `phi` is not in the lattice the basis spans.
    pub fn solve(&self, phi: &[i128]) -> Vec<i128> {
        let w = self.snf.u.mul_vec(phi);
        let mut cv = vec![0i128; self.rank];
        for k in 0..w.len() {
            if k < self.rank {
                let s = self.snf.s[(k, k)];
                assert_eq!(w[k] % s, 0, "pairing vector off the basis lattice");
                cv[k] = w[k] / s;
            } else {
                assert_eq!(w[k], 0, "pairing vector outside the pairing image");
            }
        }
        self.snf.v.mul_vec(&cv)
    }
}

/// Topology of one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub disks: usize,
    pub euler: i128,
    pub orientable: bool,
    pub boundary_curves: usize,
    pub closed: bool,
    /// Class in `H₂(M, ∂M)` modulo torsion (coordinates in the basis from
    /// `homology`), for the orientation giving the component's first disk
    /// color `+1`; `None` if the component is non-orientable.
    pub class: Option<Vec<i128>>,
}

/// Full topology report for an admissible integral vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceTopology {
    pub components: Vec<SurfaceComponent>,
    pub total_weight: i128,
    pub euler: i128,
    pub boundary_curves: usize,
    pub orientable: bool,
    /// Total class with all component orientations at their canonical signs;
    /// `None` if any component is non-orientable.
    pub class: Option<Vec<i128>>,
}

impl SurfaceTopology {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

/// Compute the surface topology of `x`, reusing a prebuilt [`ClassContext`].
pub fn surface_topology_with(
    tri: &Triangulation,
    ctx: &ClassContext,
    x: &NormalCoordinates,
) -> SurfaceTopology {
    let surf = Surface::new(tri, x);
    let comps = surf.components();
    let (color, conflict) = surf.orient();

    let mut components = Vec::new();
    for comp in &comps {
        let orientable = comp.disks.iter().all(|&d| !conflict[d]);
        let class = if orientable {
            // Normalize the orientation: first disk of the component +1.
            let flip = color[comp.disks[0]] as i128;
            let mut mask = vec![false; surf.disks.len()];
            for &d in &comp.disks {
                mask[d] = true;
            }
            let phi: Vec<i128> = surf
                .pairing(&ctx.gen_loops, &color, Some(&mask))
                .into_iter()
                .map(|v| v * flip)
                .collect();
            debug_assert!(
                surf.pairing(&ctx.rel_loops, &color, Some(&mask))
                    .iter()
                    .all(|&v| v == 0),
                "surface pairs nonzero with an edge relator loop"
            );
            Some(ctx.solve(&phi))
        } else {
            None
        };
        components.push(SurfaceComponent {
            disks: comp.disks.len(),
            euler: comp.euler,
            orientable,
            boundary_curves: comp.boundary_curves,
            closed: comp.closed,
            class,
        });
    }

    // Peeled ideal-link layers are closed components of their own; they
    // carry no quads, so their class vanishes.
    for &(class, layers) in &surf.peeled {
        for _ in 0..layers {
            components.push(SurfaceComponent {
                disks: tri.vertex_classes()[class].len(),
                euler: tri.vertex_link_chi(class) as i128,
                orientable: true,
                boundary_curves: 0,
                closed: true,
                class: Some(vec![0; ctx.rank]),
            });
        }
    }

    let euler = components.iter().map(|c| c.euler).sum();
    let boundary_curves = components.iter().map(|c| c.boundary_curves).sum();
    let orientable = components.iter().all(|c| c.orientable);
    let class = components
        .iter()
        .try_fold(vec![0i128; ctx.rank], |acc, c| {
            c.class.as_ref().map(|cc| {
                acc.iter().zip(cc).map(|(a, b)| a + b).collect()
            })
        });

    SurfaceTopology {
        components,
        total_weight: weight(tri, x),
        euler,
        boundary_curves,
        orientable,
        class,
    }
}

/// Topology of the normal surface realized by the admissible integral
/// vector `x`: components with Euler characteristic, orientability and
/// boundary curves, total weight, and the relative homology class.
pub fn surface_topology(tri: &Triangulation, x: &NormalCoordinates) -> SurfaceTopology {
    surface_topology_with(tri, &ClassContext::new(tri), x)
}
