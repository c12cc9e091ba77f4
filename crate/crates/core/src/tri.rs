//! Generalized triangulations of compact orientable 3-manifolds.
//!
//! A triangulation is a gluing table: `t` tetrahedra with each of the four
//! faces either free (boundary) or glued to a face of another tetrahedron by
//! an affine map recorded as a permutation of the vertex labels {0,1,2,3}.
//! Edge classes, vertex classes, triangle classes, and an orientation are
//! derived at construction time; ill-formed, non-orientable, or degenerate
//! tables are rejected.
//!
//! Ideal triangulations are handled implicitly: a vertex class whose link is
//! a closed surface of nonpositive Euler characteristic is flagged as an
//! ideal end (a torus link is a cusp), and the manifold Euler characteristic
//! accounts for the truncation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::perm::Perm4;

/// One face gluing: the target tetrahedron and face, and the vertex-label
/// permutation carrying the source tetrahedron onto the target.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gluing {
    pub tet: usize,
    pub face: u8,
    pub perm: Perm4,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed gluing: {0}")]
    MalformedGluing(String),
    #[error("triangulation is not orientable")]
    NonOrientable,
    #[error(
        "vertex link of tet {tet} vertex {vertex} is not a sphere, disk, or closed ideal end \
         (chi {chi}, closed {closed})"
    )]
    InvalidVertexLink {
        tet: usize,
        vertex: u8,
        chi: i64,
        closed: bool,
    },
    #[error("subdivision target set is empty or out of range")]
    BadSubdivisionTargets,
}

/// Classification of a vertex class by its link surface.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VertexKind {
    /// Closed link of Euler characteristic 2: an interior material vertex.
    Sphere,
    /// Disk link: a material boundary vertex.
    Disk,
    /// Closed torus link: a cusp.
    Cusp,
    /// Closed link of negative Euler characteristic: a higher-genus ideal end.
    Ideal,
}

/// A triangle class: either an interior face pair or a single boundary face.
#[derive(Clone, Copy, Debug)]
pub struct FaceClass {
    /// Lexicographically smallest (tet, face) slot in the class.
    pub rep: (usize, u8),
    /// Gluing from the representative side; `None` for a boundary triangle.
    pub gluing: Option<Gluing>,
}

/// One component of the boundary surface. Ideal components come from the
/// links of cusps and higher-genus ideal ends; material components are glued
/// from free tetrahedron faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub euler: i64,
    pub ideal: bool,
    /// Triangles in the component: free faces, or link triangles if ideal.
    pub face_count: usize,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    glu: Vec<[Option<Gluing>; 4]>,
    eps: Vec<i8>,
    edges: Vec<Vec<(usize, u8, u8)>>,
    edge_lookup: HashMap<(usize, u8, u8), (usize, i8)>,
    vertices: Vec<Vec<(usize, u8)>>,
    vertex_lookup: Vec<[usize; 4]>,
    vertex_kinds: Vec<VertexKind>,
    link_chi: Vec<i64>,
    faces: Vec<FaceClass>,
    face_lookup: HashMap<(usize, u8), usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

// node encodings for the orbit computations
fn enode(tet: usize, a: u8, b: u8) -> usize {
    tet * 16 + (a as usize) * 4 + b as usize
}

fn vnode(tet: usize, v: u8) -> usize {
    tet * 4 + v as usize
}

impl Triangulation {
    /// Validates a gluing table and derives the skeleta.
    pub fn build_from_gluings(glu: Vec<[Option<Gluing>; 4]>) -> Result<Self, TriError> {
        let t = glu.len();
        if t == 0 {
            return Err(TriError::MalformedGluing("empty gluing table".into()));
        }
        for (i, row) in glu.iter().enumerate() {
            for f in 0..4u8 {
                let Some(g) = row[f as usize] else { continue };
                if g.tet >= t {
                    return Err(TriError::MalformedGluing(format!(
                        "tet {i} face {f}: target tet {} out of range",
                        g.tet
                    )));
                }
                if g.perm.apply(f) != g.face {
                    return Err(TriError::MalformedGluing(format!(
                        "tet {i} face {f}: permutation {} does not carry face {f} to face {}",
                        g.perm, g.face
                    )));
                }
                if (g.tet, g.face) == (i, f) {
                    return Err(TriError::MalformedGluing(format!(
                        "tet {i} face {f} is glued to itself"
                    )));
                }
                let back = glu[g.tet][g.face as usize].ok_or_else(|| {
                    TriError::MalformedGluing(format!(
                        "tet {i} face {f}: reverse gluing at tet {} face {} is missing",
                        g.tet, g.face
                    ))
                })?;
                if (back.tet, back.face) != (i, f) || back.perm != g.perm.inverse() {
                    return Err(TriError::MalformedGluing(format!(
                        "tet {i} face {f}: gluing is not involutive"
                    )));
                }
            }
        }

        let eps = orientation_signs(&glu).ok_or(TriError::NonOrientable)?;

        // Edge orbits over ordered vertex pairs; a class merging with its own
        // mirror would fold an edge onto itself, which breaks the normal
        // surface machinery. No orientable involutive table is known to do
        // this, but the check is cheap.
        let mut uf = UnionFind::new(t * 16);
        for (i, row) in glu.iter().enumerate() {
            for f in 0..4u8 {
                let Some(g) = row[f as usize] else { continue };
                for a in 0..4u8 {
                    for b in 0..4u8 {
                        if a == b || a == f || b == f {
                            continue;
                        }
                        uf.union(
                            enode(i, a, b),
                            enode(g.tet, g.perm.apply(a), g.perm.apply(b)),
                        );
                    }
                }
            }
        }
        let mut edges: Vec<Vec<(usize, u8, u8)>> = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut orbit_class: HashMap<usize, (usize, i8)> = HashMap::new();
        for i in 0..t {
            for a in 0..4u8 {
                for b in 0..4u8 {
                    if a == b {
                        continue;
                    }
                    let r = uf.find(enode(i, a, b));
                    let rm = uf.find(enode(i, b, a));
                    if r == rm {
                        return Err(TriError::MalformedGluing(format!(
                            "edge {a}{b} of tet {i} is identified with its own reversal"
                        )));
                    }
                    let (class, sign) = match orbit_class.get(&r) {
                        Some(&cs) => cs,
                        None => {
                            let c = edges.len();
                            edges.push(Vec::new());
                            orbit_class.insert(r, (c, 1));
                            orbit_class.insert(rm, (c, -1));
                            (c, 1)
                        }
                    };
                    if sign == 1 {
                        edges[class].push((i, a, b));
                    }
                    edge_lookup.insert((i, a, b), (class, sign));
                }
            }
        }
        debug_assert_eq!(edges.iter().map(Vec::len).sum::<usize>(), 6 * t);

        // Vertex orbits.
        let mut uf = UnionFind::new(t * 4);
        for (i, row) in glu.iter().enumerate() {
            for f in 0..4u8 {
                let Some(g) = row[f as usize] else { continue };
                for v in 0..4u8 {
                    if v != f {
                        uf.union(vnode(i, v), vnode(g.tet, g.perm.apply(v)));
                    }
                }
            }
        }
        let mut vertices: Vec<Vec<(usize, u8)>> = Vec::new();
        let mut vertex_lookup = vec![[usize::MAX; 4]; t];
        let mut root_class: HashMap<usize, usize> = HashMap::new();
        for i in 0..t {
            for v in 0..4u8 {
                let r = uf.find(vnode(i, v));
                let class = *root_class.entry(r).or_insert_with(|| {
                    vertices.push(Vec::new());
                    vertices.len() - 1
                });
                vertices[class].push((i, v));
                vertex_lookup[i][v as usize] = class;
            }
        }

        let mut vertex_kinds = Vec::with_capacity(vertices.len());
        let mut link_chi = Vec::with_capacity(vertices.len());
        for class in &vertices {
            let (chi, closed) = link_euler(&glu, class);
            let kind = match (closed, chi) {
                (true, 2) => VertexKind::Sphere,
                (false, 1) => VertexKind::Disk,
                (true, 0) => VertexKind::Cusp,
                (true, c) if c < 0 => VertexKind::Ideal,
                _ => {
                    let (tet, vertex) = class[0];
                    return Err(TriError::InvalidVertexLink {
                        tet,
                        vertex,
                        chi,
                        closed,
                    });
                }
            };
            vertex_kinds.push(kind);
            link_chi.push(chi);
        }

        // Triangle classes, canonical side first.
        let mut faces = Vec::new();
        let mut face_lookup = HashMap::new();
        for (i, row) in glu.iter().enumerate() {
            for f in 0..4u8 {
                match row[f as usize] {
                    None => {
                        face_lookup.insert((i, f), faces.len());
                        faces.push(FaceClass {
                            rep: (i, f),
                            gluing: None,
                        });
                    }
                    Some(g) => {
                        if (g.tet, g.face) > (i, f) {
                            face_lookup.insert((i, f), faces.len());
                            face_lookup.insert((g.tet, g.face), faces.len());
                            faces.push(FaceClass {
                                rep: (i, f),
                                gluing: Some(g),
                            });
                        }
                    }
                }
            }
        }

        Ok(Triangulation {
            glu,
            eps,
            edges,
            edge_lookup,
            vertices,
            vertex_lookup,
            vertex_kinds,
            link_chi,
            faces,
            face_lookup,
        })
    }

    /// Number of tetrahedra.
    pub fn t(&self) -> usize {
        self.glu.len()
    }

    pub fn gluing(&self, tet: usize, face: u8) -> Option<&Gluing> {
        self.glu[tet][face as usize].as_ref()
    }

    /// Orientation sign (+1/-1) assigned to each tetrahedron.
    pub fn orientation(&self, tet: usize) -> i8 {
        self.eps[tet]
    }

    /// Edge classes; each class lists its tetrahedron-edge slots as ordered
    /// vertex pairs with a coherent orientation.
    pub fn edge_classes(&self) -> &[Vec<(usize, u8, u8)>] {
        &self.edges
    }

    /// Class index and orientation sign of the ordered edge `a -> b` in `tet`.
    pub fn edge_class_of(&self, tet: usize, a: u8, b: u8) -> (usize, i8) {
        self.edge_lookup[&(tet, a, b)]
    }

    pub fn vertex_classes(&self) -> &[Vec<(usize, u8)>] {
        &self.vertices
    }

    pub fn vertex_class_of(&self, tet: usize, v: u8) -> usize {
        self.vertex_lookup[tet][v as usize]
    }

    pub fn vertex_kind(&self, class: usize) -> VertexKind {
        self.vertex_kinds[class]
    }

    /// Euler characteristic of the link surface of a vertex class.
    pub fn vertex_link_chi(&self, class: usize) -> i64 {
        self.link_chi[class]
    }

    /// Vertex classes whose links are tori.
    pub fn cusps(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&c| self.vertex_kinds[c] == VertexKind::Cusp)
            .collect()
    }

    /// All triangle classes, interior and boundary.
    pub fn face_classes(&self) -> &[FaceClass] {
        &self.faces
    }

    pub fn face_class_of(&self, tet: usize, face: u8) -> usize {
        self.face_lookup[&(tet, face)]
    }

    /// Interior triangle classes as (source slot, gluing from that side).
    pub fn interior_faces(&self) -> impl Iterator<Item = ((usize, u8), Gluing)> + '_ {
        self.faces
            .iter()
            .filter_map(|fc| fc.gluing.map(|g| (fc.rep, g)))
    }

    /// Free (unglued) faces in lexicographic order.
    pub fn boundary_faces(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        for i in 0..self.t() {
            for f in 0..4u8 {
                if self.glu[i][f as usize].is_none() {
                    out.push((i, f));
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_faces().is_empty()
            && self
                .vertex_kinds
                .iter()
                .all(|&k| k == VertexKind::Sphere)
    }

    /// Euler characteristic of the raw cell structure (vertex, edge,
    /// triangle classes and tetrahedra).
    pub fn cell_euler(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
            - self.t() as i64
    }

    /// Euler characteristic of the underlying compact manifold: ideal ends
    /// count as their truncated boundary surfaces rather than as cone points.
    pub fn euler_characteristic(&self) -> i64 {
        let ideal_adjust: i64 = (0..self.vertices.len())
            .filter(|&c| matches!(self.vertex_kinds[c], VertexKind::Cusp | VertexKind::Ideal))
            .map(|c| self.link_chi[c] - 1)
            .sum();
        self.cell_euler() + ideal_adjust
    }

    /// Walks the edge fan from boundary face `(tet, face)` along the face
    /// edge `{a, b}` to the neighboring boundary face, returning it together
    /// with the images of `a` and `b` there.
    pub fn boundary_edge_neighbor(
        &self,
        tet: usize,
        face: u8,
        a: u8,
        b: u8,
    ) -> (usize, u8, u8, u8) {
        debug_assert!(self.glu[tet][face as usize].is_none());
        debug_assert!(a != b && a != face && b != face);
        let mut ct = tet;
        let mut ca = a;
        let mut cb = b;
        // the other face of ct containing {ca, cb}
        let mut cg = 6 - face - ca - cb;
        for _ in 0..12 * self.t() + 4 {
            match self.glu[ct][cg as usize] {
                None => return (ct, cg, ca, cb),
                Some(g) => {
                    let (na, nb, nf) = (g.perm.apply(ca), g.perm.apply(cb), g.perm.apply(cg));
                    ct = g.tet;
                    ca = na;
                    cb = nb;
                    cg = 6 - nf - na - nb;
                }
            }
        }
        unreachable!("edge fan of a boundary edge did not terminate");
    }

    /// Components of the boundary surface: material components glued from
    /// free faces, then one ideal component per cusp or higher-genus end.
    pub fn boundary_surface(&self) -> Vec<BoundaryComponent> {
        let bd = self.boundary_faces();
        let slot: HashMap<(usize, u8), usize> =
            bd.iter().copied().enumerate().map(|(k, s)| (s, k)).collect();
        let mut uf = UnionFind::new(bd.len());
        for (k, &(i, f)) in bd.iter().enumerate() {
            for a in 0..4u8 {
                for b in (a + 1)..4 {
                    if a == f || b == f {
                        continue;
                    }
                    let (j, g, _, _) = self.boundary_edge_neighbor(i, f, a, b);
                    uf.union(k, slot[&(j, g)]);
                }
            }
        }
        let mut comp_faces: HashMap<usize, Vec<(usize, u8)>> = HashMap::new();
        for (k, &s) in bd.iter().enumerate() {
            comp_faces.entry(uf.find(k)).or_default().push(s);
        }
        let mut mats: Vec<Vec<(usize, u8)>> = comp_faces.into_values().collect();
        mats.sort_by_key(|faces| faces[0]);
        let mut out = Vec::new();
        for faces in mats {
            let f_count = faces.len() as i64;
            // every boundary edge bounds exactly two face-slot corners
            let e_count = 3 * f_count / 2;
            let mut vclasses = BTreeSet::new();
            for &(i, f) in &faces {
                for v in 0..4u8 {
                    if v != f {
                        vclasses.insert(self.vertex_class_of(i, v));
                    }
                }
            }
            // a disk-link vertex meets the boundary surface in one point
            let v_count = vclasses.len() as i64;
            out.push(BoundaryComponent {
                euler: v_count - e_count + f_count,
                ideal: false,
                face_count: faces.len(),
            });
        }
        for c in 0..self.vertices.len() {
            if matches!(self.vertex_kinds[c], VertexKind::Cusp | VertexKind::Ideal) {
                out.push(BoundaryComponent {
                    euler: self.link_chi[c],
                    ideal: true,
                    face_count: self.vertices[c].len(),
                });
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let t = self.t();
        let mut seen = vec![false; t];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for f in 0..4 {
                if let Some(g) = self.glu[i][f] {
                    if !seen[g.tet] {
                        seen[g.tet] = true;
                        stack.push(g.tet);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Stellar subdivision: each target tetrahedron is replaced by four
    /// around a new interior vertex. Subtetrahedron `k` keeps the original
    /// labels except that the new center takes label `k`; its face `k` is the
    /// original face `k`, so outer gluings keep their permutations verbatim.
    pub fn stellar_subdivide(&self, targets: &[usize]) -> Result<Triangulation, TriError> {
        let t = self.t();
        let targets: BTreeSet<usize> = targets.iter().copied().collect();
        if targets.is_empty() || targets.iter().any(|&i| i >= t) {
            return Err(TriError::BadSubdivisionTargets);
        }
        let rank: HashMap<usize, usize> =
            targets.iter().copied().enumerate().map(|(r, i)| (i, r)).collect();
        let sub_id = |tet: usize, corner: u8| -> usize {
            if corner == 0 {
                tet
            } else {
                t + 3 * rank[&tet] + corner as usize - 1
            }
        };
        let redirect = |g: &Gluing| -> Gluing {
            if rank.contains_key(&g.tet) {
                Gluing {
                    tet: sub_id(g.tet, g.face),
                    ..*g
                }
            } else {
                *g
            }
        };
        let mut out: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; t + 3 * targets.len()];
        for i in 0..t {
            if !rank.contains_key(&i) {
                for f in 0..4 {
                    out[i][f] = self.glu[i][f].as_ref().map(redirect);
                }
                continue;
            }
            for k in 0..4u8 {
                let id = sub_id(i, k);
                out[id][k as usize] = self.glu[i][k as usize].as_ref().map(redirect);
                for m in 0..4u8 {
                    if m != k {
                        out[id][m as usize] = Some(Gluing {
                            tet: sub_id(i, m),
                            face: k,
                            perm: Perm4::swap(k, m),
                        });
                    }
                }
            }
        }
        Triangulation::build_from_gluings(out)
    }

    /// Parses either the text gluing-table format or its JSON mirror.
    pub fn parse_str(src: &str) -> Result<Triangulation, TriError> {
        if src.trim_start().starts_with('{') {
            Triangulation::from_json_str(src)
        } else {
            Triangulation::from_text(src)
        }
    }

    /// Parses the text format: one `tet <i>: <g0> <g1> <g2> <g3>` line per
    /// tetrahedron, where each entry is `-` or `<tet>:<perm word>`; `#`
    /// starts a comment.
    pub fn from_text(src: &str) -> Result<Triangulation, TriError> {
        let mut rows: Vec<[Option<Gluing>; 4]> = Vec::new();
        for (n, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| TriError::Parse { line: n + 1, msg };
            let rest = line
                .strip_prefix("tet")
                .ok_or_else(|| parse_err("expected `tet <i>: ...`".into()))?;
            let (idx, entries) = rest
                .split_once(':')
                .ok_or_else(|| parse_err("missing `:` after tetrahedron index".into()))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad tetrahedron index `{}`", idx.trim())))?;
            if idx != rows.len() {
                return Err(parse_err(format!(
                    "tetrahedron indices must appear in order; expected {}, found {idx}",
                    rows.len()
                )));
            }
            let entries: Vec<&str> = entries.split_whitespace().collect();
            if entries.len() != 4 {
                return Err(parse_err(format!(
                    "expected 4 face entries, found {}",
                    entries.len()
                )));
            }
            let mut row = [None; 4];
            for (f, ent) in entries.iter().enumerate() {
                if *ent == "-" {
                    continue;
                }
                let (tet, word) = ent
                    .split_once(':')
                    .ok_or_else(|| parse_err(format!("bad face entry `{ent}`")))?;
                let tet: usize = tet
                    .parse()
                    .map_err(|_| parse_err(format!("bad target tetrahedron in `{ent}`")))?;
                let perm = Perm4::parse(word)
                    .ok_or_else(|| parse_err(format!("bad permutation word in `{ent}`")))?;
                row[f] = Some(Gluing {
                    tet,
                    face: perm.apply(f as u8),
                    perm,
                });
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(TriError::Parse {
                line: 0,
                msg: "no tetrahedra".into(),
            });
        }
        Triangulation::build_from_gluings(rows)
    }

    pub fn from_json_str(src: &str) -> Result<Triangulation, TriError> {
        let file: TriFile = serde_json::from_str(src).map_err(|e| TriError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        file.into_gluings().and_then(Triangulation::build_from_gluings)
    }

    /// Renders the text gluing-table format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.glu.iter().enumerate() {
            s.push_str(&format!("tet {i}:"));
            for ent in row {
                match ent {
                    None => s.push_str(" -"),
                    Some(g) => s.push_str(&format!(" {}:{}", g.tet, g.perm)),
                }
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.glu == other.glu
    }
}

impl Eq for Triangulation {}

fn orientation_signs(glu: &[[Option<Gluing>; 4]]) -> Option<Vec<i8>> {
    let t = glu.len();
    let mut eps = vec![0i8; t];
    for start in 0..t {
        if eps[start] != 0 {
            continue;
        }
        eps[start] = 1;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for f in 0..4 {
                let Some(g) = glu[i][f] else { continue };
                let want = -eps[i] * g.perm.sign();
                if eps[g.tet] == 0 {
                    eps[g.tet] = want;
                    stack.push(g.tet);
                } else if eps[g.tet] != want {
                    return None;
                }
            }
        }
    }
    Some(eps)
}

/// Euler characteristic of the link of one vertex class, and whether the
/// link is closed. The link is built from one triangle per class corner,
/// glued along the corner arcs of interior faces.
fn link_euler(glu: &[[Option<Gluing>; 4]], class: &[(usize, u8)]) -> (i64, bool) {
    let f_count = class.len() as i64;
    let mut e_count = 0i64;
    let mut closed = true;
    let mut seen: BTreeSet<(usize, u8, u8)> = BTreeSet::new();
    for &(i, v) in class {
        for f in 0..4u8 {
            if f == v || seen.contains(&(i, f, v)) {
                continue;
            }
            seen.insert((i, f, v));
            e_count += 1;
            match glu[i][f as usize] {
                None => closed = false,
                Some(g) => {
                    seen.insert((g.tet, g.face, g.perm.apply(v)));
                }
            }
        }
    }
    // link vertices are orbits of edge ends hanging off the class corners
    let ends: Vec<(usize, u8, u8)> = class
        .iter()
        .flat_map(|&(i, v)| (0..4u8).filter(move |&w| w != v).map(move |w| (i, v, w)))
        .collect();
    let index: HashMap<(usize, u8, u8), usize> =
        ends.iter().copied().enumerate().map(|(k, e)| (e, k)).collect();
    let mut uf = UnionFind::new(ends.len());
    for (k, &(i, v, w)) in ends.iter().enumerate() {
        for f in 0..4u8 {
            if f == v || f == w {
                continue;
            }
            if let Some(g) = glu[i][f as usize] {
                uf.union(k, index[&(g.tet, g.perm.apply(v), g.perm.apply(w))]);
            }
        }
    }
    let v_count = (0..ends.len()).filter(|&k| uf.find(k) == k).count() as i64;
    (v_count - e_count + f_count, closed)
}

// JSON mirror of the gluing table: face indices are implicit in the
// permutation words, exactly as in the text format.
#[derive(Serialize, Deserialize)]
struct TriFile {
    tets: Vec<Vec<Option<GluingFile>>>,
}

#[derive(Serialize, Deserialize)]
struct GluingFile {
    tet: usize,
    perm: String,
}

impl TriFile {
    fn into_gluings(self) -> Result<Vec<[Option<Gluing>; 4]>, TriError> {
        let mut rows = Vec::with_capacity(self.tets.len());
        for (i, tet) in self.tets.into_iter().enumerate() {
            if tet.len() != 4 {
                return Err(TriError::MalformedGluing(format!(
                    "tet {i}: expected 4 face entries, found {}",
                    tet.len()
                )));
            }
            let mut row = [None; 4];
            for (f, ent) in tet.into_iter().enumerate() {
                let Some(e) = ent else { continue };
                let perm = Perm4::parse(&e.perm).ok_or_else(|| {
                    TriError::MalformedGluing(format!(
                        "tet {i} face {f}: bad permutation word `{}`",
                        e.perm
                    ))
                })?;
                row[f] = Some(Gluing {
                    tet: e.tet,
                    face: perm.apply(f as u8),
                    perm,
                });
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

impl Serialize for Triangulation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let tets = self
            .glu
            .iter()
            .map(|row| {
                row.iter()
                    .map(|ent| {
                        ent.map(|g| GluingFile {
                            tet: g.tet,
                            perm: g.perm.word(),
                        })
                    })
                    .collect()
            })
            .collect();
        TriFile { tets }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = TriFile::deserialize(deserializer)?;
        file.into_gluings()
            .and_then(Triangulation::build_from_gluings)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALL: &str = include_str!("../../../corpus/ball.tri");
    const SOLID_TORUS: &str = include_str!("../../../corpus/solidtorus.tri");
    const FIG8_IDEAL: &str = include_str!("../../../corpus/fig8_ideal.tri");
    const FIG8_IDEAL_JSON: &str = include_str!("../../../corpus/fig8_ideal.json");
    const FIG8: &str = include_str!("../../../corpus/fig8.tri");
    const TREFOIL: &str = include_str!("../../../corpus/trefoil.tri");
    const LENS4: &str = include_str!("../../../corpus/lens4.tri");
    const LENS5: &str = include_str!("../../../corpus/lens5.tri");

    fn corpus() -> Vec<(&'static str, Triangulation)> {
        [
            ("ball", BALL),
            ("solidtorus", SOLID_TORUS),
            ("fig8_ideal", FIG8_IDEAL),
            ("fig8", FIG8),
            ("trefoil", TREFOIL),
            ("lens4", LENS4),
            ("lens5", LENS5),
        ]
        .into_iter()
        .map(|(n, s)| (n, Triangulation::from_text(s).unwrap()))
        .collect()
    }

    #[test]
    fn ball_counts() {
        let tri = Triangulation::from_text(BALL).unwrap();
        assert_eq!(tri.t(), 1);
        assert_eq!(tri.boundary_faces().len(), 4);
        assert_eq!(tri.edge_classes().len(), 6);
        assert_eq!(tri.vertex_classes().len(), 4);
        assert!((0..4).all(|c| tri.vertex_kind(c) == VertexKind::Disk));
        assert_eq!(tri.euler_characteristic(), 1);
        assert_eq!(
            tri.boundary_surface(),
            vec![BoundaryComponent {
                euler: 2,
                ideal: false,
                face_count: 4
            }]
        );
    }

    #[test]
    fn solid_torus_counts() {
        let tri = Triangulation::from_text(SOLID_TORUS).unwrap();
        assert_eq!(tri.edge_classes().len(), 3);
        assert_eq!(tri.vertex_classes().len(), 1);
        assert_eq!(tri.vertex_kind(0), VertexKind::Disk);
        assert_eq!(tri.euler_characteristic(), 0);
        assert_eq!(
            tri.boundary_surface(),
            vec![BoundaryComponent {
                euler: 0,
                ideal: false,
                face_count: 2
            }]
        );
    }

    #[test]
    fn figure_eight_ideal_counts() {
        let tri = Triangulation::from_text(FIG8_IDEAL).unwrap();
        assert_eq!(tri.t(), 2);
        assert_eq!(tri.interior_faces().count(), 4);
        assert!(tri.boundary_faces().is_empty());
        assert_eq!(tri.edge_classes().len(), 2);
        assert_eq!(tri.vertex_classes().len(), 1);
        assert_eq!(tri.vertex_kind(0), VertexKind::Cusp);
        assert_eq!(tri.cusps(), vec![0]);
        assert_eq!(tri.euler_characteristic(), 0);
        assert!(!tri.is_closed());
        assert_eq!(
            tri.boundary_surface(),
            vec![BoundaryComponent {
                euler: 0,
                ideal: true,
                face_count: 8
            }]
        );
    }

    #[test]
    fn material_knot_exteriors() {
        let fig8 = Triangulation::from_text(FIG8).unwrap();
        assert_eq!(fig8.t(), 12);
        assert_eq!(fig8.edge_classes().len(), 14);
        assert_eq!(fig8.vertex_classes().len(), 1);
        assert_eq!(fig8.vertex_kind(0), VertexKind::Disk);
        assert_eq!(fig8.euler_characteristic(), 0);
        assert_eq!(
            fig8.boundary_surface(),
            vec![BoundaryComponent {
                euler: 0,
                ideal: false,
                face_count: 2
            }]
        );

        let trefoil = Triangulation::from_text(TREFOIL).unwrap();
        assert_eq!(trefoil.t(), 10);
        assert_eq!(trefoil.edge_classes().len(), 12);
        assert_eq!(trefoil.euler_characteristic(), 0);
        assert_eq!(trefoil.boundary_surface().len(), 1);
        assert_eq!(trefoil.boundary_surface()[0].euler, 0);
    }

    #[test]
    fn lens_spaces_are_closed() {
        for src in [LENS4, LENS5] {
            let tri = Triangulation::from_text(src).unwrap();
            assert!(tri.is_closed());
            assert_eq!(tri.edge_classes().len(), 2);
            assert_eq!(tri.vertex_kind(0), VertexKind::Sphere);
            assert_eq!(tri.euler_characteristic(), 0);
            assert!(tri.boundary_surface().is_empty());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        // permutation does not carry face 0 to the target face
        let bad = "tet 0: 1:1230 - - -\ntet 1: 0:2013 - - -";
        assert!(matches!(
            Triangulation::from_text(bad),
            Err(TriError::MalformedGluing(_))
        ));
        // back gluing has the wrong permutation
        let bad = "tet 0: 1:1230 - - -\ntet 1: - 0:1230 - -";
        assert!(matches!(
            Triangulation::from_text(bad),
            Err(TriError::MalformedGluing(_))
        ));
        // missing back gluing entirely
        let bad = "tet 0: 1:1230 - - -\ntet 1: - - - -";
        assert!(matches!(
            Triangulation::from_text(bad),
            Err(TriError::MalformedGluing(_))
        ));
        // self-gluing must use an odd permutation to stay orientable
        let bad = "tet 0: 0:1032 0:1032 - -";
        assert_eq!(Triangulation::from_text(bad), Err(TriError::NonOrientable));
        // bad permutation word
        let bad = "tet 0: 0:1231 - - -";
        assert!(matches!(
            Triangulation::from_text(bad),
            Err(TriError::Parse { .. })
        ));
        assert!(matches!(
            Triangulation::from_text("  \n# nothing\n"),
            Err(TriError::Parse { .. })
        ));
    }

    #[test]
    fn subdivision_of_ball() {
        let tri = Triangulation::from_text(BALL).unwrap();
        let sub = tri.stellar_subdivide(&[0]).unwrap();
        assert_eq!(sub.t(), 4);
        assert_eq!(sub.boundary_faces().len(), 4);
        assert_eq!(sub.euler_characteristic(), 1);
        assert_eq!(sub.boundary_surface()[0].euler, 2);
        assert!(sub.is_connected());
    }

    #[test]
    fn subdivision_of_figure_eight() {
        let tri = Triangulation::from_text(FIG8_IDEAL).unwrap();
        let sub = tri.stellar_subdivide(&[0, 1]).unwrap();
        assert_eq!(sub.t(), 8);
        assert_eq!(sub.cusps().len(), 1);
        // two new interior vertices from the subdivision centers
        assert_eq!(sub.vertex_classes().len(), 3);
        assert_eq!(sub.euler_characteristic(), 0);
        assert!(sub.is_connected());
    }

    #[test]
    fn subdivision_rejects_bad_targets() {
        let tri = Triangulation::from_text(BALL).unwrap();
        assert_eq!(
            tri.stellar_subdivide(&[]),
            Err(TriError::BadSubdivisionTargets)
        );
        assert_eq!(
            tri.stellar_subdivide(&[1]),
            Err(TriError::BadSubdivisionTargets)
        );
    }

    #[test]
    fn text_round_trip() {
        for (name, tri) in corpus() {
            let back = Triangulation::from_text(&tri.to_text()).unwrap();
            assert_eq!(tri, back, "{name}");
        }
    }

    #[test]
    fn json_round_trip() {
        let tri = Triangulation::from_text(FIG8_IDEAL).unwrap();
        let from_json = Triangulation::parse_str(FIG8_IDEAL_JSON).unwrap();
        assert_eq!(tri, from_json);
        for (name, tri) in corpus() {
            let js = serde_json::to_string(&tri).unwrap();
            let back: Triangulation = serde_json::from_str(&js).unwrap();
            assert_eq!(tri, back, "{name}");
        }
    }

    // Independent recounts: triangle classes from the slot/pair formula, and
    // edge classes from the Euler relation chi(M) = chi(boundary M)/2, which
    // avoids the edge-orbit machinery entirely.
    #[test]
    fn class_counts_two_ways() {
        for (name, tri) in corpus() {
            let t = tri.t() as i64;
            let b = tri.boundary_faces().len() as i64;
            assert_eq!(tri.face_classes().len() as i64, (4 * t + b) / 2, "{name}");

            let bd_chi: i64 = tri.boundary_surface().iter().map(|c| c.euler).sum();
            let ideal_adjust: i64 = (0..tri.vertex_classes().len())
                .filter(|&c| {
                    matches!(tri.vertex_kind(c), VertexKind::Cusp | VertexKind::Ideal)
                })
                .map(|c| tri.vertex_link_chi(c) - 1)
                .sum();
            let expected_cell_chi = bd_chi / 2 - ideal_adjust;
            let e_from_euler = tri.vertex_classes().len() as i64 + tri.face_classes().len() as i64
                - t
                - expected_cell_chi;
            assert_eq!(tri.edge_classes().len() as i64, e_from_euler, "{name}");
        }
    }

    #[test]
    fn edge_orientations_are_coherent() {
        for (name, tri) in corpus() {
            for (class, members) in tri.edge_classes().iter().enumerate() {
                for &(i, a, b) in members {
                    assert_eq!(tri.edge_class_of(i, a, b), (class, 1), "{name}");
                    assert_eq!(tri.edge_class_of(i, b, a), (class, -1), "{name}");
                }
            }
            let total: usize = tri.edge_classes().iter().map(Vec::len).sum();
            assert_eq!(total, 6 * tri.t(), "{name}");
        }
    }
}
