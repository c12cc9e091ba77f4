//! Enumeration of vertex surfaces by exact incremental double description.
//!
//! Starting from the unit rays of the positive orthant, the matching
//! equations are intersected one hyperplane at a time: rays on the hyperplane
//! survive, rays strictly on one side are dropped, and every *adjacent*
//! (positive, negative) pair contributes the primitive ray where its span
//! meets the hyperplane. After the last equation the surviving rays are
//! exactly the extreme rays of `{x : A x = 0, x >= 0}`.
//!
//! Adjacency is decided combinatorially: two rays are adjacent iff no third
//! ray vanishes everywhere both of them vanish; a popcount prefilter on the
//! shared zero coordinates discards most pairs first. All arithmetic is exact
//! (checked `i128`), and rays are reduced to primitive vectors as they are
//! created. The next hyperplane is chosen dynamically — among the still
//! violated equations, the one minimizing `|positive| * |negative|` wins,
//! ties broken by equation index — so runs are fully deterministic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::normal::{is_admissible, matching_system, NormalCoordinates, NormalError};
use crate::snf::{self, cadd, cmul};
use crate::tri::Triangulation;

/// Cap on the ray count carried between insertion steps (and on the final
/// answer) used by [`enumerate_vertex_surfaces`].
pub const DEFAULT_RAY_BUDGET: usize = 400_000;

/// A primitive extreme ray of the matching cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSurface {
    pub coords: NormalCoordinates,
    /// Whether the ray has at most one quadrilateral type per tetrahedron.
    pub admissible: bool,
}

/// All vertex surfaces, in ascending lexicographic coordinate order, with the
/// default intermediate-ray budget.
pub fn enumerate_vertex_surfaces(tri: &Triangulation) -> Result<Vec<VertexSurface>, NormalError> {
    enumerate_vertex_surfaces_with_budget(tri, DEFAULT_RAY_BUDGET)
}

/// As [`enumerate_vertex_surfaces`], but failing with
/// [`NormalError::ResourceBudgetExceeded`] as soon as more than `cap` rays
/// would have to be carried.
pub fn enumerate_vertex_surfaces_with_budget(
    tri: &Triangulation,
    cap: usize,
) -> Result<Vec<VertexSurface>, NormalError> {
    run_dd(tri, cap, false)
}

/// The admissible vertex surfaces only, in ascending lexicographic order.
///
/// Equivalent to filtering [`enumerate_vertex_surfaces`] but exponentially
/// cheaper on larger triangulations: a ray is combined from two others only
/// if the union of their supports still has at most one quadrilateral type
/// per tetrahedron. A conic sum's support is the union of its parents', so
/// admissible rays only ever have admissible ancestors, and any third ray
/// witnessing non-adjacency of such a pair lies inside the union support and
/// is therefore itself admissible — pruning is exact for this subset.
pub fn enumerate_admissible_vertex_surfaces(
    tri: &Triangulation,
) -> Result<Vec<VertexSurface>, NormalError> {
    enumerate_admissible_vertex_surfaces_with_budget(tri, DEFAULT_RAY_BUDGET)
}

/// As [`enumerate_admissible_vertex_surfaces`], with an explicit budget.
pub fn enumerate_admissible_vertex_surfaces_with_budget(
    tri: &Triangulation,
    cap: usize,
) -> Result<Vec<VertexSurface>, NormalError> {
    run_dd(tri, cap, true)
}

fn run_dd(
    tri: &Triangulation,
    cap: usize,
    admissible_only: bool,
) -> Result<Vec<VertexSurface>, NormalError> {
    let system = matching_system(tri);
    let n = system.n_coords;
    let a = system.as_matrix();
    let rank_a = snf::rank(&a);
    let rows: Vec<Vec<i128>> = (0..a.rows()).map(|r| a.row(r).to_vec()).collect();

    let mut rays: Vec<Ray> = (0..n)
        .map(|i| {
            let mut y = vec![0i128; n];
            y[i] = 1;
            Ray::new(y)
        })
        .collect();
    check_budget(rays.len(), cap)?;

    // Insert equations in "one tetrahedron at a time" order: every prefix of
    // the insertion sequence then constrains a partially glued submanifold,
    // which keeps intermediate ray counts small (layered tables explode under
    // most other orders). Once every ray satisfies an equation, conic
    // combinations keep satisfying it, so a single ordered pass suffices.
    let mut ordered: Vec<usize> = (0..rows.len()).collect();
    ordered.sort_by_key(|&c| {
        let (i, _, k, _) = system.equations[c];
        ((i / 7).max(k / 7), (i / 7).min(k / 7))
    });
    let trace = std::env::var_os("TAUTFIBER_DD_TRACE").is_some();

    for (step, &c) in ordered.iter().enumerate() {
        if rays.is_empty() {
            break;
        }
        let row = &rows[c];
        let vals: Vec<i128> = if rays.len() > 2048 {
            rays.par_iter().map(|r| dot(row, &r.y)).collect()
        } else {
            rays.iter().map(|r| dot(row, &r.y)).collect()
        };
        if vals.iter().all(|&v| v == 0) {
            continue;
        }
        rays = cut_with_hyperplane(rays, &vals, n, rank_a, cap, admissible_only)?;
        if trace {
            eprintln!(
                "dd: eq {c} inserted ({} of {}), {} rays",
                step + 1,
                ordered.len(),
                rays.len()
            );
        }
    }

    let mut out: Vec<VertexSurface> = rays
        .into_iter()
        .map(|r| {
            debug_assert!(r.y.iter().any(|&v| v > 0));
            let coords = NormalCoordinates(r.y).primitive();
            VertexSurface {
                admissible: is_admissible(&coords),
                coords,
            }
        })
        .collect();
    out.sort_by(|a, b| a.coords.0.cmp(&b.coords.0));
    out.dedup_by(|a, b| a.coords == b.coords);
    Ok(out)
}

struct Ray {
    y: Vec<i128>,
    /// Bit `i` set iff coordinate `i` vanishes.
    zero: Vec<u64>,
}

impl Ray {
    fn new(y: Vec<i128>) -> Ray {
        let mut zero = vec![0u64; y.len().div_ceil(64)];
        for (i, &v) in y.iter().enumerate() {
            if v == 0 {
                zero[i / 64] |= 1 << (i % 64);
            }
        }
        Ray { y, zero }
    }
}

fn check_budget(rays: usize, cap: usize) -> Result<(), NormalError> {
    if rays > cap {
        Err(NormalError::ResourceBudgetExceeded { rays, cap })
    } else {
        Ok(())
    }
}

/// One double-description step: intersect the current cone with the
/// hyperplane whose values on the rays are `vals`.
fn cut_with_hyperplane(
    rays: Vec<Ray>,
    vals: &[i128],
    n: usize,
    rank_a: usize,
    cap: usize,
    admissible_only: bool,
) -> Result<Vec<Ray>, NormalError> {
    let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
    let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();

    // The pair pass examines |pos| * |neg| candidates without materializing
    // them; abandon the run when that count dwarfs the budget, since the
    // adjacency scans would then dominate everything else.
    let pair_count = pos.len().saturating_mul(neg.len());
    if pair_count > cap.saturating_mul(64) {
        return Err(NormalError::ResourceBudgetExceeded {
            rays: pair_count / 64,
            cap,
        });
    }

    let combine = |p: usize, q: usize| -> Option<Ray> {
        let common: Vec<u64> = rays[p]
            .zero
            .iter()
            .zip(&rays[q].zero)
            .map(|(a, b)| a & b)
            .collect();
        // A sum of nonnegative vectors vanishes exactly where both parents
        // do, so `common` is already the candidate's zero set. Rank bound: a
        // 2-face needs tight constraints of rank n-2, and only the shared
        // zero coordinates plus the matching equations are available.
        let count: usize = common.iter().map(|w| w.count_ones() as usize).sum();
        if count + rank_a + 2 < n {
            return None;
        }
        if admissible_only && !quad_support_ok(&common, n) {
            return None;
        }
        if !adjacent(&rays, p, q, &common) {
            return None;
        }
        // vals[p] * ray_q - vals[q] * ray_p lands on the hyperplane and is a
        // positive combination of the two parents, hence stays in the orthant.
        let (vp, vq) = (vals[p], vals[q]);
        let mut y: Vec<i128> = (0..n)
            .map(|j| cadd(cmul(vp, rays[q].y[j]), -cmul(vq, rays[p].y[j])))
            .collect();
        primitive(&mut y);
        Some(Ray::new(y))
    };
    let fresh: Vec<Ray> = if pos.len().saturating_mul(neg.len()) > 256 {
        pos.par_iter()
            .flat_map_iter(|&p| neg.iter().filter_map(move |&q| combine(p, q)))
            .collect()
    } else {
        pos.iter()
            .flat_map(|&p| neg.iter().filter_map(move |&q| combine(p, q)))
            .collect()
    };

    let mut kept: Vec<Ray> = Vec::new();
    for (i, r) in rays.into_iter().enumerate() {
        if vals[i] == 0 {
            kept.push(r);
        }
    }
    kept.extend(fresh);
    check_budget(kept.len(), cap)?;
    Ok(kept)
}

/// Combinatorial adjacency: the rays' common zero set must not fit inside
/// any third ray's zero set.
fn adjacent(rays: &[Ray], p: usize, q: usize, common: &[u64]) -> bool {
    for (i, r) in rays.iter().enumerate() {
        if i == p || i == q {
            continue;
        }
        if common.iter().zip(&r.zero).all(|(c, z)| c & !z == 0) {
            return false;
        }
    }
    true
}

/// Whether a zero set leaves at most one quadrilateral type with nonzero
/// coordinate in every tetrahedron (coordinates `7i+4 .. 7i+6`).
fn quad_support_ok(zero: &[u64], n: usize) -> bool {
    let bit = |i: usize| zero[i / 64] >> (i % 64) & 1;
    (0..n / 7).all(|tet| bit(7 * tet + 4) + bit(7 * tet + 5) + bit(7 * tet + 6) >= 2)
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| cadd(acc, cmul(x, y)))
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive(v: &mut [i128]) {
    let g = v.iter().fold(0, |acc, &x| gcd(acc, x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}
