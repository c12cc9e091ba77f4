//! Shared helpers for integration tests.
//!
//! `brute_force_vertex_rays` is deliberately independent of the library's
//! incremental enumerator: it scans every integer point of a bounded box,
//! keeps the solutions of the matching system, and certifies extremality by a
//! rank computation on the tight constraints. Slow, but trustworthy on small
//! triangulations; enumeration tests compare the fast path against it.

use std::collections::BTreeSet;

use tautfiber::snf::{self, Mat};
use tautfiber::{NormalCoordinates, Triangulation};

/// All primitive extreme rays of the matching cone whose primitive integer
/// representative has every coordinate at most `bound`, in ascending
/// lexicographic order.
pub fn brute_force_vertex_rays(tri: &Triangulation, bound: i128) -> Vec<NormalCoordinates> {
    let system = tautfiber::normal::matching_system(tri);
    let n = system.n_coords;
    let eqs = &system.equations;

    // An equation can be checked as soon as its highest-index coordinate has
    // been assigned; bucketing them by that index prunes the scan early.
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(i, j, k, l)) in eqs.iter().enumerate() {
        ready[i.max(j).max(k).max(l)].push(e);
    }

    let mut x = vec![0i128; n];
    let mut solutions: Vec<Vec<i128>> = Vec::new();
    scan(0, bound, &mut x, eqs, &ready, &mut solutions);

    let a = system.as_matrix();
    let mut rays: BTreeSet<Vec<i128>> = BTreeSet::new();
    for sol in solutions {
        if is_extreme(&a, &sol) {
            rays.insert(NormalCoordinates(sol).primitive().0);
        }
    }
    rays.into_iter().map(NormalCoordinates).collect()
}

fn scan(
    d: usize,
    bound: i128,
    x: &mut Vec<i128>,
    eqs: &[(usize, usize, usize, usize)],
    ready: &[Vec<usize>],
    out: &mut Vec<Vec<i128>>,
) {
    if d == x.len() {
        if x.iter().any(|&v| v != 0) {
            out.push(x.clone());
        }
        return;
    }
    'values: for v in 0..=bound {
        x[d] = v;
        for &e in &ready[d] {
            let (i, j, k, l) = eqs[e];
            if x[i] + x[j] != x[k] + x[l] {
                continue 'values;
            }
        }
        scan(d + 1, bound, x, eqs, ready, out);
    }
    x[d] = 0;
}

/// A nonzero solution spans an extreme ray of `{a x = 0, x >= 0}` exactly
/// when the tight constraints (all equations plus the vanishing coordinates)
/// cut out a line, i.e. have rank `n - 1`.
fn is_extreme(a: &Mat, sol: &[i128]) -> bool {
    let n = sol.len();
    let mut rows: Vec<Vec<i128>> = (0..a.rows()).map(|r| a.row(r).to_vec()).collect();
    for (idx, &v) in sol.iter().enumerate() {
        if v == 0 {
            let mut unit = vec![0i128; n];
            unit[idx] = 1;
            rows.push(unit);
        }
    }
    if rows.is_empty() {
        return n == 1;
    }
    snf::rank(&Mat::from_rows(rows)) == n - 1
}
