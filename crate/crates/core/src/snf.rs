//! Dense integer matrices and Smith normal form with transform tracking.
//!
//! Everything downstream (homology, abelianizations, cover certificates)
//! reduces to exact integer linear algebra on incidence-sized matrices, so a
//! simple dense representation over `i128` with checked arithmetic is enough;
//! boundary/relator matrices have tiny entries and the gcd-pivot reduction
//! keeps coefficients small in practice. Overflow panics rather than
//! silently wrapping.

use std::fmt;
use std::ops::{Index, IndexMut};

pub(crate) fn cadd(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("integer overflow in matrix arithmetic")
}

pub(crate) fn cmul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("integer overflow in matrix arithmetic")
}

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = cadd(out[(i, j)], cmul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| cadd(acc, cmul(a, b)))
            })
            .collect()
    }

    /// Submatrix keeping the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(r, c)];
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }

    /// row dst += c * row src
    fn row_axpy(&mut self, dst: usize, src: usize, c: i128) {
        for j in 0..self.cols {
            self[(dst, j)] = cadd(self[(dst, j)], cmul(c, self[(src, j)]));
        }
    }

    /// col dst += c * col src
    fn col_axpy(&mut self, dst: usize, src: usize, c: i128) {
        for i in 0..self.rows {
            self[(i, dst)] = cadd(self[(i, dst)], cmul(c, self[(i, src)]));
        }
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `s = u * a * v` with unimodular `u`, `v` and tracked
/// inverses. The diagonal of `s` lists the invariant factors in divisibility
/// order followed by zeros.
pub struct Snf {
    pub s: Mat,
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
    pub rank: usize,
}

impl Snf {
    /// Nonzero diagonal entries d1 | d2 | ... (all positive).
    pub fn invariant_factors(&self) -> Vec<i128> {
        (0..self.rank).map(|k| self.s[(k, k)]).collect()
    }

    /// Basis of the integer kernel lattice of `a`, as matrix columns.
    pub fn kernel_basis(&self) -> Mat {
        let n = self.v.cols();
        let all_rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (self.rank..n).collect();
        self.v.select(&all_rows, &cols)
    }

    /// Coordinates of `w` in the column basis of `v`; entries `rank..` are
    /// the kernel coordinates when `w` lies in the kernel of `a`.
    pub fn v_coords(&self, w: &[i128]) -> Vec<i128> {
        self.v_inv.mul_vec(w)
    }
}

pub fn smith(a: &Mat) -> Snf {
    let mut s = a.clone();
    let (m, n) = (s.rows(), s.cols());
    let mut u = Mat::identity(m);
    let mut u_inv = Mat::identity(m);
    let mut v = Mat::identity(n);
    let mut v_inv = Mat::identity(n);

    // elementary ops keep u * a * v == s and the tracked inverses exact
    macro_rules! rswap {
        ($i:expr, $j:expr) => {{
            s.swap_rows($i, $j);
            u.swap_rows($i, $j);
            u_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! cswap {
        ($i:expr, $j:expr) => {{
            s.swap_cols($i, $j);
            v.swap_cols($i, $j);
            v_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! raxpy {
        ($dst:expr, $src:expr, $c:expr) => {{
            s.row_axpy($dst, $src, $c);
            u.row_axpy($dst, $src, $c);
            u_inv.col_axpy($src, $dst, -$c);
        }};
    }
    macro_rules! caxpy {
        ($dst:expr, $src:expr, $c:expr) => {{
            s.col_axpy($dst, $src, $c);
            v.col_axpy($dst, $src, $c);
            v_inv.row_axpy($src, $dst, -$c);
        }};
    }

    let mut k = 0;
    while k < m.min(n) {
        // smallest nonzero entry of the trailing submatrix as pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if s[(i, j)] != 0
                    && pivot.is_none_or(|(pi, pj)| s[(i, j)].abs() < s[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        rswap!(k, pi);
        cswap!(k, pj);

        'reduce: loop {
            for i in (k + 1)..m {
                if s[(i, k)] != 0 {
                    let q = s[(i, k)].div_euclid(s[(k, k)]);
                    raxpy!(i, k, -q);
                    if s[(i, k)] != 0 {
                        // remainder is smaller than the pivot; promote it
                        rswap!(k, i);
                        continue 'reduce;
                    }
                }
            }
            for j in (k + 1)..n {
                if s[(k, j)] != 0 {
                    let q = s[(k, j)].div_euclid(s[(k, k)]);
                    caxpy!(j, k, -q);
                    if s[(k, j)] != 0 {
                        cswap!(k, j);
                        continue 'reduce;
                    }
                }
            }
            // enforce divisibility of the trailing block by the pivot
            for i in (k + 1)..m {
                for j in (k + 1)..n {
                    if s[(i, j)] % s[(k, k)] != 0 {
                        raxpy!(k, i, 1);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        if s[(k, k)] < 0 {
            s.negate_row(k);
            u.negate_row(k);
            u_inv.negate_col(k);
        }
        k += 1;
    }

    Snf {
        rank: k,
        s,
        u,
        u_inv,
        v,
        v_inv,
    }
}

/// Rank of an integer matrix (over the rationals).
pub fn rank(a: &Mat) -> usize {
    smith(a).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &Mat) {
        let snf = smith(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert_eq!(snf.u.mul(&snf.u_inv), Mat::identity(a.rows()));
        assert_eq!(snf.v.mul(&snf.v_inv), Mat::identity(a.cols()));
        let fac = snf.invariant_factors();
        for w in fac.windows(2) {
            assert_eq!(w[1] % w[0], 0, "factors must divide: {fac:?}");
        }
        for k in 0..snf.rank {
            assert!(snf.s[(k, k)] > 0);
        }
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j || i >= snf.rank {
                    assert_eq!(snf.s[(i, j)], 0);
                }
            }
        }
        // kernel columns really are killed by a
        let ker = snf.kernel_basis();
        assert!(a.mul(&ker).is_zero());
    }

    #[test]
    fn known_forms() {
        let a = Mat::from_rows(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(smith(&a).invariant_factors(), vec![2, 4]);

        let a = Mat::from_rows(vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(smith(&a).rank, 0);

        // relator matrix of Z/4: one generator, one relator
        let a = Mat::from_rows(vec![vec![4]]);
        assert_eq!(smith(&a).invariant_factors(), vec![4]);

        let a = Mat::from_rows(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        let snf = smith(&a);
        assert_eq!(snf.rank, 2);
        assert_eq!(snf.invariant_factors(), vec![1, 3]);
        check(&a);
    }

    proptest! {
        #[test]
        fn snf_contract_holds(rows in 1usize..5, cols in 1usize..5,
                              seed in proptest::collection::vec(-9i128..=9, 25)) {
            let a = Mat::from_rows(
                (0..rows).map(|i| (0..cols).map(|j| seed[i * cols + j]).collect()).collect(),
            );
            check(&a);
        }
    }
}
