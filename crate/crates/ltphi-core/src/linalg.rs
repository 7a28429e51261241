//! Dense matrices over `o_L` with Smith normal form.
//!
//! All rank and kernel decisions are taken over `o_L / pi^tol`: an entry
//! with valuation at least `tol` pi-digits counts as zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{Field, Q, Scalar, INF};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Mat {
    fld: &'static Field,
    rows: usize,
    cols: usize,
    a: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(fld: &'static Field, rows: usize, cols: usize) -> Mat {
        Mat { fld, rows, cols, a: vec![fld.zero(); rows * cols] }
    }

    pub fn identity(fld: &'static Field, n: usize) -> Mat {
        let mut m = Mat::zeros(fld, n, n);
        for i in 0..n {
            m.set(i, i, fld.one());
        }
        m
    }

    pub fn scalar(fld: &'static Field, n: usize, s: Scalar) -> Mat {
        let mut m = Mat::zeros(fld, n, n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    /// Matrix with the given columns, each of length `rows`.
    pub fn from_cols(fld: &'static Field, rows: usize, cols: &[Vec<Scalar>]) -> Mat {
        let mut m = Mat::zeros(fld, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate().take(rows) {
                m.set(i, j, *x);
            }
        }
        m
    }

    pub fn field(&self) -> &'static Field {
        self.fld
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.a[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix shapes");
        let mut r = Mat::zeros(self.fld, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x.is_exact_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let y = o.get(k, j);
                    if !y.is_exact_zero() {
                        let t = r.get(i, j) + x * y;
                        r.set(i, j, t);
                    }
                }
            }
        }
        r
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                let mut s = self.fld.zero();
                for (j, xj) in x.iter().enumerate().take(self.cols) {
                    let a = self.get(i, j);
                    if !a.is_exact_zero() && !xj.is_exact_zero() {
                        s = s + a * *xj;
                    }
                }
                s
            })
            .collect()
    }

    fn zip(&self, o: &Mat, f: impl Fn(Scalar, Scalar) -> Scalar) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shapes");
        Mat { fld: self.fld, rows: self.rows, cols: self.cols, a: self.a.iter().zip(&o.a).map(|(x, y)| f(*x, *y)).collect() }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.zip(o, |x, y| x - y)
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        Mat { a: self.a.iter().map(|x| *x * *s).collect(), ..self.clone() }
    }

    pub fn transpose(&self) -> Mat {
        let mut r = Mat::zeros(self.fld, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(j, i, self.get(i, j));
            }
        }
        r
    }

    /// `[self | o]`.
    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows, "matrix shapes");
        let mut r = Mat::zeros(self.fld, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(i, j, self.get(i, j));
            }
            for j in 0..o.cols {
                r.set(i, self.cols + j, o.get(i, j));
            }
        }
        r
    }

    /// `[self ; o]`.
    pub fn vstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.cols, "matrix shapes");
        let mut a = self.a.clone();
        a.extend_from_slice(&o.a);
        Mat { fld: self.fld, rows: self.rows + o.rows, cols: self.cols, a }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut r = Mat::zeros(self.fld, idx.len(), self.cols);
        for (ri, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                r.set(ri, j, self.get(i, j));
            }
        }
        r
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut r = Mat::zeros(self.fld, self.rows, idx.len());
        for i in 0..self.rows {
            for (rj, &j) in idx.iter().enumerate() {
                r.set(i, rj, self.get(i, j));
            }
        }
        r
    }

    /// Smallest entry valuation; infinite for a matrix that vanishes.
    pub fn min_val(&self) -> Q {
        self.a.iter().filter(|x| !x.is_zero()).map(|x| x.val()).min().unwrap_or(Q::from_integer(INF as i64))
    }

    /// Smallest entry valuation, counting entries that vanish to their
    /// precision at that precision; certifies `self = 0 mod p^result`.
    pub fn residual(&self) -> Q {
        self.a.iter().map(|x| if x.is_zero() { x.prec_q() } else { x.val() }).min().unwrap_or(Q::from_integer(INF as i64))
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.cols {
                self.a.swap(i * self.cols + j, k * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, k: usize) {
        if i != k {
            for r in 0..self.rows {
                self.a.swap(r * self.cols + i, r * self.cols + k);
            }
        }
    }

    /// `row_i -= c * row_k`.
    fn row_axpy(&mut self, i: usize, k: usize, c: Scalar) {
        for j in 0..self.cols {
            let y = self.get(k, j);
            if !y.is_exact_zero() {
                let t = self.get(i, j) - c * y;
                self.set(i, j, t);
            }
        }
    }

    fn col_axpy(&mut self, i: usize, k: usize, c: Scalar) {
        for r in 0..self.rows {
            let y = self.get(r, k);
            if !y.is_exact_zero() {
                let t = self.get(r, i) - c * y;
                self.set(r, i, t);
            }
        }
    }
}

/// `U A V = D` with `U`, `V` invertible over `o_L` and `D` diagonal with
/// valuations ascending.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Mat,
    pub v: Mat,
    pub u_inv: Mat,
    /// Diagonal entries up to the rank.
    pub diag: Vec<Scalar>,
    pub rank: usize,
}

impl Snf {
    /// Valuations of the nonzero elementary divisors.
    pub fn divisors(&self) -> Vec<Q> {
        self.diag.iter().map(|d| d.val()).collect()
    }

    pub fn all_units(&self) -> bool {
        self.diag.iter().all(|d| d.v() == 0)
    }
}

fn is_small(x: &Scalar, tol: i32) -> bool {
    x.is_zero() || x.v() >= tol
}

pub fn snf(a: &Mat, tol: i32) -> Result<Snf> {
    let fld = a.fld;
    let (r, c) = (a.rows, a.cols);
    let mut m = a.clone();
    let mut u = Mat::identity(fld, r);
    let mut u_inv = Mat::identity(fld, r);
    let mut v = Mat::identity(fld, c);
    let mut diag = Vec::new();
    for k in 0..r.min(c) {
        let mut best: Option<(usize, usize, i32)> = None;
        for i in k..r {
            for j in k..c {
                let x = m.get(i, j);
                if is_small(&x, tol) {
                    continue;
                }
                if best.is_none_or(|b| x.v() < b.2) {
                    best = Some((i, j, x.v()));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        m.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        m.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let p = m.get(k, k);
        let pinv = p.inv()?;
        for i in k + 1..r {
            let x = m.get(i, k);
            if x.is_exact_zero() {
                continue;
            }
            let q = x * pinv;
            m.row_axpy(i, k, q);
            u.row_axpy(i, k, q);
            // U^-1 <- U^-1 E^-1 with E^-1 adding q * col_i to col_k.
            u_inv.col_axpy(k, i, -q);
        }
        for j in k + 1..c {
            let x = m.get(k, j);
            if x.is_exact_zero() {
                continue;
            }
            let q = x * pinv;
            m.col_axpy(j, k, q);
            v.col_axpy(j, k, q);
        }
        diag.push(p);
    }
    let rank = diag.len();
    Ok(Snf { u, v, u_inv, diag, rank })
}

/// Saturated basis (as columns) of `{x : A x = 0 mod pi^tol}`.
pub fn kernel(a: &Mat, tol: i32) -> Result<Mat> {
    let s = snf(a, tol)?;
    let idx: Vec<usize> = (s.rank..a.cols).collect();
    Ok(s.v.select_cols(&idx))
}

/// Saturated basis of `span(cols) (x) K` intersected with `o^n`.
pub fn saturate(a: &Mat, tol: i32) -> Result<Mat> {
    let s = snf(a, tol)?;
    let idx: Vec<usize> = (0..s.rank).collect();
    Ok(s.u_inv.select_cols(&idx))
}

pub fn rank(a: &Mat, tol: i32) -> Result<usize> {
    Ok(snf(a, tol)?.rank)
}

/// Saturated lattice `span(cols)` with a solver for coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub basis: Mat,
    snf: Snf,
    tol: i32,
}

impl Lattice {
    /// `basis` must have saturated span (elementary divisors all units).
    pub fn new(basis: Mat, tol: i32) -> Result<Lattice> {
        let s = snf(&basis, tol)?;
        if s.rank < basis.cols || !s.all_units() {
            return Err(Error::NoSolution("lattice basis is not saturated".into()));
        }
        Ok(Lattice { basis, snf: s, tol })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    /// Coordinates `Y` with `basis * Y = X` and the residual valuation of
    /// the part of `X` outside the lattice.
    pub fn coords(&self, x: &Mat) -> Result<(Mat, Q)> {
        let k = self.basis.cols;
        let ux = self.snf.u.mul(x);
        let fld = x.fld;
        let mut y = Mat::zeros(fld, k, x.cols);
        for i in 0..k {
            let dinv = self.snf.diag[i].inv()?;
            for j in 0..x.cols {
                y.set(i, j, ux.get(i, j) * dinv);
            }
        }
        let y = self.snf.v.mul(&y);
        let out: Vec<usize> = (k..x.rows).collect();
        let residual = ux.select_rows(&out).residual();
        Ok((y, residual))
    }

    pub fn tol(&self) -> i32 {
        self.tol
    }
}

/// Structure of `span(S) / span(B)` for `B` inside the saturated `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    /// Valuations of the torsion elementary divisors (units dropped).
    pub torsion: Vec<Q>,
    pub free_rank: usize,
    /// Residual valuation of `B` outside `S`.
    pub leak: Q,
}

pub fn subquotient(s: &Lattice, b: &Mat) -> Result<Subquotient> {
    let (y, leak) = s.coords(b)?;
    let f = snf(&y, s.tol)?;
    let torsion = f.diag.iter().filter(|d| d.v() > 0).map(|d| d.val()).collect();
    Ok(Subquotient { torsion, free_rank: s.dim() - f.rank, leak })
}
