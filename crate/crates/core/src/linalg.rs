//! Dense exact linear algebra over any [`Scalar`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalars::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Reduced row echelon form by Gauss–Jordan elimination. Pivots are taken
    /// column by column, choosing the first row with a nonzero entry.
    pub fn rref(&self) -> Rref<S> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub(&f.mul(pv));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Kernel basis: one vector per free column, with that coordinate 1 and the
    /// other free coordinates 0, in increasing column order.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        self.rref().kernel()
    }

    /// Some solution of `self · x = b`, with free coordinates set to zero.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let red = aug.rref();
        if red.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (i, &p) in red.pivots.iter().enumerate() {
            x[p] = red.matrix.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, S::one());
        }
        let red = aug.rref();
        if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.matrix.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Clone)]
pub struct Rref<S: Scalar> {
    pub matrix: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel(&self) -> Vec<Vec<S>> {
        let n = self.matrix.ncols();
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); n];
                v[f] = S::one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    v[p] = self.matrix.get(i, f).neg();
                }
                v
            })
            .collect()
    }

    /// Reduces `v` against the pivot rows; the result has zeros in every
    /// pivot column.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut out = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let f = out[p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let r = self.matrix.get(i, j);
                if !r.is_zero() {
                    *o = o.sub(&f.mul(r));
                }
            }
        }
        out
    }

    /// Coordinates of `v` in terms of the nonzero rows, if `v` lies in the
    /// row space.
    pub fn row_coordinates(&self, v: &[S]) -> Option<Vec<S>> {
        let coords: Vec<S> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let rem = self.reduce(v);
        rem.iter().all(S::is_zero).then_some(coords)
    }
}

/// Rank by fraction-free (Bareiss) elimination over the integers.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Clears denominators row by row so a rational matrix can be fed to
/// [`bareiss_rank`].
pub fn integer_rows(m: &Matrix<crate::scalars::Rational>) -> Vec<Vec<BigInt>> {
    (0..m.nrows())
        .map(|i| {
            let row = m.row(i);
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect()
}

/// Smith normal form of an integer matrix: returns `(u, d, v)` with
/// `u · a · v = d`, `u` and `v` unimodular and `d` diagonal with
/// nonnegative entries, each dividing the next.
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let ident = |k: usize| -> Vec<Vec<BigInt>> {
        (0..k)
            .map(|i| (0..k).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect()
    };
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut u = ident(m);
    let mut v = ident(n);

    let row_op = |mat: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        let s = mat[src].clone();
        for (x, y) in mat[dst].iter_mut().zip(s) {
            *x -= f * y;
        }
    };
    let col_op = |mat: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        for row in mat.iter_mut() {
            let y = row[src].clone();
            row[dst] -= f * y;
        }
    };
    let swap_cols = |mat: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in mat.iter_mut() {
            row.swap(a, b);
        }
    };

    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j].is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..m {
            if d[i][t].is_zero() {
                continue;
            }
            let q = d[i][t].div_floor(&d[t][t]);
            row_op(&mut d, i, t, &q);
            row_op(&mut u, i, t, &q);
            if !d[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            if d[t][j].is_zero() {
                continue;
            }
            let q = d[t][j].div_floor(&d[t][t]);
            col_op(&mut d, j, t, &q);
            col_op(&mut v, j, t, &q);
            if !d[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the rest of the block by the pivot.
        let mut bad = None;
        'outer: for i in t + 1..m {
            for j in t + 1..n {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    bad = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad {
            let neg_one = -BigInt::one();
            row_op(&mut d, t, i, &neg_one);
            row_op(&mut u, t, i, &neg_one);
            continue;
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    (u, d, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|x| x == &int(0)));
        assert_eq!(bareiss_rank(&integer_rows(&a)), 2);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.solve(&[int(3), int(2)]), Some(vec![int(1), int(1)]));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(m(&[&[1, 2], &[2, 4]]).solve(&[int(1), int(1)]), None);
        assert_eq!(
            m(&[&[2, 0], &[0, 0]]).solve(&[int(1), int(0)]),
            Some(vec![rat(1, 2), int(0)])
        );
    }

    #[test]
    fn smith_form() {
        let a = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (u, d, v) = smith_normal_form(&a);
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            (0..x.len())
                .map(|i| {
                    (0..y[0].len())
                        .map(|j| (0..y.len()).map(|k| &x[i][k] * &y[k][j]).sum())
                        .collect()
                })
                .collect()
        };
        assert_eq!(mul(&mul(&u, &a), &v), d);
        let diag: Vec<BigInt> = (0..3).map(|i| d[i][i].clone()).collect();
        assert_eq!(diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }
}
