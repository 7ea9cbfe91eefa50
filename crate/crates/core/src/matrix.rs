//! Small dense matrices over a `Scalar`, row-major.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag((0..n).map(|_| S::one()).collect())
    }

    pub fn diag(d: Vec<S>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Determinant by elimination, pivoting on the largest `magnitude` in the column.
    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[(k, k)].magnitude();
            for i in k + 1..n {
                let m = a[(i, k)].magnitude();
                if m > best {
                    best = m;
                    piv = i;
                }
            }
            if best == 0.0 {
                return S::zero();
            }
            if piv != k {
                a.swap_rows(piv, k);
                det = -det;
            }
            let p = a[(k, k)].clone();
            det = det * p.clone();
            for i in k + 1..n {
                let f = a[(i, k)].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let mut piv = k;
            let mut best = a[(k, k)].magnitude();
            for i in k + 1..n {
                let m = a[(i, k)].magnitude();
                if m > best {
                    best = m;
                    piv = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            a.swap_rows(piv, k);
            inv.swap_rows(piv, k);
            let p = a[(k, k)].clone();
            for j in 0..n {
                a[(k, j)] = a[(k, j)].clone() / p.clone();
                inv[(k, j)] = inv[(k, j)].clone() / p.clone();
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                    let w = inv[(i, j)].clone() - f.clone() * inv[(k, j)].clone();
                    inv[(i, j)] = w;
                }
            }
        }
        Some(inv)
    }

    /// Rank by exact-style elimination (zero test via `magnitude`).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(piv) = (rank..self.rows).find(|&i| a[(i, col)].magnitude() > 0.0) else {
                continue;
            };
            a.swap_rows(piv, rank);
            let p = a[(rank, col)].clone();
            for i in rank + 1..self.rows {
                let f = a[(i, col)].clone() / p.clone();
                for j in col..self.cols {
                    let v = a[(i, j)].clone() - f.clone() * a[(rank, j)].clone();
                    a[(i, j)] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// First index where the two matrices differ.
    pub fn first_difference(&self, o: &Self) -> Option<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self[(i, j)] != o[(i, j)])
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out[(i, j)].clone() + a.clone() * o[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}
