//! Dense matrices over an exact field, with reduced row echelon form,
//! kernels, and generalized inverses. Entries are stored row-major.

use std::ops::{Index, IndexMut};

use crate::field::Field;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Output of [`Matrix::rref`]: the unique reduced row echelon form together
/// with the rank and the strictly increasing pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref<F: Field> {
    pub matrix: Matrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn new(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Matrix::new(field, rows, cols, data)
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = m.field.one();
        }
        m
    }

    /// Build from signed integers, reducing into the field.
    pub fn from_i64(field: F, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for v in *row {
                data.push(field.from_i64(*v));
            }
        }
        Matrix::new(field, r, c, data)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.field.is_zero(e))
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut out = Matrix::zeros(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.field.add(a, b))
            .collect();
        Matrix::new(self.field.clone(), self.rows, self.cols, data)
    }

    pub fn scale(&self, k: &F::Elem) -> Matrix<F> {
        let data = self.data.iter().map(|a| self.field.mul(a, k)).collect();
        Matrix::new(self.field.clone(), self.rows, self.cols, data)
    }

    pub fn neg(&self) -> Matrix<F> {
        let data = self.data.iter().map(|a| self.field.neg(a)).collect();
        Matrix::new(self.field.clone(), self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            self.cols, other.rows,
            "inner dimensions must agree for multiplication"
        );
        let f = &self.field;
        let mut out = Matrix::zeros(self.field.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = f.mul(a, &other[(k, c)]);
                    out[(r, c)] = f.add(&out[(r, c)], &prod);
                }
            }
        }
        out
    }

    /// Apply to a column vector given as a slice.
    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for c in 0..self.cols {
                    acc = f.add(&acc, &f.mul(&self[(r, c)], &v[c]));
                }
                acc
            })
            .collect()
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<F>) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<F> {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Matrix::zeros(self.field.clone(), rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self[(r0 + r, c0 + c)].clone();
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix<F> {
        let mut out = Matrix::zeros(self.field.clone(), self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out[(r, k)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn take_rows(&self, n: usize) -> Matrix<F> {
        assert!(n <= self.rows);
        Matrix::new(
            self.field.clone(),
            n,
            self.cols,
            self.data[..n * self.cols].to_vec(),
        )
    }

    /// `[self | other]` side by side.
    pub fn hstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.field.clone(), self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    /// Kronecker product: block `(r, c)` of the result is `self[(r,c)] * other`.
    pub fn kron(&self, other: &Matrix<F>) -> Matrix<F> {
        let f = &self.field;
        let mut out = Matrix::zeros(
            self.field.clone(),
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = &self[(r, c)];
                if f.is_zero(a) {
                    continue;
                }
                for s in 0..other.rows {
                    for t in 0..other.cols {
                        out[(r * other.rows + s, c * other.cols + t)] = f.mul(a, &other[(s, t)]);
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form by Gauss-Jordan elimination. The result is
    /// the unique canonical form, which makes subspace equality bit-equality.
    pub fn rref(&self) -> Rref<F> {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !f.is_zero(&m[(i, c)])) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(&m[(r, c)]).expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = f.mul(&m[(r, j)], &inv);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(&m[(i, c)]) {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let sub = f.mul(&factor, &m[(r, j)]);
                    m[(i, j)] = f.sub(&m[(i, j)], &sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// The subspace `{ v : self * v = 0 }` of `F^cols`.
    pub fn kernel(&self) -> Subspace<F> {
        let f = self.field.clone();
        let Rref {
            matrix: r,
            rank,
            pivots,
        } = self.rref();
        let mut rows = Vec::new();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (i, &p) in pivots.iter().enumerate().take(rank) {
                v[p] = f.neg(&r[(i, free)]);
            }
            rows.push(v);
        }
        Subspace::from_row_vecs(f, self.cols, rows)
    }

    /// Column space as a subspace of `F^rows`.
    pub fn column_space(&self) -> Subspace<F> {
        Subspace::from_rows(&self.transpose())
    }

    /// A reflexive generalized inverse `B` with `self*B*self = self` and
    /// `B*self*B = B`, built from the rank factorization given by Gaussian
    /// elimination. `B` inverts `self` between its image and the span of the
    /// pivot coordinates (the fixed complement of the kernel), so the choice
    /// is deterministic.
    pub fn pseudo_inverse(&self) -> Matrix<F> {
        let f = self.field.clone();
        let Rref {
            matrix: r,
            rank,
            pivots,
        } = self.rref();
        if rank == 0 {
            return Matrix::zeros(f, self.cols, self.rows);
        }
        // self = C * R with C the pivot columns and R the nonzero rref rows.
        let c_mat = self.select_cols(&pivots);
        // G selects pivot coordinates: R * G = I.
        let mut g = Matrix::zeros(f.clone(), self.cols, rank);
        for (k, &p) in pivots.iter().enumerate() {
            g[(p, k)] = f.one();
        }
        // Row-reduce [C | I]; the first `rank` rows of the right block give
        // L with L * C = I.
        let aug = c_mat.hstack(&Matrix::identity(f.clone(), self.rows));
        let reduced = aug.rref().matrix;
        let l = reduced.submatrix(0, rank, rank, self.rows);
        debug_assert_eq!(r.take_rows(rank).mul(&g), Matrix::identity(f, rank));
        g.mul(&l)
    }
}

impl<F: Field> Index<(usize, usize)> for Matrix<F> {
    type Output = F::Elem;
    fn index(&self, (r, c): (usize, usize)) -> &F::Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<F: Field> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F::Elem {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
