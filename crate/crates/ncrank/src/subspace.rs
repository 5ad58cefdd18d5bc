//! Linear subspaces in canonical form: the row basis is kept in reduced row
//! echelon form, so equal subspaces compare bit-identical. That uniqueness is
//! what lets the Wong sequence detect stabilization by plain equality.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    /// RREF basis; `basis.rows() == dim`, pivot columns strictly increasing.
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
        }
    }

    /// Span of the rows of `m`, canonicalized.
    pub fn from_rows(m: &Matrix<F>) -> Self {
        let r = m.rref();
        Subspace {
            ambient: m.cols(),
            basis: r.matrix.take_rows(r.rank),
        }
    }

    pub fn from_row_vecs(field: F, ambient: usize, rows: Vec<Vec<F::Elem>>) -> Self {
        let data: Vec<F::Elem> = rows.iter().flatten().cloned().collect();
        let m = Matrix::new(field, rows.len(), ambient, data);
        Subspace::from_rows(&m)
    }

    /// Wrap a matrix already known to be a canonical RREF basis.
    pub(crate) fn from_rref_basis(basis: Matrix<F>) -> Self {
        debug_assert_eq!(basis.rref().matrix, basis);
        Subspace {
            ambient: basis.cols(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Reduce `v` against the basis; returns the residue.
    fn reduce_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field().clone();
        let mut v = v.to_vec();
        for r in 0..self.basis.rows() {
            let pivot = (0..self.ambient)
                .find(|&c| !f.is_zero(&self.basis[(r, c)]))
                .expect("basis rows are nonzero");
            if f.is_zero(&v[pivot]) {
                continue;
            }
            let factor = v[pivot].clone();
            for c in pivot..self.ambient {
                let s = f.mul(&factor, &self.basis[(r, c)]);
                v[c] = f.sub(&v[c], &s);
            }
        }
        v
    }

    pub fn contains_vec(&self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let f = self.field();
        self.reduce_vec(v).iter().all(|e| f.is_zero(e))
    }

    pub fn contains(&self, other: &Subspace<F>) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.dim()).all(|r| self.contains_vec(other.basis.row(r)))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut rows = Vec::with_capacity(self.dim() + other.dim());
        for r in 0..self.dim() {
            rows.push(self.basis.row(r).to_vec());
        }
        for r in 0..other.dim() {
            rows.push(other.basis.row(r).to_vec());
        }
        Ok(Subspace::from_row_vecs(
            self.field().clone(),
            self.ambient,
            rows,
        ))
    }

    /// Intersection via the kernel of `[Bu^T | -Bv^T]`: a kernel vector packs
    /// coefficients expressing one element two ways.
    pub fn intersect(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check_ambient(other)?;
        let f = self.field().clone();
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(f, self.ambient));
        }
        let stacked = self.basis.transpose().hstack(&other.basis.transpose().neg());
        let coeffs = stacked.kernel();
        let mut rows = Vec::with_capacity(coeffs.dim());
        for r in 0..coeffs.dim() {
            let w = coeffs.basis().row(r);
            let mut x = vec![f.zero(); self.ambient];
            for (i, a) in w.iter().take(self.dim()).enumerate() {
                for c in 0..self.ambient {
                    let s = f.mul(a, &self.basis[(i, c)]);
                    x[c] = f.add(&x[c], &s);
                }
            }
            rows.push(x);
        }
        Ok(Subspace::from_row_vecs(f, self.ambient, rows))
    }

    /// `{ y : B y = 0 }` for the basis matrix `B`; the annihilator under the
    /// standard pairing. Double annihilation recovers the space, which is the
    /// identity `preimage` relies on.
    pub fn annihilator(&self) -> Subspace<F> {
        self.basis.kernel()
    }

    fn check_ambient(&self, other: &Subspace<F>) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                context: "subspace operation",
                expected: self.ambient,
                got: other.ambient,
            });
        }
        Ok(())
    }
}

/// Image `m(u)` of a subspace under a linear map.
pub fn apply_image<F: Field>(m: &Matrix<F>, u: &Subspace<F>) -> Result<Subspace<F>> {
    if u.ambient_dim() != m.cols() {
        return Err(Error::DimensionMismatch {
            context: "apply_image",
            expected: m.cols(),
            got: u.ambient_dim(),
        });
    }
    // Rows of the image basis: (m * b^T)^T = b * m^T.
    Ok(Subspace::from_rows(&u.basis().mul(&m.transpose())))
}

/// Preimage `{ v : m v in w }`; always contains the kernel of `m`.
pub fn preimage<F: Field>(m: &Matrix<F>, w: &Subspace<F>) -> Result<Subspace<F>> {
    if w.ambient_dim() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: "preimage",
            expected: m.rows(),
            got: w.ambient_dim(),
        });
    }
    // m v lies in w iff y . (m v) = 0 for every annihilator row y.
    let y = w.annihilator();
    Ok(y.basis().mul(m).kernel())
}
