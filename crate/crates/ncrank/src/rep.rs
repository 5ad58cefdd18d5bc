//! Quiver representations, subrepresentations, path matrices, and the
//! subrepresentation-closure sweep.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{DimensionVector, Path, Quiver};
use crate::subspace::{apply_image, Subspace};

/// An assignment of a vector space dimension to every vertex and a matrix of
/// shape `dims(head) x dims(tail)` to every arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation<F: Field> {
    field: F,
    quiver: Quiver,
    dims: DimensionVector,
    maps: Vec<Matrix<F>>,
}

impl<F: Field> Representation<F> {
    pub fn new(
        field: F,
        quiver: Quiver,
        dims: DimensionVector,
        maps: Vec<Matrix<F>>,
    ) -> Result<Self> {
        if dims.len() != quiver.vertex_count() {
            return Err(Error::validation(
                "dimension vector does not match the vertex set",
            ));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(Error::validation("one matrix per arrow is required"));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            let (want_r, want_c) = (dims.get(a.head), dims.get(a.tail));
            if m.rows() != want_r || m.cols() != want_c {
                return Err(Error::validation(format!(
                    "map for arrow {:?} has shape {}x{}, expected {}x{}",
                    a.name,
                    m.rows(),
                    m.cols(),
                    want_r,
                    want_c
                )));
            }
        }
        Ok(Representation {
            field,
            quiver,
            dims,
            maps,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn map(&self, arrow: usize) -> &Matrix<F> {
        &self.maps[arrow]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.total()
    }

    /// Composite matrix of a path; the identity for a lazy path.
    pub fn path_matrix(&self, p: &Path) -> Matrix<F> {
        let mut m = Matrix::identity(self.field.clone(), self.dims.get(p.start));
        for &a in &p.arrows {
            m = self.maps[a].mul(&m);
        }
        m
    }

    /// All paths from `x` to `y` with their matrices. Finite because the
    /// quiver is acyclic; a cyclic quiver is a structured error.
    pub fn path_matrices(&self, x: usize, y: usize) -> Result<Vec<(Path, Matrix<F>)>> {
        if !self.quiver.is_acyclic() {
            return Err(Error::CyclicQuiver);
        }
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(x, Vec::new())];
        while let Some((v, arrows_so_far)) = stack.pop() {
            if v == y {
                let p = Path {
                    start: x,
                    arrows: arrows_so_far.clone(),
                };
                let m = self.path_matrix(&p);
                out.push((p, m));
            }
            // Push in reverse so lower arrow indices are explored first.
            for (i, a) in self.quiver.arrows().iter().enumerate().rev() {
                if a.tail == v {
                    let mut next = arrows_so_far.clone();
                    next.push(i);
                    stack.push((a.head, next));
                }
            }
        }
        Ok(out)
    }
}

/// Vertex-wise subspaces; the closure condition (every arrow maps the tail
/// space into the head space) is what [`is_subrep`] checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subrep<F: Field> {
    spaces: Vec<Subspace<F>>,
}

impl<F: Field> Subrep<F> {
    pub fn new(spaces: Vec<Subspace<F>>) -> Self {
        Subrep { spaces }
    }

    pub fn zero(rep: &Representation<F>) -> Self {
        let spaces = (0..rep.quiver().vertex_count())
            .map(|v| Subspace::zero(rep.field().clone(), rep.dims().get(v)))
            .collect();
        Subrep { spaces }
    }

    pub fn full(rep: &Representation<F>) -> Self {
        let spaces = (0..rep.quiver().vertex_count())
            .map(|v| Subspace::full(rep.field().clone(), rep.dims().get(v)))
            .collect();
        Subrep { spaces }
    }

    pub fn space(&self, v: usize) -> &Subspace<F> {
        &self.spaces[v]
    }

    pub fn spaces(&self) -> &[Subspace<F>] {
        &self.spaces
    }

    pub fn dims(&self) -> DimensionVector {
        DimensionVector::new(self.spaces.iter().map(|s| s.dim()).collect())
    }

    /// Vertex-wise containment.
    pub fn contained_in(&self, other: &Subrep<F>) -> bool {
        self.spaces
            .iter()
            .zip(&other.spaces)
            .all(|(a, b)| b.contains(a))
    }

    pub fn meet(&self, other: &Subrep<F>) -> Result<Subrep<F>> {
        let spaces = self
            .spaces
            .iter()
            .zip(&other.spaces)
            .map(|(a, b)| a.intersect(b))
            .collect::<Result<_>>()?;
        Ok(Subrep { spaces })
    }

    pub fn join(&self, other: &Subrep<F>) -> Result<Subrep<F>> {
        let spaces = self
            .spaces
            .iter()
            .zip(&other.spaces)
            .map(|(a, b)| a.sum(b))
            .collect::<Result<_>>()?;
        Ok(Subrep { spaces })
    }
}

/// Check the defining closure condition of a subrepresentation.
pub fn is_subrep<F: Field>(rep: &Representation<F>, spaces: &[Subspace<F>]) -> bool {
    debug_assert_eq!(spaces.len(), rep.quiver().vertex_count());
    rep.quiver().arrows().iter().enumerate().all(|(i, a)| {
        let image = apply_image(rep.map(i), &spaces[a.tail]).expect("shapes validated");
        spaces[a.head].contains(&image)
    })
}

/// Smallest subrepresentation containing every seed: sweep `W'(ha) += W(a) W'(ta)`
/// over all arrows, at most `total_dim` times, exiting early on a clean sweep.
pub fn subrep_closure<F: Field>(rep: &Representation<F>, seeds: &[Subspace<F>]) -> Subrep<F> {
    assert_eq!(seeds.len(), rep.quiver().vertex_count());
    for (v, s) in seeds.iter().enumerate() {
        assert_eq!(s.ambient_dim(), rep.dims().get(v), "seed ambient mismatch");
    }
    let mut spaces: Vec<Subspace<F>> = seeds.to_vec();
    // Dimensions can grow at most total_dim times overall; one extra sweep
    // confirms stability.
    let max_sweeps = rep.total_dim() + 1;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for (i, a) in rep.quiver().arrows().iter().enumerate() {
            let image = apply_image(rep.map(i), &spaces[a.tail]).expect("shapes validated");
            if !spaces[a.head].contains(&image) {
                spaces[a.head] = spaces[a.head].sum(&image).expect("same ambient");
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(is_subrep(rep, &spaces));
    Subrep { spaces }
}

/// Dimension vector of the factor `W / W'`.
pub fn factor_dims<F: Field>(rep: &Representation<F>, sub: &Subrep<F>) -> Result<DimensionVector> {
    for (i, a) in rep.quiver().arrows().iter().enumerate() {
        let image = apply_image(rep.map(i), sub.space(a.tail))?;
        if !sub.space(a.head).contains(&image) {
            return Err(Error::InvalidSubrepresentation {
                arrow: a.name.clone(),
            });
        }
    }
    Ok(rep.dims().sub(&sub.dims()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::quiver::Weight;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    /// The 3-arrow Kronecker representation from the skew-symmetric pencil.
    fn eq1_rep() -> Representation<PrimeField> {
        let f = f101();
        let a1 = Matrix::from_i64(f, &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        let a2 = Matrix::from_i64(f, &[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]]);
        let a3 = Matrix::from_i64(f, &[&[0, 0, 0], &[0, 0, 1], &[0, -1, 0]]);
        Representation::new(
            f,
            Quiver::kronecker(3),
            DimensionVector::new(vec![3, 3]),
            vec![a1, a2, a3],
        )
        .unwrap()
    }

    fn line_rep(maps: &[&[&[i64]]], dims: Vec<usize>) -> Representation<PrimeField> {
        let f = f101();
        let n = dims.len();
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let arrows = (0..n - 1)
            .map(|i| (format!("a{i}"), format!("v{i}"), format!("v{}", i + 1)))
            .collect();
        let q = Quiver::new(vertices, arrows).unwrap();
        let ms = maps.iter().map(|m| Matrix::from_i64(f, m)).collect();
        Representation::new(f, q, DimensionVector::new(dims), ms).unwrap()
    }

    #[test]
    fn shape_validation() {
        let f = f101();
        let q = Quiver::kronecker(1);
        let bad = Representation::new(
            f,
            q,
            DimensionVector::new(vec![2, 2]),
            vec![Matrix::zeros(f, 3, 2)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn path_matrices_examples() {
        let rep = eq1_rep();
        // x = y: just the lazy path with the identity.
        let at_x = rep.path_matrices(0, 0).unwrap();
        assert_eq!(at_x.len(), 1);
        assert!(at_x[0].0.is_empty());
        assert_eq!(at_x[0].1, Matrix::identity(f101(), 3));

        // Kronecker: the three single-arrow paths, in arrow order.
        let across = rep.path_matrices(0, 1).unwrap();
        assert_eq!(across.len(), 3);
        for (i, (p, m)) in across.iter().enumerate() {
            assert_eq!(p.arrows, vec![i]);
            assert_eq!(m, rep.map(i));
        }

        // Path quiver x -> y -> z: the single composite W(b) W(a).
        let rep2 = line_rep(
            &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]],
            vec![2, 2, 2],
        );
        let paths = rep2.path_matrices(0, 2).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].1, rep2.map(1).mul(rep2.map(0)));
    }

    #[test]
    fn path_count_matches_adjacency_powers() {
        // Diamond with a shortcut: count paths x -> z by hand.
        let f = f101();
        let q = Quiver::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![
                ("a".into(), "x".into(), "y".into()),
                ("b".into(), "y".into(), "z".into()),
                ("c".into(), "x".into(), "z".into()),
                ("d".into(), "x".into(), "y".into()),
            ],
        )
        .unwrap();
        let dims = DimensionVector::new(vec![1, 1, 1]);
        let one = Matrix::from_i64(f, &[&[1]]);
        let rep = Representation::new(
            f,
            q,
            dims,
            vec![one.clone(), one.clone(), one.clone(), one],
        )
        .unwrap();
        // Paths x -> z: a*b, d*b, c = 3; adjacency powers give 2 + 1.
        assert_eq!(rep.path_matrices(0, 2).unwrap().len(), 3);
        assert_eq!(rep.path_matrices(0, 0).unwrap().len(), 1);
        assert_eq!(rep.path_matrices(2, 0).unwrap().len(), 0);
    }

    #[test]
    fn cyclic_quiver_is_rejected_for_paths() {
        let f = f101();
        let q = Quiver::new(
            vec!["x".into(), "y".into()],
            vec![
                ("a".into(), "x".into(), "y".into()),
                ("b".into(), "y".into(), "x".into()),
            ],
        )
        .unwrap();
        let one = Matrix::from_i64(f, &[&[1]]);
        let rep = Representation::new(
            f,
            q,
            DimensionVector::new(vec![1, 1]),
            vec![one.clone(), one],
        )
        .unwrap();
        assert!(matches!(
            rep.path_matrices(0, 1),
            Err(Error::CyclicQuiver)
        ));
    }

    #[test]
    fn is_subrep_examples() {
        let rep = eq1_rep();
        assert!(is_subrep(&rep, Subrep::zero(&rep).spaces()));
        assert!(is_subrep(&rep, Subrep::full(&rep).spaces()));

        // (span(e1), 0) fails: the image of a line under the skew family has
        // dimension 2, never 0.
        let f = f101();
        let spaces = vec![
            Subspace::from_rows(&Matrix::from_i64(f, &[&[1, 0, 0]])),
            Subspace::zero(f, 3),
        ];
        assert!(!is_subrep(&rep, &spaces));
    }

    #[test]
    fn closure_examples() {
        let rep = eq1_rep();
        let zero_seeds = Subrep::zero(&rep);
        assert_eq!(
            subrep_closure(&rep, zero_seeds.spaces()),
            zero_seeds
        );
        let full_seeds = Subrep::full(&rep);
        assert_eq!(subrep_closure(&rep, full_seeds.spaces()), full_seeds);

        // Path quiver with identity maps: a line at the source propagates.
        let rep2 = line_rep(
            &[&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]],
            vec![2, 2, 2],
        );
        let f = f101();
        let line = Subspace::from_rows(&Matrix::from_i64(f, &[&[1, 0]]));
        let seeds = vec![line.clone(), Subspace::zero(f, 2), Subspace::zero(f, 2)];
        let closed = subrep_closure(&rep2, &seeds);
        for v in 0..3 {
            assert_eq!(closed.space(v), &line);
        }
    }

    #[test]
    fn closure_is_minimal_brute_force() {
        // Over F2 with small total dimension, check that dropping any basis
        // vector from the closure breaks containment-of-seeds or closedness.
        let f = PrimeField::new(2).unwrap();
        let q = Quiver::kronecker(2);
        let m1 = Matrix::from_i64(f, &[&[1, 0], &[0, 0]]);
        let m2 = Matrix::from_i64(f, &[&[0, 1], &[1, 0]]);
        let rep = Representation::new(
            f,
            q,
            DimensionVector::new(vec![2, 2]),
            vec![m1, m2],
        )
        .unwrap();
        let seed = Subspace::from_rows(&Matrix::from_i64(f, &[&[1, 0]]));
        let seeds = vec![seed.clone(), Subspace::zero(f, 2)];
        let closed = subrep_closure(&rep, &seeds);
        assert!(is_subrep(&rep, closed.spaces()));
        assert!(closed.space(0).contains(&seed));
        // Brute force: every strictly smaller choice of vertex spaces fails.
        let subs0 = crate::oracle::enumerate_subspaces(&f, 2).unwrap();
        for s0 in &subs0 {
            for s1 in &subs0 {
                let cand = vec![s0.clone(), s1.clone()];
                let smaller = closed.space(0).contains(s0)
                    && closed.space(1).contains(s1)
                    && (s0.dim() < closed.space(0).dim() || s1.dim() < closed.space(1).dim());
                if smaller && s0.contains(&seed) {
                    assert!(!is_subrep(&rep, &cand));
                }
            }
        }
    }

    #[test]
    fn factor_dims_examples() {
        let rep = eq1_rep();
        assert_eq!(
            factor_dims(&rep, &Subrep::zero(&rep)).unwrap(),
            *rep.dims()
        );
        assert_eq!(
            factor_dims(&rep, &Subrep::full(&rep)).unwrap(),
            DimensionVector::zero(2)
        );

        // Closing span(e1) at the source gives a (1, 2) subrepresentation,
        // so the factor has dimensions (2, 1).
        let f = f101();
        let seeds = vec![
            Subspace::from_rows(&Matrix::from_i64(f, &[&[1, 0, 0]])),
            Subspace::zero(f, 3),
        ];
        let sub = subrep_closure(&rep, &seeds);
        assert_eq!(sub.dims(), DimensionVector::new(vec![1, 2]));
        assert_eq!(
            factor_dims(&rep, &sub).unwrap(),
            DimensionVector::new(vec![2, 1])
        );

        // An invalid family of spaces is a structured error.
        let bad = Subrep::new(vec![
            Subspace::from_rows(&Matrix::from_i64(f, &[&[1, 0, 0]])),
            Subspace::zero(f, 3),
        ]);
        assert!(matches!(
            factor_dims(&rep, &bad),
            Err(Error::InvalidSubrepresentation { .. })
        ));
    }

    #[test]
    fn sigma_of_closure_stays_consistent() {
        let rep = eq1_rep();
        let sigma = Weight::new(vec![1, -1]);
        let full = Subrep::full(&rep);
        assert_eq!(crate::quiver::sigma_value(&sigma, &full.dims()), 0);
    }
}
