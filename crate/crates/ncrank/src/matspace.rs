//! Matrix spaces and the non-commutative rank machinery: tensor blow-ups,
//! Wong sequences, shrunk-subspace certificates, and the certified randomized
//! rank computation.
//!
//! Correctness never rests on the random choices: a returned certificate is
//! re-checkable (`dim U - dim A(U) = c` bounds the rank from above, the
//! exhibited blow-up element bounds it from below, and the two meet).

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::rng::seeded_rng;
use crate::subspace::{preimage, Subspace};

/// Span of a finite list of equal-shape matrices. The basis is a spanning
/// set; linear independence is not required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpace<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    basis: Vec<Matrix<F>>,
}

/// Certificate that `u` is shrunk: the whole space maps `u` into `image`,
/// and `c = dim u - dim image`. `minimal` marks the Wong-derived minimal
/// certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrunkCertificate<F: Field> {
    pub u: Subspace<F>,
    pub image: Subspace<F>,
    pub c: usize,
    pub minimal: bool,
}

impl<F: Field> ShrunkCertificate<F> {
    /// Re-check the certificate against the space it talks about.
    pub fn verify(&self, space: &MatrixSpace<F>) -> bool {
        if self.u.ambient_dim() != space.cols() || self.image.ambient_dim() != space.rows() {
            return false;
        }
        match space.space_image(&self.u) {
            Ok(im) => im == self.image && self.u.dim() == self.image.dim() + self.c,
            Err(_) => false,
        }
    }
}

/// Configuration for the randomized certified search.
#[derive(Debug, Clone)]
pub struct NcrkConfig {
    pub seed: u64,
    pub max_retries: u32,
    /// Expert override of the blow-up size; disables escalation.
    pub blowup_d: Option<usize>,
    /// Extra blow-up sizes to try after `max_retries` failures at each level.
    /// Needed over very small fields, where maximal-rank elements may not
    /// exist at the generic bound.
    pub escalation_rounds: u32,
}

impl Default for NcrkConfig {
    fn default() -> Self {
        NcrkConfig {
            seed: 0,
            max_retries: 8,
            blowup_d: None,
            escalation_rounds: 4,
        }
    }
}

impl NcrkConfig {
    pub fn with_seed(seed: u64) -> Self {
        NcrkConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcrkTrace {
    pub d: usize,
    pub seed: u64,
    pub attempts: u32,
}

#[derive(Debug, Clone)]
pub struct NcrkOutcome<F: Field> {
    pub rank: usize,
    pub cert: ShrunkCertificate<F>,
    /// A maximal-rank element of the blow-up that certifies the lower bound.
    pub witness: Option<Matrix<F>>,
    pub trace: NcrkTrace,
}

/// Shrunk certificate living in the blow-up, before pull-back.
#[derive(Debug, Clone)]
pub(crate) struct BlowupCertificate<F: Field> {
    pub d: usize,
    pub u: Subspace<F>,
    pub c: usize,
    pub element: Matrix<F>,
    pub attempts: u32,
}

/// Anything that can push a subspace forward through a space of maps.
/// Implemented by plain spaces and by the implicit blow-up view.
pub(crate) trait SpaceOps<F: Field> {
    fn field(&self) -> &F;
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn image(&self, u: &Subspace<F>) -> Subspace<F>;
}

impl<F: Field> MatrixSpace<F> {
    pub fn new(field: F, rows: usize, cols: usize, basis: Vec<Matrix<F>>) -> Result<Self> {
        for m in &basis {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix space basis",
                    expected: rows * cols,
                    got: m.rows() * m.cols(),
                });
            }
        }
        Ok(MatrixSpace {
            field,
            rows,
            cols,
            basis,
        })
    }

    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        MatrixSpace {
            field,
            rows,
            cols,
            basis: Vec::new(),
        }
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

    pub fn basis(&self) -> &[Matrix<F>] {
        &self.basis
    }

    pub fn min_dim(&self) -> usize {
        self.rows.min(self.cols)
    }

    /// Image of `u` under the whole space: the sum of the basis images.
    pub fn space_image(&self, u: &Subspace<F>) -> Result<Subspace<F>> {
        if u.ambient_dim() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "space_image",
                expected: self.cols,
                got: u.ambient_dim(),
            });
        }
        let f = self.field.clone();
        if u.is_zero() || self.basis.is_empty() {
            return Ok(Subspace::zero(f, self.rows));
        }
        let mut rows = Vec::with_capacity(self.basis.len() * u.dim());
        for a in &self.basis {
            let imaged = u.basis().mul(&a.transpose());
            for r in 0..imaged.rows() {
                rows.push(imaged.row(r).to_vec());
            }
        }
        Ok(Subspace::from_row_vecs(f, self.rows, rows))
    }

    /// The d-th tensor blow-up, materialized: basis `{E_kl (x) A_i}` in
    /// `(k, l, i)` order, shape `(d*rows, d*cols)`.
    pub fn blow_up(&self, d: usize) -> MatrixSpace<F> {
        assert!(d >= 1, "blow-up size must be at least 1");
        let f = self.field.clone();
        let mut basis = Vec::with_capacity(d * d * self.basis.len());
        for k in 0..d {
            for l in 0..d {
                for a in &self.basis {
                    let mut big = Matrix::zeros(f.clone(), d * self.rows, d * self.cols);
                    big.set_block(k * self.rows, l * self.cols, a);
                    basis.push(big);
                }
            }
        }
        MatrixSpace {
            field: f,
            rows: d * self.rows,
            cols: d * self.cols,
            basis,
        }
    }

    /// Linear combination of the basis with the given coefficients.
    pub fn element_from_coeffs(&self, coeffs: &[F::Elem]) -> Matrix<F> {
        assert_eq!(coeffs.len(), self.basis.len());
        let f = &self.field;
        let mut out = Matrix::zeros(self.field.clone(), self.rows, self.cols);
        for (c, a) in coeffs.iter().zip(&self.basis) {
            if f.is_zero(c) {
                continue;
            }
            out = out.add(&a.scale(c));
        }
        out
    }

    /// Seeded random element; the zero matrix for an empty basis.
    pub fn random_element(&self, rng: &mut dyn RngCore) -> Matrix<F> {
        let coeffs: Vec<F::Elem> = (0..self.basis.len())
            .map(|_| self.field.sample(rng))
            .collect();
        self.element_from_coeffs(&coeffs)
    }

    /// The second Wong sequence `W_0 = 0, W_{i+1} = A(a^{-1}(W_i))`,
    /// returned up to and including the stabilized limit.
    pub fn wong_sequence(&self, a: &Matrix<F>) -> Result<Vec<Subspace<F>>> {
        wong_chain(self, a)
    }

    pub fn wong_limit(&self, a: &Matrix<F>) -> Result<Subspace<F>> {
        Ok(self.wong_sequence(a)?.pop().expect("chain is nonempty"))
    }

    /// When the Wong limit lies inside the image of `a`, pull it back to the
    /// minimal shrunk certificate; otherwise `a` was not of maximal rank in
    /// the space and the caller should retry.
    pub fn shrunk_from_wong(&self, a: &Matrix<F>) -> Result<Option<ShrunkCertificate<F>>> {
        shrunk_from_wong_impl(self, a)
    }

    /// Non-commutative rank with a re-checkable certificate, by the
    /// randomized blow-up + Wong-sequence search. For a rectangular space
    /// this computes `cols - max(dim U - dim A(U))`.
    pub fn ncrk(&self, cfg: &NcrkConfig) -> Result<NcrkOutcome<F>> {
        // A handful of outer rounds guard the (theoretically impossible)
        // case of a pull-back failing verification.
        let mut counter_base = 0u32;
        let mut last_err = None;
        for _round in 0..3 {
            let search = match self.blowup_shrunk_search(cfg, counter_base) {
                Ok(s) => s,
                Err(e) => return Err(self.map_small_field(e)),
            };
            counter_base = search.attempts;
            let d = search.d;
            if search.c % d != 0 {
                // Blow-up discrepancies are divisible by d; a violation can
                // only mean the field was too small for the theory to apply.
                last_err = Some(self.small_field_error());
                continue;
            }
            let c = search.c / d;
            let u = pull_back_plain(&search.u, d, self.cols, &self.field);
            let image = self.space_image(&u)?;
            if u.dim() != image.dim() + c {
                last_err = Some(Error::Internal(
                    "blow-up certificate failed to pull back to tensor form".into(),
                ));
                continue;
            }
            let cert = ShrunkCertificate {
                u,
                image,
                c,
                minimal: true,
            };
            debug_assert!(cert.verify(self));
            return Ok(NcrkOutcome {
                rank: self.cols - c,
                cert,
                witness: Some(search.element),
                trace: NcrkTrace {
                    d,
                    seed: cfg.seed,
                    attempts: search.attempts,
                },
            });
        }
        Err(last_err.expect("loop ran at least once"))
    }

    /// Best element rank found by seeded sampling; exact with high
    /// probability over fields comfortably larger than the dimensions.
    pub fn rank_of_space(&self, trials: u32, seed: u64) -> RankSample<F> {
        let mut best = 0usize;
        let mut witness = None;
        for t in 0..trials {
            let mut rng = seeded_rng(seed, t as u64);
            let a = self.random_element(&mut rng);
            let r = a.rank();
            if r > best {
                best = r;
                witness = Some(a);
                if best == self.min_dim() {
                    break;
                }
            }
        }
        RankSample {
            rank: best,
            witness,
            trials,
        }
    }

    /// Retry/escalation loop around the Wong search in the blow-up.
    pub(crate) fn blowup_shrunk_search(
        &self,
        cfg: &NcrkConfig,
        counter_start: u32,
    ) -> Result<BlowupCertificate<F>> {
        let d0 = cfg.blowup_d.unwrap_or_else(|| self.min_dim().saturating_sub(1).max(1));
        let rounds = if cfg.blowup_d.is_some() {
            1
        } else {
            cfg.escalation_rounds + 1
        };
        let mut counter = counter_start;
        let mut best_rank_bound = 0usize;
        let mut last_d = d0;
        for round in 0..rounds {
            let d = d0 + round as usize;
            last_d = d;
            let blown = Blown { base: self, d };
            for _ in 0..cfg.max_retries.max(1) {
                let mut rng = seeded_rng(cfg.seed, counter as u64);
                counter += 1;
                let a = blown.random_element(&mut rng);
                if let Some(cert) = shrunk_from_wong_impl(&blown, &a)? {
                    return Ok(BlowupCertificate {
                        d,
                        u: cert.u,
                        c: cert.c,
                        element: a,
                        attempts: counter,
                    });
                }
                // rk(a)/d is an unconditional lower bound for the rank.
                best_rank_bound = best_rank_bound.max(a.rank().div_ceil(d));
            }
        }
        Err(Error::RetriesExhausted {
            attempts: counter - counter_start,
            last_d,
            best_rank: best_rank_bound,
        })
    }

    fn small_field_error(&self) -> Error {
        let needed = 2 * self.min_dim() as u64;
        Error::FieldTooSmall {
            order: self.field.order().unwrap_or(u64::MAX),
            needed,
        }
    }

    /// Retries exhausting over a small field is almost certainly the field
    /// threshold, not bad luck; report it as such.
    fn map_small_field(&self, e: Error) -> Error {
        match (&e, self.field.order()) {
            (Error::RetriesExhausted { .. }, Some(q)) if q <= 2 * self.min_dim() as u64 => {
                self.small_field_error()
            }
            _ => e,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankSample<F: Field> {
    pub rank: usize,
    pub witness: Option<Matrix<F>>,
    pub trials: u32,
}

impl<F: Field> SpaceOps<F> for MatrixSpace<F> {
    fn field(&self) -> &F {
        &self.field
    }
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn image(&self, u: &Subspace<F>) -> Subspace<F> {
        self.space_image(u).expect("ambient checked by caller")
    }
}

/// Implicit view of the d-th blow-up. Images factor through the coordinate
/// slots, so they cost one small image plus a block-diagonal expansion
/// instead of `d^2 * m` big matrix products.
pub(crate) struct Blown<'a, F: Field> {
    pub base: &'a MatrixSpace<F>,
    pub d: usize,
}

impl<F: Field> Blown<'_, F> {
    /// Random element: every block `(k, l)` is an independent random element
    /// of the base space, matching the `(k, l, i)` coefficient order of the
    /// materialized blow-up.
    pub fn random_element(&self, rng: &mut dyn RngCore) -> Matrix<F> {
        let base = self.base;
        let f = base.field().clone();
        let mut out = Matrix::zeros(f, self.d * base.rows, self.d * base.cols);
        for k in 0..self.d {
            for l in 0..self.d {
                let block = base.random_element(rng);
                out.set_block(k * base.rows, l * base.cols, &block);
            }
        }
        out
    }
}

impl<F: Field> SpaceOps<F> for Blown<'_, F> {
    fn field(&self) -> &F {
        self.base.field()
    }
    fn rows(&self) -> usize {
        self.d * self.base.rows
    }
    fn cols(&self) -> usize {
        self.d * self.base.cols
    }
    fn image(&self, u: &Subspace<F>) -> Subspace<F> {
        let base = self.base;
        let f = base.field().clone();
        // (E_kl (x) A) u only sees slot l of u and writes into slot k, so the
        // image of the blown space is F^d tensored with the base image of the
        // sum of slot projections.
        let mut proj = Subspace::zero(f.clone(), base.cols);
        for l in 0..self.d {
            let slice = slot_projection(u, l, base.cols);
            proj = proj.sum(&slice).expect("same ambient");
        }
        let im = base.space_image(&proj).expect("ambient ok");
        tensor_with_standard_slots(&im, self.d, base.rows, &f)
    }
}

/// Project a subspace onto the coordinate window `[offset, offset + width)`.
pub(crate) fn project_coords<F: Field>(
    u: &Subspace<F>,
    offset: usize,
    width: usize,
) -> Subspace<F> {
    let f = u.field().clone();
    let rows: Vec<Vec<F::Elem>> = (0..u.dim())
        .map(|r| u.basis().row(r)[offset..offset + width].to_vec())
        .collect();
    Subspace::from_row_vecs(f, width, rows)
}

/// Project a subspace of `F^(d*width)` onto coordinate slot `l`.
pub(crate) fn slot_projection<F: Field>(
    u: &Subspace<F>,
    l: usize,
    width: usize,
) -> Subspace<F> {
    project_coords(u, l * width, width)
}

/// `F^d (x) X` inside `F^(d*width)`: the block-diagonal stacking of the RREF
/// basis of `X` is already canonical.
pub(crate) fn tensor_with_standard_slots<F: Field>(
    x: &Subspace<F>,
    d: usize,
    width: usize,
    field: &F,
) -> Subspace<F> {
    let k = x.dim();
    let mut big = Matrix::zeros(field.clone(), d * k, d * width);
    for s in 0..d {
        for r in 0..k {
            for c in 0..width {
                big[(s * k + r, s * width + c)] = x.basis()[(r, c)].clone();
            }
        }
    }
    Subspace::from_rref_basis(big)
}

/// Intersection of the slot projections: the pull-back of a minimal blow-up
/// certificate, which is of the form `F^d (x) U`.
fn pull_back_plain<F: Field>(u_d: &Subspace<F>, d: usize, cols: usize, field: &F) -> Subspace<F> {
    let mut acc = Subspace::full(field.clone(), cols);
    for l in 0..d {
        let p = slot_projection(u_d, l, cols);
        acc = acc.intersect(&p).expect("same ambient");
    }
    acc
}

fn wong_chain<F: Field, S: SpaceOps<F>>(space: &S, a: &Matrix<F>) -> Result<Vec<Subspace<F>>> {
    if a.rows() != space.rows() || a.cols() != space.cols() {
        return Err(Error::DimensionMismatch {
            context: "wong sequence element",
            expected: space.rows() * space.cols(),
            got: a.rows() * a.cols(),
        });
    }
    let f = space.field().clone();
    let mut chain = vec![Subspace::zero(f, space.rows())];
    // Strictly increasing until stable, so at most rows+1 entries.
    for _ in 0..space.rows() + 1 {
        let prev = chain.last().expect("nonempty");
        let next = space.image(&preimage(a, prev)?);
        if &next == prev {
            return Ok(chain);
        }
        debug_assert!(next.contains(prev), "Wong sequence must be monotone");
        chain.push(next);
    }
    Err(Error::Internal("Wong sequence failed to stabilize".into()))
}

fn shrunk_from_wong_impl<F: Field, S: SpaceOps<F>>(
    space: &S,
    a: &Matrix<F>,
) -> Result<Option<ShrunkCertificate<F>>> {
    let chain = wong_chain(space, a)?;
    let w_star = chain.last().expect("nonempty");
    if !a.column_space().contains(w_star) {
        return Ok(None);
    }
    let u = preimage(a, w_star)?;
    let image = space.image(&u);
    // Stabilization gives image == W*, hence c = dim ker a = cols - rk a.
    debug_assert_eq!(&image, w_star);
    let c = u.dim() - image.dim();
    debug_assert_eq!(c, space.cols() - a.rank());
    Ok(Some(ShrunkCertificate {
        u,
        image,
        c,
        minimal: true,
    }))
}
