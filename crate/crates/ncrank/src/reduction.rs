//! Reduction of (representation, weight) pairs to Kronecker-style matrix
//! spaces, and the two witness pipelines built on top of it.
//!
//! The reduced space maps the sigma-positive copies of the vertex spaces to
//! the sigma-negative ones, one block per path. A shrunk subspace of that
//! space decomposes into vertex components, which seed a subrepresentation
//! closure; the result is the minimal optimal witness for the weight.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::matspace::{
    project_coords, Blown, MatrixSpace, NcrkConfig, ShrunkCertificate, SpaceOps,
};
use crate::quiver::{sigma_value, Path, Weight};
use crate::rep::{is_subrep, subrep_closure, Representation, Subrep};
use crate::rng::seeded_rng;
use crate::subspace::Subspace;

/// One copy of a vertex space inside the reduced domain or codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub vertex: usize,
    pub copy: usize,
    pub offset: usize,
    pub width: usize,
}

/// Where each basis matrix of the reduced space lives: its domain slot, its
/// codomain slot, and the path whose matrix fills the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorLabel {
    pub domain_slot: usize,
    pub codomain_slot: usize,
    pub path: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub domain_slots: Vec<Slot>,
    pub codomain_slots: Vec<Slot>,
    pub generators: Vec<GeneratorLabel>,
    pub domain_dim: usize,
    pub codomain_dim: usize,
}

/// Copy-slot layout of one vertex inside a (possibly blown-up) domain.
#[derive(Debug, Clone)]
pub(crate) struct VertexSlots {
    pub vertex: usize,
    pub width: usize,
    pub offsets: Vec<usize>,
}

impl BlockStructure {
    /// Slot groups of the domain after blowing up by `d`: copy `(k, i)` of a
    /// vertex sits at `k * domain_dim + offset_i`.
    pub(crate) fn blown_domain_groups(&self, d: usize) -> Vec<VertexSlots> {
        group_slots(&self.domain_slots, self.domain_dim, d)
    }

    pub(crate) fn blown_codomain_groups(&self, d: usize) -> Vec<VertexSlots> {
        group_slots(&self.codomain_slots, self.codomain_dim, d)
    }
}

pub(crate) fn group_slots(slots: &[Slot], total: usize, d: usize) -> Vec<VertexSlots> {
    let mut groups: Vec<VertexSlots> = Vec::new();
    for s in slots {
        let entry = match groups.iter_mut().find(|g| g.vertex == s.vertex) {
            Some(g) => g,
            None => {
                groups.push(VertexSlots {
                    vertex: s.vertex,
                    width: s.width,
                    offsets: Vec::new(),
                });
                groups.last_mut().expect("just pushed")
            }
        };
        for k in 0..d {
            entry.offsets.push(k * total + s.offset);
        }
    }
    groups
}

/// Build the reduced matrix space of a weight: one block matrix per
/// (domain copy, codomain copy, path) triple, with the path matrix in the
/// block. For the Kronecker quiver with sigma = (1, -1) this recovers the
/// original span of the arrow matrices.
pub fn build_sigma_space<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
) -> Result<(MatrixSpace<F>, BlockStructure)> {
    let q = rep.quiver();
    if sigma.len() != q.vertex_count() {
        return Err(Error::validation("weight does not match the vertex set"));
    }
    if !q.is_acyclic() {
        return Err(Error::CyclicQuiver);
    }
    let mut domain_slots = Vec::new();
    let mut offset = 0usize;
    for x in 0..q.vertex_count() {
        for copy in 0..sigma.sigma_plus(x) {
            let width = rep.dims().get(x);
            domain_slots.push(Slot {
                vertex: x,
                copy,
                offset,
                width,
            });
            offset += width;
        }
    }
    let domain_dim = offset;

    let mut codomain_slots = Vec::new();
    let mut offset = 0usize;
    for y in 0..q.vertex_count() {
        for copy in 0..sigma.sigma_minus(y) {
            let width = rep.dims().get(y);
            codomain_slots.push(Slot {
                vertex: y,
                copy,
                offset,
                width,
            });
            offset += width;
        }
    }
    let codomain_dim = offset;

    let mut basis = Vec::new();
    let mut generators = Vec::new();
    for (di, ds) in domain_slots.iter().enumerate() {
        for (ci, cs) in codomain_slots.iter().enumerate() {
            for (path, m) in rep.path_matrices(ds.vertex, cs.vertex)? {
                let mut big = Matrix::zeros(rep.field().clone(), codomain_dim, domain_dim);
                big.set_block(cs.offset, ds.offset, &m);
                basis.push(big);
                generators.push(GeneratorLabel {
                    domain_slot: di,
                    codomain_slot: ci,
                    path,
                });
            }
        }
    }
    let space = MatrixSpace::new(rep.field().clone(), codomain_dim, domain_dim, basis)?;
    Ok((
        space,
        BlockStructure {
            domain_slots,
            codomain_slots,
            generators,
            domain_dim,
            codomain_dim,
        },
    ))
}

/// Decompose a shrunk subspace of the blown-up domain into vertex
/// components `W'(x)`.
///
/// The components are the sums of the copy projections. For a maximal-c
/// certificate of a reduced space this already is the tensor decomposition
/// (every generator is supported on a single block, so projecting cannot
/// shrink the image); if the dimension count disagrees, the subspace is
/// saturated by intersecting with copy-mixing endomorphisms until it splits.
pub fn saturate_shrunk<F: Field>(
    u: &Subspace<F>,
    bs: &BlockStructure,
    d: usize,
) -> Result<Vec<(usize, Subspace<F>)>> {
    let groups = bs.blown_domain_groups(d);
    decompose_by_slots(u, &groups)
}

pub(crate) fn decompose_by_slots<F: Field>(
    u: &Subspace<F>,
    groups: &[VertexSlots],
) -> Result<Vec<(usize, Subspace<F>)>> {
    let total: usize = groups.iter().map(|g| g.offsets.len() * g.width).sum();
    if u.ambient_dim() != total {
        return Err(Error::DimensionMismatch {
            context: "shrunk subspace decomposition",
            expected: total,
            got: u.ambient_dim(),
        });
    }
    let mut u = u.clone();
    let max_passes = u.dim() + 2;
    for _ in 0..max_passes {
        let parts = component_sums(&u, groups);
        let expected: usize = groups
            .iter()
            .zip(&parts)
            .map(|(g, (_, p))| g.offsets.len() * p.dim())
            .sum();
        if u.dim() == expected {
            return Ok(parts);
        }
        // Not in tensor form: intersect with invertible copy-mixing maps.
        // Each step preserves maximal-c shrunkness and weakly shrinks u.
        let before = u.dim();
        for t in mixing_generators(u.field(), groups, u.ambient_dim()) {
            let tu = crate::subspace::apply_image(&t, &u)?;
            u = u.intersect(&tu)?;
        }
        if u.dim() == before {
            let parts = component_sums(&u, groups);
            let expected: usize = groups
                .iter()
                .zip(&parts)
                .map(|(g, (_, p))| g.offsets.len() * p.dim())
                .sum();
            if u.dim() == expected {
                return Ok(parts);
            }
            return Err(Error::Internal(
                "shrunk subspace failed to saturate to tensor form".into(),
            ));
        }
    }
    Err(Error::Internal(
        "copy-mixing saturation did not stabilize".into(),
    ))
}

fn component_sums<F: Field>(
    u: &Subspace<F>,
    groups: &[VertexSlots],
) -> Vec<(usize, Subspace<F>)> {
    groups
        .iter()
        .map(|g| {
            let mut acc = Subspace::zero(u.field().clone(), g.width);
            for &off in &g.offsets {
                acc = acc
                    .sum(&project_coords(u, off, g.width))
                    .expect("same ambient");
            }
            (g.vertex, acc)
        })
        .collect()
}

/// Invertible generators spanning the copy-mixing endomorphism algebra:
/// transvections between copies, one two-by-two invertible unit pattern per
/// copy, and a scaling when the field has an element outside {0, 1}.
fn mixing_generators<F: Field>(
    field: &F,
    groups: &[VertexSlots],
    ambient: usize,
) -> Vec<Matrix<F>> {
    let mut out = Vec::new();
    let two = field.from_i64(2);
    let has_scaling = !field.is_zero(&two) && two != field.one();
    for g in groups {
        let k = g.offsets.len();
        if g.width == 0 {
            continue;
        }
        if k >= 2 {
            for i in 0..k {
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    // I + E_ij on the copies.
                    let mut t = Matrix::identity(field.clone(), ambient);
                    for c in 0..g.width {
                        t[(g.offsets[i] + c, g.offsets[j] + c)] = field.one();
                    }
                    out.push(t);
                }
            }
            for i in 0..k {
                let j = (i + 1) % k;
                // I - E_ii + E_ij + E_ji: invertible, and together with the
                // transvections it spans the matrix units.
                let mut t = Matrix::identity(field.clone(), ambient);
                for c in 0..g.width {
                    t[(g.offsets[i] + c, g.offsets[i] + c)] = field.zero();
                    t[(g.offsets[i] + c, g.offsets[j] + c)] = field.one();
                    t[(g.offsets[j] + c, g.offsets[i] + c)] = field.one();
                }
                out.push(t);
            }
        }
        if has_scaling {
            for i in 0..k {
                let mut t = Matrix::identity(field.clone(), ambient);
                for c in 0..g.width {
                    t[(g.offsets[i] + c, g.offsets[i] + c)] = two.clone();
                }
                out.push(t);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessAlgo {
    Reduced,
    Augmented,
}

impl WitnessAlgo {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessAlgo::Reduced => "reduced",
            WitnessAlgo::Augmented => "augmented",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTrace {
    pub algo: WitnessAlgo,
    pub d: usize,
    pub seed: u64,
    pub attempts: u32,
}

/// Outcome of a witness computation: the discrepancy, the minimal optimal
/// witness, and a shrunk certificate in the (un-blown) reduced space.
#[derive(Debug, Clone)]
pub struct WitnessReport<F: Field> {
    pub discrepancy: i64,
    pub witness: Subrep<F>,
    pub minimal: bool,
    pub certificate: ShrunkCertificate<F>,
    pub semistable: bool,
    pub trace: WitnessTrace,
}

/// Witness pipeline through the reduced space: blow up, find the minimal
/// shrunk subspace by the Wong sequence, decompose it into vertex
/// components, and close them into a subrepresentation.
pub fn optimal_witness<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
    cfg: &NcrkConfig,
) -> Result<WitnessReport<F>> {
    let (space, bs) = build_sigma_space(rep, sigma)?;
    let mut counter = 0u32;
    let mut last_err: Option<Error> = None;
    for _round in 0..3 {
        let search = match space.blowup_shrunk_search(cfg, counter) {
            Ok(s) => s,
            Err(e) => return Err(e),
        };
        counter = search.attempts;
        let d = search.d;
        if search.c % d != 0 {
            last_err = Some(Error::Internal(
                "blow-up discrepancy not divisible by d".into(),
            ));
            continue;
        }
        let c_expected = (search.c / d) as i64;
        let parts = saturate_shrunk(&search.u, &bs, d)?;
        match assemble_witness(
            rep,
            sigma,
            &space,
            &bs,
            &parts,
            c_expected,
            WitnessTrace {
                algo: WitnessAlgo::Reduced,
                d,
                seed: cfg.seed,
                attempts: search.attempts,
            },
        )? {
            Some(report) => return Ok(report),
            None => {
                last_err = Some(Error::Internal(
                    "witness closure disagreed with the shrunk certificate".into(),
                ));
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Internal("witness search failed".into())))
}

/// Close the decomposed components into a subrepresentation and cross-check
/// the discrepancy against the blow-up certificate. `None` asks the caller
/// to retry with fresh randomness.
fn assemble_witness<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
    space: &MatrixSpace<F>,
    bs: &BlockStructure,
    parts: &[(usize, Subspace<F>)],
    c_expected: i64,
    trace: WitnessTrace,
) -> Result<Option<WitnessReport<F>>> {
    let mut seeds: Vec<Subspace<F>> = (0..rep.quiver().vertex_count())
        .map(|v| Subspace::zero(rep.field().clone(), rep.dims().get(v)))
        .collect();
    for (v, s) in parts {
        seeds[*v] = s.clone();
    }
    let witness = subrep_closure(rep, &seeds);
    let c = sigma_value(sigma, &witness.dims());
    if c != c_expected {
        return Ok(None);
    }
    // Certificate in the un-blown reduced space.
    let u = embed_in_slots(&witness, &bs.domain_slots, bs.domain_dim, rep.field());
    let image = space.space_image(&u)?;
    if u.dim() as i64 - image.dim() as i64 != c {
        return Ok(None);
    }
    let certificate = ShrunkCertificate {
        u,
        image,
        c: c as usize,
        minimal: true,
    };
    let semistable = sigma_value(sigma, rep.dims()) == 0 && c == 0;
    Ok(Some(WitnessReport {
        discrepancy: c,
        witness,
        minimal: true,
        certificate,
        semistable,
        trace,
    }))
}

/// `⊕_x W'(x)^(copies of x)` laid out on the given slots.
fn embed_in_slots<F: Field>(
    sub: &Subrep<F>,
    slots: &[Slot],
    total: usize,
    field: &F,
) -> Subspace<F> {
    let mut rows = Vec::new();
    for s in slots {
        let sp = sub.space(s.vertex);
        for r in 0..sp.dim() {
            let mut v = vec![field.zero(); total];
            v[s.offset..s.offset + s.width].clone_from_slice(sp.basis().row(r));
            rows.push(v);
        }
    }
    Subspace::from_row_vecs(field.clone(), total, rows)
}

/// Witness pipeline through the augmented quiver: pick a blow-up element,
/// add one backward arrow per pseudo-inverse block, seed the kernel
/// projections at the positive vertices, and close. The result is accepted
/// only when the shrunk lower bound meets the rank upper bound, which makes
/// the answer exact regardless of the random choice.
pub fn augmented_witness<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
    cfg: &NcrkConfig,
) -> Result<WitnessReport<F>> {
    let (space, bs) = build_sigma_space(rep, sigma)?;
    let n_total = rep.total_dim();
    let d0 = cfg.blowup_d.unwrap_or_else(|| n_total.saturating_sub(1).max(1));
    let rounds = if cfg.blowup_d.is_some() {
        1
    } else {
        cfg.escalation_rounds + 1
    };
    let mut counter = 0u32;
    let mut best_rank_bound = 0usize;
    let mut last_d = d0;
    for round in 0..rounds {
        let d = d0 + round as usize;
        last_d = d;
        for _ in 0..cfg.max_retries.max(1) {
            let mut rng = seeded_rng(cfg.seed, counter as u64);
            counter += 1;
            if let Some(report) =
                augmented_attempt(rep, sigma, &space, &bs, d, &mut rng, cfg.seed, counter)?
            {
                return Ok(report);
            }
        }
        // Track a sound lower bound for the error message.
        let mut rng = seeded_rng(cfg.seed, counter as u64);
        let blown = Blown {
            base: &space,
            d,
        };
        best_rank_bound = best_rank_bound.max(blown.random_element(&mut rng).rank().div_ceil(d));
    }
    Err(Error::RetriesExhausted {
        attempts: counter,
        last_d,
        best_rank: best_rank_bound,
    })
}

#[allow(clippy::too_many_arguments)]
fn augmented_attempt<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
    space: &MatrixSpace<F>,
    bs: &BlockStructure,
    d: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    seed: u64,
    attempts: u32,
) -> Result<Option<WitnessReport<F>>> {
    let field = rep.field().clone();
    let blown = Blown { base: space, d };
    let a = blown.random_element(rng);
    let a_rank = a.rank();
    let b = a.pseudo_inverse();

    let dom_groups = bs.blown_domain_groups(d);
    let cod_groups = bs.blown_codomain_groups(d);

    // Augmented quiver: one arrow y -> x per pseudo-inverse block, carrying
    // the block of B that maps the y-slot to the x-slot.
    let mut extra_arrows = Vec::new();
    let mut extra_maps = Vec::new();
    for cg in &cod_groups {
        for (j, &cod_off) in cg.offsets.iter().enumerate() {
            for dg in &dom_groups {
                for (i, &dom_off) in dg.offsets.iter().enumerate() {
                    let block = b.submatrix(dom_off, cod_off, dg.width, cg.width);
                    extra_arrows.push((
                        format!(
                            "__pinv_{}_{}_{}_{}",
                            rep.quiver().vertex_name(cg.vertex),
                            j,
                            rep.quiver().vertex_name(dg.vertex),
                            i
                        ),
                        cg.vertex,
                        dg.vertex,
                    ));
                    extra_maps.push(block);
                }
            }
        }
    }
    let q_plus = rep.quiver().with_extra_arrows(extra_arrows);
    let mut maps = Vec::with_capacity(rep.quiver().arrows().len() + extra_maps.len());
    for i in 0..rep.quiver().arrows().len() {
        maps.push(rep.map(i).clone());
    }
    maps.extend(extra_maps);
    let w_plus = Representation::new(field.clone(), q_plus, rep.dims().clone(), maps)?;

    // Seeds: the copy projections of ker(A) at the sigma-positive vertices.
    let ker = a.kernel();
    let mut seeds: Vec<Subspace<F>> = (0..rep.quiver().vertex_count())
        .map(|v| Subspace::zero(field.clone(), rep.dims().get(v)))
        .collect();
    for g in &dom_groups {
        let mut acc = Subspace::zero(field.clone(), g.width);
        for &off in &g.offsets {
            acc = acc.sum(&project_coords(&ker, off, g.width))?;
        }
        seeds[g.vertex] = acc;
    }

    let closed = subrep_closure(&w_plus, &seeds);
    let witness = Subrep::new(closed.spaces().to_vec());
    debug_assert!(is_subrep(rep, witness.spaces()));
    let c = sigma_value(sigma, &witness.dims());
    if c < 0 {
        return Ok(None);
    }

    // cd-shrunk cross-check in the blow-up, and the rank bound meeting it.
    let u_blown = embed_blown(&witness, &dom_groups, d * bs.domain_dim, &field);
    let image_blown = blown.image(&u_blown);
    let shrink = u_blown.dim() as i64 - image_blown.dim() as i64;
    let certified = shrink == (d as i64) * c && shrink == (d * bs.domain_dim) as i64 - a_rank as i64;
    if !certified {
        return Ok(None);
    }

    let trace = WitnessTrace {
        algo: WitnessAlgo::Augmented,
        d,
        seed,
        attempts,
    };
    let u = embed_in_slots(&witness, &bs.domain_slots, bs.domain_dim, &field);
    let image = space.space_image(&u)?;
    if u.dim() as i64 - image.dim() as i64 != c {
        return Ok(None);
    }
    let certificate = ShrunkCertificate {
        u,
        image,
        c: c as usize,
        minimal: true,
    };
    let semistable = sigma_value(sigma, rep.dims()) == 0 && c == 0;
    Ok(Some(WitnessReport {
        discrepancy: c,
        witness,
        minimal: true,
        certificate,
        semistable,
        trace,
    }))
}

/// `⊕_x W'(x)^(d * copies)` on the blown slot layout.
fn embed_blown<F: Field>(
    sub: &Subrep<F>,
    groups: &[VertexSlots],
    total: usize,
    field: &F,
) -> Subspace<F> {
    let mut rows = Vec::new();
    for g in groups {
        let sp = sub.space(g.vertex);
        for &off in &g.offsets {
            for r in 0..sp.dim() {
                let mut v = vec![field.zero(); total];
                v[off..off + g.width].clone_from_slice(sp.basis().row(r));
                rows.push(v);
            }
        }
    }
    Subspace::from_row_vecs(field.clone(), total, rows)
}

/// Meet and join of two optimal witnesses; both re-verify as optimal.
pub fn witness_lattice_ops<F: Field>(
    rep: &Representation<F>,
    sigma: &Weight,
    w1: &WitnessReport<F>,
    w2: &WitnessReport<F>,
) -> Result<(Subrep<F>, Subrep<F>)> {
    if w1.discrepancy != w2.discrepancy {
        return Err(Error::validation(format!(
            "witness discrepancies differ: {} vs {}",
            w1.discrepancy, w2.discrepancy
        )));
    }
    let meet = w1.witness.meet(&w2.witness)?;
    let join = w1.witness.join(&w2.witness)?;
    for (name, sub) in [("meet", &meet), ("join", &join)] {
        if !is_subrep(rep, sub.spaces()) {
            return Err(Error::Internal(format!(
                "witness {name} is not a subrepresentation"
            )));
        }
        if sigma_value(sigma, &sub.dims()) != w1.discrepancy {
            return Err(Error::Internal(format!(
                "witness {name} is not optimal"
            )));
        }
    }
    Ok((meet, join))
}
