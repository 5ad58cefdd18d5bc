//! Brute-force reference computations over small finite fields. These are
//! the ground truth the randomized pipelines are tested against, and the
//! backends behind `--mode oracle`. They enumerate, they never sample, and
//! they refuse instances beyond a hard work ceiling rather than degrade.

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField};
use crate::matrix::Matrix;
use crate::matspace::MatrixSpace;
use crate::quiver::{euler_form, sigma_value, DimensionVector, Weight};
use crate::rep::{is_subrep, Representation, Subrep};
use crate::rng::seeded_rng;
use crate::subspace::Subspace;

/// Hard ceiling on enumeration size.
pub const WORK_CEILING: u64 = 1 << 20;

/// Fields whose elements can be listed, i.e. the small prime fields.
pub trait EnumerableField: Field {
    fn order_u64(&self) -> u64;
    fn elements(&self) -> Vec<Self::Elem>;
}

impl EnumerableField for PrimeField {
    fn order_u64(&self) -> u64 {
        self.modulus()
    }

    fn elements(&self) -> Vec<u64> {
        (0..self.modulus()).collect()
    }
}

/// Number of subspaces of `F_q^n` (sum of Gaussian binomials), `None` on
/// overflow.
pub fn subspace_count(q: u64, n: usize) -> Option<u128> {
    let mut total: u128 = 0;
    for k in 0..=n {
        // [n choose k]_q = prod_{i=0}^{k-1} (q^{n-i}-1)/(q^{i+1}-1)
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num = num.checked_mul(pow_u128(q, n - i)?.checked_sub(1)?)?;
            den = den.checked_mul(pow_u128(q, i + 1)?.checked_sub(1)?)?;
            if num % den == 0 {
                num /= den;
                den = 1;
            }
        }
        total = total.checked_add(num / den)?;
    }
    Some(total)
}

fn pow_u128(base: u64, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

fn guard(work: u128) -> Result<()> {
    if work > WORK_CEILING as u128 {
        return Err(Error::OracleInfeasible {
            work,
            limit: WORK_CEILING,
        });
    }
    Ok(())
}

/// All subspaces of `F^n`, each in canonical RREF form, enumerated by pivot
/// shape (Gaussian-binomial order). Guarded by the work ceiling.
pub fn enumerate_subspaces<F: EnumerableField>(field: &F, n: usize) -> Result<Vec<Subspace<F>>> {
    let count = subspace_count(field.order_u64(), n).ok_or(Error::OracleInfeasible {
        work: u128::MAX,
        limit: WORK_CEILING,
    })?;
    guard(count)?;
    let elems = field.elements();
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..=n {
        for pivots in combinations(n, k) {
            // Free entries of the RREF shape: (r, c) with c not a pivot and
            // c greater than this row's pivot.
            let is_pivot: Vec<bool> = {
                let mut v = vec![false; n];
                for &p in &pivots {
                    v[p] = true;
                }
                v
            };
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let p = pivots[r];
                    let is_pivot = &is_pivot;
                    (p + 1..n)
                        .filter(move |&c| !is_pivot[c])
                        .map(move |c| (r, c))
                })
                .collect();
            let mut odometer = vec![0usize; free.len()];
            loop {
                let mut m = Matrix::zeros(field.clone(), k, n);
                for (r, &p) in pivots.iter().enumerate() {
                    m[(r, p)] = field.one();
                }
                for (slot, &(r, c)) in free.iter().enumerate() {
                    m[(r, c)] = elems[odometer[slot]].clone();
                }
                out.push(Subspace::from_rref_basis(m));
                // Advance the odometer.
                let mut i = 0;
                loop {
                    if i == odometer.len() {
                        break;
                    }
                    odometer[i] += 1;
                    if odometer[i] < elems.len() {
                        break;
                    }
                    odometer[i] = 0;
                    i += 1;
                }
                if i == odometer.len() {
                    break;
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct BruteNcrk<F: Field> {
    pub rank: usize,
    pub max_c: usize,
    /// Intersection of all maximizers: the unique minimal shrunk subspace.
    pub minimal_u: Subspace<F>,
    pub maximizers: Vec<Subspace<F>>,
}

/// Exact non-commutative rank by enumerating every subspace of the domain.
pub fn brute_ncrk<F: EnumerableField>(space: &MatrixSpace<F>) -> Result<BruteNcrk<F>> {
    let subspaces = enumerate_subspaces(space.field(), space.cols())?;
    let mut max_c: i64 = i64::MIN;
    let mut maximizers: Vec<Subspace<F>> = Vec::new();
    for u in subspaces {
        let image = space.space_image(&u)?;
        let c = u.dim() as i64 - image.dim() as i64;
        if c > max_c {
            max_c = c;
            maximizers.clear();
        }
        if c == max_c {
            maximizers.push(u);
        }
    }
    // U = 0 always gives c = 0, so the maximum is nonnegative.
    let max_c = max_c as usize;
    let mut minimal_u = maximizers[0].clone();
    for u in &maximizers[1..] {
        minimal_u = minimal_u.intersect(u)?;
    }
    Ok(BruteNcrk {
        rank: space.cols() - max_c,
        max_c,
        minimal_u,
        maximizers,
    })
}

/// Exact discrepancy: enumerate all vertex-subspace tuples, keep the ones
/// closed under the arrows, and maximize the weight pairing. Returns the
/// optimum and every subrepresentation achieving it.
pub fn brute_discrepancy<F: EnumerableField>(
    rep: &Representation<F>,
    sigma: &Weight,
) -> Result<(i64, Vec<Subrep<F>>)> {
    let nv = rep.quiver().vertex_count();
    let q = rep.field().order_u64();
    let mut work: u128 = 1;
    for v in 0..nv {
        let c = subspace_count(q, rep.dims().get(v)).ok_or(Error::OracleInfeasible {
            work: u128::MAX,
            limit: WORK_CEILING,
        })?;
        work = work.checked_mul(c).unwrap_or(u128::MAX);
    }
    guard(work)?;

    let per_vertex: Vec<Vec<Subspace<F>>> = (0..nv)
        .map(|v| enumerate_subspaces(rep.field(), rep.dims().get(v)))
        .collect::<Result<_>>()?;

    let mut best = i64::MIN;
    let mut optima = Vec::new();
    let mut idx = vec![0usize; nv];
    loop {
        let spaces: Vec<Subspace<F>> = (0..nv).map(|v| per_vertex[v][idx[v]].clone()).collect();
        if is_subrep(rep, &spaces) {
            let sub = Subrep::new(spaces);
            let value = sigma_value(sigma, &sub.dims());
            if value > best {
                best = value;
                optima.clear();
            }
            if value == best {
                optima.push(sub);
            }
        }
        // Advance the tuple odometer.
        let mut v = 0;
        loop {
            if v == nv {
                return Ok((best, optima));
            }
            idx[v] += 1;
            if idx[v] < per_vertex[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

/// Exact value of the fixed-target non-commutative ext: maximize
/// `-<alpha, dim(W/W')>` over all subrepresentations `W'`.
pub fn brute_ncext_target<F: EnumerableField>(
    alpha: &DimensionVector,
    rep: &Representation<F>,
) -> Result<i64> {
    // Enumerate subrepresentations via a zero weight (every subrep is an
    // optimum of sigma = 0) and maximize over the factors.
    let zero_sigma = Weight::new(vec![0; rep.quiver().vertex_count()]);
    let (_, all_subreps) = brute_discrepancy(rep, &zero_sigma)?;
    let beta = rep.dims();
    let mut best = i64::MIN;
    for sub in &all_subreps {
        let factor = beta.sub(&sub.dims());
        best = best.max(-euler_form(rep.quiver(), alpha, &factor));
    }
    Ok(best)
}

/// Exact maximal element rank of the d-th blow-up.
///
/// Two sound routes: a seeded hunt that can only return when it exhibits an
/// element meeting the trivial upper bound `d * min(rows, cols)`, and a full
/// sweep over all coefficient tuples when that is feasible. Anything else is
/// a structured refusal.
pub fn brute_rank_blowup<F: EnumerableField>(space: &MatrixSpace<F>, d: usize) -> Result<usize> {
    let blown = space.blow_up(d);
    let k = blown.basis().len();
    let q = space.field().order_u64();
    let cap = blown.min_dim();

    // Hunt phase: most combinations over even a modest field reach the cap.
    if cap > 0 && k > 0 {
        for t in 0..4096u64 {
            let mut rng = seeded_rng(0x0b5e55ed, t);
            let a = blown.random_element(&mut rng);
            if a.rank() == cap {
                return Ok(cap);
            }
        }
    }

    let total = pow_u128(q, k);
    match total {
        Some(total) if total <= WORK_CEILING as u128 => {
            let elems = space.field().elements();
            let mut best = 0usize;
            let mut odometer = vec![0usize; k];
            loop {
                let coeffs: Vec<F::Elem> =
                    odometer.iter().map(|&i| elems[i].clone()).collect();
                best = best.max(blown.element_from_coeffs(&coeffs).rank());
                if best == cap {
                    return Ok(best);
                }
                let mut i = 0;
                loop {
                    if i == k {
                        return Ok(best);
                    }
                    odometer[i] += 1;
                    if odometer[i] < elems.len() {
                        break;
                    }
                    odometer[i] = 0;
                    i += 1;
                }
            }
        }
        Some(total) => Err(Error::OracleInfeasible {
            work: total,
            limit: WORK_CEILING,
        }),
        None => Err(Error::OracleInfeasible {
            work: u128::MAX,
            limit: WORK_CEILING,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn eq1_space(p: u64) -> MatrixSpace<PrimeField> {
        let f = f(p);
        let a1 = Matrix::from_i64(f, &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        let a2 = Matrix::from_i64(f, &[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]]);
        let a3 = Matrix::from_i64(f, &[&[0, 0, 0], &[0, 0, 1], &[0, -1, 0]]);
        MatrixSpace::new(f, 3, 3, vec![a1, a2, a3]).unwrap()
    }

    #[test]
    fn subspace_counts_match_enumeration() {
        for (q, n) in [(2u64, 0usize), (2, 3), (3, 3), (5, 2), (2, 5)] {
            let field = f(q);
            let subs = enumerate_subspaces(&field, n).unwrap();
            assert_eq!(subs.len() as u128, subspace_count(q, n).unwrap());
            // All distinct, all canonical.
            for i in 0..subs.len() {
                for j in i + 1..subs.len() {
                    assert_ne!(subs[i], subs[j]);
                }
            }
        }
        // F_2^2 has exactly 5 subspaces.
        assert_eq!(subspace_count(2, 2), Some(5));
    }

    #[test]
    fn work_ceiling_is_enforced() {
        let field = f(5);
        assert!(matches!(
            enumerate_subspaces(&field, 12),
            Err(Error::OracleInfeasible { .. })
        ));
    }

    #[test]
    fn brute_ncrk_examples() {
        // The skew pencil over F5: full rank, minimal shrunk subspace zero.
        let out = brute_ncrk(&eq1_space(5)).unwrap();
        assert_eq!(out.rank, 3);
        assert_eq!(out.max_c, 0);
        assert!(out.minimal_u.is_zero());

        // span{E11} over F2: rank 1, minimal shrunk subspace span(e2).
        let field = f(2);
        let e11 = Matrix::from_i64(field, &[&[1, 0], &[0, 0]]);
        let s = MatrixSpace::new(field, 2, 2, vec![e11]).unwrap();
        let out = brute_ncrk(&s).unwrap();
        assert_eq!(out.rank, 1);
        assert_eq!(
            out.minimal_u,
            Subspace::from_rows(&Matrix::from_i64(field, &[&[0, 1]]))
        );

        // Zero space: everything shrinks to nothing.
        let z = MatrixSpace::zero(field, 2, 2);
        let out = brute_ncrk(&z).unwrap();
        assert_eq!(out.rank, 0);
        assert_eq!(out.minimal_u, Subspace::full(field, 2));
    }

    #[test]
    fn brute_discrepancy_examples() {
        let field = f(2);
        // Single arrow with the identity: any source line is forced into the
        // sink, so sigma = (1,-1) cannot go positive.
        let q = Quiver::kronecker(1);
        let rep = Representation::new(
            field,
            q,
            DimensionVector::new(vec![2, 2]),
            vec![Matrix::identity(field, 2)],
        )
        .unwrap();
        let (c, _) = brute_discrepancy(&rep, &Weight::new(vec![1, -1])).unwrap();
        assert_eq!(c, 0);

        // sigma = 0 makes every subrepresentation optimal.
        let (c0, optima) = brute_discrepancy(&rep, &Weight::new(vec![0, 0])).unwrap();
        assert_eq!(c0, 0);
        assert!(optima.len() > 1);

        // The E11 Kronecker representation: unique minimal optimum
        // (span(e2), 0) with discrepancy 1.
        let rep = Representation::new(
            field,
            Quiver::kronecker(1),
            DimensionVector::new(vec![2, 2]),
            vec![Matrix::from_i64(field, &[&[1, 0], &[0, 0]])],
        )
        .unwrap();
        let (c, optima) = brute_discrepancy(&rep, &Weight::new(vec![1, -1])).unwrap();
        assert_eq!(c, 1);
        let e2 = Subspace::from_rows(&Matrix::from_i64(field, &[&[0, 1]]));
        let minimal = optima
            .iter()
            .fold(Subrep::full(&rep), |acc, s| acc.meet(s).unwrap());
        assert_eq!(minimal.space(0), &e2);
        assert!(minimal.space(1).is_zero());
    }

    #[test]
    fn brute_ncext_target_examples() {
        let field = f(3);
        let rep = Representation::new(
            field,
            Quiver::kronecker(2),
            DimensionVector::new(vec![1, 1]),
            vec![
                Matrix::from_i64(field, &[&[1]]),
                Matrix::from_i64(field, &[&[2]]),
            ],
        )
        .unwrap();
        // alpha = 0 never produces ext.
        assert_eq!(
            brute_ncext_target(&DimensionVector::zero(2), &rep).unwrap(),
            0
        );

        // Zero representation: only the zero factor.
        let zrep = Representation::new(
            field,
            Quiver::kronecker(2),
            DimensionVector::new(vec![0, 0]),
            vec![Matrix::zeros(field, 0, 0), Matrix::zeros(field, 0, 0)],
        )
        .unwrap();
        assert_eq!(
            brute_ncext_target(&DimensionVector::new(vec![1, 1]), &zrep).unwrap(),
            0
        );
    }

    #[test]
    fn brute_rank_blowup_examples() {
        // d = 1, single matrix: the rank of that matrix.
        let field = f(5);
        let m = Matrix::from_i64(field, &[&[1, 0], &[0, 0]]);
        let s = MatrixSpace::new(field, 2, 2, vec![m]).unwrap();
        assert_eq!(brute_rank_blowup(&s, 1).unwrap(), 1);

        // The skew pencil: rank 2 at d = 1, full rank 6 at d = 2.
        let s = eq1_space(5);
        assert_eq!(brute_rank_blowup(&s, 1).unwrap(), 2);
        assert_eq!(brute_rank_blowup(&s, 2).unwrap(), 6);
    }
}
