//! Concrete cyclic modules and the current-algebra operators acting on
//! tensor products of evaluation (or shifted graded) modules.
//!
//! Builders cover the families the engine works with: sl2 irreducibles,
//! the level sums N_k and NN_k, truncated polynomial modules over an
//! abelian algebra, and symmetric powers of the defining sl_{n+1}
//! representation. Everything is immutable after construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::LiePresentation;
use crate::linalg::{Mat, SparseRow};
use crate::rat::{binomial, format_rat, rat_int, rat_pow, Rat};

/// Finite-dimensional cyclic module: a presentation, one matrix per
/// generator and t-power, a distinguished cyclic vector, and optional
/// t / auxiliary gradings per basis vector.
#[derive(Debug, Clone)]
pub struct CyclicModule {
    name: String,
    presentation: Arc<LiePresentation>,
    dim: usize,
    /// action[g][r] is the matrix of g (x) t^r; ungraded modules store
    /// only r = 0.
    action: Vec<Vec<Mat>>,
    cyclic: Vec<Rat>,
    t_grading: Option<Vec<usize>>,
    aux_grading: Option<Vec<i64>>,
}

impl CyclicModule {
    pub fn new(
        name: String,
        presentation: Arc<LiePresentation>,
        action: Vec<Vec<Mat>>,
        cyclic: Vec<Rat>,
        t_grading: Option<Vec<usize>>,
        aux_grading: Option<Vec<i64>>,
    ) -> Result<Self> {
        let dim = cyclic.len();
        if action.len() != presentation.gen_count() {
            return Err(Error::DimMismatch(format!(
                "{} matrices for {} generators",
                action.len(),
                presentation.gen_count()
            )));
        }
        for mats in &action {
            if mats.is_empty() {
                return Err(Error::InvalidInput("missing t^0 action".into()));
            }
            for m in mats {
                if m.rows() != dim || m.cols() != dim {
                    return Err(Error::DimMismatch("action matrix size".into()));
                }
            }
        }
        if let Some(t) = &t_grading {
            if t.len() != dim {
                return Err(Error::DimMismatch("t_grading length".into()));
            }
        }
        if let Some(a) = &aux_grading {
            if a.len() != dim {
                return Err(Error::DimMismatch("aux_grading length".into()));
            }
        }
        Ok(CyclicModule {
            name,
            presentation,
            dim,
            action,
            cyclic,
            t_grading,
            aux_grading,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn presentation(&self) -> &Arc<LiePresentation> {
        &self.presentation
    }

    pub fn cyclic_vector(&self) -> &[Rat] {
        &self.cyclic
    }

    pub fn is_graded(&self) -> bool {
        self.t_grading.is_some()
    }

    pub fn t_grading(&self) -> Option<&[usize]> {
        self.t_grading.as_deref()
    }

    pub fn aux_grading(&self) -> Option<&[i64]> {
        self.aux_grading.as_deref()
    }

    /// Largest internal t-degree (0 for ungraded modules).
    pub fn t_extent(&self) -> usize {
        self.t_grading
            .as_ref()
            .and_then(|t| t.iter().max().copied())
            .unwrap_or(0)
    }

    /// Matrix of g (x) t^r; None means the operator acts as zero.
    pub fn op(&self, gen: usize, power: usize) -> Option<&Mat> {
        self.action[gen].get(power)
    }

    pub fn op_by_name(&self, name: &str, power: usize) -> Result<Option<&Mat>> {
        Ok(self.op(self.presentation.gen_index(name)?, power))
    }
}

/// Pairwise-distinct evaluation points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationPoints(Vec<Rat>);

impl EvaluationPoints {
    pub fn new(points: Vec<Rat>) -> Result<Self> {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::RepeatedPoints(format!(
                        "z_{} = z_{} = {}",
                        i + 1,
                        j + 1,
                        format_rat(&points[i])
                    )));
                }
            }
        }
        Ok(EvaluationPoints(points))
    }

    /// The default generic configuration z_i = i (1-based).
    pub fn default_points(n: usize) -> Self {
        EvaluationPoints((1..=n as i64).map(rat_int).collect())
    }

    /// Seeded distinct rationals with numerators and denominators
    /// bounded by `max_num` / `max_den`.
    pub fn random(n: usize, seed: u64, max_num: i64, max_den: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Rat> = Vec::with_capacity(n);
        while points.len() < n {
            let num = rng.gen_range(-max_num..=max_num);
            let den = rng.gen_range(1..=max_den);
            let candidate = Rat::new(num.into(), den.into());
            if !points.contains(&candidate) {
                points.push(candidate);
            }
        }
        EvaluationPoints(points)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rat] {
        &self.0
    }
}

/// A current-algebra element g (x) t^k identified by generator index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurrentOperator {
    pub generator: usize,
    pub power: usize,
}

// ---------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------

/// Irreducible sl2 module of highest weight m in the basis v, f v,
/// f^2 v, ...: f shifts basis vectors with coefficient 1, e carries the
/// integer string coefficients, h is diagonal.
pub fn build_sl2_irrep(m: usize) -> CyclicModule {
    let sl2 = LiePresentation::sl2();
    let dim = m + 1;
    let mut e = Mat::zeros(dim, dim);
    let mut h = Mat::zeros(dim, dim);
    let mut f = Mat::zeros(dim, dim);
    for j in 0..dim {
        *h.at_mut(j, j) = rat_int(m as i64 - 2 * j as i64);
        if j + 1 < dim {
            *f.at_mut(j + 1, j) = rat_int(1);
        }
        if j > 0 {
            *e.at_mut(j - 1, j) = rat_int((j as i64) * (m as i64 - j as i64 + 1));
        }
    }
    let mut cyclic = vec![Rat::zero(); dim];
    cyclic[0] = Rat::one();
    CyclicModule::new(
        format!("sl2[{m}]"),
        sl2,
        vec![vec![e], vec![h], vec![f]],
        cyclic,
        None,
        None,
    )
    .expect("sl2 irrep")
}

/// N_k (doubled = false): the sum of sl2 irreps of highest weights
/// 0..k, cyclic vector the sum of component highest vectors, auxiliary
/// grading the component highest weight. NN_k (doubled = true): the
/// sl2+sl2 module with components pi_m (x) pi_m; the auxiliary grading
/// is the weight under the second copy's Cartan generator, so tensor
/// powers can be decomposed over both copies.
pub fn build_level_sum(k: usize, doubled: bool) -> CyclicModule {
    if !doubled {
        let sl2 = LiePresentation::sl2();
        let dim: usize = (0..=k).map(|m| m + 1).sum();
        let mut mats = vec![Mat::zeros(dim, dim), Mat::zeros(dim, dim), Mat::zeros(dim, dim)];
        let mut cyclic = vec![Rat::zero(); dim];
        let mut aux = vec![0i64; dim];
        let mut offset = 0;
        for m in 0..=k {
            let block = build_sl2_irrep(m);
            for g in 0..3 {
                let bm = block.op(g, 0).unwrap();
                for i in 0..=m {
                    for j in 0..=m {
                        if !bm.at(i, j).is_zero() {
                            *mats[g].at_mut(offset + i, offset + j) = bm.at(i, j).clone();
                        }
                    }
                }
            }
            cyclic[offset] = Rat::one();
            for i in 0..=m {
                aux[offset + i] = m as i64;
            }
            offset += m + 1;
        }
        CyclicModule::new(
            format!("N{k}"),
            sl2,
            mats.into_iter().map(|m| vec![m]).collect(),
            cyclic,
            None,
            Some(aux),
        )
        .expect("level sum")
    } else {
        let pres = LiePresentation::sl2_doubled();
        let dim: usize = (0..=k).map(|m| (m + 1) * (m + 1)).sum();
        let mut mats: Vec<Mat> = (0..6).map(|_| Mat::zeros(dim, dim)).collect();
        let mut cyclic = vec![Rat::zero(); dim];
        let mut aux = vec![0i64; dim];
        let mut offset = 0;
        for m in 0..=k {
            let block = build_sl2_irrep(m);
            let d = m + 1;
            let id = Mat::identity(d);
            for g in 0..3 {
                let bm = block.op(g, 0).unwrap();
                let first = bm.kron(&id);
                let second = id.kron(bm);
                for (target, src) in [(g, first), (3 + g, second)] {
                    for i in 0..d * d {
                        for j in 0..d * d {
                            if !src.at(i, j).is_zero() {
                                *mats[target].at_mut(offset + i, offset + j) = src.at(i, j).clone();
                            }
                        }
                    }
                }
            }
            cyclic[offset] = Rat::one();
            for i in 0..d {
                for j in 0..d {
                    aux[offset + i * d + j] = m as i64 - 2 * j as i64;
                }
            }
            offset += d * d;
        }
        CyclicModule::new(
            format!("NN{k}"),
            pres,
            mats.into_iter().map(|m| vec![m]).collect(),
            cyclic,
            None,
            Some(aux),
        )
        .expect("doubled level sum")
    }
}

/// Monomial exponent vectors of total degree <= r over n variables,
/// ordered by (total degree, lexicographic).
fn monomials_up_to(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for deg in 0..=r {
        let mut stack = vec![(Vec::<usize>::new(), deg)];
        while let Some((prefix, rest)) = stack.pop() {
            if prefix.len() == n - 1 {
                let mut full = prefix;
                full.push(rest);
                out.push(full);
                continue;
            }
            // Descending push so the lexicographically largest pops last.
            for first in (0..=rest).rev() {
                let mut next = prefix.clone();
                next.push(first);
                stack.push((next, rest - first));
            }
        }
    }
    out
}

/// Truncated polynomial module C[x_1..x_n]/J_r over the abelian algebra:
/// x_i acts by multiplication, monomials of total degree above r are
/// zero, the cyclic vector is 1. The auxiliary grading is the total
/// monomial degree.
pub fn build_abelian_powers(n: usize, r: usize) -> CyclicModule {
    assert!(n >= 1);
    let pres = LiePresentation::abelian(n);
    let basis = monomials_up_to(n, r);
    let index: BTreeMap<Vec<usize>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let dim = basis.len();
    let mut mats = vec![Mat::zeros(dim, dim); n];
    for (j, mono) in basis.iter().enumerate() {
        let deg: usize = mono.iter().sum();
        if deg == r {
            continue;
        }
        for (i, mat) in mats.iter_mut().enumerate() {
            let mut image = mono.clone();
            image[i] += 1;
            let target = index[&image];
            *mat.at_mut(target, j) = Rat::one();
        }
    }
    let mut cyclic = vec![Rat::zero(); dim];
    cyclic[0] = Rat::one();
    let aux: Vec<i64> = basis.iter().map(|m| m.iter().sum::<usize>() as i64).collect();
    CyclicModule::new(
        format!("S^{r}(ab{n})"),
        pres,
        mats.into_iter().map(|m| vec![m]).collect(),
        cyclic,
        None,
        Some(aux),
    )
    .expect("abelian powers")
}

/// Symmetric power Sym^r of the defining sl_{n+1} representation, in a
/// basis scaled so that the lower-triangular abelian subalgebra
/// {E_{i,0}} acts exactly as x_i does on build_abelian_powers(n, r).
/// Basis vectors are indexed by the exponent vector a of x_1..x_n with
/// |a| <= r, in the same order as build_abelian_powers; the underlying
/// monomial is u_0^{r-|a|} u^a. The auxiliary grading is |a|.
pub fn build_sln_sym(n: usize, r: usize) -> CyclicModule {
    assert!(n >= 1);
    let pres = LiePresentation::sl_n(n);
    let basis = monomials_up_to(n, r);
    let index: BTreeMap<Vec<usize>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let dim = basis.len();
    // Scale factors c_a = r! / (r - |a|)! relating w_a to the plain
    // monomial basis of Sym^r.
    let scale: Vec<Rat> = basis
        .iter()
        .map(|a| {
            let d: usize = a.iter().sum();
            let mut c = Rat::one();
            for i in 0..d {
                c *= rat_int((r - i) as i64);
            }
            c
        })
        .collect();
    // Full exponent vector over u_0..u_n for basis element a.
    let full_exp = |a: &[usize]| -> Vec<usize> {
        let d: usize = a.iter().sum();
        let mut b = Vec::with_capacity(n + 1);
        b.push(r - d);
        b.extend_from_slice(a);
        b
    };
    let mut mats: Vec<Mat> = Vec::with_capacity(pres.gen_count());
    for g in 0..pres.gen_count() {
        let name = pres.gen_name(g).to_string();
        let mut mat = Mat::zeros(dim, dim);
        if let Some(i) = name.strip_prefix('h') {
            let i: usize = i.parse().unwrap();
            for (col, a) in basis.iter().enumerate() {
                let b = full_exp(a);
                *mat.at_mut(col, col) = rat_int(b[i - 1] as i64 - b[i] as i64);
            }
        } else {
            let parts: Vec<usize> = name
                .trim_start_matches("e_")
                .split('_')
                .map(|s| s.parse().unwrap())
                .collect();
            let (ti, tj) = (parts[0], parts[1]);
            for (col, a) in basis.iter().enumerate() {
                let b = full_exp(a);
                if b[tj] == 0 {
                    continue;
                }
                let mut b2 = b.clone();
                b2[tj] -= 1;
                b2[ti] += 1;
                let a2: Vec<usize> = b2[1..].to_vec();
                let target = index[&a2];
                // E_ij u^b = b_j u^{b + e_i - e_j}; rescale to the w basis.
                let coeff = rat_int(b[tj] as i64) * &scale[col] / &scale[target];
                *mat.at_mut(target, col) = coeff;
            }
        }
        mats.push(mat);
    }
    let mut cyclic = vec![Rat::zero(); dim];
    cyclic[0] = Rat::one();
    let aux: Vec<i64> = basis.iter().map(|m| m.iter().sum::<usize>() as i64).collect();
    CyclicModule::new(
        format!("Sym^{r}(sl{})", n + 1),
        pres,
        mats.into_iter().map(|m| vec![m]).collect(),
        cyclic,
        None,
        Some(aux),
    )
    .expect("symmetric power")
}

// ---------------------------------------------------------------------
// Current operators on tensor products
// ---------------------------------------------------------------------

fn check_compatible(modules: &[CyclicModule]) -> Result<()> {
    if modules.is_empty() {
        return Err(Error::InvalidInput("no modules given".into()));
    }
    let first = modules[0].presentation();
    for m in &modules[1..] {
        if m.presentation().as_ref() != first.as_ref() {
            return Err(Error::PresentationMismatch(format!(
                "{} vs {}",
                first.name(),
                m.presentation().name()
            )));
        }
    }
    Ok(())
}

/// Per-factor matrix of g (x) t^k at evaluation point z: the shift rule
/// sum_r C(k, r) z^{k-r} rho(g t^r). For ungraded factors only r = 0
/// survives, which is the plain evaluation rule z^k rho(g).
fn factor_op(module: &CyclicModule, z: &Rat, op: CurrentOperator) -> Mat {
    let dim = module.dim();
    let mut acc = Mat::zeros(dim, dim);
    let max_r = op.power.min(module.t_extent());
    for r in 0..=max_r {
        if let Some(m) = module.op(op.generator, r) {
            let coeff = binomial(op.power, r) * rat_pow(z, op.power - r);
            if !coeff.is_zero() {
                acc = acc.add(&m.scale(&coeff)).unwrap();
            }
        }
    }
    acc
}

/// Dense matrix of g (x) t^k on the tensor product of evaluation
/// modules at the given points.
pub fn current_op_matrix(
    modules: &[CyclicModule],
    points: &EvaluationPoints,
    op: CurrentOperator,
) -> Result<Mat> {
    check_compatible(modules)?;
    if modules.len() != points.len() {
        return Err(Error::DimMismatch(format!(
            "{} modules vs {} points",
            modules.len(),
            points.len()
        )));
    }
    if op.generator >= modules[0].presentation().gen_count() {
        return Err(Error::InvalidInput("generator index out of range".into()));
    }
    let total: usize = modules.iter().map(|m| m.dim()).product();
    let mut out = Mat::zeros(total, total);
    for (p, module) in modules.iter().enumerate() {
        let a = factor_op(module, &points.values()[p], op);
        if a.is_zero() {
            continue;
        }
        let mut term = Mat::identity(1);
        for (q, other) in modules.iter().enumerate() {
            if q == p {
                term = term.kron(&a);
            } else {
                term = term.kron(&Mat::identity(other.dim()));
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Sparse column-map form of a tensor-product operator; column j lists
/// the (row, coefficient) pairs of the image of basis vector j.
#[derive(Debug, Clone)]
pub struct SparseOp {
    dim: usize,
    cols: Vec<Vec<(u32, Rat)>>,
}

impl SparseOp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &[(u32, Rat)] {
        &self.cols[j]
    }

    /// Image of a row, rescaled to a normalized integer row; spans are
    /// unchanged, so this is the form the echelon chain consumes.
    pub fn apply_row(&self, row: &SparseRow) -> SparseRow {
        let mut pairs: Vec<(u32, Rat)> = Vec::new();
        for (idx, coeff) in row.entries() {
            let c = Rat::from_integer(coeff.clone());
            for (target, weight) in &self.cols[*idx as usize] {
                pairs.push((*target, weight * &c));
            }
        }
        SparseRow::from_rat_pairs(&pairs)
    }

    /// Exact dense image of a row, without any rescaling.
    pub fn apply_exact(&self, row: &SparseRow) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (idx, coeff) in row.entries() {
            let c = Rat::from_integer(coeff.clone());
            for (target, weight) in &self.cols[*idx as usize] {
                out[*target as usize] += weight * &c;
            }
        }
        out
    }

    pub fn to_mat(&self) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, c) in col {
                *m.at_mut(*i as usize, j) = c.clone();
            }
        }
        m
    }
}

/// Sparse tensor-product operator for the filtration engine; same
/// semantics as current_op_matrix.
pub fn current_op_sparse(
    modules: &[CyclicModule],
    points: &EvaluationPoints,
    op: CurrentOperator,
) -> Result<SparseOp> {
    check_compatible(modules)?;
    if modules.len() != points.len() {
        return Err(Error::DimMismatch(format!(
            "{} modules vs {} points",
            modules.len(),
            points.len()
        )));
    }
    let dims: Vec<usize> = modules.iter().map(|m| m.dim()).collect();
    let total: usize = dims.iter().product();
    // Per-factor sparse columns of the factor operator.
    let factor_cols: Vec<Vec<Vec<(usize, Rat)>>> = modules
        .iter()
        .enumerate()
        .map(|(p, module)| {
            let a = factor_op(module, &points.values()[p], op);
            (0..module.dim())
                .map(|j| {
                    (0..module.dim())
                        .filter(|&i| !a.at(i, j).is_zero())
                        .map(|i| (i, a.at(i, j).clone()))
                        .collect()
                })
                .collect()
        })
        .collect();
    // Strides for the row-major tensor index.
    let mut strides = vec![1usize; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * dims[p + 1];
    }
    let mut cols: Vec<Vec<(u32, Rat)>> = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for j in 0..total {
        let mut col = Vec::new();
        for (p, stride) in strides.iter().enumerate() {
            for (i, c) in &factor_cols[p][digits[p]] {
                // Target index is j with digit p replaced by i.
                let t = j - digits[p] * stride + i * stride;
                col.push((t as u32, c.clone()));
            }
        }
        col.sort_by_key(|e| e.0);
        // Distinct factors can hit the same target (diagonal actions).
        let mut merged: Vec<(u32, Rat)> = Vec::with_capacity(col.len());
        for (i, c) in col {
            match merged.last_mut() {
                Some((i0, acc)) if *i0 == i => *acc += c,
                _ => merged.push((i, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        cols.push(merged);
        // Increment the mixed-radix counter.
        for p in (0..dims.len()).rev() {
            digits[p] += 1;
            if digits[p] < dims[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    Ok(SparseOp { dim: total, cols })
}

// ---------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------

/// Outcome of validate_module; report-only, never an error.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_clean() {
            write!(f, "clean")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            Ok(())
        }
    }
}

/// Checks bracket consistency across all stored t-powers, t-grading
/// compatibility, and that the cyclic vector is nonzero.
pub fn validate_module(module: &CyclicModule) -> ValidationReport {
    let mut report = ValidationReport::default();
    let pres = module.presentation();
    let dim = module.dim();
    if module.cyclic_vector().iter().all(|c| c.is_zero()) {
        report.violations.push("cyclic vector is zero".into());
    }
    let extent = module.t_extent();
    let zero = Mat::zeros(dim, dim);
    for a in 0..pres.gen_count() {
        for b in 0..pres.gen_count() {
            for ra in 0..=extent {
                for rb in 0..=extent {
                    let (Some(ma), Some(mb)) = (module.op(a, ra), module.op(b, rb)) else {
                        continue;
                    };
                    let comm = ma.commutator(mb).unwrap();
                    let mut expect = zero.clone();
                    for (g, c) in pres.bracket(a, b) {
                        if let Some(mg) = module.op(*g, ra + rb) {
                            expect = expect.add(&mg.scale(c)).unwrap();
                        }
                    }
                    if comm != expect {
                        report.violations.push(format!(
                            "[{} t^{ra}, {} t^{rb}] disagrees with rho([.,.]) t^{}",
                            pres.gen_name(a),
                            pres.gen_name(b),
                            ra + rb
                        ));
                    }
                }
            }
        }
    }
    if let Some(t) = module.t_grading() {
        for g in 0..pres.gen_count() {
            for r in 0..=extent {
                let Some(m) = module.op(g, r) else { continue };
                for i in 0..dim {
                    for j in 0..dim {
                        if !m.at(i, j).is_zero() && t[i] != t[j] + r {
                            report.violations.push(format!(
                                "{} t^{r} maps degree {} to degree {} (expected {})",
                                pres.gen_name(g),
                                t[j],
                                t[i],
                                t[j] + r
                            ));
                        }
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn sl2_irrep_trivial_and_defining() {
        let triv = build_sl2_irrep(0);
        assert_eq!(triv.dim(), 1);
        for g in 0..3 {
            assert!(triv.op(g, 0).unwrap().is_zero());
        }
        let v = build_sl2_irrep(1);
        assert_eq!(v.dim(), 2);
        let h = v.op_by_name("h", 0).unwrap().unwrap();
        assert_eq!(h.at(0, 0), &rat_int(1));
        assert_eq!(h.at(1, 1), &rat_int(-1));
        assert!(validate_module(&v).is_clean());
    }

    #[test]
    fn sl2_irrep_nilpotency_order() {
        // f^(m+1) = 0 but f^m != 0 on the (m+1)-dimensional module.
        let m = 2;
        let module = build_sl2_irrep(m);
        let f = module.op_by_name("f", 0).unwrap().unwrap().clone();
        let f2 = f.mul(&f).unwrap();
        let f3 = f2.mul(&f).unwrap();
        assert!(!f2.is_zero());
        assert!(f3.is_zero());
        assert!(validate_module(&module).is_clean());
    }

    #[test]
    fn level_sum_dimensions_and_cyclic() {
        let n0 = build_level_sum(0, false);
        assert_eq!(n0.dim(), 1);
        let n1 = build_level_sum(1, false);
        assert_eq!(n1.dim(), 3);
        let nonzero = n1.cyclic_vector().iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 2);
        assert!(validate_module(&n1).is_clean());
        let nn1 = build_level_sum(1, true);
        assert_eq!(nn1.dim(), 5);
        assert!(validate_module(&nn1).is_clean());
    }

    #[test]
    fn abelian_powers_examples() {
        let m = build_abelian_powers(1, 2);
        assert_eq!(m.dim(), 3);
        let x = m.op(0, 0).unwrap();
        // Nilpotent Jordan block in the monomial basis.
        assert_eq!(x.at(1, 0), &rat_int(1));
        assert_eq!(x.at(2, 1), &rat_int(1));
        assert!(x.at(0, 0).is_zero());
        assert_eq!(build_abelian_powers(2, 1).dim(), 3);
        assert_eq!(build_abelian_powers(2, 2).dim(), 6);
        // x1 x2 = 0 at truncation level 1.
        let m21 = build_abelian_powers(2, 1);
        let x1 = m21.op(0, 0).unwrap();
        let x2 = m21.op(1, 0).unwrap();
        assert!(x1.mul(x2).unwrap().is_zero());
    }

    #[test]
    fn sl3_defining_and_sym2() {
        let v = build_sln_sym(2, 1);
        assert_eq!(v.dim(), 3);
        assert!(validate_module(&v).is_clean());
        let s2 = build_sln_sym(2, 2);
        assert_eq!(s2.dim(), 6);
        assert!(validate_module(&s2).is_clean());
    }

    #[test]
    fn slN_sym_restricts_to_abelian_powers() {
        for (n, r) in [(1, 2), (2, 1), (2, 2), (2, 3)] {
            let sym = build_sln_sym(n, r);
            let ab = build_abelian_powers(n, r);
            for i in 1..=n {
                let w = sym.op_by_name(&format!("e_{i}_0"), 0).unwrap().unwrap();
                let x = ab.op_by_name(&format!("x{i}"), 0).unwrap().unwrap();
                assert_eq!(w, x, "W-restriction mismatch at n={n} r={r} i={i}");
            }
        }
    }

    #[test]
    fn slN_sym_cyclic_killed_by_upper() {
        let sym = build_sln_sym(2, 2);
        let v = sym.cyclic_vector();
        for name in ["e_0_1", "e_0_2"] {
            let m = sym.op_by_name(name, 0).unwrap().unwrap();
            assert!(m.apply(v).unwrap().iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn current_op_k0_is_leibniz_sum() {
        let a = build_sl2_irrep(1);
        let b = build_sl2_irrep(1);
        let mods = vec![a, b];
        let e = CurrentOperator { generator: 0, power: 0 };
        let z1 = EvaluationPoints::new(vec![rat_int(0), rat_int(1)]).unwrap();
        let z2 = EvaluationPoints::new(vec![rat(5, 2), rat_int(-3)]).unwrap();
        let m1 = current_op_matrix(&mods, &z1, e).unwrap();
        let m2 = current_op_matrix(&mods, &z2, e).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn current_op_hand_example() {
        // f (x) t on [1] (x) [1] at Z = (0, 1): v1 (x) v2 maps to
        // 0 * (f v1) (x) v2 + 1 * v1 (x) (f v2).
        let mods = vec![build_sl2_irrep(1), build_sl2_irrep(1)];
        let z = EvaluationPoints::new(vec![rat_int(0), rat_int(1)]).unwrap();
        let f = CurrentOperator { generator: 2, power: 1 };
        let m = current_op_matrix(&mods, &z, f).unwrap();
        // Basis: 0 = v (x) v, 1 = v (x) fv, 2 = fv (x) v, 3 = fv (x) fv.
        assert_eq!(m.at(1, 0), &rat_int(1));
        assert!(m.at(2, 0).is_zero());
        assert_eq!(m.at(3, 2), &rat_int(1));
        assert!(m.at(3, 1).is_zero());
    }

    #[test]
    fn sparse_matches_dense() {
        let mods = vec![build_sl2_irrep(2), build_sl2_irrep(1)];
        let z = EvaluationPoints::default_points(2);
        for g in 0..3 {
            for k in 0..3 {
                let op = CurrentOperator { generator: g, power: k };
                let dense = current_op_matrix(&mods, &z, op).unwrap();
                let sparse = current_op_sparse(&mods, &z, op).unwrap();
                assert_eq!(sparse.to_mat(), dense);
            }
        }
    }

    #[test]
    fn vandermonde_dependency_for_high_powers() {
        // For n ungraded factors, g (x) t^k with k >= n equals the
        // combination given by t^k mod prod (t - z_i).
        let mods = vec![build_sl2_irrep(1), build_sl2_irrep(2)];
        let z = EvaluationPoints::new(vec![rat_int(2), rat_int(5)]).unwrap();
        for g in 0..3 {
            for k in 2..5usize {
                // Remainder of t^k modulo (t - 2)(t - 5) = t^2 - 7t + 10,
                // tracked as coefficients of 1 and t.
                let mut cur = vec![Rat::zero(); 2];
                cur[0] = Rat::one();
                for _ in 0..k {
                    // Multiply by t, then reduce t^2 -> 7t - 10.
                    let hi = cur[1].clone();
                    cur[1] = cur[0].clone() + &hi * rat_int(7);
                    cur[0] = -(&hi * rat_int(10));
                }
                let direct =
                    current_op_matrix(&mods, &z, CurrentOperator { generator: g, power: k })
                        .unwrap();
                let mut combo = Mat::zeros(6, 6);
                for (j, c) in cur.iter().enumerate() {
                    if !c.is_zero() {
                        let m = current_op_matrix(
                            &mods,
                            &z,
                            CurrentOperator { generator: g, power: j },
                        )
                        .unwrap();
                        combo = combo.add(&m.scale(c)).unwrap();
                    }
                }
                assert_eq!(direct, combo, "generator {g}, power {k}");
            }
        }
    }

    #[test]
    fn validate_flags_swapped_generators() {
        let good = build_sl2_irrep(1);
        let pres = good.presentation().clone();
        let e = good.op(0, 0).unwrap().clone();
        let h = good.op(1, 0).unwrap().clone();
        let f = good.op(2, 0).unwrap().clone();
        let bad = CyclicModule::new(
            "bad".into(),
            pres,
            vec![vec![f], vec![h], vec![e]],
            good.cyclic_vector().to_vec(),
            None,
            None,
        )
        .unwrap();
        assert!(!validate_module(&bad).is_clean());
    }

    #[test]
    fn random_points_distinct_and_seeded() {
        let a = EvaluationPoints::random(4, 7, 1000, 1000);
        let b = EvaluationPoints::random(4, 7, 1000, 1000);
        assert_eq!(a, b);
        let c = EvaluationPoints::random(4, 8, 1000, 1000);
        assert_ne!(a, c);
    }
}
