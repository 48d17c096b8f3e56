//! The filtered tensor product, fusion products, bigraded characters,
//! irreducible decompositions, Kostka tables, and the Z-independence
//! report.
//!
//! The filtration F^i of the tensor product of evaluation modules is
//! the span of all current-operator words of total t-degree at most i
//! applied to the product of cyclic vectors. Levels are built by
//! applying each degree-raising operator to the previous levels and
//! closing under the degree-0 action after every insertion; positive
//! t-powers are cut off at K = sum(extent_i + 1) - 1, beyond which
//! operators act by combinations of lower powers.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::modules::{
    current_op_sparse, validate_module, CurrentOperator, CyclicModule, EvaluationPoints, SparseOp,
};
use crate::qpoly::{QAuxPoly, QPoly, ZqPoly};
use crate::rat::{to_i64, Rat};

/// Increasing chain F^0 in F^1 in ... in F^D of subspaces of the tensor
/// product, with F^D the full space.
#[derive(Debug)]
pub struct Filtration {
    modules: Vec<CyclicModule>,
    points: EvaluationPoints,
    chain: Echelon,
    row_levels: Vec<usize>,
    level_dims: Vec<usize>,
    cutoff: usize,
    ops: Vec<Vec<SparseOp>>,
}

impl Filtration {
    pub fn modules(&self) -> &[CyclicModule] {
        &self.modules
    }

    pub fn points(&self) -> &EvaluationPoints {
        &self.points
    }

    pub fn total_dim(&self) -> usize {
        self.chain.ambient_dim()
    }

    /// Terminal index D with F^D the full space.
    pub fn depth(&self) -> usize {
        self.level_dims.len() - 1
    }

    /// Dimensions of F^0 .. F^D.
    pub fn level_dims(&self) -> &[usize] {
        &self.level_dims
    }

    /// t-power cutoff K used while building the chain.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn chain(&self) -> &Echelon {
        &self.chain
    }

    pub fn row_levels(&self) -> &[usize] {
        &self.row_levels
    }

    /// The tensor-space operator of g (x) t^k, when k <= K.
    pub fn op(&self, gen: usize, power: usize) -> Option<&SparseOp> {
        self.ops.get(gen).and_then(|v| v.get(power))
    }

    /// Dense basis of F^level (rows inserted at levels <= level).
    pub fn level_basis(&self, level: usize) -> Vec<Vec<Rat>> {
        let ambient = self.total_dim();
        self.chain
            .rows()
            .iter()
            .zip(&self.row_levels)
            .filter(|(_, &l)| l <= level)
            .map(|(r, _)| r.to_dense(ambient))
            .collect()
    }

    /// Per-tensor-index eigenvalue of a diagonal integer generator.
    fn index_weights(&self, gen: usize) -> Result<Vec<i64>> {
        let mut diags: Vec<Vec<i64>> = Vec::new();
        for m in &self.modules {
            let mat = m.op(gen, 0).ok_or_else(|| {
                Error::InvalidInput("weight operator has no degree-0 action".into())
            })?;
            if !mat.is_diagonal() {
                return Err(Error::InvalidInput(format!(
                    "weight operator {} is not semisimple on {}",
                    m.presentation().gen_name(gen),
                    m.name()
                )));
            }
            let mut d = Vec::with_capacity(m.dim());
            for i in 0..m.dim() {
                d.push(to_i64(mat.at(i, i)).map_err(|_| {
                    Error::InvalidInput("weight operator has non-integer eigenvalues".into())
                })?);
            }
            diags.push(d);
        }
        Ok(self.sum_over_factors(&diags))
    }

    /// Per-tensor-index total auxiliary weight.
    fn index_aux(&self) -> Result<Vec<i64>> {
        let mut per: Vec<Vec<i64>> = Vec::new();
        for m in &self.modules {
            let aux = m.aux_grading().ok_or_else(|| {
                Error::InvalidInput(format!("module {} carries no auxiliary grading", m.name()))
            })?;
            per.push(aux.to_vec());
        }
        Ok(self.sum_over_factors(&per))
    }

    fn sum_over_factors(&self, per_factor: &[Vec<i64>]) -> Vec<i64> {
        let dims: Vec<usize> = self.modules.iter().map(|m| m.dim()).collect();
        let total = self.total_dim();
        let mut out = vec![0i64; total];
        let mut digits = vec![0usize; dims.len()];
        for slot in out.iter_mut() {
            *slot = digits
                .iter()
                .zip(per_factor)
                .map(|(&d, vals)| vals[d])
                .sum();
            for p in (0..dims.len()).rev() {
                digits[p] += 1;
                if digits[p] < dims[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
        out
    }
}

fn check_same_presentation(modules: &[CyclicModule]) -> Result<()> {
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

/// Builds the filtered tensor product of the given cyclic modules at
/// pairwise-distinct evaluation points.
pub fn filtered_tensor(
    modules: &[CyclicModule],
    points: &EvaluationPoints,
) -> Result<Filtration> {
    check_same_presentation(modules)?;
    if modules.len() != points.len() {
        return Err(Error::DimMismatch(format!(
            "{} modules vs {} points",
            modules.len(),
            points.len()
        )));
    }
    let total: usize = modules.iter().map(|m| m.dim()).product();
    if total == 0 {
        return Err(Error::InvalidInput("zero-dimensional factor".into()));
    }
    let gens = modules[0].presentation().gen_count();
    let cutoff: usize = modules.iter().map(|m| m.t_extent() + 1).sum::<usize>() - 1;
    let mut ops: Vec<Vec<SparseOp>> = Vec::with_capacity(gens);
    for g in 0..gens {
        let mut per = Vec::with_capacity(cutoff + 1);
        for k in 0..=cutoff {
            per.push(current_op_sparse(
                modules,
                points,
                CurrentOperator {
                    generator: g,
                    power: k,
                },
            )?);
        }
        ops.push(per);
    }

    // Seed: v_1 (x) ... (x) v_n.
    let mut seed = vec![Rat::from_integer(1.into())];
    for m in modules {
        let mut next = Vec::with_capacity(seed.len() * m.dim());
        for s in &seed {
            for c in m.cyclic_vector() {
                next.push(s * c);
            }
        }
        seed = next;
    }
    let seed = SparseRow::from_dense(&seed);
    if seed.is_zero() {
        return Err(Error::InvariantViolation("zero cyclic vector".into()));
    }

    let mut chain = Echelon::new(total);
    let mut row_levels: Vec<usize> = Vec::new();
    let mut rows_by_level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue: VecDeque<usize> = VecDeque::new();

    let insert = |chain: &mut Echelon,
                      row_levels: &mut Vec<usize>,
                      rows_by_level: &mut Vec<Vec<usize>>,
                      queue: &mut VecDeque<usize>,
                      v: SparseRow,
                      level: usize| {
        if let Some(idx) = chain.insert(v) {
            row_levels.push(level);
            rows_by_level[level].push(idx);
            queue.push_back(idx);
        }
    };
    // Degree-0 closure of everything currently queued.
    let saturate0 = |chain: &mut Echelon,
                     row_levels: &mut Vec<usize>,
                     rows_by_level: &mut Vec<Vec<usize>>,
                     queue: &mut VecDeque<usize>,
                     ops: &[Vec<SparseOp>],
                     level: usize| {
        while let Some(r) = queue.pop_front() {
            let row = chain.rows()[r].clone();
            for per_gen in ops {
                let image = per_gen[0].apply_row(&row);
                if !image.is_zero() {
                    if let Some(idx) = chain.insert(image) {
                        row_levels.push(level);
                        rows_by_level[level].push(idx);
                        queue.push_back(idx);
                    }
                }
            }
        }
    };

    insert(
        &mut chain,
        &mut row_levels,
        &mut rows_by_level,
        &mut queue,
        seed,
        0,
    );
    saturate0(
        &mut chain,
        &mut row_levels,
        &mut rows_by_level,
        &mut queue,
        &ops,
        0,
    );
    let mut level_dims = vec![chain.dim()];

    let mut stalls = 0usize;
    let mut level = 0usize;
    while chain.dim() < total {
        level += 1;
        rows_by_level.push(Vec::new());
        let before = chain.dim();
        for k in 1..=cutoff.min(level) {
            let source_level = level - k;
            let sources = rows_by_level[source_level].clone();
            for per_gen in &ops {
                let op = &per_gen[k];
                for &r in &sources {
                    let image = op.apply_row(&chain.rows()[r].clone());
                    if image.is_zero() {
                        continue;
                    }
                    insert(
                        &mut chain,
                        &mut row_levels,
                        &mut rows_by_level,
                        &mut queue,
                        image,
                        level,
                    );
                    saturate0(
                        &mut chain,
                        &mut row_levels,
                        &mut rows_by_level,
                        &mut queue,
                        &ops,
                        level,
                    );
                }
            }
        }
        level_dims.push(chain.dim());
        if chain.dim() == before {
            stalls += 1;
            // K consecutive stalls mean every F^{level-K..level} agrees,
            // so the chain can never grow again.
            if stalls >= cutoff.max(1) {
                return Err(Error::InvariantViolation(format!(
                    "non-cyclic configuration: filtration stabilized at dimension {} of {}",
                    chain.dim(),
                    total
                )));
            }
        } else {
            stalls = 0;
        }
    }
    // Trim trailing levels that added nothing after the space filled up.
    let terminal = level_dims.iter().position(|&d| d == total).unwrap();
    level_dims.truncate(terminal + 1);

    Ok(Filtration {
        modules: modules.to_vec(),
        points: points.clone(),
        chain,
        row_levels,
        level_dims,
        cutoff,
        ops,
    })
}

// ---------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------

/// Which diagonal grading supplies the character's weight axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightAxis<'a> {
    /// Eigenvalue of a semisimple generator (by name).
    Generator(&'a str),
    /// The auxiliary per-basis-vector grading.
    Aux,
}

/// Multiplicity table indexed by (weight, t-degree, auxiliary weight).
/// The auxiliary slot is 0 throughout when the table was built without
/// the aux axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedChar {
    entries: BTreeMap<(i64, usize, i64), u64>,
    has_aux: bool,
}

impl BigradedChar {
    pub fn from_entries(entries: BTreeMap<(i64, usize, i64), u64>, has_aux: bool) -> Self {
        let mut entries = entries;
        entries.retain(|_, &mut m| m != 0);
        BigradedChar { entries, has_aux }
    }

    pub fn has_aux(&self) -> bool {
        self.has_aux
    }

    pub fn entries(&self) -> &BTreeMap<(i64, usize, i64), u64> {
        &self.entries
    }

    pub fn total_mult(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn mult(&self, weight: i64, tdeg: usize, aux: i64) -> u64 {
        self.entries.get(&(weight, tdeg, aux)).copied().unwrap_or(0)
    }

    /// Weight multiplicities of the q = 1 specialization.
    pub fn q1_weights(&self) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (&(w, _, _), &m) in &self.entries {
            *out.entry(w).or_insert(0) += m;
        }
        out
    }

    /// Collapses the aux axis.
    pub fn weight_tdeg_table(&self) -> BTreeMap<(i64, usize), u64> {
        let mut out = BTreeMap::new();
        for (&(w, s, _), &m) in &self.entries {
            *out.entry((w, s)).or_insert(0) += m;
        }
        out
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.entries.keys().map(|&(w, _, _)| w).max()
    }

    /// ch(z, q) with z tracking the f-degree r = (max_weight - w) / 2.
    /// Requires all weights congruent to the maximum mod 2.
    pub fn to_f_char(&self) -> Result<ZqPoly> {
        let Some(top) = self.max_weight() else {
            return Ok(ZqPoly::zero());
        };
        let mut out = ZqPoly::zero();
        for (&(w, s, _), &m) in &self.entries {
            let diff = top - w;
            if diff % 2 != 0 {
                return Err(Error::InvalidInput(
                    "weights of mixed parity have no f-degree grading".into(),
                ));
            }
            out.add_term((diff / 2) as u32, s as u32, m as i64);
        }
        Ok(out)
    }
}

fn class_tables(
    flt: &Filtration,
    axis: WeightAxis<'_>,
    with_aux: bool,
) -> Result<(Vec<i64>, Option<Vec<i64>>)> {
    let weights = match axis {
        WeightAxis::Generator(name) => {
            let gen = flt.modules()[0].presentation().gen_index(name)?;
            flt.index_weights(gen)?
        }
        WeightAxis::Aux => {
            if with_aux {
                return Err(Error::InvalidInput(
                    "aux axis cannot be requested twice".into(),
                ));
            }
            flt.index_aux()?
        }
    };
    let aux = if with_aux {
        Some(flt.index_aux()?)
    } else {
        None
    };
    Ok((weights, aux))
}

/// Bigraded character of a filtration: multiplicity of (w, s[, a]) is
/// the dimension of the class component of F^s minus that of F^{s-1}.
pub fn bigraded_character(
    flt: &Filtration,
    axis: WeightAxis<'_>,
    with_aux: bool,
) -> Result<BigradedChar> {
    let (weights, aux) = class_tables(flt, axis, with_aux)?;
    let class_of = |idx: usize| -> (i64, i64) {
        (
            weights[idx],
            aux.as_ref().map(|a| a[idx]).unwrap_or(0),
        )
    };

    // Fast path: every basis row is homogeneous for the class grading.
    let mut homogeneous = true;
    'rows: for row in flt.chain.rows() {
        let mut iter = row.entries().iter();
        let first = class_of(iter.next().unwrap().0 as usize);
        for (idx, _) in iter {
            if class_of(*idx as usize) != first {
                homogeneous = false;
                break 'rows;
            }
        }
    }

    let mut entries: BTreeMap<(i64, usize, i64), u64> = BTreeMap::new();
    if homogeneous {
        for (row, &level) in flt.chain.rows().iter().zip(&flt.row_levels) {
            let (w, a) = class_of(row.entries()[0].0 as usize);
            *entries.entry((w, level, a)).or_insert(0) += 1;
        }
    } else {
        // Projection path: per-class column restriction of the chain.
        // Valid because every F^i is invariant under the diagonal class
        // gradings; the dimension sum check below certifies that.
        let mut per_class: BTreeMap<(i64, i64), Echelon> = BTreeMap::new();
        let mut row_cursor = 0usize;
        let mut prev_dims: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for (level, &dim_here) in flt.level_dims.iter().enumerate() {
            while row_cursor < flt.chain.rows().len() && flt.row_levels[row_cursor] <= level {
                let row = &flt.chain.rows()[row_cursor];
                let mut split: BTreeMap<(i64, i64), Vec<(u32, Rat)>> = BTreeMap::new();
                for (idx, c) in row.entries() {
                    split
                        .entry(class_of(*idx as usize))
                        .or_default()
                        .push((*idx, Rat::from_integer(c.clone())));
                }
                for (class, pairs) in split {
                    per_class
                        .entry(class)
                        .or_insert_with(|| Echelon::new(flt.total_dim()))
                        .insert(SparseRow::from_rat_pairs(&pairs));
                }
                row_cursor += 1;
            }
            let mut sum = 0usize;
            for (class, ech) in &per_class {
                let d = ech.dim();
                sum += d;
                let prev = prev_dims.insert(*class, d).unwrap_or(0);
                if d > prev {
                    *entries.entry((class.0, level, class.1)).or_insert(0) += (d - prev) as u64;
                }
            }
            if sum != dim_here {
                return Err(Error::InvariantViolation(format!(
                    "F^{level} is not homogeneous for the requested grading \
                     (components sum to {sum}, dim is {dim_here})"
                )));
            }
        }
    }
    Ok(BigradedChar::from_entries(entries, with_aux))
}

/// Bigraded character read directly off a graded module (e.g. a fusion
/// product): weights from the diagonal generator action, t-degrees from
/// the internal grading (0 everywhere for ungraded modules).
pub fn module_character(
    module: &CyclicModule,
    weight_gen: &str,
    with_aux: bool,
) -> Result<BigradedChar> {
    let gen = module.presentation().gen_index(weight_gen)?;
    let mat = module
        .op(gen, 0)
        .ok_or_else(|| Error::InvalidInput("weight operator missing".into()))?;
    if !mat.is_diagonal() {
        return Err(Error::InvalidInput(format!(
            "weight operator {weight_gen} is not semisimple on {}",
            module.name()
        )));
    }
    let aux = if with_aux {
        Some(module.aux_grading().ok_or_else(|| {
            Error::InvalidInput(format!("module {} carries no aux grading", module.name()))
        })?)
    } else {
        None
    };
    let mut entries: BTreeMap<(i64, usize, i64), u64> = BTreeMap::new();
    for i in 0..module.dim() {
        let w = to_i64(mat.at(i, i))?;
        let s = module.t_grading().map(|t| t[i]).unwrap_or(0);
        let a = aux.map(|a| a[i]).unwrap_or(0);
        *entries.entry((w, s, a)).or_insert(0) += 1;
    }
    Ok(BigradedChar::from_entries(entries, with_aux))
}

/// ch(z, q) in the f-degree grading. Rank-one presentations convert
/// h-weights via r = (top - w) / 2; presentations without a Cartan
/// subset (abelian algebras) use the auxiliary degree grading directly.
pub fn f_bigraded_character(flt: &Filtration) -> Result<ZqPoly> {
    let pres = flt.modules()[0].presentation().clone();
    if pres.cartan().is_empty() {
        let ch = bigraded_character(flt, WeightAxis::Aux, false)?;
        let mut out = ZqPoly::zero();
        for (&(deg, s, _), &m) in ch.entries() {
            if deg < 0 {
                return Err(Error::InvalidInput("negative degree grading".into()));
            }
            out.add_term(deg as u32, s as u32, m as i64);
        }
        Ok(out)
    } else if pres.cartan().len() == 1 {
        let name = pres.gen_name(pres.cartan()[0]).to_string();
        let ch = bigraded_character(flt, WeightAxis::Generator(&name), false)?;
        ch.to_f_char()
    } else {
        Err(Error::InvalidInput(
            "f-degree character needs a rank-one or abelian presentation".into(),
        ))
    }
}

// ---------------------------------------------------------------------
// Decomposition and Kostka tables
// ---------------------------------------------------------------------

/// Decomposes an sl2-type character into irreducible multiplicities per
/// t-degree: mult(m, s) = dim(m at s) - dim(m + 2 at s).
pub fn gr_decompose(ch: &BigradedChar) -> Result<BTreeMap<(i64, usize), u64>> {
    let table = ch.weight_tdeg_table();
    decompose_slices(&table)
}

/// Aux-refined variant: decomposes each (t-degree, aux) slice.
pub fn gr_decompose_aux(ch: &BigradedChar) -> Result<BTreeMap<(i64, usize, i64), u64>> {
    let mut out = BTreeMap::new();
    let mut slices: BTreeMap<i64, BTreeMap<(i64, usize), u64>> = BTreeMap::new();
    for (&(w, s, a), &m) in ch.entries() {
        *slices.entry(a).or_default().entry((w, s)).or_insert(0) += m;
    }
    for (a, table) in slices {
        for ((m, s), mult) in decompose_slices(&table)? {
            out.insert((m, s, a), mult);
        }
    }
    Ok(out)
}

fn decompose_slices(table: &BTreeMap<(i64, usize), u64>) -> Result<BTreeMap<(i64, usize), u64>> {
    let mut out = BTreeMap::new();
    for (&(m, s), &d) in table.iter() {
        if m < 0 {
            continue;
        }
        let above = table.get(&(m + 2, s)).copied().unwrap_or(0);
        if d < above {
            return Err(Error::InvariantViolation(format!(
                "negative multiplicity at weight {m}, degree {s}: {d} < {above}"
            )));
        }
        if d > above {
            out.insert((m, s), d - above);
        }
    }
    Ok(out)
}

/// Map from dominant weight to its graded multiplicity polynomial
/// c_q(eta), optionally refined by the auxiliary character variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KostkaTable {
    entries: BTreeMap<i64, QAuxPoly>,
    has_aux: bool,
}

impl KostkaTable {
    pub fn entries(&self) -> &BTreeMap<i64, QAuxPoly> {
        &self.entries
    }

    pub fn has_aux(&self) -> bool {
        self.has_aux
    }

    /// Plain q-polynomials (aux specialized to 1).
    pub fn q_polys(&self) -> BTreeMap<i64, QPoly> {
        self.entries
            .iter()
            .map(|(&eta, p)| (eta, p.specialize_u1()))
            .collect()
    }

    pub fn get_q(&self, eta: i64) -> QPoly {
        self.entries
            .get(&eta)
            .map(|p| p.specialize_u1())
            .unwrap_or_else(QPoly::zero)
    }

    /// sum_eta c_q(eta)|_{q=u=1} * dim(pi_eta); equals the tensor
    /// product dimension.
    pub fn total_weighted_dim(&self) -> i64 {
        self.entries
            .iter()
            .map(|(&eta, p)| p.eval_at_ones() * (eta + 1))
            .sum()
    }
}

/// Kostka table of the fusion of sl2-type modules at the given points.
pub fn kostka_table(
    modules: &[CyclicModule],
    points: &EvaluationPoints,
    aux: bool,
) -> Result<KostkaTable> {
    let flt = filtered_tensor(modules, points)?;
    kostka_table_from(&flt, aux)
}

/// Kostka table computed from an existing filtration.
pub fn kostka_table_from(flt: &Filtration, aux: bool) -> Result<KostkaTable> {
    let pres = flt.modules()[0].presentation().clone();
    if pres.cartan().len() != 1 {
        return Err(Error::InvalidInput(
            "Kostka tables need a rank-one presentation".into(),
        ));
    }
    let h = pres.gen_name(pres.cartan()[0]).to_string();
    let ch = bigraded_character(flt, WeightAxis::Generator(&h), aux)?;
    let mut entries: BTreeMap<i64, QAuxPoly> = BTreeMap::new();
    if aux {
        for ((m, s, a), mult) in gr_decompose_aux(&ch)? {
            entries
                .entry(m)
                .or_insert_with(QAuxPoly::zero)
                .add_term(s as u32, a, mult as i64);
        }
    } else {
        for ((m, s), mult) in gr_decompose(&ch)? {
            entries
                .entry(m)
                .or_insert_with(QAuxPoly::zero)
                .add_term(s as u32, 0, mult as i64);
        }
    }
    let table = KostkaTable {
        entries,
        has_aux: aux,
    };
    let expected: i64 = flt.total_dim() as i64;
    let got = table.total_weighted_dim();
    if got != expected {
        return Err(Error::InvariantViolation(format!(
            "Kostka table counts {got} of {expected} dimensions"
        )));
    }
    Ok(table)
}

/// Joint decomposition of a doubled (g + g) fusion into components
/// pi_eta (x) pi_mu with q-graded multiplicities. The aux grading must
/// carry the second copy's weights.
pub fn kostka_table_doubled(
    modules: &[CyclicModule],
    points: &EvaluationPoints,
) -> Result<BTreeMap<(i64, i64), QPoly>> {
    let flt = filtered_tensor(modules, points)?;
    let pres = flt.modules()[0].presentation().clone();
    if pres.cartan().len() != 2 {
        return Err(Error::InvalidInput(
            "doubled Kostka tables need a rank-two presentation".into(),
        ));
    }
    let h1 = pres.gen_name(pres.cartan()[0]).to_string();
    let ch = bigraded_character(&flt, WeightAxis::Generator(&h1), true)?;
    // Slice by t-degree; alternate in both weights.
    let mut slices: BTreeMap<usize, BTreeMap<(i64, i64), u64>> = BTreeMap::new();
    for (&(w1, s, w2), &m) in ch.entries() {
        *slices.entry(s).or_default().entry((w1, w2)).or_insert(0) += m;
    }
    let mut out: BTreeMap<(i64, i64), QPoly> = BTreeMap::new();
    for (s, table) in slices {
        let d = |eta: i64, mu: i64| table.get(&(eta, mu)).copied().unwrap_or(0) as i64;
        for (&(eta, mu), _) in table.iter() {
            if eta < 0 || mu < 0 {
                continue;
            }
            let mult = d(eta, mu) - d(eta + 2, mu) - d(eta, mu + 2) + d(eta + 2, mu + 2);
            if mult < 0 {
                return Err(Error::InvariantViolation(format!(
                    "negative doubled multiplicity at ({eta}, {mu}, q^{s})"
                )));
            }
            if mult > 0 {
                out.entry((eta, mu))
                    .or_insert_with(QPoly::zero)
                    .add_term(s as u32, mult);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Fusion product
// ---------------------------------------------------------------------

/// The fusion product: the adjoint graded module of the filtered tensor
/// product, as a graded cyclic module over the same presentation.
pub fn fuse(modules: &[CyclicModule], points: &EvaluationPoints) -> Result<CyclicModule> {
    let flt = filtered_tensor(modules, points)?;
    fuse_from(&flt)
}

/// Builds the graded module from an existing filtration.
pub fn fuse_from(flt: &Filtration) -> Result<CyclicModule> {
    let dim = flt.total_dim();
    let depth = flt.depth();
    let gens = flt.modules()[0].presentation().gen_count();
    let ambient = dim;
    let rows = flt.chain.rows();
    let levels = flt.row_levels();

    let mut action: Vec<Vec<crate::linalg::Mat>> = Vec::with_capacity(gens);
    let max_power = depth.min(flt.cutoff());
    for g in 0..gens {
        let mut per_power = Vec::with_capacity(max_power + 1);
        for r in 0..=max_power {
            let op = flt.op(g, r).expect("ops built to cutoff");
            let mut mat = crate::linalg::Mat::zeros(dim, dim);
            for (j, row) in rows.iter().enumerate() {
                let target_level = levels[j] + r;
                if target_level > depth {
                    continue;
                }
                let image = op.apply_row(row);
                if image.is_zero() {
                    continue;
                }
                let coords = flt
                    .chain
                    .solve_coords(&image.to_dense(ambient))?
                    .ok_or_else(|| {
                        Error::InvariantViolation("operator image escapes the chain".into())
                    })?;
                for (i, c) in coords.into_iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    debug_assert!(
                        levels[i] <= target_level,
                        "image of level {} under t^{r} hit level {}",
                        levels[j],
                        levels[i]
                    );
                    if levels[i] == target_level {
                        *mat.at_mut(i, j) = c;
                    }
                }
            }
            per_power.push(mat);
        }
        action.push(per_power);
    }

    // Cyclic vector: the class of v_1 (x) ... (x) v_n in gr^0.
    let mut seed = vec![Rat::from_integer(1.into())];
    for m in flt.modules() {
        let mut next = Vec::with_capacity(seed.len() * m.dim());
        for s in &seed {
            for c in m.cyclic_vector() {
                next.push(s * c);
            }
        }
        seed = next;
    }
    let mut cyclic = flt
        .chain
        .solve_coords(&seed)?
        .ok_or_else(|| Error::InvariantViolation("cyclic vector escapes the chain".into()))?;
    for (i, c) in cyclic.iter_mut().enumerate() {
        if levels[i] != 0 {
            *c = Rat::zero();
        }
    }

    // Auxiliary grading carries over when every row is aux-homogeneous.
    let aux_grading = match flt.index_aux() {
        Ok(idx_aux) => {
            let mut per_row = Vec::with_capacity(rows.len());
            let mut ok = true;
            'outer: for row in rows {
                let mut it = row.entries().iter();
                let first = idx_aux[it.next().unwrap().0 as usize];
                for (i, _) in it {
                    if idx_aux[*i as usize] != first {
                        ok = false;
                        break 'outer;
                    }
                }
                per_row.push(first);
            }
            if ok {
                Some(per_row)
            } else {
                None
            }
        }
        Err(_) => None,
    };

    let names: Vec<&str> = flt.modules().iter().map(|m| m.name()).collect();
    let fused = CyclicModule::new(
        format!("fuse({})", names.join(", ")),
        flt.modules()[0].presentation().clone(),
        action,
        cyclic,
        Some(levels.to_vec()),
        aux_grading,
    )?;
    debug_assert!(
        validate_module(&fused).is_clean(),
        "fused module fails validation: {}",
        validate_module(&fused)
    );
    Ok(fused)
}

// ---------------------------------------------------------------------
// Z-independence
// ---------------------------------------------------------------------

/// Outcome of comparing characters over several random configurations.
#[derive(Debug, Clone)]
pub struct ZIndependenceReport {
    pub n_samples: usize,
    pub all_equal: bool,
    /// Sample indices and rendered point sets of one disagreeing pair.
    pub disagreement: Option<(String, String)>,
}

impl std::fmt::Display for ZIndependenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.all_equal {
            write!(f, "all {} samples agree", self.n_samples)
        } else {
            let (a, b) = self.disagreement.as_ref().unwrap();
            write!(f, "characters disagree between Z = {a} and Z = {b}")
        }
    }
}

/// Computes the bigraded character at seeded random distinct-point
/// configurations and reports whether they all agree.
pub fn z_independence(
    modules: &[CyclicModule],
    n_samples: usize,
    seed: u64,
) -> Result<ZIndependenceReport> {
    z_independence_with(modules, n_samples, seed, 1000, 1000)
}

/// As z_independence, with explicit bounds for the random rationals.
pub fn z_independence_with(
    modules: &[CyclicModule],
    n_samples: usize,
    seed: u64,
    max_num: i64,
    max_den: i64,
) -> Result<ZIndependenceReport> {
    if n_samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    check_same_presentation(modules)?;
    let pres = modules[0].presentation().clone();
    let use_aux = modules.iter().all(|m| m.aux_grading().is_some());
    let mut chars: Vec<(String, BigradedChar)> = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let pts = EvaluationPoints::random(modules.len(), seed.wrapping_add(i as u64), max_num, max_den);
        let flt = filtered_tensor(modules, &pts)?;
        let ch = if pres.cartan().is_empty() {
            bigraded_character(&flt, WeightAxis::Aux, false)?
        } else {
            let h = pres.gen_name(pres.cartan()[0]).to_string();
            bigraded_character(&flt, WeightAxis::Generator(&h), use_aux)?
        };
        let rendered = pts
            .values()
            .iter()
            .map(crate::rat::format_rat)
            .collect::<Vec<_>>()
            .join(",");
        chars.push((rendered, ch));
    }
    for i in 1..chars.len() {
        if chars[i].1 != chars[0].1 {
            return Ok(ZIndependenceReport {
                n_samples,
                all_equal: false,
                disagreement: Some((chars[0].0.clone(), chars[i].0.clone())),
            });
        }
    }
    Ok(ZIndependenceReport {
        n_samples,
        all_equal: true,
        disagreement: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_abelian_powers, build_level_sum, build_sl2_irrep};

    fn sl2s(ms: &[usize]) -> Vec<CyclicModule> {
        ms.iter().map(|&m| build_sl2_irrep(m)).collect()
    }

    #[test]
    fn filtration_dims_for_two_vectors() {
        // F^0 is the Cartan component (symmetric square), F^1 everything.
        let mods = sl2s(&[1, 1]);
        let z = EvaluationPoints::new(vec![Rat::zero(), Rat::from_integer(1.into())]).unwrap();
        let flt = filtered_tensor(&mods, &z).unwrap();
        assert_eq!(flt.level_dims(), &[3, 4]);
    }

    #[test]
    fn filtration_single_module_is_level_zero() {
        for m in 0..4 {
            let mods = sl2s(&[m]);
            let z = EvaluationPoints::default_points(1);
            let flt = filtered_tensor(&mods, &z).unwrap();
            assert_eq!(flt.level_dims(), &[m + 1]);
        }
    }

    #[test]
    fn filtration_trivial_modules() {
        let mods = sl2s(&[0, 0, 0]);
        let z = EvaluationPoints::default_points(3);
        let flt = filtered_tensor(&mods, &z).unwrap();
        assert_eq!(flt.level_dims(), &[1]);
    }

    #[test]
    fn repeated_points_rejected() {
        let mods = sl2s(&[1, 1]);
        assert!(EvaluationPoints::new(vec![Rat::zero(), Rat::zero()]).is_err());
        let z = EvaluationPoints::default_points(1);
        assert!(filtered_tensor(&mods, &z).is_err());
    }

    #[test]
    fn base_fusion_character() {
        let mods = sl2s(&[1, 1]);
        let z = EvaluationPoints::default_points(2);
        let flt = filtered_tensor(&mods, &z).unwrap();
        let ch = bigraded_character(&flt, WeightAxis::Generator("h"), false).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((2, 0, 0), 1);
        expect.insert((0, 0, 0), 1);
        expect.insert((0, 1, 0), 1);
        expect.insert((-2, 0, 0), 1);
        assert_eq!(ch.entries(), &expect);
        assert_eq!(
            ch.to_f_char().unwrap().to_spaced_string(),
            "1 + z + z*q + z^2"
        );
    }

    #[test]
    fn gr_decompose_examples() {
        let z = EvaluationPoints::default_points(2);
        let flt = filtered_tensor(&sl2s(&[1, 1]), &z).unwrap();
        let ch = bigraded_character(&flt, WeightAxis::Generator("h"), false).unwrap();
        let dec = gr_decompose(&ch).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((2, 0), 1);
        expect.insert((0, 1), 1);
        assert_eq!(dec, expect);

        let z3 = EvaluationPoints::default_points(3);
        let flt3 = filtered_tensor(&sl2s(&[1, 1, 1]), &z3).unwrap();
        let ch3 = bigraded_character(&flt3, WeightAxis::Generator("h"), false).unwrap();
        let dec3 = gr_decompose(&ch3).unwrap();
        let mut expect3 = BTreeMap::new();
        expect3.insert((3, 0), 1);
        expect3.insert((1, 1), 1);
        expect3.insert((1, 2), 1);
        assert_eq!(dec3, expect3);
    }

    #[test]
    fn kostka_examples() {
        let z = EvaluationPoints::default_points(2);
        let t = kostka_table(&sl2s(&[1, 1]), &z, false).unwrap();
        assert_eq!(t.get_q(2).to_compact_string(), "1");
        assert_eq!(t.get_q(0).to_compact_string(), "q");
        let z3 = EvaluationPoints::default_points(3);
        let t3 = kostka_table(&sl2s(&[1, 1, 1]), &z3, false).unwrap();
        assert_eq!(t3.get_q(3).to_compact_string(), "1");
        assert_eq!(t3.get_q(1).to_compact_string(), "q+q^2");
        let z1 = EvaluationPoints::default_points(1);
        let t1 = kostka_table(&sl2s(&[4]), &z1, false).unwrap();
        assert_eq!(t1.get_q(4).to_compact_string(), "1");
    }

    #[test]
    fn fuse_graded_dims_and_validity() {
        let z = EvaluationPoints::default_points(2);
        let fused = fuse(&sl2s(&[1, 1]), &z).unwrap();
        assert_eq!(fused.dim(), 4);
        let t = fused.t_grading().unwrap();
        let by_level: Vec<usize> = (0..=1)
            .map(|l| t.iter().filter(|&&x| x == l).count())
            .collect();
        assert_eq!(by_level, vec![3, 1]);
        assert!(validate_module(&fused).is_clean());
        let ch = module_character(&fused, "h", false).unwrap();
        assert_eq!(
            ch.to_f_char().unwrap().to_spaced_string(),
            "1 + z + z*q + z^2"
        );
    }

    #[test]
    fn fuse_single_module_is_degree_zero() {
        let z = EvaluationPoints::default_points(1);
        let fused = fuse(&sl2s(&[3]), &z).unwrap();
        assert_eq!(fused.dim(), 4);
        assert!(fused.t_grading().unwrap().iter().all(|&t| t == 0));
        let ch = module_character(&fused, "h", false).unwrap();
        assert_eq!(ch.to_f_char().unwrap().to_spaced_string(), "1 + z + z^2 + z^3");
    }

    #[test]
    fn iterated_fuse_matches_flat_fusion() {
        // dim pi_3 maximal: the associativity case that is a theorem.
        let z2 = EvaluationPoints::default_points(2);
        let inner = fuse(&sl2s(&[1, 1]), &z2).unwrap();
        let outer = fuse(
            &[inner, build_sl2_irrep(1)],
            &EvaluationPoints::default_points(2),
        )
        .unwrap();
        let flat = fuse(&sl2s(&[1, 1, 1]), &EvaluationPoints::default_points(3)).unwrap();
        let ch_outer = module_character(&outer, "h", false).unwrap();
        let ch_flat = module_character(&flat, "h", false).unwrap();
        assert_eq!(ch_outer, ch_flat);
    }

    #[test]
    fn q1_specialization_matches_tensor_weights() {
        let mods = sl2s(&[2, 3]);
        let z = EvaluationPoints::default_points(2);
        let flt = filtered_tensor(&mods, &z).unwrap();
        let ch = bigraded_character(&flt, WeightAxis::Generator("h"), false).unwrap();
        // Independent weight count of the plain tensor product.
        let mut expect: BTreeMap<i64, u64> = BTreeMap::new();
        for i in 0..=2i64 {
            for j in 0..=3i64 {
                *expect.entry((2 - 2 * i) + (3 - 2 * j)).or_insert(0) += 1;
            }
        }
        assert_eq!(ch.q1_weights(), expect);
    }

    #[test]
    fn level_sum_fusion_is_aux_homogeneous() {
        let mods = vec![build_level_sum(1, false), build_level_sum(1, false)];
        let z = EvaluationPoints::default_points(2);
        let flt = filtered_tensor(&mods, &z).unwrap();
        let ch = bigraded_character(&flt, WeightAxis::Generator("h"), true).unwrap();
        assert_eq!(ch.total_mult(), 9);
        let t = kostka_table_from(&flt, false).unwrap();
        assert_eq!(t.total_weighted_dim(), 9);
    }

    #[test]
    fn abelian_pair_matches_sl2_pair() {
        let ab = vec![build_abelian_powers(1, 1), build_abelian_powers(1, 1)];
        let z = EvaluationPoints::default_points(2);
        let flt = filtered_tensor(&ab, &z).unwrap();
        let f = f_bigraded_character(&flt).unwrap();
        assert_eq!(f.to_spaced_string(), "1 + z + z*q + z^2");
    }

    #[test]
    fn z_independence_small() {
        let report = z_independence(&sl2s(&[1, 1]), 3, 42).unwrap();
        assert!(report.all_equal);
        let report = z_independence(&sl2s(&[2, 3]), 3, 43).unwrap();
        assert!(report.all_equal);
    }
}

#[cfg(test)]
mod debug_tests {
    use super::*;
    use crate::modules::build_sl2_irrep;

    #[test]
    fn debug_fuse_single() {
        let mods = vec![build_sl2_irrep(1)];
        let z = EvaluationPoints::default_points(1);
        let flt = filtered_tensor(&mods, &z).unwrap();
        eprintln!("levels: {:?}, dims: {:?}", flt.row_levels(), flt.level_dims());
        for (i, r) in flt.chain().rows().iter().enumerate() {
            eprintln!("row {i}: {:?}", r.entries());
        }
        let fused = fuse_from(&flt);
        match fused {
            Ok(f) => {
                for g in 0..3 {
                    eprintln!("gen {g}: {:?}", f.op(g, 0).unwrap());
                }
            }
            Err(e) => eprintln!("err {e}"),
        }
    }
}
