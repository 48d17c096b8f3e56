//! Independent character computations used to cross-validate the
//! filtration engine: a recurrence in the largest factor, a
//! Demazure-style induction step iterated over sorted highest weights,
//! and the quotient of a polynomial ring by the power-sum relation
//! ideal, computed cell by cell in the bidegree grading.

use std::collections::{BTreeMap, HashMap};


use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::qpoly::ZqPoly;
use crate::rat::{rat_int, Rat};

// ---------------------------------------------------------------------
// Recurrence
// ---------------------------------------------------------------------

/// ch(pi_1, ..., pi_n; z, q) for sl2 irreducibles given by their
/// dimensions, via the recurrence that peels the largest factor:
/// ch(dims) = ch(dims') at (qz, q) + z * ch(dims' + [max - 1]).
/// Memoized over multisets; the empty product has character 1.
pub fn recurrence_char(dims: &[usize]) -> Result<ZqPoly> {
    for &d in dims {
        if d == 0 {
            return Err(Error::InvalidInput("factor of dimension 0".into()));
        }
    }
    let mut memo: HashMap<Vec<usize>, ZqPoly> = HashMap::new();
    let mut key: Vec<usize> = dims.to_vec();
    key.sort_unstable();
    Ok(recurrence_inner(&key, &mut memo))
}

fn recurrence_inner(sorted: &[usize], memo: &mut HashMap<Vec<usize>, ZqPoly>) -> ZqPoly {
    if sorted.is_empty() {
        return ZqPoly::one();
    }
    if let Some(hit) = memo.get(sorted) {
        return hit.clone();
    }
    let max = *sorted.last().unwrap();
    let result = if max == 1 {
        // Every factor trivial.
        ZqPoly::one()
    } else if sorted.len() == 1 {
        let mut p = ZqPoly::zero();
        for r in 0..max {
            p.add_term(r as u32, 0, 1);
        }
        p
    } else {
        let rest = &sorted[..sorted.len() - 1];
        let first = recurrence_inner(rest, memo).subst_z_to_qz();
        let mut shrunk: Vec<usize> = rest.to_vec();
        shrunk.push(max - 1);
        shrunk.sort_unstable();
        let second = recurrence_inner(&shrunk, memo).mul_z();
        first.add(&second)
    };
    memo.insert(sorted.to_vec(), result.clone());
    result
}

// ---------------------------------------------------------------------
// Demazure-style induction step
// ---------------------------------------------------------------------

/// Character table by (h-weight, t-degree).
pub type WeightChar = BTreeMap<(i64, usize), u64>;

/// The trivial character.
pub fn trivial_char() -> WeightChar {
    let mut t = WeightChar::new();
    t.insert((0, 0), 1);
    t
}

/// One induction step: pull back along the degree-raising automorphism
/// (each f-string of degree r gains r in t-degree), tensor with the
/// one-dimensional weight-lambda character, and take the Euler
/// multiplicities mult(i) = dim(weight i) - dim(weight -i-2) on each
/// t-degree, expanding them back into sl2 weight strings.
pub fn demazure_step_char(ch: &WeightChar, lambda: i64) -> Result<WeightChar> {
    if ch.is_empty() {
        return Err(Error::InvalidInput("empty character".into()));
    }
    let top = ch.keys().map(|&(w, _)| w).max().unwrap();
    // theta*: t-degree shift by the f-degree, then the lambda shift.
    let mut shifted: BTreeMap<(i64, usize), u64> = BTreeMap::new();
    for (&(w, s), &m) in ch {
        let diff = top - w;
        if diff % 2 != 0 {
            return Err(Error::InvalidInput("mixed weight parity".into()));
        }
        let fdeg = (diff / 2) as usize;
        *shifted.entry((w + lambda, s + fdeg)).or_insert(0) += m;
    }
    // Euler multiplicities per t-degree.
    let mut out = WeightChar::new();
    let dims_at = |w: i64, s: usize| shifted.get(&(w, s)).copied().unwrap_or(0);
    let degrees: std::collections::BTreeSet<usize> = shifted.keys().map(|&(_, s)| s).collect();
    for &s in &degrees {
        let max_w = shifted
            .iter()
            .filter(|(&(_, deg), _)| deg == s)
            .map(|(&(w, _), _)| w)
            .max()
            .unwrap();
        for i in 0..=max_w.max(0) {
            let plus = dims_at(i, s);
            let minus = dims_at(-i - 2, s);
            if plus < minus {
                return Err(Error::InvariantViolation(format!(
                    "negative Euler multiplicity at weight {i}, degree {s}"
                )));
            }
            let mult = plus - minus;
            if mult == 0 {
                continue;
            }
            let mut w = i;
            loop {
                *out.entry((w, s)).or_insert(0) += mult;
                if w == -i {
                    break;
                }
                w -= 2;
            }
        }
    }
    Ok(out)
}

/// Iterates the induction step over ascending highest weights, starting
/// from the trivial character.
pub fn iterate_demazure(lambdas: &[i64]) -> Result<WeightChar> {
    let mut sorted: Vec<i64> = lambdas.to_vec();
    sorted.sort_unstable();
    let mut ch = trivial_char();
    for &l in &sorted {
        ch = demazure_step_char(&ch, l)?;
    }
    Ok(ch)
}

// ---------------------------------------------------------------------
// Power-sum relation ideal quotient
// ---------------------------------------------------------------------

/// Relation ideal data: relations psi_{k+1}(s) for every s, plus the
/// optional extra relation psi_{j+1}(0) = x_0^{j+1}; the quotient image
/// is spanned by monomials in the first `n_vars` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsiIdealSpec {
    pub k: usize,
    pub j: Option<usize>,
    pub n_vars: usize,
}

impl PsiIdealSpec {
    pub fn new(k: usize, j: Option<usize>, n_vars: usize) -> Result<Self> {
        if k == 0 || n_vars == 0 {
            return Err(Error::InvalidInput("k and n_vars must be positive".into()));
        }
        if let Some(j) = j {
            if j > k {
                return Err(Error::InvalidInput(format!("j = {j} exceeds k = {k}")));
            }
        }
        Ok(PsiIdealSpec { k, j, n_vars })
    }

    /// Expected total dimension (j + 1)(k + 1)^{n_vars - 1}, the graded
    /// dimension of the matching fusion product.
    pub fn expected_total(&self) -> u64 {
        let j1 = (self.j.unwrap_or(self.k) + 1) as u64;
        j1 * ((self.k + 1) as u64).pow(self.n_vars as u32 - 1)
    }
}

/// Bigraded character in the renamed variables: entry (r, s) counts the
/// f-degree-r, t-degree-s component. The (0, 0) entry is always 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FBigradedChar {
    entries: BTreeMap<(usize, usize), u64>,
}

impl FBigradedChar {
    pub fn from_entries(entries: BTreeMap<(usize, usize), u64>) -> Self {
        let mut entries = entries;
        entries.retain(|_, &mut m| m != 0);
        FBigradedChar { entries }
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn to_zq(&self) -> ZqPoly {
        let mut p = ZqPoly::zero();
        for (&(r, s), &m) in &self.entries {
            p.add_term(r as u32, s as u32, m as i64);
        }
        p
    }
}

/// Partitions of `sum` into exactly `parts` nonnegative parts, each at
/// most `max_part`, as descending vectors.
fn bounded_partitions(sum: usize, parts: usize, max_part: usize) -> Vec<Vec<u16>> {
    fn rec(sum: usize, parts: usize, cap: usize, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if parts == 0 {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        // Descending parts; remaining slots must be able to absorb sum.
        let hi = cap.min(sum);
        for first in (0..=hi).rev() {
            if first * parts < sum {
                break;
            }
            prefix.push(first as u16);
            rec(sum - first, parts - 1, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(sum, parts, max_part, &mut prefix, &mut out);
    out
}

/// Number of ordered arrangements of a descending multiset: the
/// multinomial coefficient giving each monomial's weight inside psi.
fn arrangements(mono: &[u16]) -> i64 {
    let n = mono.len();
    let mut fact = vec![1i64; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as i64;
    }
    let mut denom = 1i64;
    let mut run = 1usize;
    for i in 1..=n {
        if i < n && mono[i] == mono[i - 1] {
            run += 1;
        } else {
            denom *= fact[run];
            run = 1;
        }
    }
    fact[n] / denom
}

/// psi_{order}(shift) as a list of (descending monomial, coefficient):
/// the sum over ordered tuples of `order` nonnegative indices summing
/// to `shift`, with monomials bounded by `max_part` dropped.
fn psi_relation(order: usize, shift: usize, max_part: usize) -> Vec<(Vec<u16>, i64)> {
    bounded_partitions(shift, order, max_part)
        .into_iter()
        .map(|m| {
            let c = arrangements(&m);
            (m, c)
        })
        .collect()
}

fn merge_monomials(a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable_by(|x, y| y.cmp(x));
    out
}

/// One bidegree cell of the quotient computation:
/// dim((retained + ideal) / ideal).
fn psi_cell(
    k: usize,
    j: Option<usize>,
    n_vars: usize,
    extra: &[(usize, usize)],
    r: usize,
    s: usize,
) -> u64 {
    // Retained monomials: indices <= n_vars - 1. With the extra relation
    // x_0^{j+1}, any monomial holding j+1 zeros is already in the ideal,
    // so those coordinates are dropped from the cell up front.
    let zero_cap = j.map(|j| j.min(r));
    let keep = |mono: &[u16]| -> bool {
        match zero_cap {
            None => true,
            Some(cap) => mono.iter().filter(|&&x| x == 0).count() <= cap,
        }
    };
    let retained: Vec<Vec<u16>> = bounded_partitions(s, r, s.min(n_vars - 1))
        .into_iter()
        .filter(|m| keep(m))
        .collect();
    if retained.is_empty() {
        return 0;
    }
    if r == 0 {
        // The empty monomial; never inside a positively-graded ideal.
        return 1;
    }

    // Ambient cell: all monomials of degree r, t-degree s that survive
    // the coordinate pre-kill.
    let ambient: Vec<Vec<u16>> = bounded_partitions(s, r, s)
        .into_iter()
        .filter(|m| keep(m))
        .collect();
    let index: HashMap<Vec<u16>, u32> = ambient
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i as u32))
        .collect();

    let mut ech = Echelon::new(ambient.len());
    let push_products = |order: usize, shift: usize, ech: &mut Echelon| {
        if r < order || s < shift {
            return;
        }
        let rel = psi_relation(order, shift, s);
        if rel.is_empty() {
            return;
        }
        for mult in bounded_partitions(s - shift, r - order, s) {
            if !keep(&mult) {
                continue;
            }
            let mut pairs: Vec<(u32, Rat)> = Vec::new();
            for (mono, coeff) in &rel {
                let prod = merge_monomials(&mult, mono);
                if let Some(&id) = index.get(&prod) {
                    pairs.push((id, rat_int(*coeff)));
                }
            }
            if !pairs.is_empty() {
                ech.insert(SparseRow::from_rat_pairs(&pairs));
            }
        }
    };
    for shift in 0..=s {
        push_products(k + 1, shift, &mut ech);
    }
    for &(order, shift) in extra {
        push_products(order, shift, &mut ech);
    }

    // Count retained monomials independent of the ideal.
    let mut survivors = 0u64;
    for mono in &retained {
        let id = index[mono];
        if ech.insert(SparseRow::unit(id)).is_some() {
            survivors += 1;
        }
    }
    survivors
}

/// Character of the image of the retained-variable polynomial ring in
/// the quotient by the psi relation ideal, over bidegrees r <= max_r,
/// s <= min(max_s, r * (n_vars - 1)). The engine checks that the total
/// matches the expected module dimension.
pub fn psi_quotient_char(spec: PsiIdealSpec, max_r: usize, max_s: usize) -> Result<FBigradedChar> {
    let mut entries = BTreeMap::new();
    for r in 0..=max_r {
        let s_cap = max_s.min(r * (spec.n_vars - 1));
        for s in 0..=s_cap {
            let d = psi_cell(spec.k, spec.j, spec.n_vars, &[], r, s);
            if d > 0 {
                entries.insert((r, s), d);
            }
        }
    }
    let ch = FBigradedChar::from_entries(entries);
    let expected = spec.expected_total();
    if ch.total() != expected {
        return Err(Error::InvariantViolation(format!(
            "quotient character counts {} of {} dimensions; bounds too small?",
            ch.total(),
            expected
        )));
    }
    Ok(ch)
}

/// As psi_quotient_char with bounds derived from the matching fusion:
/// max f-degree j + k (n_vars - 1), max t-degree (n_vars - 1) max_r.
pub fn psi_quotient_char_auto(spec: PsiIdealSpec) -> Result<FBigradedChar> {
    let max_r = spec.j.unwrap_or(spec.k) + spec.k * (spec.n_vars - 1);
    let max_s = max_r * (spec.n_vars.max(1) - 1);
    psi_quotient_char(spec, max_r, max_s)
}

/// Exploratory variant: an arbitrary extra relation set, given as
/// (order, shift) pairs instantiating psi_order(shift), on top of the
/// base family psi_{k+1}(s). Reported without any dimension check.
pub fn psi_custom_char(
    k: usize,
    extra: &[(usize, usize)],
    n_vars: usize,
    max_r: usize,
    max_s: usize,
) -> Result<FBigradedChar> {
    if k == 0 || n_vars == 0 {
        return Err(Error::InvalidInput("k and n_vars must be positive".into()));
    }
    for &(order, _) in extra {
        if order == 0 {
            return Err(Error::InvalidInput("relation order must be positive".into()));
        }
    }
    let mut entries = BTreeMap::new();
    for r in 0..=max_r {
        let s_cap = max_s.min(r * (n_vars.max(1) - 1));
        for s in 0..=s_cap {
            let d = psi_cell(k, None, n_vars, extra, r, s);
            if d > 0 {
                entries.insert((r, s), d);
            }
        }
    }
    Ok(FBigradedChar::from_entries(entries))
}

/// Grading reversal induced by renaming the variables back to the
/// fusion's f-variables: entry (r, s) moves to (r, r(n_vars - 1) - s).
/// An involution; errors when the support violates s <= r(n_vars - 1).
pub fn psi_to_fusion_grading(ch: &FBigradedChar, n_vars: usize) -> Result<FBigradedChar> {
    let mut entries = BTreeMap::new();
    for (&(r, s), &m) in ch.entries() {
        let cap = r * (n_vars.max(1) - 1);
        if s > cap {
            return Err(Error::InvalidInput(format!(
                "entry at (r={r}, s={s}) exceeds the degree bound {cap}"
            )));
        }
        entries.insert((r, cap - s), m);
    }
    Ok(FBigradedChar::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_base_cases() {
        assert_eq!(recurrence_char(&[]).unwrap(), ZqPoly::one());
        let single = recurrence_char(&[4]).unwrap();
        assert_eq!(single.to_spaced_string(), "1 + z + z^2 + z^3");
        assert!(recurrence_char(&[0]).is_err());
    }

    #[test]
    fn recurrence_pairs_and_triples() {
        assert_eq!(
            recurrence_char(&[2, 2]).unwrap().to_spaced_string(),
            "1 + z + z*q + z^2"
        );
        let t = recurrence_char(&[2, 2, 2]).unwrap();
        // 1 + z(1+q+q^2) + z^2(1+q+q^2) + z^3
        assert_eq!(t.coeff(1, 0), 1);
        assert_eq!(t.coeff(1, 1), 1);
        assert_eq!(t.coeff(1, 2), 1);
        assert_eq!(t.coeff(2, 0), 1);
        assert_eq!(t.coeff(2, 1), 1);
        assert_eq!(t.coeff(2, 2), 1);
        assert_eq!(t.coeff(3, 0), 1);
        assert_eq!(t.eval_at_ones(), 8);
    }

    #[test]
    fn recurrence_q1_is_dimension_product() {
        for dims in [vec![2, 3], vec![3, 3, 2], vec![4, 2, 5]] {
            let ch = recurrence_char(&dims).unwrap();
            let expect: i64 = dims.iter().map(|&d| d as i64).product();
            assert_eq!(ch.eval_at_ones(), expect);
        }
    }

    #[test]
    fn recurrence_permutation_invariant() {
        let a = recurrence_char(&[2, 4, 3]).unwrap();
        let b = recurrence_char(&[4, 3, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn demazure_trivial_to_irrep() {
        let ch = iterate_demazure(&[3]).unwrap();
        let mut expect = WeightChar::new();
        for w in [-3i64, -1, 1, 3] {
            expect.insert((w, 0), 1);
        }
        assert_eq!(ch, expect);
    }

    #[test]
    fn demazure_two_and_three_steps() {
        let two = iterate_demazure(&[1, 1]).unwrap();
        let mut expect = WeightChar::new();
        expect.insert((2, 0), 1);
        expect.insert((0, 0), 1);
        expect.insert((-2, 0), 1);
        expect.insert((0, 1), 1);
        assert_eq!(two, expect);

        let three = iterate_demazure(&[1, 1, 1]).unwrap();
        let total: u64 = three.values().sum();
        assert_eq!(total, 8);
        assert_eq!(three.get(&(3, 0)), Some(&1));
        assert_eq!(three.get(&(1, 0)), Some(&1));
        assert_eq!(three.get(&(1, 1)), Some(&1));
        assert_eq!(three.get(&(1, 2)), Some(&1));
        assert_eq!(three.get(&(-1, 2)), Some(&1));
        assert_eq!(three.get(&(-3, 0)), Some(&1));
    }

    #[test]
    fn psi_hand_example_k1_n2() {
        let spec = PsiIdealSpec::new(1, None, 2).unwrap();
        let ch = psi_quotient_char_auto(spec).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((0, 0), 1);
        expect.insert((1, 0), 1);
        expect.insert((1, 1), 1);
        expect.insert((2, 2), 1);
        assert_eq!(ch.entries(), &expect);
    }

    #[test]
    fn psi_trivial_module() {
        let spec = PsiIdealSpec::new(1, Some(0), 1).unwrap();
        let ch = psi_quotient_char_auto(spec).unwrap();
        let mut expect = BTreeMap::new();
        expect.insert((0, 0), 1);
        assert_eq!(ch.entries(), &expect);
    }

    #[test]
    fn psi_total_dimensions() {
        for (k, j, n) in [(1, None, 2), (2, None, 2), (1, Some(1), 3), (2, Some(0), 2)] {
            let spec = PsiIdealSpec::new(k, j, n).unwrap();
            let ch = psi_quotient_char_auto(spec).unwrap();
            assert_eq!(ch.total(), spec.expected_total());
        }
    }

    #[test]
    fn grading_reversal_involution() {
        let spec = PsiIdealSpec::new(1, None, 2).unwrap();
        let ch = psi_quotient_char_auto(spec).unwrap();
        let rev = psi_to_fusion_grading(&ch, 2).unwrap();
        let twice = psi_to_fusion_grading(&rev, 2).unwrap();
        assert_eq!(ch, twice);
        // Reversed k=1, N=2 equals the fusion of two [1]s.
        let mut expect = BTreeMap::new();
        expect.insert((0, 0), 1);
        expect.insert((1, 0), 1);
        expect.insert((1, 1), 1);
        expect.insert((2, 0), 1);
        assert_eq!(rev.entries(), &expect);
    }

    #[test]
    fn reversal_rejects_out_of_range() {
        let mut bad = BTreeMap::new();
        bad.insert((1, 5), 1);
        let ch = FBigradedChar::from_entries(bad);
        assert!(psi_to_fusion_grading(&ch, 2).is_err());
    }
}
