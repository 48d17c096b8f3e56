//! Polynomial containers for characters and Kostka tables.
//!
//! `QPoly` is a univariate polynomial in `q` with integer coefficients
//! and nonnegative exponents; `ZqPoly` is bivariate in `z` and `q`
//! (f-degree by t-degree characters); `QAuxPoly` is bivariate in `q`
//! and an auxiliary character variable `u`. No zero coefficients are
//! ever stored.

use std::collections::BTreeMap;

/// Polynomial in `q` with integer coefficients, exponents >= 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: BTreeMap<u32, i64>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::monomial(0, 1)
    }

    pub fn monomial(exp: u32, coeff: i64) -> Self {
        let mut p = QPoly::default();
        p.add_term(exp, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, exp: u32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (&e, &c) in &other.coeffs {
            out.add_term(e, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn coeff(&self, exp: u32) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    pub fn all_coeffs_nonneg(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    /// Compact rendering: "1", "q+q^2", "2*q^3".
    pub fn to_compact_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&e, &c) in &self.coeffs {
            parts.push(render_term(c, &[("q", e as i64)]));
        }
        join_signed(parts, "")
    }
}

/// Bivariate polynomial in `z` (f-degree) and `q` (t-degree).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZqPoly {
    coeffs: BTreeMap<(u32, u32), i64>,
}

impl ZqPoly {
    pub fn zero() -> Self {
        ZqPoly::default()
    }

    pub fn one() -> Self {
        ZqPoly::monomial(0, 0, 1)
    }

    pub fn monomial(z: u32, q: u32, coeff: i64) -> Self {
        let mut p = ZqPoly::default();
        p.add_term(z, q, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, z: u32, q: u32, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry((z, q)).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&(z, q));
        }
    }

    pub fn add(&self, other: &ZqPoly) -> ZqPoly {
        let mut out = self.clone();
        for (&(z, q), &c) in &other.coeffs {
            out.add_term(z, q, c);
        }
        out
    }

    /// Substitutes z -> q*z: the coefficient of z^r gains q^r.
    pub fn subst_z_to_qz(&self) -> ZqPoly {
        let mut out = ZqPoly::default();
        for (&(z, q), &c) in &self.coeffs {
            out.add_term(z, q + z, c);
        }
        out
    }

    /// Multiplies by z.
    pub fn mul_z(&self) -> ZqPoly {
        let mut out = ZqPoly::default();
        for (&(z, q), &c) in &self.coeffs {
            out.add_term(z + 1, q, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, z: u32, q: u32) -> i64 {
        self.coeffs.get(&(z, q)).copied().unwrap_or(0)
    }

    pub fn eval_at_ones(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// Specializes q = 1, returning z-coefficients.
    pub fn q1_z_coeffs(&self) -> BTreeMap<u32, i64> {
        let mut out = BTreeMap::new();
        for (&(z, _), &c) in &self.coeffs {
            *out.entry(z).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// Spaced rendering: "1 + z + z*q + z^2".
    pub fn to_spaced_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&(z, q), &c) in &self.coeffs {
            parts.push(render_term(c, &[("z", z as i64), ("q", q as i64)]));
        }
        join_signed(parts, " ")
    }
}

/// Bivariate polynomial in `q` and the auxiliary character variable `u`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QAuxPoly {
    coeffs: BTreeMap<(u32, i64), i64>,
}

impl QAuxPoly {
    pub fn zero() -> Self {
        QAuxPoly::default()
    }

    pub fn monomial(q: u32, u: i64, coeff: i64) -> Self {
        let mut p = QAuxPoly::default();
        p.add_term(q, u, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, q: u32, u: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry((q, u)).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&(q, u));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, i64), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    /// Specializes u = 1.
    pub fn specialize_u1(&self) -> QPoly {
        let mut out = QPoly::zero();
        for (&(q, _), &c) in &self.coeffs {
            out.add_term(q, c);
        }
        out
    }

    pub fn eval_at_ones(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn all_coeffs_nonneg(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    /// Compact rendering with `u` powers: "q*u^2+q^2".
    pub fn to_compact_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&(q, u), &c) in &self.coeffs {
            parts.push(render_term(c, &[("q", q as i64), ("u", u)]));
        }
        join_signed(parts, "")
    }
}

/// One monomial as a signed string, e.g. (-2, [("z",2),("q",1)]) ->
/// "-2*z^2*q". Exponent-zero factors are omitted.
fn render_term(coeff: i64, vars: &[(&str, i64)]) -> String {
    let mut factors: Vec<String> = Vec::new();
    for &(name, exp) in vars {
        if exp == 1 {
            factors.push(name.to_string());
        } else if exp != 0 {
            factors.push(format!("{name}^{exp}"));
        }
    }
    let mag = coeff.abs();
    let body = if factors.is_empty() {
        mag.to_string()
    } else if mag == 1 {
        factors.join("*")
    } else {
        format!("{mag}*{}", factors.join("*"))
    };
    if coeff < 0 {
        format!("-{body}")
    } else {
        body
    }
}

/// Joins signed term strings with "+" separators ("pad" spaces them).
fn join_signed(parts: Vec<String>, pad: &str) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(stripped) = p.strip_prefix('-') {
            out.push_str(&format!("{pad}-{pad}{stripped}"));
        } else {
            out.push_str(&format!("{pad}+{pad}{p}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qpoly_basics() {
        let mut p = QPoly::zero();
        p.add_term(1, 1);
        p.add_term(2, 1);
        assert_eq!(p.to_compact_string(), "q+q^2");
        assert_eq!(p.eval_at_one(), 2);
        p.add_term(1, -1);
        assert_eq!(p.to_compact_string(), "q^2");
        assert_eq!(QPoly::one().to_compact_string(), "1");
    }

    #[test]
    fn zq_rendering_matches_character_format() {
        let mut p = ZqPoly::one();
        p.add_term(1, 0, 1);
        p.add_term(1, 1, 1);
        p.add_term(2, 0, 1);
        assert_eq!(p.to_spaced_string(), "1 + z + z*q + z^2");
    }

    #[test]
    fn zq_substitution() {
        // 1 + z + z*q + z^2 under z -> qz becomes 1 + qz + q^2 z + q^2 z^2.
        let mut p = ZqPoly::one();
        p.add_term(1, 0, 1);
        p.add_term(1, 1, 1);
        p.add_term(2, 0, 1);
        let s = p.subst_z_to_qz();
        assert_eq!(s.coeff(1, 1), 1);
        assert_eq!(s.coeff(1, 2), 1);
        assert_eq!(s.coeff(2, 2), 1);
        assert_eq!(s.coeff(0, 0), 1);
    }

    #[test]
    fn aux_specialization() {
        let mut p = QAuxPoly::zero();
        p.add_term(1, 2, 1);
        p.add_term(1, 0, 1);
        let q = p.specialize_u1();
        assert_eq!(q.coeff(1), 2);
    }
}
