//! Lie algebra presentations: generators, exact structure constants,
//! and the designated Cartan / raising subsets that fix highest-vector
//! conventions.
//!
//! Only the families the engine needs are built here: sl2, the abelian
//! algebra on n generators, sl_{n+1}, and the doubled copy sl2 + sl2.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{solve_in_basis, Mat};
use crate::rat::{rat_int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiePresentation {
    name: String,
    generators: Vec<String>,
    /// brackets[a][b] = coefficients of [g_a, g_b] on the basis.
    brackets: Vec<Vec<Vec<(usize, Rat)>>>,
    cartan: Vec<usize>,
    raising: Vec<usize>,
}

impl LiePresentation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gen_count(&self) -> usize {
        self.generators.len()
    }

    pub fn gen_name(&self, idx: usize) -> &str {
        &self.generators[idx]
    }

    pub fn gen_index(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| {
                Error::InvalidInput(format!("unknown generator {name:?} in {}", self.name))
            })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn cartan(&self) -> &[usize] {
        &self.cartan
    }

    pub fn raising(&self) -> &[usize] {
        &self.raising
    }

    /// Coefficients of [g_a, g_b] on the basis.
    pub fn bracket(&self, a: usize, b: usize) -> &[(usize, Rat)] {
        &self.brackets[a][b]
    }

    /// The one-dimensional-per-generator abelian algebra x_1..x_n.
    pub fn abelian(n: usize) -> Arc<Self> {
        let generators: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let brackets = vec![vec![Vec::new(); n]; n];
        Arc::new(LiePresentation {
            name: format!("abelian{n}"),
            generators,
            brackets,
            cartan: Vec::new(),
            raising: Vec::new(),
        })
    }

    /// sl2 with basis e, h, f in that order.
    pub fn sl2() -> Arc<Self> {
        let e = Mat::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(0), rat_int(0)],
        ])
        .unwrap();
        let h = Mat::from_rows(vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ])
        .unwrap();
        let f = Mat::from_rows(vec![
            vec![rat_int(0), rat_int(0)],
            vec![rat_int(1), rat_int(0)],
        ])
        .unwrap();
        Arc::new(
            Self::from_matrices(
                "sl2",
                vec![("e".into(), e), ("h".into(), h), ("f".into(), f)],
                &["h"],
                &["e"],
            )
            .expect("sl2 structure constants"),
        )
    }

    /// sl_{n+1} in the matrix-unit basis: h1..hn are the simple coroot
    /// elements E_ii - E_{i+1,i+1}; e_i_j (i != j) are the units E_ij.
    pub fn sl_n(n: usize) -> Arc<Self> {
        assert!(n >= 1);
        let size = n + 1;
        let unit = |i: usize, j: usize| {
            let mut m = Mat::zeros(size, size);
            *m.at_mut(i, j) = rat_int(1);
            m
        };
        let mut gens: Vec<(String, Mat)> = Vec::new();
        let mut cartan = Vec::new();
        let mut raising = Vec::new();
        for i in 0..n {
            cartan.push(format!("h{}", i + 1));
            let mut m = Mat::zeros(size, size);
            *m.at_mut(i, i) = rat_int(1);
            *m.at_mut(i + 1, i + 1) = rat_int(-1);
            gens.push((format!("h{}", i + 1), m));
        }
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    let name = format!("e_{i}_{j}");
                    if i < j {
                        raising.push(name.clone());
                    }
                    gens.push((name, unit(i, j)));
                }
            }
        }
        let cartan_refs: Vec<&str> = cartan.iter().map(|s| s.as_str()).collect();
        let raising_refs: Vec<&str> = raising.iter().map(|s| s.as_str()).collect();
        Arc::new(
            Self::from_matrices(&format!("sl{}", n + 1), gens, &cartan_refs, &raising_refs)
                .expect("sl_{n+1} structure constants"),
        )
    }

    /// Direct sum of two copies of sl2; generator names get ".1"/".2"
    /// suffixes and components commute.
    pub fn sl2_doubled() -> Arc<Self> {
        let base = Self::sl2();
        let n = base.gen_count();
        let mut generators = Vec::with_capacity(2 * n);
        for suffix in ["1", "2"] {
            for g in base.generators() {
                generators.push(format!("{g}.{suffix}"));
            }
        }
        let mut brackets = vec![vec![Vec::new(); 2 * n]; 2 * n];
        for copy in 0..2 {
            let off = copy * n;
            for a in 0..n {
                for b in 0..n {
                    brackets[off + a][off + b] = base
                        .bracket(a, b)
                        .iter()
                        .map(|(g, c)| (off + g, c.clone()))
                        .collect();
                }
            }
        }
        let cartan = vec![base.cartan[0], n + base.cartan[0]];
        let raising = vec![base.raising[0], n + base.raising[0]];
        Arc::new(LiePresentation {
            name: "sl2+sl2".into(),
            generators,
            brackets,
            cartan,
            raising,
        })
    }

    /// Derives structure constants from a faithful matrix realization by
    /// expanding each commutator in the given basis.
    pub fn from_matrices(
        name: &str,
        gens: Vec<(String, Mat)>,
        cartan: &[&str],
        raising: &[&str],
    ) -> Result<Self> {
        let n = gens.len();
        let flatten = |m: &Mat| -> Vec<Rat> {
            let mut v = Vec::with_capacity(m.rows() * m.cols());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    v.push(m.at(i, j).clone());
                }
            }
            v
        };
        let basis: Vec<Vec<Rat>> = gens.iter().map(|(_, m)| flatten(m)).collect();
        let mut brackets = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let comm = gens[a].1.commutator(&gens[b].1)?;
                let target = flatten(&comm);
                let coeffs = solve_in_basis(&basis, &target)?.ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "commutator [{}, {}] not in the span of the basis",
                        gens[a].0, gens[b].0
                    ))
                })?;
                brackets[a][b] = coeffs
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
            }
        }
        let names: Vec<String> = gens.into_iter().map(|(name, _)| name).collect();
        let find = |list: &[&str]| -> Result<Vec<usize>> {
            list.iter()
                .map(|s| {
                    names
                        .iter()
                        .position(|g| g == s)
                        .ok_or_else(|| Error::InvalidInput(format!("unknown generator {s:?}")))
                })
                .collect()
        };
        let cartan = find(cartan)?;
        let raising = find(raising)?;
        let pres = LiePresentation {
            name: name.into(),
            generators: names,
            brackets,
            cartan,
            raising,
        };
        pres.validate()?;
        Ok(pres)
    }

    /// Checks antisymmetry and the Jacobi identity exactly.
    pub fn validate(&self) -> Result<()> {
        let n = self.gen_count();
        let as_vec = |pairs: &[(usize, Rat)]| -> Vec<Rat> {
            let mut v = vec![Rat::zero(); n];
            for (g, c) in pairs {
                v[*g] += c;
            }
            v
        };
        for a in 0..n {
            for b in 0..n {
                let ab = as_vec(self.bracket(a, b));
                let ba = as_vec(self.bracket(b, a));
                for g in 0..n {
                    if ab[g].clone() + &ba[g] != Rat::zero() {
                        return Err(Error::InvariantViolation(format!(
                            "antisymmetry fails on [{}, {}]",
                            self.gen_name(a),
                            self.gen_name(b)
                        )));
                    }
                }
            }
        }
        // Jacobi: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut total = vec![Rat::zero(); n];
                    for &(x, y, z) in &[(a, b, c), (b, c, a), (c, a, b)] {
                        for (g, cf) in self.bracket(x, y) {
                            for (h, cf2) in self.bracket(*g, z) {
                                total[*h] += cf * cf2;
                            }
                        }
                    }
                    if total.iter().any(|t| !t.is_zero()) {
                        return Err(Error::InvariantViolation(format!(
                            "Jacobi fails on ({}, {}, {})",
                            self.gen_name(a),
                            self.gen_name(b),
                            self.gen_name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn sl2_structure_constants() {
        let sl2 = LiePresentation::sl2();
        let e = sl2.gen_index("e").unwrap();
        let h = sl2.gen_index("h").unwrap();
        let f = sl2.gen_index("f").unwrap();
        assert_eq!(sl2.bracket(e, f), &[(h, rat_int(1))]);
        assert_eq!(sl2.bracket(h, e), &[(e, rat_int(2))]);
        assert_eq!(sl2.bracket(h, f), &[(f, rat_int(-2))]);
        sl2.validate().unwrap();
    }

    #[test]
    fn abelian_brackets_vanish() {
        let a = LiePresentation::abelian(3);
        for i in 0..3 {
            for j in 0..3 {
                assert!(a.bracket(i, j).is_empty());
            }
        }
        a.validate().unwrap();
    }

    #[test]
    fn sl3_is_consistent() {
        let sl3 = LiePresentation::sl_n(2);
        assert_eq!(sl3.gen_count(), 8);
        sl3.validate().unwrap();
        // [e_0_1, e_1_0] = h1.
        let a = sl3.gen_index("e_0_1").unwrap();
        let b = sl3.gen_index("e_1_0").unwrap();
        let h1 = sl3.gen_index("h1").unwrap();
        assert_eq!(sl3.bracket(a, b), &[(h1, rat_int(1))]);
    }

    #[test]
    fn doubled_copies_commute() {
        let d = LiePresentation::sl2_doubled();
        d.validate().unwrap();
        let e1 = d.gen_index("e.1").unwrap();
        let f2 = d.gen_index("f.2").unwrap();
        assert!(d.bracket(e1, f2).is_empty());
        assert_eq!(d.cartan().len(), 2);
    }
}
