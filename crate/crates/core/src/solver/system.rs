//! The equation system for a map of degree `d` between two complexes.
//!
//! Unknowns are the entries of the `2k × 2m` coefficient matrix of the map on
//! `(2n-2)`-skeleta, split into `k × m` blocks `A`, `B = 0`, `C`, `D`. With
//! `p_i = p_iα`, `P_i = p_{k+i}α`, `q_t = q_tβ`, `Q_t = q_{m+t}β`,
//! `W = [Id, Id]η` and `h` the Hopf coefficient, the equations are
//!
//! ```text
//! eq1 Σ_i A_it p_i + Σ_i C_it η(P_i)
//!        + (Σ_i C(A_it, 2) h(p_i) + Σ_{i<j} m_ij A_it A_jt + Σ_i A_it C_it) W = d q_t      in g1
//! eq2 Σ_i D_it P_i = d Q_t                                                             in g2
//! eq3 Σ_i A_is A_it h(p_i) + Σ_{i<j} (A_is A_jt + A_it A_js) m_ij
//!        + Σ_i (A_is C_it + A_it C_is) ≡ d m'_st  (mod 2),   s < t
//! eq4 Aᵀ D = d I_m
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{reduce_coeff, GroupElement};
use crate::complex::ComplexSpec;
use crate::tables::{GroupTable, Moduli};

use super::witness::WitnessMatrix;
use super::SolverError;

/// `eq1` or `eq2` for one column `t`: the left side must equal `rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupEquation {
    pub column: usize,
    pub rhs: GroupElement,
}

/// `eq3` for a column pair `s < t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityEquation {
    pub s: usize,
    pub t: usize,
    pub rhs: u8,
}

/// Entry `(s, t)` of `Aᵀ D = d I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearEquation {
    pub s: usize,
    pub t: usize,
    pub rhs: i64,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    table: Arc<GroupTable>,
    k: usize,
    m: usize,
    d: i64,
    moduli: Moduli,
    g1_orders: Vec<u64>,
    g2_orders: Vec<u64>,
    low: Vec<Vec<i64>>,
    eta_high: Vec<Vec<i64>>,
    hopf_low: Vec<bool>,
    high: Vec<Vec<i64>>,
    /// full `k × k` array, `true` only strictly above the diagonal
    second: Vec<Vec<bool>>,
    whitehead: Vec<i64>,
    eq1: Vec<GroupEquation>,
    eq2: Vec<GroupEquation>,
    eq3: Vec<ParityEquation>,
    eq4: Vec<BilinearEquation>,
}

/// `a(a-1)/2`, defined for every integer.
pub fn binomial2(a: i64) -> i128 {
    let a = a as i128;
    a * (a - 1) / 2
}

pub fn build_system(
    x: &ComplexSpec,
    y: &ComplexSpec,
    d: i64,
) -> Result<ConstraintSystem, SolverError> {
    if x.table() != y.table() {
        return Err(SolverError::TableMismatch(x.n(), y.n()));
    }
    let table = Arc::clone(x.table());
    let (k, m) = (x.rank(), y.rank());

    let low: Vec<Vec<i64>> = x.first_low().iter().map(|e| e.coeffs().to_vec()).collect();
    let high: Vec<Vec<i64>> = x.first_high().iter().map(|e| e.coeffs().to_vec()).collect();
    let eta_high = x
        .first_high()
        .iter()
        .map(|e| table.eta_push().apply(e).map(|v| v.coeffs().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let hopf_low = x
        .first_low()
        .iter()
        .map(|e| table.hopf_coefficient(e).map(|h| h == 1))
        .collect::<Result<Vec<_>, _>>()?;
    let second = (0..k)
        .map(|i| (0..k).map(|j| x.m(i, j)).collect())
        .collect();

    let eq1 = (0..m)
        .map(|t| GroupEquation {
            column: t,
            rhs: y.first_low()[t].scale(d),
        })
        .collect();
    let eq2 = (0..m)
        .map(|t| GroupEquation {
            column: t,
            rhs: y.first_high()[t].scale(d),
        })
        .collect();
    let mut eq3 = Vec::new();
    for s in 0..m {
        for t in s + 1..m {
            eq3.push(ParityEquation {
                s,
                t,
                rhs: ((d as i128 * y.m(s, t) as i128).rem_euclid(2)) as u8,
            });
        }
    }
    let mut eq4 = Vec::with_capacity(m * m);
    for s in 0..m {
        for t in 0..m {
            eq4.push(BilinearEquation {
                s,
                t,
                rhs: if s == t { d } else { 0 },
            });
        }
    }

    Ok(ConstraintSystem {
        moduli: table.required_moduli(),
        g1_orders: table.g1().orders().to_vec(),
        g2_orders: table.g2().orders().to_vec(),
        whitehead: table.whitehead_eta().coeffs().to_vec(),
        table,
        k,
        m,
        d,
        low,
        eta_high,
        hopf_low,
        high,
        second,
        eq1,
        eq2,
        eq3,
        eq4,
    })
}

impl ConstraintSystem {
    pub fn table(&self) -> &Arc<GroupTable> {
        &self.table
    }

    /// Rank of the source.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Rank of the target.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn moduli(&self) -> Moduli {
        self.moduli
    }

    pub fn eq1(&self) -> &[GroupEquation] {
        &self.eq1
    }

    pub fn eq2(&self) -> &[GroupEquation] {
        &self.eq2
    }

    pub fn eq3(&self) -> &[ParityEquation] {
        &self.eq3
    }

    pub fn eq4(&self) -> &[BilinearEquation] {
        &self.eq4
    }

    /// Scalar constraint counts of `eq1` to `eq4`.
    pub fn equation_counts(&self) -> (usize, usize, usize, usize) {
        (
            self.eq1.len(),
            self.eq2.len(),
            self.eq3.len(),
            self.eq4.len(),
        )
    }

    /// Left side of `eq1` for one column, as canonical `g1`
    /// coefficients.
    pub fn eq1_lhs(&self, a_col: &[i64], c_col: &[i64]) -> Vec<i64> {
        let mut acc = vec![0i128; self.g1_orders.len()];
        let mut coef: i128 = 0;
        for i in 0..self.k {
            let (a, c) = (a_col[i] as i128, c_col[i] as i128);
            for (r, (&p, &e)) in acc
                .iter_mut()
                .zip(self.low[i].iter().zip(&self.eta_high[i]))
            {
                *r += a * p as i128 + c * e as i128;
            }
            if self.hopf_low[i] {
                coef += binomial2(a_col[i]);
            }
            for (&bit, &aj) in self.second[i].iter().zip(a_col).skip(i + 1) {
                if bit {
                    coef += a * aj as i128;
                }
            }
            coef += a * c;
        }
        // the Whitehead element is 2-torsion
        let coef = coef.rem_euclid(2);
        acc.iter()
            .zip(&self.whitehead)
            .zip(&self.g1_orders)
            .map(|((&r, &w), &q)| reduce_coeff(r + coef * w as i128, q))
            .collect()
    }

    pub fn eq1_holds(&self, t: usize, a_col: &[i64], c_col: &[i64]) -> bool {
        self.eq1_lhs(a_col, c_col) == self.eq1[t].rhs.coeffs()
    }

    /// Left side of `eq2` for one column, as canonical `g2`
    /// coefficients.
    pub fn eq2_lhs(&self, d_col: &[i64]) -> Vec<i64> {
        let mut acc = vec![0i128; self.g2_orders.len()];
        for (i, &dv) in d_col.iter().enumerate().take(self.k) {
            for (r, &p) in acc.iter_mut().zip(&self.high[i]) {
                *r += dv as i128 * p as i128;
            }
        }
        acc.iter()
            .zip(&self.g2_orders)
            .map(|(&r, &q)| reduce_coeff(r, q))
            .collect()
    }

    pub fn eq2_holds(&self, t: usize, d_col: &[i64]) -> bool {
        self.eq2_lhs(d_col) == self.eq2[t].rhs.coeffs()
    }

    /// Left side of `eq3` for columns `s`, `t`, reduced mod 2.
    pub fn eq3_lhs(&self, a_s: &[i64], a_t: &[i64], c_s: &[i64], c_t: &[i64]) -> u8 {
        let mut acc: i128 = 0;
        for i in 0..self.k {
            let (ais, ait) = (a_s[i] as i128, a_t[i] as i128);
            if self.hopf_low[i] {
                acc += ais * ait;
            }
            for j in i + 1..self.k {
                if self.second[i][j] {
                    acc += ais * a_t[j] as i128 + ait * a_s[j] as i128;
                }
            }
            acc += ais * c_t[i] as i128 + ait * c_s[i] as i128;
        }
        acc.rem_euclid(2) as u8
    }

    /// Coefficient `j` of the source element `P_i` in `g2`.
    pub(crate) fn high_coeff(&self, i: usize, j: usize) -> i64 {
        self.high[i][j]
    }

    /// Index into `eq3` for the pair `s < t`.
    pub(crate) fn eq3_rhs(&self, s: usize, t: usize) -> u8 {
        let m = self.m;
        self.eq3[s * (2 * m - s - 1) / 2 + (t - s - 1)].rhs
    }

    /// Substitutes `w` into every equation. Independent of any search.
    pub fn verify(&self, w: &WitnessMatrix) -> Result<bool, SolverError> {
        if w.k() != self.k || w.m() != self.m {
            return Err(SolverError::Shape(format!(
                "witness is {}x{}, system needs {}x{}",
                w.k(),
                w.m(),
                self.k,
                self.m
            )));
        }
        let a_cols: Vec<Vec<i64>> = (0..self.m).map(|t| w.a_col(t)).collect();
        let c_cols: Vec<Vec<i64>> = (0..self.m).map(|t| w.c_col(t)).collect();
        let d_cols: Vec<Vec<i64>> = (0..self.m).map(|t| w.d_col(t)).collect();
        for e in &self.eq1 {
            if !self.eq1_holds(e.column, &a_cols[e.column], &c_cols[e.column]) {
                return Ok(false);
            }
        }
        for e in &self.eq2 {
            if !self.eq2_holds(e.column, &d_cols[e.column]) {
                return Ok(false);
            }
        }
        for e in &self.eq3 {
            let lhs = self.eq3_lhs(&a_cols[e.s], &a_cols[e.t], &c_cols[e.s], &c_cols[e.t]);
            if lhs != e.rhs {
                return Ok(false);
            }
        }
        for e in &self.eq4 {
            let lhs: i128 = (0..self.k)
                .map(|i| w.a(i, e.s) as i128 * w.d(i, e.t) as i128)
                .sum();
            if lhs != e.rhs as i128 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn verify_witness(system: &ConstraintSystem, w: &WitnessMatrix) -> Result<bool, SolverError> {
    system.verify(w)
}
