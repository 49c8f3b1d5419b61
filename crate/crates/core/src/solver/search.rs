//! Deciding solvability of the degree equations.
//!
//! 1. Rank: a map of nonzero degree needs `k ≥ m`.
//! 2. Residues: for each modulus `q`, every unknown is reduced modulo a
//!    multiple of `q` fine enough to evaluate `eq1`-`eq3` exactly, and
//!    `eq4` is read modulo `q`. No residue solution proves there is no integer
//!    solution.
//! 3. Rank one (`k = m = 1`): `A·D = d` leaves finitely many divisor pairs,
//!    and `C` only matters modulo its block modulus, so the search is
//!    complete.
//! 4. Box: `A` runs over `[-B, B]^{km}` by increasing max-norm, `C` over its
//!    residues; for each candidate `Aᵀ D = d I` is solved exactly over the
//!    integers and `eq2` is imposed as a congruence on the solution
//!    lattice.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexSpec;
use crate::lattice::{coset_congruence_feasible, solve_linear, IntMatrix};

use super::system::{build_system, ConstraintSystem};
use super::witness::WitnessMatrix;
use super::SolverError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    /// Moduli tried for infeasibility certificates; `None` means
    /// `{2, 4, M_A, lcm(M_A, M_C, M_D, 4)}`.
    pub moduli: Option<Vec<u64>>,
    /// Half-width of the box for `A` entries; `None` means `max(|d|, M_A)`.
    pub box_bound: Option<u64>,
    /// A modulus is skipped when the number of residue vectors it would
    /// enumerate for one block column exceeds this.
    pub residue_limit: u64,
    /// Largest modulus tried when inferring progressions.
    pub max_modulus: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            moduli: None,
            box_bound: None,
            residue_limit: 1_000_000,
            max_modulus: 48,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        if let Some(ms) = &self.moduli {
            if ms.contains(&0) {
                return Err(SolverError::BadParams("moduli must be positive".into()));
            }
        }
        if self.residue_limit == 0 {
            return Err(SolverError::BadParams(
                "residue limit must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn moduli_for(&self, system: &ConstraintSystem) -> Vec<u64> {
        match &self.moduli {
            Some(ms) => ms.clone(),
            None => {
                let mo = system.moduli();
                let all = mo.a.lcm(&mo.c).lcm(&mo.d).lcm(&4);
                let mut out = Vec::new();
                for q in [2, 4, mo.a, all] {
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
                out
            }
        }
    }

    pub fn box_for(&self, system: &ConstraintSystem) -> u64 {
        self.box_bound
            .unwrap_or_else(|| system.d().unsigned_abs().max(system.moduli().a))
    }
}

/// Why a degree is impossible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// No residue solution modulo `modulus`.
    Modulus { modulus: u64 },
    /// `Aᵀ D = d I_m` with `d ≠ 0` needs rank `m`, but the source has rank `k < m`.
    RankDeficit {
        source_rank: usize,
        target_rank: usize,
    },
    /// The complete rank-one search found nothing.
    RankOneExhaustive,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Modulus { modulus } => write!(f, "mod {modulus}"),
            Certificate::RankDeficit {
                source_rank,
                target_rank,
            } => write!(f, "rank {source_rank} < {target_rank}"),
            Certificate::RankOneExhaustive => write!(f, "rank-1 exhaustive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Witness(WitnessMatrix),
    NoSolutionProven { certificate: Certificate },
    NoSolutionWithinBounds { box_bound: u64, moduli: Vec<u64> },
}

impl Verdict {
    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::Witness(_))
    }

    pub fn is_proven_empty(&self) -> bool {
        matches!(self, Verdict::NoSolutionProven { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::NoSolutionWithinBounds { .. })
    }

    pub fn witness(&self) -> Option<&WitnessMatrix> {
        match self {
            Verdict::Witness(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Witness(_) => write!(f, "Witness"),
            Verdict::NoSolutionProven { certificate } => {
                write!(f, "NoSolutionProven ({certificate})")
            }
            Verdict::NoSolutionWithinBounds { box_bound, moduli } => {
                write!(
                    f,
                    "NoSolutionWithinBounds (box {box_bound}, moduli {moduli:?})"
                )
            }
        }
    }
}

/// Decides whether a map `x → y` of degree `d` exists.
pub fn check_degree(
    x: &ComplexSpec,
    y: &ComplexSpec,
    d: i64,
    params: &SearchParams,
) -> Result<Verdict, SolverError> {
    params.validate()?;
    let system = build_system(x, y, d)?;
    check_system(&system, params)
}

pub fn check_system(
    system: &ConstraintSystem,
    params: &SearchParams,
) -> Result<Verdict, SolverError> {
    params.validate()?;
    let (k, m, d) = (system.k(), system.m(), system.d());
    if k < m && d != 0 {
        return Ok(Verdict::NoSolutionProven {
            certificate: Certificate::RankDeficit {
                source_rank: k,
                target_rank: m,
            },
        });
    }

    let moduli = params.moduli_for(system);
    for &q in &moduli {
        if residue_search(system, q, params.residue_limit) == Some(false) {
            return Ok(Verdict::NoSolutionProven {
                certificate: Certificate::Modulus { modulus: q },
            });
        }
    }

    if k == 1 && m == 1 {
        return Ok(match rank_one_search(system) {
            Some(w) => Verdict::Witness(w),
            None => Verdict::NoSolutionProven {
                certificate: Certificate::RankOneExhaustive,
            },
        });
    }

    let bound = params.box_for(system);
    match box_search(system, bound)? {
        Some(w) => Ok(Verdict::Witness(w)),
        None => Ok(Verdict::NoSolutionWithinBounds {
            box_bound: bound,
            moduli,
        }),
    }
}

/// All vectors in `[0, radix)^len`, first coordinate fastest.
fn residue_vectors(len: usize, radix: u64) -> impl Iterator<Item = Vec<i64>> {
    let total = (radix as u128).pow(len as u32);
    (0..total).map(move |mut idx| {
        (0..len)
            .map(|_| {
                let digit = (idx % radix as u128) as i64;
                idx /= radix as u128;
                digit
            })
            .collect()
    })
}

/// Every choice of one `C` column per column, subject to `eq3`.
fn choose_c(
    system: &ConstraintSystem,
    a_cols: &[&Vec<i64>],
    options: &[&Vec<Vec<i64>>],
) -> Option<Vec<Vec<i64>>> {
    fn go(
        system: &ConstraintSystem,
        a_cols: &[&Vec<i64>],
        options: &[&Vec<Vec<i64>>],
        chosen: &mut Vec<Vec<i64>>,
    ) -> bool {
        let t = chosen.len();
        if t == a_cols.len() {
            return true;
        }
        for c in options[t] {
            let ok = (0..t).all(|s| {
                system.eq3_lhs(a_cols[s], a_cols[t], &chosen[s], c) == system.eq3_rhs(s, t)
            });
            if ok {
                chosen.push(c.clone());
                if go(system, a_cols, options, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::with_capacity(a_cols.len());
    go(system, a_cols, options, &mut chosen).then_some(chosen)
}

/// `C` columns satisfying `eq1` for column `t` given the `A` column.
fn c_options(system: &ConstraintSystem, t: usize, a_col: &[i64]) -> Vec<Vec<i64>> {
    residue_vectors(system.k(), system.moduli().c)
        .filter(|c| system.eq1_holds(t, a_col, c))
        .collect()
}

/// An `A` column together with the `C` columns that fit it.
type ColumnOption = (Vec<i64>, Vec<Vec<i64>>);

/// Residue feasibility modulo `q`: `Some(false)` proves there is no
/// integer solution, `None` means the modulus was too expensive to try.
pub fn residue_search(system: &ConstraintSystem, q: u64, limit: u64) -> Option<bool> {
    let (k, m, d) = (system.k(), system.m(), system.d());
    let mo = system.moduli();
    let la = q.lcm(&mo.a);
    let ld = q.lcm(&mo.d);
    let too_big = |radix: u64| (radix as u128).pow(k as u32) > limit as u128;
    if too_big(la) || too_big(ld) || too_big(mo.c) {
        return None;
    }
    let qi = q as i128;
    let target = |s: usize, t: usize| {
        if s == t {
            (d as i128).rem_euclid(qi)
        } else {
            0
        }
    };

    // D columns modulo q that lift to solutions of `eq2`
    let mut d_sets: Vec<Vec<Vec<i64>>> = Vec::with_capacity(m);
    for t in 0..m {
        let mut set: Vec<Vec<i64>> = residue_vectors(k, ld)
            .filter(|v| system.eq2_holds(t, v))
            .map(|v| v.iter().map(|&x| x.rem_euclid(q as i64)).collect())
            .collect();
        set.sort();
        set.dedup();
        if set.is_empty() {
            return Some(false);
        }
        d_sets.push(set);
    }

    // A columns modulo la with the C columns that satisfy `eq1`
    let mut a_sets: Vec<Vec<ColumnOption>> = Vec::with_capacity(m);
    for t in 0..m {
        let set: Vec<_> = residue_vectors(k, la)
            .filter_map(|a| {
                let cs = c_options(system, t, &a);
                (!cs.is_empty()).then_some((a, cs))
            })
            .collect();
        if set.is_empty() {
            return Some(false);
        }
        a_sets.push(set);
    }

    // `eq4` mod q, memoized on A mod q
    let mut eq4_cache: HashMap<Vec<i64>, bool> = HashMap::new();
    let mut eq4_ok = |a_cols: &[&Vec<i64>]| -> bool {
        let key: Vec<i64> = a_cols
            .iter()
            .flat_map(|c| c.iter().map(|&x| x.rem_euclid(q as i64)))
            .collect();
        *eq4_cache.entry(key).or_insert_with(|| {
            (0..m).all(|t| {
                d_sets[t].iter().any(|v| {
                    (0..m).all(|s| {
                        let dot: i128 = (0..k).map(|i| a_cols[s][i] as i128 * v[i] as i128).sum();
                        dot.rem_euclid(qi) == target(s, t)
                    })
                })
            })
        })
    };

    let mut idx = vec![0usize; m];
    loop {
        let a_cols: Vec<&Vec<i64>> = (0..m).map(|t| &a_sets[t][idx[t]].0).collect();
        let options: Vec<&Vec<Vec<i64>>> = (0..m).map(|t| &a_sets[t][idx[t]].1).collect();
        if choose_c(system, &a_cols, &options).is_some() && eq4_ok(&a_cols) {
            return Some(true);
        }
        let mut t = 0;
        loop {
            if t == m {
                return Some(false);
            }
            idx[t] += 1;
            if idx[t] == a_sets[t].len() {
                idx[t] = 0;
                t += 1;
            } else {
                break;
            }
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            small.push(i);
            if i != n / i {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Complete search for `k = m = 1`.
fn rank_one_search(system: &ConstraintSystem) -> Option<WitnessMatrix> {
    debug_assert!(system.k() == 1 && system.m() == 1);
    let d = system.d();
    let mo = system.moduli();
    let found = |a: i64, c: i64, dd: i64| {
        WitnessMatrix::from_blocks(vec![vec![a]], vec![vec![c]], vec![vec![dd]])
            .expect("1x1 blocks")
    };
    if d != 0 {
        for a in divisors(d.unsigned_abs()) {
            for sign in [1i64, -1] {
                let a11 = sign * a as i64;
                let a22 = d / a11;
                if !system.eq2_holds(0, &[a22]) {
                    continue;
                }
                for c in 0..mo.c as i64 {
                    if system.eq1_holds(0, &[a11], &[c]) {
                        return Some(found(a11, c, a22));
                    }
                }
            }
        }
        return None;
    }
    // a11 = 0: D free modulo M_D
    for c in 0..mo.c as i64 {
        if system.eq1_holds(0, &[0], &[c]) {
            for a22 in 0..mo.d as i64 {
                if system.eq2_holds(0, &[a22]) {
                    return Some(found(0, c, a22));
                }
            }
        }
    }
    // a22 = 0: A free modulo M_A
    if system.eq2_holds(0, &[0]) {
        for a11 in 0..mo.a as i64 {
            for c in 0..mo.c as i64 {
                if system.eq1_holds(0, &[a11], &[c]) {
                    return Some(found(a11, c, 0));
                }
            }
        }
    }
    None
}

/// Vectors of `[-bound, bound]^len` in order of increasing max-norm; within
/// a shell, coordinates run `0, 1, -1, 2, -2, …` with the first fastest.
pub(crate) fn shell_order(len: usize, bound: u64) -> impl Iterator<Item = Vec<i64>> {
    (0..=bound).flat_map(move |r| {
        let values: Vec<i64> = std::iter::once(0)
            .chain((1..=r as i64).flat_map(|v| [v, -v]))
            .collect();
        let radix = values.len() as u64;
        residue_vectors(len, radix)
            .map(move |digits| {
                digits
                    .iter()
                    .map(|&j| values[j as usize])
                    .collect::<Vec<i64>>()
            })
            .filter(move |v| r == 0 || v.iter().any(|x| x.unsigned_abs() == r))
    })
}

/// Box search over `A`; `C` and `D` are decided exactly for each `A`.
fn box_search(system: &ConstraintSystem, bound: u64) -> Result<Option<WitnessMatrix>, SolverError> {
    let (k, m, d) = (system.k(), system.m(), system.d());
    let mo = system.moduli();
    let g2 = system.table().g2();

    for flat in shell_order(k * m, bound) {
        let a_cols: Vec<Vec<i64>> = (0..m).map(|t| flat[t * k..(t + 1) * k].to_vec()).collect();
        let options: Vec<Vec<Vec<i64>>> =
            (0..m).map(|t| c_options(system, t, &a_cols[t])).collect();
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let a_refs: Vec<&Vec<i64>> = a_cols.iter().collect();
        let o_refs: Vec<&Vec<Vec<i64>>> = options.iter().collect();
        let Some(c_cols) = choose_c(system, &a_refs, &o_refs) else {
            continue;
        };

        // Aᵀ D = d I, D stacked column by column
        let mut at = IntMatrix::zeros(m, k);
        for (s, col) in a_cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                at[(s, i)] = BigInt::from(x);
            }
        }
        let mut rhs = IntMatrix::zeros(m, m);
        for s in 0..m {
            rhs[(s, s)] = BigInt::from(d);
        }
        let Some(lattice) = solve_linear(&at, &rhs)? else {
            continue;
        };

        // `eq2` as congruences modulo M_D
        let d_point = if g2.rank() == 0 {
            lattice.particular.clone()
        } else {
            let md = mo.d;
            let rows = m * g2.rank();
            let mut l = IntMatrix::zeros(rows, k * m);
            let mut c = Vec::with_capacity(rows);
            for t in 0..m {
                let rhs_t = system.eq2()[t].rhs.coeffs();
                for (j, &qj) in g2.orders().iter().enumerate() {
                    let scale = md / qj;
                    let row = t * g2.rank() + j;
                    for i in 0..k {
                        l[(row, t * k + i)] = BigInt::from(scale as i64 * system.high_coeff(i, j));
                    }
                    c.push(BigInt::from(scale as i64 * rhs_t[j]));
                }
            }
            match coset_congruence_feasible(&lattice, &l, &c, &BigInt::from(md))? {
                Some(v) => v,
                None => continue,
            }
        };
        let Some(d_flat) = d_point
            .iter()
            .map(ToPrimitive::to_i64)
            .collect::<Option<Vec<i64>>>()
        else {
            continue;
        };
        let d_cols: Vec<Vec<i64>> = (0..m)
            .map(|t| d_flat[t * k..(t + 1) * k].to_vec())
            .collect();
        let w = WitnessMatrix::from_columns(k, m, &a_cols, &c_cols, &d_cols);
        debug_assert!(system.verify(&w).unwrap_or(false));
        return Ok(Some(w));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::tables::GroupTable;

    fn table(n: i64) -> Arc<GroupTable> {
        Arc::new(GroupTable::builtin(n).unwrap())
    }

    fn rank1(n: i64, low: &[i64], high: &[i64]) -> ComplexSpec {
        ComplexSpec::from_coeffs(table(n), &[low.to_vec()], &[high.to_vec()], &[]).unwrap()
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn shells_cover_the_box_once() {
        let all: Vec<Vec<i64>> = shell_order(2, 2).collect();
        assert_eq!(all.len(), 25);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(
            &all[1..9]
                .iter()
                .filter(|v| v.iter().all(|x| x.abs() <= 1))
                .count(),
            &8
        );
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 25);
    }

    #[test]
    fn degree_two_self_map_is_refuted_mod_4() {
        let x = rank1(4, &[1], &[1]);
        let v = check_degree(&x, &x, 2, &SearchParams::default()).unwrap();
        assert_eq!(
            v,
            Verdict::NoSolutionProven {
                certificate: Certificate::Modulus { modulus: 4 }
            }
        );
    }

    #[test]
    fn n7_product_to_twisted() {
        let w1 = ComplexSpec::product_sum(table(7), 1).unwrap();
        let z1 = ComplexSpec::z_complex(1).unwrap();
        let p = SearchParams::default();
        assert_eq!(
            check_degree(&w1, &z1, 1, &p).unwrap(),
            Verdict::NoSolutionProven {
                certificate: Certificate::Modulus { modulus: 2 }
            }
        );
        assert!(check_degree(&w1, &z1, 2, &p).unwrap().is_witness());
    }

    #[test]
    fn zero_degree_always_has_a_witness() {
        let p = SearchParams::default();
        let x = rank1(5, &[1, 1], &[7]);
        let y = ComplexSpec::product_sum(table(5), 2).unwrap();
        for (a, b) in [(&x, &y), (&y, &x), (&x, &x), (&y, &y)] {
            let v = check_degree(a, b, 0, &p).unwrap();
            let w = v.witness().expect("degree zero");
            assert!(build_system(a, b, 0).unwrap().verify(w).unwrap());
        }
    }

    #[test]
    fn rank_deficit() {
        let x = ComplexSpec::product_sum(table(5), 1).unwrap();
        let y = ComplexSpec::product_sum(table(5), 2).unwrap();
        assert_eq!(
            check_degree(&x, &y, 3, &SearchParams::default()).unwrap(),
            Verdict::NoSolutionProven {
                certificate: Certificate::RankDeficit {
                    source_rank: 1,
                    target_rank: 2
                }
            }
        );
    }

    #[test]
    fn default_moduli() {
        let x = rank1(5, &[0, 0], &[0]);
        let s = build_system(&x, &x, 1).unwrap();
        assert_eq!(SearchParams::default().moduli_for(&s), vec![2, 4, 24]);
        let x = rank1(4, &[0], &[0]);
        let s = build_system(&x, &x, 1).unwrap();
        assert_eq!(SearchParams::default().moduli_for(&s), vec![2, 4, 12]);
        assert_eq!(SearchParams::default().box_for(&s), 12);
    }

    #[test]
    fn rejects_bad_params() {
        let x = rank1(4, &[0], &[0]);
        let p = SearchParams {
            moduli: Some(vec![0]),
            ..SearchParams::default()
        };
        assert!(matches!(
            check_degree(&x, &x, 1, &p),
            Err(SolverError::BadParams(_))
        ));
    }

    #[test]
    fn box_search_handles_rank_two() {
        let t = table(5);
        let x = ComplexSpec::product_sum(Arc::clone(&t), 2).unwrap();
        let y = ComplexSpec::from_coeffs(t, &[vec![0, 1]], &[vec![3]], &[]).unwrap();
        // 3 has order 8 in Z/24
        let p = SearchParams::default();
        for d in [8, 16, -8] {
            let v = check_degree(&x, &y, d, &p).unwrap();
            let w = v.witness().unwrap_or_else(|| panic!("d = {d}: {v}"));
            assert!(build_system(&x, &y, d).unwrap().verify(w).unwrap());
        }
        assert!(check_degree(&x, &y, 4, &p).unwrap().is_proven_empty());
    }

    #[test]
    fn verdict_json_round_trip() {
        let vs = vec![
            Verdict::Witness(WitnessMatrix::identity(2)),
            Verdict::NoSolutionProven {
                certificate: Certificate::Modulus { modulus: 4 },
            },
            Verdict::NoSolutionProven {
                certificate: Certificate::RankOneExhaustive,
            },
            Verdict::NoSolutionWithinBounds {
                box_bound: 3,
                moduli: vec![2, 4],
            },
        ];
        for v in vs {
            let text = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<Verdict>(&text).unwrap(), v);
        }
    }
}
