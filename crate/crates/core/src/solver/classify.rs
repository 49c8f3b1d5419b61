use std::sync::Arc;

use rayon::prelude::*;

use crate::complex::{enumerate_complexes, ComplexSpec};
use crate::tables::GroupTable;

use super::search::{check_degree, SearchParams, Verdict};
use super::witness::WitnessMatrix;
use super::SolverError;

/// Whether a map `x → y` of degree `+1` or `-1` exists; such a map is a
/// homotopy equivalence. Returns its witness, or `None` when both degrees
/// are proven impossible.
pub fn is_equivalent(
    x: &ComplexSpec,
    y: &ComplexSpec,
    params: &SearchParams,
) -> Result<Option<WitnessMatrix>, SolverError> {
    if x.rank() != y.rank() {
        return Ok(None);
    }
    let mut undecided = false;
    for d in [1, -1] {
        match check_degree(x, y, d, params)? {
            Verdict::Witness(w) => return Ok(Some(w)),
            Verdict::NoSolutionWithinBounds { .. } => undecided = true,
            Verdict::NoSolutionProven { .. } => {}
        }
    }
    if undecided {
        return Err(SolverError::Undecided(format!(
            "equivalence of {x} and {y}"
        )));
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// The enumeration-least member.
    pub representative: ComplexSpec,
    /// Members in enumeration order.
    pub members: Vec<ComplexSpec>,
}

impl EquivalenceClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Partitions all rank-`k` complexes over `table` into homotopy types.
///
/// Complexes are taken in enumeration order. Each one is compared with the
/// representatives found so far (in parallel) and joins the first
/// equivalent class, or opens a new one.
pub fn classify(
    table: Arc<GroupTable>,
    k: usize,
    params: &SearchParams,
) -> Result<Vec<EquivalenceClass>, SolverError> {
    params.validate()?;
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for x in enumerate_complexes(table, k)? {
        let answers: Vec<Result<bool, SolverError>> = classes
            .par_iter()
            .map(|c| is_equivalent(&x, &c.representative, params).map(|w| w.is_some()))
            .collect();
        let mut home = None;
        let mut undecided = None;
        for (i, a) in answers.into_iter().enumerate() {
            match a {
                Ok(true) => {
                    home = Some(i);
                    break;
                }
                Ok(false) => {}
                Err(e @ SolverError::Undecided(_)) => undecided = undecided.or(Some(e)),
                Err(e) => return Err(e),
            }
        }
        match (home, undecided) {
            (Some(i), _) => classes[i].members.push(x),
            (None, Some(e)) => return Err(e),
            (None, None) => classes.push(EquivalenceClass {
                representative: x.clone(),
                members: vec![x],
            }),
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::build_system;

    fn table(n: i64) -> Arc<GroupTable> {
        Arc::new(GroupTable::builtin(n).unwrap())
    }

    fn n4(a: i64, b: i64) -> ComplexSpec {
        ComplexSpec::from_coeffs(table(4), &[vec![a]], &[vec![b]], &[]).unwrap()
    }

    #[test]
    fn rank_one_n4_examples() {
        let p = SearchParams::default();
        assert!(is_equivalent(&n4(1, 0), &n4(11, 0), &p).unwrap().is_some());
        assert!(is_equivalent(&n4(1, 0), &n4(2, 0), &p).unwrap().is_none());
    }

    #[test]
    fn reflexive_with_a_verified_witness() {
        let p = SearchParams::default();
        let x = n4(5, 1);
        let w = is_equivalent(&x, &x, &p).unwrap().unwrap();
        assert!(build_system(&x, &x, 1).unwrap().verify(&w).unwrap());
    }

    #[test]
    fn different_ranks_are_not_equivalent() {
        let t = table(6);
        let x = ComplexSpec::product_sum(Arc::clone(&t), 1).unwrap();
        let y = ComplexSpec::product_sum(t, 2).unwrap();
        assert!(is_equivalent(&x, &y, &SearchParams::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn tiny_box_is_undecided_not_false() {
        let t = table(7);
        let x = ComplexSpec::product_sum(Arc::clone(&t), 2).unwrap();
        let p = SearchParams {
            moduli: Some(vec![]),
            box_bound: Some(0),
            ..SearchParams::default()
        };
        assert!(matches!(
            is_equivalent(&x, &x, &p),
            Err(SolverError::Undecided(_))
        ));
    }

    #[test]
    fn n7_rank_one() {
        let classes = classify(table(7), 1, &SearchParams::default()).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(
            classes[0].representative,
            ComplexSpec::product_sum(table(7), 1).unwrap()
        );
        assert_eq!(
            classes[1].representative,
            ComplexSpec::z_complex(1).unwrap()
        );
        assert_eq!(classes.iter().map(EquivalenceClass::size).sum::<usize>(), 2);
    }
}
