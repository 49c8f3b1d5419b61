use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexSpec;

use super::search::{check_degree, SearchParams, Verdict};
use super::SolverError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub d: i64,
    pub verdict: Verdict,
}

/// Union of residue classes modulo `modulus`, checked only on
/// `[-validated_range, validated_range]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct APUnion {
    pub modulus: u64,
    pub classes: Vec<u64>,
    pub validated_range: u64,
}

impl APUnion {
    pub fn contains(&self, d: i64) -> bool {
        self.classes
            .contains(&(d.rem_euclid(self.modulus as i64) as u64))
    }
}

impl fmt::Display for APUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.classes.as_slice() {
            [] => write!(f, "empty"),
            [c] => write!(f, "{c} mod {}", self.modulus),
            cs => {
                let list: Vec<String> = cs.iter().map(u64::to_string).collect();
                write!(f, "{{{}}} mod {}", list.join(", "), self.modulus)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub range: u64,
    /// One entry per `d`, in increasing order.
    pub entries: Vec<DegreeEntry>,
    /// No entry is undecided.
    pub exact: bool,
    /// Conjectured progression, filled when the report is exact.
    pub progression: Option<APUnion>,
}

impl DegreeReport {
    /// Degrees with a witness.
    pub fn members(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|e| e.verdict.is_witness())
            .map(|e| e.d)
            .collect()
    }

    pub fn undecided(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|e| e.verdict.is_undecided())
            .map(|e| e.d)
            .collect()
    }

    pub fn verdict(&self, d: i64) -> Option<&Verdict> {
        self.entries.iter().find(|e| e.d == d).map(|e| &e.verdict)
    }
}

/// Verdicts for every `d` in `[-range, range]`, computed in parallel.
pub fn degree_set(
    x: &ComplexSpec,
    y: &ComplexSpec,
    range: u64,
    params: &SearchParams,
) -> Result<DegreeReport, SolverError> {
    params.validate()?;
    let r = i64::try_from(range).map_err(|_| SolverError::BadParams("range too large".into()))?;
    let entries = (-r..=r)
        .into_par_iter()
        .map(|d| check_degree(x, y, d, params).map(|verdict| DegreeEntry { d, verdict }))
        .collect::<Result<Vec<_>, _>>()?;
    let exact = entries.iter().all(|e| !e.verdict.is_undecided());
    let mut report = DegreeReport {
        range,
        entries,
        exact,
        progression: None,
    };
    if exact {
        report.progression = infer_progressions(&report, params.max_modulus);
    }
    Ok(report)
}

/// The smallest modulus `M ≤ max_modulus` for which membership is constant
/// on every residue class within the range. Only a conjecture outside it.
pub fn infer_progressions(report: &DegreeReport, max_modulus: u64) -> Option<APUnion> {
    if !report.exact || report.entries.is_empty() {
        return None;
    }
    let cap = max_modulus.min(report.range.max(1));
    'modulus: for modulus in 1..=cap {
        let mut state: Vec<Option<bool>> = vec![None; modulus as usize];
        for e in &report.entries {
            let slot = &mut state[e.d.rem_euclid(modulus as i64) as usize];
            let member = e.verdict.is_witness();
            match slot {
                None => *slot = Some(member),
                Some(prev) if *prev != member => continue 'modulus,
                _ => {}
            }
        }
        let classes = (0..modulus)
            .filter(|&c| state[c as usize] == Some(true))
            .collect();
        return Some(APUnion {
            modulus,
            classes,
            validated_range: report.range,
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::solver::{Certificate, WitnessMatrix};
    use crate::tables::GroupTable;

    fn report(range: i64, member: impl Fn(i64) -> bool) -> DegreeReport {
        let entries = (-range..=range)
            .map(|d| DegreeEntry {
                d,
                verdict: if member(d) {
                    Verdict::Witness(WitnessMatrix::zero(1, 1))
                } else {
                    Verdict::NoSolutionProven {
                        certificate: Certificate::Modulus { modulus: 2 },
                    }
                },
            })
            .collect();
        DegreeReport {
            range: range as u64,
            entries,
            exact: true,
            progression: None,
        }
    }

    #[test]
    fn progressions() {
        let ap = infer_progressions(&report(48, |d| d % 6 == 0), 48).unwrap();
        assert_eq!((ap.modulus, ap.classes.clone()), (6, vec![0]));
        assert_eq!(ap.to_string(), "0 mod 6");
        let ap = infer_progressions(&report(48, |d| d.rem_euclid(4) != 2), 48).unwrap();
        assert_eq!((ap.modulus, ap.classes.clone()), (4, vec![0, 1, 3]));
        assert_eq!(ap.to_string(), "{0, 1, 3} mod 4");
        let ap = infer_progressions(&report(10, |_| true), 48).unwrap();
        assert_eq!((ap.modulus, ap.classes), (1, vec![0]));
        assert!(infer_progressions(&report(10, |d| d == 3), 48).is_none());
    }

    #[test]
    fn progression_matches_every_entry() {
        let rep = report(30, |d| d.rem_euclid(10) == 0 || d.rem_euclid(10) == 7);
        let ap = infer_progressions(&rep, 48).unwrap();
        assert_eq!(ap.modulus, 10);
        for e in &rep.entries {
            assert_eq!(ap.contains(e.d), e.verdict.is_witness());
        }
    }

    #[test]
    fn inexact_reports_have_no_progression() {
        let mut rep = report(4, |_| true);
        rep.entries[0].verdict = Verdict::NoSolutionWithinBounds {
            box_bound: 1,
            moduli: vec![2],
        };
        rep.exact = false;
        assert!(infer_progressions(&rep, 48).is_none());
        assert_eq!(rep.undecided(), vec![-4]);
    }

    #[test]
    fn n6_products_are_full() {
        let t = Arc::new(GroupTable::builtin(6).unwrap());
        let x = ComplexSpec::product_sum(t, 1).unwrap();
        let rep = degree_set(&x, &x, 10, &SearchParams::default()).unwrap();
        assert!(rep.exact);
        assert_eq!(rep.members(), (-10..=10).collect::<Vec<_>>());
        assert_eq!(rep.progression.unwrap().modulus, 1);
    }
}
