//! Complexes in normal form, described by the invariants of their top cell
//! attaching map
//!
//! ```text
//! α = Σ ι_i p_iα + Σ_{i<j} m_ij [ι_i, ι_j]η + Σ [ι_i, ι_{i+k}]
//! ```
//!
//! with `p_iα ∈ g1` for `i ≤ k`, `p_{k+i}α ∈ g2`, and bits `m_ij`. The
//! Whitehead terms `[ι_i, ι_{i+k}]` are always present (identity cup product
//! matrix) and carry no data.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbGroup, AbelianError, GroupElement};
use crate::tables::GroupTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("{field}: expected {expected} entries, got {got}")]
    Length {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{field}[{index}]: {source}")]
    Element {
        field: &'static str,
        index: usize,
        source: AbelianError,
    },
    #[error("second-order invariant m_{i}{j} must be 0 or 1, got {value}")]
    NotABit { i: usize, j: usize, value: i64 },
    #[error("complexes are built over different tables (n = {0} and n = {1})")]
    TableMismatch(i64, i64),
    #[error("document is for n = {doc} but the table is for n = {table}")]
    WrongN { doc: i64, table: i64 },
    #[error("the table has an infinite group")]
    InfiniteGroup,
    #[error("malformed complex document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexSpec {
    table: Arc<GroupTable>,
    rank: usize,
    first_low: Vec<GroupElement>,
    first_high: Vec<GroupElement>,
    /// Strict upper triangle of `m_ij`, row-major.
    second: Vec<bool>,
}

fn triangle_len(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

fn triangle_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

impl ComplexSpec {
    pub fn new(
        table: Arc<GroupTable>,
        first_low: Vec<GroupElement>,
        first_high: Vec<GroupElement>,
        second: Vec<bool>,
    ) -> Result<Self, ComplexError> {
        let rank = first_low.len();
        if rank == 0 {
            return Err(ComplexError::ZeroRank);
        }
        if first_high.len() != rank {
            return Err(ComplexError::Length {
                field: "first_high",
                expected: rank,
                got: first_high.len(),
            });
        }
        if second.len() != triangle_len(rank) {
            return Err(ComplexError::Length {
                field: "second",
                expected: triangle_len(rank),
                got: second.len(),
            });
        }
        let check = |field: &'static str, elems: &[GroupElement], group: &Arc<AbGroup>| {
            for (index, e) in elems.iter().enumerate() {
                if e.group() != group {
                    return Err(ComplexError::Element {
                        field,
                        index,
                        source: AbelianError::GroupMismatch {
                            left: e.group().to_string(),
                            right: group.to_string(),
                        },
                    });
                }
            }
            Ok(())
        };
        check("first_low", &first_low, table.g1())?;
        check("first_high", &first_high, table.g2())?;
        Ok(ComplexSpec {
            table,
            rank,
            first_low,
            first_high,
            second,
        })
    }

    /// Builds a complex from raw coefficient vectors.
    pub fn from_coeffs(
        table: Arc<GroupTable>,
        first_low: &[Vec<i64>],
        first_high: &[Vec<i64>],
        second: &[bool],
    ) -> Result<Self, ComplexError> {
        let elems = |field, raw: &[Vec<i64>], group: &Arc<crate::AbGroup>| {
            raw.iter()
                .enumerate()
                .map(|(index, v)| {
                    group.reduce(v).map_err(|source| ComplexError::Element {
                        field,
                        index,
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let low = elems("first_low", first_low, table.g1())?;
        let high = elems("first_high", first_high, table.g2())?;
        if high.len() != low.len() {
            return Err(ComplexError::Length {
                field: "first_high",
                expected: low.len(),
                got: high.len(),
            });
        }
        ComplexSpec::new(table, low, high, second.to_vec())
    }

    /// `(S^{n-1} × S^n)^{#k}`: every invariant zero.
    pub fn product_sum(table: Arc<GroupTable>, k: usize) -> Result<Self, ComplexError> {
        if k == 0 {
            return Err(ComplexError::ZeroRank);
        }
        let low = vec![table.g1().zero(); k];
        let high = vec![table.g2().zero(); k];
        ComplexSpec::new(table, low, high, vec![false; triangle_len(k)])
    }

    /// `Z_k = Z_1 # W_1^{#(k-1)}` for `n = 7`, where `Z_1` is attached by
    /// `i_1 ν² + [i_1, i_2]`.
    pub fn z_complex(k: usize) -> Result<Self, ComplexError> {
        let table = Arc::new(GroupTable::builtin(7).expect("built-in table for n = 7"));
        let mut z = ComplexSpec::product_sum(table, k)?;
        z.first_low[0] = z.table.g1().generator(0);
        Ok(z)
    }

    /// Homotopy connected sum: the cofibre of `α + β`. Invariants are
    /// concatenated and the second-order array is block diagonal.
    pub fn connected_sum(&self, other: &ComplexSpec) -> Result<ComplexSpec, ComplexError> {
        if self.table != other.table {
            return Err(ComplexError::TableMismatch(self.table.n(), other.table.n()));
        }
        let k = self.rank + other.rank;
        let mut second = vec![false; triangle_len(k)];
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                second[triangle_index(k, i, j)] = self.m(i, j);
            }
        }
        for i in 0..other.rank {
            for j in i + 1..other.rank {
                second[triangle_index(k, self.rank + i, self.rank + j)] = other.m(i, j);
            }
        }
        let low = self
            .first_low
            .iter()
            .chain(&other.first_low)
            .cloned()
            .collect();
        let high = self
            .first_high
            .iter()
            .chain(&other.first_high)
            .cloned()
            .collect();
        ComplexSpec::new(Arc::clone(&self.table), low, high, second)
    }

    pub fn table(&self) -> &Arc<GroupTable> {
        &self.table
    }

    pub fn n(&self) -> i64 {
        self.table.n()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `p_iα ∈ g1`, `0 ≤ i < k`.
    pub fn first_low(&self) -> &[GroupElement] {
        &self.first_low
    }

    /// `p_{k+i}α ∈ g2`, `0 ≤ i < k`.
    pub fn first_high(&self) -> &[GroupElement] {
        &self.first_high
    }

    /// `m_ij` for `i < j` (zero-based); `false` on and below the diagonal.
    pub fn m(&self, i: usize, j: usize) -> bool {
        if i >= j {
            return false;
        }
        self.second[triangle_index(self.rank, i, j)]
    }

    pub fn second_bits(&self) -> &[bool] {
        &self.second
    }

    pub fn to_doc(&self) -> ComplexDoc {
        let coeffs = |v: &[GroupElement]| v.iter().map(|e| e.coeffs().to_vec()).collect();
        let second = (0..self.rank.saturating_sub(1))
            .map(|i| (i + 1..self.rank).map(|j| self.m(i, j) as i64).collect())
            .collect();
        ComplexDoc {
            n: self.n(),
            rank: self.rank,
            first_low: coeffs(&self.first_low),
            first_high: coeffs(&self.first_high),
            second,
        }
    }

    pub fn from_doc(doc: &ComplexDoc, table: Arc<GroupTable>) -> Result<Self, ComplexError> {
        if doc.n != table.n() {
            return Err(ComplexError::WrongN {
                doc: doc.n,
                table: table.n(),
            });
        }
        let k = doc.rank;
        if k == 0 {
            return Err(ComplexError::ZeroRank);
        }
        for (field, list) in [
            ("first_low", &doc.first_low),
            ("first_high", &doc.first_high),
        ] {
            if list.len() != k {
                return Err(ComplexError::Length {
                    field,
                    expected: k,
                    got: list.len(),
                });
            }
        }
        // allow a trailing empty row for the last index
        let rows: &[Vec<i64>] = match doc.second.len() {
            l if l == k && doc.second[k - 1].is_empty() => &doc.second[..k - 1],
            _ => &doc.second,
        };
        if rows.len() != k - 1 {
            return Err(ComplexError::Length {
                field: "second",
                expected: k - 1,
                got: rows.len(),
            });
        }
        let mut second = Vec::with_capacity(triangle_len(k));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k - 1 - i {
                return Err(ComplexError::Length {
                    field: "second",
                    expected: k - 1 - i,
                    got: row.len(),
                });
            }
            for (off, &value) in row.iter().enumerate() {
                match value {
                    0 => second.push(false),
                    1 => second.push(true),
                    _ => {
                        return Err(ComplexError::NotABit {
                            i: i + 1,
                            j: i + off + 2,
                            value,
                        })
                    }
                }
            }
        }
        ComplexSpec::from_coeffs(table, &doc.first_low, &doc.first_high, &second)
    }

    pub fn from_json(text: &str, table: Arc<GroupTable>) -> Result<Self, ComplexError> {
        let doc: ComplexDoc =
            serde_json::from_str(text).map_err(|e| ComplexError::Json(e.to_string()))?;
        ComplexSpec::from_doc(&doc, table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("complex document serializes")
    }
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[GroupElement]| {
            v.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "low {} | high {}",
            join(&self.first_low),
            join(&self.first_high)
        )?;
        if self.rank > 1 {
            let bits: String = self
                .second
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            write!(f, " | m {bits}")?;
        }
        Ok(())
    }
}

/// JSON form of a [`ComplexSpec`]. `second` lists the strict upper triangle
/// row by row: row `i` holds `m_{i,j}` for `j > i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub n: i64,
    pub rank: usize,
    pub first_low: Vec<Vec<i64>>,
    pub first_high: Vec<Vec<i64>>,
    #[serde(default)]
    pub second: Vec<Vec<i64>>,
}

/// Every complex of rank `k` over `table`, each exactly once.
///
/// The order is mixed radix with the first digit varying fastest; digits
/// are, in order, `first_low[0..k]`, `first_high[0..k]` (each running over
/// the group elements in [`crate::AbGroup::elements`] order) and then the
/// bits `m_ij` in row-major order. The all-zero complex comes first.
pub fn enumerate_complexes(
    table: Arc<GroupTable>,
    k: usize,
) -> Result<impl Iterator<Item = ComplexSpec>, ComplexError> {
    if k == 0 {
        return Err(ComplexError::ZeroRank);
    }
    if !table.g1().is_finite() || !table.g2().is_finite() {
        return Err(ComplexError::InfiniteGroup);
    }
    let low = table.g1().elements();
    let high = table.g2().elements();
    let bits = triangle_len(k);
    let total =
        (low.len() as u128).pow(k as u32) * (high.len() as u128).pow(k as u32) * (1u128 << bits);
    Ok((0..total).map(move |mut idx| {
        let mut take = |radix: usize| {
            let digit = (idx % radix as u128) as usize;
            idx /= radix as u128;
            digit
        };
        let first_low = (0..k).map(|_| low[take(low.len())].clone()).collect();
        let first_high = (0..k).map(|_| high[take(high.len())].clone()).collect();
        let second = (0..bits).map(|_| take(2) == 1).collect();
        ComplexSpec {
            table: Arc::clone(&table),
            rank: k,
            first_low,
            first_high,
            second,
        }
    }))
}

/// Number of complexes [`enumerate_complexes`] yields.
pub fn complex_count(table: &GroupTable, k: usize) -> Option<u128> {
    let g1 = table.g1().cardinality()? as u128;
    let g2 = table.g2().cardinality()? as u128;
    Some(g1.pow(k as u32) * g2.pow(k as u32) * (1u128 << triangle_len(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn table(n: i64) -> Arc<GroupTable> {
        Arc::new(GroupTable::builtin(n).unwrap())
    }

    #[test]
    fn product_sums() {
        let s = ComplexSpec::product_sum(table(4), 1).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.first_low()[0].is_zero() && s.first_high()[0].is_zero());

        let w2 = ComplexSpec::product_sum(table(7), 2).unwrap();
        assert_eq!(w2.rank(), 2);
        assert!(!w2.m(0, 1));

        let s = ComplexSpec::product_sum(table(5), 3).unwrap();
        assert_eq!(s.second_bits().len(), 3);
        assert!(s.first_low().iter().all(GroupElement::is_zero));
        assert_eq!(
            ComplexSpec::product_sum(table(5), 0),
            Err(ComplexError::ZeroRank)
        );
    }

    #[test]
    fn connected_sums() {
        let t = table(5);
        let one = ComplexSpec::product_sum(Arc::clone(&t), 1).unwrap();
        let two = one.connected_sum(&one).unwrap();
        assert_eq!(two, ComplexSpec::product_sum(Arc::clone(&t), 2).unwrap());

        let w1 = ComplexSpec::product_sum(table(7), 1).unwrap();
        let z1 = ComplexSpec::z_complex(1).unwrap();
        assert_eq!(
            z1.connected_sum(&w1).unwrap(),
            ComplexSpec::z_complex(2).unwrap()
        );

        let x = ComplexSpec::from_coeffs(
            Arc::clone(&t),
            &[vec![1, 0], vec![0, 1]],
            &[vec![3], vec![5]],
            &[true],
        )
        .unwrap();
        let y = ComplexSpec::from_coeffs(Arc::clone(&t), &[vec![1, 1]], &[vec![7]], &[]).unwrap();
        let xy = x.connected_sum(&y).unwrap();
        assert_eq!(xy.rank(), 3);
        assert!(xy.m(0, 1) && !xy.m(0, 2) && !xy.m(1, 2));
        assert_eq!(xy.first_high()[2].coeffs(), &[7]);

        // associativity with index order preserved
        let a = x.connected_sum(&y).unwrap().connected_sum(&x).unwrap();
        let b = x.connected_sum(&y.connected_sum(&x).unwrap()).unwrap();
        assert_eq!(a, b);

        assert!(matches!(
            x.connected_sum(&w1),
            Err(ComplexError::TableMismatch(5, 7))
        ));
    }

    #[test]
    fn z_complexes() {
        let z1 = ComplexSpec::z_complex(1).unwrap();
        assert_eq!(z1.first_low()[0].coeffs(), &[1]);
        let z2 = ComplexSpec::z_complex(2).unwrap();
        assert_eq!(z2.first_low()[0].coeffs(), &[1]);
        assert!(z2.first_low()[1].is_zero());
        assert_ne!(z1, ComplexSpec::product_sum(table(7), 1).unwrap());
    }

    #[test]
    fn enumeration_counts() {
        let count = |n, k| enumerate_complexes(table(n), k).unwrap().count();
        assert_eq!(count(4, 1), 24);
        assert_eq!(count(5, 1), 96);
        assert_eq!(count(7, 1), 2);
        for n in 4..=7 {
            for k in 1..=2 {
                let t = table(n);
                let all: Vec<_> = enumerate_complexes(Arc::clone(&t), k).unwrap().collect();
                assert_eq!(all.len() as u128, complex_count(&t, k).unwrap());
                let distinct: HashSet<String> = all.iter().map(|c| c.to_json()).collect();
                assert_eq!(distinct.len(), all.len());
            }
        }
    }

    #[test]
    fn enumeration_order() {
        let all: Vec<_> = enumerate_complexes(table(7), 2).unwrap().collect();
        assert_eq!(all[0], ComplexSpec::product_sum(table(7), 2).unwrap());
        assert_eq!(all[1], ComplexSpec::z_complex(2).unwrap());
        let n4: Vec<_> = enumerate_complexes(table(4), 1).unwrap().collect();
        assert_eq!(n4[13].first_low()[0].coeffs(), &[1]);
        assert_eq!(n4[13].first_high()[0].coeffs(), &[1]);
    }

    #[test]
    fn document_round_trip() {
        let x = ComplexSpec::product_sum(table(5), 2).unwrap();
        assert_eq!(ComplexSpec::from_json(&x.to_json(), table(5)).unwrap(), x);
        for c in enumerate_complexes(table(5), 2).unwrap().step_by(97) {
            assert_eq!(ComplexSpec::from_json(&c.to_json(), table(5)).unwrap(), c);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let doc = r#"{"n": 5, "rank": 2, "first_low": [[0,0],[0,0]], "first_high": [[0],[0]], "second": [[2]]}"#;
        assert!(matches!(
            ComplexSpec::from_json(doc, table(5)),
            Err(ComplexError::NotABit {
                i: 1,
                j: 2,
                value: 2
            })
        ));

        let doc = r#"{"n": 4, "rank": 2, "first_low": [[1,2,3],[0]], "first_high": [[0],[0]], "second": [[0]]}"#;
        assert!(matches!(
            ComplexSpec::from_json(doc, table(4)),
            Err(ComplexError::Element {
                field: "first_low",
                index: 0,
                ..
            })
        ));

        let doc =
            r#"{"n": 4, "rank": 2, "first_low": [[1]], "first_high": [[0],[0]], "second": [[0]]}"#;
        assert!(matches!(
            ComplexSpec::from_json(doc, table(4)),
            Err(ComplexError::Length {
                field: "first_low",
                ..
            })
        ));

        let doc = r#"{"n": 4, "rank": 1, "first_low": [[1]], "first_high": [[0]]}"#;
        assert!(matches!(
            ComplexSpec::from_json(doc, table(5)),
            Err(ComplexError::WrongN { doc: 4, table: 5 })
        ));
        assert!(ComplexSpec::from_json(doc, table(4)).is_ok());
        assert!(matches!(
            ComplexSpec::from_json("[]", table(4)),
            Err(ComplexError::Json(_))
        ));
    }
}
