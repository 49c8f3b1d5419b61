//! Homotopy data that parameterizes the degree equations for a fixed `n`.
//!
//! * `g1 = π_{2n-2}(S^{n-1})`, `g2 = π_{2n-2}(S^n)`;
//! * `eta_push: g2 → g1`, the class of `η ∘ x`;
//! * `whitehead_eta ∈ g1`, the class `[Id_{S^{n-1}}, Id_{S^{n-1}}]η`;
//! * `hopf_h: g1 → Z/2`, the coefficient `h` with `H(x) = h(x)·η`.
//!
//! Built-in tables cover `n ∈ {4, 5, 6, 7}`; any other table can be loaded
//! from a JSON document (see [`TableDoc`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbGroup, AbelianError, GroupElement, GroupHom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("no built-in table for n = {0} (built-in: 4, 5, 6, 7)")]
    Unsupported(i64),
    #[error("n must be at least 4, got {0}")]
    SmallN(i64),
    #[error("{group} has an infinite cyclic factor; tables must be finite")]
    InfiniteGroup { group: &'static str },
    #[error("{field}: {source}")]
    Shape {
        field: &'static str,
        source: AbelianError,
    },
    #[error("{field} is not a homomorphism: {reason}")]
    IllDefined { field: &'static str, reason: String },
    #[error("whitehead_eta must be 2-torsion, got {0} of order {1}")]
    NotTwoTorsion(String, u64),
    #[error("whitehead_eta must vanish for n = {0}: {1}")]
    ForcedZero(i64, &'static str),
    #[error("malformed table document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: i64,
    g1: Arc<AbGroup>,
    g2: Arc<AbGroup>,
    eta_push: GroupHom,
    whitehead_eta: GroupElement,
    hopf_h: GroupHom,
}

/// Block moduli of the unknowns: changing an entry of the `A`, `C` or `D`
/// block by the corresponding modulus leaves the group-valued and mod-2
/// equations unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moduli {
    pub a: u64,
    pub c: u64,
    pub d: u64,
}

fn z2() -> Arc<AbGroup> {
    Arc::new(AbGroup::with_names(vec![2], vec!["eta".into()]))
}

impl GroupTable {
    /// Assembles and validates a table.
    pub fn new(
        n: i64,
        g1: AbGroup,
        g2: AbGroup,
        eta_push_images: Vec<Vec<i64>>,
        whitehead_eta: Vec<i64>,
        hopf_h_images: Vec<Vec<i64>>,
    ) -> Result<Self, TableError> {
        if n < 4 {
            return Err(TableError::SmallN(n));
        }
        if !g1.is_finite() {
            return Err(TableError::InfiniteGroup { group: "g1" });
        }
        if !g2.is_finite() {
            return Err(TableError::InfiniteGroup { group: "g2" });
        }
        let g1 = Arc::new(g1);
        let g2 = Arc::new(g2);
        let eta_push =
            GroupHom::new(Arc::clone(&g2), Arc::clone(&g1), eta_push_images).map_err(|source| {
                TableError::Shape {
                    field: "eta_push",
                    source,
                }
            })?;
        let hopf_h = GroupHom::new(Arc::clone(&g1), z2(), hopf_h_images).map_err(|source| {
            TableError::Shape {
                field: "hopf_h",
                source,
            }
        })?;
        let whitehead_eta = g1
            .reduce(&whitehead_eta)
            .map_err(|source| TableError::Shape {
                field: "whitehead_eta",
                source,
            })?;
        eta_push.validate().map_err(|v| TableError::IllDefined {
            field: "eta_push",
            reason: v.to_string(),
        })?;
        hopf_h.validate().map_err(|v| TableError::IllDefined {
            field: "hopf_h",
            reason: v.to_string(),
        })?;
        if !whitehead_eta.scale(2).is_zero() {
            let ord = whitehead_eta.order().unwrap_or(0);
            return Err(TableError::NotTwoTorsion(whitehead_eta.to_string(), ord));
        }
        if !whitehead_eta.is_zero() {
            if n == 7 {
                return Err(TableError::ForcedZero(n, "n = 7 forces zero"));
            }
            if n % 4 == 0 {
                return Err(TableError::ForcedZero(n, "4 | n forces zero"));
            }
        }
        Ok(GroupTable {
            n,
            g1,
            g2,
            eta_push,
            whitehead_eta,
            hopf_h,
        })
    }

    /// The tables for `n = 4, 5, 6, 7`.
    ///
    /// The Hopf coefficient is not part of the classical data for `n = 4`
    /// and `n = 6`; the defaults here are `h(w) = 1` and `h(νη²) = 0`. Load a
    /// table document to override them.
    pub fn builtin(n: i64) -> Result<Self, TableError> {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match n {
            4 => GroupTable::new(
                4,
                AbGroup::with_names(vec![12], names(&["w"])),
                AbGroup::with_names(vec![2], names(&["eta^2"])),
                vec![vec![6]],
                vec![0],
                vec![vec![1]],
            ),
            5 => GroupTable::new(
                5,
                AbGroup::with_names(vec![2, 2], names(&["eps1", "eps2"])),
                AbGroup::with_names(vec![24], names(&["w"])),
                vec![vec![0, 1]],
                vec![0, 1],
                vec![vec![1], vec![0]],
            ),
            6 => GroupTable::new(
                6,
                AbGroup::with_names(vec![2], names(&["nu eta^2"])),
                AbGroup::trivial(),
                vec![],
                vec![1],
                vec![vec![0]],
            ),
            7 => GroupTable::new(
                7,
                AbGroup::with_names(vec![2], names(&["nu^2"])),
                AbGroup::trivial(),
                vec![],
                vec![0],
                vec![vec![0]],
            ),
            _ => Err(TableError::Unsupported(n)),
        }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn g1(&self) -> &Arc<AbGroup> {
        &self.g1
    }

    pub fn g2(&self) -> &Arc<AbGroup> {
        &self.g2
    }

    pub fn eta_push(&self) -> &GroupHom {
        &self.eta_push
    }

    pub fn whitehead_eta(&self) -> &GroupElement {
        &self.whitehead_eta
    }

    pub fn hopf_h(&self) -> &GroupHom {
        &self.hopf_h
    }

    /// `h(x)` as `0` or `1`.
    pub fn hopf_coefficient(&self, x: &GroupElement) -> Result<i64, AbelianError> {
        Ok(self.hopf_h.apply(x)?.coeffs()[0])
    }

    pub fn required_moduli(&self) -> Moduli {
        // finiteness is enforced in `new`
        let e1 = self.g1.exponent().expect("finite g1");
        let a = if self.whitehead_eta.is_zero() && self.hopf_h.is_zero() {
            e1
        } else {
            e1.lcm(&4)
        };
        let c = 2u64.lcm(&self.eta_push.image_exponent().expect("finite g1"));
        let d = self.g2.exponent().expect("finite g2");
        Moduli { a, c, d }
    }

    pub fn to_doc(&self) -> TableDoc {
        let mut generator_names = BTreeMap::new();
        generator_names.insert("g1".to_string(), self.g1.names().to_vec());
        generator_names.insert("g2".to_string(), self.g2.names().to_vec());
        TableDoc {
            n: self.n,
            g1_orders: self.g1.orders().to_vec(),
            g2_orders: self.g2.orders().to_vec(),
            eta_push: self.eta_push.images().to_vec(),
            whitehead_eta: self.whitehead_eta.coeffs().to_vec(),
            hopf_h: self.hopf_h.images().to_vec(),
            generator_names,
        }
    }

    pub fn from_doc(doc: &TableDoc) -> Result<Self, TableError> {
        let names = |key: &str| doc.generator_names.get(key).cloned().unwrap_or_default();
        GroupTable::new(
            doc.n,
            AbGroup::with_names(doc.g1_orders.clone(), names("g1")),
            AbGroup::with_names(doc.g2_orders.clone(), names("g2")),
            doc.eta_push.clone(),
            doc.whitehead_eta.clone(),
            doc.hopf_h.clone(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let doc: TableDoc =
            serde_json::from_str(text).map_err(|e| TableError::Json(e.to_string()))?;
        GroupTable::from_doc(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("table document serializes")
    }
}

/// JSON form of a [`GroupTable`].
///
/// Homomorphisms are lists of images: `eta_push[j]` is the `g1` coefficient
/// vector of the `j`-th generator of `g2`, and `hopf_h[j]` is the one-entry
/// `Z/2` vector of the `j`-th generator of `g1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub n: i64,
    pub g1_orders: Vec<u64>,
    pub g2_orders: Vec<u64>,
    pub eta_push: Vec<Vec<i64>>,
    pub whitehead_eta: Vec<i64>,
    pub hopf_h: Vec<Vec<i64>>,
    #[serde(default)]
    pub generator_names: BTreeMap<String, Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_data() {
        let t4 = GroupTable::builtin(4).unwrap();
        assert_eq!(t4.g1().orders(), &[12]);
        assert_eq!(t4.g2().orders(), &[2]);
        let eta2 = t4.g2().generator(0);
        assert_eq!(t4.eta_push().apply(&eta2).unwrap().coeffs(), &[6]);
        assert!(t4.whitehead_eta().is_zero());

        let t5 = GroupTable::builtin(5).unwrap();
        assert_eq!(t5.g1().orders(), &[2, 2]);
        assert_eq!(t5.g2().orders(), &[24]);
        assert_eq!(t5.whitehead_eta().coeffs(), &[0, 1]);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let x = t5.g1().reduce(&[a, b]).unwrap();
            assert_eq!(t5.hopf_coefficient(&x).unwrap(), a);
        }
        let w = t5.g2().generator(0);
        assert_eq!(t5.eta_push().apply(&w).unwrap().coeffs(), &[0, 1]);

        let t6 = GroupTable::builtin(6).unwrap();
        assert_eq!(t6.g1().orders(), &[2]);
        assert_eq!(t6.g2().rank(), 0);
        assert_eq!(t6.whitehead_eta().coeffs(), &[1]);

        let t7 = GroupTable::builtin(7).unwrap();
        assert_eq!(t7.g1().orders(), &[2]);
        assert_eq!(t7.g2().rank(), 0);
        assert!(t7.whitehead_eta().is_zero());
        assert!(t7.hopf_h().is_zero());

        assert_eq!(GroupTable::builtin(8), Err(TableError::Unsupported(8)));
    }

    #[test]
    fn builtin_invariants() {
        for n in 4..=7 {
            let t = GroupTable::builtin(n).unwrap();
            assert!(t.eta_push().validate().is_ok());
            assert!(t.hopf_h().validate().is_ok());
            assert!(t.whitehead_eta().scale(2).is_zero());
            if n == 7 || n % 4 == 0 {
                assert!(t.whitehead_eta().is_zero());
            }
        }
    }

    #[test]
    fn moduli() {
        let m = |n| GroupTable::builtin(n).unwrap().required_moduli();
        assert_eq!(m(4), Moduli { a: 12, c: 2, d: 2 });
        assert_eq!(m(5), Moduli { a: 4, c: 2, d: 24 });
        assert_eq!(m(6), Moduli { a: 4, c: 2, d: 1 });
        assert_eq!(m(7), Moduli { a: 2, c: 2, d: 1 });
    }

    #[test]
    fn document_round_trip() {
        for n in 4..=7 {
            let t = GroupTable::builtin(n).unwrap();
            let back = GroupTable::from_json(&t.to_json()).unwrap();
            assert_eq!(back, t);
            assert_eq!(back.g1().names(), t.g1().names());
        }
    }

    #[test]
    fn rejects_order_four_whitehead_element() {
        let doc = r#"{"n": 5, "g1_orders": [4], "g2_orders": [], "eta_push": [],
                      "whitehead_eta": [1], "hopf_h": [[0]]}"#;
        let err = GroupTable::from_json(doc).unwrap_err();
        assert!(matches!(err, TableError::NotTwoTorsion(_, 4)));
        assert!(err.to_string().contains("whitehead_eta must be 2-torsion"));
    }

    #[test]
    fn rejects_nonzero_whitehead_element_when_forced() {
        let doc = r#"{"n": 8, "g1_orders": [2], "g2_orders": [], "eta_push": [],
                      "whitehead_eta": [1], "hopf_h": [[0]]}"#;
        let err = GroupTable::from_json(doc).unwrap_err();
        assert!(err.to_string().contains("4 | n forces zero"));

        let doc = doc.replace("\"n\": 8", "\"n\": 7");
        assert!(GroupTable::from_json(&doc)
            .unwrap_err()
            .to_string()
            .contains("n = 7"));
    }

    #[test]
    fn rejects_malformed_documents() {
        // eta_push image length does not match g1
        let doc = r#"{"n": 9, "g1_orders": [2], "g2_orders": [2], "eta_push": [[1, 0]],
                      "whitehead_eta": [0], "hopf_h": [[0]]}"#;
        assert!(matches!(
            GroupTable::from_json(doc),
            Err(TableError::Shape {
                field: "eta_push",
                ..
            })
        ));
        // Z/3 -> Z/2 sending the generator to 1 is not a homomorphism
        let doc = r#"{"n": 9, "g1_orders": [3], "g2_orders": [], "eta_push": [],
                      "whitehead_eta": [0], "hopf_h": [[1]]}"#;
        assert!(matches!(
            GroupTable::from_json(doc),
            Err(TableError::IllDefined {
                field: "hopf_h",
                ..
            })
        ));
        let doc = r#"{"n": 9, "g1_orders": [0], "g2_orders": [], "eta_push": [],
                      "whitehead_eta": [0], "hopf_h": [[0]]}"#;
        assert_eq!(
            GroupTable::from_json(doc),
            Err(TableError::InfiniteGroup { group: "g1" })
        );
        assert!(matches!(
            GroupTable::from_json("{}"),
            Err(TableError::Json(_))
        ));
        assert_eq!(
            GroupTable::new(
                3,
                AbGroup::trivial(),
                AbGroup::trivial(),
                vec![],
                vec![],
                vec![]
            ),
            Err(TableError::SmallN(3))
        );
    }
}
