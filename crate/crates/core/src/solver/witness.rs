use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::lattice::IntMatrix;

use super::SolverError;

/// Coefficient blocks of a map between `(2n-2)`-skeleta. Each block is
/// `k × m`; the upper right block `B` vanishes and is not stored. `C` only
/// matters modulo the table's `C` modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMatrix {
    k: usize,
    m: usize,
    a: Vec<Vec<i64>>,
    c: Vec<Vec<i64>>,
    d: Vec<Vec<i64>>,
}

impl WitnessMatrix {
    pub fn from_blocks(
        a: Vec<Vec<i64>>,
        c: Vec<Vec<i64>>,
        d: Vec<Vec<i64>>,
    ) -> Result<Self, SolverError> {
        let k = a.len();
        let m = a.first().map_or(0, Vec::len);
        let ok = |blk: &Vec<Vec<i64>>| blk.len() == k && blk.iter().all(|r| r.len() == m);
        if k == 0 || m == 0 || !ok(&a) || !ok(&c) || !ok(&d) {
            return Err(SolverError::Shape(
                "blocks must be non-empty k x m matrices".into(),
            ));
        }
        Ok(WitnessMatrix { k, m, a, c, d })
    }

    pub fn zero(k: usize, m: usize) -> Self {
        let z = vec![vec![0; m]; k];
        WitnessMatrix {
            k,
            m,
            a: z.clone(),
            c: z.clone(),
            d: z,
        }
    }

    /// The identity: `A = D = I`, `C = 0`.
    pub fn identity(k: usize) -> Self {
        let mut w = WitnessMatrix::zero(k, k);
        for i in 0..k {
            w.a[i][i] = 1;
            w.d[i][i] = 1;
        }
        w
    }

    pub(crate) fn from_columns(
        k: usize,
        m: usize,
        a: &[Vec<i64>],
        c: &[Vec<i64>],
        d: &[Vec<i64>],
    ) -> Self {
        let rows = |cols: &[Vec<i64>]| {
            (0..k)
                .map(|i| (0..m).map(|t| cols[t][i]).collect())
                .collect()
        };
        WitnessMatrix {
            k,
            m,
            a: rows(a),
            c: rows(c),
            d: rows(d),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a(&self, i: usize, s: usize) -> i64 {
        self.a[i][s]
    }

    pub fn c(&self, i: usize, s: usize) -> i64 {
        self.c[i][s]
    }

    pub fn d(&self, i: usize, s: usize) -> i64 {
        self.d[i][s]
    }

    pub fn a_block(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn c_block(&self) -> &[Vec<i64>] {
        &self.c
    }

    pub fn d_block(&self) -> &[Vec<i64>] {
        &self.d
    }

    pub fn a_col(&self, t: usize) -> Vec<i64> {
        self.a.iter().map(|r| r[t]).collect()
    }

    pub fn c_col(&self, t: usize) -> Vec<i64> {
        self.c.iter().map(|r| r[t]).collect()
    }

    pub fn d_col(&self, t: usize) -> Vec<i64> {
        self.d.iter().map(|r| r[t]).collect()
    }

    /// The full `2k × 2m` matrix `[[A, 0], [C, D]]`.
    pub fn full_matrix(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(2 * self.k, 2 * self.m);
        for i in 0..self.k {
            for s in 0..self.m {
                out[(i, s)] = BigInt::from(self.a[i][s]);
                out[(self.k + i, s)] = BigInt::from(self.c[i][s]);
                out[(self.k + i, self.m + s)] = BigInt::from(self.d[i][s]);
            }
        }
        out
    }
}

fn mat_mul(x: &[Vec<i64>], y: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, SolverError> {
    let inner = y.len();
    let cols = y.first().map_or(0, Vec::len);
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let v: i128 = (0..inner).map(|l| row[l] as i128 * y[l][j] as i128).sum();
                    i64::try_from(v)
                        .map_err(|_| SolverError::Shape("composite entry overflows i64".into()))
                })
                .collect()
        })
        .collect()
}

/// The witness of `Q ∘ P` for `P: X̄ → Ȳ` and `Q: Ȳ → Z̄`, from the
/// transpose-product rule on coefficient matrices:
/// `A = A(P)·A(Q)`, `D = D(P)·D(Q)`, `C = C(P)·A(Q) + D(P)·C(Q)` mod 2.
pub fn compose_witness(p: &WitnessMatrix, q: &WitnessMatrix) -> Result<WitnessMatrix, SolverError> {
    if p.m != q.k {
        return Err(SolverError::Shape(format!(
            "cannot compose a {}x{} witness with a {}x{} witness",
            p.k, p.m, q.k, q.m
        )));
    }
    let a = mat_mul(&p.a, &q.a)?;
    let d = mat_mul(&p.d, &q.d)?;
    let ca = mat_mul(&p.c, &q.a)?;
    let dc = mat_mul(&p.d, &q.c)?;
    let c = ca
        .iter()
        .zip(&dc)
        .map(|(r1, r2)| {
            r1.iter()
                .zip(r2)
                .map(|(x, y)| (x + y).rem_euclid(2))
                .collect()
        })
        .collect();
    Ok(WitnessMatrix {
        k: p.k,
        m: q.m,
        a,
        c,
        d,
    })
}

/// Determinant of the full block matrix, `det A · det D`. Square witnesses
/// only.
pub fn det_star(w: &WitnessMatrix) -> Result<BigInt, SolverError> {
    if w.k != w.m {
        return Err(SolverError::NonSquare { k: w.k, m: w.m });
    }
    let det = |blk: &[Vec<i64>]| IntMatrix::from_rows(blk).det();
    Ok(det(&w.a)? * det(&w.d)?)
}

impl fmt::Display for WitnessMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |blk: &[Vec<i64>]| {
            let rows: Vec<String> = blk
                .iter()
                .map(|r| {
                    format!(
                        "[{}]",
                        r.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
                .collect();
            format!("[{}]", rows.join(", "))
        };
        write!(
            f,
            "A = {}  C = {}  D = {}",
            show(&self.a),
            show(&self.c),
            show(&self.d)
        )
    }
}
