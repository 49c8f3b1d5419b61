//! Exact integer linear algebra over `BigInt`: row Hermite normal form,
//! integer solutions of `A·X = B` as an affine lattice, and congruence
//! feasibility on such a lattice.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus must be positive, got {0}")]
    Modulus(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols {
            return Err(LatticeError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from `i64` rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, LatticeError> {
        IntMatrix::new(
            rows,
            cols,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn column(v: &[BigInt]) -> Self {
        IntMatrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        Ok(self.mul(&IntMatrix::column(v))?.entries)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m[(r, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let (h, _) = hnf(self);
        (0..h.rows)
            .filter(|&i| h.row(i).iter().any(|x| !x.is_zero()))
            .count()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] := x·row[dst] + y·row[src]`, `row[src] := u·row[dst] + v·row[src]`
    /// (simultaneously).
    fn combine_rows(
        &mut self,
        dst: usize,
        src: usize,
        x: &BigInt,
        y: &BigInt,
        u: &BigInt,
        v: &BigInt,
    ) {
        for j in 0..self.cols {
            let a = self[(dst, j)].clone();
            let b = self[(src, j)].clone();
            self[(dst, j)] = x * &a + y * &b;
            self[(src, j)] = u * &a + v * &b;
        }
    }

    /// `row[dst] -= q·row[src]`
    fn sub_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = q * &self[(src, j)];
            self[(dst, j)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -&self[(i, j)];
            self[(i, j)] = t;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Row Hermite normal form. Returns `(H, U)` with `U` unimodular and
/// `H = U·A`; `H` is upper echelon, pivots are positive and entries above a
/// pivot lie in `[0, pivot)`.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut p = 0;
    for c in 0..h.cols {
        if p == h.rows {
            break;
        }
        for r in p + 1..h.rows {
            if h[(r, c)].is_zero() {
                continue;
            }
            let a = h[(p, c)].clone();
            let b = h[(r, c)].clone();
            let e = a.extended_gcd(&b);
            let (x, y) = (e.x, e.y);
            let u_coef = -(&b / &e.gcd);
            let v_coef = &a / &e.gcd;
            h.combine_rows(p, r, &x, &y, &u_coef, &v_coef);
            u.combine_rows(p, r, &x, &y, &u_coef, &v_coef);
        }
        if h[(p, c)].is_zero() {
            continue;
        }
        if h[(p, c)].is_negative() {
            h.negate_row(p);
            u.negate_row(p);
        }
        let pivot = h[(p, c)].clone();
        for r in 0..p {
            let q = h[(r, c)].div_floor(&pivot);
            if !q.is_zero() {
                h.sub_row_multiple(r, p, &q);
                u.sub_row_multiple(r, p, &q);
            }
        }
        p += 1;
    }
    (h, u)
}

/// `particular + span_Z(basis)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLattice {
    pub particular: Vec<BigInt>,
    pub basis: Vec<Vec<BigInt>>,
}

impl AffineLattice {
    pub fn dim(&self) -> usize {
        self.particular.len()
    }

    /// `particular + Σ coeffs[j]·basis[j]`
    pub fn point(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let mut v = self.particular.clone();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        v
    }
}

/// All integer solutions of `A·X = B`. The unknown `X` has `A.cols()` rows
/// and `B.cols()` columns and is stacked column by column into one vector.
/// Returns `Ok(None)` when no integer solution exists.
pub fn solve_linear(a: &IntMatrix, b: &IntMatrix) -> Result<Option<AffineLattice>, LatticeError> {
    if a.rows != b.rows {
        return Err(LatticeError::Dimension(format!(
            "A has {} rows but B has {}",
            a.rows, b.rows
        )));
    }
    let n = a.cols;
    // U·Aᵀ = H, so A·Uᵀ = Hᵀ and X = Uᵀ·Y turns the system into Hᵀ·Y = B.
    let (h, u) = hnf(&a.transpose());
    let pivots: Vec<usize> = (0..h.rows)
        .map_while(|i| h.row(i).iter().position(|x| !x.is_zero()))
        .collect();
    let r = pivots.len();

    let mut particular = Vec::with_capacity(n * b.cols);
    let mut basis = Vec::new();
    for bc in 0..b.cols {
        let rhs = b.col(bc);
        let mut y = vec![BigInt::zero(); n];
        for (l, &pc) in pivots.iter().enumerate() {
            let mut acc = rhs[pc].clone();
            for (i, yi) in y.iter().enumerate().take(l) {
                acc -= &h[(i, pc)] * yi;
            }
            let (q, rem) = acc.div_rem(&h[(l, pc)]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[l] = q;
        }
        // remaining equations must hold
        for (c, target) in rhs.iter().enumerate() {
            let mut acc = BigInt::zero();
            for (i, yi) in y.iter().enumerate().take(r) {
                acc += &h[(i, c)] * yi;
            }
            if &acc != target {
                return Ok(None);
            }
        }
        // X column = Uᵀ·y
        for j in 0..n {
            let mut x = BigInt::zero();
            for (i, yi) in y.iter().enumerate().take(r) {
                x += &u[(i, j)] * yi;
            }
            particular.push(x);
        }
        for l in r..n {
            let mut v = vec![BigInt::zero(); n * b.cols];
            v[bc * n..(bc + 1) * n].clone_from_slice(u.row(l));
            basis.push(v);
        }
    }
    Ok(Some(AffineLattice { particular, basis }))
}

/// Finds `v` in `sol` with `L·v ≡ c (mod q)`, or `Ok(None)` when no such
/// point exists.
///
/// Decided exactly by solving `L·B·t + q·s = c - L·p` over the integers,
/// where `p` and `B` are the particular point and basis of `sol`. The
/// returned witness has every lattice coordinate `t_j` reduced into `[0, q)`.
pub fn coset_congruence_feasible(
    sol: &AffineLattice,
    l: &IntMatrix,
    c: &[BigInt],
    q: &BigInt,
) -> Result<Option<Vec<BigInt>>, LatticeError> {
    if !q.is_positive() {
        return Err(LatticeError::Modulus(q.clone()));
    }
    if l.cols != sol.dim() || l.rows != c.len() {
        return Err(LatticeError::Dimension(format!(
            "L is {}x{}, lattice dimension {}, {} residues",
            l.rows,
            l.cols,
            sol.dim(),
            c.len()
        )));
    }
    let nb = sol.basis.len();
    let lp = l.mul_vec(&sol.particular)?;
    let rhs: Vec<BigInt> = c.iter().zip(&lp).map(|(ci, x)| ci - x).collect();

    let mut ext = IntMatrix::zeros(l.rows, nb + l.rows);
    for (j, bv) in sol.basis.iter().enumerate() {
        let lb = l.mul_vec(bv)?;
        for (i, x) in lb.into_iter().enumerate() {
            ext[(i, j)] = x;
        }
    }
    for i in 0..l.rows {
        ext[(i, nb + i)] = q.clone();
    }
    let Some(s) = solve_linear(&ext, &IntMatrix::column(&rhs))? else {
        return Ok(None);
    };
    let t: Vec<BigInt> = s.particular[..nb].iter().map(|x| x.mod_floor(q)).collect();
    Ok(Some(sol.point(&t)))
}
