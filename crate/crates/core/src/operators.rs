//! Dense complex operators on the qubit ⊗ qubit ⊗ cavity Hilbert space.
//!
//! Basis ordering is fixed throughout the crate: slot 0 is qubit 1, slot 1
//! is qubit 2, slot 2 is the cavity. Qubit levels are ordered `(g, e)`, so
//! `σ^z = diag(-1, +1)` and `σ⁺|g⟩ = |e⟩`. Row-major storage, the last slot
//! varies fastest.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Slot of qubit 1 in the full layout.
pub const QUBIT1: usize = 0;
/// Slot of qubit 2 in the full layout.
pub const QUBIT2: usize = 1;
/// Slot of the cavity mode in the full layout.
pub const CAVITY: usize = 2;

/// Square complex matrix that remembers how its space factorizes.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl OperatorMatrix {
    pub fn zeros(dims: &[usize]) -> Self {
        let dim = dims.iter().product();
        assert!(dim > 0, "empty Hilbert space");
        Self {
            dim,
            dims: dims.to_vec(),
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let mut out = Self::zeros(dims);
        for k in 0..out.dim {
            out.data[k * out.dim + k] = ONE;
        }
        out
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = Self::zeros(dims);
        let n = out.dim;
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = f(r, c);
            }
        }
        out
    }

    /// Builds from row-major entries; `entries.len()` must be `dim²`.
    pub fn from_entries(dims: &[usize], entries: Vec<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            dim,
            dims: dims.to_vec(),
            data: entries,
        })
    }

    pub fn from_real_diagonal(dims: &[usize], diag: &[f64]) -> Self {
        let mut out = Self::zeros(dims);
        assert_eq!(diag.len(), out.dim);
        for (k, &d) in diag.iter().enumerate() {
            out.data[k * out.dim + k] = C64::new(d, 0.0);
        }
        out
    }

    /// `|ψ⟩⟨φ|`.
    pub fn outer(dims: &[usize], ket: &[C64], bra: &[C64]) -> Self {
        Self::from_fn(dims, |r, c| ket[r] * bra[c].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.data
    }

    /// Relabels the factorization; the product must stay the same.
    pub fn with_subsystem_dims(mut self, dims: &[usize]) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        self.dims = dims.to_vec();
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(&self.dims, |r, c| self.data[c * n + r].conj())
    }

    /// Entrywise complex conjugate in the product basis.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(&self.dims, |r, c| self.data[c * n + r])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.data[k * self.dim + k]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let row = &mut out[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self {
            dim: n,
            dims: self.dims.clone(),
            data: out,
        }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    pub fn apply(&self, ket: &[C64]) -> Vec<C64> {
        assert_eq!(ket.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.data[r * n..(r + 1) * n]
                    .iter()
                    .zip(ket)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `⟨bra|A|ket⟩`.
    pub fn matrix_element(&self, bra: &[C64], ket: &[C64]) -> C64 {
        bra.iter()
            .zip(self.apply(ket))
            .map(|(b, k)| b.conj() * k)
            .sum()
    }

    /// `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A − A†|` elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let d = (self.data[r * n + c] - self.data[c * n + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        Self::from_fn(&self.dims, |r, c| {
            0.5 * (self.data[r * n + c] + self.data[c * n + r].conj())
        })
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.hermitian_part().to_dmatrix());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Eigen-decomposition of the Hermitian part: ascending eigenvalues and
    /// the matching eigenvectors as columns.
    pub fn hermitian_eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = SymmetricEigen::new(self.hermitian_part().to_dmatrix());
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vecs = DMatrix::from_fn(self.dim, self.dim, |r, c| eig.eigenvectors[(r, order[c])]);
        (vals, vecs)
    }

    /// Applies a real function to the spectrum of the Hermitian part.
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.hermitian_eigh();
        let n = self.dim;
        let fv: Vec<f64> = vals.into_iter().map(f).collect();
        Self::from_fn(&self.dims, |r, c| {
            (0..n)
                .map(|k| vecs[(r, k)] * fv[k] * vecs[(c, k)].conj())
                .sum()
        })
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |r, c| self.data[r * n + c])
    }

    pub fn from_dmatrix(dims: &[usize], m: &DMatrix<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        Ok(Self::from_fn(dims, |r, c| m[(r, c)]))
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix {:?} (dim {})", self.dims, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        OperatorMatrix {
            dim: self.dim,
            dims: self.dims.clone(),
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        OperatorMatrix {
            dim: self.dim,
            dims: self.dims.clone(),
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&OperatorMatrix> for OperatorMatrix {
    fn add_assign(&mut self, rhs: &OperatorMatrix) {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

impl Mul<&OperatorMatrix> for f64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        rhs.scale_real(self)
    }
}

impl Mul<&OperatorMatrix> for C64 {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

/// Truncated bosonic lowering operator on `n_levels` Fock states.
pub fn annihilation(n_levels: usize) -> Result<OperatorMatrix> {
    if n_levels < 2 {
        return Err(Error::InvalidDimension(n_levels));
    }
    let mut a = OperatorMatrix::zeros(&[n_levels]);
    for k in 0..n_levels - 1 {
        a.set(k, k + 1, C64::new(((k + 1) as f64).sqrt(), 0.0));
    }
    Ok(a)
}

pub fn creation(n_levels: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(n_levels)?.adjoint())
}

pub fn number(n_levels: usize) -> Result<OperatorMatrix> {
    let a = annihilation(n_levels)?;
    Ok(a.adjoint().matmul(&a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// σ⁺ = |e⟩⟨g|
    Plus,
    /// σ⁻ = |g⟩⟨e|
    Minus,
    Identity,
}

/// Single-qubit operator in the `(g, e)` basis.
pub fn pauli(which: Pauli) -> OperatorMatrix {
    let z = ZERO;
    let o = ONE;
    let entries = match which {
        Pauli::X => [z, o, o, z],
        // σ^y = −i(σ⁺ − σ⁻), so that σ^± = (σ^x ± iσ^y)/2
        Pauli::Y => [z, I, -I, z],
        Pauli::Z => [-o, z, z, o],
        Pauli::Plus => [z, z, o, z],
        Pauli::Minus => [z, o, z, z],
        Pauli::Identity => [o, z, z, o],
    };
    OperatorMatrix::from_entries(&[2], entries.to_vec()).expect("2x2 literal")
}

/// `|e⟩⟨e|` on one qubit.
pub fn excited_projector() -> OperatorMatrix {
    OperatorMatrix::from_real_diagonal(&[2], &[0.0, 1.0])
}

pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut data = vec![ZERO; n * n];
    for ar in 0..na {
        for ac in 0..na {
            let x = a.data[ar * na + ac];
            if x == ZERO {
                continue;
            }
            for br in 0..nb {
                let row = (ar * nb + br) * n + ac * nb;
                for bc in 0..nb {
                    data[row + bc] = x * b.data[br * nb + bc];
                }
            }
        }
    }
    OperatorMatrix { dim: n, dims, data }
}

/// Places `op` on `slot` of `layout` with identities elsewhere.
pub fn embed(op: &OperatorMatrix, slot: usize, layout: &[usize]) -> Result<OperatorMatrix> {
    if slot >= layout.len() {
        return Err(Error::InvalidSlot {
            slot,
            slots: layout.len(),
        });
    }
    if op.dim != layout[slot] {
        return Err(Error::InvalidEmbedding {
            slot,
            expected: layout[slot],
            found: op.dim,
        });
    }
    let mut out: Option<OperatorMatrix> = None;
    for (k, &d) in layout.iter().enumerate() {
        let factor = if k == slot {
            op.clone().with_subsystem_dims(&[d])?
        } else {
            OperatorMatrix::identity(&[d])
        };
        out = Some(match out {
            None => factor,
            Some(acc) => kron(&acc, &factor),
        });
    }
    Ok(out.expect("layout is nonempty"))
}

/// Reduced operator on the `keep` slots (order follows the layout).
pub fn partial_trace(rho: &OperatorMatrix, keep: &[usize]) -> Result<OperatorMatrix> {
    let dims = rho.subsystem_dims();
    if keep.is_empty() {
        return Err(Error::InvalidState("partial trace must keep at least one slot".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::InvalidSlot {
            slot: bad,
            slots: dims.len(),
        });
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&s| dims[s]).collect();
    let n = rho.dim;

    // Split every full index into (kept index, traced index).
    let mut kept_of = vec![0usize; n];
    let mut traced_of = vec![0usize; n];
    for full in 0..n {
        let mut rem = full;
        let mut digits = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let (mut ki, mut ti) = (0usize, 0usize);
        for (s, &d) in digits.iter().enumerate() {
            if kept.binary_search(&s).is_ok() {
                ki = ki * dims[s] + d;
            } else {
                ti = ti * dims[s] + d;
            }
        }
        kept_of[full] = ki;
        traced_of[full] = ti;
    }

    let mut out = OperatorMatrix::zeros(&kept_dims);
    let m = out.dim;
    for r in 0..n {
        for c in 0..n {
            if traced_of[r] == traced_of[c] {
                out.data[kept_of[r] * m + kept_of[c]] += rho.data[r * n + c];
            }
        }
    }
    Ok(out)
}

/// Computational basis ket for the given per-slot level indices.
pub fn basis_ket(layout: &[usize], levels: &[usize]) -> Result<Vec<C64>> {
    if layout.len() != levels.len() {
        return Err(Error::DimensionMismatch {
            expected: layout.len(),
            found: levels.len(),
        });
    }
    let dim: usize = layout.iter().product();
    let mut idx = 0usize;
    for (s, (&d, &l)) in layout.iter().zip(levels).enumerate() {
        if l >= d {
            return Err(Error::InvalidSlot { slot: s, slots: d });
        }
        idx = idx * d + l;
    }
    let mut ket = vec![ZERO; dim];
    ket[idx] = ONE;
    Ok(ket)
}

pub fn kron_ket(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within the tolerances below.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix(OperatorMatrix);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const EIGEN_TOL: f64 = 1e-7;

    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = op.hermitian_eigenvalues()[0];
        if min < -Self::EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(op))
    }

    /// Wraps without validation; used on integrator output, whose validity
    /// is tracked by diagnostics instead.
    pub(crate) fn from_operator_unchecked(op: OperatorMatrix) -> Self {
        Self(op)
    }

    /// `|ψ⟩⟨ψ|` after normalizing ψ.
    pub fn from_pure(dims: &[usize], ket: &[C64]) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if ket.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: ket.len(),
            });
        }
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self(OperatorMatrix::outer(dims, &psi, &psi)))
    }

    pub fn product(factors: &[&DensityMatrix]) -> Self {
        let mut it = factors.iter();
        let first = it.next().expect("at least one factor").0.clone();
        Self(it.fold(first, |acc, f| kron(&acc, &f.0)))
    }

    pub fn as_operator(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_operator(self) -> OperatorMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let n = self.0.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.0.data[r * n + c] * self.0.data[c * n + r]).re;
            }
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.hermitian_eigenvalues()[0]
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> C64 {
        let n = self.0.dim;
        assert_eq!(op.dim, n);
        let mut acc = ZERO;
        for r in 0..n {
            for c in 0..n {
                acc += self.0.data[r * n + c] * op.data[c * n + r];
            }
        }
        acc
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(&self.0, keep).map(Self)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({:?})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn annihilation_small_cases() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.entries(), &[ZERO, ONE, ZERO, ZERO]);
        let a3 = annihilation(3).unwrap();
        assert_eq!(a3.get(1, 2), c(2f64.sqrt()));
        assert_eq!(a3.subsystem_dims(), &[3]);
        let n = number(4).unwrap();
        for k in 0..4 {
            assert!((n.get(k, k) - c(k as f64)).norm() < 1e-15);
        }
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn truncated_commutator() {
        for n in 2..8 {
            let a = annihilation(n).unwrap();
            let comm = a.commutator(&a.adjoint());
            for r in 0..n {
                for col in 0..n {
                    let expected = if r != col {
                        0.0
                    } else if r + 1 < n {
                        1.0
                    } else {
                        -((n - 1) as f64)
                    };
                    assert!((comm.get(r, col) - c(expected)).norm() < 1e-13, "n={n} ({r},{col})");
                }
            }
        }
    }

    #[test]
    fn pauli_conventions() {
        let g = vec![ONE, ZERO];
        let e = vec![ZERO, ONE];
        let z = pauli(Pauli::Z);
        assert_eq!(z.apply(&e), e);
        assert_eq!(z.apply(&g), vec![-ONE, ZERO]);
        assert_eq!(pauli(Pauli::Plus).apply(&g), e);
        assert_eq!(pauli(Pauli::Minus).apply(&e), g);
        assert_eq!(
            &pauli(Pauli::Plus) + &pauli(Pauli::Minus),
            pauli(Pauli::X)
        );
        // σ^± = (σ^x ± iσ^y)/2
        let plus = (&pauli(Pauli::X) + &pauli(Pauli::Y).scale(I)).scale_real(0.5);
        assert_eq!(plus, pauli(Pauli::Plus));
        let y = pauli(Pauli::Y);
        assert_eq!(y.matmul(&y), pauli(Pauli::Identity));
    }

    #[test]
    fn kron_bookkeeping() {
        let i2 = OperatorMatrix::identity(&[2]);
        assert_eq!(kron(&i2, &i2), OperatorMatrix::identity(&[2, 2]));
        let k = kron(&i2, &OperatorMatrix::identity(&[3]));
        assert_eq!(k.subsystem_dims(), &[2, 3]);
        assert_eq!(k.dim(), 6);

        let zi = kron(&pauli(Pauli::Z), &i2);
        let eg = basis_ket(&[2, 2], &[1, 0]).unwrap();
        assert_eq!(zi.apply(&eg), eg);
    }

    #[test]
    fn embed_matches_explicit_kron() {
        let layout = [2, 2, 3];
        let x = pauli(Pauli::X);
        let expected = kron(
            &kron(&x, &OperatorMatrix::identity(&[2])),
            &OperatorMatrix::identity(&[3]),
        );
        assert_eq!(embed(&x, 0, &layout).unwrap(), expected);

        let a = embed(&annihilation(3).unwrap(), 2, &layout).unwrap();
        let z = embed(&pauli(Pauli::Z), 0, &layout).unwrap();
        assert_eq!(a.commutator(&z).max_abs(), 0.0);

        for slot in 0..3 {
            let id = OperatorMatrix::identity(&[layout[slot]]);
            assert_eq!(
                embed(&id, slot, &layout).unwrap(),
                OperatorMatrix::identity(&layout)
            );
        }
        assert!(matches!(
            embed(&x, 2, &layout),
            Err(Error::InvalidEmbedding { slot: 2, .. })
        ));
        assert!(matches!(embed(&x, 3, &layout), Err(Error::InvalidSlot { .. })));
    }

    #[test]
    fn partial_trace_of_products() {
        let layout = [2, 2, 3];
        let gg0 = basis_ket(&layout, &[0, 0, 0]).unwrap();
        let rho = DensityMatrix::from_pure(&layout, &gg0).unwrap();
        let red = rho.partial_trace(&[0, 1]).unwrap();
        let gg = basis_ket(&[2, 2], &[0, 0]).unwrap();
        assert_eq!(red.as_operator(), &OperatorMatrix::outer(&[2, 2], &gg, &gg));

        let rho_a = OperatorMatrix::from_entries(
            &[2],
            vec![c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)],
        )
        .unwrap();
        let rho_b = OperatorMatrix::from_real_diagonal(&[3], &[0.5, 0.25, 0.25]);
        let joint = kron(&rho_a, &rho_b);
        let back = partial_trace(&joint, &[0]).unwrap();
        assert!(back.max_abs_diff(&rho_a) < 1e-15);
        let back_b = partial_trace(&joint, &[1]).unwrap();
        assert!(back_b.max_abs_diff(&rho_b) < 1e-15);

        assert!(matches!(
            partial_trace(&joint, &[4]),
            Err(Error::InvalidSlot { slot: 4, .. })
        ));
        assert!(partial_trace(&joint, &[]).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let bad = OperatorMatrix::from_real_diagonal(&[2], &[0.5, 0.6]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = OperatorMatrix::from_real_diagonal(&[2], &[1.1, -0.1]);
        assert!(DensityMatrix::new(neg).is_err());
        let mut nh = OperatorMatrix::from_real_diagonal(&[2], &[0.5, 0.5]);
        nh.set(0, 1, c(0.1));
        assert!(matches!(DensityMatrix::new(nh), Err(Error::NotHermitian(_))));
        let ok = OperatorMatrix::from_real_diagonal(&[2], &[0.25, 0.75]);
        let rho = DensityMatrix::new(ok).unwrap();
        assert!((rho.purity() - 0.625).abs() < 1e-15);
    }
}
