//! Compressed-row sparse matrices and reusable sparse factorizations.
//!
//! All system matrices of the time steppers are time-invariant, so each is
//! factored once and back-substituted every step. Matrices flagged symmetric
//! are factored as LDLᵀ without pivoting (exact for the quasi-definite
//! saddle-point systems used here), with a residual check that falls back to
//! LU if the factors are inaccurate.

mod sparse;

pub use sparse::{SparseMatrix, TripletList};

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::prelude::*;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, LdltRef, SymbolicCholesky, SymmetricOrdering};
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Conj, MatMut, Par, Side};
use log::debug;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("entry ({row}, {col}) outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("matrix is {n_rows}x{n_cols}, expected a square matrix")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("singular matrix: zero pivot at row/column {index}")]
    Singular { index: usize },
    #[error("right-hand side has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("factorization failed: {0}")]
    Backend(String),
}

/// Relative residual of the probe solve above which LDLᵀ is abandoned.
const LDLT_PROBE_TOL: f64 = 1e-10;

enum Factors {
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
    Ldlt { symbolic: SymbolicCholesky<usize>, values: Vec<f64> },
}

/// Sparse LU with partial pivoting and fill-reducing column ordering, or
/// LDLᵀ with AMD ordering for matrices flagged symmetric.
pub struct Factorization {
    factors: Factors,
    n: usize,
    row_scale: Option<Vec<f64>>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.factors {
            Factors::Lu(_) => "LU",
            Factors::Ldlt { .. } => "LDLT",
        };
        f.debug_struct("Factorization").field("n", &self.n).field("kind", &kind).finish_non_exhaustive()
    }
}

pub fn factorize(a: &SparseMatrix) -> Result<Factorization, SolverError> {
    let n = a.n_rows();
    if n != a.n_cols() {
        return Err(SolverError::NotSquare { n_rows: n, n_cols: a.n_cols() });
    }
    // a structurally empty row or column is an immediate zero pivot
    let mut col_used = vec![false; n];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let mut any = false;
        for (&j, &v) in cols.iter().zip(vals) {
            if v != 0.0 {
                any = true;
                col_used[j] = true;
            }
        }
        if !any {
            return Err(SolverError::Singular { index: i });
        }
    }
    if let Some(j) = col_used.iter().position(|&u| !u) {
        return Err(SolverError::Singular { index: j });
    }

    let probe = a.mul_vec(&vec![1.0; n]);
    if a.is_symmetric() {
        if let Some(factors) = ldlt(a) {
            let fact = Factorization { factors, n, row_scale: None };
            let x = fact.solve_unchecked(&probe);
            let res = probe_residual(a, &x, &probe);
            if res < LDLT_PROBE_TOL {
                return Ok(fact);
            }
            debug!("LDLT probe residual {res:e} on n = {n}; falling back to LU");
        }
    }

    // the CSR arrays of Aᵀ are the CSC arrays of A
    let at = a.transpose();
    let symbolic = SymbolicSparseColMat::new_checked(n, n, at.row_ptr().to_vec(), None, at.col_idx().to_vec());
    let csc = SparseColMat::new(symbolic, at.values().to_vec());
    let lu = csc.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => SolverError::Singular { index },
        LuError::Generic(g) => SolverError::Backend(format!("{g:?}")),
    })?;
    let fact = Factorization { factors: Factors::Lu(lu), n, row_scale: None };

    // numerically zero pivots surface as non-finite solution entries
    let x = fact.solve_unchecked(&probe);
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::Singular { index });
    }
    Ok(fact)
}

/// Max-norm relative residual; infinite if `x` is not finite.
fn probe_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    if x.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let mut r = b.to_vec();
    a.mul_vec_add(x, -1.0, &mut r);
    let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / bn.max(f64::MIN_POSITIVE)
}

fn ldlt(a: &SparseMatrix) -> Option<Factors> {
    let n = a.n_rows();
    // the lower triangle in CSR is the upper triangle in CSC
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut vals = Vec::new();
    col_ptr.push(0);
    for i in 0..n {
        let (cols, v) = a.row(i);
        for (&j, &x) in cols.iter().zip(v) {
            if j <= i {
                row_idx.push(j);
                vals.push(x);
            }
        }
        col_ptr.push(row_idx.len());
    }
    let upper = SparseColMat::new(SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx), vals);
    let symbolic =
        factorize_symbolic_cholesky(upper.symbolic(), Side::Upper, SymmetricOrdering::Amd, Default::default()).ok()?;
    let mut values = vec![0.0; symbolic.len_val()];
    let mut mem = MemBuffer::new(symbolic.factorize_numeric_ldlt_scratch::<f64>(Par::Seq, Default::default()));
    symbolic
        .factorize_numeric_ldlt(
            &mut values,
            upper.as_ref(),
            Side::Upper,
            LdltRegularization::default(),
            Par::Seq,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .ok()?;
    Some(Factors::Ldlt { symbolic, values })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// For factors of `diag(s) · A`: subsequent solves scale the right-hand
    /// side by `s`, so they solve with `A` itself.
    pub fn with_row_scale(mut self, s: Vec<f64>) -> Self {
        assert_eq!(s.len(), self.n);
        self.row_scale = Some(s);
        self
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.factors, Factors::Ldlt { .. })
    }

    fn solve_unchecked(&self, rhs: &[f64]) -> Vec<f64> {
        match &self.factors {
            Factors::Lu(lu) => lu.solve(ColRef::from_slice(rhs)).iter().copied().collect(),
            Factors::Ldlt { symbolic, values } => {
                let mut x = rhs.to_vec();
                let mut mem = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
                LdltRef::new(symbolic, values).solve_in_place_with_conj(
                    Conj::No,
                    MatMut::from_column_major_slice_mut(&mut x, self.n, 1),
                    Par::Seq,
                    MemStack::new(&mut mem),
                );
                x
            }
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        if rhs.len() != self.n {
            return Err(SolverError::LengthMismatch { expected: self.n, found: rhs.len() });
        }
        if rhs.iter().all(|&v| v == 0.0) {
            return Ok(vec![0.0; self.n]);
        }
        match &self.row_scale {
            Some(s) => Ok(self.solve_unchecked(&rhs.iter().zip(s).map(|(b, c)| b * c).collect::<Vec<_>>())),
            None => Ok(self.solve_unchecked(rhs)),
        }
    }
}
