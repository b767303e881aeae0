use super::SolverError;

/// Accumulates `(row, col, value)` contributions before compression.
#[derive(Debug, Clone, Default)]
pub struct TripletList {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletList {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, cap: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row, col, value));
    }

    /// Adds `scale · m` with `m`'s origin at `(row_offset, col_offset)`.
    pub fn add_block(&mut self, m: &SparseMatrix, row_offset: usize, col_offset: usize, scale: f64) {
        if scale == 0.0 {
            return;
        }
        for i in 0..m.n_rows() {
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                self.entries.push((row_offset + i, col_offset + j, scale * v));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> Result<SparseMatrix, SolverError> {
        SparseMatrix::from_triplets(self.n_rows, self.n_cols, self.entries)
    }
}

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Sums duplicate entries. Duplicates are added in ascending value order,
    /// so the stored matrix is bitwise independent of the input order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, SolverError> {
        let triplets: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        // bucket by row (counting sort), then sort each row
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, c, _) in &triplets {
            if r >= n_rows || c >= n_cols {
                return Err(SolverError::IndexOutOfRange { row: r, col: c, n_rows, n_cols });
            }
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut bucket = vec![(0usize, 0.0f64); triplets.len()];
        for (r, c, v) in triplets {
            bucket[next[r]] = (c, v);
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..n_rows {
            let row = &mut bucket[counts[r]..counts[r + 1]];
            row.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut sum = 0.0;
                while k < row.len() && row[k].0 == c {
                    sum += row[k].1;
                    k += 1;
                }
                col_idx.push(c);
                values.push(sum);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { n_rows, n_cols, row_ptr, col_idx, values, symmetric: false })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            symmetric: false,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Advisory flag; set by assemblers that know the operator is symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn with_symmetric_flag(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `y += scale · A x`
    pub fn mul_vec_add(&self, x: &[f64], scale: f64, y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            *yi += scale * s;
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: counts,
            col_idx,
            values,
            symmetric: self.symmetric,
        }
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        d
    }

    /// Symmetric elimination of constrained DOFs: their rows and columns are
    /// removed and replaced by a unit diagonal.
    /// `diag(scale) · A`; clears the symmetry flag.
    pub fn scale_rows(&self, scale: &[f64]) -> SparseMatrix {
        assert_eq!(scale.len(), self.n_rows);
        let mut out = self.clone();
        for (i, &c) in scale.iter().enumerate() {
            for v in &mut out.values[self.row_ptr[i]..self.row_ptr[i + 1]] {
                *v *= c;
            }
        }
        out.symmetric = false;
        out
    }

    pub fn eliminate(&self, constrained: &[bool]) -> SparseMatrix {
        assert_eq!(self.n_rows, self.n_cols);
        assert_eq!(constrained.len(), self.n_rows);
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for i in 0..self.n_rows {
            if constrained[i] {
                col_idx.push(i);
                values.push(1.0);
            } else {
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    if !constrained[j] {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr,
            col_idx,
            values,
            symmetric: self.symmetric,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_summed() {
        let a = SparseMatrix::from_triplets(1, 1, [(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn empty_stream() {
        let a = SparseMatrix::from_triplets(3, 2, std::iter::empty()).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.to_dense(), vec![vec![0.0; 2]; 3]);
    }

    #[test]
    fn out_of_range() {
        let err = SparseMatrix::from_triplets(2, 2, [(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, SolverError::IndexOutOfRange { row: 0, col: 2, .. }));
    }

    #[test]
    fn transpose_and_multiply() {
        let a = SparseMatrix::from_triplets(2, 3, [(0, 0, 1.0), (0, 2, 2.0), (1, 1, -3.0)]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, -3.0]);
        let at = a.transpose();
        assert_eq!(at.n_rows(), 3);
        assert_eq!(at.get(2, 0), 2.0);
        assert_eq!(at.transpose(), a);
    }

    #[test]
    fn elimination_pins_rows_and_columns() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            [(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)],
        )
        .unwrap();
        let e = a.eliminate(&[false, true, false]);
        assert_eq!(e.to_dense(), vec![vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
    }

    proptest! {
        #[test]
        fn assembly_is_order_independent(
            entries in prop::collection::vec((0usize..6, 0usize..6, -1e3f64..1e3), 0..80),
            seed in any::<u64>(),
        ) {
            let sorted = {
                let mut s = entries.clone();
                s.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
                s
            };
            // deterministic shuffle
            let mut shuffled = entries.clone();
            let mut state = seed | 1;
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                shuffled.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let a = SparseMatrix::from_triplets(6, 6, sorted).unwrap();
            let b = SparseMatrix::from_triplets(6, 6, shuffled).unwrap();
            prop_assert_eq!(a.row_ptr(), b.row_ptr());
            prop_assert_eq!(a.col_idx(), b.col_idx());
            let bits = |m: &SparseMatrix| m.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a), bits(&b));
            for i in 0..6 {
                let cols = a.row(i).0;
                prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
