//! Exact sparse Gaussian elimination over [`Scalar`].
//!
//! Columns are plain indices; callers map their own keys (monomials,
//! symbol-monomials) onto indices in canonical order, so the leading-column
//! pivot rule makes every result deterministic.

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Sparse vector, strictly increasing column indices, no explicit zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// `a + factor·b`.
pub fn axpy(a: &[(usize, Scalar)], factor: &Scalar, b: &[(usize, Scalar)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        let ca = a.get(x).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(y).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[x].clone());
            x += 1;
        } else if cb < ca {
            out.push((cb, factor * &b[y].1));
            y += 1;
        } else {
            let v = &a[x].1 + &(factor * &b[y].1);
            if !v.is_zero() {
                out.push((ca, v));
            }
            x += 1;
            y += 1;
        }
    }
    out
}

pub fn scale(a: &[(usize, Scalar)], factor: &Scalar) -> SparseVec {
    a.iter().map(|(c, v)| (*c, v * factor)).collect()
}

/// Builds a sparse vector from unsorted, possibly repeated entries.
pub fn collect_sparse(entries: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
    let mut map = std::collections::BTreeMap::<usize, Scalar>::new();
    for (c, v) in entries {
        *map.entry(c).or_default() += &v;
    }
    map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Row echelon form built incrementally. Every stored row has leading
/// coefficient one at its pivot column.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Eliminates leading entries until the leading column is not a pivot.
    pub fn reduce_leading(&self, mut row: SparseVec) -> SparseVec {
        while let Some((lead, coef)) = row.first().cloned() {
            match self.pivot_row[lead] {
                Some(r) => row = axpy(&row, &-coef, &self.rows[r]),
                None => break,
            }
        }
        row
    }

    /// Eliminates every pivot column from `row`.
    pub fn reduce_full(&self, mut row: SparseVec) -> SparseVec {
        let mut pos = 0;
        while pos < row.len() {
            let (col, coef) = row[pos].clone();
            match self.pivot_row[col] {
                Some(r) => {
                    // pivot rows only touch columns >= their pivot, so
                    // entries before `pos` are unaffected
                    row = axpy(&row, &-coef, &self.rows[r]);
                }
                None => pos += 1,
            }
        }
        row
    }

    /// Adds a row; returns its new pivot column if it was independent.
    pub fn insert(&mut self, row: SparseVec) -> Option<usize> {
        let row = self.reduce_leading(row);
        let (lead, coef) = row.first().cloned()?;
        let inv = coef.inv().expect("nonzero leading coefficient");
        let row = scale(&row, &inv);
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(row);
        Some(lead)
    }

    pub fn rank_of(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> usize {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
            if e.rank() == ncols {
                break;
            }
        }
        e.rank()
    }

    /// Brings the stored rows to reduced row echelon form.
    pub fn make_reduced(&mut self) {
        let pivots = self.pivots();
        for &p in pivots.iter().rev() {
            let r = self.pivot_row[p].unwrap();
            let row = std::mem::take(&mut self.rows[r]);
            // keep the leading entry; reduce the tail against later pivots
            let (head, tail) = row.split_first().map(|(h, t)| (h.clone(), t.to_vec())).unwrap();
            let mut reduced = vec![head];
            reduced.extend(self.reduce_full(tail));
            self.rows[r] = reduced;
        }
    }

    /// Rows ordered by pivot column.
    pub fn rows_by_pivot(&self) -> Vec<&SparseVec> {
        self.pivots()
            .into_iter()
            .map(|p| &self.rows[self.pivot_row[p].unwrap()])
            .collect()
    }

    /// Kernel basis of the stored rows restricted to columns `< limit`,
    /// one vector per free column (increasing). Requires reduced form.
    pub fn kernel(&self, limit: usize) -> Vec<SparseVec> {
        let pivots = self.pivots();
        let mut out = Vec::new();
        for f in (0..limit).filter(|&c| self.pivot_row[c].is_none()) {
            let mut v: SparseVec = pivots
                .iter()
                .filter(|&&p| p < f)
                .filter_map(|&p| {
                    let row = &self.rows[self.pivot_row[p].unwrap()];
                    row.binary_search_by_key(&f, |e| e.0)
                        .ok()
                        .map(|k| (p, -&row[k].1))
                })
                .collect();
            v.push((f, Scalar::one()));
            out.push(v);
        }
        out
    }
}

/// Outcome of solving `A·x = b`.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Basic solution (free variables zero), `None` if inconsistent.
    pub particular: Option<SparseVec>,
    /// Kernel basis of `A`.
    pub kernel: Vec<SparseVec>,
}

/// Solves `A·x = b` for `ncols` unknowns, with `A` given by rows and `b` by
/// the matching right-hand side entries.
pub fn solve_rows(ncols: usize, rows: impl IntoIterator<Item = (SparseVec, Scalar)>) -> Solution {
    let mut e = Echelon::new(ncols + 1);
    for (mut row, rhs) in rows {
        if !rhs.is_zero() {
            row.push((ncols, rhs));
        }
        e.insert(row);
    }
    if e.is_pivot(ncols) {
        e.make_reduced();
        return Solution {
            particular: None,
            kernel: e.kernel(ncols),
        };
    }
    e.make_reduced();
    let particular = e
        .rows_by_pivot()
        .into_iter()
        .filter_map(|row| {
            let p = row[0].0;
            row.last()
                .filter(|(c, _)| *c == ncols)
                .map(|(_, v)| (p, v.clone()))
        })
        .collect();
    Solution {
        particular: Some(particular),
        kernel: e.kernel(ncols),
    }
}

/// Reduced row echelon basis of the span of `vectors`.
pub fn rref_basis(ncols: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.insert(v);
    }
    e.make_reduced();
    e.rows_by_pivot().into_iter().cloned().collect()
}

/// Column-oriented elimination that remembers how each stored vector was
/// combined from the inputs. Used for small systems where residuals and
/// dependency witnesses are wanted.
#[derive(Clone, Debug)]
pub struct TrackedEchelon {
    echelon: Echelon,
    // combination of input ids producing each stored row (same order)
    combos: Vec<SparseVec>,
    inputs: usize,
}

/// Result of inserting into a [`TrackedEchelon`].
#[derive(Clone, Debug)]
pub enum Insert {
    Independent(usize),
    /// The input reduced to zero; the combination of inputs that vanishes,
    /// including the new input with coefficient one.
    Dependent(SparseVec),
}

impl TrackedEchelon {
    pub fn new(ncols: usize) -> Self {
        TrackedEchelon {
            echelon: Echelon::new(ncols),
            combos: Vec::new(),
            inputs: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Reduces `v`, returning the residual and the input combination that
    /// was subtracted (`v − Σ combo·inputs = residual`).
    pub fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut combo: SparseVec = Vec::new();
        let mut pos = 0;
        while pos < v.len() {
            let (col, coef) = v[pos].clone();
            match self.echelon.pivot_row[col] {
                Some(r) => {
                    v = axpy(&v, &-&coef, &self.echelon.rows[r]);
                    combo = axpy(&combo, &coef, &self.combos[r]);
                }
                None => pos += 1,
            }
        }
        (v, combo)
    }

    /// Inserts the next input vector (ids are assigned 0, 1, 2, ...).
    pub fn insert(&mut self, v: SparseVec) -> Insert {
        let id = self.inputs;
        self.inputs += 1;
        let mut v = v;
        let mut combo: SparseVec = vec![(id, Scalar::one())];
        while let Some((lead, coef)) = v.first().cloned() {
            match self.echelon.pivot_row[lead] {
                Some(r) => {
                    v = axpy(&v, &-&coef, &self.echelon.rows[r]);
                    combo = axpy(&combo, &-coef, &self.combos[r]);
                }
                None => break,
            }
        }
        match v.first().cloned() {
            None => Insert::Dependent(combo),
            Some((lead, coef)) => {
                let inv = coef.inv().unwrap();
                self.echelon.pivot_row[lead] = Some(self.echelon.rows.len());
                self.echelon.rows.push(scale(&v, &inv));
                self.combos.push(scale(&combo, &inv));
                Insert::Independent(lead)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(c, x)| (c, Scalar::from_int(x))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        // x0 + x1 = 0, x1 + x2 = 0 over three unknowns
        let mut e = Echelon::new(3);
        e.insert(v(&[(0, 1), (1, 1)]));
        e.insert(v(&[(1, 1), (2, 1)]));
        e.insert(v(&[(0, 1), (2, -1)]));
        assert_eq!(e.rank(), 2);
        e.make_reduced();
        let k = e.kernel(3);
        assert_eq!(k, vec![v(&[(0, 1), (1, -1), (2, 1)])]);
    }

    #[test]
    fn solve_consistent_and_not() {
        // x0 + x1 = 3, x0 - x1 = 1
        let s = solve_rows(2, vec![(v(&[(0, 1), (1, 1)]), 3.into()), (v(&[(0, 1), (1, -1)]), 1.into())]);
        assert_eq!(s.particular.unwrap(), v(&[(0, 2), (1, 1)]));
        let s = solve_rows(1, vec![(v(&[(0, 1)]), 1.into()), (v(&[(0, 2)]), 1.into())]);
        assert!(s.particular.is_none());
    }

    #[test]
    fn tracked_dependency() {
        let mut t = TrackedEchelon::new(3);
        assert!(matches!(t.insert(v(&[(0, 1), (1, 2)])), Insert::Independent(0)));
        assert!(matches!(t.insert(v(&[(1, 1)])), Insert::Independent(1)));
        match t.insert(v(&[(0, 1), (1, 5)])) {
            Insert::Dependent(c) => assert_eq!(c, v(&[(0, -1), (1, -3), (2, 1)])),
            _ => panic!(),
        }
        let (res, combo) = t.reduce(v(&[(0, 2), (1, 4), (2, 7)]));
        assert_eq!(res, v(&[(2, 7)]));
        assert_eq!(combo, v(&[(0, 2)]));
    }
}
