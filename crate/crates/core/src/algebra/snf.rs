//! Smith normal form over a Euclidean PID.


use super::matrix::SparseMatrix;
use super::ring::Pid;

/// `u * m * v == s` with `u`, `v` invertible and `s` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm<R: Pid> {
    pub u: SparseMatrix<R>,
    pub s: SparseMatrix<R>,
    pub v: SparseMatrix<R>,
    pub rank: usize,
}

impl<R: Pid> SmithForm<R> {
    /// Nonzero diagonal entries, in canonical (normalized) form.
    pub fn invariant_factors(&self) -> Vec<R> {
        (0..self.rank).map(|i| self.s.get(i, i)).collect()
    }

    /// Columns of `v` spanning the kernel of `m`.
    pub fn kernel_basis(&self) -> Vec<Vec<R>> {
        let n = self.v.rows();
        (self.rank..self.v.cols())
            .map(|j| (0..n).map(|i| self.v.get(i, j)).collect())
            .collect()
    }
}

struct Work<R: Pid> {
    a: Vec<Vec<R>>,
    u: Vec<Vec<R>>,
    v: Vec<Vec<R>>,
}

impl<R: Pid> Work<R> {
    fn swap_rows(&mut self, i: usize, k: usize) {
        self.a.swap(i, k);
        self.u.swap(i, k);
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        for row in &mut self.a {
            row.swap(j, k);
        }
        for row in &mut self.v {
            row.swap(j, k);
        }
    }

    /// row_i += q * row_k
    fn add_row(&mut self, i: usize, k: usize, q: &R) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[k].clone();
            for (x, s) in m[i].iter_mut().zip(src) {
                if !s.is_zero() {
                    *x = x.clone() + q.clone() * s;
                }
            }
        }
    }

    /// col_j += q * col_k
    fn add_col(&mut self, j: usize, k: usize, q: &R) {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                if !row[k].is_zero() {
                    row[j] = row[j].clone() + q.clone() * row[k].clone();
                }
            }
        }
    }

    fn scale_row(&mut self, i: usize, unit: &R) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = unit.clone() * x.clone();
            }
        }
    }

    /// Position of a nonzero entry of least size in the block `[t.., t..]`.
    fn smallest(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), num_bigint::BigUint)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if x.is_zero() {
                    continue;
                }
                let sz = x.size();
                if best.as_ref().is_none_or(|(_, b)| sz < *b) {
                    best = Some(((i, j), sz));
                }
            }
        }
        best.map(|(p, _)| p)
    }
}

pub fn smith_normal_form<R: Pid>(m: &SparseMatrix<R>) -> SmithForm<R> {
    let rows = m.rows();
    let cols = m.cols();
    let identity = |n: usize| -> Vec<Vec<R>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect())
            .collect()
    };
    let mut w = Work { a: m.to_dense(), u: identity(rows), v: identity(cols) };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.smallest(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let pivot = w.a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let (q, r) = w.a[i][t].div_rem_euclid(&pivot);
                w.add_row(i, t, &(-q));
                if !r.is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let (q, r) = w.a[t][j].div_rem_euclid(&pivot);
                w.add_col(j, t, &(-q));
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder smaller than the pivot is left in row or column t
                let mut best: Option<(usize, usize)> = None;
                let mut best_size = pivot.size();
                for i in t + 1..rows {
                    if !w.a[i][t].is_zero() && w.a[i][t].size() < best_size {
                        best_size = w.a[i][t].size();
                        best = Some((i, t));
                    }
                }
                for j in t + 1..cols {
                    if !w.a[t][j].is_zero() && w.a[t][j].size() < best_size {
                        best_size = w.a[t][j].size();
                        best = Some((t, j));
                    }
                }
                if let Some((i, j)) = best {
                    w.swap_rows(t, i);
                    w.swap_cols(t, j);
                }
                continue;
            }
            // row and column cleared; enforce divisibility of the remaining block
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !pivot.divides(&w.a[i][j]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row(t, i, &R::one()),
                None => break,
            }
        }
        let unit = w.a[t][t].normalizing_unit();
        if !unit.is_one() {
            w.scale_row(t, &unit);
        }
        t += 1;
    }
    SmithForm {
        u: SparseMatrix::from_dense(&w.u),
        s: SparseMatrix::from_dense(&w.a),
        v: SparseMatrix::from_dense(&w.v),
        rank: t,
    }
}

pub fn rank<R: Pid>(m: &SparseMatrix<R>) -> usize {
    smith_normal_form(m).rank
}

/// Some `x` with `m * x == b`, if one exists over the ring.
pub fn solve<R: Pid>(m: &SparseMatrix<R>, b: &[R]) -> Option<Vec<R>> {
    let snf = smith_normal_form(m);
    solve_with(&snf, b)
}

pub fn solve_with<R: Pid>(snf: &SmithForm<R>, b: &[R]) -> Option<Vec<R>> {
    let c = snf.u.mul_vec(b).ok()?;
    let mut y = vec![R::zero(); snf.v.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let d = snf.s.get(i, i);
            let (q, r) = ci.div_rem_euclid(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    snf.v.mul_vec(&y).ok()
}
