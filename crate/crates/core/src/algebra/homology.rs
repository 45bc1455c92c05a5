use std::fmt;


use super::matrix::SparseMatrix;
use super::ring::Pid;
use super::snf::{smith_normal_form, SmithForm};
use super::AlgebraError;

/// Homology of a single ungraded differential: free rank plus the nonunit
/// invariant factors of the boundary (empty over a field).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult<R: Pid> {
    pub free_rank: usize,
    pub torsion: Vec<R>,
}

impl<R: Pid> fmt::Display for HomologyResult<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {}", self.free_rank)?;
        if !self.torsion.is_empty() {
            let t: Vec<String> = self.torsion.iter().map(|d| d.to_string()).collect();
            write!(f, ", torsion [{}]", t.join(", "))?;
        }
        Ok(())
    }
}

pub fn check_differential<R: Pid>(boundary: &SparseMatrix<R>) -> Result<(), AlgebraError> {
    if !boundary.is_square() {
        return Err(AlgebraError::DimensionMismatch {
            op: "differential",
            left: (boundary.rows(), boundary.cols()),
            right: (boundary.cols(), boundary.rows()),
        });
    }
    let sq = boundary.mul(boundary)?;
    if let Some((i, j, v)) = sq.iter().next() {
        return Err(AlgebraError::NotADifferential { row: i, col: j, value: v.to_string() });
    }
    Ok(())
}

/// Homology of `ker d / im d`. The matrix may be given in either the operator
/// or the transposed convention: rank and invariant factors agree.
pub fn homology<R: Pid>(boundary: &SparseMatrix<R>) -> Result<HomologyResult<R>, AlgebraError> {
    check_differential(boundary)?;
    let snf = smith_normal_form(boundary);
    Ok(homology_from_smith(boundary.rows(), &snf))
}

pub fn homology_from_smith<R: Pid>(n: usize, snf: &SmithForm<R>) -> HomologyResult<R> {
    let torsion = snf.invariant_factors().into_iter().filter(|d| !d.is_unit()).collect();
    HomologyResult { free_rank: n - 2 * snf.rank, torsion }
}

pub fn is_chain_map<R: Pid>(
    a: &SparseMatrix<R>,
    d_from: &SparseMatrix<R>,
    d_to: &SparseMatrix<R>,
) -> Result<bool, AlgebraError> {
    let lhs = a.mul(d_from)?;
    let rhs = d_to.mul(a)?;
    Ok(lhs == rhs)
}

pub fn is_chain_homotopy<R: Pid>(
    d_map: &SparseMatrix<R>,
    d: &SparseMatrix<R>,
    lhs: &SparseMatrix<R>,
) -> Result<bool, AlgebraError> {
    let sum = d.mul(d_map)?.add(&d_map.mul(d)?)?;
    if sum.rows() != lhs.rows() || sum.cols() != lhs.cols() {
        return Err(AlgebraError::DimensionMismatch {
            op: "chain_homotopy",
            left: (sum.rows(), sum.cols()),
            right: (lhs.rows(), lhs.cols()),
        });
    }
    Ok(sum == *lhs)
}

/// Free rank of the map induced on homology by the chain map `f`, computed
/// over the fraction field: rank(f·Z ∪ B) − rank(B).
pub fn induced_rank<R: Pid>(
    f: &SparseMatrix<R>,
    d_from: &SparseMatrix<R>,
    d_to: &SparseMatrix<R>,
) -> Result<usize, AlgebraError> {
    let kernel = smith_normal_form(d_from).kernel_basis();
    let n_to = d_to.rows();
    let mut images = SparseMatrix::zeros(n_to, kernel.len());
    for (j, z) in kernel.iter().enumerate() {
        let y = f.mul_vec(z)?;
        for (i, v) in y.into_iter().enumerate() {
            if !v.is_zero() {
                images.set(i, j, v);
            }
        }
    }
    let joint = images.hconcat(d_to)?;
    Ok(smith_normal_form(&joint).rank - smith_normal_form(d_to).rank)
}
