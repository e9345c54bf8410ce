use nalgebra::DMatrix;
use num::Complex;

/// Rank of a symmetric positive semidefinite matrix from its eigenvalues.
/// Values below `tol · max(1, λ_max)` count as zero.
pub(crate) fn symmetric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let ev = m.clone().symmetric_eigenvalues();
    let top = ev.amax().max(1.0);
    ev.iter().filter(|&&s| s > tol * top).count()
}

pub(crate) fn complex_rank(matrix: &DMatrix<Complex<f64>>, tol: f64) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let sv = matrix.clone().singular_values();
    let top = sv.max().max(1.0);
    sv.iter().filter(|&&s| s > tol * top).count()
}
