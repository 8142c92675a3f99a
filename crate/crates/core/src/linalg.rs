//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Frobenius norm.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Tr(M^H M)`, i.e. the squared Frobenius norm.
pub fn energy(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

pub fn select_cols(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Ratio of largest to smallest singular value of a square matrix.
/// Returns `f64::INFINITY` when the smallest singular value is zero.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Inverse of a square matrix by LU with one step of iterative refinement.
///
/// Fails with [`Error::Singular`] when the condition number exceeds `max_condition`.
pub fn checked_inverse(m: &CMatrix, max_condition: f64, context: &str) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{context}: cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let condition = condition_number(m);
    if !condition.is_finite() || condition > max_condition {
        return Err(Error::Singular {
            context: context.to_string(),
            condition,
        });
    }
    let mut x = m.clone().lu().try_inverse().ok_or_else(|| Error::Singular {
        context: context.to_string(),
        condition,
    })?;
    // X <- X + X (I - M X)
    let residual = identity(n) - m * &x;
    x += &x * residual;
    Ok(x)
}

/// Orthonormal basis (as columns) of the right null space of `m`.
///
/// Singular values at or below `rel_tol * sigma_max` are treated as zero. Columns are ordered
/// by increasing singular value. A matrix with no rows, or the zero matrix, yields the
/// canonical basis.
pub fn right_null_space(m: &CMatrix, rel_tol: f64) -> (CMatrix, usize) {
    let n = m.ncols();
    let (ordered, rank) = ascending_right_basis(m, rel_tol);
    (ordered.columns(0, n - rank).into_owned(), rank)
}

/// The `count` right singular vectors with the smallest singular values, weakest first.
/// Directions beyond the row count of a wide matrix have `σ = 0` and come first.
pub fn least_right_singular_vectors(m: &CMatrix, count: usize) -> CMatrix {
    let (ordered, _) = ascending_right_basis(m, 0.0);
    ordered.columns(0, count.min(m.ncols())).into_owned()
}

/// Complete right basis ordered by increasing singular value, plus the numerical rank.
fn ascending_right_basis(m: &CMatrix, rel_tol: f64) -> (CMatrix, usize) {
    let n = m.ncols();
    if m.nrows() == 0 || m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return (identity(n), 0);
    }
    // Pad wide matrices with zero rows so the SVD returns a complete right basis.
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let sigma_max = s[order[0]];
    let rank = order.iter().filter(|&&i| s[i] > rel_tol * sigma_max).count();
    order.reverse();
    let basis = CMatrix::from_fn(n, n, |i, j| v_t[(order[j], i)].conj());
    (basis, rank)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_coordinate_rows() {
        // rows e1, e2 in C^4 -> null space spans e3, e4
        let mut m = CMatrix::zeros(2, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        let (basis, rank) = right_null_space(&m, 1e-9);
        assert_eq!(rank, 2);
        assert_eq!(basis.ncols(), 2);
        assert!(fro(&(&m * &basis)) < 1e-14);
        for i in 0..2 {
            assert!(basis[(i, 0)].norm() < 1e-14 && basis[(i, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = CMatrix::from_element(3, 3, c(1.0, 0.0));
        assert!(matches!(
            checked_inverse(&m, 1e12, "test"),
            Err(Error::Singular { .. })
        ));
    }
}
