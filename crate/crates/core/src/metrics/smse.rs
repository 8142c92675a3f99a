//! Sum MSE with and without feeder-link interference, and the singular-value facts behind
//! their comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, select_cols, singular_values, CMatrix, C64};

/// Margin below which the interference SMSE is considered smaller.
pub const ORDERING_TOLERANCE: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmsePair {
    pub smse_no_interference: f64,
    pub smse_interference: f64,
    /// Eigenvalues of `H_u H_u^H`, descending.
    pub eigen_no_interference: Vec<f64>,
    /// Eigenvalues of `H_u H_f H_f^H H_u^H`, descending.
    pub eigen_interference: Vec<f64>,
}

impl SmsePair {
    pub fn margin(&self) -> f64 {
        self.smse_interference - self.smse_no_interference
    }
}

/// `Σ_i 1/(G/P + λ_i)` over the eigenvalues of a Gram matrix.
pub fn smse_from_eigenvalues(eigenvalues: &[f64], num_gateways: usize, power: f64) -> f64 {
    let load = num_gateways as f64 / power;
    let mut terms: Vec<f64> = eigenvalues.iter().map(|&l| 1.0 / (load + l.max(0.0))).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

pub fn smse(h_u: &CMatrix, h_f: &CMatrix, num_gateways: usize, power: f64) -> Result<SmsePair> {
    if !(power > 0.0) {
        return Err(Error::InvalidParameter(format!("power must be positive, got {power}")));
    }
    if h_u.ncols() != h_f.nrows() || !h_f.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "H_u is {}x{}, H_f is {}x{}",
            h_u.nrows(),
            h_u.ncols(),
            h_f.nrows(),
            h_f.ncols()
        )));
    }
    let composite = h_u * h_f;
    let eigen_no_interference = hermitian_eigenvalues(&(h_u * h_u.adjoint()));
    let eigen_interference = hermitian_eigenvalues(&(&composite * composite.adjoint()));
    Ok(SmsePair {
        smse_no_interference: smse_from_eigenvalues(&eigen_no_interference, num_gateways, power),
        smse_interference: smse_from_eigenvalues(&eigen_interference, num_gateways, power),
        eigen_no_interference,
        eigen_interference,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub holds: bool,
    /// `SMSE_interference − SMSE_no-interference`.
    pub margin: f64,
    pub pair: SmsePair,
}

/// Checks `SMSE_interference ≥ SMSE_no-interference` with tolerance `-1e-9`.
pub fn check_smse_ordering(h_u: &CMatrix, h_f: &CMatrix, num_gateways: usize, power: f64) -> Result<OrderingCheck> {
    let pair = smse(h_u, h_f, num_gateways, power)?;
    let margin = pair.margin();
    Ok(OrderingCheck {
        holds: margin >= ORDERING_TOLERANCE,
        margin,
        pair,
    })
}

/// Singular values of the first `r` columns, padded with zeros to length `r`.
fn leading_singular_values(d: &CMatrix, r: usize) -> Vec<f64> {
    let mut s = singular_values(&select_cols(d, &(0..r).collect::<Vec<_>>()));
    s.resize(r, 0.0);
    s
}

/// Largest violation of the chain
/// `σ₁(D_{r+1}) ≥ σ₁(D_r) ≥ σ₂(D_{r+1}) ≥ … ≥ σ_r(D_r) ≥ σ_{r+1}(D_{r+1})`,
/// where `D_r` holds the first `r` columns of `D`. Non-positive means the chain holds.
pub fn interlacing_violation(d: &CMatrix, r: usize) -> Result<f64> {
    let k = d.ncols();
    if d.nrows() < k || r == 0 || r >= k {
        return Err(Error::InvalidParameter(format!(
            "need a tall matrix and 1 <= r < k, got {}x{k} with r = {r}",
            d.nrows()
        )));
    }
    let small = leading_singular_values(d, r);
    let big = leading_singular_values(d, r + 1);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..r {
        worst = worst.max(small[i] - big[i]);
        worst = worst.max(big[i + 1] - small[i]);
    }
    Ok(worst)
}

/// Interlacing check with tolerance `1e-10·σ₁(D)`.
pub fn check_interlacing(d: &CMatrix, r: usize) -> Result<bool> {
    let sigma1 = singular_values(d).first().copied().unwrap_or(0.0);
    Ok(interlacing_violation(d, r)? <= 1e-10 * sigma1)
}

/// `σ_i(S·G) ≤ σ_i(G)` for a 0/1 diagonal row selection `S`.
pub fn selection_contracts(g: &CMatrix, keep: &[bool]) -> Result<bool> {
    if keep.len() != g.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} selection flags for {} rows",
            keep.len(),
            g.nrows()
        )));
    }
    let mut selected = g.clone();
    for (i, &k) in keep.iter().enumerate() {
        if !k {
            selected.row_mut(i).fill(C64::new(0.0, 0.0));
        }
    }
    let full = singular_values(g);
    let sel = singular_values(&selected);
    let tol = 1e-10 * full.first().copied().unwrap_or(0.0);
    Ok(sel.iter().zip(&full).all(|(s, f)| *s <= f + tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity};

    #[test]
    fn zero_channel_gives_k_p_over_g() {
        let pair = smse(&CMatrix::zeros(4, 6), &identity(6), 3, 12.0).unwrap();
        assert!((pair.smse_no_interference - 16.0).abs() < 1e-12);
        assert!((pair.smse_interference - 16.0).abs() < 1e-12);
    }

    #[test]
    fn identity_feeder_is_equality() {
        let h = CMatrix::from_fn(3, 4, |r, col| c((r + 2 * col) as f64 * 0.1, r as f64 - col as f64));
        let check = check_smse_ordering(&h, &identity(4), 2, 100.0).unwrap();
        assert!(check.holds);
        assert!(check.margin.abs() < 1e-12 * check.pair.smse_no_interference);
    }

    #[test]
    fn shrunk_spectrum_raises_smse() {
        // λ = (4, 1) against (1, 0.25): G/P = 1 gives 1/5 + 1/2 versus 1/2 + 1/1.25.
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = c(2.0, 0.0);
        h[(1, 1)] = c(1.0, 0.0);
        let f = identity(2) * c(0.5, 0.0);
        let check = check_smse_ordering(&h, &f, 1, 1.0).unwrap();
        assert!((check.pair.smse_no_interference - 0.7).abs() < 1e-14);
        assert!((check.pair.smse_interference - 1.3).abs() < 1e-14);
        assert!(check.holds && check.margin > 0.5);
    }

    #[test]
    fn orthonormal_columns_interlace_with_equality() {
        let d = identity(5).columns(0, 4).into_owned();
        for r in 1..4 {
            assert!(check_interlacing(&d, r).unwrap());
            assert!(interlacing_violation(&d, r).unwrap().abs() < 1e-12);
        }
        assert!(check_interlacing(&d, 4).is_err());
    }

    #[test]
    fn selection_of_identity() {
        assert!(selection_contracts(&identity(3), &[true, false, true]).unwrap());
        assert!(selection_contracts(&identity(3), &[true]).is_err());
    }
}
