//! Two-stage multigateway precoder.
//!
//! Stage one projects each gateway's transmission onto the null space of the regularized
//! out-of-cluster rows `W̃_g` of `H_g^(R) = H_g H_g^H + (G/P) I_K`; stage two inverts (ZF) or
//! regularizes (LMMSE) the resulting `K_g×K_g` virtual channel. Each block is scaled so that
//! `Tr(T_g^H T_g) = P/G` and the blocks are placed on the diagonal of `T`.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix, ClusterLayout};
use crate::error::{Error, Result};
use crate::linalg::{
    checked_inverse, energy, fro, identity, is_finite, right_null_space, select_cols,
    select_rows, CMatrix,
};

/// Singular values at or below this fraction of the largest are treated as zero.
pub const NULL_TOLERANCE: f64 = 1e-9;
/// Virtual channels above this condition number are rejected by the ZF stage.
pub const MAX_CONDITION: f64 = 1e12;

/// Inner (intra-cluster) precoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InnerStage {
    Zf,
    Mmse { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Zf,
    #[default]
    Mmse,
}

/// Choice of the LMMSE regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MmseRegularization {
    /// `α = G/P`: vanishes as power grows, so LMMSE tends to ZF.
    #[default]
    Standard,
    /// `α = P/G`, the reciprocal of the standard load term.
    Inverted,
}

impl InnerStage {
    pub fn new(flavor: Flavor, reg: MmseRegularization, num_gateways: usize, power: f64) -> Self {
        match flavor {
            Flavor::Zf => Self::Zf,
            Flavor::Mmse => Self::Mmse {
                alpha: match reg {
                    MmseRegularization::Standard => num_gateways as f64 / power,
                    MmseRegularization::Inverted => power / num_gateways as f64,
                },
            },
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::Zf => None,
            Self::Mmse { alpha } => Some(*alpha),
        }
    }
}

/// `H_g^(R)` with its row partition into own-cluster rows and the out-of-cluster stack.
#[derive(Debug, Clone)]
pub struct RegularizedBlock {
    matrix: CMatrix,
    own_rows: Vec<usize>,
    out_rows: Vec<usize>,
}

impl RegularizedBlock {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `H_g^(g,R)` (`K_g×K`).
    pub fn own(&self) -> CMatrix {
        select_rows(&self.matrix, &self.own_rows)
    }

    /// `W̃_g` (`(K−K_g)×K`), rows in ascending order.
    pub fn out_of_cluster(&self) -> CMatrix {
        select_rows(&self.matrix, &self.out_rows)
    }

    pub fn own_rows(&self) -> &[usize] {
        &self.own_rows
    }

    pub fn out_rows(&self) -> &[usize] {
        &self.out_rows
    }
}

fn check_power(power: f64) -> Result<()> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power}"
        )));
    }
    Ok(())
}

/// `H_g H_g^H + (G/P)·I` partitioned by `own_rows`.
pub fn regularize(
    h_g: &CMatrix,
    own_rows: &[usize],
    num_gateways: usize,
    power: f64,
) -> Result<RegularizedBlock> {
    check_power(power)?;
    let k = h_g.nrows();
    if own_rows.iter().any(|&r| r >= k) {
        return Err(Error::DimensionMismatch(format!(
            "own rows {own_rows:?} exceed {k} channel rows"
        )));
    }
    let mut matrix = h_g * h_g.adjoint();
    let load = num_gateways as f64 / power;
    for i in 0..k {
        matrix[(i, i)] += load;
    }
    let out_rows = (0..k).filter(|r| !own_rows.contains(r)).collect();
    Ok(RegularizedBlock {
        matrix,
        own_rows: own_rows.to_vec(),
        out_rows,
    })
}

/// Orthonormal basis `V_g⁰` of the right null space of `W̃_g`.
#[derive(Debug, Clone)]
pub struct NullProjector {
    pub basis: CMatrix,
    pub rank: usize,
    /// Numerical null-space dimension before truncation.
    pub null_dim: usize,
    /// Set when the null space was larger than requested and had to be truncated.
    pub degenerate: bool,
}

/// Null-space projector of `w_tilde` with exactly `k_g` columns.
///
/// With no constraint rows the canonical basis `e_1..e_{k_g}` is returned. When the numerical
/// null space is larger than `k_g` the vectors of smallest singular value are kept and the
/// result is flagged as degenerate.
pub fn null_projector(w_tilde: &CMatrix, num_cols: usize, k_g: usize) -> Result<NullProjector> {
    if w_tilde.ncols() != num_cols && w_tilde.nrows() > 0 {
        return Err(Error::DimensionMismatch(format!(
            "constraint stack has {} columns, expected {num_cols}",
            w_tilde.ncols()
        )));
    }
    if w_tilde.nrows() == 0 {
        let basis = identity(num_cols).columns(0, k_g.min(num_cols)).into_owned();
        if k_g > num_cols {
            return Err(Error::Degenerate(format!(
                "cannot build {k_g} projector columns in dimension {num_cols}"
            )));
        }
        return Ok(NullProjector {
            basis,
            rank: 0,
            null_dim: num_cols,
            degenerate: num_cols > k_g,
        });
    }
    let (basis, rank) = right_null_space(w_tilde, NULL_TOLERANCE);
    let null_dim = basis.ncols();
    if null_dim < k_g {
        return Err(Error::Degenerate(format!(
            "null space has dimension {null_dim}, fewer than the {k_g} beams to serve"
        )));
    }
    Ok(NullProjector {
        basis: basis.columns(0, k_g).into_owned(),
        rank,
        null_dim,
        degenerate: null_dim > k_g,
    })
}

/// `H_g^eq = H_g^(g,R)·V_g⁰`.
pub fn virtual_channel(own: &CMatrix, projector: &CMatrix) -> Result<CMatrix> {
    if own.ncols() != projector.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "own rows have {} columns, projector has {} rows",
            own.ncols(),
            projector.nrows()
        )));
    }
    Ok(own * projector)
}

/// Zero-forcing inner precoder: `W = H^H (H H^H)^{-1}`, i.e. `H^{-1}` for square `H`.
pub fn inner_zf(h_eq: &CMatrix) -> Result<CMatrix> {
    if h_eq.nrows() == h_eq.ncols() {
        return checked_inverse(h_eq, MAX_CONDITION, "virtual channel");
    }
    let gram = h_eq * h_eq.adjoint();
    let inv = checked_inverse(&gram, MAX_CONDITION, "virtual channel Gram matrix")?;
    Ok(h_eq.adjoint() * inv)
}

/// LMMSE inner precoder: `W = H^H (H H^H + α I)^{-1}`.
pub fn inner_mmse(h_eq: &CMatrix, alpha: f64) -> Result<CMatrix> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let mut gram = h_eq * h_eq.adjoint();
    for i in 0..gram.nrows() {
        gram[(i, i)] += alpha;
    }
    let inv = checked_inverse(&gram, MAX_CONDITION * MAX_CONDITION, "regularized Gram matrix")?;
    Ok(h_eq.adjoint() * inv)
}

pub fn apply_inner(h_eq: &CMatrix, inner: InnerStage) -> Result<CMatrix> {
    match inner {
        InnerStage::Zf => inner_zf(h_eq),
        InnerStage::Mmse { alpha } => inner_mmse(h_eq, alpha),
    }
}

/// Scales `M` so that `Tr(T^H T) = budget`; returns `(T, β)`.
pub fn normalize_power(m: CMatrix, budget: f64) -> Result<(CMatrix, f64)> {
    let e = energy(&m);
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Degenerate(format!(
            "unnormalized precoder has energy {e}"
        )));
    }
    let beta = (budget / e).sqrt();
    Ok((m.scale(beta), beta))
}

/// `T_g = β·H_g^H·V_g⁰·W_g` with `Tr(T_g^H T_g) = P/G`.
pub fn assemble_gateway_precoder(
    h_g: &CMatrix,
    projector: &CMatrix,
    inner: &CMatrix,
    power: f64,
    num_gateways: usize,
) -> Result<(CMatrix, f64)> {
    check_power(power)?;
    if h_g.nrows() != projector.nrows() || projector.ncols() != inner.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "H_g^H is {}x{}, V is {}x{}, W is {}x{}",
            h_g.ncols(),
            h_g.nrows(),
            projector.nrows(),
            projector.ncols(),
            inner.nrows(),
            inner.ncols()
        )));
    }
    normalize_power(h_g.adjoint() * projector * inner, power / num_gateways as f64)
}

/// Per-gateway output of the two-stage design.
#[derive(Debug, Clone)]
pub struct GatewayPrecoder {
    pub gateway: usize,
    /// `W_g`
    pub inner: CMatrix,
    /// `V_g⁰`; empty for the ICM design.
    pub projector: CMatrix,
    /// `T_g` (`N_g×K_g`)
    pub block: CMatrix,
    pub beta: f64,
    /// Null-space bookkeeping of stage one, when it ran.
    pub null_space: Option<NullProjector>,
}

/// Runs both stages on the rows a gateway knows.
///
/// `h_known` holds the known user rows against this gateway's feeds (`K'×N_g`), and
/// `own_rows` marks the rows of the gateway's own cluster within it.
pub fn block_svd_precoder(
    gateway: usize,
    h_known: &CMatrix,
    own_rows: &[usize],
    num_gateways: usize,
    power: f64,
    inner: InnerStage,
) -> Result<GatewayPrecoder> {
    let reg = regularize(h_known, own_rows, num_gateways, power)?;
    let k_g = own_rows.len();
    let null = null_projector(&reg.out_of_cluster(), h_known.nrows(), k_g)?;
    let h_eq = virtual_channel(&reg.own(), &null.basis)?;
    let w = apply_inner(&h_eq, inner)?;
    let (block, beta) = assemble_gateway_precoder(h_known, &null.basis, &w, power, num_gateways)?;
    if !is_finite(&block) {
        return Err(Error::Degenerate(format!("gateway {gateway} precoder is not finite")));
    }
    Ok(GatewayPrecoder {
        gateway,
        inner: w,
        projector: null.basis.clone(),
        block,
        beta,
        null_space: Some(null),
    })
}

/// Full-cooperation precoder of gateway `g` (knows all of `H_g`).
pub fn gateway_precoder(
    channel: &ChannelMatrix,
    g: usize,
    power: f64,
    inner: InnerStage,
) -> Result<GatewayPrecoder> {
    let layout = channel.layout();
    block_svd_precoder(
        g,
        &channel.gateway_block(g),
        layout.beams_of_cluster(g),
        layout.num_gateways(),
        power,
        inner,
    )
}

/// Individual-cluster ZF: `T_g = β·H^H (H H^H)^{-1}` on the own-cluster block `K_g×N_g`.
pub fn icm_precoder(h_own: &CMatrix, power: f64, num_gateways: usize) -> Result<CMatrix> {
    icm_precoder_with(h_own, InnerStage::Zf, power, num_gateways).map(|(t, _, _)| t)
}

/// Individual-cluster precoder with a ZF or regularized inverse; returns `(T_g, W, β)`.
pub fn icm_precoder_with(
    h_own: &CMatrix,
    inner: InnerStage,
    power: f64,
    num_gateways: usize,
) -> Result<(CMatrix, CMatrix, f64)> {
    check_power(power)?;
    if h_own.nrows() > h_own.ncols() {
        return Err(Error::Degenerate(format!(
            "own-cluster block {}x{} cannot have full row rank",
            h_own.nrows(),
            h_own.ncols()
        )));
    }
    let mut gram = h_own * h_own.adjoint();
    if let InnerStage::Mmse { alpha } = inner {
        for i in 0..gram.nrows() {
            gram[(i, i)] += alpha;
        }
    }
    let w = checked_inverse(&gram, MAX_CONDITION, "own-cluster Gram matrix")?;
    let (t, beta) = normalize_power(h_own.adjoint() * &w, power / num_gateways as f64)?;
    Ok((t, w, beta))
}

/// Places each `T_g` at (feeds of `g`, beams of `g`) in an `N×K` zero matrix.
pub fn assemble_total(layout: &ClusterLayout, blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.len() != layout.num_gateways() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for {} gateways",
            blocks.len(),
            layout.num_gateways()
        )));
    }
    let mut t = CMatrix::zeros(layout.num_feeds(), layout.num_beams());
    for (g, block) in blocks.iter().enumerate() {
        let feeds = layout.feeds_of_gateway(g);
        let beams = layout.beams_of_cluster(g);
        if block.nrows() != feeds.len() || block.ncols() != beams.len() {
            return Err(Error::DimensionMismatch(format!(
                "block {g} is {}x{}, expected {}x{}",
                block.nrows(),
                block.ncols(),
                feeds.len(),
                beams.len()
            )));
        }
        for (j, &b) in beams.iter().enumerate() {
            for (i, f) in feeds.clone().enumerate() {
                t[(f, b)] = block[(i, j)];
            }
        }
    }
    Ok(t)
}

/// How the per-gateway blocks were designed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    BlockSvd,
    Icm,
    SingleGateway,
}

/// Per-gateway blocks and the assembled block-diagonal `T`.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub structure: Structure,
    pub inner: InnerStage,
    pub gateways: Vec<GatewayPrecoder>,
    pub total: CMatrix,
}

impl PrecoderSet {
    pub fn from_gateways(
        layout: &ClusterLayout,
        structure: Structure,
        inner: InnerStage,
        gateways: Vec<GatewayPrecoder>,
    ) -> Result<Self> {
        let blocks: Vec<CMatrix> = gateways.iter().map(|g| g.block.clone()).collect();
        let total = assemble_total(layout, &blocks)?;
        Ok(Self {
            structure,
            inner,
            gateways,
            total,
        })
    }

    pub fn betas(&self) -> Vec<f64> {
        self.gateways.iter().map(|g| g.beta).collect()
    }
}

/// Every gateway with full CSI.
pub fn full_cooperation(channel: &ChannelMatrix, power: f64, inner: InnerStage) -> Result<PrecoderSet> {
    let layout = channel.layout();
    let gateways = (0..layout.num_gateways())
        .map(|g| gateway_precoder(channel, g, power, inner))
        .collect::<Result<Vec<_>>>()?;
    PrecoderSet::from_gateways(layout, Structure::BlockSvd, inner, gateways)
}

/// Individual-cluster processing for every gateway.
pub fn individual_clusters(channel: &ChannelMatrix, power: f64, inner: InnerStage) -> Result<PrecoderSet> {
    let layout = channel.layout();
    let g_count = layout.num_gateways();
    let gateways = (0..g_count)
        .map(|g| {
            let own = channel.cluster_block(g, g);
            let (block, w, beta) = icm_precoder_with(&own, inner, power, g_count)?;
            Ok(GatewayPrecoder {
                gateway: g,
                inner: w,
                projector: CMatrix::zeros(0, 0),
                block,
                beta,
                null_space: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PrecoderSet::from_gateways(layout, Structure::Icm, inner, gateways)
}

/// Single gateway owning every feed under the pooled constraint `Tr(T^H T) = P`.
///
/// The returned `T` is dense `N×K`; the single block is reported as gateway 0.
pub fn single_gateway(channel: &ChannelMatrix, power: f64, inner: InnerStage) -> Result<PrecoderSet> {
    let h = channel.entries();
    let all: Vec<usize> = (0..h.nrows()).collect();
    let gw = block_svd_precoder(0, h, &all, 1, power, inner)?;
    let total = gw.block.clone();
    Ok(PrecoderSet {
        structure: Structure::SingleGateway,
        inner,
        gateways: vec![gw],
        total,
    })
}

/// `‖H_g^c T_g‖ / ‖H_g^g T_g‖`: out-of-cluster over in-cluster response of gateway `g`.
pub fn leakage_ratio(channel: &ChannelMatrix, g: usize, block: &CMatrix) -> f64 {
    let layout = channel.layout();
    let h_g = channel.gateway_block(g);
    let own = select_rows(&h_g, layout.beams_of_cluster(g));
    let out = select_rows(&h_g, &layout.beams_outside(g));
    let inside = fro(&(own * block));
    if inside == 0.0 {
        return f64::INFINITY;
    }
    fro(&(out * block)) / inside
}

/// Columns of `T` for the beams of cluster `g` restricted to the feeds of gateway `g`.
pub fn extract_block(layout: &ClusterLayout, total: &CMatrix, g: usize) -> CMatrix {
    let feeds: Vec<usize> = layout.feeds_of_gateway(g).collect();
    select_cols(&select_rows(total, &feeds), layout.beams_of_cluster(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn diag(v: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(v.len(), v.len());
        for (i, &x) in v.iter().enumerate() {
            m[(i, i)] = c(x, 0.0);
        }
        m
    }

    #[test]
    fn regularize_zero_channel() {
        let h = CMatrix::zeros(4, 3);
        let r = regularize(&h, &[0, 1], 2, 8.0).unwrap();
        assert_eq!(r.matrix(), &(identity(4) * c(0.25, 0.0)));
        assert_eq!(r.out_rows(), &[2, 3]);
    }

    #[test]
    fn regularize_rejects_nonpositive_power() {
        let h = CMatrix::zeros(2, 2);
        assert!(regularize(&h, &[0], 1, 0.0).is_err());
        assert!(regularize(&h, &[0], 1, -3.0).is_err());
    }

    #[test]
    fn empty_constraints_give_canonical_basis() {
        let p = null_projector(&CMatrix::zeros(0, 5), 5, 5).unwrap();
        assert_eq!(p.basis, identity(5));
        assert!(!p.degenerate);
    }

    #[test]
    fn explicit_null_space() {
        // W̃ = (I_3 | 0) in C^{3x5} -> null space is span(e4, e5)
        let mut w = CMatrix::zeros(3, 5);
        for i in 0..3 {
            w[(i, i)] = c(1.0, 0.0);
        }
        let p = null_projector(&w, 5, 2).unwrap();
        assert_eq!(p.rank, 3);
        for i in 0..3 {
            for j in 0..2 {
                assert!(p.basis[(i, j)].norm() < 1e-14);
            }
        }
        let gram = p.basis.adjoint() * &p.basis;
        assert!(fro(&(gram - identity(2))) < 1e-14);
    }

    #[test]
    fn rank_deficient_constraints_flagged() {
        let mut w = CMatrix::zeros(3, 5);
        w[(0, 0)] = c(1.0, 0.0);
        w[(1, 0)] = c(2.0, 0.0);
        let p = null_projector(&w, 5, 2).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.null_dim, 4);
        assert_eq!(p.basis.ncols(), 2);
    }

    #[test]
    fn too_small_null_space_is_an_error() {
        let w = identity(4);
        assert!(null_projector(&w, 4, 1).is_err());
    }

    #[test]
    fn zf_of_scaled_identity() {
        assert!(fro(&(inner_zf(&identity(3)).unwrap() - identity(3))) < 1e-15);
        let w = inner_zf(&(identity(3) * c(2.0, 0.0))).unwrap();
        assert!(fro(&(w - identity(3) * c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn zf_rejects_singular() {
        assert!(matches!(inner_zf(&diag(&[1.0, 0.0])), Err(Error::Singular { .. })));
        assert!(matches!(inner_zf(&diag(&[1.0, 1e-14])), Err(Error::Singular { .. })));
    }

    #[test]
    fn mmse_identity_unit_alpha() {
        let w = inner_mmse(&identity(4), 1.0).unwrap();
        assert!(fro(&(w - identity(4) * c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn mmse_rejects_negative_alpha() {
        assert!(inner_mmse(&identity(2), -1.0).is_err());
    }

    #[test]
    fn normalize_rejects_zero() {
        assert!(matches!(
            normalize_power(CMatrix::zeros(2, 2), 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn assemble_total_single_nonzero_block() {
        let layout = ClusterLayout::uniform(3, 2, 3).unwrap();
        let blocks = vec![
            CMatrix::zeros(3, 2),
            CMatrix::from_element(3, 2, c(1.0, -1.0)),
            CMatrix::zeros(3, 2),
        ];
        let t = assemble_total(&layout, &blocks).unwrap();
        for f in 0..9 {
            for b in 0..6 {
                let inside = (3..6).contains(&f) && (2..4).contains(&b);
                assert_eq!(t[(f, b)] != c(0.0, 0.0), inside);
            }
        }
        assert_eq!(extract_block(&layout, &t, 1), blocks[1]);
    }

    #[test]
    fn assemble_total_checks_dimensions() {
        let layout = ClusterLayout::uniform(2, 2, 3).unwrap();
        assert!(assemble_total(&layout, &[CMatrix::zeros(3, 2)]).is_err());
        assert!(assemble_total(&layout, &[CMatrix::zeros(3, 2), CMatrix::zeros(2, 2)]).is_err());
    }

    #[test]
    fn inverted_alpha() {
        let s = InnerStage::new(Flavor::Mmse, MmseRegularization::Standard, 3, 1000.0);
        let p = InnerStage::new(Flavor::Mmse, MmseRegularization::Inverted, 3, 1000.0);
        assert_eq!(s.alpha(), Some(0.003));
        assert_eq!(p.alpha(), Some(1000.0 / 3.0));
        assert_eq!(InnerStage::new(Flavor::Zf, MmseRegularization::Standard, 3, 1.0), InnerStage::Zf);
    }
}
