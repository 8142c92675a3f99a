//! Gateway cooperation regimes: which CSI each gateway sees, how it is turned into a
//! precoder, and how many complex numbers the gateways exchange.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMatrix, ClusterLayout};
use crate::error::{Error, Result};
use crate::linalg::{identity, least_right_singular_vectors, right_null_space, CMatrix, CVector, C64};
use crate::precoder::{
    block_svd_precoder, full_cooperation, icm_precoder_with, individual_clusters,
    single_gateway, GatewayPrecoder, InnerStage, PrecoderSet, Structure, NULL_TOLERANCE,
};

/// Serialized by its short name: `icm`, `4gc`, `7gc`, `gcm`, `lmc`, `ref`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CooperationScheme {
    /// Individual cluster processing, no CSI exchange.
    Icm,
    /// Gateways exchange full CSI inside groups of `group_size` neighbours.
    GroupCollab { group_size: usize },
    /// Every gateway knows the whole channel.
    Gcm,
    /// Rank-one summaries from adjacent clusters only.
    Lmc,
    /// One gateway owning all feeds.
    SingleGatewayRef,
}

impl CooperationScheme {
    /// Scenario numbering 1–6: ICM, 4GC, 7GC, GCM, Ref, LMC.
    pub fn from_scenario(id: u8) -> Result<Self> {
        Ok(match id {
            1 => Self::Icm,
            2 => Self::GroupCollab { group_size: 4 },
            3 => Self::GroupCollab { group_size: 7 },
            4 => Self::Gcm,
            5 => Self::SingleGatewayRef,
            6 => Self::Lmc,
            _ => return Err(Error::InvalidParameter(format!("scenario {id} is not in 1..=6"))),
        })
    }

    /// Scenario number, when the scheme is one of the six named ones.
    pub fn scenario(&self) -> Option<u8> {
        Some(match self {
            Self::Icm => 1,
            Self::GroupCollab { group_size: 4 } => 2,
            Self::GroupCollab { group_size: 7 } => 3,
            Self::Gcm => 4,
            Self::SingleGatewayRef => 5,
            Self::Lmc => 6,
            Self::GroupCollab { .. } => return None,
        })
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CooperationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Icm => write!(f, "icm"),
            Self::GroupCollab { group_size } => write!(f, "{group_size}gc"),
            Self::Gcm => write!(f, "gcm"),
            Self::Lmc => write!(f, "lmc"),
            Self::SingleGatewayRef => write!(f, "ref"),
        }
    }
}

impl From<CooperationScheme> for String {
    fn from(s: CooperationScheme) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for CooperationScheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for CooperationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "icm" => Ok(Self::Icm),
            "gcm" | "gmc" => Ok(Self::Gcm),
            "lmc" => Ok(Self::Lmc),
            "ref" => Ok(Self::SingleGatewayRef),
            other => other
                .strip_suffix("gc")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(|group_size| Self::GroupCollab { group_size })
                .ok_or_else(|| Error::InvalidParameter(format!("unknown cooperation scheme {s:?}"))),
        }
    }
}

/// What a gateway knows about one cluster's channel from its own feeds.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockCsi {
    Full(CMatrix),
    RankOne { sigma: f64, v: CVector },
    Unknown,
}

/// A gateway's view of `H_g^c` for every cluster `c`.
#[derive(Debug, Clone)]
pub struct CsiView {
    pub gateway: usize,
    pub blocks: Vec<BlockCsi>,
}

impl CsiView {
    pub fn count_full(&self) -> usize {
        self.blocks.iter().filter(|b| matches!(b, BlockCsi::Full(_))).count()
    }

    pub fn count_rank_one(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b, BlockCsi::RankOne { .. }))
            .count()
    }

    pub fn count_unknown(&self) -> usize {
        self.blocks.iter().filter(|b| matches!(b, BlockCsi::Unknown)).count()
    }
}

/// Leading singular pair of a block, summarized as a row `σ₁·v₁^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    pub sigma: f64,
    pub v: CVector,
    /// The input was the zero matrix; `v` is then `e_1`.
    pub degenerate: bool,
}

/// Largest singular value and its right singular vector.
pub fn rank_one_compress(h: &CMatrix) -> RankOne {
    let n = h.ncols();
    let canonical = || {
        let mut v = CVector::zeros(n);
        if n > 0 {
            v[0] = C64::new(1.0, 0.0);
        }
        v
    };
    if h.nrows() == 0 || n == 0 || h.iter().all(|z| z.norm_sqr() == 0.0) {
        return RankOne {
            sigma: 0.0,
            v: canonical(),
            degenerate: true,
        };
    }
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    // SVD::new sorts singular values in descending order.
    let sigma = svd.singular_values[0];
    let v = CVector::from_fn(n, |i, _| v_t[(0, i)].conj());
    RankOne {
        sigma,
        v,
        degenerate: false,
    }
}

/// Stacks `σ_c·v_c^H` for every cluster `c` in `scope` other than `g`, in cluster order.
pub fn build_compressed_interference(
    g: usize,
    pairs: &BTreeMap<usize, (f64, CVector)>,
    scope: &[usize],
    num_feeds: usize,
) -> Result<CMatrix> {
    let rows: Vec<usize> = scope.iter().copied().filter(|&c| c != g).collect();
    let mut out = CMatrix::zeros(rows.len(), num_feeds);
    for (i, c) in rows.iter().enumerate() {
        let (sigma, v) = pairs.get(c).ok_or_else(|| {
            Error::InvalidParameter(format!("no rank-one summary of cluster {c} for gateway {g}"))
        })?;
        if v.len() != num_feeds {
            return Err(Error::DimensionMismatch(format!(
                "summary of cluster {c} has length {}, gateway has {num_feeds} feeds",
                v.len()
            )));
        }
        for j in 0..num_feeds {
            out[(i, j)] = v[j].conj() * *sigma;
        }
    }
    Ok(out)
}

/// The CSI gateway `g` holds under `scheme`.
pub fn effective_csi(scheme: CooperationScheme, g: usize, channel: &ChannelMatrix) -> CsiView {
    let layout = channel.layout();
    let g_count = layout.num_gateways();
    let full = |c: usize| BlockCsi::Full(channel.cluster_block(g, c));
    let blocks = match scheme {
        CooperationScheme::Gcm | CooperationScheme::SingleGatewayRef => (0..g_count).map(full).collect(),
        CooperationScheme::Icm => (0..g_count)
            .map(|c| if c == g { full(c) } else { BlockCsi::Unknown })
            .collect(),
        CooperationScheme::GroupCollab { group_size } => {
            let mine = layout.cooperation_set(g, group_size);
            (0..g_count)
                .map(|c| if mine.contains(&c) { full(c) } else { BlockCsi::Unknown })
                .collect()
        }
        CooperationScheme::Lmc => (0..g_count)
            .map(|c| {
                if c == g {
                    full(c)
                } else if layout.adjacent_clusters(g).contains(&c) {
                    let r = rank_one_compress(&channel.cluster_block(g, c));
                    BlockCsi::RankOne { sigma: r.sigma, v: r.v }
                } else {
                    BlockCsi::Unknown
                }
            })
            .collect(),
    };
    CsiView { gateway: g, blocks }
}

/// Builds gateway `g`'s precoder block from its view.
///
/// A view with no foreign information is the ICM design. Otherwise rank-one rows are nulled
/// in feed space first, and the two-stage design runs on the known full rows (own cluster
/// included) of the projected channel. Unknown clusters are simply absent.
pub fn precoder_for_view(
    view: &CsiView,
    layout: &ClusterLayout,
    power: f64,
    inner: InnerStage,
) -> Result<GatewayPrecoder> {
    let g = view.gateway;
    let g_count = layout.num_gateways();
    let n_g = layout.feed_count(g);
    if view.blocks.len() != g_count {
        return Err(Error::DimensionMismatch(format!(
            "view has {} blocks for {g_count} clusters",
            view.blocks.len()
        )));
    }
    let own = match &view.blocks[g] {
        BlockCsi::Full(m) => m,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "gateway {g} must know its own cluster block"
            )))
        }
    };
    let foreign_full = (0..g_count)
        .filter(|&c| c != g && matches!(view.blocks[c], BlockCsi::Full(_)))
        .count();
    let pairs: BTreeMap<usize, (f64, CVector)> = view
        .blocks
        .iter()
        .enumerate()
        .filter_map(|(c, b)| match b {
            BlockCsi::RankOne { sigma, v } => Some((c, (*sigma, v.clone()))),
            _ => None,
        })
        .collect();

    if foreign_full == 0 && pairs.is_empty() {
        let (block, w, beta) = icm_precoder_with(own, inner, power, g_count)?;
        return Ok(GatewayPrecoder {
            gateway: g,
            inner: w,
            projector: CMatrix::zeros(0, 0),
            block,
            beta,
            null_space: None,
        });
    }

    // Feed-space projector from the rank-one summaries (identity when there are none).
    let feed_projector = if pairs.is_empty() {
        identity(n_g)
    } else {
        let scope: Vec<usize> = pairs.keys().copied().collect();
        let g_mat = build_compressed_interference(g, &pairs, &scope, n_g)?;
        let (basis, _) = right_null_space(&g_mat, NULL_TOLERANCE);
        if basis.ncols() >= own.nrows() {
            basis
        } else {
            // Too few exact null directions: keep the least-interfering ones instead.
            least_right_singular_vectors(&g_mat, own.nrows())
        }
    };

    // Known full rows in beam order, with the own cluster's positions recorded.
    let mut known_rows: Vec<CMatrix> = Vec::new();
    let mut own_rows = Vec::new();
    let mut offset = 0;
    for (c, b) in view.blocks.iter().enumerate() {
        if let BlockCsi::Full(m) = b {
            if c == g {
                own_rows.extend(offset..offset + m.nrows());
            }
            offset += m.nrows();
            known_rows.push(m.clone());
        }
    }
    let mut h_known = CMatrix::zeros(offset, n_g);
    let mut r = 0;
    for m in &known_rows {
        h_known.view_mut((r, 0), (m.nrows(), n_g)).copy_from(m);
        r += m.nrows();
    }
    if pairs.is_empty() {
        return block_svd_precoder(g, &h_known, &own_rows, g_count, power, inner);
    }
    let projected = &h_known * &feed_projector;
    let mut gp = block_svd_precoder(g, &projected, &own_rows, g_count, power, inner)?;
    // Q has orthonormal columns, so the power normalization carries over.
    gp.block = &feed_projector * &gp.block;
    Ok(gp)
}

/// Precoder for the whole system under `scheme`.
pub fn scheme_precoder(
    scheme: CooperationScheme,
    channel: &ChannelMatrix,
    power: f64,
    inner: InnerStage,
) -> Result<PrecoderSet> {
    let layout = channel.layout();
    match scheme {
        CooperationScheme::SingleGatewayRef => single_gateway(channel, power, inner),
        CooperationScheme::Icm => individual_clusters(channel, power, inner),
        CooperationScheme::Gcm => full_cooperation(channel, power, inner),
        _ => {
            let gateways = (0..layout.num_gateways())
                .map(|g| precoder_for_view(&effective_csi(scheme, g, channel), layout, power, inner))
                .collect::<Result<Vec<_>>>()?;
            PrecoderSet::from_gateways(layout, Structure::BlockSvd, inner, gateways)
        }
    }
}

/// Layout parameters for the closed-form overhead counts (uniform clusters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadParams {
    /// Feeds per gateway `N_g`.
    pub feeds_per_gateway: u64,
    /// Total beams `K`.
    pub num_beams: u64,
    /// Beams per cluster `K_g`.
    pub beams_per_cluster: u64,
    /// Gateways `G`.
    pub num_gateways: u64,
}

/// Complex numbers exchanged between gateways.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overhead {
    pub per_gateway: Vec<u64>,
    pub total: u64,
}

/// Overhead for uniform clusters.
///
/// Full sharing costs `N_g(K−K_g)G` per gateway, summed over all `G` gateways; LMC costs
/// `N_g(G−1)` per gateway. Group schemes sum the full-sharing cost over the `s` members of
/// one group.
pub fn overhead_count(scheme: CooperationScheme, p: OverheadParams) -> Result<Overhead> {
    if p.beams_per_cluster > p.num_beams || p.num_gateways == 0 {
        return Err(Error::InvalidParameter(format!("inconsistent overhead parameters {p:?}")));
    }
    let g = p.num_gateways as usize;
    let full = p.feeds_per_gateway * (p.num_beams - p.beams_per_cluster) * p.num_gateways;
    Ok(match scheme {
        CooperationScheme::Icm | CooperationScheme::SingleGatewayRef => Overhead {
            per_gateway: vec![0; g],
            total: 0,
        },
        CooperationScheme::Gcm => Overhead {
            per_gateway: vec![full; g],
            total: full * p.num_gateways,
        },
        CooperationScheme::Lmc => {
            let each = p.feeds_per_gateway * (p.num_gateways - 1);
            Overhead {
                per_gateway: vec![each; g],
                total: each * p.num_gateways,
            }
        }
        CooperationScheme::GroupCollab { group_size } => {
            let s = (group_size as u64).min(p.num_gateways);
            Overhead {
                per_gateway: vec![full; g],
                total: full * s,
            }
        }
    })
}

/// Overhead for an arbitrary layout, evaluating the formulas gateway by gateway.
///
/// Group schemes report the largest cooperation set's volume.
pub fn overhead_for_layout(scheme: CooperationScheme, layout: &ClusterLayout) -> Overhead {
    let g_count = layout.num_gateways();
    let k = layout.num_beams() as u64;
    let full = |g: usize| {
        layout.feed_count(g) as u64 * (k - layout.cluster_size(g) as u64) * g_count as u64
    };
    match scheme {
        CooperationScheme::Icm | CooperationScheme::SingleGatewayRef => Overhead {
            per_gateway: vec![0; g_count],
            total: 0,
        },
        CooperationScheme::Gcm => {
            let per: Vec<u64> = (0..g_count).map(full).collect();
            Overhead {
                total: per.iter().sum(),
                per_gateway: per,
            }
        }
        CooperationScheme::Lmc => {
            let per: Vec<u64> = (0..g_count)
                .map(|g| layout.feed_count(g) as u64 * (g_count as u64 - 1))
                .collect();
            Overhead {
                total: per.iter().sum(),
                per_gateway: per,
            }
        }
        CooperationScheme::GroupCollab { group_size } => {
            let per: Vec<u64> = (0..g_count).map(full).collect();
            let total = (0..g_count)
                .map(|g| layout.cooperation_set(g, group_size).iter().map(|&c| per[c]).sum::<u64>())
                .max()
                .unwrap_or(0);
            Overhead {
                per_gateway: per,
                total,
            }
        }
    }
}
