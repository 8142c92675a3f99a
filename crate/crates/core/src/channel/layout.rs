use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of beams to clusters and feeds to gateways.
///
/// Cluster `g` is served by gateway `g`. Feed ranges are contiguous and ordered by gateway,
/// so the channel splits column-wise as `H = (H_1, ..., H_G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLayout {
    num_beams: usize,
    num_feeds: usize,
    beams_of_cluster: Vec<Vec<usize>>,
    feeds_of_gateway: Vec<Range<usize>>,
    /// Symmetric cluster adjacency; `adjacency[g]` never contains `g`.
    adjacency: Vec<BTreeSet<usize>>,
    /// Representative position of each cluster, used to form cooperation groups.
    centers: Vec<[f64; 2]>,
}

impl ClusterLayout {
    /// Builds a layout from explicit beam sets and feed counts. Adjacency defaults to a chain
    /// (`g` adjacent to `g±1`) and centers to points on a line.
    pub fn new(beams_of_cluster: Vec<Vec<usize>>, feeds_per_gateway: &[usize]) -> Result<Self> {
        let g = beams_of_cluster.len();
        let adjacency = (0..g)
            .map(|i| {
                let mut s = BTreeSet::new();
                if i > 0 {
                    s.insert(i - 1);
                }
                if i + 1 < g {
                    s.insert(i + 1);
                }
                s
            })
            .collect();
        let centers = (0..g).map(|i| [i as f64, 0.0]).collect();
        Self::with_topology(beams_of_cluster, feeds_per_gateway, adjacency, centers)
    }

    pub fn with_topology(
        beams_of_cluster: Vec<Vec<usize>>,
        feeds_per_gateway: &[usize],
        adjacency: Vec<BTreeSet<usize>>,
        centers: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let g = beams_of_cluster.len();
        if g == 0 {
            return Err(Error::InvalidLayout("at least one gateway is required".into()));
        }
        if feeds_per_gateway.len() != g || adjacency.len() != g || centers.len() != g {
            return Err(Error::InvalidLayout(format!(
                "{g} clusters but {} feed groups, {} adjacency sets, {} centers",
                feeds_per_gateway.len(),
                adjacency.len(),
                centers.len()
            )));
        }
        let num_beams: usize = beams_of_cluster.iter().map(Vec::len).sum();
        let mut seen = vec![false; num_beams];
        for (ci, beams) in beams_of_cluster.iter().enumerate() {
            if beams.is_empty() {
                return Err(Error::InvalidLayout(format!("cluster {ci} has no beams")));
            }
            for &b in beams {
                if b >= num_beams || seen[b] {
                    return Err(Error::InvalidLayout(format!(
                        "beam {b} is out of range or assigned twice"
                    )));
                }
                seen[b] = true;
            }
        }
        let mut feeds_of_gateway = Vec::with_capacity(g);
        let mut start = 0;
        for (gi, (&n_g, beams)) in feeds_per_gateway.iter().zip(&beams_of_cluster).enumerate() {
            if n_g < beams.len() {
                return Err(Error::InvalidLayout(format!(
                    "gateway {gi} has {n_g} feeds for {} beams (need K_g <= N_g)",
                    beams.len()
                )));
            }
            feeds_of_gateway.push(start..start + n_g);
            start += n_g;
        }
        for (gi, adj) in adjacency.iter().enumerate() {
            for &o in adj {
                if o >= g || o == gi || !adjacency[o].contains(&gi) {
                    return Err(Error::InvalidLayout(format!(
                        "adjacency of cluster {gi} is not symmetric or references {o}"
                    )));
                }
            }
        }
        Ok(Self {
            num_beams,
            num_feeds: start,
            beams_of_cluster,
            feeds_of_gateway,
            adjacency,
            centers,
        })
    }

    /// `G` clusters of `k_g` consecutive beams, each with `n_g` feeds.
    pub fn uniform(num_gateways: usize, k_g: usize, n_g: usize) -> Result<Self> {
        let beams = (0..num_gateways)
            .map(|g| (g * k_g..(g + 1) * k_g).collect())
            .collect();
        Self::new(beams, &vec![n_g; num_gateways])
    }

    /// One gateway owning every beam and feed.
    pub fn single(num_beams: usize, num_feeds: usize) -> Result<Self> {
        Self::new(vec![(0..num_beams).collect()], &[num_feeds])
    }

    pub fn num_beams(&self) -> usize {
        self.num_beams
    }

    pub fn num_feeds(&self) -> usize {
        self.num_feeds
    }

    pub fn num_gateways(&self) -> usize {
        self.beams_of_cluster.len()
    }

    pub fn beams_of_cluster(&self, g: usize) -> &[usize] {
        &self.beams_of_cluster[g]
    }

    pub fn feeds_of_gateway(&self, g: usize) -> Range<usize> {
        self.feeds_of_gateway[g].clone()
    }

    pub fn cluster_size(&self, g: usize) -> usize {
        self.beams_of_cluster[g].len()
    }

    pub fn feed_count(&self, g: usize) -> usize {
        self.feeds_of_gateway[g].len()
    }

    pub fn adjacent_clusters(&self, g: usize) -> &BTreeSet<usize> {
        &self.adjacency[g]
    }

    pub fn center(&self, g: usize) -> [f64; 2] {
        self.centers[g]
    }

    pub fn cluster_of_beam(&self, beam: usize) -> usize {
        self.beams_of_cluster
            .iter()
            .position(|b| b.contains(&beam))
            .expect("beam index within layout")
    }

    /// Beam-to-cluster lookup table.
    pub fn beam_clusters(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_beams];
        for (g, beams) in self.beams_of_cluster.iter().enumerate() {
            for &b in beams {
                out[b] = g;
            }
        }
        out
    }

    /// Beams of all clusters except `g`, in cluster order.
    pub fn beams_outside(&self, g: usize) -> Vec<usize> {
        (0..self.num_gateways())
            .filter(|&c| c != g)
            .flat_map(|c| self.beams_of_cluster[c].iter().copied())
            .collect()
    }

    /// Gateway `g` and the `size − 1` clusters nearest to it by center distance (ties by
    /// index), sorted. Capped at the number of gateways.
    pub fn cooperation_set(&self, g: usize, size: usize) -> Vec<usize> {
        let d = |c: usize| {
            let (a, b) = (self.centers[g], self.centers[c]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        };
        let mut others: Vec<usize> = (0..self.num_gateways()).filter(|&c| c != g).collect();
        others.sort_by(|&a, &b| d(a).total_cmp(&d(b)).then(a.cmp(&b)));
        let mut set: Vec<usize> = std::iter::once(g)
            .chain(others.into_iter().take(size.max(1) - 1))
            .collect();
        set.sort_unstable();
        set
    }
}
