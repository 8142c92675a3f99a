//! Hexagonal beam grid partitioned into 7-beam clusters (a center beam plus its ring).

use std::collections::{BTreeMap, BTreeSet};

use crate::channel::layout::ClusterLayout;
use crate::error::{Error, Result};

/// Axial hex coordinate.
type Hex = (i32, i32);

const NEIGHBORS: [Hex; 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// Beams per cluster supported by the generator.
pub const CLUSTER_SIZE: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexGridSpec {
    pub num_beams: usize,
    pub cluster_size: usize,
    pub feeds_per_beam: f64,
    /// Angular distance between adjacent beam centers, degrees.
    pub spacing_deg: f64,
}

/// Layout plus the angular positions (degrees, antenna frame) of beams and feeds.
#[derive(Debug, Clone)]
pub struct HexGrid {
    pub layout: ClusterLayout,
    pub beam_centers: Vec<[f64; 2]>,
    pub feed_boresights: Vec<[f64; 2]>,
}

fn to_xy(h: Hex) -> [f64; 2] {
    let (q, r) = (h.0 as f64, h.1 as f64);
    [q + r / 2.0, r * 3f64.sqrt() / 2.0]
}

fn add(a: Hex, b: Hex) -> Hex {
    (a.0 + b.0, a.1 + b.1)
}

fn are_neighbors(a: Hex, b: Hex) -> bool {
    NEIGHBORS.contains(&(b.0 - a.0, b.1 - a.1))
}

/// Radial-then-angular order around the origin, used for deterministic selection.
fn polar_key(p: [f64; 2]) -> (f64, f64) {
    let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let mut a = p[1].atan2(p[0]);
    if a < -1e-12 {
        a += std::f64::consts::TAU;
    }
    // quantize so that rounding noise cannot reorder equidistant points
    ((r * 1e9).round(), (a.max(0.0) * 1e9).round())
}

fn sort_polar<T: Copy>(items: &mut [T], pos: impl Fn(T) -> [f64; 2]) {
    items.sort_by(|&a, &b| {
        let (ka, kb) = (polar_key(pos(a)), polar_key(pos(b)));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
}

pub fn hex_grid(spec: &HexGridSpec) -> Result<HexGrid> {
    if spec.cluster_size != CLUSTER_SIZE {
        return Err(Error::InvalidParameter(format!(
            "hexagonal clustering supports clusters of {CLUSTER_SIZE} beams, got {}",
            spec.cluster_size
        )));
    }
    if spec.num_beams < CLUSTER_SIZE {
        return Err(Error::InvalidParameter(format!(
            "need at least {CLUSTER_SIZE} beams, got {}",
            spec.num_beams
        )));
    }
    if !(spec.spacing_deg > 0.0) || !(spec.feeds_per_beam >= 1.0) {
        return Err(Error::InvalidParameter(
            "grid spacing must be positive and feeds per beam at least 1".into(),
        ));
    }
    let num_clusters = spec.num_beams / CLUSTER_SIZE;

    // Cluster centers on the lattice spanned by (2,1) and (-1,3).
    let span = (num_clusters as f64).sqrt().ceil() as i32 + 2;
    let mut centers: Vec<Hex> = Vec::new();
    for a in -span..=span {
        for b in -span..=span {
            centers.push((2 * a - b, a + 3 * b));
        }
    }
    sort_polar(&mut centers, to_xy);
    centers.truncate(num_clusters);

    let mut owner: BTreeMap<Hex, usize> = BTreeMap::new();
    let mut cells: Vec<Vec<Hex>> = centers
        .iter()
        .enumerate()
        .map(|(g, &c)| {
            let mut v = vec![c];
            v.extend(NEIGHBORS.iter().map(|&n| add(c, n)));
            for &h in &v {
                owner.insert(h, g);
            }
            v
        })
        .collect();

    // Remaining beams: nearest free cells, each joining the closest cluster.
    let extra = spec.num_beams - num_clusters * CLUSTER_SIZE;
    if extra > 0 {
        let mut free: Vec<Hex> = Vec::new();
        let r = span * 3;
        for q in -r..=r {
            for s in -r..=r {
                if !owner.contains_key(&(q, s))
                    && owner.keys().any(|&o| are_neighbors(o, (q, s)))
                {
                    free.push((q, s));
                }
            }
        }
        sort_polar(&mut free, to_xy);
        for &h in free.iter().take(extra) {
            let p = to_xy(h);
            let g = (0..num_clusters)
                .min_by(|&a, &b| {
                    let da = dist(p, to_xy(centers[a]));
                    let db = dist(p, to_xy(centers[b]));
                    da.total_cmp(&db)
                        .then(cells[a].len().cmp(&cells[b].len()))
                        .then(a.cmp(&b))
                })
                .expect("at least one cluster");
            owner.insert(h, g);
            cells[g].push(h);
        }
    }

    let mut adjacency = vec![BTreeSet::new(); num_clusters];
    for (&h, &g) in &owner {
        for n in NEIGHBORS {
            if let Some(&o) = owner.get(&add(h, n)) {
                if o != g {
                    adjacency[g].insert(o);
                }
            }
        }
    }

    let s = spec.spacing_deg;
    let scale = |p: [f64; 2]| [p[0] * s, p[1] * s];
    let mut beam_centers = Vec::with_capacity(spec.num_beams);
    let mut beams_of_cluster = Vec::with_capacity(num_clusters);
    let mut feed_boresights = Vec::new();
    let mut feeds_per_gateway = Vec::with_capacity(num_clusters);
    for cluster in &cells {
        let first = beam_centers.len();
        beam_centers.extend(cluster.iter().map(|&h| scale(to_xy(h))));
        beams_of_cluster.push((first..beam_centers.len()).collect());

        let k_g = cluster.len();
        let n_g = ((spec.feeds_per_beam * k_g as f64).round() as usize).max(k_g);
        let mut feeds: Vec<[f64; 2]> = cluster.iter().map(|&h| to_xy(h)).collect();
        let extra_feeds = extra_feed_points(cluster);
        if n_g - k_g > extra_feeds.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot place {n_g} feeds over a {k_g}-beam cluster"
            )));
        }
        feeds.extend(extra_feeds.into_iter().take(n_g - k_g));
        feed_boresights.extend(feeds.into_iter().map(scale));
        feeds_per_gateway.push(n_g);
    }

    let cluster_centers = centers.iter().map(|&c| scale(to_xy(c))).collect();
    let layout = ClusterLayout::with_topology(
        beams_of_cluster,
        &feeds_per_gateway,
        adjacency,
        cluster_centers,
    )?;
    Ok(HexGrid {
        layout,
        beam_centers,
        feed_boresights,
    })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Candidate positions for feeds beyond one per beam: centroids of mutually adjacent beam
/// triples, then midpoints of adjacent pairs, both ordered around the cluster's first cell.
fn extra_feed_points(cluster: &[Hex]) -> Vec<[f64; 2]> {
    let origin = to_xy(cluster[0]);
    let rel = |p: [f64; 2]| [p[0] - origin[0], p[1] - origin[1]];
    let mut triangles = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..cluster.len() {
        for j in i + 1..cluster.len() {
            if !are_neighbors(cluster[i], cluster[j]) {
                continue;
            }
            let (a, b) = (to_xy(cluster[i]), to_xy(cluster[j]));
            pairs.push(rel([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]));
            for k in j + 1..cluster.len() {
                if are_neighbors(cluster[i], cluster[k]) && are_neighbors(cluster[j], cluster[k]) {
                    let c = to_xy(cluster[k]);
                    triangles.push(rel([
                        (a[0] + b[0] + c[0]) / 3.0,
                        (a[1] + b[1] + c[1]) / 3.0,
                    ]));
                }
            }
        }
    }
    sort_polar(&mut triangles, |p| p);
    sort_polar(&mut pairs, |p| p);
    triangles
        .into_iter()
        .chain(pairs)
        .map(|p| [p[0] + origin[0], p[1] + origin[1]])
        .collect()
}
