use mgw_precoding::channel::ClusterLayout;
use mgw_precoding::harness::rng::{stream_rng, Stream};
use mgw_precoding::harness::verify::complex_gaussian;
use mgw_precoding::harness::{Experiment, ExperimentConfig};
use mgw_precoding::impairments::{
    feed_subset_limit, feeder_matrix, interferers_of, quantize_csi, quantize_entry, dequantize_entry,
    round_decimal, CsiImpairment, FeederLinkModel, QuantizerSpec,
};
use mgw_precoding::linalg::{c, identity, CMatrix, C64};
use mgw_precoding::metrics::{smse, smse_from_eigenvalues, check_smse_ordering};
use proptest::prelude::*;
use rand::Rng;

fn block(h: &CMatrix, layout: &ClusterLayout, i: usize, j: usize) -> CMatrix {
    let (r, c) = (layout.feeds_of_gateway(i), layout.feeds_of_gateway(j));
    h.view((r.start, c.start), (r.len(), c.len())).into_owned()
}

#[test]
fn full_coupling_blocks_are_all_ones() {
    let layout = ClusterLayout::uniform(3, 2, 3).unwrap();
    let h = feeder_matrix(&FeederLinkModel::new(1.0, 2).unwrap(), &layout).unwrap();
    let ones = CMatrix::from_element(3, 3, c(1.0, 0.0));
    assert_eq!(block(&h, &layout, 0, 1), ones);
    assert_eq!(block(&h, &layout, 0, 2), ones);
    assert_eq!(block(&h, &layout, 1, 1), identity(3));

    let h = feeder_matrix(&FeederLinkModel::new(0.5, 2).unwrap(), &layout).unwrap();
    assert_eq!(block(&h, &layout, 0, 2), CMatrix::from_element(3, 3, c(0.25, 0.0)));
    assert_eq!(block(&h, &layout, 2, 1), CMatrix::from_element(3, 3, c(0.5, 0.0)));
}

#[test]
fn nearest_interferer_ties_go_to_the_lower_index() {
    assert_eq!(interferers_of(1, 3, 1), vec![0]);
    assert_eq!(interferers_of(0, 3, 1), vec![1]);
    let mut near = interferers_of(5, 14, 3);
    near.sort();
    assert_eq!(near, vec![3, 4, 6]);
    assert!(feeder_matrix(&FeederLinkModel::new(1.0, 3).unwrap(), &ClusterLayout::uniform(3, 2, 3).unwrap()).is_err());
}

#[test]
fn quantizer_error_stays_within_one_half_step() {
    let spec = QuantizerSpec::default();
    let half = 0.5 * spec.step();
    let mut rng = stream_rng(99, Stream::Instance);
    for _ in 0..100_000 {
        let mag = rng.random_range(0.0..999.0);
        let phase = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let z = C64::from_polar(mag, phase);
        let q = quantize_entry(z, &spec);
        let back = dequantize_entry(q, &spec);
        let bound = half + mag * (half * std::f64::consts::PI / 180.0) + 1e-12 * (1.0 + mag);
        assert!((back - z).norm() <= bound, "{z} -> {back}");
        assert!((back.norm() - mag).abs() <= half + 1e-12 * (1.0 + mag));
    }
}

#[test]
fn decimal_rounding_follows_the_written_digits() {
    assert_eq!(round_decimal(0.12345, 4), 1235);
    assert_eq!(round_decimal(0.12344999, 4), 1234);
    assert_eq!(round_decimal(2.5, 0), 3);
    assert_eq!(round_decimal(359.99996, 4), 3_600_000);
    // 359.99996 degrees wraps to zero
    let q = quantize_entry(C64::from_polar(1.0, 359.99996f64.to_radians()), &QuantizerSpec::default());
    assert_eq!(q.phase, 0);
}

#[test]
fn mask_keeps_the_strongest_feeds() {
    let row = [3.0, 1.0, 2.0, 2.0, 0.5];
    let h = CMatrix::from_fn(1, 5, |_, j| c(row[j], 0.0));
    let m = feed_subset_limit(&h, 3).unwrap();
    // the 2.0 tie keeps both; the weaker entries go
    let kept: Vec<bool> = (0..5).map(|j| m[(0, j)] != c(0.0, 0.0)).collect();
    assert_eq!(kept, vec![true, false, true, true, false]);
    let m = feed_subset_limit(&h, 2).unwrap();
    let kept: Vec<bool> = (0..5).map(|j| m[(0, j)] != c(0.0, 0.0)).collect();
    assert_eq!(kept, vec![true, false, true, false, false]);
    assert!(feed_subset_limit(&h, 0).is_err());
}

#[test]
fn feeder_coupling_lowers_sinr() {
    let base = ExperimentConfig::default();
    let mut coupled = base.clone();
    coupled.feeder.rho = 1.0;
    coupled.feeder.num_interferers = 1;
    let (a, b) = (Experiment::new(base).unwrap(), Experiment::new(coupled).unwrap());
    let (mut clean, mut dirty) = (0.0, 0.0);
    for d in 0..100 {
        let ra = a.run_drop(d).unwrap();
        let rb = b.run_drop(d).unwrap();
        assert_eq!(ra.seed, rb.seed);
        clean += ra.users.iter().map(|u| u.sinr).sum::<f64>();
        dirty += rb.users.iter().map(|u| u.sinr).sum::<f64>();
    }
    assert!(dirty < clean, "{dirty} vs {clean}");
}

#[test]
fn smse_pair_by_hand() {
    // eigenvalues pushed down by the coupling raise the SMSE
    let clean = smse_from_eigenvalues(&[3.0, 1.0], 1, 1.0);
    let coupled = smse_from_eigenvalues(&[2.0, 0.5], 1, 1.0);
    assert!((clean - 0.75).abs() < 1e-15);
    assert!((coupled - 1.0).abs() < 1e-15);
    assert!(coupled - clean > 0.0);
}

#[test]
fn coherent_coupling_can_lower_smse() {
    // Two one-feed gateways, ρ = 1: H_f = [[1, 1], [1, 1]] and H_u = [1, 1] give
    // λ = 8 against λ = 2, so the coupled SMSE is smaller.
    let layout = ClusterLayout::uniform(2, 1, 1).unwrap();
    let hf = feeder_matrix(&FeederLinkModel::new(1.0, 1).unwrap(), &layout).unwrap();
    let hu = CMatrix::from_element(1, 2, c(1.0, 0.0));
    let pair = smse(&hu, &hf, 2, 10.0).unwrap();
    assert!((pair.eigen_no_interference[0] - 2.0).abs() < 1e-12);
    assert!((pair.eigen_interference[0] - 8.0).abs() < 1e-12);
    assert!(!check_smse_ordering(&hu, &hf, 2, 10.0).unwrap().holds);
}

#[test]
fn perfect_impairment_is_the_identity() {
    let h = complex_gaussian(&mut stream_rng(4, Stream::Instance), 4, 40);
    assert_eq!(CsiImpairment::perfect().apply(&h).unwrap(), h);
    let lim = CsiImpairment {
        quantized: true,
        max_feeds: Some(31),
        spec: QuantizerSpec::default(),
    };
    let seen = lim.apply(&h).unwrap();
    for r in 0..4 {
        assert_eq!(seen.row(r).iter().filter(|z| z.norm() > 0.0).count(), 31);
    }
}

fn arb_matrix() -> impl Strategy<Value = CMatrix> {
    (1usize..6, 1usize..8, any::<u64>()).prop_map(|(r, c, seed)| {
        complex_gaussian(&mut stream_rng(seed, Stream::Instance), r, c).scale(10.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantization_is_idempotent(h in arb_matrix()) {
        let spec = QuantizerSpec::default();
        let once = quantize_csi(&h, &spec).unwrap();
        let twice = quantize_csi(&once, &spec).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn coupling_grows_with_rho(g in 2usize..5, n_g in 1usize..4, m_frac in 0.0f64..1.0, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let layout = ClusterLayout::uniform(g, 1, n_g).unwrap();
        let m = ((g - 1) as f64 * m_frac).round() as usize;
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = feeder_matrix(&FeederLinkModel::new(lo, m).unwrap(), &layout).unwrap();
        let b = feeder_matrix(&FeederLinkModel::new(hi, m).unwrap(), &layout).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!(x.norm() <= y.norm());
        }
    }

    #[test]
    fn mask_keeps_at_most_the_limit(h in arb_matrix(), limit in 1usize..8) {
        let m = feed_subset_limit(&h, limit).unwrap();
        for r in 0..h.nrows() {
            let kept = m.row(r).iter().filter(|z| z.norm() > 0.0).count();
            prop_assert!(kept <= limit.min(h.ncols()));
            let min_kept = m.row(r).iter().filter(|z| z.norm() > 0.0).map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            let max_dropped = (0..h.ncols()).filter(|&j| m[(r, j)].norm() == 0.0).map(|j| h[(r, j)].norm()).fold(0.0, f64::max);
            prop_assert!(max_dropped <= min_kept);
        }
    }
}
