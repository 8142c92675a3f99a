use mgw_precoding::cooperation::{
    effective_csi, overhead_count, overhead_for_layout, rank_one_compress, scheme_precoder, CooperationScheme,
    OverheadParams,
};
use mgw_precoding::harness::rng::{stream_rng, Stream};
use mgw_precoding::harness::verify::complex_gaussian;
use mgw_precoding::harness::{Experiment, ExperimentConfig, Preset};
use mgw_precoding::linalg::{energy, singular_values, CMatrix};
use mgw_precoding::precoder::{leakage_ratio, Flavor, InnerStage, MmseRegularization};

fn table_layout() -> OverheadParams {
    OverheadParams {
        feeds_per_gateway: 11,
        num_beams: 100,
        beams_per_cluster: 7,
        num_gateways: 14,
    }
}

#[test]
fn signalling_volumes_match_the_published_table() {
    let p = table_layout();
    let total = |s| overhead_count(s, p).unwrap().total;
    assert_eq!(total(CooperationScheme::Gcm), 200_508);
    assert_eq!(total(CooperationScheme::GroupCollab { group_size: 7 }), 100_254);
    assert_eq!(total(CooperationScheme::GroupCollab { group_size: 4 }), 57_288);
    assert_eq!(overhead_count(CooperationScheme::Lmc, p).unwrap().per_gateway[0], 143);
    assert_eq!(total(CooperationScheme::Icm), 0);
}

#[test]
fn group_volume_is_linear_in_group_size() {
    // N_g(K−K_g)G = 11·93·14 per gateway
    for s in 1..=14 {
        let o = overhead_count(CooperationScheme::GroupCollab { group_size: s }, table_layout()).unwrap();
        assert_eq!(o.total, 14_322 * s as u64);
    }
}

#[test]
fn rank_one_residual_is_the_tail_energy() {
    let h = complex_gaussian(&mut stream_rng(8, Stream::Instance), 7, 11);
    let r = rank_one_compress(&h);
    let u = &h * &r.v / mgw_precoding::linalg::c(r.sigma, 0.0);
    let residual = &h - (&u * r.v.adjoint()).scale(r.sigma);
    let s = singular_values(&h);
    let tail: f64 = s.iter().skip(1).map(|x| x * x).sum();
    assert!((s[0] - r.sigma).abs() < 1e-12 * s[0]);
    assert!((energy(&residual) - tail).abs() < 1e-10 * energy(&h));
}

#[test]
fn rank_one_of_zero_block_is_flagged() {
    let r = rank_one_compress(&CMatrix::zeros(3, 4));
    assert!(r.degenerate);
    assert_eq!(r.sigma, 0.0);
}

#[test]
fn group_views_at_full_scale() {
    let exp = Experiment::new(ExperimentConfig::preset(Preset::Full)).unwrap();
    let ch = exp.channel(0).unwrap().user_link;
    for g in 0..14 {
        let v = effective_csi(CooperationScheme::GroupCollab { group_size: 4 }, g, &ch);
        assert_eq!((v.count_full(), v.count_unknown()), (4, 10), "gateway {g}");
        let v = effective_csi(CooperationScheme::Gcm, g, &ch);
        assert_eq!(v.count_full(), 14);
        let v = effective_csi(CooperationScheme::Icm, g, &ch);
        assert_eq!((v.count_full(), v.count_unknown()), (1, 13));
        let v = effective_csi(CooperationScheme::Lmc, g, &ch);
        assert_eq!(v.count_full(), 1);
        assert_eq!(v.count_rank_one(), ch.layout().adjacent_clusters(g).len());
    }
}

#[test]
fn layout_overheads_agree_with_closed_form_on_uniform_clusters() {
    // 14 uniform clusters of 7 give K = 98
    let layout = mgw_precoding::channel::ClusterLayout::uniform(14, 7, 11).unwrap();
    let p = OverheadParams {
        num_beams: 98,
        ..table_layout()
    };
    for s in [
        CooperationScheme::Gcm,
        CooperationScheme::Lmc,
        CooperationScheme::GroupCollab { group_size: 4 },
        CooperationScheme::GroupCollab { group_size: 7 },
    ] {
        assert_eq!(overhead_for_layout(s, &layout), overhead_count(s, p).unwrap(), "{s}");
    }
}

#[test]
fn limited_cooperation_leaks_between_isolated_and_full() {
    let cfg = ExperimentConfig::default();
    let exp = Experiment::new(cfg.clone()).unwrap();
    let p = cfg.power_w();
    let inner = InnerStage::new(Flavor::Mmse, MmseRegularization::Standard, 3, p);
    let mut mean = [0.0; 3];
    let drops = 100;
    for d in 0..drops {
        let ch = exp.channel(d).unwrap().user_link;
        for (i, s) in [CooperationScheme::Icm, CooperationScheme::Lmc, CooperationScheme::Gcm].into_iter().enumerate() {
            let set = scheme_precoder(s, &ch, p, inner).unwrap();
            for g in 0..3 {
                mean[i] += leakage_ratio(&ch, g, &set.gateways[g].block) / (3 * drops) as f64;
            }
        }
    }
    let [icm, lmc, gcm] = mean;
    assert!(gcm < lmc && lmc < icm, "icm {icm}, lmc {lmc}, gcm {gcm}");
}

#[test]
fn full_cooperation_beats_isolation_on_the_regional_layout() {
    let mut cfg = ExperimentConfig::preset(Preset::Regional);
    cfg.run.drops = 100;
    let exp = Experiment::new(cfg).unwrap();
    let mean = |s| {
        let r = exp.run_scheme(s).unwrap();
        r.iter().map(|d| d.sum_efficiency()).sum::<f64>() / (r.len() * 56) as f64
    };
    let (icm, gcm) = (mean(CooperationScheme::Icm), mean(CooperationScheme::Gcm));
    assert!(icm < gcm, "icm {icm}, gcm {gcm}");
}

#[test]
fn scenario_ids_round_trip() {
    for id in 1..=5u8 {
        let s = CooperationScheme::from_scenario(id).unwrap();
        assert_eq!(s.scenario(), Some(id));
        assert_eq!(s.to_string().parse::<CooperationScheme>().unwrap(), s);
    }
    assert!(CooperationScheme::from_scenario(9).is_err());
}
