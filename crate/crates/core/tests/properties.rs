use proptest::prelude::*;

use whbench_core::schema::{generate_warehouse, GenerationOptions, ParamSource};
use whbench_core::{
    derive_low_level, generate_workload, parse_check, render_sql, HighLevelParams, SeededRng,
    WorkloadParams,
};

fn high_params() -> impl Strategy<Value = HighLevelParams> {
    (
        (1.0..3.0f64, 1.0..6.0f64, 1.0..8.0f64, 0.0..6.0f64, 0.0..=1.0f64),
        (1.0..5.0f64, 0.0..6.0f64, 1.0..20.0f64, 1.0..10.0f64, 0.0..1.0f64),
    )
        .prop_map(|((ft, dim, tot, meas, density), (levels, att, hh, sf, spread))| {
            HighLevelParams {
                avg_nb_ft: ft,
                avg_nb_dim: dim,
                avg_tot_nb_dim: tot,
                avg_nb_meas: meas,
                avg_density: density,
                avg_nb_levels: levels,
                avg_nb_att: att,
                avg_hhlevel_size: hh,
                dim_sfactor: sf,
                spread,
            }
        })
}

proptest! {
    #[test]
    fn derived_low_level_params_are_valid(high in high_params(), seed in any::<u64>()) {
        let low = derive_low_level(&high, &mut SeededRng::new(seed)).unwrap();
        prop_assert!(low.validate().is_empty(), "{:?}", low.validate());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_queries_round_trip(
        seed in any::<u64>(),
        prob_olap in 0.0..=1.0f64,
        prob_having in 0.0..=1.0f64,
        levels in 1.0..4.0f64,
    ) {
        let high = HighLevelParams {
            avg_nb_dim: 3.0,
            avg_tot_nb_dim: 4.0,
            avg_nb_levels: levels,
            avg_hhlevel_size: 2.0,
            dim_sfactor: 2.0,
            avg_density: 0.05,
            avg_nb_att: 2.0,
            ..HighLevelParams::default()
        };
        let opts = GenerationOptions { max_rows: 100_000, ..GenerationOptions::default() };
        let Ok((wh, _)) = generate_warehouse(&ParamSource::High(high), seed, &opts) else {
            return Ok(());
        };
        let wp = WorkloadParams { nb_q: 40, prob_olap, prob_having, ..WorkloadParams::default() };
        let w = generate_workload(&wh, &wp, &mut SeededRng::new(seed)).unwrap();
        for q in &w.queries {
            q.validate().unwrap();
            let sql = render_sql(q).unwrap();
            prop_assert_eq!(&parse_check(&sql).unwrap(), q);
        }
    }
}
