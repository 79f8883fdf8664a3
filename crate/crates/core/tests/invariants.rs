use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qualcomp::best_response::{best_response, is_nash_equilibrium};
use qualcomp::equilibrium::solve_homogeneous;
use qualcomp::model::{
    isp_demand, isp_demands, path_valuations, profit, profit_breakdown, profits,
    selection_probability,
};
use qualcomp::netgen::build_homogeneous;
use qualcomp::{sampling, AttributeMatrix, NetworkModel};

fn instance(seed: u64, max_attribute: f64) -> (NetworkModel, AttributeMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = sampling::single_market_model(&mut rng);
    let a = sampling::attributes(&mut rng, &model, max_attribute);
    (model, a)
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn selection_probabilities_form_a_sub_distribution(seed in any::<u64>(), max in 0.0..20.0f64) {
        let (model, a) = instance(seed, max);
        for (i, market) in model.markets.iter().enumerate() {
            let mut total = 0.0;
            for &r in &market.paths {
                let p = selection_probability(&model, &a, i, r).unwrap();
                prop_assert!((0.0..1.0).contains(&p));
                total += p;
            }
            prop_assert!(total < 1.0);
        }
    }

    #[test]
    fn demand_is_bounded_and_consistent(seed in any::<u64>(), max in 0.0..20.0f64) {
        let (model, a) = instance(seed, max);
        let limit: f64 = model.markets.iter().map(|m| m.demand_limit).sum();
        let all = isp_demands(&model, &a).unwrap();
        for (n, &d) in all.iter().enumerate() {
            prop_assert!(d >= 0.0 && d < limit);
            prop_assert!(close(d, isp_demand(&model, &a, n).unwrap(), 1e-12));
        }
    }

    #[test]
    fn profit_decomposes(seed in any::<u64>(), max in 0.0..20.0f64) {
        let (model, a) = instance(seed, max);
        let batch = profits(&model, &a).unwrap();
        for (n, &expected) in batch.iter().enumerate() {
            let b = profit_breakdown(&model, &a, n).unwrap();
            let recombined = b.revenue - b.demand_dependent_cost - b.demand_independent_cost;
            prop_assert!(close(b.profit, recombined, 1e-12));
            prop_assert!(close(b.profit, expected, 1e-12));
        }
    }

    #[test]
    fn raising_an_attribute_raises_own_valuation_and_demand(
        seed in any::<u64>(),
        bump in 1e-3..5.0f64,
    ) {
        let (model, a) = instance(seed, 5.0);
        let n = (seed % model.num_isps() as u64) as usize;
        let mut b = a.clone();
        b.set(n, 0, a.get(n, 0) + bump);
        let (va, vb) = (path_valuations(&model, &a).unwrap(), path_valuations(&model, &b).unwrap());
        for (r, path) in model.paths.iter().enumerate() {
            if path.contains(n) {
                prop_assert!(vb[r] > va[r]);
            } else {
                prop_assert_eq!(vb[r], va[r]);
            }
        }
        if !model.paths_of_isp(n).is_empty() {
            prop_assert!(isp_demand(&model, &b, n).unwrap() > isp_demand(&model, &a, n).unwrap());
        }
    }

    #[test]
    fn demand_scales_with_demand_limits(seed in any::<u64>(), factor in 0.01..100.0f64) {
        let (model, a) = instance(seed, 5.0);
        let mut scaled = model.clone();
        scaled.markets.iter_mut().for_each(|m| m.demand_limit *= factor);
        let (d, ds) = (isp_demands(&model, &a).unwrap(), isp_demands(&scaled, &a).unwrap());
        for (x, y) in d.iter().zip(&ds) {
            prop_assert!(close(x * factor, *y, 1e-12));
        }
    }

    #[test]
    fn zero_attributes_give_base_valuations(seed in any::<u64>()) {
        let (model, _) = instance(seed, 0.0);
        let values = path_valuations(&model, &model.zero_attributes()).unwrap();
        for (v, path) in values.iter().zip(&model.paths) {
            prop_assert_eq!(*v, path.base_valuation);
        }
    }

    #[test]
    fn best_response_never_loses_profit(seed in any::<u64>(), max in 0.0..10.0f64) {
        let (model, a) = instance(seed, max);
        for n in (0..model.num_isps()).filter(|&n| !model.paths_of_isp(n).is_empty()) {
            for k in 0..model.num_attributes() {
                let x = best_response(&model, &a, n, k).unwrap();
                prop_assert!(x >= 0.0 && x.is_finite());
                let mut b = a.clone();
                b.set(n, k, x);
                let (before, after) = (profit(&model, &a, n).unwrap(), profit(&model, &b, n).unwrap());
                prop_assert!(after >= before - 1e-9 * before.abs().max(1.0));
            }
        }
    }

    #[test]
    fn homogeneous_equilibrium_is_nash_on_the_built_network(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = sampling::homogeneous_spec(&mut rng, 3, 3);
        let eq = solve_homogeneous(&spec).unwrap();
        let model = build_homogeneous(&spec).unwrap();
        prop_assert!(is_nash_equilibrium(&model, &eq.attributes, 1e-6).unwrap().holds);
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>()) {
        let (m1, a1) = instance(seed, 3.0);
        let (m2, a2) = instance(seed, 3.0);
        prop_assert_eq!(m1.to_json().unwrap(), m2.to_json().unwrap());
        prop_assert_eq!(a1, a2);
    }

    #[test]
    fn models_round_trip_through_json(seed in any::<u64>()) {
        let (model, a) = instance(seed, 3.0);
        let back = NetworkModel::from_json(&model.to_json().unwrap()).unwrap();
        prop_assert_eq!(profits(&model, &a).unwrap(), profits(&back, &a).unwrap());
    }
}
