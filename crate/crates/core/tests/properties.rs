mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::brute_force_labels;
use vnep::decomposition::decompose_novel;
use vnep::extraction::{
    build_extraction_order, for_each_rooted_order, generate_half_wheel, label_order,
    min_width_order_search, ExtractionOrder, SearchStrategy,
};
use vnep::lp::{build_novel, LpSolver, MicroLpSolver, Objective, DEFAULT_VAR_BUDGET};
use vnep::model::{compute_allocations, mapping_cost, ResourceId};
use vnep::oracle::{enumerate_valid_mappings, solve_enumerative, Relaxation, DEFAULT_MAPPING_CAP};
use vnep::pipeline::request_orders;
use vnep::scenario::{
    generate_scenario, random_cactus_topology, random_connected_topology, RequestModel,
    RequestShape, ScenarioSpec, SubstrateModel,
};
use vnep::RawInstance;

fn small_spec(seed: u64, shape: RequestShape, nodes: (usize, usize), count: usize) -> ScenarioSpec {
    ScenarioSpec {
        substrate: SubstrateModel {
            nodes: 4,
            chords: 1,
            types: vec!["cpu".to_string()],
            node_capacity: (1.0, 3.0),
            edge_capacity: (1.0, 3.0),
            cost: (1.0, 5.0),
        },
        request: RequestModel {
            shape,
            nodes,
            allowed_per_node: Some(2),
            node_demand: (0.5, 1.0),
            edge_demand: (0.5, 1.0),
            profit: (1.0, 10.0),
        },
        count,
        seed,
    }
}

fn label_sets(x: &ExtractionOrder) -> Vec<BTreeSet<usize>> {
    label_order(x.clone())
        .labels
        .into_iter()
        .map(|l| l.into_iter().collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn labels_match_confluence_enumeration(seed in any::<u64>(), n in 2usize..7, extra in 0usize..4, root in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = random_connected_topology(n, extra, &mut rng);
        let x = build_extraction_order(&topo, root % n).unwrap();
        prop_assert_eq!(label_sets(&x), brute_force_labels(&x));
    }

    #[test]
    fn incoming_edges_share_labels_and_labels_have_one_root(seed in any::<u64>(), n in 2usize..8, extra in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = random_connected_topology(n, extra, &mut rng);
        let l = label_order(build_extraction_order(&topo, 0).unwrap());
        let x = &l.order;
        for j in 0..n {
            let inc = x.in_edges(j);
            for w in inc.windows(2) {
                prop_assert_eq!(&l.labels[w[0]], &l.labels[w[1]]);
            }
        }
        let all: BTreeSet<usize> = l.labels.iter().flatten().copied().collect();
        for &j in &all {
            let labeled = |e: usize| l.labels[e].contains(&j);
            // nodes emitting label j without receiving it
            let sources: BTreeSet<usize> = (0..x.edges.len())
                .filter(|&e| labeled(e))
                .map(|e| x.edges[e].tail)
                .filter(|&v| !x.in_edges(v).iter().any(|&e| labeled(e)))
                .collect();
            prop_assert_eq!(sources.len(), 1);
            prop_assert_eq!(l.label_roots.get(&j).copied(), sources.first().copied());
        }
    }

    #[test]
    fn cactus_orders_have_width_at_most_two(seed in any::<u64>(), n in 1usize..7, root in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = random_cactus_topology(n, &mut rng);
        let mut worst = 0;
        for_each_rooted_order(&topo, root % n, |x| worst = worst.max(label_order(x.clone()).width)).unwrap();
        prop_assert!(worst <= 2, "width {}", worst);
    }

    #[test]
    fn parallel_edges_raise_width_by_at_most_max_degree(
        seed in any::<u64>(),
        n in 2usize..7,
        extra in 0usize..3,
        pick in any::<usize>(),
        k in 1usize..4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let topo = random_connected_topology(n, extra, &mut rng);
        let base = min_width_order_search(&topo, SearchStrategy::PerRootBfs).unwrap().width;
        let (a, b) = topo.edges[pick % topo.num_edges()];
        let mut more = topo.clone();
        more.edges.extend((0..k).map(|c| if c % 2 == 0 { (b, a) } else { (a, b) }));
        let w = min_width_order_search(&more, SearchStrategy::PerRootBfs).unwrap().width;
        prop_assert!(w <= base + topo.max_degree(), "{} > {} + {}", w, base, topo.max_degree());
    }

    #[test]
    fn separator_edges_point_away_from_the_separator(
        seed in any::<u64>(),
        n1 in 2usize..5,
        n2 in 2usize..4,
        at in any::<usize>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = random_connected_topology(n1, 1, &mut rng);
        let g2 = random_connected_topology(n2, 1, &mut rng);
        // glue node 0 of g2 onto node v of g1; g2's other nodes form U
        let v = 1 + at % (n1 - 1);
        let shift = |x: usize| if x == 0 { v } else { n1 + x - 1 };
        let mut topo = g1.clone();
        topo.node_names.extend((1..n2).map(|k| format!("x{k}")));
        topo.edges.extend(g2.edges.iter().map(|&(a, b)| (shift(a), shift(b))));
        for_each_rooted_order(&topo, 0, |x| {
            for e in &x.edges {
                if e.head == v {
                    assert!(e.tail < n1, "edge into separator from U");
                }
            }
        })
        .unwrap();
    }

    #[test]
    fn center_rooted_half_wheel_width_is_cover_plus_one(n in 3usize..10, mask in any::<u32>()) {
        let topo = generate_half_wheel(n);
        let reversed: Vec<bool> = topo.edges.iter().map(|&(a, _)| a != n && mask & (1 << a) != 0).collect();
        let x = ExtractionOrder::from_orientation(&topo, n, &reversed).unwrap();
        let cover: BTreeSet<usize> = x.edges.iter().filter(|e| e.tail != n).map(|e| e.head).collect();
        prop_assert_eq!(label_order(x).width, cover.len() + 1);
    }

    #[test]
    fn allocations_and_cost_follow_the_mapping(seed in 0u64..500) {
        let raw = generate_scenario(&small_spec(seed, RequestShape::Connected { extra: 1 }, (2, 3), 1));
        let inst = raw.build().unwrap();
        let (s, req) = (&inst.substrate, &inst.requests[0]);
        let en = enumerate_valid_mappings(s, req, 200);
        for m in &en.mappings {
            let a = compute_allocations(s, req, m).unwrap();
            let total: f64 = a.0.iter().sum();
            let expected: f64 = req.nodes().map(|i| req.node_demand(i)).sum::<f64>()
                + req.edge_indices().map(|e| req.edge_demand(e) * m.edge_map[e.0].len() as f64).sum::<f64>();
            prop_assert!((total - expected).abs() < 1e-9);
            let cost: f64 = (0..s.num_resources()).map(|q| s.cost(ResourceId(q)) * a.0[q]).sum();
            prop_assert!((mapping_cost(s, req, m).unwrap() - cost).abs() < 1e-9);
            let doubled = s.with_scaled_costs(2.0);
            prop_assert!((mapping_cost(&doubled, req, m).unwrap() - 2.0 * cost).abs() < 1e-9);
        }
    }

    #[test]
    fn instance_json_round_trips(seed in any::<u64>()) {
        let raw = generate_scenario(&small_spec(seed, RequestShape::Cactus, (2, 5), 2));
        let back = RawInstance::from_json(&raw.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), raw.to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decomposed_mappings_are_enumerated_and_lp_dominates_ip(seed in 0u64..1000) {
        let inst = generate_scenario(&small_spec(seed, RequestShape::Cactus, (2, 3), 2)).build().unwrap();
        let orders = request_orders(&inst, SearchStrategy::Exhaustive).unwrap();
        let (model, ix) = build_novel(&inst, &orders, Objective::Profit, DEFAULT_VAR_BUDGET).unwrap();
        let sol = MicroLpSolver.solve(&model);
        prop_assert!(sol.is_optimal());
        let enums: Vec<_> = inst
            .requests
            .iter()
            .map(|r| enumerate_valid_mappings(&inst.substrate, r, DEFAULT_MAPPING_CAP))
            .collect();
        for (r, req) in inst.requests.iter().enumerate() {
            let d = decompose_novel(&inst.substrate, req, &ix.requests[r], &sol.values).unwrap();
            for (_, m) in &d.entries {
                prop_assert!(enums[r].mappings.contains(m));
            }
        }
        let lp = solve_enumerative(&inst, &enums, Objective::Profit, Relaxation::Lp, &MicroLpSolver).unwrap();
        let ip = solve_enumerative(&inst, &enums, Objective::Profit, Relaxation::Ip, &MicroLpSolver).unwrap();
        prop_assert!(lp.optimum >= ip.optimum - 1e-6);
        prop_assert!(sol.objective >= ip.optimum - 1e-6);
    }
}
