//! Acceptance criteria. Run with `--nocapture` to see one line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_labels, close_rel, min_vertex_cover};
use vnep::decomposition::{
    decompose_mcf_tree, decompose_novel, verify_decomposition, ConvexDecomposition, SolutionSlice,
};
use vnep::extraction::{
    build_extraction_order, generate_half_wheel, generate_vc_gadget, half_wheel_center_order,
    label_order, min_width_rooted_exhaustive, ExtractionOrder, SearchStrategy, Topology,
};
use vnep::lp::{build_mcf, build_novel, novel_variable_count, LpSolver, LpStatus, MicroLpSolver, Objective, DEFAULT_VAR_BUDGET};
use vnep::model::{mapping_cost, resource_stats};
use vnep::{Instance, RawInstance};
use vnep::oracle::{enumerate_valid_mappings, solve_enumerative, Relaxation, DEFAULT_MAPPING_CAP};
use vnep::pipeline::{request_orders, run_pipeline, PipelineConfig};
use vnep::rounding::{compute_bounds, sample_selection, RoundingBounds};
use vnep::scenario::{
    fig3, fig4_topology, fixture, generate_scenario, parse_small_graph, random_cactus_topology,
    ring_substrate, unit_request, RequestModel, RequestShape, ScenarioSpec, SubstrateModel,
};

const LP_TOL: f64 = 1e-6;
const DECOMPOSITION_TOL: f64 = 1e-6;
const ORACLE_REL_TOL: f64 = 1e-5;
const BOUND_TOL: f64 = 1e-9;
const MC_TRIALS: u64 = 10_000;
const MC_SIGMAS: f64 = 3.0;
const MC_MEAN_REL: f64 = 0.02;
/// `exp(−2/9)` plus 0.05 slack.
const MC_LOW_PROFIT_FREQ: f64 = 0.851;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn spec(
    seed: u64,
    substrate_nodes: usize,
    shape: RequestShape,
    nodes: (usize, usize),
    count: usize,
) -> ScenarioSpec {
    ScenarioSpec {
        substrate: SubstrateModel {
            nodes: substrate_nodes,
            chords: 2,
            types: vec!["cpu".to_string()],
            node_capacity: (2.0, 4.0),
            edge_capacity: (2.0, 4.0),
            cost: (1.0, 5.0),
        },
        request: RequestModel {
            shape,
            nodes,
            allowed_per_node: Some(3),
            node_demand: (0.5, 1.0),
            edge_demand: (0.5, 1.0),
            profit: (1.0, 10.0),
        },
        count,
        seed,
    }
}

fn solve(model: &vnep::lp::LpModel) -> vnep::lp::LpSolution {
    MicroLpSolver.solve(model)
}

fn tree_corpus() -> Vec<Instance> {
    (0..10)
        .map(|k| {
            let n = 4 + (k as usize % 7);
            generate_scenario(&spec(k, n, RequestShape::Tree, (2, 8), 5))
                .build()
                .unwrap()
        })
        .collect()
}

fn cactus_corpus() -> Vec<Instance> {
    (0..10)
        .map(|k| {
            let n = 4 + (k as usize % 5);
            generate_scenario(&spec(100 + k, n, RequestShape::AugmentedCactus, (3, 8), 5))
                .build()
                .unwrap()
        })
        .collect()
}

fn tiny_corpus() -> Vec<Instance> {
    (0..20)
        .map(|k| {
            let mut s = spec(300 + k, 3 + (k as usize % 4), RequestShape::Connected { extra: 1 }, (2, 4), 2);
            s.substrate.chords = 1;
            s.substrate.node_capacity = (4.0, 8.0);
            s.substrate.edge_capacity = (4.0, 8.0);
            s.request.allowed_per_node = Some(2);
            generate_scenario(&s).build().unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let inst = fig3().build().unwrap();
    let b = inst.requests[0].profit();
    let (model, _) = build_mcf(&inst, Objective::Profit);
    let mcf = solve(&model).objective;
    let orders = request_orders(&inst, SearchStrategy::Exhaustive).unwrap();
    let (model, _) = build_novel(&inst, &orders, Objective::Profit, DEFAULT_VAR_BUDGET).unwrap();
    let novel = solve(&model).objective;
    let en = enumerate_valid_mappings(&inst.substrate, &inst.requests[0], DEFAULT_MAPPING_CAP);
    let elapsed = t.elapsed();
    outcome(
        (mcf - b).abs() <= LP_TOL
            && novel.abs() <= LP_TOL
            && en.mappings.is_empty()
            && !en.truncated
            && elapsed < Duration::from_secs(5),
        format!(
            "mcf lp {mcf:.6} (b = {b}), novel lp {novel:.6}, {} valid mappings, {elapsed:.2?}",
            en.mappings.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut requests = 0;
    let mut positive = 0;
    let mut failures = Vec::new();
    for inst in tree_corpus() {
        let (model, ix) = build_mcf(&inst, Objective::Profit);
        let sol = solve(&model);
        assert_eq!(sol.status, LpStatus::Optimal);
        for (r, req) in inst.requests.iter().enumerate() {
            requests += 1;
            let order = build_extraction_order(&req.topology(), 0).unwrap();
            match decompose_mcf_tree(&inst.substrate, req, &order, &ix.requests[r], &sol.values) {
                Ok(d) => {
                    positive += usize::from(!d.is_empty());
                    let slice = SolutionSlice::from_mcf(&inst.substrate, &ix.requests[r], &sol);
                    let rep = verify_decomposition(&inst.substrate, req, &d, &slice);
                    if !(rep.passed
                        && rep.completeness_gap <= DECOMPOSITION_TOL
                        && rep.max_allocation_excess <= DECOMPOSITION_TOL)
                    {
                        failures.push(format!("{}: {rep:?}", req.id()));
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", req.id())),
            }
        }
    }
    outcome(
        requests == 50 && failures.is_empty(),
        format!("{requests} tree requests, {positive} with x_r > 0, failures {failures:?}"),
    )
}

fn criterion_3() -> Outcome {
    let mut requests = 0;
    let mut positive = 0;
    let mut max_width = 0;
    let mut failures = Vec::new();
    for inst in cactus_corpus() {
        let orders = request_orders(&inst, SearchStrategy::PerRootBfs).unwrap();
        max_width = orders.iter().map(|o| o.width).fold(max_width, usize::max);
        let (model, ix) = build_novel(&inst, &orders, Objective::Profit, DEFAULT_VAR_BUDGET).unwrap();
        let sol = solve(&model);
        assert_eq!(sol.status, LpStatus::Optimal);
        for (r, req) in inst.requests.iter().enumerate() {
            requests += 1;
            match decompose_novel(&inst.substrate, req, &ix.requests[r], &sol.values) {
                Ok(d) => {
                    positive += usize::from(!d.is_empty());
                    let slice = SolutionSlice::from_novel(&ix.requests[r], &sol);
                    let rep = verify_decomposition(&inst.substrate, req, &d, &slice);
                    if !(rep.passed
                        && rep.completeness_gap <= DECOMPOSITION_TOL
                        && rep.max_allocation_excess <= DECOMPOSITION_TOL)
                    {
                        failures.push(format!("{}: {rep:?}", req.id()));
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", req.id())),
            }
        }
    }
    outcome(
        requests == 50 && max_width <= 3 && failures.is_empty(),
        format!(
            "{requests} cactus requests, max width {max_width}, {positive} with x_r > 0, failures {failures:?}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut compared = 0;
    let mut failures = Vec::new();
    for (k, inst) in tiny_corpus().iter().enumerate() {
        assert!(inst.substrate.num_nodes() <= 6);
        assert!(inst.requests.iter().all(|r| r.num_nodes() <= 4));
        let orders = request_orders(inst, SearchStrategy::Exhaustive).unwrap();
        let enums: Vec<_> = inst
            .requests
            .iter()
            .map(|r| enumerate_valid_mappings(&inst.substrate, r, DEFAULT_MAPPING_CAP))
            .collect();
        for objective in [Objective::Profit, Objective::Cost] {
            let (model, _) = build_novel(inst, &orders, objective, DEFAULT_VAR_BUDGET).unwrap();
            let novel = solve(&model);
            let oracle = solve_enumerative(inst, &enums, objective, Relaxation::Lp, &MicroLpSolver).unwrap();
            compared += 1;
            let same = novel.status == oracle.status
                && (novel.status != LpStatus::Optimal
                    || close_rel(novel.objective, oracle.optimum, ORACLE_REL_TOL));
            if !same {
                failures.push(format!(
                    "instance {k} {objective:?}: novel {:?} {} vs oracle {:?} {}",
                    novel.status, novel.objective, oracle.status, oracle.optimum
                ));
            }
        }
    }
    outcome(
        compared == 40 && failures.is_empty(),
        format!("{compared} lp pairs compared, mismatches {failures:?}"),
    )
}

fn names(topo: &Topology, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&v| topo.node_names[v].clone()).collect()
}

fn fig4_bags_match() -> Result<(), String> {
    let topo = fig4_topology();
    let x = ExtractionOrder::from_orientation(&topo, 0, &vec![false; topo.num_edges()])
        .map_err(|e| e.to_string())?;
    let l = label_order(x.clone());
    let oracle = brute_force_labels(&x);
    for (e, labels) in l.labels.iter().enumerate() {
        if labels.iter().copied().collect::<BTreeSet<_>>() != oracle[e] {
            return Err(format!("labels of edge {e}: {labels:?} vs {:?}", oracle[e]));
        }
    }
    let targets: BTreeSet<String> = oracle.iter().flatten().map(|&j| topo.node_names[j].clone()).collect();
    let want: BTreeSet<String> = ["i", "j", "k", "l"].iter().map(|s| s.to_string()).collect();
    if targets != want {
        return Err(format!("confluence targets {targets:?}"));
    }
    let bag_view = |v: &str| -> BTreeSet<(Vec<String>, Vec<String>)> {
        let v = topo.node_index(v).unwrap();
        l.bags[v]
            .iter()
            .map(|b| {
                let mut heads: Vec<String> = b.edges.iter().map(|&e| topo.node_names[x.edges[e].head].clone()).collect();
                heads.sort();
                (heads, names(&topo, &b.labels))
            })
            .collect()
    };
    let bag = |heads: &[&str], labels: &[&str]| {
        (
            heads.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            labels.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        )
    };
    let f_want = BTreeSet::from([bag(&["j"], &["j"]), bag(&["g", "k"], &["k"]), bag(&["l"], &["l"])]);
    let i_want = BTreeSet::from([bag(&["c", "f"], &["j", "l"])]);
    if bag_view("f") != f_want {
        return Err(format!("bags of f: {:?}", bag_view("f")));
    }
    if bag_view("i") != i_want {
        return Err(format!("bags of i: {:?}", bag_view("i")));
    }
    Ok(())
}

/// Every order rooted at the center: spokes point outward, outer edges take all orientations.
fn half_wheel_rooted_widths(n: usize) -> Vec<(usize, usize)> {
    let topo = generate_half_wheel(n);
    (0u32..1 << (n - 1))
        .map(|mask| {
            let reversed: Vec<bool> = topo
                .edges
                .iter()
                .map(|&(a, _)| a != n && mask & (1 << a) != 0)
                .collect();
            let x = ExtractionOrder::from_orientation(&topo, n, &reversed).unwrap();
            let covered: BTreeSet<usize> = x
                .edges
                .iter()
                .filter(|e| e.tail != n)
                .map(|e| e.head)
                .collect();
            (label_order(x).width, covered.len())
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cactus_orders = 0;
    let mut cactus_max = 0;
    for _ in 0..100 {
        let n = rng.random_range(5..=10);
        let topo = random_cactus_topology(n, &mut rng);
        for root in 0..5 {
            let w = label_order(build_extraction_order(&topo, root).unwrap()).width;
            cactus_max = cactus_max.max(w);
            cactus_orders += 1;
            if n <= 6 {
                vnep::extraction::for_each_rooted_order(&topo, root, |x| {
                    cactus_max = cactus_max.max(label_order(x.clone()).width);
                    cactus_orders += 1;
                })
                .unwrap();
            }
        }
    }
    if cactus_max > 2 {
        problems.push(format!("cactus width {cactus_max}"));
    }

    if let Err(e) = fig4_bags_match() {
        problems.push(format!("fig4: {e}"));
    }

    for n in [6, 8, 10] {
        let center = label_order(half_wheel_center_order(n)).width;
        if center != 2 {
            problems.push(format!("half wheel {n}: center width {center}"));
        }
        let widths = half_wheel_rooted_widths(n);
        let min = widths.iter().map(|w| w.0).min().unwrap();
        if min < n / 2 + 1 || widths.iter().any(|&(w, vc)| w != vc + 1) {
            problems.push(format!("half wheel {n}: min rooted width {min}"));
        }
    }

    let mut gadgets = Vec::new();
    for g in ["triangle", "c4", "star3", "path3", "k4", "c5"] {
        let (n, edges) = parse_small_graph(g).unwrap();
        let topo = generate_vc_gadget(n, &edges).unwrap();
        let w = min_width_rooted_exhaustive(&topo, n).unwrap().width;
        let vc = min_vertex_cover(n, &edges);
        gadgets.push(format!("{g}:{w}/{}", vc + 1));
        if w != vc + 1 {
            problems.push(format!("gadget {g}: width {w}, vc {vc}"));
        }
    }

    let elapsed = t.elapsed();
    outcome(
        problems.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{cactus_orders} cactus orders max width {cactus_max}; gadgets {}; {elapsed:.2?}; problems {problems:?}",
            gadgets.join(" ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut insts: Vec<(String, Instance)> = Vec::new();
    let corpora = [("tree", tree_corpus()), ("cactus", cactus_corpus()), ("tiny", tiny_corpus())];
    for (name, corpus) in corpora {
        insts.extend(corpus.into_iter().enumerate().map(|(k, i)| (format!("{name}{k}"), i)));
    }
    for name in ["fig3", "fig4", "servicechain", "virtualcluster:4", "halfwheel:6", "cactus:8"] {
        insts.push((name.to_string(), fixture(name, 1).unwrap().build().unwrap()));
    }
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut worst_graph: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, inst) in &insts {
        let orders = request_orders(inst, SearchStrategy::Exhaustive).unwrap();
        let vs = inst.substrate.num_nodes() as f64;
        let gs = vs + inst.substrate.num_edges() as f64;
        for (req, o) in inst.requests.iter().zip(&orders) {
            let count = novel_variable_count(&inst.substrate, req, o) as f64;
            let vr = req.num_nodes() as f64;
            let bound = 10.0 * vr * vs.powi(o.width as i32);
            checked += 1;
            worst = worst.max(count / bound);
            worst_graph = worst_graph.max(count / (10.0 * vr * gs.powi(o.width as i32)));
            if count > bound {
                failures.push(format!("{name}/{}: {count} > {bound}", req.id()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} requests, largest count/(10|V_r||V_S|^ew) {worst:.3}, largest count/(10|V_r||G_S|^ew) {worst_graph:.3}, over {failures:?}"
        ),
    )
}

fn three_edge_requests() -> RawInstance {
    let topo = Topology {
        node_names: vec!["i".to_string(), "j".to_string()],
        edges: vec![(0, 1)],
    };
    RawInstance {
        substrate: ring_substrate(3, 1.0, 10.0),
        requests: ["a", "b", "c"].iter().map(|id| unit_request(id, &topo, 1.0)).collect(),
    }
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let inst = three_edge_requests().build().unwrap();
    let out = run_pipeline(&inst, &PipelineConfig::default(), &MicroLpSolver).unwrap();
    let opt = out.report.lp.objective;
    let decomps: &[ConvexDecomposition] = &out.decompositions;
    let profits: Vec<f64> = out
        .report
        .requests
        .iter()
        .filter(|r| r.kept)
        .map(|r| inst.requests.iter().find(|q| q.id() == r.id).unwrap().profit())
        .collect();

    let mut counts: Vec<Vec<u64>> = decomps.iter().map(|d| vec![0; d.len()]).collect();
    let mut total = 0.0;
    let mut low = 0u64;
    for trial in 0..MC_TRIALS {
        let sel = sample_selection(decomps, 7, trial);
        let mut profit = 0.0;
        for (r, s) in sel.iter().enumerate() {
            if let Some(k) = *s {
                counts[r][k] += 1;
                profit += profits[r];
            }
        }
        total += profit;
        low += u64::from(profit <= opt / 3.0);
    }
    let n = MC_TRIALS as f64;
    let mut worst_sigma: f64 = 0.0;
    let mut entries = 0;
    for (d, c) in decomps.iter().zip(&counts) {
        for ((f, _), &k) in d.entries.iter().zip(c) {
            entries += 1;
            let sigma = (f * (1.0 - f) / n).sqrt();
            let dev = (k as f64 / n - f).abs();
            worst_sigma = worst_sigma.max(if sigma > 0.0 { dev / sigma } else if dev > 0.0 { f64::INFINITY } else { 0.0 });
        }
    }
    let mean = total / n;
    let low_freq = low as f64 / n;
    let elapsed = t.elapsed();
    outcome(
        (opt - 1.5).abs() <= LP_TOL
            && worst_sigma <= MC_SIGMAS
            && (mean - opt).abs() <= MC_MEAN_REL * opt
            && low_freq <= MC_LOW_PROFIT_FREQ
            && elapsed < Duration::from_secs(60),
        format!(
            "lp {opt:.4}, {entries} entries worst {worst_sigma:.2} sigma, mean {mean:.4}, P(profit <= lp/3) {low_freq:.4}, {elapsed:.2?}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut instances = 0;
    let mut samples = 0;
    let mut cap_failures = 0;
    let mut min_weight: f64 = 1.0;
    let mut split = 0;
    let mut skipped = 0;
    let config = PipelineConfig {
        objective: Objective::Cost,
        seed: 3,
        ..PipelineConfig::default()
    };
    for seed in 0..200 {
        if instances == 20 {
            break;
        }
        let mut s = spec(500 + seed, 6, RequestShape::Cactus, (2, 5), 3);
        s.substrate.node_capacity = (3.0, 6.0);
        let inst = generate_scenario(&s).build().unwrap();
        let Ok(out) = run_pipeline(&inst, &config, &MicroLpSolver) else {
            skipped += 1;
            continue;
        };
        instances += 1;
        let lp = out.report.lp.objective;
        for r in &out.report.requests {
            let p = r.pruning.as_ref().expect("cost runs prune every request");
            min_weight = min_weight.min(p.surviving_weight);
        }
        split += usize::from(out.decompositions.iter().any(|d| d.len() > 1));
        for trial in 0..500 {
            let sel = sample_selection(&out.decompositions, 11, trial);
            let cost: f64 = sel
                .iter()
                .zip(&out.decompositions)
                .zip(&inst.requests)
                .map(|((s, d), req)| {
                    let k = s.unwrap_or(d.len() - 1);
                    mapping_cost(&inst.substrate, req, &d.entries[k].1).unwrap()
                })
                .sum();
            samples += 1;
            cap_failures += usize::from(cost > 2.0 * lp + LP_TOL);
        }
    }
    outcome(
        instances == 20 && cap_failures == 0 && min_weight >= 0.5 - DECOMPOSITION_TOL,
        format!(
            "{instances} instances ({skipped} infeasible skipped, {split} with split decompositions), {samples} samples, {cap_failures} over 2*C_LP, min surviving weight {min_weight:.4}"
        ),
    )
}

fn criterion_9() -> Outcome {
    // (objective, eps, delta_V, delta_E, |V_S|, |T|, beta, gamma) evaluated by hand
    let cases = [
        (Objective::Profit, 0.5, 1.0, 1.0, 10, 1, 2.0729830131446736, 2.0729830131446736),
        (Objective::Cost, 0.5, 1.0, 1.0, 10, 1, 3.0729830131446736, 3.0729830131446736),
        (Objective::Profit, 0.0, 4.0, 4.0, 10, 2, 1.0, 1.0),
        (Objective::Profit, 0.25, 3.0, 2.0, 20, 3, 2.2391041969234418, 1.8654091913011426),
        (Objective::Cost, 1.0, 2.5, 6.0, 7, 2, 5.632531713292575, 6.832279150531741),
    ];
    let mut failures = Vec::new();
    for (k, &(obj, eps, dv, de, n, types, beta, gamma)) in cases.iter().enumerate() {
        let b = RoundingBounds::closed_form(obj, eps, dv, de, n, types);
        let alpha = if obj == Objective::Profit { 1.0 / 3.0 } else { 2.0 };
        if (b.beta - beta).abs() > BOUND_TOL || (b.gamma - gamma).abs() > BOUND_TOL || b.alpha != alpha {
            failures.push(format!("set {k}: {b:?}"));
        }
    }
    let single = Topology {
        node_names: vec!["v".to_string()],
        edges: vec![],
    };
    let inst = RawInstance {
        substrate: ring_substrate(10, 2.0, 2.0),
        requests: vec![unit_request("r", &single, 1.0)],
    }
    .build()
    .unwrap();
    let b = compute_bounds(&inst, &resource_stats(&inst), Objective::Profit).unwrap();
    if (b.epsilon - 0.5).abs() > BOUND_TOL
        || (b.beta - 2.0729830131446736).abs() > BOUND_TOL
        || (b.gamma - 1.0).abs() > BOUND_TOL
    {
        failures.push(format!("ring instance: {b:?}"));
    }
    outcome(
        failures.is_empty(),
        format!("{} closed-form sets and one instance, failures {failures:?}", cases.len()),
    )
}

fn criterion_10() -> Outcome {
    let mut runs = 0;
    let mut diffs = Vec::new();
    let mut insts = vec![
        ("servicechain", fixture("servicechain", 0).unwrap().build().unwrap()),
        ("cactus:7", fixture("cactus:7", 4).unwrap().build().unwrap()),
    ];
    let mut s = spec(42, 6, RequestShape::Cactus, (2, 5), 3);
    s.substrate.node_capacity = (3.0, 6.0);
    insts.push(("scenario", generate_scenario(&s).build().unwrap()));
    for (name, inst) in &insts {
        for objective in [Objective::Profit, Objective::Cost] {
            let config = PipelineConfig {
                objective,
                seed: 17,
                ..PipelineConfig::default()
            };
            let a = run_pipeline(inst, &config, &MicroLpSolver).map(|o| serde_json::to_string(&o.report).unwrap());
            let b = run_pipeline(inst, &config, &MicroLpSolver).map(|o| serde_json::to_string(&o.report).unwrap());
            runs += 1;
            if a != b {
                diffs.push(format!("{name} {objective:?}"));
            }
        }
    }
    outcome(diffs.is_empty(), format!("{runs} repeated runs, differing {diffs:?}"))
}

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("integrality gap fixture", criterion_1),
        ("tree decomposition", criterion_2),
        ("novel decomposition", criterion_3),
        ("lp equals enumerative lp", criterion_4),
        ("extraction width facts", criterion_5),
        ("formulation size", criterion_6),
        ("rounding statistics", criterion_7),
        ("cost guarantees", criterion_8),
        ("bound formulas", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name}: {}", k + 1, o.detail);
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
