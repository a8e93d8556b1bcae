//! Acceptance criteria 1 to 10. Prints one `[PASS]`/`[FAIL]` line each and
//! exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    random_directed, random_mutation_batch, random_sinkless, random_undirected, rng,
    AdjacencyOracle,
};
use pregel::algorithms::{
    bfs_program, label_propagation_program, max_value_program,
    pagerank_initial_value_insensitivity_check, pagerank_program, sssp_program, wcc_program,
    PageRankConfig,
};
use pregel::io::write_vertex_values;
use pregel::oracles;
use pregel::{
    run_program, Context, Engine, EngineConfig, FailurePlan, Graph, GraphBuilder, MutationRequest,
    ProgramError, RunResult, TerminationReason, VertexId, VertexProgram,
};
use rand::Rng;

const FIXED_POINT_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-12;
const CONTRACTION: f64 = 0.85;
const CONTRACTION_SLACK: f64 = 1e-9;
/// Below this an L1 delta is dominated by rounding and its ratio is not meaningful.
const DELTA_FLOOR: f64 = 1e-10;
const INSENSITIVITY_TOL: f64 = 1e-6;

const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_BUDGET: Duration = Duration::from_secs(30);
const C5_BUDGET: Duration = Duration::from_secs(60);
const C10_BUDGET: Duration = Duration::from_secs(60);
const C10_HARD_LIMIT: Duration = Duration::from_secs(120);

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pagerank(cfg: PageRankConfig) -> pregel::algorithms::PageRank {
    pagerank_program(cfg).expect("valid PageRank config")
}

fn output_bytes(result: &RunResult) -> Vec<u8> {
    let mut out = Vec::new();
    write_vertex_values(&result.values, &result.graph, &mut out).expect("in-memory write");
    out
}

fn c1_fixed_round_pagerank() -> Verdict {
    let start = Instant::now();
    let program = pagerank(PageRankConfig::default());
    let two = run_program(&program, common::cycle(2), EngineConfig::default())
        .map_err(|e| e.to_string())?;
    let worst = two
        .values
        .values()
        .map(|v| (v - 0.5).abs())
        .fold(0.0, f64::max);

    let mut b = GraphBuilder::new(true);
    b.vertex("0");
    let single =
        run_program(&program, b.build(), EngineConfig::default()).map_err(|e| e.to_string())?;
    let lone = single.value_vec()[0];
    let elapsed = start.elapsed();
    check(
        worst < FIXED_POINT_TOL && lone == 0.15 && elapsed < C1_BUDGET,
        format!("2-cycle max |v-0.5| = {worst:e}; dangling vertex = {lone}; {elapsed:.2?}"),
    )
}

fn random_sinkless_sized(r: &mut impl Rng) -> Graph {
    let n = r.gen_range(2..=1000);
    random_sinkless(r, n, 8)
}

fn c2_oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut r = rng(0xC2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let g = random_sinkless_sized(&mut r);
        let init = 1.0 / g.num_vertices() as f64;
        for k in [1u64, 5, 30] {
            let program = pagerank(PageRankConfig {
                max_supersteps: k,
                ..Default::default()
            });
            let result = run_program(
                &program,
                g.clone(),
                EngineConfig::default().with_max_supersteps(k),
            )
            .map_err(|e| e.to_string())?;
            let reference = oracles::pagerank_power_iteration(&g, 0.15, k as usize, init);
            worst = worst.max(common::linf(&result.value_vec(), &reference));
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= ORACLE_TOL && elapsed < C2_BUDGET,
        format!("50 graphs x k in {{1,5,30}}: max deviation {worst:e}; {elapsed:.2?}"),
    )
}

fn c3_conservation_contraction() -> Verdict {
    let mut r = rng(0xC3);
    let mut mass_err: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let program = pagerank(PageRankConfig::default());
    for _ in 0..10 {
        let g = random_sinkless_sized(&mut r);
        let mut engine =
            Engine::new(&program, g, EngineConfig::default()).map_err(|e| e.to_string())?;
        let mut previous = engine.values();
        let mut last_delta: Option<f64> = None;
        while engine.termination().is_none() {
            engine.step().map_err(|e| e.to_string())?;
            let values = engine.values();
            mass_err = mass_err.max((values.iter().sum::<f64>() - 1.0).abs());
            if engine.superstep() >= 2 {
                let delta = common::l1(&previous, &values);
                if let Some(last) = last_delta.filter(|&d| d >= DELTA_FLOOR) {
                    worst_ratio = worst_ratio.max(delta / last);
                }
                last_delta = Some(delta);
            }
            previous = values;
        }
    }
    check(
        mass_err <= MASS_TOL && worst_ratio <= CONTRACTION + CONTRACTION_SLACK,
        format!("10 graphs: max |sum-1| = {mass_err:e}; max delta ratio = {worst_ratio:.6}"),
    )
}

fn c4_initial_value_insensitivity() -> Verdict {
    let mut r = rng(0xC4);
    let mut graphs = vec![
        ("2-cycle".to_string(), common::cycle(2)),
        ("3-cycle".to_string(), common::cycle(3)),
    ];
    for i in 0..5 {
        graphs.push((format!("random#{i}"), random_sinkless_sized(&mut r)));
    }
    let mut report = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, g) in &graphs {
        let init = 1.0 / g.num_vertices() as f64;
        let d = pagerank_initial_value_insensitivity_check(
            g,
            (init, 0.5),
            PageRankConfig::default(),
            &EngineConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max(d);
        report.push(format!("{name} {d:.3e}"));
    }
    check(
        worst < INSENSITIVITY_TOL,
        format!(
            "L-inf after 30 supersteps, inits 1/N vs 0.5: {}",
            report.join(", ")
        ),
    )
}

fn exact_match(result: &RunResult, expected: &[f64]) -> bool {
    result.values.iter().all(|(v, x)| *x == expected[v.index()])
}

fn c5_exact_oracles() -> Verdict {
    let start = Instant::now();
    let mut r = rng(0xC5);
    let uncapped = EngineConfig::default().with_max_supersteps(100_000);
    let mut failures = Vec::new();
    for i in 0..100 {
        let n = r.gen_range(1..=1000);
        let m = r.gen_range(0..=4 * n);
        let directed = random_directed(&mut r, n, m, true);
        let source = VertexId(r.gen_range(0..n as u32));

        let sssp = run_program(&sssp_program(source), directed.clone(), uncapped.clone())
            .map_err(|e| e.to_string())?;
        if !exact_match(
            &sssp,
            &oracles::dijkstra(&directed, source).map_err(|e| e.to_string())?,
        ) {
            failures.push(format!("sssp#{i}"));
        }
        let bfs = run_program(&bfs_program(source), directed.clone(), uncapped.clone())
            .map_err(|e| e.to_string())?;
        if !exact_match(
            &bfs,
            &oracles::bfs_levels(&directed, source).map_err(|e| e.to_string())?,
        ) {
            failures.push(format!("bfs#{i}"));
        }

        let undirected = random_undirected(&mut r, n, m / 2, true);
        let wcc = run_program(&wcc_program(), undirected.clone(), uncapped.clone())
            .map_err(|e| e.to_string())?;
        let components = oracles::components_union_find(&undirected);
        let expected: Vec<f64> = components.iter().map(|c| f64::from(c.0)).collect();
        if !exact_match(&wcc, &expected) {
            failures.push(format!("wcc#{i}"));
        }

        let max = run_program(&max_value_program(), undirected.clone(), uncapped.clone())
            .map_err(|e| e.to_string())?;
        let loaded: Vec<f64> = undirected
            .initial_values()
            .iter()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect();
        let mut per_component: Vec<Vec<f64>> = vec![Vec::new(); undirected.capacity()];
        for (v, c) in components.iter().enumerate() {
            per_component[c.index()].push(loaded[v]);
        }
        let expected = components
            .iter()
            .map(|c| oracles::global_max(&per_component[c.index()]))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        if !exact_match(&max, &expected) {
            failures.push(format!("maxvalue#{i}"));
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < C5_BUDGET,
        format!("400 runs, mismatches: {:?}; {elapsed:.2?}", failures),
    )
}

fn c6_determinism() -> Verdict {
    let g = random_undirected(&mut rng(0xC6), 2000, 5000, true);
    let programs: Vec<(&str, Box<dyn VertexProgram>)> = vec![
        ("pagerank", Box::new(pagerank(PageRankConfig::default()))),
        ("maxvalue", Box::new(max_value_program())),
        ("sssp", Box::new(sssp_program(VertexId(0)))),
        ("bfs", Box::new(bfs_program(VertexId(0)))),
        ("wcc", Box::new(wcc_program())),
        ("labelprop", Box::new(label_propagation_program(30))),
    ];
    let mut differing = Vec::new();
    for (name, program) in &programs {
        let mut outputs = Vec::new();
        for workers in [1, 2, 4, 8] {
            let result = run_program(
                program.as_ref(),
                g.clone(),
                EngineConfig::default().with_workers(workers),
            )
            .map_err(|e| e.to_string())?;
            outputs.push(output_bytes(&result));
        }
        if outputs.windows(2).any(|p| p[0] != p[1]) {
            differing.push(*name);
        }
    }
    check(
        differing.is_empty(),
        format!(
            "{} edges, 6 programs x workers {{1,2,4,8}}; differing: {:?}",
            g.edge_count(),
            differing
        ),
    )
}

fn c7_fault_tolerance() -> Verdict {
    let g = random_sinkless(&mut rng(0xC7), 1000, 8);
    let program = pagerank(PageRankConfig::default());
    let baseline =
        run_program(&program, g.clone(), EngineConfig::default()).map_err(|e| e.to_string())?;
    let config = EngineConfig {
        checkpoint_interval: 5,
        failure_plan: Some(FailurePlan {
            worker: 1,
            superstep: 10,
        }),
        ..EngineConfig::default()
    };
    let failed = run_program(&program, g, config).map_err(|e| e.to_string())?;
    let identical = output_bytes(&baseline) == output_bytes(&failed);
    check(
        identical
            && failed.recoveries == 1
            && failed.supersteps_executed > baseline.supersteps_executed,
        format!(
            "identical output: {identical}; recoveries {}; supersteps {} vs baseline {}",
            failed.recoveries, failed.supersteps_executed, baseline.supersteps_executed
        ),
    )
}

fn c8_halting_soundness() -> Verdict {
    let mut r = rng(0xC8);
    let mut noisy = Vec::new();
    let mut runs = 0;
    for i in 0..20 {
        let n = r.gen_range(2..=500);
        let g = random_undirected(&mut r, n, n, true);
        let programs: Vec<(&str, Box<dyn VertexProgram>)> = vec![
            ("maxvalue", Box::new(max_value_program())),
            ("wcc", Box::new(wcc_program())),
            ("sssp", Box::new(sssp_program(VertexId(0)))),
        ];
        for (name, program) in &programs {
            let config = EngineConfig::default().with_max_supersteps(100_000);
            let mut engine =
                Engine::new(program.as_ref(), g.clone(), config).map_err(|e| e.to_string())?;
            if engine.run().map_err(|e| e.to_string())? != TerminationReason::Quiescent {
                return Err(format!("{name}#{i} did not reach quiescence"));
            }
            let outcome = engine.force_superstep().map_err(|e| e.to_string())?;
            runs += 1;
            if outcome.messages_sent != 0 || outcome.value_changes != 0 {
                noisy.push(format!("{name}#{i}"));
            }
        }
    }
    check(
        noisy.is_empty(),
        format!("{runs} quiescent runs; non-silent forced supersteps: {noisy:?}"),
    )
}

/// Vertex 0 issues the whole batch at superstep 0.
struct Mutate(Vec<MutationRequest>);

impl VertexProgram for Mutate {
    fn init(&self, _: VertexId, _: usize, _: Option<f64>) -> f64 {
        0.0
    }

    fn compute(&self, ctx: &mut Context<'_>, _: &[f64]) -> Result<(), ProgramError> {
        if ctx.superstep() == 0 && ctx.vertex() == VertexId(0) {
            for request in &self.0 {
                match *request {
                    MutationRequest::AddEdge { src, dst, weight } => ctx.add_edge(src, dst, weight),
                    MutationRequest::RemoveEdge { src, dst } => ctx.remove_edge(src, dst),
                    MutationRequest::AddVertex { id, value } => ctx.add_vertex(id, value),
                    MutationRequest::RemoveVertex { id } => ctx.remove_vertex(id),
                }
            }
        }
        ctx.vote_to_halt();
        Ok(())
    }
}

fn c9_mutation_determinism() -> Verdict {
    let mut r = rng(0xC9);
    let mut mismatches = Vec::new();
    for seed in 0..5 {
        let g = random_directed(&mut r, 500, 3000, true);
        let batch: Vec<MutationRequest> = random_mutation_batch(&mut r, &g, 560, 1000)
            .into_iter()
            .filter(|m| !matches!(m, MutationRequest::RemoveVertex { id: VertexId(0) }))
            .collect();
        let mut expected = AdjacencyOracle::of(&g);
        expected.apply(&batch);
        let program = Mutate(batch);
        for workers in [1, 4, 8] {
            let mut engine = Engine::new(
                &program,
                g.clone(),
                EngineConfig::default().with_workers(workers),
            )
            .map_err(|e| e.to_string())?;
            engine.step().map_err(|e| e.to_string())?;
            if AdjacencyOracle::of(engine.graph()) != expected {
                mismatches.push(format!("batch#{seed}/w{workers}"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("5 batches of ~1000 requests x workers {{1,4,8}}; mismatches: {mismatches:?}"),
    )
}

fn c10_performance() -> Verdict {
    let n = 100_000;
    let m = 1_000_000;
    let mut r = rng(0xC10);
    let mut b = GraphBuilder::new(true);
    for i in 0..n {
        b.vertex(&i.to_string());
    }
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    for _ in 0..m {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        b.edge(&labels[u], &labels[v], None)
            .map_err(|e| e.to_string())?;
    }
    let g = b.build();
    let program = pagerank(PageRankConfig::default());
    let start = Instant::now();
    let result = run_program(&program, g, EngineConfig::default().with_workers(8))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let note = if elapsed < C10_BUDGET {
        "within budget"
    } else {
        "over the 60 s budget but under the 2x hard limit"
    };
    check(
        elapsed < C10_HARD_LIMIT,
        format!(
            "{n} vertices, {m} edges, 8 workers, {} supersteps: {elapsed:.2?} ({note})",
            result.supersteps_executed
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("C1 fixed-round PageRank fidelity", c1_fixed_round_pagerank),
        ("C2 PageRank equals power iteration", c2_oracle_equivalence),
        (
            "C3 conservation and contraction",
            c3_conservation_contraction,
        ),
        (
            "C4 initial-value insensitivity",
            c4_initial_value_insensitivity,
        ),
        ("C5 exact algorithms equal oracles", c5_exact_oracles),
        ("C6 determinism across worker counts", c6_determinism),
        ("C7 fault tolerance", c7_fault_tolerance),
        ("C8 halting soundness", c8_halting_soundness),
        ("C9 mutation determinism", c9_mutation_determinism),
        ("C10 desk-scale performance", c10_performance),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
