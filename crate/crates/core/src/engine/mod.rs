//! Bulk-synchronous superstep engine.
//!
//! Each superstep every worker computes the vertices of its partition that
//! are active or have mail, buffering outgoing messages, aggregator
//! contributions and mutation requests. At the barrier the engine applies
//! mutations, routes messages into next-superstep inboxes, reduces
//! aggregators, records metrics and decides whether to stop. Checkpoints
//! are taken at barriers and used to recover from an injected worker loss.

pub mod aggregate;
pub mod checkpoint;
pub mod message;
pub mod mutation;
pub mod program;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, PartitionMap, VertexId};
use aggregate::{fold_contributions, reduce_aggregators, value_change, L1_DELTA};
use checkpoint::{CheckpointError, Snapshot};
use message::{deliver_messages, Outbox};
use mutation::{apply_mutations, MutationEffects, MutationError};
use program::{
    AggregateView, AggregatorSpec, Combiner, Context, Contribution, IssuedMutation, ProgramError,
    Scratch, VertexProgram,
};

pub use aggregate::L1_DELTA as L1_DELTA_AGGREGATOR;

/// Kill worker `worker` once, at the barrier ending superstep `superstep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailurePlan {
    pub worker: usize,
    pub superstep: u64,
}

impl FromStr for FailurePlan {
    type Err = String;

    /// Parses `"w@s"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, step) = s
            .split_once('@')
            .ok_or_else(|| format!("expected WORKER@SUPERSTEP, got `{s}`"))?;
        let worker = w
            .trim()
            .parse()
            .map_err(|_| format!("bad worker index `{w}`"))?;
        let superstep = step
            .trim()
            .parse()
            .map_err(|_| format!("bad superstep `{step}`"))?;
        Ok(FailurePlan { worker, superstep })
    }
}

impl fmt::Display for FailurePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.worker, self.superstep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub workers: usize,
    /// The run stops after executing the superstep with this index.
    pub max_supersteps: u64,
    pub deterministic: bool,
    /// Supersteps between checkpoints; 0 disables checkpointing.
    pub checkpoint_interval: u64,
    pub failure_plan: Option<FailurePlan>,
    /// Stop once a superstep (index >= 1) changes values by less than this
    /// much in L1 norm.
    pub convergence: Option<f64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 4,
            max_supersteps: 30,
            deterministic: true,
            checkpoint_interval: 0,
            failure_plan: None,
            convergence: None,
        }
    }
}

impl EngineConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_max_supersteps(mut self, max_supersteps: u64) -> Self {
        self.max_supersteps = max_supersteps;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.workers == 0 {
            return Err(EngineError::Config("workers must be at least 1".into()));
        }
        if let Some(plan) = self.failure_plan {
            if self.checkpoint_interval == 0 {
                return Err(EngineError::Config(
                    "a failure plan requires checkpoint_interval > 0".into(),
                ));
            }
            if plan.worker >= self.workers {
                return Err(EngineError::Config(format!(
                    "failure plan names worker {} but only {} workers exist",
                    plan.worker, self.workers
                )));
            }
        }
        if let Some(threshold) = self.convergence {
            if threshold.is_nan() || threshold < 0.0 {
                return Err(EngineError::Config(format!(
                    "convergence threshold must be non-negative, got {threshold}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid engine config: {0}")]
    Config(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("program rejected the graph: {0}")]
    Rejected(#[source] ProgramError),
    #[error("vertex {vertex} failed at superstep {superstep}: {source}")]
    Compute {
        vertex: VertexId,
        superstep: u64,
        #[source]
        source: ProgramError,
    },
    #[error(
        "vertex {sender} sent a message to nonexistent vertex {target} at superstep {superstep}"
    )]
    MissingTarget {
        sender: VertexId,
        target: VertexId,
        superstep: u64,
    },
    #[error("mutation failed at superstep {superstep}: {source}")]
    Mutation {
        superstep: u64,
        #[source]
        source: MutationError,
    },
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("worker {worker} failed at superstep {superstep} and no checkpoint is available")]
    Unrecoverable { worker: usize, superstep: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Every vertex voted to halt and no message is in flight.
    Quiescent,
    /// The superstep cap was reached.
    SuperstepCap,
    /// The L1 change fell below the configured threshold.
    Converged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperstepMetrics {
    pub superstep: u64,
    /// Vertices whose compute ran.
    pub computed: usize,
    /// Live vertices not halted at the barrier.
    pub active: usize,
    pub messages_sent: usize,
    /// Payloads observed by compute after combining.
    pub combined_messages: usize,
    pub wall: Duration,
    /// This execution was lost to an injected failure.
    pub failed: bool,
}

impl SuperstepMetrics {
    pub fn wall_ms(&self) -> f64 {
        self.wall.as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepStatus {
    Running,
    Terminated(TerminationReason),
    /// A worker was lost; state was rolled back to the checkpoint taken
    /// before superstep `resumed_at`.
    Recovered {
        failed_worker: usize,
        resumed_at: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperstepOutcome {
    pub superstep: u64,
    pub active: usize,
    pub messages_sent: usize,
    /// Vertices whose value changed bitwise.
    pub value_changes: usize,
    pub status: StepStatus,
}

/// Inputs to [`check_termination`], observed at a barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierState {
    /// Index of the superstep that just completed.
    pub superstep: u64,
    pub all_halted: bool,
    pub pending_messages: usize,
    pub l1_delta: f64,
}

pub fn check_termination(state: &BarrierState, config: &EngineConfig) -> Option<TerminationReason> {
    if state.all_halted && state.pending_messages == 0 {
        return Some(TerminationReason::Quiescent);
    }
    if state.superstep >= config.max_supersteps {
        return Some(TerminationReason::SuperstepCap);
    }
    match config.convergence {
        Some(threshold) if state.superstep >= 1 && state.l1_delta < threshold => {
            Some(TerminationReason::Converged)
        }
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Final value of every live vertex.
    pub values: BTreeMap<VertexId, f64>,
    /// Topology after all mutations.
    pub graph: Graph,
    /// Superstep executions, counting ones replayed after a recovery.
    pub supersteps_executed: u64,
    /// Index of the last completed superstep.
    pub last_superstep: u64,
    pub termination: TerminationReason,
    pub metrics: Vec<SuperstepMetrics>,
    pub recoveries: u32,
    pub checkpoints: u32,
}

impl RunResult {
    pub fn value(&self, v: VertexId) -> Option<f64> {
        self.values.get(&v).copied()
    }

    /// Values in ascending vertex order.
    pub fn value_vec(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }
}

#[derive(Debug, Default, Clone)]
struct Worker {
    values: Vec<f64>,
    halted: Vec<bool>,
    inboxes: message::WorkerInboxes,
}

impl Worker {
    fn resize(&mut self, slots: usize) {
        self.values.resize(slots, 0.0);
        self.halted.resize(slots, true);
        self.inboxes.resize_with(slots, Vec::new);
    }
}

#[derive(Default)]
struct WorkerOutput {
    outbox: Outbox,
    contributions: Vec<Contribution>,
    mutations: Vec<IssuedMutation>,
    computed: usize,
    changed: usize,
    sent: usize,
    observed: usize,
    error: Option<(VertexId, ProgramError)>,
}

struct StepEnv<'a, P: ?Sized> {
    program: &'a P,
    graph: &'a Graph,
    partition: PartitionMap,
    superstep: u64,
    num_vertices: usize,
    aggregates: AggregateView<'a>,
    combiner: Option<Combiner>,
}

fn compute_partition<P: VertexProgram + ?Sized>(
    index: usize,
    worker: &mut Worker,
    env: &StepEnv<'_, P>,
) -> WorkerOutput {
    let mut scratch = Scratch::new(env.partition.num_workers());
    let mut out = WorkerOutput::default();
    let mut payloads = Vec::new();

    for slot in 0..worker.values.len() {
        let vertex = env.partition.vertex_at(index, slot);
        if !env.graph.is_live(vertex) {
            continue;
        }
        let mut inbox = std::mem::take(&mut worker.inboxes[slot]);
        if worker.halted[slot] && inbox.is_empty() {
            worker.inboxes[slot] = inbox;
            continue;
        }

        payloads.clear();
        payloads.extend(inbox.iter().map(|m| m.payload));
        if let Some(combiner) = &env.combiner {
            if let Some(combined) = message::apply_combiner(&payloads, combiner) {
                payloads.clear();
                payloads.push(combined);
            }
        }
        out.observed += payloads.len();

        let old = worker.values[slot];
        let mut ctx = Context::new(
            vertex,
            env.superstep,
            env.num_vertices,
            old,
            env.graph.edges_of(vertex),
            &env.aggregates,
            &mut scratch,
        );
        if let Err(e) = env.program.compute(&mut ctx, &payloads) {
            out.error = Some((vertex, e));
            break;
        }
        let (new, halt) = (ctx.value(), ctx.halted());
        worker.values[slot] = new;
        worker.halted[slot] = halt;
        if new.to_bits() != old.to_bits() {
            out.changed += 1;
        }
        scratch.contributions.push(Contribution {
            vertex,
            aggregator: 0,
            value: value_change(old, new),
        });
        out.computed += 1;

        inbox.clear();
        worker.inboxes[slot] = inbox;
    }

    out.sent = scratch.sent;
    out.outbox = scratch.buckets;
    out.contributions = scratch.contributions;
    out.mutations = scratch.mutations;
    out
}

/// A running computation: one program over one graph.
pub struct Engine<'p, P: VertexProgram + ?Sized> {
    program: &'p P,
    config: EngineConfig,
    partition: PartitionMap,
    graph: Graph,
    workers: Vec<Worker>,
    specs: Vec<AggregatorSpec>,
    aggregate_values: Vec<f64>,
    combiner: Option<Combiner>,
    /// Index of the next superstep to execute.
    superstep: u64,
    pending_messages: usize,
    executed: u64,
    metrics: Vec<SuperstepMetrics>,
    recoveries: u32,
    checkpoints: u32,
    latest_checkpoint: Option<(u64, Vec<u8>)>,
    pending_failure: Option<FailurePlan>,
    termination: Option<TerminationReason>,
}

impl<'p, P: VertexProgram + ?Sized> Engine<'p, P> {
    pub fn new(program: &'p P, graph: Graph, config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        if graph.is_empty() {
            return Err(EngineError::EmptyGraph);
        }
        program.validate(&graph).map_err(EngineError::Rejected)?;
        let partition =
            PartitionMap::new(config.workers).map_err(|e| EngineError::Config(e.to_string()))?;

        let mut specs = vec![AggregatorSpec::sum(L1_DELTA)];
        let mut names = BTreeSet::from([L1_DELTA.to_owned()]);
        for spec in program.aggregators() {
            if !names.insert(spec.name.clone()) {
                return Err(EngineError::Config(format!(
                    "aggregator `{}` declared twice or shadows a built-in",
                    spec.name
                )));
            }
            specs.push(spec);
        }
        let aggregate_values = specs.iter().map(|s| s.identity).collect();

        let capacity = graph.capacity();
        let n = graph.num_vertices();
        let workers = (0..config.workers)
            .map(|w| {
                let slots = partition.slots(w, capacity);
                let mut worker = Worker::default();
                worker.resize(slots);
                for (slot, v) in partition.members(w, capacity).enumerate() {
                    if graph.is_live(v) {
                        worker.values[slot] = program.init(v, n, graph.initial_value(v));
                        worker.halted[slot] = false;
                    }
                }
                worker
            })
            .collect();

        Ok(Engine {
            program,
            partition,
            graph,
            workers,
            specs,
            aggregate_values,
            combiner: program.combiner(),
            superstep: 0,
            pending_messages: 0,
            executed: 0,
            metrics: Vec::new(),
            recoveries: 0,
            checkpoints: 0,
            latest_checkpoint: None,
            pending_failure: config.failure_plan,
            termination: None,
            config,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Index of the next superstep to execute.
    pub fn superstep(&self) -> u64 {
        self.superstep
    }

    pub fn termination(&self) -> Option<TerminationReason> {
        self.termination
    }

    pub fn metrics(&self) -> &[SuperstepMetrics] {
        &self.metrics
    }

    pub fn pending_messages(&self) -> usize {
        self.pending_messages
    }

    /// Aggregate values visible to the next superstep.
    pub fn aggregated(&self, name: &str) -> Option<f64> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.aggregate_values[i])
    }

    pub fn value(&self, v: VertexId) -> Option<f64> {
        if !self.graph.is_live(v) {
            return None;
        }
        let w = self.partition.worker_of(v);
        Some(self.workers[w].values[self.partition.local_slot(v)])
    }

    /// Values of live vertices in ascending id order.
    pub fn values(&self) -> Vec<f64> {
        self.graph
            .vertices()
            .map(|v| self.workers[self.partition.worker_of(v)].values[self.partition.local_slot(v)])
            .collect()
    }

    /// Runs supersteps until a termination condition holds.
    pub fn run(&mut self) -> Result<TerminationReason, EngineError> {
        loop {
            if let StepStatus::Terminated(reason) = self.step()?.status {
                return Ok(reason);
            }
        }
    }

    /// Reactivates every live vertex and executes one superstep.
    pub fn force_superstep(&mut self) -> Result<SuperstepOutcome, EngineError> {
        for worker in &mut self.workers {
            worker.halted.iter_mut().for_each(|h| *h = false);
        }
        self.step()
    }

    /// Executes exactly one superstep, including its barrier.
    pub fn step(&mut self) -> Result<SuperstepOutcome, EngineError> {
        let s = self.superstep;
        if self.config.checkpoint_interval > 0
            && s.is_multiple_of(self.config.checkpoint_interval)
            && self.latest_checkpoint.as_ref().map(|(at, _)| *at) != Some(s)
        {
            self.latest_checkpoint = Some((s, self.checkpoint()));
            self.checkpoints += 1;
        }

        let started = Instant::now();
        let env = StepEnv {
            program: self.program,
            graph: &self.graph,
            partition: self.partition,
            superstep: s,
            num_vertices: self.graph.num_vertices(),
            aggregates: AggregateView {
                specs: &self.specs,
                values: &self.aggregate_values,
            },
            combiner: self.combiner,
        };
        let mut outputs: Vec<WorkerOutput> = self
            .workers
            .par_iter_mut()
            .enumerate()
            .map(|(i, w)| compute_partition(i, w, &env))
            .collect();
        self.executed += 1;

        if let Some((vertex, source)) = outputs
            .iter_mut()
            .filter_map(|o| o.error.take())
            .min_by_key(|(v, _)| *v)
        {
            return Err(EngineError::Compute {
                vertex,
                superstep: s,
                source,
            });
        }

        let computed = outputs.iter().map(|o| o.computed).sum();
        let messages_sent: usize = outputs.iter().map(|o| o.sent).sum();
        let combined_messages = outputs.iter().map(|o| o.observed).sum();
        let value_changes = outputs.iter().map(|o| o.changed).sum();

        if let Some(plan) = self.pending_failure.filter(|p| p.superstep == s) {
            self.pending_failure = None;
            self.workers[plan.worker] = Worker::default();
            self.metrics.push(SuperstepMetrics {
                superstep: s,
                computed,
                active: 0,
                messages_sent,
                combined_messages,
                wall: started.elapsed(),
                failed: true,
            });
            let resumed_at = self.recover(plan)?;
            return Ok(SuperstepOutcome {
                superstep: s,
                active: 0,
                messages_sent,
                value_changes,
                status: StepStatus::Recovered {
                    failed_worker: plan.worker,
                    resumed_at,
                },
            });
        }

        let effects = self.apply_issued_mutations(&mut outputs, s)?;

        let mut outboxes: Vec<Outbox> = outputs
            .iter_mut()
            .map(|o| std::mem::take(&mut o.outbox))
            .collect();
        self.screen_targets(&mut outboxes, &effects.removed, s)?;
        let inboxes = deliver_messages(
            outboxes,
            &self.partition,
            self.graph.capacity(),
            self.config.deterministic,
        );
        self.pending_messages = inboxes.iter().flatten().map(Vec::len).sum();
        for (worker, inbox) in self.workers.iter_mut().zip(inboxes) {
            worker.inboxes = inbox;
        }

        self.aggregate_values = self.reduce(&mut outputs);

        let graph = &self.graph;
        let partition = self.partition;
        let active: usize = self
            .workers
            .par_iter()
            .enumerate()
            .map(|(w, worker)| {
                partition
                    .members(w, graph.capacity())
                    .zip(&worker.halted)
                    .filter(|(v, &halted)| !halted && graph.is_live(*v))
                    .count()
            })
            .sum();

        self.metrics.push(SuperstepMetrics {
            superstep: s,
            computed,
            active,
            messages_sent,
            combined_messages,
            wall: started.elapsed(),
            failed: false,
        });
        self.superstep = s + 1;

        let state = BarrierState {
            superstep: s,
            all_halted: active == 0,
            pending_messages: self.pending_messages,
            l1_delta: self.aggregate_values[0],
        };
        self.termination = check_termination(&state, &self.config);
        Ok(SuperstepOutcome {
            superstep: s,
            active,
            messages_sent,
            value_changes,
            status: match self.termination {
                Some(reason) => StepStatus::Terminated(reason),
                None => StepStatus::Running,
            },
        })
    }

    fn apply_issued_mutations(
        &mut self,
        outputs: &mut [WorkerOutput],
        superstep: u64,
    ) -> Result<MutationEffects, EngineError> {
        let mut issued: Vec<IssuedMutation> = outputs
            .iter_mut()
            .flat_map(|o| std::mem::take(&mut o.mutations))
            .collect();
        if issued.is_empty() {
            return Ok(MutationEffects::default());
        }
        issued.sort_by_key(|m| (m.issuer, m.seq));
        let requests: Vec<_> = issued.into_iter().map(|m| m.request).collect();
        let effects = apply_mutations(&requests, &mut self.graph)
            .map_err(|source| EngineError::Mutation { superstep, source })?;

        let capacity = self.graph.capacity();
        for (w, worker) in self.workers.iter_mut().enumerate() {
            worker.resize(self.partition.slots(w, capacity));
        }
        let n = self.graph.num_vertices();
        for &v in &effects.removed {
            let worker = &mut self.workers[self.partition.worker_of(v)];
            let slot = self.partition.local_slot(v);
            worker.values[slot] = 0.0;
            worker.halted[slot] = true;
            worker.inboxes[slot].clear();
        }
        for &(v, loaded) in &effects.added {
            let worker = &mut self.workers[self.partition.worker_of(v)];
            let slot = self.partition.local_slot(v);
            worker.values[slot] = self.program.init(v, n, Some(loaded));
            worker.halted[slot] = false;
            worker.inboxes[slot].clear();
        }
        Ok(effects)
    }

    /// Drops messages to vertices removed at this barrier; any other
    /// message to a missing vertex aborts the run.
    fn screen_targets(
        &self,
        outboxes: &mut [Outbox],
        removed: &BTreeSet<VertexId>,
        superstep: u64,
    ) -> Result<(), EngineError> {
        let graph = &self.graph;
        let bad = outboxes
            .par_iter()
            .flat_map_iter(|outbox| outbox.iter().flatten())
            .filter(|e| !graph.is_live(e.target) && !removed.contains(&e.target))
            .min_by_key(|e| (e.sender, e.target));
        if let Some(e) = bad {
            return Err(EngineError::MissingTarget {
                sender: e.sender,
                target: e.target,
                superstep,
            });
        }
        if !removed.is_empty() {
            outboxes.par_iter_mut().for_each(|outbox| {
                for bucket in outbox {
                    bucket.retain(|e| graph.is_live(e.target));
                }
            });
        }
        Ok(())
    }

    fn reduce(&self, outputs: &mut [WorkerOutput]) -> Vec<f64> {
        if self.config.deterministic {
            // Vertex order, independent of how vertices are spread over workers.
            let mut all: Vec<Contribution> = outputs
                .iter_mut()
                .flat_map(|o| std::mem::take(&mut o.contributions))
                .collect();
            all.sort_by_key(|c| c.vertex);
            fold_contributions(&self.specs, &all)
        } else {
            let partials: Vec<Vec<f64>> = outputs
                .iter()
                .map(|o| fold_contributions(&self.specs, &o.contributions))
                .collect();
            reduce_aggregators(&self.specs, &partials)
        }
    }

    fn recover(&mut self, plan: FailurePlan) -> Result<u64, EngineError> {
        let (at, blob) = self
            .latest_checkpoint
            .clone()
            .ok_or(EngineError::Unrecoverable {
                worker: plan.worker,
                superstep: plan.superstep,
            })?;
        self.restore(&blob)?;
        self.recoveries += 1;
        debug_assert_eq!(self.superstep, at);
        Ok(at)
    }

    /// Serializes the complete barrier state.
    pub fn checkpoint(&self) -> Vec<u8> {
        self.snapshot().encode()
    }

    pub fn snapshot(&self) -> Snapshot {
        let capacity = self.graph.capacity();
        let mut values = Vec::with_capacity(capacity);
        let mut halted = Vec::with_capacity(capacity);
        let mut inbox = Vec::with_capacity(self.pending_messages);
        for i in 0..capacity {
            let v = VertexId::from_index(i);
            let worker = &self.workers[self.partition.worker_of(v)];
            let slot = self.partition.local_slot(v);
            values.push(worker.values[slot]);
            halted.push(worker.halted[slot]);
            inbox.extend(
                worker.inboxes[slot]
                    .iter()
                    .map(|m| (v, m.sender, m.payload)),
            );
        }
        Snapshot {
            superstep: self.superstep,
            values,
            halted,
            inbox,
            aggregates: self
                .specs
                .iter()
                .zip(&self.aggregate_values)
                .map(|(s, &v)| (s.name.clone(), v))
                .collect(),
            edges: self.graph.edges().copied().collect(),
            live: (0..capacity)
                .map(|i| self.graph.is_live(VertexId::from_index(i)))
                .collect(),
            labels: self.graph.labels().to_vec(),
            loaded: self.graph.initial_values().to_vec(),
        }
    }

    /// Replaces all engine state with the contents of `blob`. Metrics and
    /// counters are kept.
    pub fn restore(&mut self, blob: &[u8]) -> Result<(), EngineError> {
        let snap = Snapshot::decode(blob)?;
        let mut aggregate_values: Vec<f64> = self.specs.iter().map(|s| s.identity).collect();
        for (name, value) in &snap.aggregates {
            let i = self
                .specs
                .iter()
                .position(|s| &s.name == name)
                .ok_or_else(|| CheckpointError::UnknownAggregate(name.clone()))?;
            aggregate_values[i] = *value;
        }

        let capacity = snap.capacity();
        let mut workers: Vec<Worker> = (0..self.config.workers)
            .map(|w| {
                let mut worker = Worker::default();
                worker.resize(self.partition.slots(w, capacity));
                worker
            })
            .collect();
        for i in 0..capacity {
            let v = VertexId::from_index(i);
            let worker = &mut workers[self.partition.worker_of(v)];
            let slot = self.partition.local_slot(v);
            worker.values[slot] = snap.values[i];
            worker.halted[slot] = snap.halted[i];
        }
        for &(target, sender, payload) in &snap.inbox {
            workers[self.partition.worker_of(target)].inboxes[self.partition.local_slot(target)]
                .push(message::Incoming { sender, payload });
        }

        self.pending_messages = snap.inbox.len();
        self.superstep = snap.superstep;
        self.graph = Graph::from_parts(snap.live, snap.labels, snap.loaded, snap.edges);
        self.workers = workers;
        self.aggregate_values = aggregate_values;
        self.termination = None;
        self.latest_checkpoint = Some((snap.superstep, blob.to_vec()));
        Ok(())
    }

    pub fn into_result(self) -> RunResult {
        let values = self
            .graph
            .vertices()
            .map(|v| {
                let worker = &self.workers[self.partition.worker_of(v)];
                (v, worker.values[self.partition.local_slot(v)])
            })
            .collect();
        RunResult {
            values,
            supersteps_executed: self.executed,
            last_superstep: self.superstep.saturating_sub(1),
            termination: self.termination.unwrap_or(TerminationReason::SuperstepCap),
            metrics: self.metrics,
            recoveries: self.recoveries,
            checkpoints: self.checkpoints,
            graph: self.graph,
        }
    }
}

/// Runs `program` over `graph` to termination.
pub fn run_program<P: VertexProgram + ?Sized>(
    program: &P,
    graph: Graph,
    config: EngineConfig,
) -> Result<RunResult, EngineError> {
    let mut engine = Engine::new(program, graph, config)?;
    engine.run()?;
    Ok(engine.into_result())
}
