use rayon::prelude::*;

use crate::engine::program::Combiner;
use crate::graph::{PartitionMap, VertexId};

/// A message in flight between two supersteps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub target: VertexId,
    pub sender: VertexId,
    pub payload: f64,
}

/// A delivered message, as stored in the target's inbox.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incoming {
    pub sender: VertexId,
    pub payload: f64,
}

/// Per-worker outgoing messages, bucketed by destination worker.
pub type Outbox = Vec<Vec<Envelope>>;

/// Inboxes of one worker, indexed by local slot.
pub type WorkerInboxes = Vec<Vec<Incoming>>;

/// Sorts an inbox by `(sender, payload)`.
pub fn sort_inbox(inbox: &mut [Incoming]) {
    inbox.sort_unstable_by(|a, b| {
        a.sender
            .cmp(&b.sender)
            .then_with(|| a.payload.total_cmp(&b.payload))
    });
}

/// Routes every envelope to its target's worker inbox. In deterministic mode
/// each inbox is sorted by `(sender, payload)`; otherwise arrival order
/// (source worker, then send order) is kept.
pub fn deliver_messages(
    outboxes: Vec<Outbox>,
    partition: &PartitionMap,
    capacity: usize,
    deterministic: bool,
) -> Vec<WorkerInboxes> {
    let workers = partition.num_workers();
    let mut incoming: Vec<Vec<Vec<Envelope>>> = (0..workers).map(|_| Vec::new()).collect();
    for outbox in outboxes {
        debug_assert_eq!(outbox.len(), workers);
        for (dest, bucket) in outbox.into_iter().enumerate() {
            if !bucket.is_empty() {
                incoming[dest].push(bucket);
            }
        }
    }
    incoming
        .into_par_iter()
        .enumerate()
        .map(|(worker, buckets)| {
            let mut inboxes: WorkerInboxes = vec![Vec::new(); partition.slots(worker, capacity)];
            for envelope in buckets.into_iter().flatten() {
                debug_assert_eq!(partition.worker_of(envelope.target), worker);
                inboxes[partition.local_slot(envelope.target)].push(Incoming {
                    sender: envelope.sender,
                    payload: envelope.payload,
                });
            }
            if deterministic {
                for inbox in &mut inboxes {
                    sort_inbox(inbox);
                }
            }
            inboxes
        })
        .collect()
}

/// Left fold of `payloads` under `combiner`; `None` for an empty inbox.
pub fn apply_combiner(payloads: &[f64], combiner: &Combiner) -> Option<f64> {
    let (first, rest) = payloads.split_first()?;
    Some(rest.iter().fold(*first, |acc, &p| combiner.reduce(acc, p)))
}
