//! Greedy list scheduling onto the two machine pools, and the full HLP-b
//! pipeline (relaxation, rounding, scheduling) with diagnostics.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use serde::Serialize;

use crate::allocate::{optimal_b, round_hlpb, RoundingParams};
use crate::bounds::load_and_cp;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Schedule, Side};
use crate::lp::solve_relaxation;

/// f64 ordered by total order, for machine heaps.
#[derive(Clone, Copy, PartialEq)]
struct Ord64(f64);

impl Eq for Ord64 {}
impl PartialOrd for Ord64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ord64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// List Scheduling: tasks become ready when all predecessors have completed;
/// at each decision point the ready task with the smallest priority index is
/// committed to the earliest-free machine of its allocated pool (ties by
/// lowest machine index).
///
/// `priority` must be a topological order of the instance.
pub fn list_schedule(
    instance: &Instance,
    allocation: &Allocation,
    priority: &[u32],
) -> Result<Schedule> {
    let n = instance.task_count();
    if allocation.len() != n || priority.len() != n {
        return Err(Error::InvalidParams(
            "allocation/priority size mismatch".into(),
        ));
    }

    // Priority must be a permutation that sends every edge forward.
    let mut prio_of = vec![u32::MAX; n];
    for (idx, &task) in priority.iter().enumerate() {
        let t = task as usize;
        if t >= n || prio_of[t] != u32::MAX {
            return Err(Error::NotTopological);
        }
        prio_of[t] = idx as u32;
    }
    for &(u, v) in instance.edges() {
        if prio_of[u as usize] >= prio_of[v as usize] {
            return Err(Error::NotTopological);
        }
    }

    let mut duration = vec![0.0f64; n];
    for j in 0..n {
        duration[j] = instance
            .time_on(j, allocation.side(j))
            .finite()
            .ok_or(Error::IncompatibleAssignment {
                task: j,
                side: allocation.side(j).name(),
            })?;
    }

    let mut machines: [BinaryHeap<Reverse<(Ord64, u32)>>; 2] = [
        (0..instance.cpu_count())
            .map(|i| Reverse((Ord64(0.0), i)))
            .collect(),
        (0..instance.gpu_count())
            .map(|i| Reverse((Ord64(0.0), i)))
            .collect(),
    ];
    let pool_idx = |side: Side| match side {
        Side::Cpu => 0usize,
        Side::Gpu => 1usize,
    };

    let succs = instance.successors();
    let mut remaining_preds = vec![0u32; n];
    for &(_, v) in instance.edges() {
        remaining_preds[v as usize] += 1;
    }

    let mut ready_time = vec![0.0f64; n];
    let mut pending: BinaryHeap<Reverse<(Ord64, u32)>> = (0..n)
        .filter(|&j| remaining_preds[j] == 0)
        .map(|j| Reverse((Ord64(0.0), prio_of[j])))
        .collect();
    let mut ready: BTreeSet<u32> = BTreeSet::new();

    let mut start = vec![0.0f64; n];
    let mut pool = vec![Side::Cpu; n];
    let mut machine = vec![0u32; n];
    let mut makespan = 0.0f64;
    let mut clock = 0.0f64;
    let mut scheduled = 0usize;

    while scheduled < n {
        if ready.is_empty() {
            let Reverse((Ord64(rt), _)) = *pending
                .peek()
                .expect("pending tasks exist while unscheduled tasks remain");
            clock = clock.max(rt);
        }
        while let Some(&Reverse((Ord64(rt), prio))) = pending.peek() {
            if rt <= clock {
                ready.insert(prio);
                pending.pop();
            } else {
                break;
            }
        }

        let prio = *ready.iter().next().expect("ready set is non-empty");
        ready.remove(&prio);
        let task = priority[prio as usize] as usize;
        let side = allocation.side(task);
        let heap = &mut machines[pool_idx(side)];
        let Reverse((Ord64(free), idx)) = heap.pop().expect("pool has at least one machine");
        let s = free.max(ready_time[task]);
        let completion = s + duration[task];
        heap.push(Reverse((Ord64(completion), idx)));

        start[task] = s;
        pool[task] = side;
        machine[task] = idx;
        makespan = makespan.max(completion);
        scheduled += 1;

        for &succ in &succs[task] {
            let sj = succ as usize;
            ready_time[sj] = ready_time[sj].max(completion);
            remaining_preds[sj] -= 1;
            if remaining_preds[sj] == 0 {
                pending.push(Reverse((Ord64(ready_time[sj]), prio_of[sj])));
            }
        }
    }

    Ok(Schedule::new(start, pool, machine, makespan))
}

/// Summary of one HLP-b run.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub lp_bound: f64,
    pub b: RoundingParams,
    pub w_cpu: f64,
    pub w_gpu: f64,
    pub critical_path: f64,
    pub makespan: f64,
    /// `makespan / lp_bound`, or 1 for the degenerate zero-bound case.
    pub ratio: f64,
}

/// Full HLP-b pipeline: solve the relaxation, round with the optimal (or
/// user-provided) `b`, then list-schedule in the deterministic topological
/// order.
pub fn hlp_b(instance: &Instance, b_choice: Option<f64>) -> Result<(Schedule, Diagnostics)> {
    let params = match b_choice {
        Some(b) => RoundingParams::finite(b)?,
        None => optimal_b(instance.cpu_count(), instance.gpu_count()),
    };
    let fractional = solve_relaxation(instance)?;
    let allocation = round_hlpb(&fractional, instance, params);
    let priority = instance.topological_order();
    let schedule = list_schedule(instance, &allocation, &priority)?;
    let (w_cpu, w_gpu, critical_path) = load_and_cp(instance, &allocation);
    let makespan = schedule.makespan();
    let ratio = if fractional.objective > 0.0 {
        makespan / fractional.objective
    } else {
        1.0
    };
    Ok((
        schedule,
        Diagnostics {
            lp_bound: fractional.objective,
            b: params,
            w_cpu,
            w_gpu,
            critical_path,
            makespan,
            ratio,
        },
    ))
}

/// Per-machine Gantt rows `(machine, task, start, end)` as CSV, for
/// external plotting.
pub fn gantt_csv(instance: &Instance, schedule: &Schedule) -> String {
    let n = schedule.len();
    let mut rows: Vec<u32> = (0..n as u32).collect();
    rows.sort_unstable_by(|&a, &b| {
        let ka = (schedule.pool(a as usize) as u8, schedule.machine(a as usize));
        let kb = (schedule.pool(b as usize) as u8, schedule.machine(b as usize));
        ka.cmp(&kb)
            .then(
                schedule
                    .start(a as usize)
                    .total_cmp(&schedule.start(b as usize)),
            )
            .then(a.cmp(&b))
    });
    let mut out = String::from("machine,task,start,end\n");
    for j in rows {
        let j = j as usize;
        let dur = instance
            .time_on(j, schedule.pool(j))
            .finite()
            .unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{}-{},{},{},{}\n",
            schedule.pool(j).name(),
            schedule.machine(j),
            j,
            schedule.start(j),
            schedule.start(j) + dur
        ));
    }
    out
}
