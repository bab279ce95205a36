//! Lower bounds, the exact oracle for tiny instances, and the closed-form
//! worst-case ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Side};
use crate::lp::solve_relaxation;
use crate::schedule::list_schedule;

/// Worst-case ratio `3 + 4 sqrt((1 - k/m) / (2 - k/m))`: equals 3 at
/// `m = k` and stays strictly below `3 + 2 sqrt(2)` for every finite ratio.
pub fn theoretical_ratio(m: u32, k: u32) -> f64 {
    debug_assert!(m >= k && k >= 1);
    let r = k as f64 / m as f64;
    3.0 + 4.0 * ((1.0 - r) / (2.0 - r)).sqrt()
}

/// Pool loads and critical path under a fixed allocation:
/// `W_cpu = sum of cpu times of CPU tasks`, `W_gpu` likewise, and the
/// longest-path weight with allocated durations (one DP pass in
/// topological order).
pub fn load_and_cp(instance: &Instance, allocation: &Allocation) -> (f64, f64, f64) {
    let n = instance.task_count();
    let mut w_cpu = 0.0;
    let mut w_gpu = 0.0;
    let mut dur = vec![0.0f64; n];
    for j in 0..n {
        let d = instance
            .time_on(j, allocation.side(j))
            .finite()
            .expect("allocation must be compatible");
        dur[j] = d;
        match allocation.side(j) {
            Side::Cpu => w_cpu += d,
            Side::Gpu => w_gpu += d,
        }
    }
    let cp = longest_path(instance, &dur);
    (w_cpu, w_gpu, cp)
}

fn longest_path(instance: &Instance, dur: &[f64]) -> f64 {
    let n = instance.task_count();
    let preds = instance.predecessors();
    let mut reach = vec![0.0f64; n]; // longest path ending at j, inclusive
    let mut cp = 0.0f64;
    for &j in &instance.topological_order() {
        let j = j as usize;
        let before = preds[j]
            .iter()
            .map(|&p| reach[p as usize])
            .fold(0.0f64, f64::max);
        reach[j] = before + dur[j];
        cp = cp.max(reach[j]);
    }
    cp
}

/// Size caps for the exact oracle.
#[derive(Clone, Copy, Debug)]
pub struct OracleCaps {
    pub max_tasks: usize,
    pub max_machines: u32,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_tasks: 10,
            max_machines: 4,
        }
    }
}

/// Exact optimal makespan by branch and bound: enumerate CPU/GPU
/// allocations (skipping incompatible sides), and for each allocation run an
/// exact scheduling search.
///
/// The scheduling search relies on a dominance that holds for the makespan
/// objective: some optimal schedule starts every task either at time 0 or at
/// the completion time of another task (any later start can be shifted left
/// until it hits one of those events without breaking feasibility). Tasks
/// are therefore enumerated in nondecreasing start order with candidate
/// starts drawn from {0} and the completions placed so far. Subtrees are
/// pruned against the incumbent with per-task longest-tail bounds, and whole
/// allocations with load and critical-path bounds.
pub fn exact_makespan(instance: &Instance, caps: OracleCaps) -> Result<f64> {
    let n = instance.task_count();
    if n > caps.max_tasks {
        return Err(Error::OracleCaps(format!(
            "{n} tasks exceeds cap {}",
            caps.max_tasks
        )));
    }
    let machines = instance.cpu_count() + instance.gpu_count();
    if machines > caps.max_machines {
        return Err(Error::OracleCaps(format!(
            "{machines} machines exceeds cap {}",
            caps.max_machines
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }

    let topo = instance.topological_order();
    let succs = instance.successors();
    let preds = instance.predecessors();
    let m = instance.cpu_count() as f64;
    let k = instance.gpu_count() as f64;

    let mut incumbent = f64::INFINITY;
    let mut sides = vec![Side::Gpu; n];

    // Enumerate allocations; bit j of `mask` puts task j on the CPU side.
    'alloc: for mask in 0u32..(1u32 << n) {
        let mut w_cpu = 0.0;
        let mut w_gpu = 0.0;
        let mut dur = vec![0.0f64; n];
        for j in 0..n {
            let side = if mask >> j & 1 == 1 { Side::Cpu } else { Side::Gpu };
            match instance.time_on(j, side).finite() {
                Some(d) => {
                    sides[j] = side;
                    dur[j] = d;
                    match side {
                        Side::Cpu => w_cpu += d,
                        Side::Gpu => w_gpu += d,
                    }
                }
                None => continue 'alloc,
            }
        }

        // Longest tail from each task, inclusive, for pruning.
        let mut tail = vec![0.0f64; n];
        for &j in topo.iter().rev() {
            let j = j as usize;
            let after = succs[j]
                .iter()
                .map(|&s| tail[s as usize])
                .fold(0.0f64, f64::max);
            tail[j] = dur[j] + after;
        }
        let cp = tail.iter().fold(0.0f64, |a, &b| a.max(b));
        let lb = (w_cpu / m).max(w_gpu / k).max(cp);
        if lb >= incumbent - 1e-12 {
            continue;
        }

        // Seed with the greedy list schedule for this allocation.
        let alloc = Allocation::new(sides.clone());
        let greedy = list_schedule(instance, &alloc, &topo)?;
        incumbent = incumbent.min(greedy.makespan());
        if lb >= incumbent - 1e-12 {
            continue;
        }

        let mut search = ExactSearch {
            n,
            dur: &dur,
            tail: &tail,
            preds: &preds,
            sides: &sides,
            scheduled: vec![false; n],
            completion: vec![0.0; n],
            free_at: vec![vec![0.0f64; instance.cpu_count() as usize],
                          vec![0.0f64; instance.gpu_count() as usize]],
            completions: vec![0.0], // candidate start times, kept sorted
            incumbent,
        };
        search.dfs(0, 0.0, usize::MAX, 0.0);
        incumbent = incumbent.min(search.incumbent);
    }

    if incumbent.is_infinite() {
        return Err(Error::InvalidInstance(
            "no compatible allocation exists".into(),
        ));
    }
    Ok(incumbent)
}

struct ExactSearch<'a> {
    n: usize,
    dur: &'a [f64],
    tail: &'a [f64],
    preds: &'a [Vec<u32>],
    sides: &'a [Side],
    scheduled: Vec<bool>,
    completion: Vec<f64>,
    free_at: Vec<Vec<f64>>,
    completions: Vec<f64>,
    incumbent: f64,
}

impl ExactSearch<'_> {
    fn dfs(&mut self, placed: usize, last_start: f64, last_task: usize, max_completion: f64) {
        if placed == self.n {
            self.incumbent = self.incumbent.min(max_completion);
            return;
        }
        for j in 0..self.n {
            if self.scheduled[j] {
                continue;
            }
            if !self.preds[j].iter().all(|&p| self.scheduled[p as usize]) {
                continue;
            }
            let ready = self.preds[j]
                .iter()
                .map(|&p| self.completion[p as usize])
                .fold(0.0f64, f64::max);
            let pool = match self.sides[j] {
                Side::Cpu => 0usize,
                Side::Gpu => 1usize,
            };
            let candidates: Vec<f64> = self.completions.clone();
            for &t in &candidates {
                if t < last_start || t < ready {
                    continue;
                }
                // Equal-start placements commute; enumerate them by id.
                if t == last_start && last_task != usize::MAX && j <= last_task {
                    continue;
                }
                if t + self.tail[j] >= self.incumbent - 1e-12 {
                    break; // candidates are sorted ascending
                }
                // Free machine with the latest free_at <= t dominates.
                let mut machine = None;
                let mut best = f64::NEG_INFINITY;
                for (idx, &f) in self.free_at[pool].iter().enumerate() {
                    if f <= t && f > best {
                        best = f;
                        machine = Some(idx);
                    }
                }
                let machine = match machine {
                    Some(i) => i,
                    None => continue,
                };

                let completion = t + self.dur[j];
                self.scheduled[j] = true;
                self.completion[j] = completion;
                self.free_at[pool][machine] = completion;
                let pos = self
                    .completions
                    .partition_point(|&c| c < completion);
                let fresh = self.completions.get(pos) != Some(&completion);
                if fresh {
                    self.completions.insert(pos, completion);
                }
                self.dfs(placed + 1, t, j, max_completion.max(completion));
                if fresh {
                    self.completions.remove(pos);
                }
                self.free_at[pool][machine] = best;
                self.scheduled[j] = false;
            }
        }
    }
}

/// Lower-bound summary for an instance. All reported bounds are valid lower
/// bounds on the optimal makespan; `exact_opt` is present only when the
/// oracle caps allow it.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub lp_bound: Option<f64>,
    pub load_cpu: f64,
    pub load_gpu: f64,
    pub min_critical_path: f64,
    pub exact_opt: Option<f64>,
}

/// Builds a [`BoundsReport`]. The load bounds come from the LP optimum's
/// fractional loads when all times are finite (both are below the LP
/// objective by construction); with incompatibilities they fall back to the
/// forced work on each side. `min_critical_path` weights every task by its
/// fastest compatible time.
pub fn bounds_report(instance: &Instance, oracle: Option<OracleCaps>) -> Result<BoundsReport> {
    let n = instance.task_count();
    let all_finite = (0..n).all(|j| {
        instance.cpu_time(j).finite().is_some() && instance.gpu_time(j).finite().is_some()
    });
    let m = instance.cpu_count() as f64;
    let k = instance.gpu_count() as f64;

    let (lp_bound, load_cpu, load_gpu) = if all_finite {
        let sol = solve_relaxation(instance)?;
        let mut w_cpu = 0.0;
        let mut w_gpu = 0.0;
        for j in 0..n {
            w_cpu += instance.cpu_time(j).finite().unwrap() * sol.x[j];
            w_gpu += instance.gpu_time(j).finite().unwrap() * (1.0 - sol.x[j]);
        }
        (Some(sol.objective), w_cpu / m, w_gpu / k)
    } else {
        // Tasks compatible with only one side force load there.
        let mut w_cpu = 0.0;
        let mut w_gpu = 0.0;
        for j in 0..n {
            match (instance.cpu_time(j).finite(), instance.gpu_time(j).finite()) {
                (Some(c), None) => w_cpu += c,
                (None, Some(g)) => w_gpu += g,
                _ => {}
            }
        }
        (None, w_cpu / m, w_gpu / k)
    };

    let min_dur: Vec<f64> = (0..n)
        .map(|j| {
            match (instance.cpu_time(j).finite(), instance.gpu_time(j).finite()) {
                (Some(c), Some(g)) => c.min(g),
                (Some(c), None) => c,
                (None, Some(g)) => g,
                (None, None) => unreachable!("instance invariant"),
            }
        })
        .collect();
    let min_critical_path = longest_path(instance, &min_dur);

    let exact_opt = match oracle {
        Some(caps) => Some(exact_makespan(instance, caps)?),
        None => None,
    };

    Ok(BoundsReport {
        lp_bound,
        load_cpu,
        load_gpu,
        min_critical_path,
        exact_opt,
    })
}
