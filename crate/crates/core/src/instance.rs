//! Core domain types: task instances, allocations, schedules and their
//! validation, plus the canonical JSON formats.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance on start-time arithmetic when checking feasibility.
pub const FEAS_TOL: f64 = 1e-9;

/// A processing time: either a finite positive duration or INCOMPATIBLE,
/// meaning the task cannot run on that processor type.
///
/// The sentinel is kept out of ordinary arithmetic: callers must go through
/// [`ExtTime::finite`] to obtain an `f64`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtTime(f64);

impl ExtTime {
    pub const INCOMPATIBLE: ExtTime = ExtTime(f64::NAN);

    /// Wraps a finite positive duration.
    pub fn new(value: f64) -> Result<ExtTime> {
        if value.is_finite() && value > 0.0 {
            Ok(ExtTime(value))
        } else {
            Err(Error::InvalidInstance(format!(
                "processing time must be finite and positive, got {value}"
            )))
        }
    }

    pub fn is_incompatible(self) -> bool {
        self.0.is_nan()
    }

    /// The duration if compatible.
    pub fn finite(self) -> Option<f64> {
        if self.0.is_nan() {
            None
        } else {
            Some(self.0)
        }
    }
}

impl fmt::Debug for ExtTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "inc"),
        }
    }
}

impl Serialize for ExtTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.finite() {
            Some(v) => s.serialize_f64(v),
            None => s.serialize_str("inc"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => ExtTime::new(v).map_err(D::Error::custom),
            Raw::Str(s) if s == "inc" => Ok(ExtTime::INCOMPATIBLE),
            Raw::Str(s) => Err(D::Error::custom(format!(
                "expected a number or \"inc\", got \"{s}\""
            ))),
        }
    }
}

/// Which processor pool a task runs on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Cpu,
    Gpu,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Cpu => "cpu",
            Side::Gpu => "gpu",
        }
    }
}

/// A scheduling instance: `n` tasks with per-pool processing times, a
/// precedence DAG over dense ids `0..n`, and the platform sizes `m` (CPUs)
/// and `k` (GPUs).
///
/// Immutable after construction; all invariants are checked by [`Instance::new`].
#[derive(Clone, Debug)]
pub struct Instance {
    cpu_time: Vec<ExtTime>,
    gpu_time: Vec<ExtTime>,
    edges: Vec<(u32, u32)>,
    m: u32,
    k: u32,
}

impl Instance {
    /// Builds and validates an instance. Edges are deduplicated and sorted
    /// into canonical order.
    pub fn new(
        cpu_time: Vec<ExtTime>,
        gpu_time: Vec<ExtTime>,
        mut edges: Vec<(u32, u32)>,
        m: u32,
        k: u32,
    ) -> Result<Instance> {
        if cpu_time.len() != gpu_time.len() {
            return Err(Error::InvalidInstance(
                "cpu_time and gpu_time differ in length".into(),
            ));
        }
        let n = cpu_time.len();
        if k < 1 {
            return Err(Error::InvalidInstance("k must be at least 1".into()));
        }
        if m < k {
            return Err(Error::InvalidInstance(format!("m < k (m={m}, k={k})")));
        }
        for j in 0..n {
            if cpu_time[j].is_incompatible() && gpu_time[j].is_incompatible() {
                return Err(Error::InvalidInstance(format!(
                    "task {j} has no finite processing time"
                )));
            }
        }
        for &(u, v) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u},{v}) references a task outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop on task {u}")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let inst = Instance {
            cpu_time,
            gpu_time,
            edges,
            m,
            k,
        };
        // Acyclicity: Kahn consumes every task iff there is no cycle.
        if inst.topological_order().len() != n {
            return Err(Error::CyclicGraph);
        }
        Ok(inst)
    }

    pub fn task_count(&self) -> usize {
        self.cpu_time.len()
    }

    pub fn cpu_time(&self, j: usize) -> ExtTime {
        self.cpu_time[j]
    }

    pub fn gpu_time(&self, j: usize) -> ExtTime {
        self.gpu_time[j]
    }

    pub fn time_on(&self, j: usize, side: Side) -> ExtTime {
        match side {
            Side::Cpu => self.cpu_time[j],
            Side::Gpu => self.gpu_time[j],
        }
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn machines(&self, side: Side) -> u32 {
        match side {
            Side::Cpu => self.m,
            Side::Gpu => self.k,
        }
    }

    pub fn cpu_count(&self) -> u32 {
        self.m
    }

    pub fn gpu_count(&self) -> u32 {
        self.k
    }

    /// Predecessor lists indexed by task.
    pub fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut preds = vec![Vec::new(); self.task_count()];
        for &(u, v) in &self.edges {
            preds[v as usize].push(u);
        }
        preds
    }

    /// Successor lists indexed by task.
    pub fn successors(&self) -> Vec<Vec<u32>> {
        let mut succs = vec![Vec::new(); self.task_count()];
        for &(u, v) in &self.edges {
            succs[u as usize].push(v);
        }
        succs
    }

    /// Deterministic topological order: Kahn's layering, ties within a layer
    /// broken by ascending task id.
    ///
    /// Returns fewer than `n` ids iff the edge relation has a cycle; for a
    /// validated [`Instance`] the result is always a full permutation.
    pub fn topological_order(&self) -> Vec<u32> {
        let n = self.task_count();
        let mut indegree = vec![0u32; n];
        for &(_, v) in &self.edges {
            indegree[v as usize] += 1;
        }
        // Compact CSR successor adjacency; edges are sorted by source, so
        // a prefix-sum over out-degrees indexes straight into `edges`.
        let mut succ_off = vec![0u32; n + 1];
        for &(u, _) in &self.edges {
            succ_off[u as usize + 1] += 1;
        }
        for i in 0..n {
            succ_off[i + 1] += succ_off[i];
        }
        let mut order = Vec::with_capacity(n);
        let mut frontier: Vec<u32> = (0..n as u32).filter(|&j| indegree[j as usize] == 0).collect();
        while !frontier.is_empty() {
            frontier.sort_unstable();
            let mut next = Vec::new();
            for &j in &frontier {
                order.push(j);
                let lo = succ_off[j as usize] as usize;
                let hi = succ_off[j as usize + 1] as usize;
                for &(_, s) in &self.edges[lo..hi] {
                    indegree[s as usize] -= 1;
                    if indegree[s as usize] == 0 {
                        next.push(s);
                    }
                }
            }
            frontier = next;
        }
        order
    }

    /// Parses the canonical instance JSON.
    pub fn from_json(bytes: &[u8]) -> Result<Instance> {
        let raw: InstanceJson = serde_json::from_slice(bytes)?;
        raw.into_instance()
    }

    pub fn from_json_str(s: &str) -> Result<Instance> {
        Self::from_json(s.as_bytes())
    }

    pub fn to_json(&self) -> String {
        let tasks: Vec<TaskJson> = (0..self.task_count())
            .map(|j| TaskJson {
                id: j as u32,
                cpu: self.cpu_time[j],
                gpu: self.gpu_time[j],
            })
            .collect();
        let raw = InstanceJson {
            m: self.m,
            k: self.k,
            tasks,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }
}

/// Loads and validates an instance from the canonical JSON format.
pub fn load_instance(bytes: &[u8]) -> Result<Instance> {
    Instance::from_json(bytes)
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    m: u32,
    k: u32,
    tasks: Vec<TaskJson>,
    edges: Vec<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
struct TaskJson {
    id: u32,
    cpu: ExtTime,
    gpu: ExtTime,
}

impl InstanceJson {
    fn into_instance(self) -> Result<Instance> {
        let n = self.tasks.len();
        let mut cpu = vec![None; n];
        let mut gpu = vec![None; n];
        for t in &self.tasks {
            let id = t.id as usize;
            if id >= n {
                return Err(Error::InvalidInstance(format!(
                    "task id {id} outside dense range 0..{n}"
                )));
            }
            if cpu[id].is_some() {
                return Err(Error::InvalidInstance(format!("duplicate task id {id}")));
            }
            cpu[id] = Some(t.cpu);
            gpu[id] = Some(t.gpu);
        }
        let cpu: Vec<ExtTime> = cpu.into_iter().map(|t| t.unwrap()).collect();
        let gpu: Vec<ExtTime> = gpu.into_iter().map(|t| t.unwrap()).collect();
        let edges = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Instance::new(cpu, gpu, edges, self.m, self.k)
    }
}

/// Binary CPU/GPU assignment of every task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    side: Vec<Side>,
}

impl Allocation {
    pub fn new(side: Vec<Side>) -> Allocation {
        Allocation { side }
    }

    pub fn side(&self, j: usize) -> Side {
        self.side[j]
    }

    pub fn sides(&self) -> &[Side] {
        &self.side
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }
}

/// A complete schedule: per-task start time and machine, and the makespan.
#[derive(Clone, Debug)]
pub struct Schedule {
    start: Vec<f64>,
    pool: Vec<Side>,
    machine: Vec<u32>,
    makespan: f64,
}

impl Schedule {
    pub fn new(start: Vec<f64>, pool: Vec<Side>, machine: Vec<u32>, makespan: f64) -> Schedule {
        assert_eq!(start.len(), pool.len());
        assert_eq!(start.len(), machine.len());
        Schedule {
            start,
            pool,
            machine,
            makespan,
        }
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }

    pub fn start(&self, j: usize) -> f64 {
        self.start[j]
    }

    pub fn pool(&self, j: usize) -> Side {
        self.pool[j]
    }

    pub fn machine(&self, j: usize) -> u32 {
        self.machine[j]
    }

    pub fn makespan(&self) -> f64 {
        self.makespan
    }

    pub fn from_json(bytes: &[u8]) -> Result<Schedule> {
        let raw: ScheduleJson = serde_json::from_slice(bytes)?;
        let n = raw.assignments.len();
        let mut start = vec![f64::NAN; n];
        let mut pool = vec![Side::Cpu; n];
        let mut machine = vec![0u32; n];
        for a in &raw.assignments {
            let id = a.id as usize;
            if id >= n || !start[id].is_nan() {
                return Err(Error::InvalidInstance(format!(
                    "schedule assignment ids must be dense and unique (id {id})"
                )));
            }
            start[id] = a.start;
            pool[id] = a.pool;
            machine[id] = a.machine;
        }
        Ok(Schedule::new(start, pool, machine, raw.makespan))
    }

    pub fn to_json(&self) -> String {
        let raw = ScheduleJson {
            makespan: self.makespan,
            assignments: (0..self.len())
                .map(|j| AssignmentJson {
                    id: j as u32,
                    pool: self.pool[j],
                    machine: self.machine[j],
                    start: self.start[j],
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("schedule serialization cannot fail")
    }

    /// The allocation implied by the per-task pools.
    pub fn allocation(&self) -> Allocation {
        Allocation::new(self.pool.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    makespan: f64,
    assignments: Vec<AssignmentJson>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    id: u32,
    pool: Side,
    machine: u32,
    start: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Size,
    MachineIndex,
    Precedence,
    Overlap,
    PoolMismatch,
    Incompatible,
    NegativeStart,
    Makespan,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Task id, or the head of the offending edge.
    pub subject: u32,
    pub detail: String,
}

/// Outcome of [`validate_schedule`]: `ok` iff `violations` is empty.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> ValidationReport {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// Checks every schedule invariant and reports all violations: machine index
/// bounds, precedence feasibility, per-machine interval disjointness
/// (half-open intervals), allocation/pool consistency, compatibility of the
/// assigned pool, and the makespan equation.
pub fn validate_schedule(
    instance: &Instance,
    allocation: &Allocation,
    schedule: &Schedule,
) -> ValidationReport {
    let n = instance.task_count();
    let mut v = Vec::new();
    if allocation.len() != n || schedule.len() != n {
        v.push(Violation {
            kind: ViolationKind::Size,
            subject: 0,
            detail: format!(
                "instance has {n} tasks, allocation {}, schedule {}",
                allocation.len(),
                schedule.len()
            ),
        });
        return ValidationReport::from_violations(v);
    }

    let mut duration = vec![0.0f64; n];
    for j in 0..n {
        let pool = schedule.pool(j);
        if pool != allocation.side(j) {
            v.push(Violation {
                kind: ViolationKind::PoolMismatch,
                subject: j as u32,
                detail: format!(
                    "allocated to {} but scheduled on {}",
                    allocation.side(j).name(),
                    pool.name()
                ),
            });
        }
        match instance.time_on(j, pool).finite() {
            Some(d) => duration[j] = d,
            None => {
                v.push(Violation {
                    kind: ViolationKind::Incompatible,
                    subject: j as u32,
                    detail: format!("scheduled on {} where it is incompatible", pool.name()),
                });
            }
        }
        let limit = instance.machines(pool);
        if schedule.machine(j) >= limit {
            v.push(Violation {
                kind: ViolationKind::MachineIndex,
                subject: j as u32,
                detail: format!(
                    "machine index {} out of range for {} pool of size {limit}",
                    schedule.machine(j),
                    pool.name()
                ),
            });
        }
        if schedule.start(j) < -FEAS_TOL {
            v.push(Violation {
                kind: ViolationKind::NegativeStart,
                subject: j as u32,
                detail: format!("start {} is negative", schedule.start(j)),
            });
        }
    }

    for &(i, j) in instance.edges() {
        let end_i = schedule.start(i as usize) + duration[i as usize];
        if schedule.start(j as usize) < end_i - FEAS_TOL {
            v.push(Violation {
                kind: ViolationKind::Precedence,
                subject: i,
                detail: format!(
                    "edge ({i},{j}): task {j} starts at {} before predecessor {i} completes at {end_i}",
                    schedule.start(j as usize)
                ),
            });
        }
    }

    // Per-machine interval disjointness: sort tasks by (pool, machine, start)
    // and scan adjacent pairs. Intervals are half-open so touching is legal.
    let mut by_machine: Vec<u32> = (0..n as u32).collect();
    by_machine.sort_unstable_by(|&a, &b| {
        let ka = (schedule.pool(a as usize) as u8, schedule.machine(a as usize));
        let kb = (schedule.pool(b as usize) as u8, schedule.machine(b as usize));
        ka.cmp(&kb)
            .then(
                schedule
                    .start(a as usize)
                    .partial_cmp(&schedule.start(b as usize))
                    .unwrap(),
            )
            .then(a.cmp(&b))
    });
    for w in by_machine.windows(2) {
        let (a, b) = (w[0] as usize, w[1] as usize);
        if schedule.pool(a) == schedule.pool(b) && schedule.machine(a) == schedule.machine(b) {
            let end_a = schedule.start(a) + duration[a];
            if schedule.start(b) < end_a - FEAS_TOL {
                v.push(Violation {
                    kind: ViolationKind::Overlap,
                    subject: a as u32,
                    detail: format!(
                        "tasks {a} and {b} overlap on ({}, {})",
                        schedule.pool(a).name(),
                        schedule.machine(a)
                    ),
                });
            }
        }
    }

    let computed = (0..n)
        .map(|j| schedule.start(j) + duration[j])
        .fold(0.0f64, f64::max);
    if (computed - schedule.makespan()).abs() > FEAS_TOL {
        v.push(Violation {
            kind: ViolationKind::Makespan,
            subject: 0,
            detail: format!(
                "recorded makespan {} but max completion is {computed}",
                schedule.makespan()
            ),
        });
    }

    ValidationReport::from_violations(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: f64) -> ExtTime {
        ExtTime::new(v).unwrap()
    }

    #[test]
    fn load_simple_instance() {
        let json = r#"{"m":1,"k":1,"tasks":[{"id":0,"cpu":4,"gpu":2}],"edges":[]}"#;
        let inst = load_instance(json.as_bytes()).unwrap();
        assert_eq!(inst.task_count(), 1);
        assert_eq!(inst.cpu_time(0).finite(), Some(4.0));
        assert_eq!(inst.gpu_time(0).finite(), Some(2.0));
    }

    #[test]
    fn load_rejects_cycle() {
        let json = r#"{"m":1,"k":1,"tasks":[{"id":0,"cpu":1,"gpu":1},{"id":1,"cpu":1,"gpu":1}],
                       "edges":[[0,1],[1,0]]}"#;
        assert!(matches!(
            load_instance(json.as_bytes()),
            Err(Error::CyclicGraph)
        ));
    }

    #[test]
    fn load_rejects_m_less_than_k() {
        let json = r#"{"m":1,"k":2,"tasks":[{"id":0,"cpu":1,"gpu":1}],"edges":[]}"#;
        let err = load_instance(json.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("m < k"));
    }

    #[test]
    fn load_rejects_double_incompatible() {
        let json = r#"{"m":1,"k":1,"tasks":[{"id":0,"cpu":"inc","gpu":"inc"}],"edges":[]}"#;
        assert!(load_instance(json.as_bytes()).is_err());
    }

    #[test]
    fn load_rejects_nonpositive_time() {
        let json = r#"{"m":1,"k":1,"tasks":[{"id":0,"cpu":0,"gpu":1}],"edges":[]}"#;
        assert!(load_instance(json.as_bytes()).is_err());
    }

    #[test]
    fn incompatible_round_trips() {
        let inst = Instance::new(
            vec![ExtTime::INCOMPATIBLE, t(2.0)],
            vec![t(1.0), ExtTime::INCOMPATIBLE],
            vec![(0, 1)],
            2,
            1,
        )
        .unwrap();
        let again = Instance::from_json_str(&inst.to_json()).unwrap();
        assert!(again.cpu_time(0).is_incompatible());
        assert_eq!(again.gpu_time(0).finite(), Some(1.0));
        assert!(again.gpu_time(1).is_incompatible());
    }

    #[test]
    fn duplicate_edges_are_deduplicated() {
        let inst = Instance::new(
            vec![t(1.0), t(1.0)],
            vec![t(1.0), t(1.0)],
            vec![(0, 1), (0, 1)],
            1,
            1,
        )
        .unwrap();
        assert_eq!(inst.edges(), &[(0, 1)]);
    }

    #[test]
    fn topo_order_chain_and_isolated() {
        let chain = Instance::new(
            vec![t(1.0); 3],
            vec![t(1.0); 3],
            vec![(0, 1), (1, 2)],
            1,
            1,
        )
        .unwrap();
        assert_eq!(chain.topological_order(), vec![0, 1, 2]);

        let isolated = Instance::new(vec![t(1.0); 2], vec![t(1.0); 2], vec![], 1, 1).unwrap();
        assert_eq!(isolated.topological_order(), vec![0, 1]);
    }

    #[test]
    fn topo_order_diamond() {
        let diamond = Instance::new(
            vec![t(1.0); 4],
            vec![t(1.0); 4],
            vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            1,
            1,
        )
        .unwrap();
        assert_eq!(diamond.topological_order(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn topo_order_is_layered() {
        // Frontier {0,2,3} drains as a layer before 1 becomes available.
        let inst = Instance::new(vec![t(1.0); 4], vec![t(1.0); 4], vec![(0, 1)], 1, 1).unwrap();
        assert_eq!(inst.topological_order(), vec![0, 2, 3, 1]);
    }

    #[test]
    fn validate_accepts_single_gpu_task() {
        let inst = Instance::new(vec![t(4.0)], vec![t(2.0)], vec![], 1, 1).unwrap();
        let alloc = Allocation::new(vec![Side::Gpu]);
        let sched = Schedule::new(vec![0.0], vec![Side::Gpu], vec![0], 2.0);
        let report = validate_schedule(&inst, &alloc, &sched);
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn validate_flags_precedence_violation() {
        let inst = Instance::new(
            vec![t(1.0); 2],
            vec![t(1.0); 2],
            vec![(0, 1)],
            2,
            1,
        )
        .unwrap();
        let alloc = Allocation::new(vec![Side::Cpu, Side::Cpu]);
        let sched = Schedule::new(vec![0.5, 0.0], vec![Side::Cpu; 2], vec![0, 1], 1.5);
        let report = validate_schedule(&inst, &alloc, &sched);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Precedence));
    }

    #[test]
    fn validate_flags_overlap() {
        let inst = Instance::new(vec![t(2.0); 2], vec![t(2.0); 2], vec![], 1, 1).unwrap();
        let alloc = Allocation::new(vec![Side::Cpu, Side::Cpu]);
        let sched = Schedule::new(vec![0.0, 1.0], vec![Side::Cpu; 2], vec![0, 0], 3.0);
        let report = validate_schedule(&inst, &alloc, &sched);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Overlap));
    }

    #[test]
    fn back_to_back_on_one_machine_is_legal() {
        let inst = Instance::new(vec![t(1.0); 2], vec![t(1.0); 2], vec![], 1, 1).unwrap();
        let alloc = Allocation::new(vec![Side::Cpu, Side::Cpu]);
        let sched = Schedule::new(vec![0.0, 1.0], vec![Side::Cpu; 2], vec![0, 0], 2.0);
        assert!(validate_schedule(&inst, &alloc, &sched).ok);
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = Instance::new(
            vec![t(4.0), t(1.5)],
            vec![t(2.0), ExtTime::INCOMPATIBLE],
            vec![(0, 1)],
            3,
            2,
        )
        .unwrap();
        let again = Instance::from_json_str(&inst.to_json()).unwrap();
        assert_eq!(again.to_json(), inst.to_json());
    }
}
