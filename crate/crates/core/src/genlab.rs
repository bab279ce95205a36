//! Instance generation: random layered DAG benchmarks, the q-partite
//! hardness reduction with planted YES-partitions, the certified pipelined
//! YES-case schedule, the incompatibility variant, and the soundness-gap
//! arithmetic.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Allocation, ExtTime, Instance, Schedule, Side};

/// Parameters of the q-partite reduction.
#[derive(Clone, Copy, Debug)]
pub struct ReductionParams {
    /// Number of layers; a positive multiple of 3.
    pub q: u32,
    /// Number of partition classes Q > 1.
    pub classes: u32,
    /// Vertices per layer, n > Q.
    pub n: u32,
    /// YES-case slack, 0 < epsilon <= 1/Q^2.
    pub epsilon: f64,
    /// NO-case density parameter, 0 < delta <= 1/(2Q).
    pub delta: f64,
}

impl ReductionParams {
    pub fn new(q: u32, classes: u32, n: u32, epsilon: f64, delta: f64) -> Result<ReductionParams> {
        if q == 0 || q % 3 != 0 {
            return Err(Error::InvalidParams(format!(
                "q must be a positive multiple of 3, got {q}"
            )));
        }
        if classes <= 1 {
            return Err(Error::InvalidParams(format!("Q must exceed 1, got {classes}")));
        }
        if n <= classes {
            return Err(Error::InvalidParams(format!(
                "n must exceed Q, got n={n}, Q={classes}"
            )));
        }
        let qf = classes as f64;
        if !(epsilon > 0.0 && epsilon <= 1.0 / (qf * qf)) {
            return Err(Error::InvalidParams(format!(
                "epsilon must lie in (0, 1/Q^2], got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta <= 1.0 / (2.0 * qf)) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in (0, 1/(2Q)], got {delta}"
            )));
        }
        Ok(ReductionParams {
            q,
            classes,
            n,
            epsilon,
            delta,
        })
    }

    /// CPU count of the base reduction: ceil((1 + Q epsilon) n^4).
    pub fn cpu_count(&self) -> u64 {
        let n = self.n as f64;
        ((1.0 + self.classes as f64 * self.epsilon) * n.powi(4)).ceil() as u64
    }

    /// GPU count of the reduction: ceil((1 + Q epsilon) n^2).
    pub fn gpu_count(&self) -> u64 {
        let n = self.n as f64;
        ((1.0 + self.classes as f64 * self.epsilon) * n * n).ceil() as u64
    }
}

/// A q-partite layered graph. Vertex ids are global: layer `i` (0-based)
/// holds ids `i*n .. (i+1)*n`. Edges go between adjacent layers only.
/// `planted` carries the per-vertex class label of a YES-partition.
#[derive(Clone, Debug)]
pub struct QPartiteGraph {
    q: u32,
    n: u32,
    edges: Vec<(u32, u32)>,
    planted: Option<Vec<u8>>,
}

impl QPartiteGraph {
    pub fn new(
        q: u32,
        n: u32,
        edges: Vec<(u32, u32)>,
        planted: Option<Vec<u8>>,
    ) -> Result<QPartiteGraph> {
        let vertices = (q as u64 * n as u64) as u32;
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidParams(format!(
                    "edge ({u},{v}) outside vertex range"
                )));
            }
            if v / n != u / n + 1 {
                return Err(Error::InvalidParams(format!(
                    "edge ({u},{v}) does not connect adjacent layers"
                )));
            }
        }
        if let Some(labels) = &planted {
            if labels.len() != vertices as usize {
                return Err(Error::InvalidParams("planted label count mismatch".into()));
            }
            for &(u, v) in &edges {
                if labels[u as usize] > labels[v as usize] {
                    return Err(Error::InvalidParams(format!(
                        "edge ({u},{v}) descends from class {} to class {}",
                        labels[u as usize], labels[v as usize]
                    )));
                }
            }
        }
        Ok(QPartiteGraph {
            q,
            n,
            edges,
            planted,
        })
    }

    pub fn layer_count(&self) -> u32 {
        self.q
    }

    pub fn layer_size(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn planted(&self) -> Option<&[u8]> {
        self.planted.as_deref()
    }

    pub fn layer_of(&self, vertex: u32) -> u32 {
        vertex / self.n
    }

    pub fn from_json(bytes: &[u8]) -> Result<QPartiteGraph> {
        let raw: GraphJson = serde_json::from_slice(bytes)?;
        let q = raw.layers.len() as u32;
        let n = raw.layers.first().map(|l| l.len()).unwrap_or(0) as u32;
        for (i, layer) in raw.layers.iter().enumerate() {
            if layer.len() as u32 != n {
                return Err(Error::InvalidParams("ragged layer sizes".into()));
            }
            for (pos, &id) in layer.iter().enumerate() {
                if id != i as u32 * n + pos as u32 {
                    return Err(Error::InvalidParams(
                        "layer ids must be consecutive and in order".into(),
                    ));
                }
            }
        }
        QPartiteGraph::new(
            q,
            n,
            raw.edges.iter().map(|e| (e[0], e[1])).collect(),
            raw.planted,
        )
    }

    pub fn to_json(&self) -> String {
        let layers: Vec<Vec<u32>> = (0..self.q)
            .map(|i| (i * self.n..(i + 1) * self.n).collect())
            .collect();
        let raw = GraphJson {
            layers,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            planted: self.planted.clone(),
        };
        serde_json::to_string(&raw).expect("graph serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    layers: Vec<Vec<u32>>,
    edges: Vec<[u32; 2]>,
    planted: Option<Vec<u8>>,
}

/// Configuration for [`random_layered_dag`].
#[derive(Clone, Copy, Debug)]
pub struct RandomDagConfig {
    pub tasks: u32,
    pub layers: u32,
    pub edge_prob: f64,
    pub cpu_range: (f64, f64),
    pub gpu_range: (f64, f64),
    pub m: u32,
    pub k: u32,
    pub seed: u64,
}

/// Seeded random layered DAG: tasks are split round-robin over the layers
/// (task `j` sits in layer `j mod layers`) and each potential edge between
/// adjacent layers is included independently with `edge_prob`. Times are
/// drawn uniformly from the given ranges. Same seed, same instance.
pub fn random_layered_dag(cfg: &RandomDagConfig) -> Result<Instance> {
    if cfg.layers == 0 {
        return Err(Error::InvalidParams("layers must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.edge_prob) {
        return Err(Error::InvalidParams("edge_prob must lie in [0,1]".into()));
    }
    for (lo, hi) in [cfg.cpu_range, cfg.gpu_range] {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "invalid time range [{lo}, {hi}]"
            )));
        }
    }
    if cfg.k < 1 || cfg.m < cfg.k {
        return Err(Error::InvalidParams("need m >= k >= 1".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.tasks as usize;
    let mut cpu = Vec::with_capacity(n);
    let mut gpu = Vec::with_capacity(n);
    for _ in 0..n {
        cpu.push(ExtTime::new(rng.random_range(cfg.cpu_range.0..=cfg.cpu_range.1))?);
        gpu.push(ExtTime::new(rng.random_range(cfg.gpu_range.0..=cfg.gpu_range.1))?);
    }

    let layer_members = |l: u32| (l..cfg.tasks).step_by(cfg.layers as usize);
    let mut edges = Vec::new();
    for l in 0..cfg.layers.saturating_sub(1) {
        for u in layer_members(l) {
            for v in layer_members(l + 1) {
                if rng.random_bool(cfg.edge_prob) {
                    edges.push((u, v));
                }
            }
        }
    }
    Instance::new(cpu, gpu, edges, cfg.m, cfg.k)
}

/// Generates a q-partite graph with a planted YES-partition: labels are
/// balanced deterministically (class sizes `floor(n/Q)` or `ceil(n/Q)`),
/// shuffled per layer with the seeded PRNG, and every allowed adjacent-layer
/// edge (non-descending class) is included with `edge_prob`.
pub fn qpartite_yes_graph(
    params: &ReductionParams,
    edge_prob: f64,
    seed: u64,
) -> Result<QPartiteGraph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParams("edge_prob must lie in [0,1]".into()));
    }
    let n = params.n;
    let classes = params.classes;
    let base = n / classes;
    let rem = n % classes;
    let floor = (1.0 - params.epsilon) * n as f64 / classes as f64;
    if rem > 0 && (base as f64) < floor {
        return Err(Error::InvalidParams(format!(
            "balanced classes of size {base} would violate the (1-epsilon)n/Q floor {floor:.4}; \
             pick n closer to a multiple of Q or a larger epsilon"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u8> = Vec::with_capacity((params.q * n) as usize);
    let mut layer_labels: Vec<u8> = Vec::with_capacity(n as usize);
    for c in 0..classes {
        let size = base + u32::from(c < rem);
        layer_labels.extend(std::iter::repeat(c as u8).take(size as usize));
    }
    for _ in 0..params.q {
        let mut shuffled = layer_labels.clone();
        shuffled.shuffle(&mut rng);
        labels.extend_from_slice(&shuffled);
    }

    let mut edges = Vec::new();
    for i in 0..params.q - 1 {
        for u in i * n..(i + 1) * n {
            for v in (i + 1) * n..(i + 2) * n {
                if labels[u as usize] <= labels[v as usize] && rng.random_bool(edge_prob) {
                    edges.push((u, v));
                }
            }
        }
    }
    QPartiteGraph::new(params.q, n, edges, Some(labels))
}

/// Memory guard for reduction instances.
#[derive(Clone, Copy, Debug)]
pub struct SizeCaps {
    pub max_tasks: u64,
    pub max_edges: u64,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps {
            max_tasks: 100_000_000,
            max_edges: 100_000_000,
        }
    }
}

/// Deterministic task layout of a reduction instance: which contiguous id
/// range realizes the task set of each graph vertex.
#[derive(Clone, Debug)]
pub struct ReductionLayout {
    /// Per vertex: (first task id, set size).
    offsets: Vec<(u64, u32)>,
    total: u64,
}

impl ReductionLayout {
    fn compute(q: u32, n: u32, classes: u32, b_size: u64) -> ReductionLayout {
        let a_size = (classes as u64) * (n as u64) - classes as u64;
        let c_size = classes as u64 - 2;
        let mut offsets = Vec::with_capacity((q * n) as usize);
        let mut next = 0u64;
        for layer in 0..q {
            let size = match layer % 3 {
                0 => a_size,
                1 => b_size,
                _ => c_size,
            };
            for _ in 0..n {
                offsets.push((next, size as u32));
                next += size;
            }
        }
        ReductionLayout {
            offsets,
            total: next,
        }
    }

    pub fn total_tasks(&self) -> u64 {
        self.total
    }

    pub fn set(&self, vertex: u32) -> std::ops::Range<u64> {
        let (start, len) = self.offsets[vertex as usize];
        start..start + len as u64
    }

    pub fn set_len(&self, vertex: u32) -> u64 {
        self.offsets[vertex as usize].1 as u64
    }

    /// Task kind of a vertex's set by its layer (0-based).
    fn kind(layer: u32) -> SetKind {
        match layer % 3 {
            0 => SetKind::A,
            1 => SetKind::B,
            _ => SetKind::C,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum SetKind {
    /// GPU tasks, Qn - Q per vertex.
    A,
    /// CPU tasks, Qn^3 per vertex (or floor(Qmn/k) in the variant).
    B,
    /// A chain of Q - 2 GPU tasks.
    C,
}

#[derive(Clone, Copy)]
enum Flavor {
    Base,
    Corollary { m_target: u64 },
}

/// Builds the scheduling instance of the hardness reduction.
/// GPU tasks have `cpu = n, gpu = 1`; CPU tasks have
/// `cpu = 1, gpu = 1/n`; chain sets carry their internal precedence edges;
/// every graph edge (v, w) becomes the complete arc set between the two
/// task sets.
pub fn reduction_instance(
    graph: &QPartiteGraph,
    params: &ReductionParams,
    caps: &SizeCaps,
) -> Result<(Instance, ReductionLayout)> {
    build_reduction(graph, params, Flavor::Base, caps)
}

/// Incompatibility variant: GPU tasks cannot run on CPUs and vice versa
/// (`INCOMPATIBLE` sentinel), CPU sets shrink to `floor(Q m n / k)` tasks,
/// and the CPU count is the caller's `m_target >= k`.
pub fn corollary_instance(
    graph: &QPartiteGraph,
    params: &ReductionParams,
    m_target: u64,
    caps: &SizeCaps,
) -> Result<(Instance, ReductionLayout)> {
    if m_target < params.gpu_count() {
        return Err(Error::InvalidParams(format!(
            "m_target {m_target} is below the GPU count {}",
            params.gpu_count()
        )));
    }
    build_reduction(graph, params, Flavor::Corollary { m_target }, caps)
}

fn build_reduction(
    graph: &QPartiteGraph,
    params: &ReductionParams,
    flavor: Flavor,
    caps: &SizeCaps,
) -> Result<(Instance, ReductionLayout)> {
    if graph.layer_count() != params.q || graph.layer_size() != params.n {
        return Err(Error::InvalidParams(
            "graph shape does not match reduction parameters".into(),
        ));
    }
    let n = params.n as u64;
    let classes = params.classes as u64;
    let k = params.gpu_count();
    let (m, b_size) = match flavor {
        Flavor::Base => (params.cpu_count(), classes * n * n * n),
        Flavor::Corollary { m_target } => (m_target, classes * m_target * n / k),
    };

    let layout = ReductionLayout::compute(params.q, params.n, params.classes, b_size);
    if layout.total_tasks() > caps.max_tasks {
        return Err(Error::SizeCap {
            what: "tasks",
            have: layout.total_tasks(),
            cap: caps.max_tasks,
        });
    }
    if layout.total_tasks() > u32::MAX as u64 || m > u32::MAX as u64 {
        return Err(Error::SizeCap {
            what: "tasks",
            have: layout.total_tasks().max(m),
            cap: u32::MAX as u64,
        });
    }

    // Edge count check before materializing anything. Each chain of
    // Q - 2 tasks contributes Q - 3 internal edges.
    let chain_edges = if classes >= 3 {
        params.q as u64 / 3 * n * (classes - 3)
    } else {
        0
    };
    let mut arc_count = chain_edges;
    for &(u, v) in graph.edges() {
        let su = layout.set_len(u);
        let sv = layout.set_len(v);
        arc_count = arc_count.saturating_add(su * sv);
        if arc_count > caps.max_edges {
            return Err(Error::SizeCap {
                what: "edges",
                have: arc_count,
                cap: caps.max_edges,
            });
        }
    }
    if arc_count > caps.max_edges {
        return Err(Error::SizeCap {
            what: "edges",
            have: arc_count,
            cap: caps.max_edges,
        });
    }

    let total = layout.total_tasks() as usize;
    let nf = params.n as f64;
    let (gpu_task_times, cpu_task_times) = match flavor {
        // GPU tasks: cpu = n, gpu = 1. CPU tasks: cpu = 1, gpu = 1/n.
        Flavor::Base => (
            (ExtTime::new(nf)?, ExtTime::new(1.0)?),
            (ExtTime::new(1.0)?, ExtTime::new(1.0 / nf)?),
        ),
        Flavor::Corollary { .. } => (
            (ExtTime::INCOMPATIBLE, ExtTime::new(1.0)?),
            (ExtTime::new(1.0)?, ExtTime::INCOMPATIBLE),
        ),
    };

    let mut cpu_time = Vec::with_capacity(total);
    let mut gpu_time = Vec::with_capacity(total);
    for layer in 0..params.q {
        let (c, g) = match ReductionLayout::kind(layer) {
            SetKind::A | SetKind::C => gpu_task_times,
            SetKind::B => cpu_task_times,
        };
        let per_vertex = layout.set_len(layer * params.n) as usize;
        for _ in 0..params.n as usize * per_vertex {
            cpu_time.push(c);
            gpu_time.push(g);
        }
    }

    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(arc_count as usize);
    // Chains inside type-C sets.
    for layer in (2..params.q).step_by(3) {
        for v in layer * params.n..(layer + 1) * params.n {
            let set = layout.set(v);
            let (lo, hi) = (set.start as u32, set.end as u32);
            for t in lo..hi.saturating_sub(1) {
                edges.push((t, t + 1));
            }
        }
    }
    // Complete arc sets along graph edges.
    for &(u, v) in graph.edges() {
        let from = layout.set(u);
        let to = layout.set(v);
        for a in from.clone() {
            for b in to.clone() {
                edges.push((a as u32, b as u32));
            }
        }
    }

    let instance = Instance::new(cpu_time, gpu_time, edges, m as u32, k as u32)?;
    Ok((instance, layout))
}

/// Builds the certified pipelined YES-case schedule: the tasks of set
/// `S_{i,j}` run in the unit slot `[i+j-1, i+j)`, giving makespan
/// `Qq/3 + Q - 1`. Requires planted labels; fails hard if any slot would
/// exceed the machine counts, which would indicate a construction bug.
pub fn yes_case_schedule(
    instance: &Instance,
    graph: &QPartiteGraph,
    params: &ReductionParams,
) -> Result<(Allocation, Schedule)> {
    let labels = graph
        .planted()
        .ok_or_else(|| Error::Construction("graph has no planted labels".into()))?;
    if graph.layer_count() != params.q || graph.layer_size() != params.n {
        return Err(Error::InvalidParams(
            "graph shape does not match reduction parameters".into(),
        ));
    }

    // Recover the per-vertex CPU-set size from the instance task count, so
    // both the base reduction and the incompatibility variant certify.
    let q = params.q as u64;
    let n = params.n as u64;
    let classes = params.classes as u64;
    let a_total = q / 3 * n * (classes * n - classes);
    let c_total = q / 3 * n * (classes - 2);
    let b_vertices = q / 3 * n;
    let total = instance.task_count() as u64;
    if total < a_total + c_total || (total - a_total - c_total) % b_vertices != 0 {
        return Err(Error::Construction(
            "instance task count does not match this graph and parameters".into(),
        ));
    }
    let b_size = (total - a_total - c_total) / b_vertices;
    let layout = ReductionLayout::compute(params.q, params.n, params.classes, b_size);

    let horizon = (classes * q / 3 + classes - 1) as usize; // last slot index t
    let mut cpu_used = vec![0u32; horizon + 1];
    let mut gpu_used = vec![0u32; horizon + 1];

    let total = total as usize;
    let mut start = vec![0.0f64; total];
    let mut pool = vec![Side::Gpu; total];
    let mut machine = vec![0u32; total];
    let mut sides = vec![Side::Gpu; total];

    let mut place = |task: u64, slot: u64, side: Side, cpu_used: &mut [u32], gpu_used: &mut [u32]| -> Result<()> {
        let t = slot as usize;
        let used = match side {
            Side::Cpu => &mut cpu_used[t],
            Side::Gpu => &mut gpu_used[t],
        };
        let limit = instance.machines(side);
        if *used >= limit {
            return Err(Error::Construction(format!(
                "slot [{},{}) exceeds the {} pool of size {limit}",
                t - 1,
                t,
                side.name()
            )));
        }
        let task = task as usize;
        start[task] = (slot - 1) as f64;
        pool[task] = side;
        sides[task] = side;
        machine[task] = *used;
        *used += 1;
        Ok(())
    };

    for z in 0..q / 3 {
        for (layer_in_triplet, side) in [(0u64, Side::Gpu), (1, Side::Cpu), (2, Side::Gpu)] {
            let layer = 3 * z + layer_in_triplet; // 0-based graph layer
            for pos in 0..n {
                let vertex = (layer * n + pos) as u32;
                let class = labels[vertex as usize] as u64;
                let set = layout.set(vertex);
                match layer_in_triplet {
                    0 => {
                        // Type A: slot index i = zQ + 1.
                        let t = z * classes + 1 + class;
                        for task in set {
                            place(task, t, side, &mut cpu_used, &mut gpu_used)?;
                        }
                    }
                    1 => {
                        // Type B: i = zQ + 2.
                        let t = z * classes + 2 + class;
                        for task in set {
                            place(task, t, side, &mut cpu_used, &mut gpu_used)?;
                        }
                    }
                    _ => {
                        // Type C: the l-th chain task sits at i = zQ + 2 + l.
                        for (offset, task) in set.enumerate() {
                            let t = z * classes + 2 + (offset as u64 + 1) + class;
                            place(task, t, side, &mut cpu_used, &mut gpu_used)?;
                        }
                    }
                }
            }
        }
    }

    let makespan = horizon as f64;
    Ok((
        Allocation::new(sides),
        Schedule::new(start, pool, machine, makespan),
    ))
}

/// Soundness-gap arithmetic, no graph needed: the YES-case upper bound
/// `(q+3)Q/3`, the three per-phase NO-case time bounds, and the resulting
/// NO-case lower bound `(q/3)(M_A + M_B + M_C)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapReport {
    pub yes_upper: f64,
    pub no_lower: f64,
    pub ma: f64,
    pub mb: f64,
    pub mc: f64,
}

pub fn gap_report(params: &ReductionParams) -> GapReport {
    let q = params.q as f64;
    let big_q = params.classes as f64;
    let ma = (big_q - 2.0) / (big_q + 2.0) * big_q;
    let mb = (big_q - 2.0) / (big_q + 3.0) * big_q;
    let mc = big_q - 2.0;
    GapReport {
        yes_upper: (q + 3.0) * big_q / 3.0,
        no_lower: q / 3.0 * (ma + mb + mc),
        ma,
        mb,
        mc,
    }
}
