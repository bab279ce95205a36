//! Allocation linear program: construction of the load / critical-path LP,
//! its fractional relaxation, and an embedded two-phase dense-tableau
//! simplex solver.

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Constraint satisfaction tolerance for returned solutions.
pub const FEAS_TOL: f64 = 1e-7;
/// Entries below this magnitude are not eligible as pivots.
pub const PIVOT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program in standard form: minimize `objective . v` subject to
/// the rows and per-variable bounds `lo <= v <= hi` with `lo >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    /// Per-variable `(lo, hi)`; `hi = None` means unbounded above.
    pub bounds: Vec<(f64, Option<f64>)>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let w = self.num_vars();
        if self.bounds.len() != w {
            return Err(Error::Solver("bounds length mismatch".into()));
        }
        for row in &self.rows {
            if row.coeffs.len() != w {
                return Err(Error::Solver("row width mismatch".into()));
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo < 0.0 {
                return Err(Error::Solver("lower bounds must be non-negative".into()));
            }
            if let Some(hi) = hi {
                if lo > hi {
                    return Err(Error::Solver("bound lo > hi".into()));
                }
            }
        }
        Ok(())
    }

    /// CPLEX-LP-style text dump for external cross-checking.
    pub fn to_lp_text(&self, names: &[String]) -> String {
        let term = |coef: f64, j: usize| -> String {
            if coef >= 0.0 {
                format!("+ {} {}", coef, names[j])
            } else {
                format!("- {} {}", -coef, names[j])
            }
        };
        let mut out = String::from("Minimize\n obj:");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                out.push(' ');
                out.push_str(&term(c, j));
            }
        }
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(" r{i}:"));
            for (j, &c) in row.coeffs.iter().enumerate() {
                if c != 0.0 {
                    out.push(' ');
                    out.push_str(&term(c, j));
                }
            }
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            out.push_str(&format!(" {} {}\n", rel, row.rhs));
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            match hi {
                Some(hi) => out.push_str(&format!(" {} <= {} <= {}\n", lo, names[j], hi)),
                None => out.push_str(&format!(" {} <= {}\n", lo, names[j])),
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
}

/// Optimal fractional solution of the relaxed allocation LP.
#[derive(Clone, Debug)]
pub struct FractionalSolution {
    /// Relaxed decision values in `[0, 1]` (1 = CPU side).
    pub x: Vec<f64>,
    /// Completion-time variables.
    pub completion: Vec<f64>,
    /// Optimal relaxed makespan; a lower bound on any feasible schedule.
    pub objective: f64,
}

/// Builds the allocation LP for `instance` with variables
/// `(x_0..x_{n-1}, C_0..C_{n-1}, C_max)`.
///
/// Rows: one CPU-load row, one GPU-load row, one critical-path row per edge,
/// one critical-path row per in-degree-0 task against an internal fictive
/// zero-time predecessor, and one `C_j <= C_max` row per task.
pub fn build_allocation_lp(instance: &Instance) -> Result<LpProblem> {
    let n = instance.task_count();
    let m = instance.cpu_count() as f64;
    let k = instance.gpu_count() as f64;
    let width = 2 * n + 1;
    let cmax = 2 * n;

    let mut times = Vec::with_capacity(n);
    for j in 0..n {
        let cpu = instance
            .cpu_time(j)
            .finite()
            .ok_or(Error::LpRequiresFiniteTimes(j))?;
        let gpu = instance
            .gpu_time(j)
            .finite()
            .ok_or(Error::LpRequiresFiniteTimes(j))?;
        times.push((cpu, gpu));
    }

    let mut rows = Vec::new();

    // Average CPU load: (1/m) sum p̄_j x_j <= C_max.
    let mut cpu_load = vec![0.0; width];
    for j in 0..n {
        cpu_load[j] = times[j].0 / m;
    }
    cpu_load[cmax] = -1.0;
    rows.push(LpRow {
        coeffs: cpu_load,
        relation: Relation::Le,
        rhs: 0.0,
    });

    // Average GPU load: (1/k) sum p_j (1 - x_j) <= C_max.
    let mut gpu_load = vec![0.0; width];
    let mut gpu_total = 0.0;
    for j in 0..n {
        gpu_load[j] = -times[j].1 / k;
        gpu_total += times[j].1;
    }
    gpu_load[cmax] = -1.0;
    rows.push(LpRow {
        coeffs: gpu_load,
        relation: Relation::Le,
        rhs: -gpu_total / k,
    });

    // Critical path: C_i + p̄_j x_j + p_j (1 - x_j) <= C_j per edge, with the
    // fictive predecessor (C = 0) standing in for every in-degree-0 task.
    let mut has_pred = vec![false; n];
    for &(_, v) in instance.edges() {
        has_pred[v as usize] = true;
    }
    let cp_row = |pred: Option<usize>, j: usize| {
        let mut coeffs = vec![0.0; width];
        coeffs[j] = times[j].0 - times[j].1;
        coeffs[n + j] = -1.0;
        if let Some(i) = pred {
            coeffs[n + i] = 1.0;
        }
        LpRow {
            coeffs,
            relation: Relation::Le,
            rhs: -times[j].1,
        }
    };
    for j in 0..n {
        if !has_pred[j] {
            rows.push(cp_row(None, j));
        }
    }
    for &(i, j) in instance.edges() {
        rows.push(cp_row(Some(i as usize), j as usize));
    }

    // C_j <= C_max.
    for j in 0..n {
        let mut coeffs = vec![0.0; width];
        coeffs[n + j] = 1.0;
        coeffs[cmax] = -1.0;
        rows.push(LpRow {
            coeffs,
            relation: Relation::Le,
            rhs: 0.0,
        });
    }

    let mut objective = vec![0.0; width];
    objective[cmax] = 1.0;
    let mut bounds = vec![(0.0, Some(1.0)); n];
    bounds.extend(std::iter::repeat((0.0, None)).take(n + 1));

    Ok(LpProblem {
        objective,
        rows,
        bounds,
    })
}

/// Variable names matching [`build_allocation_lp`]'s column order, for the
/// LP text dump.
pub fn allocation_lp_names(n: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
    names.extend((0..n).map(|j| format!("C{j}")));
    names.push("Cmax".into());
    names
}

/// Two-phase dense simplex. Pivot selection is Dantzig's rule guarded by
/// Bland's rule: after a run of degenerate pivots the solver switches to
/// Bland's rule until the objective strictly improves, which guarantees
/// termination. Deterministic for identical input.
pub fn simplex_solve(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let ns = problem.num_vars();

    // Materialize bounds as rows; every variable is then simply >= 0.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = problem
        .rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.relation, r.rhs))
        .collect();
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        if lo > 0.0 {
            let mut c = vec![0.0; ns];
            c[j] = 1.0;
            rows.push((c, Relation::Ge, lo));
        }
        if let Some(hi) = hi {
            let mut c = vec![0.0; ns];
            c[j] = 1.0;
            rows.push((c, Relation::Le, hi));
        }
    }

    // Normalize so every rhs is non-negative.
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
        }
    }

    let nrows = rows.len();
    let n_slack = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let n_art = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let ncols = ns + n_slack + n_art;
    let width = ncols + 1; // rhs in the last column

    let mut tableau = vec![0.0f64; nrows * width];
    let mut basis = vec![0usize; nrows];
    let mut artificial = vec![false; ncols];
    let mut slack_cursor = ns;
    let mut art_cursor = ns + n_slack;
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let row = &mut tableau[i * width..(i + 1) * width];
        row[..ns].copy_from_slice(coeffs);
        row[ncols] = *rhs;
        match rel {
            Relation::Le => {
                row[slack_cursor] = 1.0;
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            Relation::Ge => {
                row[slack_cursor] = -1.0;
                slack_cursor += 1;
                row[art_cursor] = 1.0;
                artificial[art_cursor] = true;
                basis[i] = art_cursor;
                art_cursor += 1;
            }
            Relation::Eq => {
                row[art_cursor] = 1.0;
                artificial[art_cursor] = true;
                basis[i] = art_cursor;
                art_cursor += 1;
            }
        }
    }

    let mut state = Tableau {
        data: tableau,
        basis,
        nrows,
        ncols,
        width,
    };

    // Phase 1: minimize the sum of artificial variables.
    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        for j in 0..ncols {
            if artificial[j] {
                cost[j] = 1.0;
            }
        }
        let blocked = vec![false; ncols];
        if !state.run(&cost, &blocked) {
            // Phase-1 objective is bounded below by 0, so this cannot happen.
            return Err(Error::Solver("phase 1 reported unbounded".into()));
        }
        let infeasibility: f64 = state
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| artificial[b])
            .map(|(i, _)| state.rhs(i))
            .sum();
        if infeasibility > FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![0.0; ns],
                objective: 0.0,
            });
        }
        // Drive artificials out of the basis where possible; rows where no
        // pivot exists are redundant and keep a zero-valued artificial.
        for i in 0..nrows {
            if artificial[state.basis[i]] {
                let pivot_col = (0..ncols)
                    .find(|&j| !artificial[j] && state.at(i, j).abs() > PIVOT_TOL);
                if let Some(j) = pivot_col {
                    state.pivot(i, j);
                }
            }
        }
    }

    // Phase 2: original objective, artificial columns blocked.
    let mut cost = vec![0.0; ncols];
    cost[..ns].copy_from_slice(&problem.objective);
    if !state.run(&cost, &artificial) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![0.0; ns],
            objective: f64::NEG_INFINITY,
        });
    }

    let mut values = vec![0.0; ns];
    for i in 0..nrows {
        if state.basis[i] < ns {
            values[state.basis[i]] = state.rhs(i);
        }
    }
    let objective = problem
        .objective
        .iter()
        .zip(&values)
        .map(|(c, v)| c * v)
        .sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}

struct Tableau {
    data: Vec<f64>,
    basis: Vec<usize>,
    nrows: usize,
    ncols: usize,
    width: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.ncols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let width = self.width;
        let inv = 1.0 / self.at(pr, pc);
        for v in self.data[pr * width..(pr + 1) * width].iter_mut() {
            *v *= inv;
        }
        let (before, rest) = self.data.split_at_mut(pr * width);
        let (pivot_row, after) = rest.split_at_mut(width);
        let eliminate = |row: &mut [f64]| {
            let factor = row[pc];
            if factor.abs() > 1e-12 {
                for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_exact_mut(width).for_each(eliminate);
        after.chunks_exact_mut(width).for_each(eliminate);
        self.basis[pr] = pc;
    }

    /// Runs the simplex loop for the given cost vector; returns false on
    /// unboundedness.
    fn run(&mut self, cost: &[f64], blocked: &[bool]) -> bool {
        let ncols = self.ncols;
        // Reduced-cost row: c_j - c_B B^{-1} A_j for the current basis.
        let mut reduced = vec![0.0; ncols + 1];
        reduced[..ncols].copy_from_slice(cost);
        for i in 0..self.nrows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=ncols {
                    reduced[j] -= cb * self.at(i, j);
                }
            }
        }

        let mut bland = false;
        let mut stall = 0u32;
        loop {
            // Entering column.
            let mut entering = None;
            if bland {
                for j in 0..ncols {
                    if !blocked[j] && reduced[j] < -PIVOT_TOL {
                        entering = Some(j);
                        break;
                    }
                }
            } else {
                let mut best = -PIVOT_TOL;
                for j in 0..ncols {
                    if !blocked[j] && reduced[j] < best {
                        best = reduced[j];
                        entering = Some(j);
                    }
                }
            }
            let pc = match entering {
                Some(j) => j,
                None => return true,
            };

            // Ratio test; ties broken by smallest basis variable index.
            let mut pr = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.nrows {
                let a = self.at(i, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let better = match pr {
                        None => true,
                        Some(p) => {
                            ratio < best_ratio - 1e-12
                                || (ratio < best_ratio + 1e-12
                                    && self.basis[i] < self.basis[p])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        pr = Some(i);
                    }
                }
            }
            let pr = match pr {
                Some(i) => i,
                None => return false,
            };

            let step = best_ratio * reduced[pc];
            self.pivot(pr, pc);
            // Update the reduced-cost row against the normalized pivot row.
            let factor = reduced[pc];
            let pivot_row = &self.data[pr * self.width..(pr + 1) * self.width];
            for (r, p) in reduced.iter_mut().zip(pivot_row.iter()) {
                *r -= factor * p;
            }
            reduced[pc] = 0.0;

            if step > -1e-12 {
                stall += 1;
                if stall > 30 {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
        }
    }
}

/// Solves the fractional relaxation for `instance` and returns the certified
/// lower bound together with the relaxed decision values.
pub fn solve_relaxation(instance: &Instance) -> Result<FractionalSolution> {
    let n = instance.task_count();
    let problem = build_allocation_lp(instance)?;
    let sol = simplex_solve(&problem)?;
    match sol.status {
        LpStatus::Optimal => {}
        status => {
            return Err(Error::Solver(format!(
                "allocation LP unexpectedly {status:?}"
            )))
        }
    }
    let x = sol.values[..n]
        .iter()
        .map(|&v| v.clamp(0.0, 1.0))
        .collect();
    let completion = sol.values[n..2 * n].to_vec();
    Ok(FractionalSolution {
        x,
        completion,
        objective: sol.objective,
    })
}

/// Largest violation of the relaxed constraints by `sol`, recomputed from
/// the instance itself. Independent of the solver and the LP builder's row
/// layout; used to certify returned solutions.
pub fn max_constraint_violation(instance: &Instance, sol: &FractionalSolution) -> f64 {
    let n = instance.task_count();
    let m = instance.cpu_count() as f64;
    let k = instance.gpu_count() as f64;
    let mut worst = 0.0f64;

    let mut cpu_load = 0.0;
    let mut gpu_load = 0.0;
    let mut frac_dur = vec![0.0; n];
    for j in 0..n {
        let cpu = instance.cpu_time(j).finite().unwrap();
        let gpu = instance.gpu_time(j).finite().unwrap();
        let x = sol.x[j];
        worst = worst.max(-x).max(x - 1.0);
        worst = worst.max(-sol.completion[j]);
        cpu_load += cpu * x;
        gpu_load += gpu * (1.0 - x);
        frac_dur[j] = cpu * x + gpu * (1.0 - x);
        worst = worst.max(sol.completion[j] - sol.objective);
    }
    worst = worst.max(cpu_load / m - sol.objective);
    worst = worst.max(gpu_load / k - sol.objective);

    let mut has_pred = vec![false; n];
    for &(_, v) in instance.edges() {
        has_pred[v as usize] = true;
    }
    for j in 0..n {
        if !has_pred[j] {
            worst = worst.max(frac_dur[j] - sol.completion[j]);
        }
    }
    for &(i, j) in instance.edges() {
        worst = worst
            .max(sol.completion[i as usize] + frac_dur[j as usize] - sol.completion[j as usize]);
    }
    worst
}
