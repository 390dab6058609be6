//! Bounded-variable revised primal simplex.
//!
//! Every row carries a logical column `e_i` fixed to zero, so the working
//! system is `[A I] (x, s) = b`. Phase 1 minimizes the sum of bound
//! infeasibilities of basic variables; phase 2 the scaled cost. Pricing uses
//! devex reference weights, the ratio test is Harris' two-pass rule with
//! bound flipping, and a run of degenerate pivots switches to Bland's rule
//! until progress resumes. The basis inverse is an LU factorization followed
//! by a product-form eta file, refactorized periodically.

use super::lu::{factorize, LuFactors};
use super::problem::{Basis, LpBackend, LpProblem, LpSolution, LpStatus, VarStatus};
use super::sparse::CscMatrix;
use super::LpError;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub max_iterations: Option<usize>,
    pub refactor_interval: usize,
    pub scaling: bool,
    /// Fixed divisor for the cost vector; `None` normalizes by the largest
    /// scaled cost (rounded to a power of two).
    pub cost_scale: Option<f64>,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-7,
            pivot_tol: 1e-10,
            max_iterations: None,
            refactor_interval: 100,
            scaling: true,
            cost_scale: None,
            degenerate_limit: 200,
        }
    }
}

/// Self-contained reference backend.
#[derive(Debug, Clone, Default)]
pub struct RevisedSimplex {
    pub options: SimplexOptions,
}

impl RevisedSimplex {
    pub fn new(options: SimplexOptions) -> Self {
        Self { options }
    }
}

impl LpBackend for RevisedSimplex {
    fn name(&self) -> &str {
        "reference-revised-simplex"
    }

    fn solve(&self, problem: &LpProblem, warm_start: Option<&Basis>) -> Result<LpSolution, LpError> {
        problem.validate()?;
        let mut engine = Engine::new(problem, &self.options);
        let status = engine.run(warm_start);
        log::debug!("simplex {status:?} after {} iterations: {:?}", engine.iterations, engine.stats);
        Ok(engine.into_solution(problem, status))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

#[derive(Debug, Default)]
struct Stats {
    phase1: usize,
    degenerate: usize,
    bland: usize,
    flips: usize,
    reinverts: usize,
    drift: usize,
}

enum Ratio {
    Flip(f64),
    Pivot { pos: usize, theta: f64, to_upper: bool },
    Unbounded,
}

/// Boxes wider than this (in scaled units) get a proportionally tighter
/// pricing tolerance, bounding the objective a column may leave unused.
const WIDE_BOX: f64 = 1e3;

fn pricing_tolerance(optimality_tol: f64, width: f64) -> f64 {
    if width.is_finite() && width > WIDE_BOX {
        (optimality_tol * WIDE_BOX / width).max(1e-11)
    } else {
        optimality_tol
    }
}

/// Power-of-two geometric scaling factors for rows and columns.
fn geometric_scaling(a: &CscMatrix) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (a.nrows(), a.ncols());
    let mut rs = vec![1.0; m];
    let mut cs = vec![1.0; n];
    for _ in 0..6 {
        let mut rmin = vec![f64::INFINITY; m];
        let mut rmax = vec![0.0f64; m];
        for j in 0..n {
            let (rows, vals) = a.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                let s = (v * rs[i] * cs[j]).abs();
                rmin[i] = rmin[i].min(s);
                rmax[i] = rmax[i].max(s);
            }
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                rs[i] /= (rmin[i] * rmax[i]).sqrt();
            }
        }
        for j in 0..n {
            let (rows, vals) = a.col(j);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (&i, &v) in rows.iter().zip(vals) {
                let s = (v * rs[i] * cs[j]).abs();
                lo = lo.min(s);
                hi = hi.max(s);
            }
            if hi > 0.0 {
                cs[j] /= (lo * hi).sqrt();
            }
        }
    }
    let pow2 = |v: f64| 2f64.powi(v.log2().round() as i32);
    (rs.into_iter().map(pow2).collect(), cs.into_iter().map(pow2).collect())
}

struct Engine<'o> {
    m: usize,
    n: usize,
    a: CscMatrix,
    at: CscMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Unshifted scaled bounds; `lo`/`up` may be widened while solving.
    orig_lo: Vec<f64>,
    orig_up: Vec<f64>,
    /// Phase 2 pricing tolerance per column, tightened for wide boxes so a
    /// reduced cost below tolerance never hides a large objective change.
    price_tol: Vec<f64>,
    shifted: bool,
    /// Harris two-pass ratio test with the feasibility tolerance.
    harris: bool,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    cost_scale: f64,

    x: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    pos_of: Vec<usize>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    eta_nnz: usize,

    d: Vec<f64>,
    weights: Vec<f64>,
    phase: Phase,
    phase1_sign: Vec<i8>,

    opts: &'o SimplexOptions,
    iterations: usize,
    max_iterations: usize,
    degenerate_run: usize,
    bland: bool,
    stats: Stats,

    // scratch
    alpha: Vec<f64>,
    rho: Vec<f64>,
    row_vals: Vec<f64>,
    row_touched: Vec<usize>,
    row_mark: Vec<bool>,
    work_a: Vec<f64>,
    work_b: Vec<f64>,
}

impl<'o> Engine<'o> {
    fn new(p: &LpProblem, opts: &'o SimplexOptions) -> Self {
        let (m, n) = (p.num_rows(), p.num_cols());
        let (row_scale, col_scale) = if opts.scaling {
            geometric_scaling(&p.a)
        } else {
            (vec![1.0; m], vec![1.0; n])
        };
        let mut a = p.a.clone();
        {
            let col_ptr = a.col_ptr().to_vec();
            let row_idx = a.row_idx().to_vec();
            let vals = a.values_mut();
            for j in 0..n {
                for k in col_ptr[j]..col_ptr[j + 1] {
                    vals[k] *= row_scale[row_idx[k]] * col_scale[j];
                }
            }
        }
        let at = a.transpose();
        let b: Vec<f64> = p.rhs.iter().zip(&row_scale).map(|(v, s)| v * s).collect();
        let mut c: Vec<f64> = p.cost.iter().zip(&col_scale).map(|(v, s)| v * s).collect();
        let cost_scale = match opts.cost_scale {
            Some(s) if s > 0.0 && s.is_finite() => s,
            _ => {
                let cmax = c.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
                if cmax > 0.0 {
                    2f64.powi(cmax.log2().round() as i32)
                } else {
                    1.0
                }
            }
        };
        for v in c.iter_mut() {
            *v /= cost_scale;
        }
        c.extend(std::iter::repeat_n(0.0, m));
        let mut lo: Vec<f64> = p.lower.iter().zip(&col_scale).map(|(v, s)| v / s).collect();
        let mut up: Vec<f64> = p.upper.iter().zip(&col_scale).map(|(v, s)| v / s).collect();
        lo.extend(std::iter::repeat_n(0.0, m));
        up.extend(std::iter::repeat_n(0.0, m));
        let nt = n + m;
        let max_iterations = opts.max_iterations.unwrap_or(20_000 + 30 * nt);
        Self {
            m,
            n,
            a,
            at,
            b,
            c,
            price_tol: lo
                .iter()
                .zip(&up)
                .map(|(l, u)| pricing_tolerance(opts.optimality_tol, u - l))
                .collect(),
            orig_lo: lo.clone(),
            orig_up: up.clone(),
            shifted: false,
            harris: true,
            lo,
            up,
            row_scale,
            col_scale,
            cost_scale,
            x: vec![0.0; nt],
            status: vec![VarStatus::AtLower; nt],
            head: vec![NONE; m],
            pos_of: vec![NONE; nt],
            lu: None,
            etas: Vec::new(),
            eta_nnz: 0,
            d: vec![0.0; nt],
            weights: vec![1.0; nt],
            phase: Phase::One,
            phase1_sign: vec![0; m],
            opts,
            iterations: 0,
            max_iterations,
            degenerate_run: 0,
            bland: false,
            stats: Stats::default(),
            alpha: vec![0.0; m],
            rho: vec![0.0; m],
            row_vals: vec![0.0; nt],
            row_touched: Vec::new(),
            row_mark: vec![false; nt],
            work_a: vec![0.0; m],
            work_b: vec![0.0; m],
        }
    }

    fn nt(&self) -> usize {
        self.n + self.m
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.up[j] - self.lo[j] <= 0.0
    }

    /// Places nonbasic `j` at the bound implied by `status`.
    fn rest_at(&mut self, j: usize, status: VarStatus) {
        let (l, u) = (self.lo[j], self.up[j]);
        let st = match status {
            VarStatus::AtUpper if u.is_finite() => VarStatus::AtUpper,
            VarStatus::AtLower | VarStatus::AtUpper | VarStatus::Basic | VarStatus::Free => {
                if l.is_finite() {
                    VarStatus::AtLower
                } else if u.is_finite() {
                    VarStatus::AtUpper
                } else {
                    VarStatus::Free
                }
            }
        };
        self.status[j] = st;
        self.pos_of[j] = NONE;
        self.x[j] = match st {
            VarStatus::AtLower => l,
            VarStatus::AtUpper => u,
            _ => 0.0,
        };
    }

    fn nearest_bound_status(&self, j: usize) -> VarStatus {
        let (l, u, v) = (self.lo[j], self.up[j], self.x[j]);
        if l.is_finite() && (!u.is_finite() || (v - l).abs() <= (u - v).abs()) {
            VarStatus::AtLower
        } else if u.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn column_nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.a.col(j).0.len()
        } else {
            1
        }
    }

    fn scatter_column(&self, j: usize, dense: &mut [f64], scale: f64) {
        if j < self.n {
            let (rows, vals) = self.a.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                dense[i] += scale * v;
            }
        } else {
            dense[j - self.n] += scale;
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.a.col_dot(j, y)
        } else {
            y[j - self.n]
        }
    }

    // ----- basis setup -------------------------------------------------

    fn crash_basis(&mut self) {
        let (m, n) = (self.m, self.n);
        for j in 0..n {
            self.rest_at(j, VarStatus::AtLower);
        }
        let mut row_taken = vec![false; m];
        for j in 0..n {
            let (rows, vals) = self.a.col(j);
            if rows.len() == 1 && !self.is_fixed(j) && !row_taken[rows[0]] && vals[0].abs() > 1e-3 {
                let r = rows[0];
                row_taken[r] = true;
                self.head[r] = j;
            }
        }
        for r in 0..m {
            if !row_taken[r] {
                self.head[r] = n + r;
            } else {
                self.rest_at(n + r, VarStatus::AtLower);
            }
        }
        for (pos, &j) in self.head.iter().enumerate() {
            self.status[j] = VarStatus::Basic;
            self.pos_of[j] = pos;
        }
    }

    fn warm_basis(&mut self, basis: &Basis) -> bool {
        let (m, n) = (self.m, self.n);
        if basis.columns.len() != n || basis.logicals.len() != m {
            return false;
        }
        let mut basic: Vec<usize> = Vec::with_capacity(m);
        for (j, &st) in basis.columns.iter().chain(basis.logicals.iter()).enumerate() {
            if st == VarStatus::Basic && basic.len() < m {
                basic.push(j);
            } else {
                let st = if st == VarStatus::Basic { VarStatus::AtLower } else { st };
                self.rest_at(j, st);
            }
        }
        if basic.len() < m {
            for r in 0..m {
                if basic.len() == m {
                    break;
                }
                let j = n + r;
                if !basic.contains(&j) {
                    basic.push(j);
                }
            }
        }
        for (pos, &j) in basic.iter().enumerate() {
            self.head[pos] = j;
            self.status[j] = VarStatus::Basic;
            self.pos_of[j] = pos;
        }
        true
    }

    /// Factorizes the current basis, swapping dependent columns for logicals.
    fn refactor(&mut self) {
        for _attempt in 0..3 {
            let cols: Vec<Vec<(usize, f64)>> = self
                .head
                .iter()
                .map(|&j| {
                    if j < self.n {
                        let (rows, vals) = self.a.col(j);
                        rows.iter().copied().zip(vals.iter().copied()).collect()
                    } else {
                        vec![(j - self.n, 1.0)]
                    }
                })
                .collect();
            match factorize(self.m, cols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    self.etas.clear();
                    self.eta_nnz = 0;
                    return;
                }
                Err(sing) => {
                    log::debug!("basis singular: replacing {} columns", sing.positions.len());
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let old = self.head[pos];
                        let st = self.nearest_bound_status(old);
                        self.rest_at(old, st);
                        let logical = self.n + row;
                        if self.status[logical] == VarStatus::Basic {
                            continue;
                        }
                        self.head[pos] = logical;
                        self.status[logical] = VarStatus::Basic;
                        self.pos_of[logical] = pos;
                    }
                }
            }
        }
        // Last resort: all-logical basis.
        for pos in 0..self.m {
            let old = self.head[pos];
            if old != self.n + pos {
                let st = self.nearest_bound_status(old);
                self.rest_at(old, st);
            }
        }
        for r in 0..self.m {
            let j = self.n + r;
            self.head[r] = j;
            self.status[j] = VarStatus::Basic;
            self.pos_of[j] = r;
        }
        let cols = (0..self.m).map(|r| vec![(r, 1.0)]).collect();
        self.lu = Some(factorize(self.m, cols).expect("identity basis"));
        self.etas.clear();
        self.eta_nnz = 0;
    }

    // ----- linear algebra with the current basis -----------------------

    /// `out = B⁻¹ rhs` (rhs row-indexed, destroyed; out position-indexed).
    fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        self.lu.as_ref().expect("factorized").ftran(rhs, out);
        for eta in &self.etas {
            let xr = out[eta.pos] / eta.pivot;
            out[eta.pos] = xr;
            if xr != 0.0 {
                for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                    out[i] -= v * xr;
                }
            }
        }
    }

    /// `out = B⁻ᵀ c` (c position-indexed, destroyed; out row-indexed).
    fn btran(&self, c: &mut [f64], out: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = c[eta.pos];
            for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                acc -= v * c[i];
            }
            c[eta.pos] = acc / eta.pivot;
        }
        self.lu.as_ref().expect("factorized").btran(c, out);
    }

    fn compute_basic_values(&mut self) {
        let mut rhs = self.b.clone();
        for j in 0..self.nt() {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                let v = self.x[j];
                self.scatter_column(j, &mut rhs, -v);
            }
        }
        let mut out = vec![0.0; self.m];
        self.ftran(&mut rhs, &mut out);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = out[pos];
        }
        // Iterative refinement against badly scaled bases.
        for _ in 0..3 {
            let mut res = self.b.clone();
            let mut size = 0.0f64;
            for j in 0..self.nt() {
                let v = self.x[j];
                if v != 0.0 {
                    self.scatter_column(j, &mut res, -v);
                }
            }
            for (r, bi) in res.iter().zip(&self.b) {
                size = size.max(r.abs() / (1.0 + bi.abs()));
            }
            if size <= 1e-14 {
                break;
            }
            self.ftran(&mut res, &mut out);
            for (pos, &j) in self.head.iter().enumerate() {
                self.x[j] += out[pos];
            }
        }
    }

    fn basic_infeasibility(&self, pos: usize) -> f64 {
        let j = self.head[pos];
        let v = self.x[j];
        if v < self.lo[j] {
            self.lo[j] - v
        } else if v > self.up[j] {
            v - self.up[j]
        } else {
            0.0
        }
    }

    fn refresh_phase1_signs(&mut self) -> bool {
        let tol = self.opts.feasibility_tol;
        let mut changed = false;
        for pos in 0..self.m {
            let j = self.head[pos];
            let v = self.x[j];
            let s = if v < self.lo[j] - tol {
                -1
            } else if v > self.up[j] + tol {
                1
            } else {
                0
            };
            if self.phase1_sign[pos] != s {
                self.phase1_sign[pos] = s;
                changed = true;
            }
        }
        changed
    }

    fn total_infeasibility(&self) -> f64 {
        (0..self.m).map(|p| self.basic_infeasibility(p)).sum()
    }

    fn phase_cost(&self, j: usize) -> f64 {
        match self.phase {
            Phase::Two => self.c[j],
            Phase::One => {
                let p = self.pos_of[j];
                if p == NONE {
                    0.0
                } else {
                    self.phase1_sign[p] as f64
                }
            }
        }
    }

    fn compute_duals(&mut self) -> Vec<f64> {
        let mut cb: Vec<f64> = self.head.iter().map(|&j| self.phase_cost(j)).collect();
        let mut y = vec![0.0; self.m];
        self.btran(&mut cb, &mut y);
        y
    }

    fn compute_reduced_costs(&mut self) {
        let y = self.compute_duals();
        for j in 0..self.nt() {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                self.phase_cost(j) - self.column_dot(j, &y)
            };
        }
    }

    fn reset_weights(&mut self) {
        self.weights.iter_mut().for_each(|w| *w = 1.0);
    }

    // ----- iteration pieces --------------------------------------------

    fn price(&self) -> Option<usize> {
        let mut best = NONE;
        let mut best_score = 0.0;
        for j in 0..self.nt() {
            let dj = self.d[j];
            let tol = match self.phase {
                Phase::One => self.opts.optimality_tol,
                Phase::Two => self.price_tol[j],
            };
            let favorable = match self.status[j] {
                VarStatus::Basic => false,
                VarStatus::AtLower => dj < -tol && !self.is_fixed(j),
                VarStatus::AtUpper => dj > tol && !self.is_fixed(j),
                VarStatus::Free => dj.abs() > tol,
            };
            if !favorable {
                continue;
            }
            if self.bland {
                return Some(j);
            }
            let score = dj * dj / self.weights[j];
            if score > best_score {
                best_score = score;
                best = j;
            }
        }
        (best != NONE).then_some(best)
    }

    fn ratio_test(&self, q: usize, dir: f64) -> Ratio {
        let tol = if self.harris { self.opts.feasibility_tol } else { 0.0 };
        let amax = self.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let ptol = self.opts.pivot_tol.max(1e-9 * amax);
        let mut theta_max = f64::INFINITY;
        for pos in 0..self.m {
            let a = self.alpha[pos];
            if a.abs() <= ptol {
                continue;
            }
            let j = self.head[pos];
            let delta = -dir * a;
            let v = self.x[j];
            let r = match (self.phase, self.phase1_sign[pos]) {
                (Phase::One, -1) => {
                    if delta > 0.0 {
                        (self.lo[j] - v) / delta
                    } else {
                        continue;
                    }
                }
                (Phase::One, 1) => {
                    if delta < 0.0 {
                        (v - self.up[j]) / -delta
                    } else {
                        continue;
                    }
                }
                _ => {
                    if delta < 0.0 {
                        if self.lo[j].is_finite() {
                            (v - self.lo[j] + tol) / -delta
                        } else {
                            continue;
                        }
                    } else if self.up[j].is_finite() {
                        (self.up[j] - v + tol) / delta
                    } else {
                        continue;
                    }
                }
            };
            if r < theta_max {
                theta_max = r;
            }
        }
        let span = self.up[q] - self.lo[q];
        if span.is_finite() && span <= theta_max {
            return Ratio::Flip(span);
        }
        if theta_max == f64::INFINITY {
            return Ratio::Unbounded;
        }

        let mut chosen = NONE;
        let mut chosen_abs = 0.0;
        let mut chosen_theta = 0.0;
        let mut chosen_upper = false;
        for pos in 0..self.m {
            let a = self.alpha[pos];
            if a.abs() <= ptol {
                continue;
            }
            let j = self.head[pos];
            let delta = -dir * a;
            let v = self.x[j];
            let (r, to_upper) = match (self.phase, self.phase1_sign[pos]) {
                (Phase::One, -1) => {
                    if delta > 0.0 {
                        ((self.lo[j] - v) / delta, false)
                    } else {
                        continue;
                    }
                }
                (Phase::One, 1) => {
                    if delta < 0.0 {
                        ((v - self.up[j]) / -delta, true)
                    } else {
                        continue;
                    }
                }
                _ => {
                    if delta < 0.0 {
                        if self.lo[j].is_finite() {
                            ((v - self.lo[j]) / -delta, false)
                        } else {
                            continue;
                        }
                    } else if self.up[j].is_finite() {
                        ((self.up[j] - v) / delta, true)
                    } else {
                        continue;
                    }
                }
            };
            if r > theta_max {
                continue;
            }
            let better = if self.bland {
                chosen == NONE || j < self.head[chosen]
            } else {
                a.abs() > chosen_abs
            };
            if better {
                chosen = pos;
                chosen_abs = a.abs();
                chosen_theta = r.max(0.0);
                chosen_upper = to_upper;
            }
        }
        if chosen == NONE {
            return Ratio::Unbounded;
        }
        Ratio::Pivot {
            pos: chosen,
            theta: chosen_theta,
            to_upper: chosen_upper,
        }
    }

    /// Pivot row `ρᵀ [A I]` restricted to nonbasic columns, stored sparsely.
    fn compute_pivot_row(&mut self, r: usize) {
        let mut e = std::mem::take(&mut self.work_a);
        e.iter_mut().for_each(|v| *v = 0.0);
        e[r] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        self.btran(&mut e, &mut rho);
        self.work_a = e;

        for &j in &self.row_touched {
            self.row_vals[j] = 0.0;
            self.row_mark[j] = false;
        }
        self.row_touched.clear();
        for i in 0..self.m {
            let ri = rho[i];
            if ri == 0.0 {
                continue;
            }
            let (cols, vals) = self.at.col(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if !self.row_mark[j] {
                    self.row_mark[j] = true;
                    self.row_touched.push(j);
                }
                self.row_vals[j] += ri * v;
            }
            let lj = self.n + i;
            if !self.row_mark[lj] {
                self.row_mark[lj] = true;
                self.row_touched.push(lj);
            }
            self.row_vals[lj] += ri;
        }
        self.rho = rho;
    }

    fn push_eta(&mut self, pos: usize) {
        let pivot = self.alpha[pos];
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &v) in self.alpha.iter().enumerate() {
            if i != pos && v.abs() > 1e-14 {
                idx.push(i);
                val.push(v);
            }
        }
        self.eta_nnz += idx.len() + 1;
        self.etas.push(Eta { pos, pivot, idx, val });
    }

    fn needs_refactor(&self) -> bool {
        let lu_nnz = self.lu.as_ref().map_or(0, LuFactors::nnz);
        self.etas.len() >= self.opts.refactor_interval || self.eta_nnz > 2 * lu_nnz + 10 * self.m
    }

    /// Refactorizes and recomputes primal values and reduced costs.
    fn reinvert(&mut self) {
        self.stats.reinverts += 1;
        self.refactor();
        self.compute_basic_values();
        if self.phase == Phase::One {
            self.refresh_phase1_signs();
        }
        self.compute_reduced_costs();
    }

    fn run(&mut self, warm_start: Option<&Basis>) -> LpStatus {
        if self.m == 0 {
            // Only bounds: rest every column at its cheapest bound.
            for j in 0..self.n {
                let c = self.c[j];
                let st = if c < 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.rest_at(j, st);
                if (c < 0.0 && !self.up[j].is_finite()) || (c > 0.0 && !self.lo[j].is_finite()) {
                    return LpStatus::Unbounded;
                }
            }
            return LpStatus::Optimal;
        }
        let warm = warm_start.is_some_and(|b| self.warm_basis(b));
        if !warm {
            self.crash_basis();
        }
        self.refactor();
        self.compute_basic_values();
        self.refresh_phase1_signs();
        self.phase = if self.phase1_sign.iter().all(|&s| s == 0) {
            Phase::Two
        } else {
            Phase::One
        };
        self.compute_reduced_costs();
        self.reset_weights();
        let mut cleanups = 0;
        let mut shift_rounds = 0;
        let mut polishing = false;

        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterLimit;
            }
            if self.needs_refactor() {
                self.reinvert();
            }
            if self.phase == Phase::One && self.phase1_sign.iter().all(|&s| s == 0) {
                self.phase = Phase::Two;
                self.compute_reduced_costs();
                self.reset_weights();
                self.bland = false;
                self.degenerate_run = 0;
            }

            let Some(q) = self.price() else {
                // Confirm with a fresh factorization before declaring the result.
                if !self.etas.is_empty() && cleanups < 5 {
                    cleanups += 1;
                    let phase_before = self.phase;
                    self.reinvert();
                    if phase_before == Phase::Two && !polishing && self.phase1_sign_after_refresh() {
                        self.phase = Phase::One;
                        self.compute_reduced_costs();
                        self.reset_weights();
                    }
                    continue;
                }
                match self.phase {
                    Phase::One => {
                        let tiny = self.total_infeasibility() <= self.opts.feasibility_tol * (self.m as f64).max(1.0);
                        if tiny && polishing {
                            return LpStatus::Optimal;
                        }
                        if tiny {
                            self.phase = Phase::Two;
                            self.compute_reduced_costs();
                            self.reset_weights();
                            continue;
                        }
                        return LpStatus::Infeasible;
                    }
                    Phase::Two => {
                        if self.shifted {
                            // Shifts never survive into the answer. After a few
                            // rounds the ratio test drops its tolerance so that
                            // new shifts stay at rounding level.
                            shift_rounds += 1;
                            if shift_rounds >= 5 {
                                self.harris = false;
                            }
                            self.remove_bound_shifts();
                            if self.phase == Phase::One && shift_rounds > 10 {
                                let tol = self.opts.feasibility_tol * (self.m as f64).max(1.0);
                                if self.total_infeasibility() > tol {
                                    return LpStatus::Numerical;
                                }
                                if polishing {
                                    return LpStatus::Optimal;
                                }
                                // Rounding-level infeasibility left by the shifts:
                                // accept it and finish one last phase 2 pass so the
                                // reduced costs are optimal for the final basis.
                                polishing = true;
                                self.phase = Phase::Two;
                                self.compute_reduced_costs();
                                self.reset_weights();
                            }
                            continue;
                        }
                        if polishing {
                            return LpStatus::Optimal;
                        }
                        if self.phase1_sign_after_refresh() {
                            self.phase = Phase::One;
                            self.compute_reduced_costs();
                            self.reset_weights();
                            continue;
                        }
                        return LpStatus::Optimal;
                    }
                }
            };
            cleanups = 0;

            let dir = match self.status[q] {
                VarStatus::AtLower => 1.0,
                VarStatus::AtUpper => -1.0,
                _ => {
                    if self.d[q] < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };

            let mut rhs = std::mem::take(&mut self.work_b);
            rhs.iter_mut().for_each(|v| *v = 0.0);
            self.scatter_column(q, &mut rhs, 1.0);
            let mut alpha = std::mem::take(&mut self.alpha);
            self.ftran(&mut rhs, &mut alpha);
            self.alpha = alpha;
            self.work_b = rhs;

            let ratio = self.ratio_test(q, dir);
            self.iterations += 1;
            if self.phase == Phase::One {
                self.stats.phase1 += 1;
            }
            if self.bland {
                self.stats.bland += 1;
            }
            match ratio {
                Ratio::Unbounded => {
                    if self.phase == Phase::Two {
                        if !self.etas.is_empty() {
                            self.reinvert();
                            continue;
                        }
                        return LpStatus::Unbounded;
                    }
                    // Phase 1 cannot be unbounded; numerical trouble.
                    if !self.etas.is_empty() {
                        self.reinvert();
                        continue;
                    }
                    return LpStatus::Numerical;
                }
                Ratio::Flip(step) => {
                    self.stats.flips += 1;
                    self.apply_step(q, dir, step);
                    self.status[q] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                    self.degenerate_run = 0;
                    self.bland = false;
                    if self.phase == Phase::One && self.refresh_phase1_signs() {
                        self.compute_reduced_costs();
                    }
                }
                Ratio::Pivot { pos, theta, to_upper } => {
                    let pivot = self.alpha[pos];
                    if pivot.abs() < 1e-9 && !self.etas.is_empty() {
                        self.reinvert();
                        continue;
                    }
                    self.compute_pivot_row(pos);
                    // The pivot seen from the column (ftran) and from the row
                    // (btran) must agree; otherwise the factors have drifted.
                    let row_pivot = self.row_vals[q];
                    if (row_pivot - pivot).abs() > 1e-8 * (1.0 + pivot.abs()) && !self.etas.is_empty() {
                        self.stats.drift += 1;
                        self.reinvert();
                        continue;
                    }
                    if theta * self.column_nnz(q) as f64 <= 1e-12 {
                        self.degenerate_run += 1;
                        self.stats.degenerate += 1;
                        if self.degenerate_run > self.opts.degenerate_limit {
                            self.bland = true;
                        }
                    } else {
                        self.degenerate_run = 0;
                        self.bland = false;
                    }
                    self.apply_step(q, dir, theta);
                    let leaving = self.head[pos];
                    // reduced costs and devex weights
                    let dq = self.d[q];
                    let arq = pivot;
                    let theta_d = dq / arq;
                    let wq = self.weights[q];
                    for t in 0..self.row_touched.len() {
                        let j = self.row_touched[t];
                        if self.status[j] == VarStatus::Basic {
                            continue;
                        }
                        let arj = self.row_vals[j];
                        self.d[j] -= theta_d * arj;
                        let ratio = arj / arq;
                        let w = ratio * ratio * wq;
                        if w > self.weights[j] {
                            self.weights[j] = w;
                        }
                    }
                    self.d[q] = 0.0;
                    self.d[leaving] = -theta_d;
                    self.weights[leaving] = (wq / (arq * arq)).max(1.0);

                    self.push_eta(pos);
                    self.status[leaving] = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
                    // A leaving variable already past its bound (degenerate
                    // Harris step) keeps its value; the bound is widened to
                    // it instead so that A x = b stays intact.
                    let v = self.x[leaving];
                    if to_upper {
                        if v > self.up[leaving] {
                            self.up[leaving] = v;
                            self.shifted = true;
                        }
                        self.x[leaving] = self.up[leaving];
                    } else {
                        if v < self.lo[leaving] {
                            self.lo[leaving] = v;
                            self.shifted = true;
                        }
                        self.x[leaving] = self.lo[leaving];
                    }
                    self.pos_of[leaving] = NONE;
                    self.head[pos] = q;
                    self.status[q] = VarStatus::Basic;
                    self.pos_of[q] = pos;

                    if self.weights[leaving] > 1e8 || self.weights.iter().any(|w| *w > 1e12) {
                        self.reset_weights();
                    }
                    if self.phase == Phase::One {
                        if self.refresh_phase1_signs() {
                            self.compute_reduced_costs();
                        }
                    }
                }
            }
        }
    }

    /// Restores the original bounds, re-seats nonbasic columns on them and
    /// recomputes the basic values.
    fn remove_bound_shifts(&mut self) {
        self.lo.copy_from_slice(&self.orig_lo);
        self.up.copy_from_slice(&self.orig_up);
        self.shifted = false;
        for j in 0..self.nt() {
            match self.status[j] {
                VarStatus::AtLower => self.x[j] = self.lo[j],
                VarStatus::AtUpper => self.x[j] = self.up[j],
                _ => {}
            }
        }
        self.reinvert();
        if self.phase1_sign_after_refresh() {
            self.phase = Phase::One;
            self.compute_reduced_costs();
            self.reset_weights();
        }
    }

    fn phase1_sign_after_refresh(&mut self) -> bool {
        self.refresh_phase1_signs();
        self.phase1_sign.iter().any(|&s| s != 0)
    }

    fn apply_step(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for pos in 0..self.m {
            let a = self.alpha[pos];
            if a != 0.0 {
                let j = self.head[pos];
                self.x[j] -= dir * theta * a;
            }
        }
    }

    fn into_solution(mut self, p: &LpProblem, status: LpStatus) -> LpSolution {
        let n = self.n;
        let m = self.m;
        if status == LpStatus::Optimal && m > 0 {
            // Snap nonbasic values exactly onto their bounds.
            for j in 0..self.nt() {
                match self.status[j] {
                    VarStatus::AtLower => self.x[j] = self.orig_lo[j],
                    VarStatus::AtUpper => self.x[j] = self.orig_up[j],
                    _ => {}
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|j| self.x[j] * self.col_scale[j]).collect();
        let mut duals = vec![0.0; m];
        if m > 0 && self.lu.is_some() {
            self.phase = Phase::Two;
            let ys = self.compute_duals();
            for i in 0..m {
                duals[i] = ys[i] * self.row_scale[i] * self.cost_scale;
            }
        }
        let aty = p.a.tr_mul_vec(&duals);
        let reduced_costs: Vec<f64> = p.cost.iter().zip(&aty).map(|(c, a)| c - a).collect();
        let objective = p.objective(&x);
        let basis = (m > 0).then(|| Basis {
            columns: self.status[..n].to_vec(),
            logicals: self.status[n..].to_vec(),
        });
        LpSolution {
            status,
            x,
            duals,
            reduced_costs,
            objective,
            iterations: self.iterations,
            basis,
        }
    }
}
