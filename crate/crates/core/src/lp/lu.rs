//! Sparse LU factorization of simplex bases.
//!
//! Right-looking elimination: singleton columns and rows are pivoted first
//! (no fill), the remaining nucleus is eliminated with a Markowitz search under
//! threshold partial pivoting. Factors are stored per pivot step so that both
//! `B x = a` and `Bᵀ y = c` are plain sweeps over flat arrays.

const THRESHOLD: f64 = 0.05;
const DROP_TOL: f64 = 1e-14;
const SEARCH_COLUMNS: usize = 4;

#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    m: usize,
    piv_row: Vec<usize>,
    piv_pos: Vec<usize>,
    diag: Vec<f64>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
}

/// Basis positions that could not be pivoted and the rows left without a pivot.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Singularity {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

impl LuFactors {
    pub fn nnz(&self) -> usize {
        self.l_idx.len() + self.u_idx.len() + self.m
    }

    /// Solves `B x = rhs`. `rhs` is row-indexed and destroyed; `out` is indexed
    /// by basis position.
    pub fn ftran(&self, rhs: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            let pivot = rhs[self.piv_row[k]];
            if pivot == 0.0 {
                continue;
            }
            for t in self.l_start[k]..self.l_start[k + 1] {
                rhs[self.l_idx[t]] -= self.l_val[t] * pivot;
            }
        }
        for k in (0..self.m).rev() {
            let mut acc = rhs[self.piv_row[k]];
            for t in self.u_start[k]..self.u_start[k + 1] {
                acc -= self.u_val[t] * out[self.u_idx[t]];
            }
            out[self.piv_pos[k]] = acc / self.diag[k];
        }
    }

    /// Solves `Bᵀ y = c`. `c` is position-indexed and destroyed; `out` is
    /// row-indexed.
    pub fn btran(&self, c: &mut [f64], out: &mut [f64]) {
        for k in 0..self.m {
            let z = c[self.piv_pos[k]] / self.diag[k];
            if z != 0.0 {
                for t in self.u_start[k]..self.u_start[k + 1] {
                    c[self.u_idx[t]] -= self.u_val[t] * z;
                }
            }
            out[self.piv_row[k]] = z;
        }
        for k in (0..self.m).rev() {
            let mut acc = 0.0;
            for t in self.l_start[k]..self.l_start[k + 1] {
                acc += self.l_val[t] * out[self.l_idx[t]];
            }
            out[self.piv_row[k]] -= acc;
        }
    }
}

struct Workspace {
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<usize>>,
    col_active: Vec<bool>,
    row_active: Vec<bool>,
    col_buckets: Vec<Vec<usize>>,
    row_singletons: Vec<usize>,
}

impl Workspace {
    fn col_count(&self, j: usize) -> usize {
        self.cols[j].len()
    }

    fn bucket_col(&mut self, j: usize) {
        let c = self.cols[j].len();
        self.col_buckets[c].push(j);
    }

    fn remove_row_entry(&mut self, j: usize, row: usize) -> Option<f64> {
        let col = &mut self.cols[j];
        let pos = col.iter().position(|&(r, _)| r == row)?;
        Some(col.swap_remove(pos).1)
    }

    fn remove_col_from_row(&mut self, i: usize, j: usize) {
        let row = &mut self.rows[i];
        if let Some(pos) = row.iter().position(|&c| c == j) {
            row.swap_remove(pos);
        }
        if self.row_active[i] && self.rows[i].len() == 1 {
            self.row_singletons.push(i);
        }
    }
}

/// Factorizes the `m × m` matrix whose columns are given as sparse lists.
pub(crate) fn factorize(m: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<LuFactors, Singularity> {
    assert_eq!(columns.len(), m);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut cols = columns;
    for (j, col) in cols.iter_mut().enumerate() {
        col.retain(|&(_, v)| v.abs() > DROP_TOL);
        for &(i, _) in col.iter() {
            rows[i].push(j);
        }
    }
    let mut ws = Workspace {
        cols,
        rows,
        col_active: vec![true; m],
        row_active: vec![true; m],
        col_buckets: vec![Vec::new(); m + 1],
        row_singletons: Vec::new(),
    };
    for j in 0..m {
        ws.bucket_col(j);
    }
    for i in 0..m {
        if ws.rows[i].len() == 1 {
            ws.row_singletons.push(i);
        }
    }

    let mut f = LuFactors {
        m,
        piv_row: Vec::with_capacity(m),
        piv_pos: Vec::with_capacity(m),
        diag: Vec::with_capacity(m),
        l_start: vec![0],
        l_idx: Vec::new(),
        l_val: Vec::new(),
        u_start: vec![0],
        u_idx: Vec::new(),
        u_val: Vec::new(),
    };
    let mut dependent: Vec<usize> = Vec::new();
    let mut remaining = m;
    let mut u_row: Vec<(usize, f64)> = Vec::new();

    while remaining > 0 {
        let choice = select_pivot(&mut ws, &mut dependent, &mut remaining);
        let Some((r, c)) = choice else {
            break;
        };
        // Pivot row values (U row) and removal of row r from active columns.
        u_row.clear();
        let row_cols = std::mem::take(&mut ws.rows[r]);
        let mut pivot = 0.0;
        for &j in &row_cols {
            let v = ws.remove_row_entry(j, r).unwrap_or(0.0);
            if j == c {
                pivot = v;
            } else {
                u_row.push((j, v));
            }
        }
        ws.row_active[r] = false;
        ws.col_active[c] = false;
        let col_c = std::mem::take(&mut ws.cols[c]);

        for &(i, a_ic) in &col_c {
            if i == r {
                continue;
            }
            let l = a_ic / pivot;
            f.l_idx.push(i);
            f.l_val.push(l);
            ws.remove_col_from_row(i, c);
            for &(j, a_rj) in &u_row {
                let delta = -l * a_rj;
                let col = &mut ws.cols[j];
                match col.iter().position(|&(ri, _)| ri == i) {
                    Some(p) => {
                        col[p].1 += delta;
                        if col[p].1.abs() <= DROP_TOL {
                            col.swap_remove(p);
                            ws.remove_col_from_row(i, j);
                        }
                    }
                    None => {
                        col.push((i, delta));
                        ws.rows[i].push(j);
                    }
                }
            }
        }
        for &(j, v) in &u_row {
            f.u_idx.push(j);
            f.u_val.push(v);
        }
        // Touched columns change counts.
        for &(j, _) in &u_row {
            if ws.col_active[j] {
                ws.bucket_col(j);
            }
        }
        f.piv_row.push(r);
        f.piv_pos.push(c);
        f.diag.push(pivot);
        f.l_start.push(f.l_idx.len());
        f.u_start.push(f.u_idx.len());
        remaining -= 1;
    }

    if dependent.is_empty() && f.piv_row.len() == m {
        return Ok(f);
    }
    let mut positions: Vec<usize> = dependent;
    positions.extend((0..m).filter(|&j| ws.col_active[j]));
    positions.sort_unstable();
    positions.dedup();
    let rows: Vec<usize> = (0..m).filter(|&i| ws.row_active[i]).collect();
    Err(Singularity { positions, rows })
}

fn select_pivot(ws: &mut Workspace, dependent: &mut Vec<usize>, remaining: &mut usize) -> Option<(usize, usize)> {
    loop {
        // Empty columns are structurally dependent.
        while let Some(j) = ws.col_buckets[0].pop() {
            if ws.col_active[j] && ws.col_count(j) == 0 {
                ws.col_active[j] = false;
                dependent.push(j);
                *remaining -= 1;
            }
        }
        if *remaining == 0 {
            return None;
        }

        // Column singletons: no elimination needed.
        while let Some(j) = ws.col_buckets[1].pop() {
            if !ws.col_active[j] || ws.col_count(j) != 1 {
                continue;
            }
            let (i, v) = ws.cols[j][0];
            if v.abs() > 1e-11 {
                return Some((i, j));
            }
            // Numerically empty column.
            ws.remove_row_entry(j, i);
            ws.remove_col_from_row(i, j);
            ws.col_active[j] = false;
            dependent.push(j);
            *remaining -= 1;
        }

        // Row singletons: elimination without fill.
        while let Some(i) = ws.row_singletons.pop() {
            if !ws.row_active[i] || ws.rows[i].len() != 1 {
                continue;
            }
            let j = ws.rows[i][0];
            let col = &ws.cols[j];
            let max = col.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
            if let Some(&(_, v)) = col.iter().find(|&&(r, _)| r == i) {
                if v.abs() >= THRESHOLD * max && v.abs() > 1e-11 {
                    return Some((i, j));
                }
            }
        }

        if !ws.col_buckets[0].is_empty() || !ws.col_buckets[1].is_empty() {
            continue;
        }

        // Markowitz search over the sparsest columns.
        let mut best: Option<(usize, usize, usize, f64)> = None;
        let mut examined = 0;
        let nb = ws.col_buckets.len();
        'outer: for count in 2..nb {
            let mut k = 0;
            while k < ws.col_buckets[count].len() {
                let j = ws.col_buckets[count][k];
                if !ws.col_active[j] || ws.col_count(j) != count {
                    ws.col_buckets[count].swap_remove(k);
                    continue;
                }
                k += 1;
                let col = &ws.cols[j];
                let max = col.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
                if max <= 1e-11 {
                    continue;
                }
                for &(i, v) in col {
                    if v.abs() < THRESHOLD * max {
                        continue;
                    }
                    let cost = (ws.rows[i].len() - 1) * (count - 1);
                    let better = match best {
                        None => true,
                        Some((bc, _, _, bv)) => cost < bc || (cost == bc && v.abs() > bv),
                    };
                    if better {
                        best = Some((cost, i, j, v.abs()));
                    }
                }
                examined += 1;
                if examined >= SEARCH_COLUMNS {
                    break 'outer;
                }
            }
            if let Some((cost, ..)) = best {
                if cost <= (count - 1) * (count - 1) {
                    break;
                }
            }
        }
        if let Some((_, i, j, _)) = best {
            return Some((i, j));
        }
        // Every remaining column is numerically zero.
        let mut any = false;
        for j in 0..ws.cols.len() {
            if ws.col_active[j] {
                let rows: Vec<usize> = ws.cols[j].iter().map(|&(r, _)| r).collect();
                for i in rows {
                    ws.remove_col_from_row(i, j);
                }
                ws.cols[j].clear();
                ws.col_active[j] = false;
                dependent.push(j);
                *remaining -= 1;
                any = true;
            }
        }
        if !any || *remaining == 0 {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m)
            .map(|j| (0..m).filter(|&i| a[i][j] != 0.0).map(|i| (i, a[i][j])).collect())
            .collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn solves_small_dense_system_both_ways() {
        let a = vec![
            vec![4.0, 1.0, 0.0, 2.0],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, 5.0, 1.0],
            vec![2.0, 0.0, 1.0, 6.0],
        ];
        let lu = factorize(4, dense_to_cols(&a)).unwrap();
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut rhs = matvec(&a, &x_true);
        let mut x = vec![0.0; 4];
        lu.ftran(&mut rhs, &mut x);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
        // Bᵀ y = c
        let at: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| a[j][i]).collect()).collect();
        let y_true = [0.3, 1.0, -1.0, 2.0];
        let mut c = matvec(&at, &y_true);
        let mut y = vec![0.0; 4];
        lu.btran(&mut c, &mut y);
        for (u, v) in y.iter().zip(&y_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn permuted_triangular_needs_no_nucleus() {
        let a = vec![vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 0.0], vec![3.0, 1.0, -1.0]];
        let lu = factorize(3, dense_to_cols(&a)).unwrap();
        let mut rhs = matvec(&a, &[1.0, 2.0, 3.0]);
        let mut x = vec![0.0; 3];
        lu.ftran(&mut rhs, &mut x);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14 && (x[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn reports_dependent_columns() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = factorize(3, dense_to_cols(&a)).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
