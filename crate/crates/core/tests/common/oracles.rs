//! Independent oracles: brute-force LP vertex enumeration and direct
//! substitution of trading prices into the part equations.

use msep::lp::{CscMatrix, LpProblem};
use msep::metrics::{PartCapital, PresentValueLedger, TradingPrices};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn dense_problem(rows: &[Vec<f64>], rhs: Vec<f64>, cost: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> LpProblem {
    let mut trip = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if v != 0.0 {
                trip.push((i, j, v));
            }
        }
    }
    let a = CscMatrix::from_triplets(rows.len(), cost.len(), &trip);
    LpProblem::new(a, rhs, cost, lower, upper)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn dense_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-9 {
            return None;
        }
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / m[k][k];
    }
    Some(x)
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum objective over all basic feasible solutions of a bounded
/// equality-form LP (every column box-bounded).
pub fn vertex_enumeration(rows: &[Vec<f64>], rhs: &[f64], cost: &[f64], lower: &[f64], upper: &[f64]) -> Option<f64> {
    let (m, n) = (rows.len(), cost.len());
    let mut best: Option<f64> = None;
    for basis in combinations(n, m) {
        let nonbasic: Vec<usize> = (0..n).filter(|j| !basis.contains(j)).collect();
        for mask in 0..(1u32 << nonbasic.len()) {
            let mut x = vec![0.0; n];
            for (k, &j) in nonbasic.iter().enumerate() {
                x[j] = if mask & (1 << k) == 0 { lower[j] } else { upper[j] };
            }
            let bmat: Vec<Vec<f64>> = rows.iter().map(|r| basis.iter().map(|&j| r[j]).collect()).collect();
            let resid: Vec<f64> = (0..m)
                .map(|i| rhs[i] - nonbasic.iter().map(|&j| rows[i][j] * x[j]).sum::<f64>())
                .collect();
            let Some(xb) = dense_solve(bmat, resid) else { continue };
            let feasible = basis
                .iter()
                .zip(&xb)
                .all(|(&j, &v)| v >= lower[j] - 1e-9 && v <= upper[j] + 1e-9);
            if !feasible {
                continue;
            }
            for (&j, &v) in basis.iter().zip(&xb) {
                x[j] = v;
            }
            let obj: f64 = cost.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

pub fn random_feasible(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| if rng.random_bool(0.8) { rng.random_range(-5.0..5.0) } else { 0.0 })
                .collect()
        })
        .collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..1.0)).collect();
    let upper: Vec<f64> = lower.iter().map(|l| l + rng.random_range(0.5..4.0)).collect();
    let x0: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| rng.random_range(*l..*u)).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect();
    let cost: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    (rows, rhs, cost, lower, upper)
}

/// Ledger with consistent energy identities: `e` are energies, `c` costs,
/// `on` switches the battery, hydrogen, hydrogen-to-ammonia and ammonia
/// chains.
pub fn synthetic_ledger(e: [f64; 12], c: [f64; 12], on: [bool; 4]) -> PresentValueLedger {
    let pick = |k: usize, v: f64| if on[k] { v } else { 0.0 };
    let mut l = PresentValueLedger {
        wind: e[0] * 100.0,
        solar: e[1] * 100.0,
        coal_fired: e[2],
        curtailment: e[3] * 0.1,
        battery_charge: pick(0, e[4]),
        battery_discharge: pick(0, e[5]),
        electrolyzer: pick(1, e[6]),
        fuel_cell: pick(1, e[7]),
        hydrogen_to_ammonia: pick(2, e[8] * 100.0),
        synthesis: pick(3, e[9]),
        ammonia_fired: pick(3, e[10]),
        capital: PartCapital {
            generation: c[0],
            battery: c[1],
            hydrogen: c[2],
            ammonia: c[3],
        },
        retirement: c[4],
        coal: c[5],
        degradation: c[6],
        hydrogen_purchase: c[7],
        ammonia_purchase: c[8],
        hydrogen_revenue: c[9] * 0.1,
        ammonia_revenue: c[10] * 0.1,
        kappa_fc: 1.6e-3,
        ..Default::default()
    };
    l.generation = l.generation_identity();
    l.generation_delivered = l.delivered_identity();
    l.uhvdc = l.supply_identity();
    l
}

/// Independent substitution of the prices into each part's NPV.
pub fn substitute(l: &PresentValueLedger, p: &TradingPrices) -> Vec<f64> {
    let g = p.lcoe_g;
    let h = p.lcoh.unwrap_or(0.0);
    let mut out = vec![l.capital.generation + l.retirement + l.coal - g * l.generation];
    if let Some(b) = p.lcos_b {
        out.push(l.capital.battery + l.degradation + g * l.battery_charge - b * l.battery_discharge);
    }
    if p.lcos_h.is_some() || p.lcoh.is_some() {
        let fc = p.lcos_h.map_or(0.0, |v| v * l.fuel_cell);
        out.push(
            l.capital.hydrogen + l.hydrogen_purchase + g * l.electrolyzer
                - l.hydrogen_revenue
                - h * l.hydrogen_to_ammonia
                - fc,
        );
    }
    if let (Some(hs), Some(lcoh)) = (p.lcos_h, p.lcoh) {
        out.push(lcoh - l.kappa_fc * hs);
    }
    if let Some(a) = p.lcos_a {
        out.push(
            l.capital.ammonia + l.ammonia_purchase + g * l.synthesis + h * l.hydrogen_to_ammonia
                - l.ammonia_revenue
                - a * l.ammonia_fired,
        );
    }
    out
}

