//! Free-format MPS writer for debugging dumps. Rows are named `R{i}` and
//! columns `C{j}` unless names are supplied.

use std::fmt::Write;

use super::problem::LpProblem;

pub fn write_mps(name: &str, p: &LpProblem, row_names: Option<&[String]>, col_names: Option<&[String]>) -> String {
    let rname = |i: usize| row_names.and_then(|n| n.get(i).cloned()).unwrap_or_else(|| format!("R{i}"));
    let cname = |j: usize| col_names.and_then(|n| n.get(j).cloned()).unwrap_or_else(|| format!("C{j}"));
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n N OBJ\n");
    for i in 0..p.num_rows() {
        let _ = writeln!(out, " E {}", rname(i));
    }
    out.push_str("COLUMNS\n");
    for j in 0..p.num_cols() {
        let cj = cname(j);
        if p.cost[j] != 0.0 {
            let _ = writeln!(out, " {cj} OBJ {:e}", p.cost[j]);
        }
        let (rows, vals) = p.a.col(j);
        for (&i, &v) in rows.iter().zip(vals) {
            let _ = writeln!(out, " {cj} {} {:e}", rname(i), v);
        }
    }
    out.push_str("RHS\n");
    for (i, &b) in p.rhs.iter().enumerate() {
        if b != 0.0 {
            let _ = writeln!(out, " RHS {} {:e}", rname(i), b);
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..p.num_cols() {
        let (l, u) = (p.lower[j], p.upper[j]);
        let cj = cname(j);
        if l == u {
            let _ = writeln!(out, " FX BND {cj} {l:e}");
            continue;
        }
        match (l.is_finite(), u.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR BND {cj}");
            }
            (false, true) => {
                let _ = writeln!(out, " MI BND {cj}");
                let _ = writeln!(out, " UP BND {cj} {u:e}");
            }
            (true, fin_u) => {
                if l != 0.0 {
                    let _ = writeln!(out, " LO BND {cj} {l:e}");
                }
                if fin_u {
                    let _ = writeln!(out, " UP BND {cj} {u:e}");
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::CscMatrix;

    #[test]
    fn sections_in_order() {
        let a = CscMatrix::from_triplets(1, 2, &[(0, 0, 1.0), (0, 1, 2.0)]);
        let p = LpProblem::new(a, vec![4.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![f64::INFINITY, 1.0]);
        let s = write_mps("t", &p, None, None);
        let order: Vec<usize> = ["ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"]
            .iter()
            .map(|k| s.find(k).unwrap())
            .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains(" FX BND C1 1e0"));
        assert!(s.contains(" C1 R0 2e0"));
    }
}
