use super::{DualCertificate, LinearProgram, LpSolution, LpStatus, EPS_FEAS, EPS_OPT, PIVOT_TOL};
use crate::error::{Error, Result};

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
pub const MAX_DEGENERATE_RUN: usize = 50;

const RATIO_TIE: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    Leq,
    Eq,
    Upper(usize),
}

struct Row {
    kind: RowKind,
    // index of the constraint within its family
    index: usize,
    negated: bool,
    slack: Option<usize>,
    artificial: Option<usize>,
}

struct Tableau {
    rows: usize,
    width: usize, // columns + rhs
    cols: usize,
    data: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        let inv = 1.0 / p;
        for j in 0..w {
            self.data[pr * w + j] *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (x, &pj) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pj;
                }
                row[pc] = 0.0;
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for (x, &pj) in self.obj.iter_mut().zip(prow.iter()) {
                *x -= f * pj;
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Sets the objective row to reduced costs `c_B B⁻¹ A − c` for cost vector `cost`.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj = cost.iter().map(|c| -c).chain(std::iter::once(0.0)).collect();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (o, &a) in self.obj.iter_mut().zip(row) {
                    *o += cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.obj[b] = 0.0;
        }
    }

    /// Runs primal simplex iterations over columns `< allowed_cols`. Basic
    /// variables at index `>= allowed_cols` (artificials left in the basis at
    /// zero) are kept at zero: any row that would move them leaves first.
    /// Returns `false` when the objective is unbounded.
    fn optimize(&mut self, allowed_cols: usize) -> Result<bool> {
        let limit = 50_000 + 200 * (self.rows + self.cols);
        let mut degenerate_run = 0usize;
        loop {
            if self.pivots > limit {
                return Err(Error::NumericalFailure("iteration limit reached".into()));
            }
            let bland = degenerate_run >= MAX_DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -EPS_OPT;
            for j in 0..allowed_cols {
                let r = self.obj[j];
                if r < -EPS_OPT {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if r < best {
                        best = r;
                        entering = Some(j);
                    }
                }
            }
            let Some(pc) = entering else {
                return Ok(true);
            };

            // (row, ratio, |pivot|)
            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, pc);
                let pinned = self.basis[i] >= allowed_cols;
                let ratio = if pinned && a.abs() > PIVOT_TOL {
                    0.0
                } else if a > PIVOT_TOL {
                    self.rhs(i).max(0.0) / a
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((bi, br, ba)) => {
                        let tie = RATIO_TIE * (1.0 + br);
                        if ratio < br - tie {
                            true
                        } else if ratio <= br + tie {
                            if bland {
                                self.basis[i] < self.basis[bi]
                            } else {
                                a.abs() > ba || (a.abs() == ba && self.basis[i] < self.basis[bi])
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, a.abs()));
                }
            }
            let Some((pr, ratio, _)) = leave else {
                return Ok(false);
            };
            if ratio <= RATIO_TIE {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(pr, pc);
        }
    }
}

pub(super) fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars;
    let shift = |coeffs: &[f64], rhs: f64| -> f64 {
        rhs - coeffs.iter().zip(&lp.lower).map(|(a, l)| a * l).sum::<f64>()
    };

    // Row layout: leq rows, eq rows, then one row per finite upper bound.
    let mut rows: Vec<Row> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for (i, c) in lp.leq.iter().enumerate() {
        let b = shift(&c.coeffs, c.rhs);
        rows.push(Row {
            kind: RowKind::Leq,
            index: i,
            negated: b < 0.0,
            slack: None,
            artificial: None,
        });
        rhs.push(b);
    }
    for (i, c) in lp.eq.iter().enumerate() {
        let b = shift(&c.coeffs, c.rhs);
        rows.push(Row {
            kind: RowKind::Eq,
            index: i,
            negated: b < 0.0,
            slack: None,
            artificial: None,
        });
        rhs.push(b);
    }
    for j in 0..n {
        if let Some(u) = lp.upper[j] {
            rows.push(Row {
                kind: RowKind::Upper(j),
                index: j,
                negated: false,
                slack: None,
                artificial: None,
            });
            rhs.push(u - lp.lower[j]);
        }
    }

    let m = rows.len();
    let mut cols = n;
    for row in rows.iter_mut() {
        if row.kind != RowKind::Eq {
            row.slack = Some(cols);
            cols += 1;
        }
    }
    let first_artificial = cols;
    for row in rows.iter_mut() {
        if row.kind == RowKind::Eq || row.negated {
            row.artificial = Some(cols);
            cols += 1;
        }
    }

    let width = cols + 1;
    let mut data = vec![0.0; m * width];
    let mut basis = vec![0; m];
    for (i, row) in rows.iter().enumerate() {
        let line = &mut data[i * width..(i + 1) * width];
        let sign = if row.negated { -1.0 } else { 1.0 };
        match row.kind {
            RowKind::Leq => line[..n].copy_from_slice(&lp.leq[row.index].coeffs),
            RowKind::Eq => line[..n].copy_from_slice(&lp.eq[row.index].coeffs),
            RowKind::Upper(j) => line[j] = 1.0,
        }
        if let Some(s) = row.slack {
            line[s] = 1.0;
        }
        if row.negated {
            for x in &mut line[..cols] {
                *x = -*x;
            }
        }
        line[cols] = sign * rhs[i];
        match row.artificial {
            Some(a) => {
                line[a] = 1.0;
                basis[i] = a;
            }
            None => basis[i] = row.slack.expect("non-artificial rows have a slack"),
        }
    }

    let original = data.clone();
    let mut t = Tableau {
        rows: m,
        width,
        cols,
        data,
        obj: Vec::new(),
        basis,
        pivots: 0,
    };

    // Phase 1: drive the artificial variables to zero.
    if cols > first_artificial {
        let mut cost = vec![0.0; cols];
        for c in cost.iter_mut().skip(first_artificial) {
            *c = -1.0;
        }
        t.price(&cost);
        t.optimize(cols)?;
        let scale = rhs.iter().fold(1.0f64, |acc, b| acc.max(b.abs()));
        let infeasibility: f64 = (0..m)
            .filter(|&i| t.basis[i] >= first_artificial)
            .map(|i| t.rhs(i).max(0.0))
            .sum();
        if infeasibility > EPS_FEAS * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![0.0; n],
                objective_value: 0.0,
                duals: None,
                pivots: t.pivots,
            });
        }
        // Pivot remaining (zero-valued) artificials out where possible.
        for i in 0..m {
            if t.basis[i] < first_artificial {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..first_artificial {
                let a = t.at(i, j).abs();
                if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                t.pivot(i, j);
            }
            // otherwise the row is redundant and its artificial stays basic at zero
        }
    }

    // Phase 2.
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    t.price(&cost);
    if !t.optimize(first_artificial)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![0.0; n],
            objective_value: f64::INFINITY,
            duals: None,
            pivots: t.pivots,
        });
    }

    // Recompute the basic solution from the original rows, which removes
    // the error accumulated over the pivots.
    let basic = refine(&original, m, width, &t.basis).unwrap_or_else(|| (0..m).map(|i| t.rhs(i)).collect());
    let mut shifted = vec![0.0; cols];
    for i in 0..m {
        shifted[t.basis[i]] = basic[i];
    }
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let mut x = lp.lower[j] + shifted[j].max(0.0);
            if let Some(u) = lp.upper[j] {
                x = x.min(u);
            }
            x
        })
        .collect();

    let violation = lp.max_violation(&values);
    if violation > EPS_FEAS {
        return Err(Error::NumericalFailure(format!(
            "final point violates constraints by {violation:e}"
        )));
    }

    let mut duals = DualCertificate {
        leq: vec![0.0; lp.leq.len()],
        eq: vec![0.0; lp.eq.len()],
        upper: vec![0.0; n],
    };
    for row in &rows {
        match row.kind {
            RowKind::Leq => duals.leq[row.index] = t.obj[row.slack.expect("slack")],
            RowKind::Upper(j) => duals.upper[j] = t.obj[row.slack.expect("slack")],
            RowKind::Eq => {
                let y = t.obj[row.artificial.expect("artificial")];
                duals.eq[row.index] = if row.negated { -y } else { y };
            }
        }
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_at(&values),
        values,
        duals: Some(duals),
        pivots: t.pivots,
    })
}

/// Solves `B x_B = b` for the basis columns of the original tableau rows by
/// Gaussian elimination with partial pivoting. `None` if `B` is numerically
/// singular.
fn refine(original: &[f64], m: usize, width: usize, basis: &[usize]) -> Option<Vec<f64>> {
    let rhs_col = width - 1;
    let mut a: Vec<f64> = Vec::with_capacity(m * (m + 1));
    for i in 0..m {
        let row = &original[i * width..(i + 1) * width];
        a.extend(basis.iter().map(|&j| row[j]));
        a.push(row[rhs_col]);
    }
    let w = m + 1;
    for col in 0..m {
        let piv = (col..m).max_by(|&p, &q| a[p * w + col].abs().total_cmp(&a[q * w + col].abs()))?;
        if a[piv * w + col].abs() < PIVOT_TOL {
            return None;
        }
        if piv != col {
            for k in 0..w {
                a.swap(piv * w + k, col * w + k);
            }
        }
        let p = a[col * w + col];
        for row in col + 1..m {
            let f = a[row * w + col] / p;
            if f != 0.0 {
                for k in col..w {
                    a[row * w + k] -= f * a[col * w + k];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let tail: f64 = (i + 1..m).map(|k| a[i * w + k] * x[k]).sum();
        x[i] = (a[i * w + m] - tail) / a[i * w + i];
    }
    Some(x)
}
