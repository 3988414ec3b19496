//! Adaptive tensor Gauss–Legendre quadrature on rectangles.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Points per axis of the tensor rule.
pub const GL_ORDER: usize = 16;

/// Default cap on the number of live cells.
pub const DEFAULT_CELL_BUDGET: usize = 100_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let step = p1 / dp;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            x[n - 1 - i] = z;
            w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    fn halves(&self, along_x: bool) -> (Rect, Rect) {
        if along_x {
            let m = 0.5 * (self.x0 + self.x1);
            (Rect { x1: m, ..*self }, Rect { x0: m, ..*self })
        } else {
            let m = 0.5 * (self.y0 + self.y1);
            (Rect { y1: m, ..*self }, Rect { y0: m, ..*self })
        }
    }

    fn splittable(&self) -> bool {
        let mx = 0.5 * (self.x0 + self.x1);
        let my = 0.5 * (self.y0 + self.y1);
        (mx > self.x0 && mx < self.x1) || (my > self.y0 && my < self.y1)
    }
}

fn tensor<F: Fn(f64, f64) -> f64>(f: &F, r: &Rect) -> f64 {
    let (xs, ws) = gauss_legendre();
    let (cx, hx) = (0.5 * (r.x0 + r.x1), 0.5 * (r.x1 - r.x0));
    let (cy, hy) = (0.5 * (r.y0 + r.y1), 0.5 * (r.y1 - r.y0));
    let mut total = 0.0;
    for (xi, wi) in xs.iter().zip(ws) {
        let x = cx + hx * xi;
        let mut row = 0.0;
        for (yj, wj) in xs.iter().zip(ws) {
            row += wj * f(x, cy + hy * yj);
        }
        total += wi * row;
    }
    total * hx * hy
}

#[derive(Clone, Debug)]
struct Cell {
    value: f64,
    error: f64,
    children: [(Rect, f64); 2],
}

/// Compares the cell rule with both bisections and keeps the bisection that
/// moves the value most.
fn assess<F: Fn(f64, f64) -> f64>(f: &F, r: Rect, coarse: f64) -> Cell {
    let (xa, xb) = r.halves(true);
    let (ya, yb) = r.halves(false);
    let (qxa, qxb) = (tensor(f, &xa), tensor(f, &xb));
    let (qya, qyb) = (tensor(f, &ya), tensor(f, &yb));
    let ex = (coarse - (qxa + qxb)).abs();
    let ey = (coarse - (qya + qyb)).abs();
    let children = if ex >= ey {
        [(xa, qxa), (xb, qxb)]
    } else {
        [(ya, qya), (yb, qyb)]
    };
    let error = if r.splittable() { ex.max(ey) } else { 0.0 };
    Cell {
        value: children[0].1 + children[1].1,
        error: if error.is_finite() { error } else { f64::INFINITY },
        children,
    }
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Outcome of [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
}

/// `∫∫_domain f` to absolute tolerance `tol`. Starts from an `n0 × n0` grid
/// and repeatedly bisects the cells carrying the larger half of the error.
/// Cells are evaluated in parallel and summed in a fixed order.
pub fn integrate<F>(f: F, domain: Rect, n0: usize, tol: f64, budget: usize) -> Result<Integral>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if tol.is_nan() || tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if n0 == 0 || !(domain.x1 > domain.x0 && domain.y1 > domain.y0) {
        return invalid("empty integration domain");
    }
    let (dx, dy) = ((domain.x1 - domain.x0) / n0 as f64, (domain.y1 - domain.y0) / n0 as f64);
    let grid: Vec<Rect> = (0..n0 * n0)
        .map(|c| {
            let (i, j) = ((c / n0) as f64, (c % n0) as f64);
            Rect {
                x0: domain.x0 + i * dx,
                x1: if c / n0 + 1 == n0 { domain.x1 } else { domain.x0 + (i + 1.0) * dx },
                y0: domain.y0 + j * dy,
                y1: if c % n0 + 1 == n0 { domain.y1 } else { domain.y0 + (j + 1.0) * dy },
            }
        })
        .collect();
    let mut cells: Vec<Cell> = grid.par_iter().map(|r| assess(&f, *r, tensor(&f, r))).collect();
    loop {
        let value = neumaier(cells.iter().map(|c| c.value));
        let error = neumaier(cells.iter().map(|c| c.error));
        if !value.is_finite() {
            return Err(Error::ComputationFailed("integrand is not integrable on the grid".into()));
        }
        if error <= tol {
            return Ok(Integral {
                value,
                error_estimate: error,
                cells: cells.len(),
            });
        }
        if cells.len() >= budget {
            return Err(Error::QuadratureBudget {
                value,
                error_estimate: error,
                cells: cells.len(),
                tol,
            });
        }
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[b].error.total_cmp(&cells[a].error).then(a.cmp(&b)));
        let mut marked = vec![false; cells.len()];
        let mut acc = 0.0;
        for &i in &order {
            if acc >= 0.5 * error || cells[i].error == 0.0 {
                break;
            }
            marked[i] = true;
            acc += cells[i].error;
        }
        let jobs: Vec<(Rect, f64)> = cells
            .iter()
            .zip(&marked)
            .filter(|(_, &m)| m)
            .flat_map(|(c, _)| c.children)
            .collect();
        let mut refined = jobs.par_iter().map(|(r, q)| assess(&f, *r, *q)).collect::<Vec<_>>().into_iter();
        let mut next = Vec::with_capacity(cells.len() + jobs.len() / 2);
        for (c, m) in cells.into_iter().zip(marked) {
            if m {
                next.extend(refined.by_ref().take(2));
            } else {
                next.push(c);
            }
        }
        cells = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..2 * GL_ORDER as i32 {
            let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
            let q: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn smooth_integrand() {
        let r = integrate(|x, y| (x * y).exp(), unit(), 1, 1e-13, 1000).unwrap();
        // ∫_0^1 (e^x − 1)/x dx = Ei(1) − γ
        let exact = 1.317_902_151_454_403_8;
        assert!((r.value - exact).abs() < 1e-13);
        assert!(r.error_estimate <= 1e-13);
    }

    #[test]
    fn log_edge_singularity() {
        // ∫∫ ln y = −1
        let r = integrate(|_, y| y.ln(), unit(), 2, 1e-12, 10_000).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12, "{}", r.value);
        assert!((r.value + 1.0).abs() <= r.error_estimate.max(1e-15));
    }

    #[test]
    fn budget_is_reported() {
        let e = integrate(|x, _| 1.0 / x, unit(), 1, 1e-14, 20).unwrap_err();
        assert!(matches!(e, Error::QuadratureBudget { cells, .. } if cells >= 20));
    }

    #[test]
    fn deterministic_across_pools() {
        let f = |x: f64, y: f64| (x + y).ln();
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| integrate(f, unit(), 3, 1e-10, 50_000).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}
