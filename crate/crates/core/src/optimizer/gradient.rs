//! Fixed-panel trapezoid evaluation of the optimizer's functionals and their
//! exact gradients with respect to the Fourier coefficients.
//!
//! Every functional is a sum over nodes of an expression in `x, y, x', y'`;
//! its gradient is assembled from per-node sensitivities projected onto the
//! `cos kσ`, `sin kσ` basis.

use std::f64::consts::PI;

use crate::error::Result;
use crate::fourier::FourierBoundary;

/// Quadrature nodes used for a curve of `order` harmonics.
pub fn default_panels(order: usize) -> usize {
    (32 * order).max(256)
}

/// Trigonometric tables for a fixed order and panel count.
#[derive(Debug, Clone)]
pub(crate) struct Tables {
    order: usize,
    panels: usize,
    /// `cos[k - 1][j] = cos(k σ_j)`.
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

/// Values of the functionals and their gradients in the
/// [`FourierBoundary::to_vec`] layout.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub area: f64,
    pub i1: f64,
    pub i2: f64,
    /// `mean((q/q̄ − 1)²)` with `q = |x'|²`.
    pub speed_penalty: f64,
    /// Squared distance of the boundary centroid from the origin.
    pub centroid_penalty: f64,
    pub grad_area: Vec<f64>,
    pub grad_i1: Vec<f64>,
    pub grad_i2: Vec<f64>,
    pub grad_speed: Vec<f64>,
    pub grad_centroid: Vec<f64>,
}

impl Evaluation {
    pub fn product(&self) -> f64 {
        self.i1 * self.i2
    }

    pub fn grad_product(&self) -> Vec<f64> {
        self.grad_i1.iter().zip(&self.grad_i2).map(|(g1, g2)| self.i2 * g1 + self.i1 * g2).collect()
    }
}

impl Tables {
    pub fn new(order: usize, panels: usize) -> Self {
        let grid: Vec<usize> = (0..panels).collect();
        let angle = |k: usize, j: usize| 2.0 * PI * ((k * j) % panels) as f64 / panels as f64;
        let cos = (1..=order).map(|k| grid.iter().map(|&j| angle(k, j).cos()).collect()).collect();
        let sin = (1..=order).map(|k| grid.iter().map(|&j| angle(k, j).sin()).collect()).collect();
        Self { order, panels, cos, sin }
    }

    fn curve(&self, v: &[f64]) -> [Vec<f64>; 4] {
        let n = self.panels;
        let mut x = vec![v[0] / 2.0; n];
        let mut y = vec![v[1] / 2.0; n];
        let mut dx = vec![0.0; n];
        let mut dy = vec![0.0; n];
        for k in 1..=self.order {
            let c = &v[2 + 4 * (k - 1)..2 + 4 * k];
            let kf = k as f64;
            let (cs, sn) = (&self.cos[k - 1], &self.sin[k - 1]);
            for j in 0..n {
                x[j] += c[0] * cs[j] + c[1] * sn[j];
                y[j] += c[2] * cs[j] + c[3] * sn[j];
                dx[j] += kf * (c[1] * cs[j] - c[0] * sn[j]);
                dy[j] += kf * (c[3] * cs[j] - c[2] * sn[j]);
            }
        }
        [x, y, dx, dy]
    }

    /// Gradient of `Σ_j F(x_j, y_j, x'_j, y'_j)` from `∂F/∂(x, y, x', y')`.
    fn project(&self, gx: &[f64], gy: &[f64], gdx: &[f64], gdy: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 + 4 * self.order];
        out[0] = 0.5 * gx.iter().sum::<f64>();
        out[1] = 0.5 * gy.iter().sum::<f64>();
        for k in 1..=self.order {
            let kf = k as f64;
            let (cs, sn) = (&self.cos[k - 1], &self.sin[k - 1]);
            let o = &mut out[2 + 4 * (k - 1)..2 + 4 * k];
            for j in 0..self.panels {
                o[0] += gx[j] * cs[j] - kf * gdx[j] * sn[j];
                o[1] += gx[j] * sn[j] + kf * gdx[j] * cs[j];
                o[2] += gy[j] * cs[j] - kf * gdy[j] * sn[j];
                o[3] += gy[j] * sn[j] + kf * gdy[j] * cs[j];
            }
        }
        out
    }

    pub fn evaluate(&self, v: &[f64]) -> Evaluation {
        debug_assert_eq!(v.len(), 2 + 4 * self.order);
        let n = self.panels;
        let h = 2.0 * PI / n as f64;
        let [x, y, dx, dy] = self.curve(v);
        let s: Vec<f64> = (0..n).map(|j| dx[j].hypot(dy[j])).collect();
        let zeros = vec![0.0; n];

        let area = 0.5 * h * (0..n).map(|j| x[j] * dy[j] - y[j] * dx[j]).sum::<f64>();
        let half = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..n).map(|j| 0.5 * h * f(j)).collect() };
        let grad_area = self.project(&half(&|j| dy[j]), &half(&|j| -dx[j]), &half(&|j| -y[j]), &half(&|j| x[j]));

        let moment = |w: &[f64]| -> (f64, Vec<f64>, Vec<f64>, Vec<f64>) {
            let value = h * (0..n).map(|j| w[j] * w[j] * s[j]).sum::<f64>();
            let g = (0..n).map(|j| 2.0 * h * w[j] * s[j]).collect();
            let gdx = (0..n).map(|j| h * w[j] * w[j] * dx[j] / s[j]).collect();
            let gdy = (0..n).map(|j| h * w[j] * w[j] * dy[j] / s[j]).collect();
            (value, g, gdx, gdy)
        };
        let (i1, g1, g1dx, g1dy) = moment(&x);
        let grad_i1 = self.project(&g1, &zeros, &g1dx, &g1dy);
        let (i2, g2, g2dx, g2dy) = moment(&y);
        let grad_i2 = self.project(&zeros, &g2, &g2dx, &g2dy);

        let q: Vec<f64> = (0..n).map(|j| s[j] * s[j]).collect();
        let mean = q.iter().sum::<f64>() / n as f64;
        let r: Vec<f64> = q.iter().map(|v| v / mean - 1.0).collect();
        let speed_penalty = r.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let coupling = r.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / (n as f64 * mean * mean);
        let dq: Vec<f64> = r.iter().map(|rj| 2.0 / n as f64 * (rj / mean - coupling)).collect();
        let grad_speed = self.project(
            &zeros,
            &zeros,
            &(0..n).map(|j| 2.0 * dx[j] * dq[j]).collect::<Vec<_>>(),
            &(0..n).map(|j| 2.0 * dy[j] * dq[j]).collect::<Vec<_>>(),
        );

        let length = h * s.iter().sum::<f64>();
        let cx = h * (0..n).map(|j| x[j] * s[j]).sum::<f64>() / length;
        let cy = h * (0..n).map(|j| y[j] * s[j]).sum::<f64>() / length;
        let centroid_penalty = cx * cx + cy * cy;
        // ∂c/∂x_j = h s_j / L,  ∂c_x/∂x'_j = h x'_j (x_j − c_x) / (s_j L)
        let grad_centroid = self.project(
            &(0..n).map(|j| 2.0 * cx * h * s[j] / length).collect::<Vec<_>>(),
            &(0..n).map(|j| 2.0 * cy * h * s[j] / length).collect::<Vec<_>>(),
            &(0..n)
                .map(|j| 2.0 * h * dx[j] / (s[j] * length) * (cx * (x[j] - cx) + cy * (y[j] - cy)))
                .collect::<Vec<_>>(),
            &(0..n)
                .map(|j| 2.0 * h * dy[j] / (s[j] * length) * (cx * (x[j] - cx) + cy * (y[j] - cy)))
                .collect::<Vec<_>>(),
        );

        Evaluation {
            area,
            i1,
            i2,
            speed_penalty,
            centroid_penalty,
            grad_area,
            grad_i1,
            grad_i2,
            grad_speed,
            grad_centroid,
        }
    }
}

/// `I_1 · I_2` on the fixed quadrature used by the optimizer.
pub fn boundary_product(fb: &FourierBoundary) -> Result<f64> {
    fb.validate()?;
    let tables = Tables::new(fb.order(), default_panels(fb.order()));
    Ok(tables.evaluate(&fb.to_vec()).product())
}

/// Gradient of `I_1 · I_2` with respect to `[a_0, b_0, (a_k, a'_k, b_k, b'_k)…]`.
pub fn objective_gradient(fb: &FourierBoundary) -> Result<Vec<f64>> {
    fb.validate()?;
    let tables = Tables::new(fb.order(), default_panels(fb.order()));
    Ok(tables.evaluate(&fb.to_vec()).grad_product())
}

/// The gradient of `I_1 · I_2` with the gauge coordinates (`a_0, b_0, a'_1,
/// b_1`) zeroed and the area-gradient direction removed: zero exactly at
/// stationary points of the area-constrained problem.
pub fn projected_gradient(fb: &FourierBoundary) -> Result<Vec<f64>> {
    fb.validate()?;
    let tables = Tables::new(fb.order(), default_panels(fb.order()));
    let e = tables.evaluate(&fb.to_vec());
    let mask = |mut g: Vec<f64>| {
        for i in super::GAUGE_INDICES {
            g[i] = 0.0;
        }
        g
    };
    let g = mask(e.grad_product());
    let a = mask(e.grad_area.clone());
    let coef = dot(&g, &a) / dot(&a, &a);
    Ok(g.iter().zip(&a).map(|(gi, ai)| gi - coef * ai).collect())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_difference(f: impl Fn(&[f64]) -> f64, v: &[f64], i: usize) -> f64 {
        let step = 1e-6 * v[i].abs().max(1.0);
        let mut p = v.to_vec();
        let mut m = v.to_vec();
        p[i] += step;
        m[i] -= step;
        (f(&p) - f(&m)) / (2.0 * step)
    }

    #[test]
    fn all_gradients_match_finite_differences() {
        let mut fb = FourierBoundary::ellipse(1.2, 0.9).with_order(3);
        fb.a0 = 0.2;
        fb.modes[1] = crate::fourier::FourierMode { x_cos: 0.05, x_sin: -0.03, y_cos: 0.02, y_sin: 0.04 };
        fb.modes[2].x_sin = 0.02;
        let t = Tables::new(3, 256);
        let v = fb.to_vec();
        let e = t.evaluate(&v);
        type Pick = fn(&Evaluation) -> f64;
        let checks: [(Pick, &Vec<f64>); 5] = [
            (|e| e.area, &e.grad_area),
            (|e| e.i1, &e.grad_i1),
            (|e| e.i2, &e.grad_i2),
            (|e| e.speed_penalty, &e.grad_speed),
            (|e| e.centroid_penalty, &e.grad_centroid),
        ];
        for (pick, grad) in checks {
            for i in 0..v.len() {
                let fd = finite_difference(|w| pick(&t.evaluate(w)), &v, i);
                assert!((fd - grad[i]).abs() < 1e-7 * (1.0 + grad[i].abs()), "{i}: {fd} vs {}", grad[i]);
            }
        }
    }

    #[test]
    fn circle_is_stationary_on_the_area_constraint() {
        let g = projected_gradient(&FourierBoundary::circle(1.0).with_order(4)).unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-8);
    }

    #[test]
    fn x_symmetric_shape_has_vanishing_odd_components() {
        // only cosine terms in x and sine terms in y: symmetric under y ↦ −y
        let mut fb = FourierBoundary::ellipse(1.3, 0.8).with_order(3);
        fb.modes[1].x_cos = 0.1;
        fb.modes[1].y_sin = 0.05;
        let g = objective_gradient(&fb).unwrap();
        for k in 0..3 {
            assert!(g[2 + 4 * k + 1].abs() < 1e-12);
            assert!(g[2 + 4 * k + 2].abs() < 1e-12);
        }
        assert!(g[1].abs() < 1e-12);
    }
}
