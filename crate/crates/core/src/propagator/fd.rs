use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::PhaseField;
use crate::math;

/// Global order of accuracy of [`fd_solve`] (in `Δt` and `h` jointly).
pub const FD_CONVERGENCE_ORDER: f64 = 1.0;

/// Finite-difference reference for `d = 1`: Lie splitting of first-order
/// upwind transport in `x` (explicit Euler) and centered diffusion in `v`
/// (implicit Euler), both periodic on the box.
///
/// First order in time and space; the CFL condition
/// `Δt · max|v| / h ≤ 1` is enforced.
pub fn fd_solve(f: &PhaseField, t: f64, steps: usize) -> Result<PhaseField> {
    let grid = *f.grid();
    if grid.d() != 1 {
        return Err(Error::Unsupported(format!("finite-difference reference is d = 1 only, got d = {}", grid.d())));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("time must be finite and ≥ 0, got {t}")));
    }
    if steps == 0 {
        return Err(Error::param("steps", "must be positive"));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let m = grid.points_per_axis();
    let h = grid.spacing();
    let dt = t / steps as f64;
    let v_max = (0..m).map(|j| math::abs(grid.coordinate(j))).fold(0.0, f64::max);
    let courant = dt * v_max / h;
    if courant > 1.0 {
        return Err(Error::Cfl { courant });
    }
    let r = dt / (h * h);
    let solver = CyclicTridiagonal::new(m, -r, 1.0 + 2.0 * r);

    let mut u = f.values().to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); u.len()];
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    let vs: Vec<f64> = (0..m).map(|j| grid.coordinate(j)).collect();
    for _ in 0..steps {
        // transport: ∂t g + v ∂x g = 0, index = ix·m + iv
        for ix in 0..m {
            let left = (ix + m - 1) % m;
            let right = (ix + 1) % m;
            for (iv, &v) in vs.iter().enumerate() {
                let c = u[ix * m + iv];
                let grad = if v > 0.0 { c - u[left * m + iv] } else { u[right * m + iv] - c };
                next[ix * m + iv] = c - grad * (dt * v / h);
            }
        }
        // diffusion: (I − Δt ∂vv) g = g*
        for ix in 0..m {
            column.copy_from_slice(&next[ix * m..(ix + 1) * m]);
            solver.solve(&mut column);
            u[ix * m..(ix + 1) * m].copy_from_slice(&column);
        }
    }
    PhaseField::new(grid, u)
}

/// Periodic tridiagonal system with constant off-diagonal `a` and diagonal
/// `b`, solved by Thomas + Sherman–Morrison.
struct CyclicTridiagonal {
    m: usize,
    a: f64,
    b: f64,
    gamma: f64,
    z: Vec<f64>,
}

impl CyclicTridiagonal {
    fn new(m: usize, a: f64, b: f64) -> Self {
        let gamma = -b;
        let mut s = CyclicTridiagonal { m, a, b, gamma, z: Vec::new() };
        let mut u = vec![0.0; m];
        u[0] = gamma;
        u[m - 1] = a;
        s.z = s.thomas_real(&u);
        s
    }

    fn diag(&self, i: usize) -> f64 {
        if i == 0 {
            self.b - self.gamma
        } else if i == self.m - 1 {
            self.b - self.a * self.a / self.gamma
        } else {
            self.b
        }
    }

    fn thomas_real(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut c = vec![0.0; m];
        let mut x = rhs.to_vec();
        c[0] = self.a / self.diag(0);
        x[0] /= self.diag(0);
        for i in 1..m {
            let denom = self.diag(i) - self.a * c[i - 1];
            c[i] = self.a / denom;
            x[i] = (x[i] - self.a * x[i - 1]) / denom;
        }
        for i in (0..m - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let m = self.m;
        if m == 2 {
            // [[b, 2a], [2a, b]] for the periodic two-point stencil
            let det = self.b * self.b - 4.0 * self.a * self.a;
            let (r0, r1) = (rhs[0], rhs[1]);
            rhs[0] = (r0 * self.b - r1 * (2.0 * self.a)) / det;
            rhs[1] = (r1 * self.b - r0 * (2.0 * self.a)) / det;
            return;
        }
        let mut c = vec![0.0; m];
        c[0] = self.a / self.diag(0);
        rhs[0] /= self.diag(0);
        for i in 1..m {
            let denom = self.diag(i) - self.a * c[i - 1];
            c[i] = self.a / denom;
            let prev = rhs[i - 1];
            rhs[i] = (rhs[i] - prev * self.a) / denom;
        }
        for i in (0..m - 1).rev() {
            let nxt = rhs[i + 1];
            rhs[i] -= nxt * c[i];
        }
        // Sherman–Morrison with v = (1, 0, …, 0, a/γ)
        let v_last = self.a / self.gamma;
        let vy = rhs[0] + rhs[m - 1] * v_last;
        let vz = self.z[0] + self.z[m - 1] * v_last;
        let factor = vy / (1.0 + vz);
        for i in 0..m {
            rhs[i] -= factor * self.z[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;

    #[test]
    fn cyclic_solver_inverts_circulant() {
        let m = 9;
        let (a, b) = (-0.7, 2.6);
        let s = CyclicTridiagonal::new(m, a, b);
        let rhs: Vec<Complex64> = (0..m).map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i * i) as f64 * 0.1)).collect();
        let mut x = rhs.clone();
        s.solve(&mut x);
        for i in 0..m {
            let lhs = x[(i + m - 1) % m] * a + x[i] * b + x[(i + 1) % m] * a;
            assert!((lhs - rhs[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_at_time_zero_and_errors() {
        let g = PhaseGrid::new(1, 16, 4.0).unwrap();
        let f = PhaseField::from_fn(g, |z| Complex64::new((-z[0] * z[0] - z[1] * z[1]).exp(), 0.0)).unwrap();
        assert_eq!(fd_solve(&f, 0.0, 3).unwrap(), f);
        assert!(fd_solve(&f, 1.0, 0).is_err());
        assert!(matches!(fd_solve(&f, 1.0, 1), Err(Error::Cfl { .. })));
        let g2 = PhaseGrid::new(2, 4, 1.0).unwrap();
        assert!(matches!(fd_solve(&PhaseField::zeros(g2), 1.0, 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn x_independent_data_matches_heat_kernel_to_first_order() {
        let g = PhaseGrid::new(1, 16, 12.0).unwrap();
        let f = PhaseField::from_fn(g, |z| Complex64::new((-z[1] * z[1] / 2.0).exp(), 0.0)).unwrap();
        let t = 0.5;
        // spatial error O(h²) on a fine v-grid is far below the temporal error
        let fine = PhaseGrid::new(1, 512, 12.0).unwrap();
        let ff = PhaseField::from_fn(fine, |z| Complex64::new((-z[1] * z[1] / 2.0).exp(), 0.0)).unwrap();
        let exact = PhaseField::from_fn(fine, |z| {
            let w = 1.0 + 2.0 * t;
            Complex64::new((1.0f64 / w).sqrt() * (-z[1] * z[1] / (2.0 * w)).exp(), 0.0)
        })
        .unwrap();
        let e1 = fd_solve(&ff, t, 128).unwrap().relative_error(&exact).unwrap();
        let e2 = fd_solve(&ff, t, 256).unwrap().relative_error(&exact).unwrap();
        let ratio = e1 / e2;
        assert!((ratio - 2.0).abs() <= 0.4, "ratio {ratio}");
        let _ = f;
    }
}
