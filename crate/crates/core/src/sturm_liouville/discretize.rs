use super::band::{BandMatrix, Ldl};
use super::{BoundaryCondition, SlProblem};
use crate::error::{domain, Error, Result};

/// Discrete pencil `(K, M)` on a uniform grid. Unknowns are interleaved by
/// node (`node*dim + component`). Dirichlet unknowns are kept but decoupled
/// (`K_ii = 1`, `M_ii = 0`), so they never contribute a negative pivot.
#[derive(Debug, Clone)]
pub struct DiscretePencil {
    pub nodes: Vec<f64>,
    pub dim: usize,
    pub h: f64,
    pub stiffness: BandMatrix,
    pub mass: Vec<f64>,
    pub fixed: Vec<bool>,
}

/// Second-order finite differences with `n` intervals. Robin ends use the
/// ghost-point elimination, halved so the stiffness stays symmetric:
/// the end row becomes `(h_0 - h_1)/h + (h/2) A h_0 ∓ c h_0 = λ (h/2) w h_0`.
pub fn assemble(problem: &SlProblem, n: usize) -> Result<DiscretePencil> {
    if n < 16 {
        return Err(domain(format!(
            "grid of {n} intervals is below the minimum of 16"
        )));
    }
    if !(problem.t1 > problem.t0) {
        return Err(domain("empty interval"));
    }
    let dim = problem.dimension.size();
    let h = (problem.t1 - problem.t0) / n as f64;
    let nodes: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                problem.t1
            } else {
                problem.t0 + h * i as f64
            }
        })
        .collect();
    let size = (n + 1) * dim;
    let mut k = BandMatrix::zeros(size, if dim == 2 { 2 } else { 1 });
    let mut mass = vec![0.0; size];
    for (i, &t) in nodes.iter().enumerate() {
        let omega = if i == 0 || i == n { 0.5 * h } else { h };
        let a = problem.potential_at(t);
        let w = problem.weight_at(t);
        if !(w > 0.0) || !w.is_finite() {
            return Err(domain(format!(
                "weight {w} at t = {t} is not positive and finite"
            )));
        }
        if dim == 2 {
            let scale = 1.0 + a[0][1].abs().max(a[1][0].abs());
            if (a[0][1] - a[1][0]).abs() > 1e-12 * scale {
                return Err(Error::Consistency(format!(
                    "potential not symmetric at t = {t}"
                )));
            }
        }
        for c in 0..dim {
            let u = i * dim + c;
            k.add(u, u, omega * a[c][c]);
            mass[u] = omega * w;
        }
        if dim == 2 {
            k.add(i * dim, i * dim + 1, omega * a[0][1]);
        }
        if i < n {
            for c in 0..dim {
                let (u, v) = (i * dim + c, (i + 1) * dim + c);
                k.add(u, u, 1.0 / h);
                k.add(v, v, 1.0 / h);
                k.add(u, v, -1.0 / h);
            }
        }
    }
    let mut fixed = vec![false; size];
    for c in 0..dim {
        for (node, bc, sign) in [(0, problem.left[c], 1.0), (n, problem.right[c], -1.0)] {
            let u = node * dim + c;
            match bc {
                BoundaryCondition::Robin { coefficient } => {
                    if !coefficient.is_finite() {
                        return Err(domain("Robin coefficient must be finite"));
                    }
                    k.add(u, u, sign * coefficient);
                }
                BoundaryCondition::Dirichlet => {
                    k.decouple(u, 1.0);
                    mass[u] = 0.0;
                    fixed[u] = true;
                }
            }
        }
    }
    Ok(DiscretePencil {
        nodes,
        dim,
        h,
        stiffness: k,
        mass,
        fixed,
    })
}

impl DiscretePencil {
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn free_unknowns(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        super::band::count_below(&self.stiffness, &self.mass, sigma)
    }

    /// Gershgorin interval of `M^{-1/2} K M^{-1/2}` over free unknowns.
    fn gershgorin(&self) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let n = self.mass.len();
        let bw = self.stiffness.bandwidth();
        for i in 0..n {
            if self.fixed[i] {
                continue;
            }
            let mi = self.mass[i];
            let mut radius = 0.0;
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                if j != i && !self.fixed[j] {
                    radius += self.stiffness.get(i, j).abs() / (mi * self.mass[j]).sqrt();
                }
            }
            let centre = self.stiffness.get(i, i) / mi;
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// Lowest `count` eigenvalues by inertia bisection, each to relative
    /// accuracy ~1e-15 or absolute `abs_tol`, whichever is looser.
    pub fn lowest(&self, count: usize, abs_tol: f64) -> Result<Vec<f64>> {
        if count > self.free_unknowns() {
            return Err(domain(format!(
                "{count} eigenvalues requested from {} unknowns",
                self.free_unknowns()
            )));
        }
        let (glo, ghi) = self.gershgorin();
        let lo = glo - 1e-12 * glo.abs() - 1e-300;
        let cap = ghi + 1e-9 * ghi.abs() + 1.0;
        let mut hi = (lo + 1.0).min(cap);
        while self.count_below(hi) < count {
            if hi >= cap {
                return Err(Error::Consistency(
                    "inertia count never reaches request".into(),
                ));
            }
            hi = (lo + 4.0 * (hi - lo)).min(cap);
        }
        let mut out = Vec::with_capacity(count);
        let mut floor = lo;
        for j in 0..count {
            let (mut a, mut b) = (floor, hi);
            for _ in 0..400 {
                let width = b - a;
                if width <= 1e-15 * a.abs().max(b.abs()) || width <= abs_tol {
                    break;
                }
                let mid = a + 0.5 * width;
                if self.count_below(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            floor = a;
            out.push(a + 0.5 * (b - a));
        }
        Ok(out)
    }

    /// Inverse iteration near `lambda`, M-orthogonalised against `previous`
    /// vectors whose eigenvalues are within `cluster` of it.
    pub fn eigenvector(&self, lambda: f64, previous: &[(f64, Vec<f64>)], cluster: f64) -> Vec<f64> {
        let shift = lambda - 1e-10 * lambda.abs().max(1e-8);
        let f = Ldl::factor(&self.stiffness, &self.mass, shift);
        let mut x: Vec<f64> = (0..self.mass.len())
            .map(|i| {
                if self.fixed[i] {
                    0.0
                } else {
                    0.5 + (1.7 * i as f64 + 0.3).sin()
                }
            })
            .collect();
        for _ in 0..4 {
            let y: Vec<f64> = x.iter().zip(&self.mass).map(|(a, m)| a * m).collect();
            x = f.solve(&y);
            for (mu, v) in previous {
                if (mu - lambda).abs() <= cluster {
                    let proj: f64 = x
                        .iter()
                        .zip(v)
                        .zip(&self.mass)
                        .map(|((a, b), m)| a * b * m)
                        .sum();
                    x.iter_mut().zip(v).for_each(|(a, b)| *a -= proj * b);
                }
            }
            let norm = self.m_norm(&x);
            x.iter_mut().for_each(|a| *a /= norm);
        }
        let pivot = x
            .iter()
            .fold(0.0f64, |acc, &v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            x.iter_mut().for_each(|a| *a = -*a);
        }
        x
    }

    pub fn m_norm(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.mass)
            .map(|(a, m)| a * a * m)
            .sum::<f64>()
            .sqrt()
    }

    /// Unknown vector to node samples.
    pub fn sample(&self, x: &[f64]) -> super::SampledVector {
        let h = (0..self.nodes.len())
            .map(|i| {
                if self.dim == 2 {
                    [x[2 * i], x[2 * i + 1]]
                } else {
                    [x[i], 0.0]
                }
            })
            .collect();
        super::SampledVector {
            t: self.nodes.clone(),
            h,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_small_grid_and_asymmetry() {
        let p = SlProblem::scalar(0.0, 1.0, |_| 0.0, |_| 1.0);
        assert!(assemble(&p, 8).is_err());
        let bad = SlProblem::vector(0.0, 1.0, |_| [[0.0, 1.0], [0.5, 0.0]], |_| 1.0);
        assert!(matches!(
            assemble(&bad, 32),
            Err(crate::Error::Consistency(_))
        ));
    }

    #[test]
    fn dirichlet_laplacian_discrete_spectrum() {
        let n = 64;
        let p = SlProblem::scalar(0.0, PI, |_| 0.0, |_| 1.0);
        let d = assemble(&p, n).unwrap();
        let h = PI / n as f64;
        let ev = d.lowest(5, 0.0).unwrap();
        for (j, lam) in ev.iter().enumerate() {
            let jj = (j + 1) as f64;
            let exact = 4.0 / (h * h) * (jj * h / 2.0).sin().powi(2);
            assert!((lam - exact).abs() < 1e-11 * exact, "{lam} vs {exact}");
        }
    }

    #[test]
    fn eigenvector_is_weight_normalised() {
        let p = SlProblem::scalar(0.0, PI, |_| 0.0, |t| 1.0 + t);
        let d = assemble(&p, 128).unwrap();
        let lam = d.lowest(1, 0.0).unwrap()[0];
        let x = d.eigenvector(lam, &[], 0.0);
        assert!((d.m_norm(&x) - 1.0).abs() < 1e-12);
        let kx = d.stiffness.mul_vec(&x);
        let rq: f64 = kx.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!((rq - lam).abs() < 1e-9 * lam);
    }
}
