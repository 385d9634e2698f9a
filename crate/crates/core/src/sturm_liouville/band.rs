//! Symmetric banded matrices and unpivoted LDLᵀ.

/// Symmetric band matrix with half-bandwidth `bw`, lower triangle stored
/// row-wise: entry `(i, i-d)` at `data[i*(bw+1) + d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.bw {
            0.0
        } else {
            self.data[i * (self.bw + 1) + d]
        }
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        assert!(d <= self.bw, "entry ({i},{j}) outside band");
        self.data[i * (self.bw + 1) + d] += v;
    }

    /// Zeroes row and column `i` and puts `diag` on the diagonal.
    pub fn decouple(&mut self, i: usize, diag: f64) {
        for d in 1..=self.bw {
            if i >= d {
                self.data[i * (self.bw + 1) + d] = 0.0;
            }
            let r = i + d;
            if r < self.n {
                self.data[r * (self.bw + 1) + d] = 0.0;
            }
        }
        self.data[i * (self.bw + 1)] = diag;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            y[i] += self.data[i * (self.bw + 1)] * x[i];
            for d in 1..=self.bw.min(i) {
                let v = self.data[i * (self.bw + 1) + d];
                y[i] += v * x[i - d];
                y[i - d] += v * x[i];
            }
        }
        y
    }
}

/// `L D Lᵀ` factors of `A - σ diag(m)`.
#[derive(Debug, Clone)]
pub struct Ldl {
    n: usize,
    bw: usize,
    /// `l[i*bw + (d-1)] = L(i, i-d)`
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldl {
    /// Factors without pivoting. Exact zero pivots are nudged to the
    /// smallest positive normal, so an eigenvalue at the shift counts as
    /// not-below it.
    pub fn factor(a: &BandMatrix, mass: &[f64], sigma: f64) -> Self {
        let (n, bw) = (a.n, a.bw);
        let mut l = vec![0.0; n * bw];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                let mut s = a.data[i * (bw + 1) + (i - j)];
                for q in lo.max(j.saturating_sub(bw))..j {
                    s -= l[i * bw + (i - q - 1)] * l[j * bw + (j - q - 1)] * d[q];
                }
                l[i * bw + (i - j - 1)] = s / d[j];
            }
            let mut s = a.data[i * (bw + 1)] - sigma * mass[i];
            for q in lo..i {
                let lv = l[i * bw + (i - q - 1)];
                s -= lv * lv * d[q];
            }
            d[i] = if s == 0.0 { f64::MIN_POSITIVE } else { s };
        }
        Self { n, bw, l, d }
    }

    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut x = b.to_vec();
        for i in 0..n {
            for q in i.saturating_sub(bw)..i {
                x[i] -= self.l[i * bw + (i - q - 1)] * x[q];
            }
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            for r in i + 1..(i + bw + 1).min(n) {
                x[i] -= self.l[r * bw + (r - i - 1)] * x[r];
            }
        }
        x
    }
}

/// Number of negative pivots of `A - σ diag(m)`, i.e. the number of
/// generalized eigenvalues below σ when `m > 0` (Sylvester inertia).
pub fn count_below(a: &BandMatrix, mass: &[f64], sigma: f64) -> usize {
    Ldl::factor(a, mass, sigma).negative_pivots()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_band(n: usize, bw: usize, vals: &[f64]) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, bw);
        let mut it = vals.iter().cycle();
        for i in 0..n {
            a.add(i, i, 4.0 * (bw as f64 + 1.0) + it.next().unwrap());
            for d in 1..=bw.min(i) {
                a.add(i, i - d, *it.next().unwrap());
            }
        }
        a
    }

    proptest! {
        #[test]
        fn ldl_solves(vals in proptest::collection::vec(-1.0f64..1.0, 30), n in 3usize..40, bw in 1usize..4) {
            let a = random_band(n, bw, &vals);
            let mass = vec![1.0; n];
            let f = Ldl::factor(&a, &mass, 0.0);
            let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let x = f.solve(&b);
            let r = a.mul_vec(&x);
            for i in 0..n {
                prop_assert!((r[i] - b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inertia_of_laplacian() {
        // 1-D Dirichlet Laplacian, eigenvalues 2 - 2cos(jπ/(n+1))
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let mass = vec![1.0; n];
        for j in 1..=n {
            let lam = 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_eq!(count_below(&a, &mass, lam - 1e-9), j - 1);
            assert_eq!(count_below(&a, &mass, lam + 1e-9), j);
        }
    }

    #[test]
    fn decouple_clears_row() {
        let mut a = random_band(6, 2, &[0.3, -0.2, 0.5]);
        a.decouple(3, 1.0);
        for j in 0..6 {
            if j != 3 {
                assert_eq!(a.get(3, j), 0.0);
                assert_eq!(a.get(j, 3), 0.0);
            }
        }
        assert_eq!(a.get(3, 3), 1.0);
    }
}
