use serde::Serialize;

use super::{ln_cosh, sech, NeckData};

/// Conformal factor and Jacobi-operator coefficients of one surface.
///
/// All evaluators are written in terms of `cosh((k±l)t)` so that large
/// `kt` never forms an overflowing intermediate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet {
    k: f64,
    l: f64,
    /// `ln(kl/r)`
    ln_scale: f64,
}

impl CoefficientSet {
    pub fn new(neck: &NeckData) -> Self {
        let (k, l) = neck.pair.shape(neck.parametrization);
        Self {
            k,
            l,
            ln_scale: (k * l / neck.r).ln(),
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn ln_rho2(&self, t: f64) -> f64 {
        2.0 * self.ln_scale + ln_cosh((self.k + self.l) * t) + ln_cosh((self.k - self.l) * t)
    }

    pub fn rho2(&self, t: f64) -> f64 {
        self.ln_rho2(t).exp()
    }

    pub fn rho(&self, t: f64) -> f64 {
        (0.5 * self.ln_rho2(t)).exp()
    }

    pub fn a(&self, t: f64) -> f64 {
        let (s, d) = (self.k + self.l, self.k - self.l);
        0.5 * (d * sech(d * t) + s * sech(s * t))
    }

    pub fn b(&self, t: f64) -> f64 {
        let (s, d) = (self.k + self.l, self.k - self.l);
        0.5 * (s * (s * t).tanh() - d * (d * t).tanh())
    }

    pub fn c(&self, t: f64) -> f64 {
        let (s, d) = (self.k + self.l, self.k - self.l);
        0.5 * (s * sech(s * t) - d * sech(d * t))
    }

    /// Separated potential `A(m, t)`.
    pub fn potential(&self, m: f64, t: f64) -> [[f64; 2]; 2] {
        let (a, b, c) = (self.a(t), self.b(t), self.c(t));
        let off = -2.0 * m * b;
        [
            [b * b + m * m - 2.0 * a * a, off],
            [off, b * b + m * m - 2.0 * c * c],
        ]
    }

    /// Upper bound for `sup |b|` over `[t0, ∞)` from a dense scan; `b`
    /// tends to `l` and is smooth, so the scan is taken to `t0 + 20/(k-l)`.
    pub fn sup_abs_b(&self, t0: f64) -> f64 {
        let span = 20.0 / (self.k - self.l);
        let n = 20_000;
        (0..=n)
            .map(|i| self.b(t0 + span * f64::from(i) / f64::from(n)).abs())
            .fold(self.l, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn set(k: u32, l: u32, param: Parametrization) -> (NeckData, CoefficientSet) {
        let n = solve_neck_in(SurfacePair::new(k, l).unwrap(), param, 1e-12).unwrap();
        (n, CoefficientSet::new(&n))
    }

    #[test]
    fn symmetries_and_ordering() {
        let (_, c) = set(7, 3, Parametrization::IntegerPair);
        assert_eq!(c.b(0.0), 0.0);
        for i in 0..=1000 {
            let t = -5.0 + 0.01 * f64::from(i);
            assert!((c.a(t) - c.a(-t)).abs() < 1e-12);
            assert!((c.c(t) - c.c(-t)).abs() < 1e-12);
            assert!((c.b(t) + c.b(-t)).abs() < 1e-12);
            assert!(c.a(t) > c.c(t));
            assert!(c.rho(t) > 0.0);
        }
    }

    #[test]
    fn rho_at_neck() {
        let (n, c) = set(7, 3, Parametrization::IntegerPair);
        let lhs = 3.0 / (3.0 * n.t).tanh();
        assert!((c.rho(n.t) - lhs).abs() < 1e-12);
        assert!((c.rho(n.t) - 5.999046639736435).abs() < 1e-12);
    }

    #[test]
    fn rational_two_cosh_identity() {
        for (k, l) in [(2, 1), (3, 2), (7, 3), (10, 1)] {
            let (_, c) = set(k, l, Parametrization::Rational);
            let p = f64::from(k) / f64::from(l);
            for i in 0..200 {
                let t = 0.05 * f64::from(i);
                let two =
                    0.5 * ((p - 1.0) / ((p - 1.0) * t).cosh() + (p + 1.0) / ((p + 1.0) * t).cosh());
                assert!((c.a(t) - two).abs() < 1e-12);
                // ratio form with sinh/cosh products
                let ratio = (p * t.cosh() * (p * t).cosh() - t.sinh() * (p * t).sinh())
                    / (t.sinh().powi(2) + (p * t).cosh().powi(2));
                assert!((c.a(t) - ratio).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_overflow_far_out() {
        let (_, c) = set(20, 1, Parametrization::IntegerPair);
        for t in [40.0, -40.0, 300.0] {
            assert!(c.a(t).is_finite() && c.b(t).is_finite() && c.c(t).is_finite());
            assert!(c.ln_rho2(t).is_finite());
            assert!((c.b(t).abs() - 1.0).abs() < 1e-12);
        }
    }

    // Coefficients rebuilt from the frame and second derivatives of the
    // immersion, without the closed forms.
    #[test]
    fn frame_based_oracle() {
        let (n, c) = set(7, 3, Parametrization::IntegerPair);
        let (t, th) = (0.5, 0.7);
        let hstep = 1e-4;
        let u = |t: f64, th: f64| immersion(&n, t, th);
        let d2 = |f: &dyn Fn(f64, f64) -> [f64; 4], dt: f64, dth: f64| -> [f64; 4] {
            // second derivative along (dt, dth) direction pairs
            let mut out = [0.0; 4];
            let pp = f(t + dt + 0.0, th + dth);
            let mm = f(t - dt, th - dth);
            let z = f(t, th);
            for i in 0..4 {
                out[i] = (pp[i] - 2.0 * z[i] + mm[i]) / (hstep * hstep);
            }
            out
        };
        let u_thth = d2(&u, 0.0, hstep);
        let fr = frame(&n, t, th);
        let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let rho2 = c.rho2(t);
        // b11 = u_θθ/ρ²; B(n1,n1) and B(n2,n2) give a² and c²
        let b11n1 = dot(&u_thth, &fr.n1) / rho2;
        let b11n2 = dot(&u_thth, &fr.n2) / rho2;
        // mixed derivative
        let up = |s: f64| u(t + hstep, th + s);
        let um = |s: f64| u(t - hstep, th + s);
        let mut u_tth = [0.0; 4];
        for i in 0..4 {
            u_tth[i] = (up(hstep)[i] - up(-hstep)[i] - um(hstep)[i] + um(-hstep)[i])
                / (4.0 * hstep * hstep);
        }
        let b12n1 = dot(&u_tth, &fr.n1) / rho2;
        let b12n2 = dot(&u_tth, &fr.n2) / rho2;
        let a2 = rho2 * (b11n1 * b11n1 + b12n1 * b12n1);
        let c2 = rho2 * (b11n2 * b11n2 + b12n2 * b12n2);
        assert!(
            (a2 - c.a(t).powi(2)).abs() < 1e-5,
            "{a2} {}",
            c.a(t).powi(2)
        );
        assert!(
            (c2 - c.c(t).powi(2)).abs() < 1e-5,
            "{c2} {}",
            c.c(t).powi(2)
        );
        // normal connection: <∂θ n1, n2> = -b
        let f1 = frame(&n, t, th + 1e-6).n1;
        let f0 = frame(&n, t, th - 1e-6).n1;
        let dn1: Vec<f64> = (0..4).map(|i| (f1[i] - f0[i]) / 2e-6).collect();
        let conn: f64 = dn1.iter().zip(fr.n2.iter()).map(|(x, y)| x * y).sum();
        assert!((conn + c.b(t)).abs() < 1e-7);
        // |u_t| = ρ
        let ut: Vec<f64> = (0..4)
            .map(|i| (u(t + 1e-6, th)[i] - u(t - 1e-6, th)[i]) / 2e-6)
            .collect();
        let norm = ut.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - c.rho(t)).abs() < 1e-7);
    }
}
