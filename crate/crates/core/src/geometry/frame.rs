use serde::Serialize;

use super::NeckData;

/// Orthonormal frame: `e1, e2` tangent along θ and t, `n1, n2` normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frame {
    pub e1: [f64; 4],
    pub e2: [f64; 4],
    pub n1: [f64; 4],
    pub n2: [f64; 4],
}

impl Frame {
    pub fn vectors(&self) -> [[f64; 4]; 4] {
        [self.e1, self.e2, self.n1, self.n2]
    }
}

/// `sinh(kt), cosh(kt), sinh(lt), cosh(lt)` divided by
/// `sqrt(cosh((k+l)t) cosh((k-l)t))`, evaluated with the common factor
/// `e^{k|t|}` removed.
pub(crate) fn scaled_hyperbolics(k: f64, l: f64, t: f64) -> [f64; 4] {
    let s = t.abs();
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let e2k = (-2.0 * k * s).exp();
    let em = (-(k - l) * s).exp();
    let ep = (-(k + l) * s).exp();
    let norm = 0.5 * ((1.0 + ep * ep) * (1.0 + em * em)).sqrt();
    [
        sign * 0.5 * (1.0 - e2k) / norm,
        0.5 * (1.0 + e2k) / norm,
        sign * 0.5 * (em - ep) / norm,
        0.5 * (em + ep) / norm,
    ]
}

pub fn frame(neck: &NeckData, t: f64, theta: f64) -> Frame {
    let (k, l) = neck.pair.shape(neck.parametrization);
    let [shk, chk, shl, chl] = scaled_hyperbolics(k, l, t);
    let (cl, sl) = ((l * theta).cos(), (l * theta).sin());
    let (ck, sk) = ((k * theta).cos(), (k * theta).sin());
    Frame {
        e1: [-shl * sl, shl * cl, -chk * sk, chk * ck],
        e2: [chl * cl, chl * sl, shk * ck, shk * sk],
        n1: [-shk * cl, -shk * sl, chl * ck, chl * sk],
        n2: [-chk * sl, chk * cl, shl * sk, -shl * ck],
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use proptest::prelude::*;

    fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn pairs() -> impl Strategy<Value = SurfacePair> {
        (2u32..15, 1u32..14)
            .prop_filter_map("coprime ordered", |(k, l)| SurfacePair::new(k, l).ok())
    }

    proptest! {
        #[test]
        fn gram_is_identity(pair in pairs(), t in -30.0f64..30.0, th in 0.0f64..6.3) {
            let n = solve_neck_in(pair, Parametrization::IntegerPair, 1e-12).unwrap();
            let v = frame(&n, t, th).vectors();
            for i in 0..4 {
                for j in 0..4 {
                    let g = dot(&v[i], &v[j]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g - target).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn conformal_coordinates(pair in pairs(), t in -1.5f64..1.5, th in 0.0f64..6.3) {
            let n = solve_neck_in(pair, Parametrization::IntegerPair, 1e-12).unwrap();
            let c = CoefficientSet::new(&n);
            let (k, l) = (f64::from(pair.k()), f64::from(pair.l()));
            // analytic derivatives of the immersion
            let ut = [
                k * l * (l * t).cosh() * (l * th).cos() / n.r,
                k * l * (l * t).cosh() * (l * th).sin() / n.r,
                k * l * (k * t).sinh() * (k * th).cos() / n.r,
                k * l * (k * t).sinh() * (k * th).sin() / n.r,
            ];
            let uth = [
                -k * l * (l * t).sinh() * (l * th).sin() / n.r,
                k * l * (l * t).sinh() * (l * th).cos() / n.r,
                -k * l * (k * t).cosh() * (k * th).sin() / n.r,
                k * l * (k * t).cosh() * (k * th).cos() / n.r,
            ];
            let rho2 = c.rho2(t);
            prop_assert!((dot(&ut, &uth) / rho2).abs() < 1e-10);
            prop_assert!((dot(&ut, &ut) / rho2 - 1.0).abs() < 1e-10);
            prop_assert!((dot(&uth, &uth) / rho2 - 1.0).abs() < 1e-10);
            let f = frame(&n, t, th);
            for i in 0..4 {
                prop_assert!((f.e2[i] - ut[i] / rho2.sqrt()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn meets_sphere_orthogonally() {
        for (k, l) in [(2, 1), (7, 3), (5, 2)] {
            let n = solve_neck(k, l, 1e-12).unwrap();
            for th in [0.0, 1.0, 2.5] {
                for t in [n.t, -n.t] {
                    let u = immersion(&n, t, th);
                    let e2 = frame(&n, t, th).e2;
                    assert!((dot(&u, &e2).abs() - 1.0).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn finite_far_out() {
        let n = solve_neck(13, 2, 1e-12).unwrap();
        let f = frame(&n, 60.0, 0.3);
        assert!(f.vectors().iter().flatten().all(|x| x.is_finite()));
    }
}
