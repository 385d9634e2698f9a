//! Explicit immersions, conformal factor, Jacobi coefficients and neck
//! parameters for the Fraser-Sargent family.

mod coefficients;
mod frame;
mod jacobi;

pub use coefficients::CoefficientSet;
pub(crate) use frame::scaled_hyperbolics;
pub use frame::{frame, Frame};
pub use jacobi::{jacobi_apply, GridSpec, SectionGrid};

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::roots::increasing_root;

/// Coprime pair `k > l > 0`; also stands for the rational `p = k/l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SurfacePair {
    k: u32,
    l: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SurfacePair {
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if l == 0 || k <= l {
            return Err(domain(format!("need k > l > 0, got ({k},{l})")));
        }
        if gcd(k, l) != 1 {
            return Err(domain(format!("({k},{l}) is not a coprime pair")));
        }
        Ok(Self { k, l })
    }

    /// Pair for the rational `p = num/den`, reduced to lowest terms.
    pub fn from_ratio(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(domain("zero denominator"));
        }
        let g = gcd(num, den);
        Self::new(num / g.max(1), den / g.max(1))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn p(&self) -> f64 {
        f64::from(self.k) / f64::from(self.l)
    }

    pub fn k_is_even(&self) -> bool {
        self.k.is_multiple_of(2)
    }

    /// Real `(k, l)` used by the formulas: the pair itself, or `(p, 1)`.
    pub(crate) fn shape(&self, param: Parametrization) -> (f64, f64) {
        match param {
            Parametrization::IntegerPair => (f64::from(self.k), f64::from(self.l)),
            Parametrization::Rational => (self.p(), 1.0),
        }
    }
}

impl std::fmt::Display for SurfacePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    /// `u_{k,l}(t, θ)` with θ of period 2π.
    IntegerPair,
    /// `u_p(t, θ) = u_{k,l}(t/l, θ/l)`, θ of period 2πl.
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceKind {
    #[serde(rename = "FS")]
    Fs,
    #[serde(rename = "FS-cover")]
    FsCover,
    #[serde(rename = "EFS")]
    Efs,
    #[serde(rename = "IFS")]
    Ifs,
    #[serde(rename = "IFS-cover")]
    IfsCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeckData {
    pub pair: SurfacePair,
    pub parametrization: Parametrization,
    /// Neck parameter.
    #[serde(rename = "T")]
    pub t: f64,
    pub r: f64,
    pub rho_t: f64,
}

impl NeckData {
    /// Residual of `k tanh(kT) - l coth(lT)` in the active parametrization.
    pub fn residual(&self) -> f64 {
        let (k, l) = self.pair.shape(self.parametrization);
        k * (k * self.t).tanh() - l / (l * self.t).tanh()
    }
}

/// Positive root of `k tanh(kt) = l coth(lt)` for real `k > l > 0`.
pub(crate) fn neck_root(k: f64, l: f64) -> f64 {
    let g = |t: f64| {
        let (tk, tl) = ((k * t).tanh(), (l * t).tanh());
        let v = k * tk - l / tl;
        let sk = 1.0 - tk * tk;
        let dv = k * k * sk + l * l * (1.0 - tl * tl) / (tl * tl);
        (v, dv)
    };
    let lo = 1e-6;
    let mut hi = 10.0;
    while g(hi).0 <= 0.0 {
        hi *= 2.0;
    }
    increasing_root(g, lo, hi)
}

/// Solves the neck equation for the integer pair `(k, l)`.
pub fn solve_neck(k: u32, l: u32, tol: f64) -> Result<NeckData> {
    solve_neck_in(SurfacePair::new(k, l)?, Parametrization::IntegerPair, tol)
}

pub fn solve_neck_in(pair: SurfacePair, param: Parametrization, tol: f64) -> Result<NeckData> {
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let (k, l) = pair.shape(param);
    let t = neck_root(k, l);
    let r = (k * k * (l * t).sinh().powi(2) + l * l * (k * t).cosh().powi(2)).sqrt();
    let neck = NeckData {
        pair,
        parametrization: param,
        t,
        r,
        rho_t: 0.0,
    };
    let rho_t = CoefficientSet::new(&neck).rho(t);
    let neck = NeckData { rho_t, ..neck };
    // derivative scale of the defining function at the root
    let scale = k * k + l * l / (l * t).tanh().powi(2);
    if neck.residual().abs() > tol * scale {
        return Err(Error::Consistency(format!(
            "neck residual {} above tolerance for {pair}",
            neck.residual()
        )));
    }
    Ok(neck)
}

/// Positive root of `t tanh t = 1`.
pub fn solve_t_infinity(tol: f64) -> f64 {
    let t = increasing_root(
        |t| {
            let th = t.tanh();
            (t * th - 1.0, th + t * (1.0 - th * th))
        },
        1e-6,
        10.0,
    );
    debug_assert!((t * t.tanh() - 1.0).abs() <= tol.max(1e-15));
    t
}

/// The immersion `u(t, θ)` into R^4.
pub fn immersion(neck: &NeckData, t: f64, theta: f64) -> [f64; 4] {
    let (k, l) = neck.pair.shape(neck.parametrization);
    let (a, b) = (k * (l * t).sinh() / neck.r, l * (k * t).cosh() / neck.r);
    [
        a * (l * theta).cos(),
        a * (l * theta).sin(),
        b * (k * theta).cos(),
        b * (k * theta).sin(),
    ]
}

/// Total curvature of the surfaces attached to `pair`.
pub fn total_curvature(pair: SurfacePair, kind: SurfaceKind) -> f64 {
    let k = f64::from(pair.k());
    match kind {
        SurfaceKind::FsCover => -4.0 * PI * k,
        SurfaceKind::Fs if pair.k_is_even() => -2.0 * PI * k,
        SurfaceKind::Fs => -4.0 * PI * k,
        SurfaceKind::Efs => -2.0 * PI * k,
        SurfaceKind::Ifs | SurfaceKind::IfsCover => 0.0,
    }
}

/// `ln cosh x` without overflow.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `1/cosh x` without overflow.
pub(crate) fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}
