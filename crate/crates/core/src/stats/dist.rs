//! Reference distributions for the test statistics.

use std::f64::consts::{PI, SQRT_2};

use super::special::{beta_reg, gamma_p, gamma_q, ln_gamma};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalMode {
    Cdf,
    Quantile,
    OneSidedP,
    TwoSidedP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudentMode {
    Cdf,
    Quantile,
    TwoSidedCv,
}

/// Dispatching form of the standard normal helpers. `OneSidedP` is the
/// right-tail probability `1 - Φ(x)`.
pub fn std_normal(x: f64, mode: NormalMode) -> Result<f64> {
    match mode {
        NormalMode::Cdf => Ok(normal_cdf(x)),
        NormalMode::Quantile => normal_quantile(x),
        NormalMode::OneSidedP => Ok(normal_sf(x)),
        NormalMode::TwoSidedP => Ok(normal_two_sided_p(x)),
    }
}

pub fn student_t(x: f64, df: u32, mode: StudentMode) -> Result<f64> {
    match mode {
        StudentMode::Cdf => student_t_cdf(x, df),
        StudentMode::Quantile => student_t_quantile(x, df),
        StudentMode::TwoSidedCv => student_t_two_sided_cv(x, df),
    }
}

/// `erfc(z)` through `Q(1/2, z^2)`.
fn erfc(z: f64) -> f64 {
    if z >= 0.0 {
        gamma_q(0.5, z * z)
    } else {
        1.0 + gamma_p(0.5, z * z)
    }
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Right tail `1 - Φ(x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    normal_cdf(-x)
}

pub fn normal_two_sided_p(x: f64) -> f64 {
    (2.0 * normal_sf(x.abs())).min(1.0)
}

pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile needs p in (0, 1), got {p}")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };
    // Halley refinement against the incomplete-gamma cdf.
    for _ in 0..2 {
        let e = if x < 0.0 {
            normal_cdf(x) - p
        } else {
            (1.0 - p) - normal_sf(x)
        };
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

fn check_df(df: u32) -> Result<f64> {
    if df == 0 {
        return Err(Error::Domain("degrees of freedom must be at least 1".into()));
    }
    Ok(f64::from(df))
}

pub fn student_t_pdf(t: f64, df: u32) -> Result<f64> {
    let nu = check_df(df)?;
    let ln = ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * (nu * PI).ln()
        - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln();
    Ok(ln.exp())
}

/// `P(T > |t|)` for `T ~ t_df`.
fn student_upper_abs(t: f64, nu: f64) -> f64 {
    0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + t * t))
}

pub fn student_t_cdf(t: f64, df: u32) -> Result<f64> {
    let nu = check_df(df)?;
    if t.is_nan() {
        return Ok(f64::NAN);
    }
    let upper = student_upper_abs(t, nu);
    Ok(if t > 0.0 { 1.0 - upper } else { upper })
}

pub fn student_t_sf(t: f64, df: u32) -> Result<f64> {
    student_t_cdf(-t, df)
}

/// Positive `c` with `P(T > c) = upper`, `upper` in `(0, 1/2]`.
fn student_upper_inverse(upper: f64, df: u32) -> Result<f64> {
    let nu = check_df(df)?;
    if upper >= 0.5 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while student_upper_abs(hi, nu) > upper {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(f64::INFINITY);
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = student_upper_abs(x, nu) - upper;
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / student_t_pdf(x, df)?;
        let mut next = x + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

pub fn student_t_quantile(p: f64, df: u32) -> Result<f64> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("t quantile needs p in (0, 1), got {p}")));
    }
    if p < 0.5 {
        Ok(-student_upper_inverse(p, df)?)
    } else {
        student_upper_inverse(1.0 - p, df)
    }
}

/// `c` such that `P(|T_df| > c) = alpha`.
pub fn student_t_two_sided_cv(alpha: f64, df: u32) -> Result<f64> {
    check_df(df)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {alpha}")));
    }
    student_upper_inverse(0.5 * alpha, df)
}

/// Chi-square survival function `P(X > x)`, `X ~ χ²_k`.
pub fn chi_square_sf(x: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("chi-square needs k >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("chi-square argument must be >= 0, got {x}")));
    }
    Ok(gamma_q(0.5 * f64::from(k), 0.5 * x))
}
