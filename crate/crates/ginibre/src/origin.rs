//! Origin-scaling-limit counting statistics: means, radial densities, the
//! number variances of all three ensembles, the GinOE real/complex/covariance
//! split, asymptotic slopes and the universal bulk/edge profiles.
//!
//! Everything is a function of the rescaled radius `R = sqrt(N) a`. The GinOE
//! variance pieces are one- and two-fold integrals; their integrands carry
//! `e^{2y^2} erfc(sqrt(2) y)`-type products that are fused into `erfcx` so the
//! exponents stay nonpositive, and the square-root edges `sqrt(R^2 - y^2)` are
//! removed by the angular substitution `y = R sin(theta)`.

use crate::error::{Error, Result};
use crate::finite_n::{EnsembleKind, FiniteMeanResult, MeanBreakdown};
use crate::quad::{integrate_1d, integrate_2d, QuadSpec};
use crate::specfun::{
    bessel_i_scaled, bessel_j, erf, erfc_scaled, hyp1f2, reg_gamma_p, reg_gamma_q, struve_h,
    SeriesPolicy,
};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const PI: f64 = std::f64::consts::PI;

fn check_nonneg(r: f64, what: &str) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("{what} must be >= 0, got {r}")));
    }
    Ok(())
}

/// Limiting mean number of eigenvalues in the disc of radius R at the origin.
pub fn mean_origin(kind: EnsembleKind, r: f64) -> Result<FiniteMeanResult> {
    check_nonneg(r, "R")?;
    let value = match kind {
        EnsembleKind::GinUE => FiniteMeanResult {
            value: r * r,
            breakdown: None,
        },
        EnsembleKind::GinSE => FiniteMeanResult {
            value: r * r - 0.25 + 0.25 * (-4.0 * r * r).exp(),
            breakdown: None,
        },
        EnsembleKind::GinOE => {
            let real = (2.0 / PI).sqrt() * r;
            let complex = r * r - real + 0.5 - 0.5 * erfc_scaled(SQRT_2 * r);
            FiniteMeanResult {
                value: real + complex,
                breakdown: Some(MeanBreakdown {
                    real_part: real,
                    complex_part: complex,
                }),
            }
        }
    };
    Ok(value)
}

/// Limiting radial density at the origin (for GinOE: the complex-eigenvalue
/// radial density; the real density is the constant 1/sqrt(2 pi) on the line).
pub fn radial_density_origin(kind: EnsembleKind, r: f64) -> Result<f64> {
    check_nonneg(r, "r")?;
    Ok(match kind {
        EnsembleKind::GinUE => 1.0,
        EnsembleKind::GinSE => 1.0 - (-4.0 * r * r).exp(),
        EnsembleKind::GinOE => 1.0 - erfc_scaled(SQRT_2 * r),
    })
}

/// GinUE origin variance, closed form `R^2 e^{-2R^2} (I_0 + I_1)(2R^2)`.
pub fn var_origin_ginue(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    let x = 2.0 * r * r;
    Ok(r * r * (bessel_i_scaled(0, x) + bessel_i_scaled(1, x)))
}

// Truncated sum over P(j, x) Q(j, x) with the given index map; terms die once
// the crossover j ~ x has passed and P underflows. Both factors are evaluated
// through their native branch so the small one keeps relative accuracy.
fn pq_series(x: f64, index: impl Fn(usize) -> f64) -> Result<f64> {
    let cap = 10 * (x.ceil() as usize + 1) + 200;
    let mut sum = 0.0;
    for k in 0..cap {
        let j = index(k);
        let p = reg_gamma_p(j, x)?;
        let q = reg_gamma_q(j, x)?;
        sum += p * q;
        if j > x && p < 1e-18 {
            break;
        }
    }
    Ok(sum)
}

/// GinUE origin variance as the series `sum_{j>=1} P(j, R^2) Q(j, R^2)`;
/// checked second path next to [`var_origin_ginue`].
pub fn var_origin_ginue_series(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    pq_series(r * r, |k| (k + 1) as f64)
}

/// GinUE origin variance in integral form,
/// `(R/pi) int_0^{4R^2} sqrt(1 - x/(4R^2)) x^{-1/2} e^{-x} dx`.
///
/// The endpoint singularities are removed by `x = 4 R^2 sin^2(theta)`.
pub fn var_origin_ginue_integral(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let c = 4.0 * r * r;
    let f = |theta: f64| {
        let s = theta.sin();
        let x = c * s * s;
        2.0 * theta.cos().powi(2) * (-x).exp()
    };
    let spec = QuadSpec::default();
    let (v, _) = integrate_1d(f, 0.0, std::f64::consts::FRAC_PI_2, &spec)?;
    Ok(r / PI * c * v / (2.0 * r))
}

/// GinSE origin variance, closed form
/// `R^2 e^{-4R^2} (I_0 + I_1 - 1F2(1/2; 1, 3/2; -4R^4))(4R^2)`.
pub fn var_origin_ginse(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    let x = 4.0 * r * r;
    let f12 = hyp1f2(0.5, 1.0, 1.5, -x * x / 4.0, SeriesPolicy::default())?;
    Ok(r * r * (bessel_i_scaled(0, x) + bessel_i_scaled(1, x) - (-x).exp() * f12))
}

/// GinSE origin variance as the series `sum_{k>=1} P(2k, 2R^2) Q(2k, 2R^2)`.
pub fn var_origin_ginse_series(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    pq_series(2.0 * r * r, |k| (2 * k + 2) as f64)
}

/// GinSE origin variance through the Struve/Bessel-J mix (third route).
pub fn var_origin_ginse_struve(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    let x = 4.0 * r * r;
    let i_part = bessel_i_scaled(0, x) + bessel_i_scaled(1, x);
    let j_part = bessel_j(0, x) * struve_h(-1, x) / (2.0 / PI)
        + bessel_j(1, x) * struve_h(0, x) / (2.0 / PI);
    Ok(r * r * (i_part - (-x).exp() * j_part))
}

/// GinOE origin variance of the real-eigenvalue count, closed form.
pub fn var_origin_ginoe_real(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    let e = erf(SQRT_2 * r);
    Ok(2.0 * (2.0 / PI).sqrt() * r - 2.0 / PI.sqrt() * r * erf(2.0 * r) - 0.5 * e
        + 0.25 * e * e
        + (1.0 - (-4.0 * r * r).exp()) / PI)
}

/// GinOE origin covariance between the complex and real counts.
///
/// `(2/pi) int_0^R erfc(sqrt2 v) v e^{v^2} [bracket(a-hat, R)] dv` with
/// `a-hat = sqrt(R^2 - v^2)`, evaluated after `v = R sin(theta)` and with
/// `erfc(sqrt2 v) e^{v^2}` fused into `erfcx(sqrt2 v) e^{-v^2}`.
pub fn cov_origin_ginoe(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let f = |theta: f64| {
        let v = r * theta.sin();
        let ahat = r * theta.cos();
        let m = ahat - r;
        let p = ahat + r;
        let bracket = (-m * m).exp() - (-p * p).exp()
            + PI.sqrt() * (m * erf(m) - p * erf(p));
        erfc_scaled(SQRT_2 * v) * (-v * v).exp() * v * bracket * r * theta.cos()
    };
    let spec = QuadSpec::default();
    let (v, _) = integrate_1d(f, 0.0, std::f64::consts::FRAC_PI_2, &spec)?;
    Ok(2.0 / PI * v)
}

/// The four stabilized integrand factors shared by the I_{+-,k} integrals.
///
/// `erfc(sqrt2 y1) erfc(sqrt2 y2) e^{(y1 s y2)^2}` becomes
/// `erfcx(sqrt2 y1) erfcx(sqrt2 y2) e^{-(y1 -s y2)^2}`, which is <= 1.
fn stabilized_prefactor(y1: f64, y2: f64, sign: f64) -> f64 {
    let d = y1 - sign * y2;
    erfc_scaled(SQRT_2 * y1) * erfc_scaled(SQRT_2 * y2) * (-d * d).exp()
}

/// The eight double integrals `I_{+-,1..4}` of the GinOE complex variance.
#[derive(Debug, Clone, Copy)]
pub struct GinoeIParts {
    pub minus: [f64; 4],
    pub plus: [f64; 4],
}

impl GinoeIParts {
    pub fn i_minus(&self) -> f64 {
        self.minus.iter().sum()
    }
    pub fn i_plus(&self) -> f64 {
        self.plus.iter().sum()
    }
}

fn ipm_part(r: f64, sign: f64, k: usize, spec: &QuadSpec) -> Result<f64> {
    let f = move |t1: f64, t2: f64| {
        let (y1, a) = (r * t1.sin(), r * t1.cos());
        let (y2, b) = (r * t2.sin(), r * t2.cos());
        let s = y1 + sign * y2;
        let pre = stabilized_prefactor(y1, y2, sign);
        let jac = r * r * t1.cos() * t2.cos();
        let core = match k {
            1 => {
                let ab = a + b;
                (-ab * ab).exp() * (1.0 + s * s) / (2.0 * PI)
            }
            2 => {
                let ab = a - b;
                -(-ab * ab).exp() * (1.0 + s * s) / (2.0 * PI)
            }
            3 => {
                let ab = a + b;
                ab * erf(ab) * (1.0 + 2.0 * s * s) / (4.0 * PI.sqrt())
            }
            4 => {
                let ab = a - b;
                -ab * erf(ab) * (1.0 + 2.0 * s * s) / (4.0 * PI.sqrt())
            }
            _ => unreachable!(),
        };
        pre * core * jac
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (v, _) = integrate_2d(f, ((0.0, half_pi), (0.0, half_pi)), spec)?;
    Ok(v)
}

/// Evaluate all eight `I_{+-,k}(R)` integrals.
pub fn ginoe_i_parts(r: f64) -> Result<GinoeIParts> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(GinoeIParts {
            minus: [0.0; 4],
            plus: [0.0; 4],
        });
    }
    let spec = QuadSpec {
        abs_tol: 1e-11,
        rel_tol: 1e-9,
        max_subdiv: 1 << 16,
    };
    // The integrals are independent; evaluate them concurrently.
    let jobs: Vec<(f64, usize)> = [(-1.0, 1), (-1.0, 2), (-1.0, 3), (-1.0, 4), (1.0, 1), (1.0, 2), (1.0, 3), (1.0, 4)]
        .into_iter()
        .collect();
    let results: Vec<Result<f64>> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(sign, k)| ipm_part(r, sign, k, &spec))
            .collect()
    };
    let mut minus = [0.0; 4];
    let mut plus = [0.0; 4];
    for ((sign, k), res) in jobs.into_iter().zip(results) {
        let v = res?;
        if sign < 0.0 {
            minus[k - 1] = v;
        } else {
            plus[k - 1] = v;
        }
    }
    Ok(GinoeIParts { minus, plus })
}

/// GinOE origin variance of the complex-eigenvalue count,
/// `2 E_C(R) + 4 (I_-(R) - I_+(R))`.
pub fn var_origin_ginoe_complex(r: f64) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let parts = ginoe_i_parts(r)?;
    let e_c = mean_origin(EnsembleKind::GinOE, r)?
        .breakdown
        .expect("GinOE mean carries a breakdown")
        .complex_part;
    Ok(2.0 * e_c + 4.0 * (parts.i_minus() - parts.i_plus()))
}

/// The GinOE origin variance split into its real, complex and covariance
/// contributions.
#[derive(Debug, Clone, Copy)]
pub struct VarianceBreakdown {
    pub var_real: f64,
    pub var_complex: f64,
    pub covariance: f64,
    pub total: f64,
}

impl VarianceBreakdown {
    fn assemble(var_real: f64, var_complex: f64, covariance: f64) -> Self {
        Self {
            var_real,
            var_complex,
            covariance,
            total: var_real + 2.0 * covariance + var_complex,
        }
    }
}

/// Full GinOE origin variance with breakdown.
pub fn var_origin_ginoe(r: f64) -> Result<VarianceBreakdown> {
    check_nonneg(r, "R")?;
    Ok(VarianceBreakdown::assemble(
        var_origin_ginoe_real(r)?,
        var_origin_ginoe_complex(r)?,
        cov_origin_ginoe(r)?,
    ))
}

/// Origin variance of any ensemble, as a breakdown (GinUE/GinSE have no real
/// channel; their total sits in the complex slot).
pub fn var_origin(kind: EnsembleKind, r: f64) -> Result<VarianceBreakdown> {
    match kind {
        EnsembleKind::GinUE => Ok(VarianceBreakdown::assemble(0.0, var_origin_ginue(r)?, 0.0)),
        EnsembleKind::GinSE => Ok(VarianceBreakdown::assemble(0.0, var_origin_ginse(r)?, 0.0)),
        EnsembleKind::GinOE => var_origin_ginoe(r),
    }
}

/// The constant `c(beta)` of the universal bulk law
/// `Var N(D_R) ~ (R/sqrt(pi)) * 2 / c(beta)`.
pub fn universal_slope(kind: EnsembleKind) -> f64 {
    match kind {
        EnsembleKind::GinOE => 1.0,
        EnsembleKind::GinUE => 2.0,
        EnsembleKind::GinSE => 2.0 * SQRT_2,
    }
}

/// Edge profile `f(S) = sqrt(2 pi) int_{-inf}^S erfc(t) erfc(-t) / 4 dt`.
///
/// The integrand is < 1e-18 below t ~ -6.5, so the lower limit is cut there.
pub fn edge_profile_f(s: f64) -> Result<f64> {
    let lo = s.min(-6.5) - 3.0;
    let f = |t: f64| crate::specfun::erfc(t) * crate::specfun::erfc(-t) / 4.0;
    let spec = QuadSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_subdiv: 1 << 16,
    };
    let (v, _) = integrate_1d(f, lo, s, &spec)?;
    Ok((2.0 * PI).sqrt() * v)
}

/// Which kernel-oracle integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelOracle {
    /// Recomputes `Var N_R(D_R)` from the real-real Pfaffian kernel entries.
    RealReal,
    /// Recomputes the connected complex contribution `4 (I_- - I_+)` from the
    /// complex kernel, with the x-integrals done numerically.
    ComplexConnected,
}

/// Direct quadrature of the limiting GinOE kernel entries; an oracle that is
/// independent of the closed forms above.
///
/// The real kernel is translation invariant, so the double integral over
/// `(-R, R)^2` collapses to one dimension with the chord-overlap weight
/// `2R - |u|`; the complex x-integrals use the analogous overlap
/// `L(u) = min(2a, 2b, a + b - |u|)` and are integrated numerically rather
/// than through the erf antiderivative the closed path uses.
pub fn ginoe_origin_kernel_oracle(r: f64, which: KernelOracle) -> Result<f64> {
    check_nonneg(r, "R")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    match which {
        KernelOracle::RealReal => {
            // S(u) = e^{-u^2/2}/sqrt(2 pi), D(u) = -u S(u),
            // I~(u) = -erf(u/sqrt2)/2 + sgn(u)/2; Var = E_R - int (S^2 + I~ D) (2R - |u|) du.
            let f = |u: f64| {
                let s = (-0.5 * u * u).exp() / (2.0 * PI).sqrt();
                let d = -u * s;
                let itilde = -0.5 * erf(u / SQRT_2) + 0.5 * u.signum();
                (s * s + itilde * d) * (2.0 * r - u.abs())
            };
            let spec = QuadSpec {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_subdiv: 1 << 16,
            };
            let (neg, _) = integrate_1d(f, -2.0 * r, 0.0, &spec)?;
            let (pos, _) = integrate_1d(f, 0.0, 2.0 * r, &spec)?;
            let e_r = (2.0 / PI).sqrt() * r;
            Ok(e_r - (neg + pos))
        }
        KernelOracle::ComplexConnected => {
            let inner_spec = QuadSpec {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_subdiv: 1 << 12,
            };
            // Gaussian overlap moments M0 = int e^{-u^2} L(u) du and
            // M2 = int e^{-u^2} u^2 L(u) du, with kinks at |u| = |a - b| split out.
            let moments = move |a: f64, b: f64| -> Result<(f64, f64)> {
                let l = move |u: f64| (2.0 * a).min(2.0 * b).min(a + b - u.abs()).max(0.0);
                let kink = (a - b).abs();
                let hi = a + b;
                let mut m0 = 0.0;
                let mut m2 = 0.0;
                for (lo, up) in [(0.0, kink), (kink, hi)] {
                    if up > lo {
                        let (v0, _) = integrate_1d(|u| (-u * u).exp() * l(u), lo, up, &inner_spec)?;
                        let (v2, _) =
                            integrate_1d(|u| (-u * u).exp() * u * u * l(u), lo, up, &inner_spec)?;
                        m0 += 2.0 * v0; // integrand even in u
                        m2 += 2.0 * v2;
                    }
                }
                Ok((m0, m2))
            };
            let f = move |t1: f64, t2: f64| {
                let (y1, a) = (r * t1.sin(), r * t1.cos());
                let (y2, b) = (r * t2.sin(), r * t2.cos());
                let (m0, m2) = moments(a, b).expect("inner overlap quadrature converges");
                let sm = y1 - y2;
                let sp = y1 + y2;
                let ex = erfc_scaled(SQRT_2 * y1) * erfc_scaled(SQRT_2 * y2);
                let val = ex
                    * ((-sp * sp).exp() * (m2 + sm * sm * m0)
                        - (-sm * sm).exp() * (m2 + sp * sp * m0));
                val * r * r * t1.cos() * t2.cos()
            };
            let spec = QuadSpec {
                abs_tol: 1e-10,
                rel_tol: 1e-8,
                max_subdiv: 1 << 14,
            };
            let half_pi = std::f64::consts::FRAC_PI_2;
            let (v, _) = integrate_2d(f, ((0.0, half_pi), (0.0, half_pi)), &spec)?;
            Ok(2.0 / PI * v)
        }
    }
}

/// Cross-ensemble identity
/// `sum_k P(2k+1, 2R^2) Q(2k+1, 2R^2) = R^2 e^{-4R^2} (I_0 + I_1 + 1F2)(4R^2)`.
/// Returns (lhs, rhs) for the verification suite.
pub fn induced_ginse_identity(r: f64) -> Result<(f64, f64)> {
    check_nonneg(r, "R")?;
    let lhs = pq_series(2.0 * r * r, |k| (2 * k + 1) as f64)?;
    let x = 4.0 * r * r;
    let f12 = hyp1f2(0.5, 1.0, 1.5, -x * x / 4.0, SeriesPolicy::default())?;
    let rhs = r * r * (bessel_i_scaled(0, x) + bessel_i_scaled(1, x) + (-x).exp() * f12);
    Ok((lhs, rhs))
}
