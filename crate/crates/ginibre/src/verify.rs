//! The cross-validation suite: every closed form in the crate is pinned
//! against an independent route (series, integral representation, finite
//! differences, or kernel quadrature). The CLI `verify` command runs this and
//! reports one residual per named identity.

use crate::error::Result;
use crate::finite_n::{ginse_mean_forms, p2gamma_identity};
use crate::origin::{
    cov_origin_ginoe, ginoe_i_parts, ginoe_origin_kernel_oracle, induced_ginse_identity,
    mean_origin, radial_density_origin, var_origin_ginoe_real, var_origin_ginse,
    var_origin_ginse_series, var_origin_ginse_struve, var_origin_ginue_integral,
    var_origin_ginue_series, KernelOracle,
};
use crate::planar::{builtin_potential, cumulant_bulk_limit, cumulant_finite, mgf, moment_table, BuiltinPotential};
use crate::specfun::{bessel_i_scaled, erfc, polylog_negorder, reg_gamma_p, reg_gamma_q};
use crate::EnsembleKind;

/// Test hook: offsets added to selected kernels inside the suite, so a fault
/// demonstrably trips the right identity. All zero in normal operation.
#[derive(Debug, Clone, Copy, Default)]
pub struct FaultInjection {
    /// Added to `e^{-x} I_1(x)` in the GinUE closed-form variance.
    pub i1_offset: f64,
}

/// Outcome of one identity check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
            passed: residual.abs() <= tolerance && residual.is_finite(),
        }
    }
}

fn sup_on_grid(points: impl Iterator<Item = f64>, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        worst = worst.max(f(x)?.abs());
    }
    Ok(worst)
}

fn r_grid() -> impl Iterator<Item = f64> {
    (1..=100).map(|i| 0.1 * i as f64)
}

/// Run the full identity suite. Returns one result per named identity.
pub fn run_identity_suite(inject: FaultInjection) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    // (1) GinUE origin variance: series vs closed form, sup over R in {0.1..10}.
    let closed_ue = |r: f64| {
        let x = 2.0 * r * r;
        r * r * (bessel_i_scaled(0, x) + bessel_i_scaled(1, x) + inject.i1_offset)
    };
    let res = sup_on_grid(r_grid(), |r| Ok(var_origin_ginue_series(r)? - closed_ue(r)))?;
    out.push(CheckResult::new("ginue_var_series_vs_closed", res, 1e-10));

    // (2,3) GinSE variance routes pairwise.
    let res = sup_on_grid(r_grid(), |r| {
        Ok(var_origin_ginse_series(r)? - var_origin_ginse(r)?)
    })?;
    out.push(CheckResult::new("ginse_var_series_vs_closed", res, 1e-9));
    let res = sup_on_grid(r_grid(), |r| {
        Ok(var_origin_ginse_struve(r)? - var_origin_ginse(r)?)
    })?;
    out.push(CheckResult::new("ginse_var_struve_vs_closed", res, 1e-9));

    // (4) Shirai integral form vs closed form.
    let res = sup_on_grid([0.5, 1.0, 3.0].into_iter(), |r| {
        Ok(var_origin_ginue_integral(r)? - closed_ue(r))
    })?;
    out.push(CheckResult::new("ginue_var_integral_vs_closed", res, 1e-9));

    // (5) Half-integer P-sum vs incomplete-gamma pair at (6, 0.8).
    let (lhs, rhs) = p2gamma_identity(6, 0.8)?;
    out.push(CheckResult::new("p2gamma_identity", lhs - rhs, 1e-11));

    // (6) GinSE finite-N mean: partial sums vs the GinUE reduction at (5, 0.7).
    let (series, middle, closed) = ginse_mean_forms(5, 0.7)?;
    out.push(CheckResult::new("ginse_mean_middle_identity", series - middle, 1e-12));
    out.push(CheckResult::new("ginse_mean_sinh_closed_form", series - closed, 1e-9));

    // (7) Cross-ensemble odd-index identity.
    let res = sup_on_grid([0.5, 1.0, 2.0].into_iter(), |r| {
        let (l, rr) = induced_ginse_identity(r)?;
        Ok(l - rr)
    })?;
    out.push(CheckResult::new("induced_ginse_pq_identity", res, 1e-9));

    // (8,9) c(R) derivative and ODE identities by central differences.
    let c = |r: f64| r * r * (bessel_i_scaled(0, 2.0 * r * r) + bessel_i_scaled(1, 2.0 * r * r));
    let cp = |r: f64| 2.0 * r * bessel_i_scaled(0, 2.0 * r * r);
    let h = 1e-5;
    let res = sup_on_grid([0.5, 1.0, 3.0].into_iter(), |r| {
        Ok((c(r + h) - c(r - h)) / (2.0 * h) - cp(r))
    })?;
    out.push(CheckResult::new("c_derivative_identity", res, 1e-6));
    let res = sup_on_grid([0.5, 2.0].into_iter(), |r| {
        let cpp = (cp(r + h) - cp(r - h)) / (2.0 * h);
        Ok(c(r) - (cpp / 8.0 + (r - 1.0 / (8.0 * r)) * cp(r)))
    })?;
    out.push(CheckResult::new("c_ode_identity", res, 1e-5));

    // (10,11,12) special-function ground rules.
    let res = sup_on_grid([0.0, 0.3, 1.0, 2.7, 5.0].into_iter(), |x| {
        Ok(erfc(x) + erfc(-x) - 2.0)
    })?;
    out.push(CheckResult::new("erfc_reflection", res, 1e-15));
    let mut worst = 0.0f64;
    for &s in &[0.5, 2.5, 40.5] {
        for &x in &[0.0, 1.0, 5.0, 80.0] {
            worst = worst.max((reg_gamma_p(s, x)? + reg_gamma_q(s, x)? - 1.0).abs());
        }
    }
    out.push(CheckResult::new("gamma_pq_complement", worst, 1e-15));
    let mut worst = 0.0f64;
    for m in 1..=6u32 {
        for &x in &[-10.0, -2.0, -0.5] {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let d = polylog_negorder(m, x)? - sign * polylog_negorder(m, 1.0 / x)?;
            worst = worst.max(d.abs() / polylog_negorder(m, x)?.abs().max(1.0));
        }
    }
    out.push(CheckResult::new("polylog_inversion_parity", worst, 1e-12));

    // (13) GinOE origin mean: breakdown closure and derivative vs density.
    let mut worst = 0.0f64;
    for &r in &[0.5, 1.0] {
        let m = mean_origin(EnsembleKind::GinOE, r)?;
        let b = m.breakdown.expect("breakdown");
        worst = worst.max((m.value - b.real_part - b.complex_part).abs());
        let fd = (mean_origin(EnsembleKind::GinOE, r + h)?.value
            - mean_origin(EnsembleKind::GinOE, r - h)?.value)
            / (2.0 * h);
        let dens = radial_density_origin(EnsembleKind::GinOE, r)?
            + (2.0 / std::f64::consts::PI).sqrt() / (2.0 * r);
        worst = worst.max((fd - 2.0 * r * dens).abs());
    }
    out.push(CheckResult::new("ginoe_mean_breakdown_and_density", worst, 1e-6));

    // (14) MGF log-derivatives vs the first two cumulants.
    let pot = builtin_potential(BuiltinPotential::GinseGaussian)?;
    let table = moment_table(&pot, 8, 4, 0.5)?;
    let f = |u: f64| mgf(&table, u).ln();
    let hh = 1e-4;
    let d1 = (f(hh) - f(-hh)) / (2.0 * hh);
    let d2 = (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh);
    let k1 = cumulant_finite(&table, 1)?.value;
    let k2 = cumulant_finite(&table, 2)?.value;
    out.push(CheckResult::new(
        "mgf_logderivs_vs_cumulants",
        (d1 - k1).abs().max((d2 - k2).abs()),
        1e-6,
    ));

    // (15) Universal bulk variance coefficient.
    let k2b = cumulant_bulk_limit(2)?;
    out.push(CheckResult::new(
        "bulk_kappa2_value",
        k2b - 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
        1e-8,
    ));

    // (16,17) Appendix kernel oracles against the closed GinOE pieces.
    let oracle = ginoe_origin_kernel_oracle(1.0, KernelOracle::RealReal)?;
    out.push(CheckResult::new(
        "kernel_oracle_real_vs_closed",
        oracle - var_origin_ginoe_real(1.0)?,
        1e-7,
    ));
    let oracle = ginoe_origin_kernel_oracle(1.0, KernelOracle::ComplexConnected)?;
    let parts = ginoe_i_parts(1.0)?;
    out.push(CheckResult::new(
        "kernel_oracle_complex_vs_iparts",
        oracle - 4.0 * (parts.i_minus() - parts.i_plus()),
        1e-6,
    ));

    // (18) Covariance sign on a grid.
    let mut worst = 0.0f64;
    for i in 1..=10 {
        let v = cov_origin_ginoe(0.5 * i as f64)?;
        worst = worst.max(v.max(0.0));
    }
    out.push(CheckResult::new("ginoe_covariance_nonpositive", worst, 0.0));

    Ok(out)
}
