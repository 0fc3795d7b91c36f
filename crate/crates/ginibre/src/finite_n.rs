//! Exact finite-N expected counting numbers for the three Ginibre ensembles.
//!
//! Conventions follow the unit-droplet normalisation: entries have variance
//! 1/N (beta = 1), 1/(2N) per real component (beta = 2) and 1/(4N) per real
//! component of the quaternion blocks (beta = 4), so the spectral support
//! converges to the unit disc. `a` always denotes the disc radius on that
//! scale.

use crate::error::{Error, Result};
use crate::quad::{integrate_1d, QuadSpec};
use crate::specfun::{
    erf, erfc_scaled, ln_double_factorial, ln_gamma, reg_gamma_p, reg_gamma_q,
};

/// The three Ginibre ensembles, labelled by the Dyson index beta = 1, 2, 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnsembleKind {
    GinOE,
    GinUE,
    GinSE,
}

impl EnsembleKind {
    pub fn beta(self) -> u8 {
        match self {
            EnsembleKind::GinOE => 1,
            EnsembleKind::GinUE => 2,
            EnsembleKind::GinSE => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::GinOE => "ginoe",
            EnsembleKind::GinUE => "ginue",
            EnsembleKind::GinSE => "ginse",
        }
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ginoe" | "real" => Ok(EnsembleKind::GinOE),
            "ginue" | "complex" => Ok(EnsembleKind::GinUE),
            "ginse" | "symplectic" => Ok(EnsembleKind::GinSE),
            other => Err(Error::Domain(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// An expected counting number, with the real/complex split where it exists.
#[derive(Debug, Clone, Copy)]
pub struct FiniteMeanResult {
    pub value: f64,
    pub breakdown: Option<MeanBreakdown>,
}

#[derive(Debug, Clone, Copy)]
pub struct MeanBreakdown {
    pub real_part: f64,
    pub complex_part: f64,
}

impl FiniteMeanResult {
    fn total(value: f64) -> Self {
        Self {
            value,
            breakdown: None,
        }
    }
}

fn check_radius(a: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("disc radius must be >= 0, got {a}")));
    }
    Ok(())
}

/// Expected number of GinUE eigenvalues in the centred disc of radius `a`.
///
/// Evaluates the partial-sum form and the closed form
/// `N a^2 + N (1 - a^2) P(N, N a^2) - (N a^2)^N e^{-N a^2} / (N-1)!`
/// and cross-checks them against each other.
pub fn mean_disc_ginue(n: usize, a: f64) -> Result<FiniteMeanResult> {
    check_radius(a)?;
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let x = n as f64 * a * a;
    if x == 0.0 {
        return Ok(FiniteMeanResult::total(0.0));
    }
    let mut sum = 0.0;
    for k in 0..n {
        sum += reg_gamma_p(k as f64 + 1.0, x)?;
    }
    let nf = n as f64;
    let last = (nf * x.ln() - x - ln_gamma(nf)).exp();
    let closed = x + (nf - x) * reg_gamma_p(nf, x)? - last;
    let delta = (sum - closed).abs();
    if delta > 1e-10 {
        return Err(Error::CrossCheck {
            context: "GinUE finite mean: series vs closed form",
            delta,
            tol: 1e-10,
        });
    }
    Ok(FiniteMeanResult::total(sum))
}

// Tail sum e^{-x} * sum_{k<n} x^{2k+1}/(2k+1)!, accumulated in log space.
fn odd_exp_tail(n: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..n {
        let m = (2 * k + 1) as f64;
        let ln_term = m * x.ln() - x - ln_gamma(m + 1.0);
        total += ln_term.exp();
    }
    total
}

/// The three routes to the GinSE finite-N mean: the partial-sum form, the
/// reduction through the doubled-size GinUE mean, and the sinh/1F2 closed
/// form. Exposed for the verification suite.
pub fn ginse_mean_forms(n: usize, a: f64) -> Result<(f64, f64, f64)> {
    check_radius(a)?;
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let x = 2.0 * n as f64 * a * a;
    if x == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let mut sum = 0.0;
    for k in 0..n {
        sum += reg_gamma_p((2 * k + 2) as f64, x)?;
    }

    // Middle identity: (1/2) E_{2N}^{(2)}(a) - (e^{-x}/2) sum_{k<N} x^{2k+1}/(2k+1)!.
    let mut e2n = 0.0;
    for k in 0..2 * n {
        e2n += reg_gamma_p(k as f64 + 1.0, x)?;
    }
    let middle = 0.5 * e2n - 0.5 * odd_exp_tail(n, x);

    // sinh / 1F2 closed form, with the prefactor folded into the series so no
    // intermediate overflows: the tail sum_{k >= N} x^{2k+1}/(2k+1)! e^{-x}
    // equals e^{-x} (x^{2N+1}/(2N+1)!) 1F2(1; N+1, N+3/2; x^2/4).
    let nf = n as f64;
    let sinh_term = 0.5 * (1.0 - (-2.0 * x).exp()); // e^{-x} sinh x
    let mut u = ((2.0 * nf + 1.0) * x.ln() - x - ln_gamma(2.0 * nf + 2.0)).exp();
    let z = x * x / 4.0;
    let mut tail = u;
    for k in 0..100_000 {
        let kf = k as f64;
        u *= z / ((nf + 1.0 + kf) * (nf + 1.5 + kf));
        tail += u;
        if u < 1e-18 * tail.max(1e-300) {
            break;
        }
    }
    let closed = 0.5 * e2n - 0.5 * (sinh_term - tail);
    Ok((sum, middle, closed))
}

/// Expected number of GinSE eigenvalues in the centred disc of radius `a`.
///
/// Primary form: `sum_{k=0}^{N-1} P(2k+2, 2 N a^2)`. The identity through the
/// doubled-size GinUE mean and the sinh/1F2 closed form are evaluated as
/// cross-checks.
pub fn mean_disc_ginse(n: usize, a: f64) -> Result<FiniteMeanResult> {
    let (sum, middle, closed) = ginse_mean_forms(n, a)?;
    let delta_mid = (sum - middle).abs();
    if delta_mid > 1e-11 {
        return Err(Error::CrossCheck {
            context: "GinSE finite mean: partial sums vs GinUE reduction",
            delta: delta_mid,
            tol: 1e-11,
        });
    }
    let delta_closed = (sum - closed).abs();
    if delta_closed > 1e-9 {
        return Err(Error::CrossCheck {
            context: "GinSE finite mean: partial sums vs sinh/1F2 closed form",
            delta: delta_closed,
            tol: 1e-9,
        });
    }
    Ok(FiniteMeanResult::total(sum))
}

/// Expected number of complex (non-real) GinOE eigenvalues in the disc of
/// radius `a`; requires N >= 2.
pub fn mean_disc_ginoe_complex(n: usize, a: f64) -> Result<FiniteMeanResult> {
    check_radius(a)?;
    if n < 2 {
        return Err(Error::Domain("GinOE complex mean needs N >= 2".into()));
    }
    let x = n as f64 * a * a;
    if x == 0.0 {
        return Ok(FiniteMeanResult::total(0.0));
    }
    let mut sum = 0.0;
    for k in 0..n - 1 {
        sum += reg_gamma_p(k as f64 + 1.0, x)?;
    }
    let upper = (n as f64).sqrt() * a;
    let nf = n as f64;
    let f = |r: f64| {
        let q = reg_gamma_q(nf - 1.0, r * r).expect("valid incomplete gamma args");
        r * erfc_scaled(std::f64::consts::SQRT_2 * r) * q
    };
    let spec = QuadSpec::default();
    let (integral, _) = integrate_1d(f, 0.0, upper, &spec)?;
    Ok(FiniteMeanResult::total(sum - 2.0 * integral))
}

// ln of (2k-1)!!/(2k)!! done via ln_gamma: Gamma(k+1/2)/(sqrt(pi) k!).
fn ln_semifactorial_ratio(k: usize) -> f64 {
    let kf = k as f64;
    ln_gamma(kf + 0.5) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(kf + 1.0)
}

/// Expected number of real GinOE eigenvalues in the interval (-a, a);
/// requires N >= 2. Branches on the parity of N.
pub fn mean_interval_ginoe_real(n: usize, a: f64) -> Result<FiniteMeanResult> {
    check_radius(a)?;
    if n < 2 {
        return Err(Error::Domain("GinOE real mean needs N >= 2".into()));
    }
    let nf = n as f64;
    let x = nf * a * a;
    if x == 0.0 {
        return Ok(FiniteMeanResult::total(0.0));
    }

    // Common first sum (1/sqrt2) sum_{k=0}^{N-2} (2k-1)!!/(2k)!! P(k+1/2, N a^2).
    let mut first = 0.0;
    for k in 0..=n - 2 {
        let coef = ln_semifactorial_ratio(k).exp();
        first += coef * reg_gamma_p(k as f64 + 0.5, x)?;
    }
    first /= std::f64::consts::SQRT_2;

    let value = if n % 2 == 1 {
        // Odd N: + P(N/2, N a^2 / 2) - 2^{-N/2} / (N-2)!! *
        //          sum_{k=0}^{(N-3)/2} (N+2k-2)!! / (2^k (2k)!!) P(N/2 + k, N a^2).
        let mut third = 0.0;
        let ln_norm = -(nf / 2.0) * std::f64::consts::LN_2 - ln_double_factorial(n as i64 - 2)?;
        for k in 0..=(n - 3) / 2 {
            let kf = k as f64;
            let ln_coef = ln_norm + ln_double_factorial((n + 2 * k) as i64 - 2)?
                - kf * std::f64::consts::LN_2
                - ln_double_factorial(2 * k as i64)?;
            third += ln_coef.exp() * reg_gamma_p(nf / 2.0 + kf, x)?;
        }
        first + reg_gamma_p(nf / 2.0, x / 2.0)? - third
    } else {
        // Even N: + N^{N/2}/(N-2)!! int_0^a e^{-N t^2/2} t^{N-1} erf(sqrt(N/2) t) dt
        //         - 2^{-N/2}/(N-2)!! sum_{k=1}^{N/2-1} (N+2k-3)!!/(2^{k-1/2}(2k-1)!!) P((N-1)/2+k, N a^2).
        // The integrand is evaluated fully in log space; the raw factors
        // overflow/underflow separately for N beyond ~150.
        let ln_pref = (nf / 2.0) * nf.ln() - ln_double_factorial(n as i64 - 2)?;
        let integrand = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let ln_mag = ln_pref + (nf - 1.0) * t.ln() - 0.5 * nf * t * t;
            ln_mag.exp() * erf((nf / 2.0).sqrt() * t)
        };
        let spec = QuadSpec::default();
        let (integral, _) = integrate_1d(integrand, 0.0, a, &spec)?;

        let mut third = 0.0;
        let ln_norm = -(nf / 2.0) * std::f64::consts::LN_2 - ln_double_factorial(n as i64 - 2)?;
        for k in 1..=(n / 2).saturating_sub(1) {
            let kf = k as f64;
            let ln_coef = ln_norm + ln_double_factorial((n + 2 * k) as i64 - 3)?
                - (kf - 0.5) * std::f64::consts::LN_2
                - ln_double_factorial(2 * k as i64 - 1)?;
            third += ln_coef.exp() * reg_gamma_p((nf - 1.0) / 2.0 + kf, x)?;
        }
        first + integral - third
    };
    Ok(FiniteMeanResult::total(value))
}

/// Total GinOE mean and its real/complex breakdown.
pub fn mean_disc_ginoe(n: usize, a: f64) -> Result<FiniteMeanResult> {
    let real = mean_interval_ginoe_real(n, a)?.value;
    let complex = mean_disc_ginoe_complex(n, a)?.value;
    Ok(FiniteMeanResult {
        value: real + complex,
        breakdown: Some(MeanBreakdown {
            real_part: real,
            complex_part: complex,
        }),
    })
}

/// Expected number of eigenvalues in the disc of radius `a` for any ensemble.
pub fn mean_disc(kind: EnsembleKind, n: usize, a: f64) -> Result<FiniteMeanResult> {
    match kind {
        EnsembleKind::GinUE => mean_disc_ginue(n, a),
        EnsembleKind::GinSE => mean_disc_ginse(n, a),
        EnsembleKind::GinOE => mean_disc_ginoe(n, a),
    }
}

/// Expected number of eigenvalues outside the limiting support (`a = 1`),
/// together with its large-N asymptote.
pub fn deficit_outside(n: usize, kind: EnsembleKind) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Domain("deficit needs N >= 2".into()));
    }
    let nf = n as f64;
    let mean = mean_disc(kind, n, 1.0)?.value;
    let deficit = nf - mean;
    let asymptote = match kind {
        EnsembleKind::GinOE | EnsembleKind::GinUE => (nf / (2.0 * std::f64::consts::PI)).sqrt(),
        EnsembleKind::GinSE => nf.sqrt() / (2.0 * std::f64::consts::PI.sqrt()),
    };
    Ok((deficit, asymptote))
}

/// Identity between the half-integer P-sum and the incomplete-gamma pair,
/// exposed for the verification suite. Returns (lhs, rhs).
pub fn p2gamma_identity(n: usize, a: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Domain("identity needs N >= 2".into()));
    }
    let nf = n as f64;
    let x = nf * a * a;
    let mut lhs = 0.0;
    for k in 0..=n - 2 {
        lhs += ln_semifactorial_ratio(k).exp() * reg_gamma_p(k as f64 + 0.5, x)?;
    }
    lhs /= std::f64::consts::SQRT_2;
    // rhs = sqrt(2/pi) [ a sqrt(N) Gamma(N-1, Na^2) + gamma(N-1/2, Na^2) ] / (N-2)!
    // with Gamma(N-1) = (N-2)!, so the first term is just a sqrt(N) Q(N-1, x).
    let t1 = a * nf.sqrt() * reg_gamma_q(nf - 1.0, x)?;
    let t2 = (ln_gamma(nf - 0.5) - ln_gamma(nf - 1.0)).exp() * reg_gamma_p(nf - 0.5, x)?;
    let rhs = (2.0 / std::f64::consts::PI).sqrt() * (t1 + t2);
    Ok((lhs, rhs))
}
