//! Matrix samplers for the three Ginibre ensembles, eigenvalue
//! classification, disc counting, the Bernoulli-product fast sampler for the
//! radially symmetric beta in {2, 4} ensembles, and seeded campaigns.
//!
//! Entry scales follow the unit-droplet convention (see [`crate::finite_n`]):
//! GinOE entries are N(0, 1/N), GinUE real/imaginary parts N(0, 1/(2N)), and
//! each real component of a GinSE quaternion block is N(0, 1/(4N)). Campaigns
//! are reproducible under any parallel schedule: sample `s` draws from a
//! counter-based stream keyed by `(seed, s)` and the accumulator update is
//! exact integer arithmetic, so the merged result is schedule-independent.

use crate::error::{Error, Result};
use crate::finite_n::EnsembleKind;
use crate::planar::{builtin_potential, moment_table, BuiltinPotential, RadialPotential};
use crate::stats::MomentAccumulator;
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

pub type C64 = Complex<f64>;

/// Eigenvalues of one matrix draw, split into the real ones and one
/// representative per complex pair (GinUE keeps all N eigenvalues in
/// `uppers`, lower-half ones included with their sign).
#[derive(Debug, Clone)]
pub struct EigenSample {
    pub reals: Vec<f64>,
    pub uppers: Vec<C64>,
    pub n: usize,
    pub kind: EnsembleKind,
}

/// Counting scale: compare |lambda| against `a` directly, or against
/// `R / sqrt(N)` in the origin scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountScale {
    FiniteN,
    Origin,
}

impl CountScale {
    pub fn label(self) -> &'static str {
        match self {
            CountScale::FiniteN => "finite_N",
            CountScale::Origin => "origin",
        }
    }
}

/// Per-sample counts on a sorted radius grid.
#[derive(Debug, Clone)]
pub struct CountVector {
    pub radii: Vec<f64>,
    pub total: Vec<u32>,
    pub real: Vec<u32>,
    pub complex: Vec<u32>,
}

impl CountVector {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

fn check_radii_sorted(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Domain("radius grid is empty".into()));
    }
    if radii.windows(2).any(|w| w[0] > w[1]) || radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::Domain("radii must be sorted and nonnegative".into()));
    }
    Ok(())
}

fn draw_normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let g: f64 = StandardNormal.sample(rng);
    g * sd
}

fn ginoe_matrix<R: Rng + ?Sized>(n: usize, sd: f64, rng: &mut R) -> DMatrix<f64> {
    // from_fn visits column-major; any fixed order works, the stream is ours.
    DMatrix::from_fn(n, n, |_, _| draw_normal(rng, sd))
}

// Real Schur form: walk the quasi-triangular diagonal; 1x1 blocks are real
// eigenvalues, standardized 2x2 blocks hold a conjugate pair. This makes the
// real/complex split structurally exact.
fn eigs_from_real_schur(t: &DMatrix<f64>) -> (Vec<f64>, Vec<C64>) {
    let n = t.nrows();
    let mut reals = Vec::new();
    let mut uppers = Vec::new();
    let mut i = 0;
    while i < n {
        let sub = if i + 1 < n { t[(i + 1, i)] } else { 0.0 };
        if sub == 0.0 {
            reals.push(t[(i, i)]);
            i += 1;
        } else {
            let (p, q) = (t[(i, i)], t[(i, i + 1)]);
            let (r, s) = (t[(i + 1, i)], t[(i + 1, i + 1)]);
            let mean = 0.5 * (p + s);
            let disc = 0.25 * (p - s) * (p - s) + q * r;
            if disc < 0.0 {
                uppers.push(C64::new(mean, (-disc).sqrt()));
            } else {
                // Unsplit real pair; converged standardized blocks should not
                // produce this, but handle it rather than misclassify.
                let d = disc.sqrt();
                reals.push(mean + d);
                reals.push(mean - d);
            }
            i += 2;
        }
    }
    (reals, uppers)
}

fn complex_eigenvalues(m: DMatrix<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::Eigensolver(format!("complex Schur failed to converge (n={n})")))?;
    let t = schur.unpack().1;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Split a complex eigenvalue list into reals and upper-half representatives,
/// enforcing conjugate pairing. Used for GinOE when no structural Schur split
/// is available, and by constructed-input tests.
pub fn classify_real(eigs: &[C64]) -> Result<(Vec<f64>, Vec<C64>)> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &z in eigs {
        if z.im.abs() < 1e-8 * z.norm().max(1.0) {
            reals.push(z.re);
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::Pairing(format!(
            "{} upper-half vs {} lower-half eigenvalues",
            upper.len(),
            lower.len()
        )));
    }
    let key = |z: &C64| (z.re, z.im.abs());
    upper.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    lower.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    for (u, l) in upper.iter().zip(&lower) {
        let mismatch = (u - l.conj()).norm();
        if mismatch > 1e-6 * u.norm().max(1.0) {
            return Err(Error::Pairing(format!(
                "conjugate mismatch {mismatch:.3e} between {u} and {l}"
            )));
        }
    }
    Ok((reals, upper))
}

/// Draw one matrix from the ensemble and extract its classified eigenvalues.
pub fn sample_matrix<R: Rng + ?Sized>(kind: EnsembleKind, n: usize, rng: &mut R) -> Result<EigenSample> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    match kind {
        EnsembleKind::GinOE => {
            let sd = (1.0 / n as f64).sqrt();
            let m = ginoe_matrix(n, sd, rng);
            let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100 * n.max(10))
                .ok_or_else(|| Error::Eigensolver(format!("real Schur failed to converge (n={n})")))?;
            let t = schur.unpack().1;
            let (reals, uppers) = eigs_from_real_schur(&t);
            debug_assert_eq!(reals.len() + 2 * uppers.len(), n);
            debug_assert_eq!(reals.len() % 2, n % 2);
            Ok(EigenSample {
                reals,
                uppers,
                n,
                kind,
            })
        }
        EnsembleKind::GinUE => {
            let sd = (1.0 / (2.0 * n as f64)).sqrt();
            let m = DMatrix::from_fn(n, n, |_, _| {
                C64::new(draw_normal(rng, sd), draw_normal(rng, sd))
            });
            let eigs = complex_eigenvalues(m)?;
            Ok(EigenSample {
                reals: Vec::new(),
                uppers: eigs,
                n,
                kind,
            })
        }
        EnsembleKind::GinSE => {
            // Redraw on near-real eigenvalues (probability-zero set; a draw is
            // rejected when the solver cannot resolve the pair split).
            for _attempt in 0..32 {
                let m = ginse_matrix(n, rng);
                let eigs = complex_eigenvalues(m)?;
                if eigs.iter().any(|z| z.im.abs() < 1e-12) {
                    continue;
                }
                let (reals, uppers) = classify_real(&eigs)?;
                if !reals.is_empty() || uppers.len() != n {
                    return Err(Error::Pairing(format!(
                        "GinSE sample with {} reals / {} pairs",
                        reals.len(),
                        uppers.len()
                    )));
                }
                return Ok(EigenSample {
                    reals,
                    uppers,
                    n,
                    kind,
                });
            }
            Err(Error::Eigensolver(
                "GinSE redraw limit hit (eigenvalues kept landing on the real axis)".into(),
            ))
        }
    }
}

// 2N x 2N complex representation of an N x N quaternion matrix: each entry is
// the block [[alpha, beta], [-conj(beta), conj(alpha)]].
fn ginse_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let sd = (1.0 / (4.0 * n as f64)).sqrt();
    let mut m = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let alpha = C64::new(draw_normal(rng, sd), draw_normal(rng, sd));
            let beta = C64::new(draw_normal(rng, sd), draw_normal(rng, sd));
            m[(2 * j, 2 * k)] = alpha;
            m[(2 * j, 2 * k + 1)] = beta;
            m[(2 * j + 1, 2 * k)] = -beta.conj();
            m[(2 * j + 1, 2 * k + 1)] = alpha.conj();
        }
    }
    m
}

/// Count eigenvalues in the centred discs of the given sorted radii.
///
/// GinOE counts complex eigenvalues with multiplicity two (both halves of the
/// pair sit in the disc) and real ones on the interval (-a, a); GinSE counts
/// the N upper-half representatives; GinUE counts everything.
pub fn count_in_discs(sample: &EigenSample, radii: &[f64], scale: CountScale) -> Result<CountVector> {
    check_radii_sorted(radii)?;
    let factor = match scale {
        CountScale::FiniteN => 1.0,
        CountScale::Origin => 1.0 / (sample.n as f64).sqrt(),
    };
    let mut total = Vec::with_capacity(radii.len());
    let mut real = Vec::with_capacity(radii.len());
    let mut complex = Vec::with_capacity(radii.len());
    for &r in radii {
        let cut = r * factor;
        let n_real = sample.reals.iter().filter(|x| x.abs() <= cut).count() as u32;
        let n_pairs = sample.uppers.iter().filter(|z| z.norm() <= cut).count() as u32;
        let (n_complex, n_total) = match sample.kind {
            EnsembleKind::GinOE => (2 * n_pairs, n_real + 2 * n_pairs),
            EnsembleKind::GinUE | EnsembleKind::GinSE => (n_pairs, n_real + n_pairs),
        };
        total.push(n_total);
        real.push(n_real);
        complex.push(n_complex);
    }
    Ok(CountVector {
        radii: radii.to_vec(),
        total,
        real,
        complex,
    })
}

/// Precomputed Bernoulli success probabilities `L_j(a)` for a radius grid.
///
/// One uniform per index `j` drives every radius, which preserves the
/// monotonicity of counts in the radius while keeping each marginal exact.
#[derive(Debug, Clone)]
pub struct BernoulliCounter {
    /// `probs[j][ri] = L_j(a_ri)`, nondecreasing in `ri`.
    probs: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub n: usize,
}

impl BernoulliCounter {
    pub fn build(
        pot: &RadialPotential,
        n: usize,
        beta: u8,
        radii: &[f64],
        scale: CountScale,
        scale_n: usize,
    ) -> Result<Self> {
        check_radii_sorted(radii)?;
        let factor = match scale {
            CountScale::FiniteN => 1.0,
            CountScale::Origin => 1.0 / (scale_n as f64).sqrt(),
        };
        let tables: Vec<_> = radii
            .iter()
            .map(|&r| moment_table(pot, n, beta, r * factor))
            .collect::<Result<Vec<_>>>()?;
        let mut probs = vec![vec![0.0f64; radii.len()]; n];
        for (ri, t) in tables.iter().enumerate() {
            for (row, &l) in probs.iter_mut().zip(&t.l) {
                row[ri] = l;
            }
        }
        Ok(Self {
            probs,
            radii: radii.to_vec(),
            n,
        })
    }

    /// Draw one joint count vector (counts are nondecreasing in the radius).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CountVector {
        let nr = self.radii.len();
        let mut total = vec![0u32; nr];
        for row in &self.probs {
            let u: f64 = rng.random();
            // L is nondecreasing in the radius: find the first radius that
            // captures this Bernoulli and count it for all larger ones.
            if u < row[nr - 1] {
                for (ri, &p) in row.iter().enumerate() {
                    if u < p {
                        for t in &mut total[ri..] {
                            *t += 1;
                        }
                        break;
                    }
                }
            }
        }
        CountVector {
            radii: self.radii.clone(),
            real: vec![0; nr],
            complex: total.clone(),
            total,
        }
    }
}

/// One-shot Bernoulli-product count at a single radius.
pub fn sample_counts_bernoulli<R: Rng + ?Sized>(
    pot: &RadialPotential,
    n: usize,
    beta: u8,
    a: f64,
    rng: &mut R,
) -> Result<u32> {
    let table = moment_table(pot, n, beta, a)?;
    let mut count = 0u32;
    for &l in &table.l {
        let u: f64 = rng.random();
        if u < l {
            count += 1;
        }
    }
    Ok(count)
}

/// Campaign configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub kind: EnsembleKind,
    pub n: usize,
    pub radii: Vec<f64>,
    pub scale: CountScale,
    pub samples: u64,
    pub seed: u64,
    pub fast_bernoulli: bool,
    /// Potential for the fast path; defaults to the ensemble's Gaussian.
    pub potential: Option<RadialPotential>,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Domain("samples must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Domain("N must be >= 1".into()));
        }
        check_radii_sorted(&self.radii)?;
        if self.fast_bernoulli && self.kind == EnsembleKind::GinOE {
            return Err(Error::Domain(
                "the Bernoulli fast path needs radial symmetry; GinOE is not supported".into(),
            ));
        }
        Ok(())
    }
}

/// Campaign result: the accumulator plus bookkeeping counters.
#[derive(Debug)]
pub struct CampaignOutcome {
    pub acc: MomentAccumulator,
    pub failed_samples: u64,
    pub redraws: u64,
}

fn sample_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index.wrapping_add(1));
    rng
}

/// Run a seeded counting campaign. Deterministic for a fixed seed: per-sample
/// RNG streams plus exact integer accumulation make the outcome independent
/// of the worker schedule.
pub fn run_campaign(cfg: &SimConfig) -> Result<CampaignOutcome> {
    cfg.validate()?;
    let counter = if cfg.fast_bernoulli {
        let default_pot = match cfg.kind {
            EnsembleKind::GinUE => builtin_potential(BuiltinPotential::GinueGaussian)?,
            EnsembleKind::GinSE => builtin_potential(BuiltinPotential::GinseGaussian)?,
            EnsembleKind::GinOE => unreachable!("validated above"),
        };
        let pot = cfg.potential.clone().unwrap_or(default_pot);
        let beta = cfg.kind.beta();
        Some(BernoulliCounter::build(
            &pot, cfg.n, beta, &cfg.radii, cfg.scale, cfg.n,
        )?)
    } else {
        None
    };

    let make_acc = || MomentAccumulator::new(&cfg.radii, cfg.scale, cfg.samples);

    struct Partial {
        acc: MomentAccumulator,
        failed: u64,
        redraws: u64,
    }

    let chunk: u64 = 256;
    let n_chunks = cfg.samples.div_ceil(chunk);
    let partial = (0..n_chunks)
        .into_par_iter()
        .try_fold(
            || Partial {
                acc: make_acc(),
                failed: 0,
                redraws: 0,
            },
            |mut part, c| -> Result<Partial> {
                let lo = c * chunk;
                let hi = ((c + 1) * chunk).min(cfg.samples);
                for s in lo..hi {
                    let mut rng = sample_rng(cfg.seed, s);
                    if let Some(counter) = &counter {
                        let counts = counter.draw(&mut rng);
                        part.acc.accumulate_indexed(s, &counts)?;
                        continue;
                    }
                    // Matrix path; one retry per sample on solver failure.
                    let mut ok = false;
                    for attempt in 0..2 {
                        if attempt > 0 {
                            part.redraws += 1;
                        }
                        match sample_matrix(cfg.kind, cfg.n, &mut rng) {
                            Ok(sample) => {
                                let counts = count_in_discs(&sample, &cfg.radii, cfg.scale)?;
                                part.acc.accumulate_indexed(s, &counts)?;
                                ok = true;
                                break;
                            }
                            Err(Error::Eigensolver(_)) | Err(Error::Pairing(_)) => continue,
                            Err(e) => return Err(e),
                        }
                    }
                    if !ok {
                        part.failed += 1;
                    }
                }
                Ok(part)
            },
        )
        .try_reduce(
            || Partial {
                acc: make_acc(),
                failed: 0,
                redraws: 0,
            },
            |mut a, b| {
                a.acc.merge(&b.acc)?;
                a.failed += b.failed;
                a.redraws += b.redraws;
                Ok(a)
            },
        )?;

    if partial.failed * 1000 > cfg.samples {
        return Err(Error::CampaignFailures {
            failed: partial.failed as usize,
            total: cfg.samples as usize,
        });
    }
    Ok(CampaignOutcome {
        acc: partial.acc,
        failed_samples: partial.failed,
        redraws: partial.redraws,
    })
}
