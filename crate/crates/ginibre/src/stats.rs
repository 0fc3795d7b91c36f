//! Streaming, mergeable moment accumulation for counting variables, with
//! k-statistics (unbiased cumulant estimators) up to order 4 and batch-means
//! standard errors.
//!
//! Counts are small integers, so the accumulator stores raw power sums; those
//! stay exactly representable in f64 for every campaign size this crate runs
//! (counts <= ~500, samples <= 1e7 keep all sums far below 2^53 except the
//! fourth powers, which stay below 2^57 where integer f64 addition is still
//! exact to the last bit of the count magnitudes involved). Exact integer
//! sums make `merge` associative and commutative bit-for-bit.

use crate::error::{Error, Result};
use crate::sampler::{CountScale, CountVector};

const CHANNELS: usize = 3; // total, real, complex
const ORDERS: usize = 4;
/// slots per radius: 4 power sums per channel + the real*complex cross sum
const SLOTS: usize = CHANNELS * ORDERS + 1;

/// Mergeable joint-moment store over a radius grid.
///
/// Batch assignment is keyed by the sample index, so any partition of the
/// index range across workers merges to the same state as a sequential pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    radii: Vec<f64>,
    scale: CountScale,
    n: u64,
    batch_size: u64,
    n_batches: usize,
    /// global power sums, layout [radius][slot]
    sums: Vec<f64>,
    /// per-batch sample counts
    batch_n: Vec<f64>,
    /// per-batch power sums, layout [batch][radius][slot]
    batch_sums: Vec<f64>,
}

fn slot_base(radius_idx: usize) -> usize {
    radius_idx * SLOTS
}

impl MomentAccumulator {
    /// Create an accumulator for `planned_samples` draws on the given grid.
    /// The batch size for standard errors is `ceil(sqrt(planned_samples))`.
    pub fn new(radii: &[f64], scale: CountScale, planned_samples: u64) -> Self {
        let planned = planned_samples.max(1);
        let batch_size = (planned as f64).sqrt().ceil() as u64;
        let n_batches = planned.div_ceil(batch_size) as usize;
        Self {
            radii: radii.to_vec(),
            scale,
            n: 0,
            batch_size,
            n_batches,
            sums: vec![0.0; radii.len() * SLOTS],
            batch_n: vec![0.0; n_batches],
            batch_sums: vec![0.0; n_batches * radii.len() * SLOTS],
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn scale(&self) -> CountScale {
        self.scale
    }

    pub fn len_samples(&self) -> u64 {
        self.n
    }

    fn check_grid(&self, counts: &CountVector) -> Result<()> {
        if counts.radii.len() != self.radii.len()
            || counts
                .radii
                .iter()
                .zip(&self.radii)
                .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Sequential accumulation; batches fill in arrival order.
    pub fn accumulate(&mut self, counts: &CountVector) -> Result<()> {
        self.accumulate_indexed(self.n, counts)
    }

    /// Accumulate one sample under its campaign index (drives batch
    /// assignment, making parallel merges schedule-independent).
    pub fn accumulate_indexed(&mut self, sample_index: u64, counts: &CountVector) -> Result<()> {
        self.check_grid(counts)?;
        let batch = ((sample_index / self.batch_size) as usize).min(self.n_batches - 1);
        self.n += 1;
        self.batch_n[batch] += 1.0;
        let per_radius = self.radii.len() * SLOTS;
        for ri in 0..self.radii.len() {
            let t = counts.total[ri] as f64;
            let r = counts.real[ri] as f64;
            let c = counts.complex[ri] as f64;
            let base = slot_base(ri);
            let bbase = batch * per_radius + base;
            for (ch, v) in [t, r, c].into_iter().enumerate() {
                let mut p = 1.0;
                for o in 0..ORDERS {
                    p *= v;
                    self.sums[base + ch * ORDERS + o] += p;
                    self.batch_sums[bbase + ch * ORDERS + o] += p;
                }
            }
            let rc = r * c;
            self.sums[base + SLOTS - 1] += rc;
            self.batch_sums[bbase + SLOTS - 1] += rc;
        }
        Ok(())
    }

    /// Merge another accumulator built over the same grid and plan. Exact:
    /// all state is integer-valued sums.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.radii.len() != self.radii.len()
            || other
                .radii
                .iter()
                .zip(&self.radii)
                .any(|(a, b)| a.to_bits() != b.to_bits())
            || other.batch_size != self.batch_size
            || other.n_batches != self.n_batches
            || other.scale != self.scale
        {
            return Err(Error::GridMismatch);
        }
        self.n += other.n;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.batch_n.iter_mut().zip(&other.batch_n) {
            *a += b;
        }
        for (a, b) in self.batch_sums.iter_mut().zip(&other.batch_sums) {
            *a += b;
        }
        Ok(())
    }
}

/// k-statistics of one channel with batch-means standard errors.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChannelReport {
    pub mean: f64,
    pub var: f64,
    pub k3: f64,
    pub k4: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub se_k3: f64,
    pub se_k4: f64,
}

/// Per-radius statistics report.
#[derive(Debug, Clone)]
pub struct RadiusReport {
    pub radius: f64,
    pub total: ChannelReport,
    pub real: ChannelReport,
    pub complex: ChannelReport,
    /// Unbiased sample covariance of (real, complex) counts.
    pub cov_rc: f64,
    pub se_cov_rc: f64,
}

// k-statistics from raw power sums s[0..4] (s[o] = sum of x^{o+1}) over n
// samples. k1 = mean, k2/k3 unbiased, k4 the standard k-statistic.
fn kstats(n: f64, s: &[f64; 4]) -> (f64, f64, f64, f64) {
    let mean = s[0] / n;
    let m2 = s[1] / n - mean * mean;
    let m3 = s[2] / n - 3.0 * mean * s[1] / n + 2.0 * mean.powi(3);
    let m4 = s[3] / n - 4.0 * mean * s[2] / n + 6.0 * mean * mean * s[1] / n - 3.0 * mean.powi(4);
    if n < 4.0 {
        return (mean, if n > 1.0 { n / (n - 1.0) * m2 } else { 0.0 }, 0.0, 0.0);
    }
    let k2 = n / (n - 1.0) * m2;
    let k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    (mean, k2, k3, k4)
}

fn cov_from_sums(n: f64, s_r: f64, s_c: f64, s_rc: f64) -> f64 {
    if n < 2.0 {
        return 0.0;
    }
    (s_rc / n - (s_r / n) * (s_c / n)) * n / (n - 1.0)
}

// standard error of the batch statistic series: sd(batch stats)/sqrt(B)
fn batch_se(stats: &[f64]) -> f64 {
    let b = stats.len() as f64;
    if b < 2.0 {
        return f64::NAN;
    }
    let mean = stats.iter().sum::<f64>() / b;
    let var = stats.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

impl MomentAccumulator {
    /// Compute the per-radius report. Needs at least 16 samples so the
    /// batch-means error bars are defined.
    pub fn report(&self) -> Result<Vec<RadiusReport>> {
        if self.n < 16 {
            return Err(Error::InsufficientSamples {
                need: 16,
                got: self.n as usize,
            });
        }
        let n = self.n as f64;
        let per_radius = self.radii.len() * SLOTS;
        let mut reports = Vec::with_capacity(self.radii.len());
        for ri in 0..self.radii.len() {
            let base = slot_base(ri);
            let chan = |ch: usize| -> [f64; 4] {
                [
                    self.sums[base + ch * ORDERS],
                    self.sums[base + ch * ORDERS + 1],
                    self.sums[base + ch * ORDERS + 2],
                    self.sums[base + ch * ORDERS + 3],
                ]
            };
            // per-batch statistic series for the standard errors
            let mut series: [Vec<f64>; 13] = Default::default();
            for (bi, &bn) in self.batch_n.iter().enumerate() {
                if bn < 4.0 {
                    continue;
                }
                let bbase = bi * per_radius + base;
                for ch in 0..CHANNELS {
                    let s = [
                        self.batch_sums[bbase + ch * ORDERS],
                        self.batch_sums[bbase + ch * ORDERS + 1],
                        self.batch_sums[bbase + ch * ORDERS + 2],
                        self.batch_sums[bbase + ch * ORDERS + 3],
                    ];
                    let (m, k2, k3, k4) = kstats(bn, &s);
                    series[ch * 4].push(m);
                    series[ch * 4 + 1].push(k2);
                    series[ch * 4 + 2].push(k3);
                    series[ch * 4 + 3].push(k4);
                }
                series[12].push(cov_from_sums(
                    bn,
                    self.batch_sums[bbase + ORDERS],
                    self.batch_sums[bbase + 2 * ORDERS],
                    self.batch_sums[bbase + SLOTS - 1],
                ));
            }
            let mk_channel = |ch: usize| -> ChannelReport {
                let (mean, var, k3, k4) = kstats(n, &chan(ch));
                ChannelReport {
                    mean,
                    var,
                    k3,
                    k4,
                    se_mean: batch_se(&series[ch * 4]),
                    se_var: batch_se(&series[ch * 4 + 1]),
                    se_k3: batch_se(&series[ch * 4 + 2]),
                    se_k4: batch_se(&series[ch * 4 + 3]),
                }
            };
            reports.push(RadiusReport {
                radius: self.radii[ri],
                total: mk_channel(0),
                real: mk_channel(1),
                complex: mk_channel(2),
                cov_rc: cov_from_sums(
                    n,
                    self.sums[base + ORDERS],
                    self.sums[base + 2 * ORDERS],
                    self.sums[base + SLOTS - 1],
                ),
                se_cov_rc: batch_se(&series[12]),
            });
        }
        Ok(reports)
    }

    /// Serialize to the checkpoint blob: magic, version, grid, then all sums
    /// as little-endian 64-bit floats.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(
            32 + 8 * (self.radii.len() + self.sums.len() + self.batch_n.len() + self.batch_sums.len()),
        );
        out.extend_from_slice(b"GINMOMAC");
        out.extend_from_slice(&1u32.to_le_bytes());
        out.push(match self.scale {
            CountScale::FiniteN => 0,
            CountScale::Origin => 1,
        });
        out.extend_from_slice(&(self.radii.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.batch_size.to_le_bytes());
        out.extend_from_slice(&(self.n_batches as u32).to_le_bytes());
        for &r in &self.radii {
            out.extend_from_slice(&r.to_le_bytes());
        }
        for v in self.sums.iter().chain(&self.batch_n).chain(&self.batch_sums) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Deserialize a checkpoint blob.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let take = |pos: &mut usize, len: usize| -> Result<&[u8]> {
            if *pos + len > bytes.len() {
                return Err(Error::Checkpoint("truncated blob".into()));
            }
            let s = &bytes[*pos..*pos + len];
            *pos += len;
            Ok(s)
        };
        if take(&mut pos, 8)? != b"GINMOMAC" {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
        if version != 1 {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let scale = match take(&mut pos, 1)?[0] {
            0 => CountScale::FiniteN,
            1 => CountScale::Origin,
            other => return Err(Error::Checkpoint(format!("bad scale tag {other}"))),
        };
        let n_radii = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let n = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let batch_size = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let n_batches = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        if batch_size == 0 || n_radii == 0 || n_batches == 0 {
            return Err(Error::Checkpoint("degenerate dimensions".into()));
        }
        let read_f64s = |count: usize, pos: &mut usize| -> Result<Vec<f64>> {
            let raw = take(pos, count * 8)?;
            Ok(raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        };
        let radii = read_f64s(n_radii, &mut pos)?;
        let sums = read_f64s(n_radii * SLOTS, &mut pos)?;
        let batch_n = read_f64s(n_batches, &mut pos)?;
        let batch_sums = read_f64s(n_batches * n_radii * SLOTS, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Checkpoint("trailing bytes".into()));
        }
        Ok(Self {
            radii,
            scale,
            n,
            batch_size,
            n_batches,
            sums,
            batch_n,
            batch_sums,
        })
    }
}
