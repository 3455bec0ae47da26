//! Seeded Monte-Carlo estimation of outage and of the conditional building
//! blocks used to check the analytic pipeline.
//!
//! Samples are split into fixed-size chunks; chunk `c` draws from the ChaCha8
//! stream `(seed, c)`. Chunks only report integer counts, so the merged
//! estimate is identical for any thread count or scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{derive_params, DerivedParams, SystemConfig};
use crate::error::{Error, Result};
use crate::estimate::{Method, OutageEstimate};

const Z_95: f64 = 1.959_963_984_540_054;
const MIN_ACCEPTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl McConfig {
    pub const DEFAULT_CHUNK: u64 = 1 << 16;

    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: Self::DEFAULT_CHUNK,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.chunk_size == 0 {
            return Err(Error::InvalidArgument(
                "Monte-Carlo samples and chunk size must be positive".into(),
            ));
        }
        Ok(())
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let n = self.samples.div_ceil(self.chunk_size) as usize;
        (0..n).into_par_iter().map(move |c| {
            let c = c as u64;
            let start = c * self.chunk_size;
            (c, self.chunk_size.min(self.samples - start))
        })
    }

    fn stream(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        rng
    }
}

/// A Bernoulli-type probability estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Unit-variance circularly symmetric complex normal as `(re, im)`.
#[inline]
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// Draw the reference gain and `out.len()` port SNRs.
#[inline]
fn fill_port_snrs<R: Rng + ?Sized>(rng: &mut R, avg_snr: f64, mu: f64, out: &mut [f64]) {
    let (w0, wm) = (mu.sqrt(), (1.0 - mu).sqrt());
    let (re0, im0) = complex_normal(rng);
    let (c_re, c_im) = (w0 * re0, w0 * im0);
    for g in out.iter_mut() {
        let (re, im) = complex_normal(rng);
        let (hr, hi) = (c_re + wm * re, c_im + wm * im);
        *g = avg_snr * (hr * hr + hi * hi);
    }
}

/// Port SNRs given the reference SNR pinned at `x0`:
/// `|sqrt(mu x0) + g / sqrt(omega)|^2` with `g` unit complex normal.
#[inline]
fn fill_conditional_snrs<R: Rng + ?Sized>(rng: &mut R, x0: f64, p: &DerivedParams, out: &mut [f64]) {
    let mean = (p.mu * x0).sqrt();
    let scale = (1.0 / p.omega).sqrt();
    for g in out.iter_mut() {
        let (re, im) = complex_normal(rng);
        let hr = mean + scale * re;
        let hi = scale * im;
        *g = hr * hr + hi * hi;
    }
}

/// One channel realization: the SNRs of all `M` ports.
pub fn sample_port_snrs<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig, p: &DerivedParams) -> Vec<f64> {
    let mut out = vec![0.0; cfg.ports];
    fill_port_snrs(rng, cfg.avg_snr, p.mu, &mut out);
    out
}

/// `n` conditionally independent port SNRs given `gamma0 = x0`.
pub fn sample_conditional_port_snrs<R: Rng + ?Sized>(rng: &mut R, x0: f64, p: &DerivedParams, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_conditional_snrs(rng, x0, p, &mut out);
    out
}

/// Sum of the `k` largest entries; reorders `snrs`.
#[inline]
fn top_k_sum_in_place(snrs: &mut [f64], k: usize) -> f64 {
    let m = snrs.len();
    if k == m {
        return snrs.iter().sum();
    }
    let (_, _, upper) = snrs.select_nth_unstable_by(m - k - 1, |a, b| a.total_cmp(b));
    upper.iter().sum()
}

/// Post-MRC SNR of the `k` strongest ports.
pub fn mrc_snr(snrs: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > snrs.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot combine {k} of {} ports",
            snrs.len()
        )));
    }
    let mut buf = snrs.to_vec();
    Ok(top_k_sum_in_place(&mut buf, k))
}

fn binomial_estimate(hits: u64, n: u64, method: Method) -> OutageEstimate {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let (lo, hi) = if hits == 0 {
        (0.0, (3.0 / nf).min(1.0))
    } else if hits == n {
        ((1.0 - 3.0 / nf).max(0.0), 1.0)
    } else {
        let hw = Z_95 * (p * (1.0 - p) / nf).sqrt();
        ((p - hw).max(0.0), (p + hw).min(1.0))
    };
    OutageEstimate {
        value: p,
        ci_low: lo,
        ci_high: hi,
        method,
        samples_or_nodes: n,
        diagnostics: Default::default(),
    }
}

/// Outage probability by simulation, with a 95% normal-approximation
/// interval (`[0, 3/N]` when no outage is observed).
pub fn estimate_outage(cfg: &SystemConfig, mc: &McConfig) -> Result<OutageEstimate> {
    cfg.validate()?;
    mc.validate()?;
    let p = derive_params(cfg)?;
    let (k, z, phi, mu) = (cfg.active, p.z, cfg.avg_snr, p.mu);
    let hits: u64 = mc
        .chunks()
        .map(|(c, n)| {
            let mut rng = mc.stream(c);
            let mut buf = vec![0.0; cfg.ports];
            let mut count = 0u64;
            for _ in 0..n {
                fill_port_snrs(&mut rng, phi, mu, &mut buf);
                if top_k_sum_in_place(&mut buf, k) <= z {
                    count += 1;
                }
            }
            count
        })
        .sum();
    Ok(binomial_estimate(hits, mc.samples, Method::Mc))
}

/// `Pr(sum of the best K <= z | gamma0 = x0)` by simulation with the
/// reference SNR pinned.
pub fn estimate_conditional_outage_mc(x0: f64, cfg: &SystemConfig, p: &DerivedParams, mc: &McConfig) -> Result<ProbabilityEstimate> {
    cfg.validate()?;
    mc.validate()?;
    let k = cfg.active;
    let hits: u64 = mc
        .chunks()
        .map(|(c, n)| {
            let mut rng = mc.stream(c);
            let mut buf = vec![0.0; cfg.ports];
            (0..n)
                .filter(|_| {
                    fill_conditional_snrs(&mut rng, x0, p, &mut buf);
                    top_k_sum_in_place(&mut buf, k) <= p.z
                })
                .count() as u64
        })
        .sum();
    Ok(bernoulli(hits, mc.samples))
}

fn bernoulli(hits: u64, n: u64) -> ProbabilityEstimate {
    let value = hits as f64 / n as f64;
    ProbabilityEstimate {
        value,
        std_error: (value * (1.0 - value) / n as f64).sqrt(),
        samples: n,
    }
}

/// Estimate of `Pr(T ports all <= v | gamma0 = x0)`.
pub fn estimate_psi_mc(v: f64, x0: f64, t: usize, p: &DerivedParams, mc: &McConfig) -> Result<ProbabilityEstimate> {
    mc.validate()?;
    p.require_nondegenerate()?;
    if t == 0 {
        return Ok(ProbabilityEstimate {
            value: 1.0,
            std_error: 0.0,
            samples: 0,
        });
    }
    let hits: u64 = mc
        .chunks()
        .map(|(c, n)| {
            let mut rng = mc.stream(c);
            let mut buf = vec![0.0; t];
            (0..n)
                .filter(|_| {
                    fill_conditional_snrs(&mut rng, x0, p, &mut buf);
                    buf.iter().all(|&g| g <= v)
                })
                .count() as u64
        })
        .sum();
    Ok(bernoulli(hits, mc.samples))
}

/// Estimate of `Pr(K ports all > v and their sum <= z | gamma0 = x0)`.
///
/// Branches are drawn by rejection from the law conditioned on `> v`. The
/// estimate is `a^K c`, with `a` the observed acceptance rate and `c` the
/// fraction of accepted K-tuples whose sum is at most `z`.
pub fn estimate_phi_mc(z: f64, v: f64, x0: f64, k: usize, p: &DerivedParams, mc: &McConfig) -> Result<ProbabilityEstimate> {
    mc.validate()?;
    p.require_nondegenerate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    if z < k as f64 * v {
        return Ok(ProbabilityEstimate {
            value: 0.0,
            std_error: 0.0,
            samples: 0,
        });
    }
    // Give up on a chunk once this many consecutive draws are rejected.
    let patience = (10.0 / MIN_ACCEPTANCE) as u64;
    let per_chunk: Vec<Result<(u64, u64)>> = mc
        .chunks()
        .map(|(c, n)| {
            let mut rng = mc.stream(c);
            let mut one = [0.0f64];
            let mut attempts = 0u64;
            let mut hits = 0u64;
            for _ in 0..n {
                let mut sum = 0.0;
                for _ in 0..k {
                    let mut misses = 0u64;
                    loop {
                        attempts += 1;
                        fill_conditional_snrs(&mut rng, x0, p, &mut one);
                        if one[0] > v {
                            break;
                        }
                        misses += 1;
                        if misses > patience {
                            return Err(Error::OracleStarvation {
                                rate: 1.0 / misses as f64,
                            });
                        }
                    }
                    sum += one[0];
                }
                if sum <= z {
                    hits += 1;
                }
            }
            Ok((attempts, hits))
        })
        .collect();
    let mut attempts = 0u64;
    let mut hits = 0u64;
    for r in per_chunk {
        let (a, h) = r?;
        attempts += a;
        hits += h;
    }
    let n = mc.samples as f64;
    let accepted = k as f64 * n;
    let rate = accepted / attempts as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(Error::OracleStarvation { rate });
    }
    let frac = hits as f64 / n;
    let value = rate.powi(k as i32) * frac;
    // delta method on ln(a^K c); negative-binomial variance for the rate
    let rel_var_rate = (1.0 - rate) / accepted;
    let std_error = if hits == 0 {
        rate.powi(k as i32) / n
    } else {
        value * ((k * k) as f64 * rel_var_rate + (1.0 - frac) / (frac * n)).sqrt()
    };
    Ok(ProbabilityEstimate {
        value,
        std_error,
        samples: mc.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::port_cdf_conditional;

    #[test]
    fn mrc_examples() {
        assert_eq!(mrc_snr(&[3.0, 1.0, 2.0], 2).unwrap(), 5.0);
        assert_eq!(mrc_snr(&[3.0, 1.0, 2.0], 3).unwrap(), 6.0);
        assert!(mrc_snr(&[3.0, 1.0], 3).is_err());
        assert!(mrc_snr(&[3.0, 1.0], 0).is_err());
    }

    #[test]
    fn mrc_matches_full_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let m = rng.random_range(1..20usize);
            let k = rng.random_range(1..=m);
            let v: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 10.0).collect();
            let mut sorted = v.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let want: f64 = sorted[..k].iter().sum();
            assert!((mrc_snr(&v, k).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fully_correlated_ports_are_equal() {
        let cfg = SystemConfig::new(6, 2, 5.0, 5.0, 10.0).unwrap();
        let p = DerivedParams::new(1.0, f64::INFINITY, 31.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = sample_port_snrs(&mut rng, &cfg, &p);
        assert!(g.iter().all(|&x| (x - g[0]).abs() <= 1e-12 * g[0]));
    }

    #[test]
    fn uncorrelated_ports_have_mean_phi() {
        let cfg = SystemConfig::new(4, 1, 5.0, 5.0, 10.0).unwrap();
        let p = DerivedParams::new(0.0, 0.1, 31.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 250_000;
        let mut total = 0.0;
        for _ in 0..n {
            total += sample_port_snrs(&mut rng, &cfg, &p).iter().sum::<f64>();
        }
        let mean = total / (4 * n) as f64;
        assert!((mean - 10.0).abs() < 0.1, "mean {mean}");
    }

    /// Two-sided KS distance between a sample and a CDF.
    fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn pinned_reference_matches_conditional_cdf() {
        let p = DerivedParams::new(0.5, 1.0, 31.0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = sample_conditional_port_snrs(&mut rng, 2.0, &p, 20_000);
        let d = ks_distance(xs, |x| port_cdf_conditional(x, 2.0, &p).unwrap());
        assert!(d < 0.015, "KS {d}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = SystemConfig::new(4, 2, 5.0, 5.0, 10.0).unwrap();
        let mc = McConfig {
            samples: 100_003,
            seed: 99,
            chunk_size: 4096,
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_outage(&cfg, &mc)).unwrap();
        let b = four.install(|| estimate_outage(&cfg, &mc)).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.value && a.value <= a.ci_high);
    }

    #[test]
    fn tiny_rate_gives_zero_outage() {
        let cfg = SystemConfig::new(3, 1, 5.0, 1e-9, 10.0).unwrap();
        let est = estimate_outage(&cfg, &McConfig::new(10_000, 1)).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.ci_low, 0.0);
        assert!((est.ci_high - 3e-4).abs() < 1e-15);
    }

    #[test]
    fn single_port_is_exponential() {
        let cfg = SystemConfig::new(1, 1, 5.0, 2.0, 4.0).unwrap();
        let est = estimate_outage(&cfg, &McConfig::new(1_000_000, 5)).unwrap();
        let exact = -(-3.0f64 / 4.0).exp_m1();
        assert!((est.value - exact).abs() < 3.0 * est.half_width(), "{} vs {exact}", est.value);
    }

    #[test]
    fn psi_trivial_cases() {
        let p = DerivedParams::new(0.25, 0.13, 31.0, 2);
        let mc = McConfig::new(10_000, 1);
        assert_eq!(estimate_psi_mc(1.0, 1.0, 0, &p, &mc).unwrap().value, 1.0);
        assert_eq!(estimate_psi_mc(0.0, 1.0, 2, &p, &mc).unwrap().value, 0.0);
        assert_eq!(estimate_phi_mc(31.0, 11.0, 1.0, 3, &p, &mc).unwrap().value, 0.0);
    }

    #[test]
    fn phi_starves_on_unreachable_threshold() {
        let p = DerivedParams::new(0.25, 10.0, 1e9, 2);
        let mc = McConfig::new(10, 1);
        assert!(matches!(
            estimate_phi_mc(1e9, 50.0, 0.0, 1, &p, &mc),
            Err(Error::OracleStarvation { .. })
        ));
    }
}
