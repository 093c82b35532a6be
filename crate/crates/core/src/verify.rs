//! Monte Carlo and deterministic checks.
//!
//! Each test turns one probabilistic inequality into an empirical frequency
//! over independent seeds and compares it to the theoretical bound with a
//! 3-sigma allowance derived from the trial count. Trial `i` always uses
//! `SeededBits::new(seed_base + i)`, so a report is reproducible from its
//! parameters.

use std::sync::Arc;

use serde::Serialize;

use crate::bits::{BitSource, SeededBits};
use crate::brownian::{self, FourierWienerSeries, PathSample};
use crate::error::Result;
use crate::exec::Exec;
use crate::fourier::{BlockIndex, DyadicInterval, TrigSeriesConfig, BLOCK_TERM_CAP};
use crate::gaussian::{self, NormalSequence};
use crate::rademacher::{self, CoefficientSequence, RademacherSeries};

/// Seed range and execution mode for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trials {
    pub count: u64,
    pub seed_base: u64,
    pub exec: Exec,
}

impl Trials {
    pub fn new(count: u64) -> Self {
        Self {
            count,
            seed_base: 0,
            exec: Exec::default(),
        }
    }

    pub fn seed_base(mut self, base: u64) -> Self {
        self.seed_base = base;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn seed(&self, i: u64) -> u64 {
        self.seed_base.wrapping_add(i)
    }

    fn source(&self, i: u64) -> Arc<dyn BitSource> {
        Arc::new(SeededBits::new(self.seed(i)))
    }

    /// Runs `f` on every trial index, collecting in index order.
    fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        self.exec.try_map(self.count as usize, |i| f(i as u64))
    }

    fn descriptor(&self) -> SeedRange {
        SeedRange {
            base: self.seed_base,
            count: self.count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedRange {
    pub base: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// How a statistic is compared to its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// statistic ≤ bound + slack
    AtMost,
    /// statistic ≥ bound − slack
    AtLeast,
    /// |statistic − bound| ≤ slack
    Within,
    /// Pass/fail decided by the check itself; bound and slack are informational.
    Holds,
}

/// One comparison inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub statistic: f64,
    pub bound: f64,
    pub slack: f64,
    pub relation: Relation,
    pub verdict: Verdict,
}

impl Check {
    pub fn new(label: impl Into<String>, statistic: f64, bound: f64, slack: f64, relation: Relation) -> Self {
        let ok = match relation {
            Relation::AtMost => statistic <= bound + slack,
            Relation::AtLeast => statistic >= bound - slack,
            Relation::Within => (statistic - bound).abs() <= slack,
            Relation::Holds => unreachable!("use Check::holds"),
        };
        Self {
            label: label.into(),
            statistic,
            bound,
            slack,
            relation,
            verdict: Verdict::from_bool(ok),
        }
    }

    pub fn holds(label: impl Into<String>, statistic: f64, bound: f64, ok: bool) -> Self {
        Self {
            label: label.into(),
            statistic,
            bound,
            slack: 0.0,
            relation: Relation::Holds,
            verdict: Verdict::from_bool(ok),
        }
    }
}

/// Outcome of one verification test. The top-level statistic, bound and
/// slack mirror the first check; the verdict is the conjunction of all.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub name: String,
    pub trials: u64,
    pub statistic: f64,
    pub theoretical_bound: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub seeds: Option<SeedRange>,
    pub checks: Vec<Check>,
}

impl TrialReport {
    pub fn new(name: impl Into<String>, trials: Option<&Trials>, checks: Vec<Check>) -> Self {
        let first = checks.first();
        Self {
            name: name.into(),
            trials: trials.map_or(0, |t| t.count),
            statistic: first.map_or(f64::NAN, |c| c.statistic),
            theoretical_bound: first.map_or(f64::NAN, |c| c.bound),
            slack: first.map_or(0.0, |c| c.slack),
            verdict: Verdict::from_bool(checks.iter().all(|c| c.verdict.passed())),
            seeds: trials.map(Trials::descriptor),
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// 3·√(p/trials), the one-sided binomial allowance used throughout.
pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p / trials as f64).sqrt()
}

fn frequency(hits: &[bool]) -> f64 {
    hits.iter().filter(|&&h| h).count() as f64 / hits.len().max(1) as f64
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

/// Kolmogorov's maximal inequality:
/// P(max_{n≤N} |S_n| > r) < (Σ_{n≤N} u_n²)/r².
pub fn kolmogorov_inequality_test(
    u: &CoefficientSequence,
    r: f64,
    n: u64,
    trials: &Trials,
) -> Result<TrialReport> {
    let bound = u.square_sum(1, n) / (r * r);
    let hits = trials.run(|i| {
        let s = RademacherSeries::new(u.clone(), trials.source(i));
        Ok(s.max_partial_sum(n)? > r)
    })?;
    let freq = frequency(&hits);
    Ok(TrialReport::new(
        "kolmogorov",
        Some(trials),
        vec![Check::new(
            format!("P(max|S_n| > {r}), N = {n}, u = {}", u.descriptor()),
            freq,
            bound,
            three_sigma(bound, trials.count),
            Relation::AtMost,
        )],
    ))
}

/// Exact P(|Σ_{n≤m} ε_n u_n| > λ (Σ u_n²)^{1/2}) by enumerating all 2^m sign
/// patterns. Limited to m ≤ 24.
pub fn paley_zygmund_exact(u: &CoefficientSequence, lam: f64, m: u32) -> f64 {
    assert!(m <= 24, "exhaustive enumeration limited to m <= 24");
    let terms: Vec<f64> = (1..=m as u64).map(|n| u.term(n)).collect();
    let level = lam * terms.iter().map(|x| x * x).sum::<f64>().sqrt();
    let total = 1u64 << m;
    let hits = (0..total)
        .filter(|&mask| {
            let s: f64 = terms
                .iter()
                .enumerate()
                .map(|(i, &x)| if (mask >> i) & 1 == 1 { x } else { -x })
                .sum();
            s.abs() > level
        })
        .count();
    hits as f64 / total as f64
}

/// Paley–Zygmund lower bound:
/// P(|Σ_{n≤m} ε_n u_n| > λ(Σ u_n²)^{1/2}) > (1/3)(1 − λ²)².
///
/// For m ≤ 20 the Monte Carlo frequency is also compared with exhaustive
/// enumeration at 3 sigma.
pub fn paley_zygmund_test(
    u: &CoefficientSequence,
    lam: f64,
    m: u64,
    trials: &Trials,
) -> Result<TrialReport> {
    let level = lam * u.square_sum(1, m).sqrt();
    let hits = trials.run(|i| {
        let s = RademacherSeries::new(u.clone(), trials.source(i));
        Ok(s.partial_sum(m)?.abs() > level)
    })?;
    let freq = frequency(&hits);
    let bound = (1.0 - lam * lam).powi(2) / 3.0;
    let mut checks = vec![Check::new(
        format!("P(|S_{m}| > {lam}·||u||), u = {}", u.descriptor()),
        freq,
        bound,
        three_sigma(0.25, trials.count),
        Relation::AtLeast,
    )];
    if m <= 20 {
        let exact = paley_zygmund_exact(u, lam, m as u32);
        checks.push(Check::new(
            "monte carlo vs exhaustive enumeration",
            freq,
            exact,
            three_sigma(exact * (1.0 - exact), trials.count),
            Relation::Within,
        ));
    }
    Ok(TrialReport::new("paley-zygmund", Some(trials), checks))
}

/// What [`supnorm_deviation_test`] samples.
#[derive(Debug, Clone)]
pub enum SupnormTarget {
    /// Block P_k of Σ ε_n x_n cos(2πnt + φ_n) against 6F(k).
    Trig {
        amps: CoefficientSequence,
        phases: CoefficientSequence,
    },
    /// Blocks P_k and Q_k of the Fourier–Wiener series against 6·N_{k−2}^{−1}.
    FourierWiener { precision: u32 },
}

/// P(‖P_k‖_∞ > 6F(k)) ≤ 8π/N_{k+1}², with the sup-norm estimated on an
/// M-point grid.
pub fn supnorm_deviation_test(
    target: &SupnormTarget,
    k: BlockIndex,
    grid: u64,
    trials: &Trials,
) -> Result<TrialReport> {
    let end = k.end().filter(|&e| e <= BLOCK_TERM_CAP).ok_or(crate::Error::ResourceGuard {
        k: k.k,
        terms: k.end().unwrap_or(u64::MAX),
        cap: BLOCK_TERM_CAP,
    })?;
    let bound = 8.0 * std::f64::consts::PI / (end as f64 * end as f64);
    let slack = three_sigma(bound.max(1.0 / trials.count as f64), trials.count);
    let checks = match target {
        SupnormTarget::Trig { amps, phases } => {
            let hits = trials.run(|i| {
                let cfg = TrigSeriesConfig::new(amps.clone(), phases.clone(), trials.source(i));
                let sup = cfg.block_polynomial_sup_with(k, grid, BLOCK_TERM_CAP, Exec::Sequential)?;
                Ok(sup > cfg.block_bound(k)?)
            })?;
            vec![Check::new(
                format!("P(sup|P_{}| > 6F({})), x = {}", k.k, k.k, amps.descriptor()),
                frequency(&hits),
                bound,
                slack,
                Relation::AtMost,
            )]
        }
        SupnormTarget::FourierWiener { precision } => {
            let threshold = brownian::block_exceedance_threshold(k.k);
            let hits = trials.run(|i| {
                let ns = NormalSequence::new(trials.source(i), 2 * end as usize, *precision)?;
                let (p, q) = brownian::pq_block_sup_with(&ns, k, grid, BLOCK_TERM_CAP, Exec::Sequential)?;
                Ok((p > threshold, q > threshold))
            })?;
            let (p, q): (Vec<bool>, Vec<bool>) = hits.into_iter().unzip();
            vec![
                Check::new(format!("P(sup|P_{}| > {threshold})", k.k), frequency(&p), bound, slack, Relation::AtMost),
                Check::new(format!("P(sup|Q_{}| > {threshold})", k.k), frequency(&q), bound, slack, Relation::AtMost),
            ]
        }
    };
    Ok(TrialReport::new("supnorm", Some(trials), checks))
}

/// Sample moments of the truncated Fourier–Wiener series across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianMoments {
    pub times: Vec<f64>,
    /// Unbiased sample variance at each time.
    pub variances: Vec<f64>,
    /// Unbiased sample covariance for each pair (i < j) in lexicographic order.
    pub covariances: Vec<((usize, usize), f64)>,
    /// Whether W(1) reproduced X_0 bit-for-bit on every trial that sampled t = 1.
    pub endpoint_exact: bool,
}

pub fn brownian_moments(
    times: &[f64],
    truncation: u64,
    precision: u32,
    trials: &Trials,
) -> Result<BrownianMoments> {
    let samples = trials.run(|i| {
        let fw = FourierWienerSeries::from_source(trials.source(i), truncation, precision)?;
        let values = times.iter().map(|&t| fw.fw_partial(t)).collect::<Result<Vec<_>>>()?;
        let exact = times
            .iter()
            .zip(&values)
            .all(|(&t, &v)| t != 1.0 || v == fw.x0());
        Ok((values, exact))
    })?;
    let n = samples.len() as f64;
    let k = times.len();
    let mut mean = vec![0.0; k];
    for (v, _) in &samples {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n;
        }
    }
    let cov = |a: usize, b: usize| {
        samples
            .iter()
            .map(|(v, _)| (v[a] - mean[a]) * (v[b] - mean[b]))
            .sum::<f64>()
            / (n - 1.0)
    };
    let variances = (0..k).map(|a| cov(a, a)).collect();
    let mut covariances = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            covariances.push(((a, b), cov(a, b)));
        }
    }
    Ok(BrownianMoments {
        times: times.to_vec(),
        variances,
        covariances,
        endpoint_exact: samples.iter().all(|(_, e)| *e),
    })
}

/// Var W(t) ≈ t and Cov(W(s), W(t)) ≈ min(s, t) with tolerance
/// max(0.02, 5/√trials); the variance is also compared to the exact truncated
/// second moment V_N(t) with tolerance 5·V_N(t)/√trials.
pub fn brownian_moment_test(
    times: &[f64],
    truncation: u64,
    precision: u32,
    trials: &Trials,
) -> Result<TrialReport> {
    let m = brownian_moments(times, truncation, precision, trials)?;
    let root = (trials.count as f64).sqrt();
    let tol = (5.0 / root).max(0.02);
    let mut checks = Vec::new();
    for (&t, &v) in times.iter().zip(&m.variances) {
        checks.push(Check::new(format!("Var W({t}) vs t"), v, t, tol, Relation::Within));
        let exact = brownian::truncated_variance(t, truncation);
        checks.push(Check::new(
            format!("Var W({t}) vs V_N({t})"),
            v,
            exact,
            5.0 * exact / root,
            Relation::Within,
        ));
    }
    for &((a, b), c) in &m.covariances {
        let (s, t) = (times[a], times[b]);
        checks.push(Check::new(format!("Cov(W({s}), W({t}))"), c, s.min(t), tol, Relation::Within));
    }
    if times.contains(&1.0) {
        checks.push(Check::holds("W(1) == X_0 on every trial", 0.0, 0.0, m.endpoint_exact));
    }
    Ok(TrialReport::new("brownian", Some(trials), checks))
}

/// Deterministic: |V_N(t) − t| ≤ (2/π²)·Σ_{n>N} n^{−2} + 10⁻¹², using 1/N
/// as the bound on the tail sum.
pub fn variance_identity_check(t: f64, n: u64) -> TrialReport {
    let v = brownian::truncated_variance(t, n);
    let tail = if n == 0 {
        std::f64::consts::PI.powi(2) / 6.0
    } else {
        1.0 / n as f64
    };
    let allowance = 2.0 / std::f64::consts::PI.powi(2) * tail + 1e-12;
    TrialReport::new(
        "variance-identity",
        None,
        vec![Check::new(format!("V_{n}({t}) vs t"), v, t, allowance, Relation::Within)],
    )
}

/// Per-block exceedance of |Σ_{block} ε_n u_n| > λ over greedy divergence
/// blocks: each block frequency ≥ 1/6 − slack, and the fraction of seeds
/// with at least one exceedance ≥ 1 − (5/6)^B − slack.
pub fn divergence_test(
    u: &CoefficientSequence,
    lam: f64,
    blocks: usize,
    trials: &Trials,
) -> Result<TrialReport> {
    let bounds = rademacher::divergence_blocks(u, lam, blocks)?;
    let ranges: Vec<(u64, u64)> = bounds
        .iter()
        .scan(0u64, |prev, &m| {
            let r = (*prev + 1, m);
            *prev = m;
            Some(r)
        })
        .collect();
    let hits = trials.run(|i| {
        let s = RademacherSeries::new(u.clone(), trials.source(i));
        ranges
            .iter()
            .map(|&(lo, hi)| Ok(s.block_sum(lo, hi)? > lam))
            .collect::<Result<Vec<bool>>>()
    })?;
    let slack = three_sigma(0.25, trials.count);
    let mut checks = Vec::new();
    for (b, &(lo, hi)) in ranges.iter().enumerate() {
        let col: Vec<bool> = hits.iter().map(|h| h[b]).collect();
        checks.push(Check::new(
            format!("block {} = ({}, {}]", b + 1, lo - 1, hi),
            frequency(&col),
            1.0 / 6.0,
            slack,
            Relation::AtLeast,
        ));
    }
    let any: Vec<bool> = hits.iter().map(|h| h.iter().any(|&x| x)).collect();
    checks.push(Check::new(
        format!("at least one of {blocks} blocks"),
        frequency(&any),
        1.0 - (5.0f64 / 6.0).powi(blocks as i32),
        slack,
        Relation::AtLeast,
    ));
    Ok(TrialReport::new("divergence", Some(trials), checks))
}

/// Control for [`divergence_test`]: on a square-summable sequence the block
/// search must give up before finding `blocks` blocks.
pub fn divergence_control(u: &CoefficientSequence, lam: f64, blocks: usize, cap: u64) -> TrialReport {
    let outcome = rademacher::divergence_blocks_capped(u, lam, blocks, cap);
    let ok = matches!(outcome, Err(crate::Error::IterationCap { .. }));
    TrialReport::new(
        "divergence-control",
        None,
        vec![Check::holds(
            format!("block search on {} stops at the cap", u.descriptor()),
            u.square_sum(1, cap.min(1 << 24)),
            rademacher::divergence_threshold(lam),
            ok,
        )],
    )
}

/// Median L¹ Riemann estimates per N, on the full interval and one dyadic
/// subinterval, with the grid M = grid_factor·N.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerMedians {
    pub ns: Vec<u64>,
    pub full: Vec<f64>,
    pub sub: Vec<f64>,
}

pub fn fejer_medians(
    amps: &CoefficientSequence,
    phases: &CoefficientSequence,
    ns: &[u64],
    grid_factor: u64,
    interval: DyadicInterval,
    trials: &Trials,
) -> Result<FejerMedians> {
    let per_seed = trials.run(|i| {
        let cfg = TrigSeriesConfig::new(amps.clone(), phases.clone(), trials.source(i));
        ns.iter()
            .map(|&n| {
                let m = grid_factor * n;
                Ok((
                    cfg.fejer_l1_riemann_with(n, m, DyadicInterval::UNIT, Exec::Sequential)?,
                    cfg.fejer_l1_riemann_with(n, m, interval, Exec::Sequential)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let column = |j: usize, sub: bool| {
        let mut v: Vec<f64> = per_seed
            .iter()
            .map(|r| if sub { r[j].1 } else { r[j].0 })
            .collect();
        median(&mut v)
    };
    Ok(FejerMedians {
        ns: ns.to_vec(),
        full: (0..ns.len()).map(|j| column(j, false)).collect(),
        sub: (0..ns.len()).map(|j| column(j, true)).collect(),
    })
}

/// Growth of ‖σ_N‖₁ for square-divergent amplitudes: medians must be
/// strictly increasing in N on [0, 1] and on `interval`.
pub fn fejer_growth_test(
    amps: &CoefficientSequence,
    phases: &CoefficientSequence,
    ns: &[u64],
    grid_factor: u64,
    interval: DyadicInterval,
    trials: &Trials,
) -> Result<TrialReport> {
    let med = fejer_medians(amps, phases, ns, grid_factor, interval, trials)?;
    let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
    let first = |v: &[f64]| v.first().copied().unwrap_or(f64::NAN);
    Ok(TrialReport::new(
        "fejer-growth",
        Some(trials),
        vec![
            Check::holds(
                format!("medians on [0,1] strictly increase ({:?})", med.full),
                last(&med.full),
                first(&med.full),
                strictly_increasing(&med.full),
            ),
            Check::holds(
                format!(
                    "medians on [{}, {}] strictly increase ({:?})",
                    interval.left(),
                    interval.left() + interval.width(),
                    med.sub
                ),
                last(&med.sub),
                first(&med.sub),
                strictly_increasing(&med.sub),
            ),
        ],
    ))
}

/// Boundedness control: for square-summable amplitudes every median stays
/// within twice its value at the first N.
pub fn fejer_control_test(
    amps: &CoefficientSequence,
    phases: &CoefficientSequence,
    ns: &[u64],
    grid_factor: u64,
    interval: DyadicInterval,
    trials: &Trials,
) -> Result<TrialReport> {
    let med = fejer_medians(amps, phases, ns, grid_factor, interval, trials)?;
    let bounded = |v: &[f64]| {
        let cap = 2.0 * v.first().copied().unwrap_or(0.0);
        let top = v.iter().copied().fold(0.0, f64::max);
        (top, cap, top <= cap)
    };
    let (ft, fc, fo) = bounded(&med.full);
    let (st, sc, so) = bounded(&med.sub);
    Ok(TrialReport::new(
        "fejer-control",
        Some(trials),
        vec![
            Check::holds("max median on [0,1] <= 2x first", ft, fc, fo),
            Check::holds("max median on subinterval <= 2x first", st, sc, so),
        ],
    ))
}

/// Kolmogorov–Smirnov statistic of `sample` against N(0, 1).
pub fn ks_statistic_normal(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = gaussian::normal_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of √n·D.
pub const KS_CRITICAL_1PCT: f64 = 1.627_6;

/// Fraction of seeds whose `count` variates pass the 1% KS test against
/// N(0, 1); passes iff at least `min_fraction` do.
pub fn normal_ks_test(count: usize, precision: u32, min_fraction: f64, trials: &Trials) -> Result<TrialReport> {
    let critical = KS_CRITICAL_1PCT / (count as f64).sqrt();
    let ds = trials.run(|i| {
        let ns = NormalSequence::new(trials.source(i), count, precision)?;
        let mut v = ns.values().to_vec();
        Ok(ks_statistic_normal(&mut v))
    })?;
    let ok = ds.iter().filter(|&&d| d < critical).count() as f64 / ds.len().max(1) as f64;
    Ok(TrialReport::new(
        "normal-ks",
        Some(trials),
        vec![Check::new(
            format!("fraction of seeds with D < {critical:.5} ({count} variates)"),
            ok,
            min_fraction,
            0.0,
            Relation::AtLeast,
        )],
    ))
}

/// Median over seeds of ‖W − x_n‖_∞ for each n, where x_n is the C_n code
/// of the sampled path. The path is sampled on the uniform grid of
/// 16·max(n) + 1 points, and distances use the grid M = 16n.
pub fn oscillation_medians(ns: &[usize], truncation: u64, precision: u32, trials: &Trials) -> Result<Vec<f64>> {
    let top = ns.iter().copied().max().unwrap_or(1);
    let grid = brownian::uniform_grid(brownian::default_oscillation_grid(top) + 1);
    let per_seed = trials.run(|i| {
        let fw = FourierWienerSeries::from_source(trials.source(i), truncation, precision)?;
        let path: PathSample = fw.fw_path_with(&grid, Exec::Sequential)?;
        ns.iter()
            .map(|&n| brownian::oscillation_distance(&path, n, brownian::default_oscillation_grid(n)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok((0..ns.len())
        .map(|j| {
            let mut col: Vec<f64> = per_seed.iter().map(|r| r[j]).collect();
            median(&mut col)
        })
        .collect())
}

pub fn oscillation_trend_test(ns: &[usize], truncation: u64, precision: u32, trials: &Trials) -> Result<TrialReport> {
    let med = oscillation_medians(ns, truncation, precision, trials)?;
    let decreasing = med.windows(2).all(|w| w[1] < w[0]);
    Ok(TrialReport::new(
        "oscillation",
        Some(trials),
        vec![Check::holds(
            format!("median distance strictly decreases over n = {ns:?} ({med:?})"),
            med.last().copied().unwrap_or(f64::NAN),
            med.first().copied().unwrap_or(f64::NAN),
            decreasing,
        )],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_examples() {
        let t = Trials::new(2000);
        let g = kolmogorov_inequality_test(&CoefficientSequence::geometric(0.5), 1.0, 20, &t).unwrap();
        assert!((g.theoretical_bound - (1.0 - 0.25f64.powi(20)) / 3.0).abs() < 1e-15);
        assert_eq!(g.statistic, 0.0);
        assert!(g.passed());
        let z = kolmogorov_inequality_test(&CoefficientSequence::zero(), 1.0, 20, &t).unwrap();
        assert_eq!((z.statistic, z.theoretical_bound), (0.0, 0.0));
        assert!(z.passed());
        let h = kolmogorov_inequality_test(&CoefficientSequence::power(1.0), 3.0, 1000, &t).unwrap();
        assert!((h.theoretical_bound - 0.182_66).abs() < 1e-5);
        assert!(h.passed());
    }

    #[test]
    fn paley_zygmund_examples() {
        let t = Trials::new(4000);
        let one = CoefficientSequence::impulse(1, 1.0);
        let r = paley_zygmund_test(&one, 0.9, 1, &t).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.passed());
        let c = paley_zygmund_test(&CoefficientSequence::constant(1.0), 0.5, 100, &t).unwrap();
        assert_eq!(c.theoretical_bound, 0.1875);
        assert!(c.passed());
    }

    #[test]
    fn exhaustive_enumeration_matches_binomial() {
        // |S_10| > √10/2 ⇔ |S_10| ≥ 2 ⇔ the number of +1 signs is not 5.
        let exact = paley_zygmund_exact(&CoefficientSequence::constant(1.0), 0.5, 10);
        assert_eq!(exact, 1.0 - 252.0 / 1024.0);
        // |S_10| > 3 ⇔ at least 7 signs agree.
        let four = paley_zygmund_exact(&CoefficientSequence::constant(1.0), 3.0 / 10f64.sqrt() + 1e-9, 10);
        assert_eq!(four, 2.0 * 176.0 / 1024.0);
        let r = paley_zygmund_test(&CoefficientSequence::constant(1.0), 0.5, 10, &Trials::new(5000)).unwrap();
        assert_eq!(r.checks.len(), 2);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn supnorm_examples() {
        let t = Trials::new(300);
        let zero = SupnormTarget::Trig {
            amps: CoefficientSequence::zero(),
            phases: CoefficientSequence::zero(),
        };
        let r = supnorm_deviation_test(&zero, BlockIndex::new(1), 256, &t).unwrap();
        assert!((r.theoretical_bound - 8.0 * std::f64::consts::PI / 256.0).abs() < 1e-15);
        assert_eq!(r.statistic, 0.0);
        assert!(r.passed());
        let h = SupnormTarget::Trig {
            amps: CoefficientSequence::power(1.0),
            phases: CoefficientSequence::zero(),
        };
        let r = supnorm_deviation_test(&h, BlockIndex::new(2), 4096, &t).unwrap();
        assert!((r.theoretical_bound - 3.8350e-4).abs() < 1e-8);
        assert!(r.passed());
        let fw = supnorm_deviation_test(&SupnormTarget::FourierWiener { precision: 53 }, BlockIndex::new(2), 2048, &t).unwrap();
        assert_eq!(fw.checks.len(), 2);
        assert!(fw.passed());
        assert!(supnorm_deviation_test(&h, BlockIndex::new(4), 16, &t).is_err());
    }

    #[test]
    fn variance_identity_examples() {
        let r = variance_identity_check(0.0, 100);
        assert_eq!(r.statistic, 0.0);
        assert!(r.passed());
        let r = variance_identity_check(1.0, 100);
        assert_eq!(r.statistic, 1.0);
        let r = variance_identity_check(0.5, 4096);
        assert!((r.statistic - 0.5).abs() < 1.3e-4);
        assert!(r.passed());
    }

    #[test]
    fn brownian_endpoint_moments() {
        let t = Trials::new(400);
        let m = brownian_moments(&[0.5, 1.0], 64, 53, &t).unwrap();
        assert!(m.endpoint_exact);
        // W(1) = X_0 and W(1/2) = X_0/2 + (terms independent of X_0), so the
        // sample covariance is half the sample variance of X_0 plus noise.
        assert!((m.variances[1] - 1.0).abs() < 0.25);
        let r = brownian_moment_test(&[0.5, 1.0], 64, 53, &t).unwrap();
        assert!(r.checks.iter().any(|c| c.relation == Relation::Holds && c.verdict.passed()));
    }

    #[test]
    fn divergence_examples() {
        let t = Trials::new(1000);
        let ones = divergence_test(&CoefficientSequence::constant(1.0), 0.5, 4, &t).unwrap();
        assert!(ones.checks.iter().all(|c| c.statistic == 1.0));
        assert!(ones.passed());
        let root = divergence_test(&CoefficientSequence::harmonic_root(), 0.5, 3, &t).unwrap();
        assert!(root.checks[0].label.contains("(0, 1]"));
        assert!(root.checks[2].label.contains("(4, 11]"));
        assert!(root.passed(), "{root:?}");
        let ten = divergence_test(&CoefficientSequence::harmonic_root(), 0.5, 10, &t).unwrap();
        let last = ten.checks.last().unwrap();
        assert!((last.bound - 0.838_5).abs() < 1e-4);
        assert!(ten.passed());
        assert!(divergence_control(&CoefficientSequence::power(1.0), 0.5, 2, 100_000).passed());
        assert!(!divergence_control(&CoefficientSequence::harmonic_root(), 0.5, 2, 100_000).passed());
    }

    #[test]
    fn fejer_zero_amplitudes() {
        let t = Trials::new(5);
        let zero = CoefficientSequence::zero();
        let iv = DyadicInterval::new(3, 2).unwrap();
        let med = fejer_medians(&zero, &zero, &[16, 64], 4, iv, &t).unwrap();
        assert_eq!(med.full, vec![0.0, 0.0]);
        assert!(fejer_control_test(&zero, &zero, &[16, 64], 4, iv, &t).unwrap().passed());
        assert!(!fejer_growth_test(&zero, &zero, &[16, 64], 4, iv, &t).unwrap().passed());
    }

    #[test]
    fn reports_are_reproducible_and_mode_independent() {
        let u = CoefficientSequence::power(1.0);
        let a = kolmogorov_inequality_test(&u, 1.0, 200, &Trials::new(300).seed_base(17).exec(Exec::Parallel)).unwrap();
        let b = kolmogorov_inequality_test(&u, 1.0, 200, &Trials::new(300).seed_base(17).exec(Exec::Sequential)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seeds, Some(SeedRange { base: 17, count: 300 }));
    }

    #[test]
    fn ks_statistic_detects_shift() {
        let ns = NormalSequence::new(Arc::new(SeededBits::new(1)), 20_000, 53).unwrap();
        let mut good = ns.values().to_vec();
        let mut shifted: Vec<f64> = good.iter().map(|x| x + 0.1).collect();
        let crit = KS_CRITICAL_1PCT / (good.len() as f64).sqrt();
        assert!(ks_statistic_normal(&mut good) < crit);
        assert!(ks_statistic_normal(&mut shifted) > crit);
    }
}
