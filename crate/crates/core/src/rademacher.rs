//! Rademacher series Σ ε_n u_n with signs read from a bit string.
//!
//! Sign convention: ε_n is bit n of α, for every n ≥ 0. Series indexed from
//! 1 therefore never read bit 0.

use std::fmt;
use std::sync::Arc;

use crate::bits::BitSource;
use crate::error::{Error, Result};

type TermFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// A deterministic real sequence u_0, u_1, …, optionally carrying a certified
/// tail bound B(n) ≥ Σ_{l>n} u_l².
///
/// A tail bound makes the sequence square computable: the cutoff n(m) is the
/// smallest n with B(n) < 1/m (see [`CoefficientSequence::tail_index`]).
#[derive(Clone)]
pub struct CoefficientSequence {
    term: TermFn,
    tail: Option<TermFn>,
    descriptor: String,
}

impl fmt::Debug for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSequence")
            .field("descriptor", &self.descriptor)
            .field("square_computable", &self.tail.is_some())
            .finish()
    }
}

impl CoefficientSequence {
    pub fn from_fn<F>(descriptor: impl Into<String>, term: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        Self {
            term: Arc::new(term),
            tail: None,
            descriptor: descriptor.into(),
        }
    }

    /// Attaches a tail bound. The caller guarantees `bound(n) ≥ Σ_{l>n} u_l²`
    /// and that `bound` is nonincreasing.
    pub fn with_tail_bound<F>(mut self, bound: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        self.tail = Some(Arc::new(bound));
        self
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", |_| 0.0).with_tail_bound(|_| 0.0)
    }

    /// u_n = rⁿ for n ≥ 0.
    pub fn geometric(r: f64) -> Self {
        let seq = Self::from_fn(format!("geometric({r})"), move |n| r.powf(n as f64));
        let r2 = r * r;
        if r2 < 1.0 {
            seq.with_tail_bound(move |n| r2.powf(n as f64 + 1.0) / (1.0 - r2) * (1.0 + 1e-12))
        } else {
            seq
        }
    }

    /// u_n = n^{−p} for n ≥ 1, u_0 = 0. Square computable when p > 1/2, with
    /// the integral bound Σ_{l>n} l^{−2p} ≤ n^{1−2p}/(2p − 1).
    pub fn power(p: f64) -> Self {
        let seq = Self::from_fn(format!("power({p})"), move |n| {
            if n == 0 {
                0.0
            } else {
                (n as f64).powf(-p)
            }
        });
        if 2.0 * p > 1.0 {
            let e = 2.0 * p - 1.0;
            seq.with_tail_bound(move |n| {
                if n == 0 {
                    1.0 + 1.0 / e
                } else {
                    (n as f64).powf(-e) / e
                }
            })
        } else {
            seq
        }
    }

    /// u_n = 1/√n, the square-divergent family.
    pub fn harmonic_root() -> Self {
        let mut s = Self::power(0.5);
        s.descriptor = "harmonic_root".into();
        s
    }

    /// u_n = c for every n ≥ 0.
    pub fn constant(c: f64) -> Self {
        let seq = Self::from_fn(format!("constant({c})"), move |_| c);
        if c == 0.0 {
            seq.with_tail_bound(|_| 0.0)
        } else {
            seq
        }
    }

    /// u_index = value, zero elsewhere.
    pub fn impulse(index: u64, value: f64) -> Self {
        Self::from_fn(format!("impulse({index}, {value})"), move |n| {
            if n == index {
                value
            } else {
                0.0
            }
        })
        .with_tail_bound(move |n| if n < index { value * value } else { 0.0 })
    }

    /// Finitely supported sequence with u_{first + i} = values[i].
    pub fn from_values(descriptor: impl Into<String>, values: Vec<f64>, first: u64) -> Self {
        // suffix[i] = Σ_{l ≥ i} values[l]², inflated to cover rounding.
        let mut suffix = vec![0.0; values.len() + 1];
        for i in (0..values.len()).rev() {
            suffix[i] = suffix[i + 1] + values[i] * values[i];
        }
        for s in &mut suffix {
            *s *= 1.0 + 1e-12;
        }
        let values = Arc::new(values);
        let v = Arc::clone(&values);
        Self::from_fn(descriptor, move |n| {
            n.checked_sub(first)
                .and_then(|i| v.get(i as usize).copied())
                .unwrap_or(0.0)
        })
        .with_tail_bound(move |n| {
            // Σ_{l>n} covers values from position n + 1 − first.
            let start = (n + 1).saturating_sub(first) as usize;
            suffix[start.min(suffix.len() - 1)]
        })
    }

    /// Uniformly spaced phases φ_n = 2π·frac(n·step).
    pub fn phase_grid(step: f64) -> Self {
        Self::from_fn(format!("phase_grid({step})"), move |n| {
            std::f64::consts::TAU * (n as f64 * step).fract()
        })
    }

    #[inline]
    pub fn term(&self, n: u64) -> f64 {
        (self.term)(n)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn is_square_computable(&self) -> bool {
        self.tail.is_some()
    }

    /// The certified bound on Σ_{l>n} u_l², if any.
    pub fn tail_bound(&self, n: u64) -> Option<f64> {
        self.tail.as_ref().map(|b| b(n))
    }

    /// n(m): the smallest n with tail bound below 1/m.
    pub fn tail_index(&self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::InvalidArgument("tail_index needs m >= 1".into()));
        }
        self.first_below(1.0 / m as f64, 1.0)
    }

    /// Smallest n with k²·B(n) < multiplier.
    pub fn tail_cutoff(&self, k: u64, multiplier: f64) -> Result<u64> {
        if k == 0 {
            return Err(Error::InvalidArgument("tail_cutoff needs k >= 1".into()));
        }
        let k2 = (k as f64) * (k as f64);
        self.first_below(multiplier, k2)
    }

    fn first_below(&self, target: f64, scale: f64) -> Result<u64> {
        let bound = self
            .tail
            .as_ref()
            .ok_or_else(|| Error::MissingTailBound(self.descriptor.clone()))?;
        let ok = |n: u64| scale * bound(n) < target;
        if ok(0) {
            return Ok(0);
        }
        let mut hi = 1u64;
        while !ok(hi) {
            if hi >= 1 << 62 {
                return Err(Error::InvalidArgument(format!(
                    "tail bound of {} never drops below {target}",
                    self.descriptor
                )));
            }
            hi *= 2;
        }
        let mut lo = hi / 2; // !ok(lo)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Termwise product λ_n u_n. The tail bound, when present, is scaled by
    /// `sup²` where `sup ≥ sup_n |λ_n|`.
    pub fn contract(&self, lam: &CoefficientSequence, sup: f64) -> Result<Self> {
        if !(sup.is_finite() && sup >= 0.0) {
            return Err(Error::BadSupremum(sup));
        }
        let (u, l) = (Arc::clone(&self.term), Arc::clone(&lam.term));
        let seq = Self::from_fn(
            format!("{}*{}", lam.descriptor, self.descriptor),
            move |n| l(n) * u(n),
        );
        Ok(match &self.tail {
            Some(b) => {
                let b = Arc::clone(b);
                let s2 = sup * sup;
                seq.with_tail_bound(move |n| s2 * b(n))
            }
            None => seq,
        })
    }

    /// Multiplies every term by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let u = Arc::clone(&self.term);
        let seq = Self::from_fn(format!("{c}*{}", self.descriptor), move |n| c * u(n));
        match &self.tail {
            Some(b) => {
                let b = Arc::clone(b);
                seq.with_tail_bound(move |n| c * c * b(n))
            }
            None => seq,
        }
    }

    /// Σ_{n=from}^{to} u_n².
    pub fn square_sum(&self, from: u64, to: u64) -> f64 {
        (from..=to).map(|n| self.term(n).powi(2)).sum()
    }
}

/// Summation mode for partial sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Ascending index, plain accumulation.
    #[default]
    Plain,
    /// Kahan–Babuška (Neumaier) compensated accumulation.
    Compensated,
}

#[derive(Clone)]
pub struct RademacherSeries {
    pub coeffs: CoefficientSequence,
    pub eps: Arc<dyn BitSource>,
}

impl fmt::Debug for RademacherSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RademacherSeries")
            .field("coeffs", &self.coeffs)
            .field("eps", &self.eps.origin())
            .finish()
    }
}

impl RademacherSeries {
    pub fn new(coeffs: CoefficientSequence, eps: Arc<dyn BitSource>) -> Self {
        Self { coeffs, eps }
    }

    #[inline]
    fn signed_term(&self, n: u64) -> Result<f64> {
        Ok(f64::from(self.eps.bit(n)?) * self.coeffs.term(n))
    }

    /// Σ_{n=1}^{N} ε_n u_n.
    pub fn partial_sum(&self, n: u64) -> Result<f64> {
        self.partial_sum_with(n, Summation::Plain)
    }

    pub fn partial_sum_with(&self, n: u64, mode: Summation) -> Result<f64> {
        match mode {
            Summation::Plain => {
                let mut s = 0.0;
                for l in 1..=n {
                    s += self.signed_term(l)?;
                }
                Ok(s)
            }
            Summation::Compensated => {
                let (mut s, mut c) = (0.0f64, 0.0f64);
                for l in 1..=n {
                    let x = self.signed_term(l)?;
                    let t = s + x;
                    c += if s.abs() >= x.abs() {
                        (s - t) + x
                    } else {
                        (x - t) + s
                    };
                    s = t;
                }
                Ok(s + c)
            }
        }
    }

    /// The running sums S_1, …, S_N.
    pub fn partial_sums(&self, n: u64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n as usize);
        let mut s = 0.0;
        for l in 1..=n {
            s += self.signed_term(l)?;
            out.push(s);
        }
        Ok(out)
    }

    /// max_{1≤j≤J} |Σ_{l=n}^{n+j} ε_l u_l|.
    pub fn sup_partial_deviation(&self, start: u64, horizon: u64) -> Result<f64> {
        if start == 0 || horizon == 0 {
            return Err(Error::InvalidArgument(
                "sup_partial_deviation needs start >= 1 and horizon >= 1".into(),
            ));
        }
        let mut s = self.signed_term(start)?;
        let mut best = 0.0f64;
        for l in start + 1..=start + horizon {
            s += self.signed_term(l)?;
            best = best.max(s.abs());
        }
        Ok(best)
    }

    /// max_{n≤N} |S_n|, the quantity bounded by Kolmogorov's inequality.
    pub fn max_partial_sum(&self, n: u64) -> Result<f64> {
        let mut s = 0.0;
        let mut best = 0.0f64;
        for l in 1..=n {
            s += self.signed_term(l)?;
            best = best.max(s.abs());
        }
        Ok(best)
    }

    /// |Σ_{l=from}^{to} ε_l u_l|.
    pub fn block_sum(&self, from: u64, to: u64) -> Result<f64> {
        let mut s = 0.0;
        for l in from..=to {
            s += self.signed_term(l)?;
        }
        Ok(s.abs())
    }
}

/// Free-function forms of the series operations.
pub fn partial_sum(s: &RademacherSeries, n: u64) -> Result<f64> {
    s.partial_sum(n)
}

pub fn sup_partial_deviation(s: &RademacherSeries, start: u64, horizon: u64) -> Result<f64> {
    s.sup_partial_deviation(start, horizon)
}

pub fn tail_cutoff(c: &CoefficientSequence, k: u64, multiplier: f64) -> Result<u64> {
    c.tail_cutoff(k, multiplier)
}

pub fn contract(c: &CoefficientSequence, lam: &CoefficientSequence, sup: f64) -> Result<CoefficientSequence> {
    c.contract(lam, sup)
}

/// Terms scanned per block before [`divergence_blocks`] gives up.
pub const DIVERGENCE_SCAN_CAP: u64 = 100_000_000;

/// Block square-sum T above which the Paley–Zygmund lower bound
/// (1/3)(1 − γ²)², γ² = λ²/T, exceeds 1/6: T = λ²/(1 − 2^{−1/2}).
pub fn divergence_threshold(lam: f64) -> f64 {
    lam * lam / (1.0 - std::f64::consts::FRAC_1_SQRT_2)
}

/// Greedy block boundaries m_1 < m_2 < … with each block (m_{k−1}, m_k]
/// (m_0 = 0) the shortest whose square sum exceeds [`divergence_threshold`].
pub fn divergence_blocks(c: &CoefficientSequence, lam: f64, count: usize) -> Result<Vec<u64>> {
    divergence_blocks_capped(c, lam, count, DIVERGENCE_SCAN_CAP)
}

pub fn divergence_blocks_capped(
    c: &CoefficientSequence,
    lam: f64,
    count: usize,
    cap: u64,
) -> Result<Vec<u64>> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in (0, 1), got {lam}"
        )));
    }
    let threshold = divergence_threshold(lam);
    let mut bounds = Vec::with_capacity(count);
    let mut m = 0u64;
    for block in 0..count {
        let mut sum = 0.0;
        let mut scanned = 0u64;
        loop {
            if scanned == cap {
                return Err(Error::IterationCap { block, cap });
            }
            m += 1;
            scanned += 1;
            sum += c.term(m).powi(2);
            if sum > threshold {
                break;
            }
        }
        bounds.push(m);
    }
    Ok(bounds)
}
