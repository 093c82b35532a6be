//! Random trigonometric series Σ ε_n x_n cos(2πnt + φ_n) and their Fejér sums.

use std::fmt;
use std::sync::Arc;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::rademacher::CoefficientSequence;
use crate::trig::{cos_phase, GridTable};

/// Default cap on N_{k+1} for block polynomials: N_4 = 65536, so k ≤ 3.
pub const BLOCK_TERM_CAP: u64 = 1 << 16;

/// Largest table the grid evaluators will allocate.
const MAX_TABLE: u64 = 1 << 26;

#[derive(Clone)]
pub struct TrigSeriesConfig {
    pub amps: CoefficientSequence,
    /// Phases in radians, added to 2πnt.
    pub phases: CoefficientSequence,
    pub eps: Arc<dyn BitSource>,
}

impl fmt::Debug for TrigSeriesConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrigSeriesConfig")
            .field("amps", &self.amps)
            .field("phases", &self.phases)
            .field("eps", &self.eps.origin())
            .finish()
    }
}

/// Dyadic block k with cut points N_k = 2^{2^k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIndex {
    pub k: u32,
}

impl BlockIndex {
    pub fn new(k: u32) -> Self {
        Self { k }
    }

    /// N_k, or `None` once it exceeds u64 (k ≥ 6).
    pub fn start(&self) -> Option<u64> {
        cut_point(self.k)
    }

    /// N_{k+1}, one past the last frequency in the block.
    pub fn end(&self) -> Option<u64> {
        cut_point(self.k + 1)
    }

    fn range_within(&self, cap: u64) -> Result<(u64, u64)> {
        match (self.start(), self.end()) {
            (Some(lo), Some(hi)) if hi <= cap => Ok((lo, hi)),
            (_, hi) => Err(Error::ResourceGuard {
                k: self.k,
                terms: hi.unwrap_or(u64::MAX),
                cap,
            }),
        }
    }

    /// ln N_{k+1} = 2^{k+1} ln 2.
    pub fn log_end(&self) -> f64 {
        2f64.powi(self.k as i32 + 1) * std::f64::consts::LN_2
    }
}

/// 2^{2^k} for k ≤ 5.
pub fn cut_point(k: u32) -> Option<u64> {
    if k > 5 {
        None
    } else {
        1u64.checked_shl(1 << k)
    }
}

/// The dyadic interval [k·2^{−j}, (k+1)·2^{−j}].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicInterval {
    pub j: u32,
    pub k: u64,
}

impl DyadicInterval {
    pub const UNIT: DyadicInterval = DyadicInterval { j: 0, k: 0 };

    pub fn new(j: u32, k: u64) -> Result<Self> {
        if j > 40 || k >= 1u64 << j {
            return Err(Error::InvalidArgument(format!(
                "dyadic interval needs 0 <= k < 2^j with j <= 40, got j={j}, k={k}"
            )));
        }
        Ok(Self { j, k })
    }

    pub fn left(&self) -> f64 {
        self.k as f64 / (1u64 << self.j) as f64
    }

    pub fn width(&self) -> f64 {
        1.0 / (1u64 << self.j) as f64
    }
}

impl Default for DyadicInterval {
    fn default() -> Self {
        Self::UNIT
    }
}

fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t = {t} is outside [0, 1]")))
    }
}

impl TrigSeriesConfig {
    pub fn new(
        amps: CoefficientSequence,
        phases: CoefficientSequence,
        eps: Arc<dyn BitSource>,
    ) -> Self {
        Self { amps, phases, eps }
    }

    /// Zero phases.
    pub fn cosine(amps: CoefficientSequence, eps: Arc<dyn BitSource>) -> Self {
        Self::new(amps, CoefficientSequence::zero(), eps)
    }

    #[inline]
    fn signed_amp(&self, n: u64) -> Result<f64> {
        Ok(f64::from(self.eps.bit(n)?) * self.amps.term(n))
    }

    /// ε_n x_n cos(2πnt + φ_n).
    pub fn term(&self, n: u64, t: f64) -> Result<f64> {
        Ok(self.signed_amp(n)? * cos_phase(n, t, self.phases.term(n)))
    }

    /// Σ_{n=0}^{N} ε_n x_n cos(2πnt + φ_n).
    pub fn series_partial_sum(&self, t: f64, n: u64) -> Result<f64> {
        check_time(t)?;
        let mut s = 0.0;
        for l in 0..=n {
            s += self.term(l, t)?;
        }
        Ok(s)
    }

    /// The deterministic sequence n ↦ x_n cos(2πnt + φ_n), inheriting the
    /// amplitudes' tail bound.
    pub fn pointwise_sequence(&self, t: f64) -> Result<CoefficientSequence> {
        check_time(t)?;
        let (amps, phases) = (self.amps.clone(), self.phases.clone());
        let seq = CoefficientSequence::from_fn(
            format!("{} cos(2pi n {t} + phi)", self.amps.descriptor()),
            move |n| amps.term(n) * cos_phase(n, t, phases.term(n)),
        );
        Ok(if self.amps.is_square_computable() {
            let amps = self.amps.clone();
            seq.with_tail_bound(move |n| amps.tail_bound(n).unwrap_or(f64::INFINITY))
        } else {
            seq
        })
    }

    /// σ_N(t) = Σ_{n=0}^{N} (1 − n/N) ε_n x_n cos(2πnt + φ_n).
    pub fn fejer_sum(&self, t: f64, n: u64) -> Result<f64> {
        check_time(t)?;
        if n == 0 {
            return Err(Error::InvalidArgument("Fejér sum needs N >= 1".into()));
        }
        let mut s = 0.0;
        for l in 0..n {
            s += fejer_weight(l, n) * self.term(l, t)?;
        }
        Ok(s)
    }

    /// Weighted cosine/sine coefficients (a_n, b_n) for n in `lo..hi`, so that
    /// the polynomial equals Σ a_n cos 2πnt + b_n sin 2πnt. `b` is empty when
    /// every phase vanishes.
    fn coefficients(
        &self,
        lo: u64,
        hi: u64,
        weight: impl Fn(u64) -> f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut a = Vec::with_capacity((hi - lo) as usize);
        let mut b = Vec::with_capacity((hi - lo) as usize);
        let mut any_phase = false;
        for n in lo..hi {
            let c = weight(n) * self.signed_amp(n)?;
            let phi = self.phases.term(n);
            any_phase |= phi != 0.0;
            let (s, co) = phi.sin_cos();
            a.push(c * co);
            b.push(-c * s);
        }
        if !any_phase {
            b.clear();
        }
        Ok((a, b))
    }

    /// Mean of |σ_N| over the M left-endpoint points
    /// (k + i/M)·2^{−j}, i < M, of a dyadic interval.
    pub fn fejer_l1_riemann(&self, n: u64, m: u64, interval: DyadicInterval) -> Result<f64> {
        self.fejer_l1_riemann_with(n, m, interval, Exec::default())
    }

    pub fn fejer_l1_riemann_with(
        &self,
        n: u64,
        m: u64,
        interval: DyadicInterval,
        exec: Exec,
    ) -> Result<f64> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument("fejer_l1_riemann needs N >= 1 and M >= 1".into()));
        }
        let interval = DyadicInterval::new(interval.j, interval.k)?;
        // Grid points are (k·M + i)/L with L = M·2^j.
        let len = m
            .checked_mul(1u64 << interval.j)
            .filter(|&l| l <= MAX_TABLE)
            .ok_or_else(|| Error::InvalidArgument(format!("grid M·2^j too large (M = {m}, j = {})", interval.j)))?;
        let (a, b) = self.coefficients(0, n, |l| fejer_weight(l, n))?;
        let table = GridTable::new(len);
        let offset = interval.k * m;
        let values = exec.map(m as usize, |i| table.eval(0, &a, &b, offset + i as u64).abs());
        Ok(values.iter().sum::<f64>() / m as f64)
    }

    /// s_j = (Σ_{2^j ≤ n < 2^{j+1}} x_n²)^{1/2}.
    pub fn s_sequence(&self, j: u32) -> f64 {
        let lo = 1u64 << j;
        self.amps.square_sum(lo, 2 * lo - 1).sqrt()
    }

    /// P_k(t) = Σ_{N_k ≤ n < N_{k+1}} ε_n x_n cos(2πnt + φ_n).
    pub fn block_polynomial(&self, k: BlockIndex, t: f64) -> Result<f64> {
        check_time(t)?;
        let (lo, hi) = k.range_within(BLOCK_TERM_CAP)?;
        let mut s = 0.0;
        for n in lo..hi {
            s += self.term(n, t)?;
        }
        Ok(s)
    }

    /// max_{i<M} |P_k(i/M)|, a lower bound for ‖P_k‖_∞.
    pub fn block_polynomial_sup(&self, k: BlockIndex, m: u64) -> Result<f64> {
        self.block_polynomial_sup_with(k, m, BLOCK_TERM_CAP, Exec::default())
    }

    pub fn block_polynomial_sup_with(
        &self,
        k: BlockIndex,
        m: u64,
        cap: u64,
        exec: Exec,
    ) -> Result<f64> {
        if m == 0 || m > MAX_TABLE {
            return Err(Error::InvalidArgument(format!("grid size {m} out of range")));
        }
        let (lo, hi) = k.range_within(cap)?;
        let (a, b) = self.coefficients(lo, hi, |_| 1.0)?;
        let table = GridTable::new(m);
        Ok(exec::max_abs(exec, m as usize, |i| table.eval(lo, &a, &b, i as u64)))
    }

    /// 6F(k) = 6·(ln N_{k+1} · Σ_{N_k ≤ n < N_{k+1}} x_n²)^{1/2}.
    pub fn block_bound(&self, k: BlockIndex) -> Result<f64> {
        let (lo, hi) = k.range_within(u64::MAX)?;
        Ok(6.0 * (k.log_end() * self.amps.square_sum(lo, hi - 1)).sqrt())
    }
}

#[inline]
pub fn fejer_weight(n: u64, big_n: u64) -> f64 {
    1.0 - n as f64 / big_n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{BitString, SeededBits};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn plus(amps: CoefficientSequence) -> TrigSeriesConfig {
        TrigSeriesConfig::cosine(amps, Arc::new(BitString::constant(1, 1 << 17)))
    }

    #[test]
    fn partial_sum_examples() {
        let z = plus(CoefficientSequence::zero());
        assert_eq!(z.series_partial_sum(0.3, 100).unwrap(), 0.0);
        let c = plus(CoefficientSequence::impulse(0, 1.0));
        for t in [0.0, 0.2, 0.77, 1.0] {
            assert_eq!(c.series_partial_sum(t, 50).unwrap(), 1.0);
        }
        let z2 = plus(CoefficientSequence::power(2.0)).series_partial_sum(0.0, 10_000).unwrap();
        let oracle: f64 = (1..=10_000).map(|n| (n as f64).powi(-2)).sum();
        assert!((z2 - oracle).abs() < 1e-12);
        assert!((z2 - PI * PI / 6.0).abs() < 1e-4);
        assert!(c.series_partial_sum(1.5, 3).is_err());
    }

    #[test]
    fn pointwise_sequence_examples() {
        let cfg = plus(CoefficientSequence::power(1.0));
        let at0 = cfg.pointwise_sequence(0.0).unwrap();
        let half = cfg.pointwise_sequence(0.5).unwrap();
        let quarter = cfg.pointwise_sequence(0.25).unwrap();
        for n in 1..50u64 {
            let x = 1.0 / n as f64;
            assert_eq!(at0.term(n), x);
            assert!((half.term(n) - if n % 2 == 0 { x } else { -x }).abs() < 1e-15);
            if n % 2 == 1 {
                assert!(quarter.term(n).abs() < 1e-15);
            }
        }
        assert_eq!(at0.tail_bound(10), cfg.amps.tail_bound(10));
        let div = plus(CoefficientSequence::harmonic_root()).pointwise_sequence(0.1).unwrap();
        assert!(!div.is_square_computable());
    }

    #[test]
    fn fejer_examples() {
        let c = plus(CoefficientSequence::impulse(0, 1.0));
        assert_eq!(c.fejer_sum(0.4, 2).unwrap(), 1.0);
        assert_eq!(plus(CoefficientSequence::zero()).fejer_sum(0.4, 2).unwrap(), 0.0);
        let one = plus(CoefficientSequence::impulse(1, 1.0));
        assert_eq!(one.fejer_sum(0.0, 2).unwrap(), 0.5);
        assert!(one.fejer_sum(0.0, 0).is_err());
    }

    #[test]
    fn l1_examples() {
        assert_eq!(
            plus(CoefficientSequence::zero()).fejer_l1_riemann(16, 64, DyadicInterval::UNIT).unwrap(),
            0.0
        );
        // ∫₀¹ |cos 2πt| dt = 2/π; weight (1 − 1/N) → 1.
        let one = plus(CoefficientSequence::impulse(1, 1.0));
        let n = 10_000;
        let got = one.fejer_l1_riemann(n, 10_000, DyadicInterval::UNIT).unwrap();
        assert!((got - 2.0 / PI).abs() < 1e-4, "{got}");
        let c = plus(CoefficientSequence::impulse(0, -2.5));
        let iv = DyadicInterval::new(3, 2).unwrap();
        assert!((c.fejer_l1_riemann(8, 33, iv).unwrap() - 2.5).abs() < 1e-12);
        assert!(DyadicInterval::new(2, 4).is_err());
        assert!(c.fejer_l1_riemann(0, 10, iv).is_err());
    }

    #[test]
    fn l1_grid_matches_pointwise_fejer() {
        let cfg = TrigSeriesConfig::new(
            CoefficientSequence::harmonic_root(),
            CoefficientSequence::phase_grid(0.137),
            Arc::new(SeededBits::new(5)),
        );
        let (n, m) = (40, 24);
        for iv in [DyadicInterval::UNIT, DyadicInterval::new(3, 2).unwrap()] {
            let direct: f64 = (0..m)
                .map(|i| {
                    let t = (iv.k as f64 + i as f64 / m as f64) * iv.width();
                    cfg.fejer_sum(t, n).unwrap().abs()
                })
                .sum::<f64>()
                / m as f64;
            let fast = cfg.fejer_l1_riemann(n, m, iv).unwrap();
            assert!((fast - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn s_sequence_examples() {
        let cfg = plus(CoefficientSequence::power(1.0));
        assert_eq!(cfg.s_sequence(0), 1.0);
        assert!((cfg.s_sequence(1) - 13f64.sqrt() / 6.0).abs() < 1e-15);
        assert_eq!(plus(CoefficientSequence::zero()).s_sequence(4), 0.0);
    }

    #[test]
    fn block_index_cut_points() {
        assert_eq!(cut_point(0), Some(2));
        for k in 0..5 {
            let n = cut_point(k).unwrap();
            assert_eq!(cut_point(k + 1), n.checked_mul(n));
        }
        assert_eq!(cut_point(6), None);
    }

    #[test]
    fn block_polynomial_examples() {
        let k0 = BlockIndex::new(0);
        assert_eq!(plus(CoefficientSequence::zero()).block_polynomial_sup(k0, 100).unwrap(), 0.0);
        let cfg = plus(CoefficientSequence::power(1.0));
        let sup = cfg.block_polynomial_sup(k0, 10_000).unwrap();
        assert!((sup - 5.0 / 6.0).abs() < 1e-12);
        // Dense-grid oracle: direct evaluation at 10⁶ points never beats t = 0.
        let dense = (0..1_000_000)
            .map(|i| {
                let t = i as f64 / 1e6;
                ((4.0 * PI * t).cos() / 2.0 + (6.0 * PI * t).cos() / 3.0).abs()
            })
            .fold(0.0, f64::max);
        assert!(dense <= 5.0 / 6.0 + 1e-15);
        assert!(matches!(
            cfg.block_polynomial_sup(BlockIndex::new(4), 10),
            Err(Error::ResourceGuard { k: 4, .. })
        ));
    }

    #[test]
    fn block_polynomial_grid_agrees_with_direct() {
        let cfg = TrigSeriesConfig::new(
            CoefficientSequence::power(1.0),
            CoefficientSequence::phase_grid(0.3),
            Arc::new(SeededBits::new(3)),
        );
        let k = BlockIndex::new(1);
        let m = 50;
        let direct = (0..m)
            .map(|i| cfg.block_polynomial(k, i as f64 / m as f64).unwrap().abs())
            .fold(0.0, f64::max);
        assert!((cfg.block_polynomial_sup(k, m).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn grid_refinement_never_decreases() {
        for seed in 0..10 {
            let cfg = TrigSeriesConfig::cosine(CoefficientSequence::power(1.0), Arc::new(SeededBits::new(seed)));
            for k in 0..3 {
                let k = BlockIndex::new(k);
                let coarse = cfg.block_polynomial_sup(k, 1_000).unwrap();
                let fine = cfg.block_polynomial_sup(k, 100_000).unwrap();
                assert!(fine >= coarse - 1e-12);
            }
        }
    }

    #[test]
    fn block_bound_examples() {
        assert_eq!(plus(CoefficientSequence::zero()).block_bound(BlockIndex::new(1)).unwrap(), 0.0);
        let cfg = plus(CoefficientSequence::power(1.0));
        let direct: f64 = (4..=15).map(|n| (n as f64).powi(-2)).sum();
        assert!((direct - 0.219_329).abs() < 1e-6);
        let b = cfg.block_bound(BlockIndex::new(1)).unwrap();
        assert!((b - 6.0 * (16f64.ln() * direct).sqrt()).abs() < 1e-12);
        assert!((b - 4.679).abs() < 1e-3);
        let doubled = plus(CoefficientSequence::power(1.0).scaled(2.0));
        assert!((doubled.block_bound(BlockIndex::new(1)).unwrap() - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn scaling_preserves_exceedance() {
        for seed in 0..20 {
            let eps: Arc<dyn BitSource> = Arc::new(SeededBits::new(seed));
            let base = TrigSeriesConfig::cosine(CoefficientSequence::power(1.0), eps.clone());
            let big = TrigSeriesConfig::cosine(CoefficientSequence::power(1.0).scaled(3.5), eps);
            let k = BlockIndex::new(1);
            let (s, b) = (base.block_polynomial_sup(k, 400).unwrap(), base.block_bound(k).unwrap());
            let (s2, b2) = (big.block_polynomial_sup(k, 400).unwrap(), big.block_bound(k).unwrap());
            assert!((s2 - 3.5 * s).abs() < 1e-12 && (b2 - 3.5 * b).abs() < 1e-12);
            assert_eq!(s > b, s2 > b2);
        }
    }

    proptest! {
        #[test]
        fn fejer_algebra(seed: u64, t in 0.0f64..=1.0, n in 1u64..200) {
            let cfg = TrigSeriesConfig::new(
                CoefficientSequence::harmonic_root(),
                CoefficientSequence::phase_grid(0.21),
                Arc::new(SeededBits::new(seed)),
            );
            let mut weighted = 0.0;
            let mut l1 = 0.0;
            for l in 0..=n {
                weighted += (1.0 - l as f64 / n as f64) * cfg.term(l, t).unwrap();
                l1 += cfg.amps.term(l).abs();
            }
            let sigma = cfg.fejer_sum(t, n).unwrap();
            prop_assert!((sigma - weighted).abs() < 1e-12);
            prop_assert!(sigma.abs() <= l1 + 1e-12);
            let full = cfg.series_partial_sum(t, n).unwrap();
            let prev = cfg.series_partial_sum(t, n - 1).unwrap();
            prop_assert!((full - prev - cfg.term(n, t).unwrap()).abs() < 1e-12);
        }
    }
}
