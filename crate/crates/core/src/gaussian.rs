//! The inverse Gaussian CDF g and the normal sequence ξ_n(α) = g(β_n).

use std::sync::Arc;

use crate::bits::{self, BitSource};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_PRECISION: u32 = 53;
pub const MAX_PRECISION: u32 = 64;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Standard normal CDF Φ(z) = erfc(−z/√2)/2.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

// Acklam's rational approximation, relative error below 1.15e-9.
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

/// Initial guess for q ≤ 1/2.
fn acklam_lower(q: f64) -> f64 {
    const Q_LOW: f64 = 0.024_25;
    if q < Q_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * s
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// g on the lower half, q ∈ (0, 1/2], refined by Halley steps until the
/// Newton correction (Φ(z) − q)/φ(z) is at most `tol`.
fn lower_inverse(q: f64, tol: f64) -> f64 {
    let mut z = acklam_lower(q);
    // Past ~6 iterations the correction sits at the erfc rounding floor.
    for _ in 0..8 {
        let u = (normal_cdf(z) - q) * SQRT_2PI * (0.5 * z * z).exp();
        if u.abs() <= tol || !u.is_finite() {
            break;
        }
        z -= u / (1.0 + 0.5 * z * u);
    }
    z
}

/// g(q): the z with Φ(z) = q, to within `tol` in the Newton-correction sense
/// |Φ(z) − q| ≤ tol·φ(z).
///
/// Values above 1/2 are reflected, so g(1 − q) = −g(q) holds exactly.
pub fn inverse_gaussian_cdf(q: f64, tol: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ProbabilityOutOfRange(q));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Tolerance(tol));
    }
    Ok(if q > 0.5 {
        -lower_inverse(1.0 - q, tol)
    } else {
        lower_inverse(q, tol)
    })
}

/// g applied to the dyadic midpoint of `bits`, evaluated on the lower tail so
/// that no precision is lost near 1.
pub(crate) fn gaussian_from_bits(bits: &[i8], tol: f64) -> Result<f64> {
    let (low, upper) = bits::lower_tail_midpoint(bits)?;
    let z = lower_inverse(low, tol);
    Ok(if upper { -z } else { z })
}

/// The variates ξ_0, …, ξ_{n−1} derived from one bit source.
///
/// ξ_k = g(midpoint(β_k)) where β_k holds the bits of α at indices
/// φ(k, 0), …, φ(k, p−1). Values are computed once at construction and are
/// read-only afterwards.
#[derive(Clone)]
pub struct NormalSequence {
    source: Arc<dyn BitSource>,
    precision: u32,
    values: Vec<f64>,
}

impl std::fmt::Debug for NormalSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NormalSequence")
            .field("origin", &self.source.origin())
            .field("precision", &self.precision)
            .field("len", &self.values.len())
            .finish()
    }
}

impl NormalSequence {
    pub fn new(source: Arc<dyn BitSource>, count: usize, precision: u32) -> Result<Self> {
        Self::with_tolerance(source, count, precision, DEFAULT_TOL)
    }

    pub fn with_tolerance(
        source: Arc<dyn BitSource>,
        count: usize,
        precision: u32,
        tol: f64,
    ) -> Result<Self> {
        if !(1..=MAX_PRECISION).contains(&precision) {
            return Err(Error::Precision {
                got: precision,
                max: MAX_PRECISION,
            });
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Tolerance(tol));
        }
        let p = precision as usize;
        let mut digits = Vec::with_capacity(p);
        let mut values = Vec::with_capacity(count);
        for k in 0..count as u64 {
            digits.clear();
            for j in 0..p as u64 {
                digits.push(source.bit(bits::pairing(k, j)?)?);
            }
            values.push(gaussian_from_bits(&digits, tol)?);
        }
        Ok(Self {
            source,
            precision,
            values,
        })
    }

    /// Builds a sequence from explicit values, for scaling tests and for
    /// coefficients that did not come from a bit string.
    pub fn from_values(values: Vec<f64>, source: Arc<dyn BitSource>) -> Self {
        Self {
            source,
            precision: 0,
            values,
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn source(&self) -> &Arc<dyn BitSource> {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        self.values
            .get(k)
            .copied()
            .ok_or(Error::InsufficientVariates {
                required: k as u64 + 1,
                available: self.values.len() as u64,
            })
    }

    /// (X_n, Y_n) = (ξ_{2n}, ξ_{2n+1}).
    pub fn xy_split(&self, n: usize) -> Result<(f64, f64)> {
        if self.values.len() < 2 * n + 2 {
            return Err(Error::InsufficientVariates {
                required: 2 * n as u64 + 2,
                available: self.values.len() as u64,
            });
        }
        Ok((self.values[2 * n], self.values[2 * n + 1]))
    }

    /// Multiplies every variate by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            source: Arc::clone(&self.source),
            precision: self.precision,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Free-function form of [`NormalSequence::new`].
pub fn normal_sequence(
    source: Arc<dyn BitSource>,
    count: usize,
    precision: u32,
) -> Result<NormalSequence> {
    NormalSequence::new(source, count, precision)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{BitString, SeededBits};
    use proptest::prelude::*;

    #[test]
    fn known_quantiles() {
        assert_eq!(inverse_gaussian_cdf(0.5, DEFAULT_TOL).unwrap(), 0.0);
        // Expected values from the quadrature-bisection oracle.
        let z1 = oracle::inverse(0.841_344_746);
        let z2 = oracle::inverse(0.977_249_868);
        assert!((z1 - 1.0).abs() < 1e-6, "oracle {z1}");
        assert!((z2 - 2.0).abs() < 1e-6, "oracle {z2}");
        assert!((inverse_gaussian_cdf(0.841_344_746, DEFAULT_TOL).unwrap() - z1).abs() < 1e-9);
        assert!((inverse_gaussian_cdf(0.977_249_868, DEFAULT_TOL).unwrap() - z2).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        for q in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(inverse_gaussian_cdf(q, DEFAULT_TOL).is_err());
        }
        assert!(matches!(inverse_gaussian_cdf(0.3, 0.0), Err(Error::Tolerance(_))));
    }

    #[test]
    fn symmetry() {
        let tol = 1e-9;
        for q in [0.01, 0.1, 0.3] {
            let a = inverse_gaussian_cdf(q, tol).unwrap();
            let b = inverse_gaussian_cdf(1.0 - q, tol).unwrap();
            assert!((a + b).abs() <= 2.0 * tol);
        }
    }

    #[test]
    fn constant_sources() {
        let quartile = oracle::inverse(0.25);
        let lo = NormalSequence::new(Arc::new(BitString::constant(-1, 64)), 10, 1).unwrap();
        let hi = NormalSequence::new(Arc::new(BitString::constant(1, 64)), 10, 1).unwrap();
        for k in 0..10 {
            assert!((lo.get(k).unwrap() - quartile).abs() < 1e-9);
            assert!((hi.get(k).unwrap() + quartile).abs() < 1e-9);
        }
        assert!((quartile + 0.674_49).abs() < 1e-5);
    }

    #[test]
    fn normal_sequence_reads_the_pairing_subsequence() {
        let src: Arc<dyn BitSource> = Arc::new(SeededBits::new(11));
        let ns = NormalSequence::new(Arc::clone(&src), 20, 12).unwrap();
        for k in 0..20 {
            let beta = bits::subsequence(&src, k as u64, 12).unwrap();
            let q = bits::bits_to_unit_real(beta.as_slice()).unwrap();
            let z = inverse_gaussian_cdf(q, DEFAULT_TOL).unwrap();
            assert_eq!(ns.get(k).unwrap(), z);
        }
    }

    #[test]
    fn finite_source_too_short() {
        let src: Arc<dyn BitSource> = Arc::new(BitString::constant(1, 10));
        assert!(matches!(
            NormalSequence::new(src, 5, 8),
            Err(Error::SourceExhausted { .. })
        ));
    }

    #[test]
    fn xy_split_indices() {
        let ns = NormalSequence::from_values(
            (0..8).map(f64::from).collect(),
            Arc::new(BitString::constant(1, 0)),
        );
        assert_eq!(ns.xy_split(0).unwrap(), (0.0, 1.0));
        assert_eq!(ns.xy_split(3).unwrap(), (6.0, 7.0));
        assert!(matches!(
            ns.xy_split(4),
            Err(Error::InsufficientVariates { required: 10, available: 8 })
        ));
    }

    #[test]
    fn extreme_precision_stays_finite() {
        for sign in [-1, 1] {
            let ns = NormalSequence::new(Arc::new(BitString::constant(sign, 5000)), 3, 64).unwrap();
            for &v in ns.values() {
                assert!(v.is_finite() && v.abs() > 9.0);
            }
        }
    }

    proptest! {
        #[test]
        fn monotone(a in 1e-12f64..1.0, b in 1e-12f64..1.0) {
            prop_assume!(a < 1.0 && b < 1.0);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let zl = inverse_gaussian_cdf(lo, DEFAULT_TOL).unwrap();
            let zh = inverse_gaussian_cdf(hi, DEFAULT_TOL).unwrap();
            prop_assert!(zl <= zh);
        }

        #[test]
        fn newton_contract(q in 1e-15f64..0.999_999) {
            let z = inverse_gaussian_cdf(q, 1e-9).unwrap();
            let resid = (normal_cdf(z) - q).abs();
            prop_assert!(resid <= 1e-9 * normal_pdf(z) + 1e-16);
        }
    }
}
