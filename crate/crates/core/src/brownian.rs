//! The Fourier–Wiener series
//!
//! W(t) = X_0 t + √2 Σ_{n≥1} (1/(2πn)) (X_n sin 2πnt + Y_n (1 − cos 2πnt))
//!
//! with (X_n, Y_n) = (ξ_{2n}, ξ_{2n+1}) taken from a [`NormalSequence`],
//! together with its dyadic block polynomials and the C_n slope codes.
//!
//! The theoretical truncation error (12/π)·N_{j−2}^{−1} only reaches 10⁻³ at
//! j = 6, i.e. 2⁶⁴ terms. Paths are therefore computed at a user-chosen
//! truncation, and the bound is attached to a [`PathSample`] only when the
//! truncation sits exactly on a block boundary N_j − 1.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::bits::{BitSource, Origin, SeededBits};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fourier::{cut_point, BlockIndex, BLOCK_TERM_CAP};
use crate::gaussian::NormalSequence;
use crate::trig::{sin_cos_turns, GridTable};

/// The series truncated after frequency N.
#[derive(Debug, Clone)]
pub struct FourierWienerSeries {
    normals: Arc<NormalSequence>,
    truncation: u64,
    x0: f64,
    // √2 X_n / (2πn) and √2 Y_n / (2πn) for n = 1..=N.
    sin_coef: Vec<f64>,
    cos_coef: Vec<f64>,
}

impl FourierWienerSeries {
    pub fn new(normals: Arc<NormalSequence>, truncation: u64) -> Result<Self> {
        normals.xy_split(truncation as usize)?;
        let x0 = normals.get(0)?;
        let mut sin_coef = Vec::with_capacity(truncation as usize);
        let mut cos_coef = Vec::with_capacity(truncation as usize);
        for n in 1..=truncation as usize {
            let (x, y) = normals.xy_split(n)?;
            let scale = SQRT_2 / (TAU * n as f64);
            sin_coef.push(scale * x);
            cos_coef.push(scale * y);
        }
        Ok(Self {
            normals,
            truncation,
            x0,
            sin_coef,
            cos_coef,
        })
    }

    /// Builds the normals from a seeded stream: 2N + 2 variates at `precision` bits.
    pub fn from_seed(seed: u64, truncation: u64, precision: u32) -> Result<Self> {
        Self::from_source(Arc::new(SeededBits::new(seed)), truncation, precision)
    }

    pub fn from_source(source: Arc<dyn BitSource>, truncation: u64, precision: u32) -> Result<Self> {
        let normals = NormalSequence::new(source, 2 * truncation as usize + 2, precision)?;
        Self::new(Arc::new(normals), truncation)
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn normals(&self) -> &Arc<NormalSequence> {
        &self.normals
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// W^N(t).
    pub fn fw_partial(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} is outside [0, 1]")));
        }
        let mut s = 0.0;
        for (i, (&a, &b)) in self.sin_coef.iter().zip(&self.cos_coef).enumerate() {
            let (sn, cs) = sin_cos_turns(i as u64 + 1, t);
            s += a * sn + b * (1.0 - cs);
        }
        Ok(self.x0 * t + s)
    }

    pub fn fw_path(&self, grid: &[f64]) -> Result<PathSample> {
        self.fw_path_with(grid, Exec::default())
    }

    /// Evaluates W^N on a sorted grid.
    pub fn fw_path_with(&self, grid: &[f64], exec: Exec) -> Result<PathSample> {
        check_grid(grid)?;
        let values = exec.map_slice(grid, |&t| self.fw_partial(t));
        let values = values.into_iter().collect::<Result<Vec<_>>>()?;
        let tail = (2..=5u32)
            .find(|&j| cut_point(j) == Some(self.truncation + 1))
            .map(|j| tail_bound(j).expect("j >= 2"));
        Ok(PathSample {
            grid: grid.to_vec(),
            values,
            truncation: Some(self.truncation),
            tail_bound_reported: tail,
            origin: self.normals.source().origin(),
        })
    }

    /// Grid maxima of |P_k| and |Q_k| over t = i/M, i < M, where
    /// P_k(t) = Σ_{N_k ≤ n < N_{k+1}} (X_n/n) sin 2πnt and
    /// Q_k(t) = Σ (Y_n/n)(1 − cos 2πnt), without the 1/2π factor.
    pub fn pq_block_sup(&self, k: BlockIndex, m: u64) -> Result<(f64, f64)> {
        pq_block_sup_with(&self.normals, k, m, BLOCK_TERM_CAP, Exec::default())
    }
}

/// [`FourierWienerSeries::pq_block_sup`] on a bare normal sequence, which
/// must hold at least 2·N_{k+1} variates.
pub fn pq_block_sup_with(
    normals: &NormalSequence,
    k: BlockIndex,
    m: u64,
    cap: u64,
    exec: Exec,
) -> Result<(f64, f64)> {
    let (lo, hi) = match (k.start(), k.end()) {
        (Some(lo), Some(hi)) if hi <= cap => (lo, hi),
        (_, hi) => {
            return Err(Error::ResourceGuard {
                k: k.k,
                terms: hi.unwrap_or(u64::MAX),
                cap,
            })
        }
    };
    if m == 0 || m > 1 << 26 {
        return Err(Error::InvalidArgument(format!("grid size {m} out of range")));
    }
    let mut xs = Vec::with_capacity((hi - lo) as usize);
    let mut ys = Vec::with_capacity((hi - lo) as usize);
    for n in lo..hi {
        let (x, y) = normals.xy_split(n as usize)?;
        xs.push(x / n as f64);
        ys.push(-y / n as f64);
    }
    let y_total: f64 = -ys.iter().sum::<f64>();
    let zeros = vec![0.0; xs.len()];
    let table = GridTable::new(m);
    let sup_p = exec::max_abs(exec, m as usize, |i| table.eval(lo, &zeros, &xs, i as u64));
    let sup_q = exec::max_abs(exec, m as usize, |i| y_total + table.eval(lo, &ys, &[], i as u64));
    Ok((sup_p, sup_q))
}

/// 6·2^{−2^{k−2}} = 6·N_{k−2}^{−1}. For k < 2 the exponent is fractional.
pub fn block_exceedance_threshold(k: u32) -> f64 {
    6.0 * 2f64.powf(-(2f64.powi(k as i32 - 2)))
}

/// (12/π)·2^{−2^{j−2}} = (12/π)·N_{j−2}^{−1}, the bound on |W − W^{N_j}|.
pub fn tail_bound(j: u32) -> Result<f64> {
    if j < 2 {
        return Err(Error::InvalidArgument(format!("tail_bound needs j >= 2, got {j}")));
    }
    Ok(12.0 / PI * 2f64.powf(-(2f64.powi(j as i32 - 2))))
}

/// E[W^N(t)²] = t² + (2/π²) Σ_{n=1}^{N} sin²(πnt)/n² under i.i.d. N(0,1) coefficients.
pub fn truncated_variance(t: f64, n: u64) -> f64 {
    let s: f64 = (1..=n)
        .map(|l| {
            // sin²(πlt) = (1 − cos 2πlt)/2
            let (_, c) = sin_cos_turns(l, t);
            0.5 * (1.0 - c) / (l as f64 * l as f64)
        })
        .sum();
    t * t + 2.0 / (PI * PI) * s
}

/// `points` equispaced times i/(points − 1) covering [0, 1].
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    for (i, &t) in grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) || (i > 0 && t <= grid[i - 1]) {
            return Err(Error::BadGrid(i));
        }
    }
    Ok(())
}

/// A function sampled on a grid of [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub truncation: Option<u64>,
    pub tail_bound_reported: Option<f64>,
    pub origin: Origin,
}

impl PathSample {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, origin: Origin) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("value {i} is not finite")));
        }
        Ok(Self {
            grid,
            values,
            truncation: None,
            tail_bound_reported: None,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Value at a grid point within 1e−12 of `t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let i = self.grid.partition_point(|&g| g < t - 1e-12);
        match self.grid.get(i) {
            Some(&g) if (g - t).abs() <= 1e-12 => Ok(self.values[i]),
            _ => Err(Error::MissingGridPoint(t)),
        }
    }

    /// Linear interpolation between samples, constant beyond the ends.
    pub fn interpolate(&self, t: f64) -> f64 {
        let g = &self.grid;
        match g.len() {
            0 => return 0.0,
            1 => return self.values[0],
            _ => {}
        }
        if t <= g[0] {
            return self.values[0];
        }
        if t >= g[g.len() - 1] {
            return self.values[g.len() - 1];
        }
        let i = g.partition_point(|&x| x <= t);
        let (t0, t1) = (g[i - 1], g[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// An element of C_n: vanishes at 0, slope signs_i·√n on [(i−1)/n, i/n].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiecewiseLinearPath {
    pub signs: Vec<i8>,
}

impl PiecewiseLinearPath {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::EmptyBits);
        }
        if let Some(i) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("sign {i} is {}", signs[i])));
        }
        Ok(Self { signs })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    /// Values at i/n, i = 0..=n.
    pub fn node_values(&self) -> Vec<f64> {
        let root = (self.n() as f64).sqrt();
        let mut acc = 0i64;
        std::iter::once(0.0)
            .chain(self.signs.iter().map(|&s| {
                acc += s as i64;
                acc as f64 / root
            }))
            .collect()
    }

    /// x(t) for t in [0, 1].
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.n();
        let root = (n as f64).sqrt();
        let pos = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let seg = (pos.floor() as usize).min(n - 1);
        let base: i64 = self.signs[..seg].iter().map(|&s| s as i64).sum();
        (base as f64 + self.signs[seg] as f64 * (pos - seg as f64)) / root
    }
}

/// Slope signs of `path` over the intervals [(i−1)/n, i/n]; a zero increment
/// counts as +1.
pub fn encode_cn(path: &PathSample, n: usize) -> Result<PiecewiseLinearPath> {
    if n == 0 {
        return Err(Error::InvalidArgument("C_n needs n >= 1".into()));
    }
    let nodes = (0..=n)
        .map(|i| path.value_at(i as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    let signs = nodes
        .windows(2)
        .map(|w| if w[1] - w[0] >= 0.0 { 1 } else { -1 })
        .collect();
    PiecewiseLinearPath::new(signs)
}

/// The code's values on the grid {i/n}.
pub fn decode_cn(code: &PiecewiseLinearPath) -> Result<PathSample> {
    if code.signs.is_empty() {
        return Err(Error::EmptyBits);
    }
    let n = code.n();
    PathSample::new(
        (0..=n).map(|i| i as f64 / n as f64).collect(),
        code.node_values(),
        Origin::Pattern(format!("C_{n}")),
    )
}

/// Default comparison grid for [`oscillation_distance`]: M = 16n.
pub fn default_oscillation_grid(n: usize) -> usize {
    16 * n
}

/// max over t = s/M, s = 0..=M, of |path(t) − x_n(t)| where
/// x_n = decode(encode(path, n)); the path is linearly interpolated.
pub fn oscillation_distance(path: &PathSample, n: usize, m: usize) -> Result<f64> {
    if path.len() < n + 1 {
        return Err(Error::PathTooSparse {
            samples: path.len(),
            required: n + 1,
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("comparison grid needs M >= 1".into()));
    }
    let code = encode_cn(path, n)?;
    Ok((0..=m)
        .map(|s| {
            let t = s as f64 / m as f64;
            (path.interpolate(t) - code.value_at(t)).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use proptest::prelude::*;

    fn series(seed: u64, n: u64) -> FourierWienerSeries {
        FourierWienerSeries::from_seed(seed, n, 53).unwrap()
    }

    #[test]
    fn endpoint_identities() {
        for seed in 0..20 {
            for n in [0u64, 1, 7, 300] {
                let fw = series(seed, n);
                assert_eq!(fw.fw_partial(0.0).unwrap(), 0.0);
                assert_eq!(fw.fw_partial(1.0).unwrap(), fw.normals().get(0).unwrap());
            }
        }
    }

    #[test]
    fn midpoint_reduces_to_odd_terms() {
        let fw = series(9, 501);
        let ns = fw.normals();
        let odd: f64 = (1..=501usize).step_by(2).map(|n| ns.xy_split(n).unwrap().1 / n as f64).sum();
        let expect = ns.get(0).unwrap() / 2.0 + SQRT_2 / PI * odd;
        assert!((fw.fw_partial(0.5).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn path_examples() {
        let fw = series(1, 64);
        let p = fw.fw_path(&[0.0]).unwrap();
        assert_eq!(p.values, vec![0.0]);
        let p = fw.fw_path(&[0.0, 1.0]).unwrap();
        assert_eq!(p.values, vec![0.0, fw.x0()]);
        assert!(matches!(fw.fw_path(&[0.5, 0.2]), Err(Error::BadGrid(1))));
        assert!(matches!(fw.fw_path(&[0.0, 1.2]), Err(Error::BadGrid(1))));
        let grid = uniform_grid(33);
        let p = fw.fw_path(&grid).unwrap();
        for (t, v) in grid.iter().zip(&p.values) {
            assert_eq!(*v, fw.fw_partial(*t).unwrap());
        }
        assert_eq!(p.tail_bound_reported, None);
    }

    #[test]
    fn tail_bound_attached_on_block_boundaries() {
        for (j, n) in [(2u32, 15u64), (3, 255)] {
            let p = series(0, n).fw_path(&uniform_grid(5)).unwrap();
            assert_eq!(p.tail_bound_reported, Some(tail_bound(j).unwrap()));
        }
    }

    #[test]
    fn threshold_and_tail_tables() {
        assert_eq!(block_exceedance_threshold(2), 3.0);
        assert_eq!(block_exceedance_threshold(3), 1.5);
        assert_eq!(block_exceedance_threshold(4), 0.375);
        assert!((block_exceedance_threshold(1) - 6.0 / SQRT_2).abs() < 1e-12);
        assert!((tail_bound(4).unwrap() - 0.238_73).abs() < 5e-6);
        assert!((tail_bound(5).unwrap() - 0.014_921).abs() < 5e-7);
        assert!((tail_bound(6).unwrap() - 5.828e-5).abs() < 1e-8);
        assert!(tail_bound(1).is_err());
    }

    #[test]
    fn pq_examples() {
        let zeros = NormalSequence::from_values(vec![0.0; 64], Arc::new(BitString::constant(1, 0)));
        let (p, q) = pq_block_sup_with(&zeros, BlockIndex::new(1), 100, BLOCK_TERM_CAP, Exec::Sequential).unwrap();
        assert_eq!((p, q), (0.0, 0.0));

        let ones = NormalSequence::from_values(vec![1.0; 8], Arc::new(BitString::constant(1, 0)));
        let (p, _) = pq_block_sup_with(&ones, BlockIndex::new(0), 100_000, BLOCK_TERM_CAP, Exec::Parallel).unwrap();
        // Dense-grid oracle for |sin 4πt / 2 + sin 6πt / 3|.
        let dense = (0..2_000_000)
            .map(|i| {
                let t = i as f64 / 2e6;
                ((4.0 * PI * t).sin() / 2.0 + (6.0 * PI * t).sin() / 3.0).abs()
            })
            .fold(0.0, f64::max);
        assert!((dense - 0.792_547).abs() < 1e-6, "{dense}");
        assert!((p - dense).abs() < 1e-6);
    }

    #[test]
    fn pq_bounds_and_guard() {
        let fw = series(4, 300);
        let ns = fw.normals();
        let k = BlockIndex::new(2);
        let (p, q) = pq_block_sup_with(ns, k, 4096, BLOCK_TERM_CAP, Exec::Parallel).unwrap();
        let l1: f64 = (16..256usize).map(|n| ns.xy_split(n).unwrap().1.abs() / n as f64).sum();
        assert!(q <= 2.0 * l1 + 1e-12);
        let lp: f64 = (16..256usize).map(|n| ns.xy_split(n).unwrap().0.abs() / n as f64).sum();
        assert!(p <= lp + 1e-12);
        assert!(matches!(
            fw.pq_block_sup(BlockIndex::new(3), 100),
            Err(Error::InsufficientVariates { .. })
        ));
        assert!(matches!(
            fw.pq_block_sup(BlockIndex::new(4), 100),
            Err(Error::ResourceGuard { .. })
        ));
        // Scaling the normals scales both sups.
        let scaled = ns.scaled(2.5);
        let (p2, q2) = pq_block_sup_with(&scaled, k, 4096, BLOCK_TERM_CAP, Exec::Sequential).unwrap();
        assert!((p2 - 2.5 * p).abs() < 1e-12 && (q2 - 2.5 * q).abs() < 1e-12);
        let thr = block_exceedance_threshold(2);
        assert_eq!(p > thr, p2 > 2.5 * thr);
    }

    #[test]
    fn variance_identity() {
        for t in [0.25, 0.5, 0.75] {
            assert!((truncated_variance(t, 4096) - t).abs() < 1e-3);
        }
        assert_eq!(truncated_variance(0.0, 100), 0.0);
        assert_eq!(truncated_variance(1.0, 100), 1.0);
    }

    #[test]
    fn decode_examples() {
        let d = decode_cn(&PiecewiseLinearPath::new(vec![1]).unwrap()).unwrap();
        assert_eq!(d.values, vec![0.0, 1.0]);
        let d = decode_cn(&PiecewiseLinearPath::new(vec![1, 1, -1, -1]).unwrap()).unwrap();
        assert_eq!(d.values, vec![0.0, 0.5, 1.0, 0.5, 0.0]);
        let d = decode_cn(&PiecewiseLinearPath::new(vec![1, -1]).unwrap()).unwrap();
        assert_eq!(d.values[0], 0.0);
        assert!((d.values[1] - SQRT_2 / 2.0).abs() < 1e-15);
        assert!(d.values[2].abs() < 1e-15);
        assert!(PiecewiseLinearPath::new(vec![]).is_err());
        assert!(PiecewiseLinearPath::new(vec![1, 0]).is_err());
    }

    #[test]
    fn encode_examples() {
        let up = PathSample::new(uniform_grid(9), (0..9).map(|i| i as f64).collect(), Origin::Pattern("up".into())).unwrap();
        assert_eq!(encode_cn(&up, 8).unwrap().signs, vec![1; 8]);
        let tent = PathSample::new(vec![0.0, 0.5, 1.0], vec![0.0, SQRT_2 / 2.0, 0.0], Origin::Pattern("tent".into())).unwrap();
        assert_eq!(encode_cn(&tent, 2).unwrap().signs, vec![1, -1]);
        assert!(matches!(encode_cn(&tent, 3), Err(Error::MissingGridPoint(_))));
    }

    #[test]
    fn oscillation_examples() {
        let code = PiecewiseLinearPath::new(vec![1, -1, -1, 1, 1, 1, -1, 1]).unwrap();
        let exact = decode_cn(&code).unwrap();
        assert!(oscillation_distance(&exact, 8, 128).unwrap() < 1e-15);

        let flat = PathSample::new(uniform_grid(2), vec![0.0, 0.0], Origin::Pattern("zero".into())).unwrap();
        assert_eq!(oscillation_distance(&flat, 1, 16).unwrap(), 1.0);
        let flat4 = PathSample::new(uniform_grid(5), vec![0.0; 5], Origin::Pattern("zero".into())).unwrap();
        assert_eq!(oscillation_distance(&flat4, 4, 64).unwrap(), 2.0);
        assert!(matches!(
            oscillation_distance(&flat, 4, 64),
            Err(Error::PathTooSparse { samples: 2, required: 5 })
        ));
    }

    proptest! {
        #[test]
        fn cn_round_trip(signs in proptest::collection::vec(prop_oneof![Just(-1i8), Just(1i8)], 1..=1024)) {
            let code = PiecewiseLinearPath::new(signs).unwrap();
            let path = decode_cn(&code).unwrap();
            let again = encode_cn(&path, code.n()).unwrap();
            prop_assert_eq!(&again, &code);
            prop_assert_eq!(decode_cn(&again).unwrap().values, path.values);
        }

        #[test]
        fn value_at_matches_nodes(signs in proptest::collection::vec(prop_oneof![Just(-1i8), Just(1i8)], 1..=64)) {
            let code = PiecewiseLinearPath::new(signs).unwrap();
            let n = code.n();
            for (i, v) in code.node_values().iter().enumerate() {
                prop_assert!((code.value_at(i as f64 / n as f64) - v).abs() < 1e-12);
            }
        }
    }
}
