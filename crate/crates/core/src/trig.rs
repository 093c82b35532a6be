//! Evaluation of trigonometric polynomials on rational grids.
//!
//! On the grid t = r/L the phase n·t reduces exactly to (n·r mod L)/L, so a
//! polynomial Σ a_n cos 2πnt + b_n sin 2πnt needs only table lookups.

use std::f64::consts::TAU;

/// sin and cos of 2πr/L for r < L.
pub(crate) struct GridTable {
    len: u64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl GridTable {
    pub fn new(len: u64) -> Self {
        assert!(len >= 1);
        let (sin, cos) = (0..len)
            .map(|r| (TAU * (r as f64 / len as f64)).sin_cos())
            .unzip();
        Self { len, cos, sin }
    }

    /// Σ_{i} a[i]·cos(2π(first+i)r/L) + b[i]·sin(2π(first+i)r/L).
    ///
    /// `b` may be empty, meaning all zero.
    pub fn eval(&self, first: u64, a: &[f64], b: &[f64], r: u64) -> f64 {
        debug_assert!(b.is_empty() || b.len() == a.len());
        let l = self.len;
        let step = r % l;
        let mut idx = ((first % l) as u128 * step as u128 % l as u128) as u64;
        let mut s = 0.0;
        if b.is_empty() {
            for &ai in a {
                s += ai * self.cos[idx as usize];
                idx += step;
                if idx >= l {
                    idx -= l;
                }
            }
        } else {
            for (&ai, &bi) in a.iter().zip(b) {
                s += ai * self.cos[idx as usize] + bi * self.sin[idx as usize];
                idx += step;
                if idx >= l {
                    idx -= l;
                }
            }
        }
        s
    }
}

/// cos(2π·n·t + φ) with n·t reduced modulo 1 before scaling.
#[inline]
pub(crate) fn cos_phase(n: u64, t: f64, phase: f64) -> f64 {
    (TAU * (n as f64 * t).fract() + phase).cos()
}

/// (sin 2πnt, cos 2πnt) with the same reduction.
#[inline]
pub(crate) fn sin_cos_turns(n: u64, t: f64) -> (f64, f64) {
    (TAU * (n as f64 * t).fract()).sin_cos()
}
