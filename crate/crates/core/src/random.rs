//! Reproducible random data.
//!
//! Everything is drawn from a ChaCha8 stream; floats come from the top 53 bits
//! of a `u64`, so a seed produces the same samples on every platform.

use crate::prelude::*;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct LabRng(ChaCha8Rng);

impl LabRng {
    pub fn new(seed: u64) -> Self {
        LabRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    /// Standard normal sample (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }
}

/// A finite real trigonometric series on the unit torus `ℝᵈ/ℤᵈ`, without
/// constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    terms: Vec<(Vec<i32>, f64, f64)>,
}

impl TrigSeries {
    pub fn new(terms: Vec<(Vec<i32>, f64, f64)>) -> Self {
        TrigSeries { terms }
    }

    /// Random series in `axes` variables with frequencies `|k_a| ≤ max_freq`;
    /// coefficients decay like `1/(1+|k|²)` and the sup-norm is at most `amplitude`.
    pub fn random(rng: &mut LabRng, axes: usize, max_freq: i32, amplitude: f64) -> Self {
        let span = (2 * max_freq + 1) as usize;
        let total = span.pow(axes as u32);
        let mut terms = Vec::new();
        for code in 0..total {
            let mut c = code;
            let k: Vec<i32> = (0..axes)
                .map(|_| {
                    let v = (c % span) as i32 - max_freq;
                    c /= span;
                    v
                })
                .collect();
            // Keep one representative of each ±k pair.
            match k.iter().find(|&&x| x != 0) {
                Some(&first) if first > 0 => {}
                _ => continue,
            }
            let k2: i32 = k.iter().map(|x| x * x).sum();
            let decay = 1.0 / (1.0 + k2 as f64);
            terms.push((k, decay * rng.uniform(-1.0, 1.0), decay * rng.uniform(-1.0, 1.0)));
        }
        let bound: f64 = terms.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
        if bound > 0.0 {
            let s = amplitude / bound;
            for t in &mut terms {
                t.1 *= s;
                t.2 *= s;
            }
        }
        TrigSeries { terms }
    }

    /// `(k, a, b)` for each term `a cos 2πk·x + b sin 2πk·x`.
    pub fn terms(&self) -> &[(Vec<i32>, f64, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a, b)| {
                let ph = 2.0 * PI * k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum::<f64>();
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigSeries { terms: self.terms.iter().map(|(k, a, b)| (k.clone(), a * s, b * s)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<f64> = {
            let mut r = LabRng::new(7);
            (0..5).map(|_| r.normal()).collect()
        };
        let mut r = LabRng::new(7);
        let b: Vec<f64> = (0..5).map(|_| r.normal()).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn series_respects_amplitude_and_is_mean_free() {
        let mut r = LabRng::new(1);
        let s = TrigSeries::random(&mut r, 2, 2, 0.3);
        let m = 16;
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                let v = s.eval(&[i as f64 / m as f64, j as f64 / m as f64]);
                assert!(v.abs() <= 0.3 + 1e-12);
                sum += v;
            }
        }
        assert!(sum.abs() < 1e-12);
    }
}
