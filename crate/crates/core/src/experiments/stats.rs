use serde::{Deserialize, Serialize};

/// Streaming count, mean and second central moment (Welford), mergeable
/// with Chan's combining formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StatAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl StatAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = Self::new();
        acc.extend(samples);
        acc
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Second central moment `Σ (x − x̄)²`.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn merge(&mut self, other: &Self) {
        *self = merge_accumulators(self, other);
    }
}

impl Extend<f64> for StatAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

/// Combined statistics of the union of the two sample sets.
pub fn merge_accumulators(a: &StatAccumulator, b: &StatAccumulator) -> StatAccumulator {
    if a.count == 0 {
        return *b;
    }
    if b.count == 0 {
        return *a;
    }
    let count = a.count + b.count;
    let (na, nb, n) = (a.count as f64, b.count as f64, count as f64);
    let delta = b.mean - a.mean;
    let mean = a.mean + delta * nb / n;
    let m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
    StatAccumulator { count, mean, m2 }
}

/// Sample variance of `xs` together with the standard error of that
/// variance estimate, `√((μ₄ − σ⁴(n−3)/(n−1))/n)`.
pub fn variance_with_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let acc = StatAccumulator::from_samples(xs.iter().copied());
    let mean = acc.mean();
    let var = acc.variance();
    let nf = n as f64;
    let mu4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let spread = (mu4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf;
    (var, spread.max(0.0).sqrt())
}
