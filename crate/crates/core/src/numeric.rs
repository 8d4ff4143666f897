//! Small numeric helpers: log-factorials and sign-aware log-space powers.
//!
//! Binomial weights and the closed-form twisting curves involve factors like
//! `C(2j, j-μ)` and `(cos 2τ)^(N-2)` at `N = 10⁴`, far outside the range of
//! naive floating-point evaluation. Everything here works in log space and
//! tracks signs separately.

/// Table of `ln(k!)` for `k = 0..=n_max`, built once per use site.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn up_to(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=n_max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`.
    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// `ln C(n, k)` without a reusable table.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    LogFactorials::up_to(n).ln_binomial(n, k)
}

/// `x^n` for integer `n ≥ 0`, evaluated as `sign(x)^n · exp(n · ln|x|)`.
///
/// `0^0` is taken to be 1, matching the closed-form curves this feeds.
pub fn signed_powi(x: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    let magnitude = (n as f64) * x.abs().ln();
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    sign * magnitude.exp()
}
