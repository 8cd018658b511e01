//! Compensated and log-domain summation.
//!
//! Every reduction in the pipeline goes through these helpers in a fixed
//! order, so results do not depend on how work was split across threads.

/// Version tag of the summation schedule recorded in certificates.
pub const SUMMATION_SCHEDULE: &str = "neumaier-logsumexp-v1";

/// Neumaier (improved Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sums an iterator with Neumaier compensation in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `ln(sum(exp(l_i)))` with a max shift and compensated inner sum.
///
/// Returns `-inf` for an empty slice or when every term is `-inf`, and
/// `+inf` as soon as one term is `+inf`.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    let inner = compensated_sum(logs.iter().map(|&l| (l - m).exp()));
    m + inner.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(expm1(x) / x)`, the log of the mean of `e^y` over `y in [0, x]`.
///
/// Stable for tiny `|x|` and for `x` far beyond the overflow threshold.
pub fn ln_rel_expm1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        x / 2.0
    } else if x > 30.0 {
        // expm1(x) = e^x (1 - e^-x)
        x + (-(-x).exp()).ln_1p() - x.ln()
    } else {
        (x.exp_m1() / x).ln()
    }
}

/// Least-squares slope and root-mean-square residual of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = compensated_sum(
        x.iter()
            .zip(y)
            .map(|(a, b)| (b - (intercept + slope * a)).powi(2)),
    );
    (slope, (rss / n).sqrt())
}
