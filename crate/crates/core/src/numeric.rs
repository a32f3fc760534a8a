//! Small numerical helpers shared across modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Trapezoid rule on a uniform grid with spacing `step`.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => {
            let mut acc = CompensatedSum::new();
            acc.add(0.5 * first);
            for v in inner {
                acc.add(*v);
            }
            acc.add(0.5 * last);
            acc.value() * step
        }
    }
}

/// Rounds to `digits` significant decimal digits.
///
/// The result is the nearest double to the decimal rounding, so its shortest
/// `Display` form carries at most `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("scientific formatting round-trips")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1.0e16, 1.0, -1.0e16];
        values.extend(std::iter::repeat_n(1.0, 9));
        assert_eq!(compensated_sum(values), 10.0);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let step = 0.25;
        let ys: Vec<f64> = (0..=8).map(|i| 1.0 + i as f64 * step).collect();
        assert!((trapezoid(&ys, step) - 4.0).abs() < 1e-14);
        assert_eq!(trapezoid(&[3.0], 1.0), 0.0);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(round_significant(0.7071067811865476, 9).to_string(), "0.707106781");
        assert_eq!(round_significant(5.946035575013605, 9).to_string(), "5.94603558");
        assert_eq!(round_significant(-1.0e-20 / 3.0, 9).to_string(), "-0.00000000000000000000333333333");
        assert_eq!(round_significant(0.0, 9), 0.0);
    }
}
