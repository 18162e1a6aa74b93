//! Piecewise-constant functions on a line.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// A closed interval `[lo, hi]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Interval { lo, hi }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Length of the intersection with `other`.
    #[inline]
    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.hi.min(other.hi) - self.lo.max(other.lo)).max(0.0)
    }
}

/// `f(x) = values[i]` on `[breakpoints[i], breakpoints[i+1])`, zero outside
/// `[breakpoints[0], breakpoints[last])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    /// `prefix[i]` is the integral of `f` over `(-inf, breakpoints[i]]`.
    prefix: Vec<f64>,
}

impl Default for StepFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction {
            breakpoints: Vec::new(),
            values: Vec::new(),
            prefix: Vec::new(),
        }
    }

    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "step function entries must be finite".into(),
            ));
        }
        Ok(Self::from_parts(breakpoints, values))
    }

    fn from_parts(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut prefix = Vec::with_capacity(breakpoints.len());
        let mut acc = Neumaier::new();
        prefix.push(0.0);
        for (w, v) in breakpoints.windows(2).zip(&values) {
            acc.add(v * (w[1] - w[0]));
            prefix.push(acc.value());
        }
        if breakpoints.is_empty() {
            prefix.clear();
        }
        StepFunction {
            breakpoints,
            values,
            prefix,
        }
    }

    /// `sum_k w_k * indicator(I_k)`, built by sweeping the interval endpoints.
    ///
    /// Active intervals are counted per distinct weight and each segment's
    /// value is re-summed from those counts, so segments where nothing is
    /// active are exactly zero rather than the residue of `+w - w`.
    pub fn from_weighted_intervals<I>(items: I) -> Self
    where
        I: IntoIterator<Item = (Interval, f64)>,
    {
        let mut events: Vec<(f64, u64, i64)> = Vec::new();
        for (iv, w) in items {
            if iv.is_empty() || w == 0.0 {
                continue;
            }
            events.push((iv.lo, w.to_bits(), 1));
            events.push((iv.hi, w.to_bits(), -1));
        }
        if events.is_empty() {
            return Self::zero();
        }
        events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut active: BTreeMap<u64, i64> = BTreeMap::new();
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < events.len() {
            let x = events[i].0;
            while i < events.len() && events[i].0 == x {
                let (_, bits, delta) = events[i];
                let count = active.entry(bits).or_insert(0);
                *count += delta;
                if *count == 0 {
                    active.remove(&bits);
                }
                i += 1;
            }
            breakpoints.push(x);
            if i < events.len() {
                let mut acc = Neumaier::new();
                for (&bits, &count) in &active {
                    acc.add(count as f64 * f64::from_bits(bits));
                }
                values.push(acc.value());
            }
        }
        debug_assert!(active.is_empty());
        Self::from_parts(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `(lo, hi, value)` for every segment.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Closure of the support hull, or `None` for the empty function.
    pub fn support(&self) -> Option<Interval> {
        Some(Interval::new(
            *self.breakpoints.first()?,
            *self.breakpoints.last()?,
        ))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b <= x) {
            0 => 0.0,
            k if k >= self.breakpoints.len() => 0.0,
            k => self.values[k - 1],
        }
    }

    pub fn integral(&self) -> f64 {
        self.prefix.last().copied().unwrap_or(0.0)
    }

    /// `integral of f^2`.
    pub fn integral_sq(&self) -> f64 {
        let mut acc = Neumaier::new();
        for (lo, hi, v) in self.segments() {
            acc.add(v * v * (hi - lo));
        }
        acc.value()
    }

    pub fn l2_norm(&self) -> f64 {
        self.integral_sq().sqrt()
    }

    /// `integral of f over (-inf, x]`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 {
            return 0.0;
        }
        if k >= self.breakpoints.len() {
            return self.integral();
        }
        self.prefix[k - 1] + self.values[k - 1] * (x - self.breakpoints[k - 1])
    }

    /// `integral of f over [a, b]`.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        self.cumulative(b) - self.cumulative(a)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_parts(
            self.breakpoints.clone(),
            self.values.iter().map(|v| c * v).collect(),
        )
    }

    /// `(1/2eps) * integral of f over [x - eps, x + eps]`.
    pub fn window_average(&self, eps: f64, x: f64) -> f64 {
        self.integral_over(x - eps, x + eps) / (2.0 * eps)
    }

    /// Exact `integral of (window_average(eps, x))^2 dx`.
    ///
    /// The window average is continuous and piecewise linear with knots at
    /// `b_i - eps` and `b_i + eps`, so each piece integrates in closed form.
    pub fn window_average_sq_integral(&self, eps: f64) -> f64 {
        let mut knots: Vec<f64> = self
            .breakpoints
            .iter()
            .flat_map(|&b| [b - eps, b + eps])
            .collect();
        knots.sort_unstable_by(f64::total_cmp);
        knots.dedup();
        let mut acc = Neumaier::new();
        let mut prev: Option<(f64, f64)> = None;
        for &x in &knots {
            let g = self.window_average(eps, x);
            if let Some((x0, g0)) = prev {
                acc.add((x - x0) * (g0 * g0 + g0 * g + g * g) / 3.0);
            }
            prev = Some((x, g));
        }
        acc.value()
    }
}

/// Lebesgue measure of a union of intervals, by sorting on the left endpoint
/// and sweeping.
pub fn union_measure(intervals: &[Interval]) -> f64 {
    let mut sorted: Vec<Interval> = intervals
        .iter()
        .copied()
        .filter(|iv| !iv.is_empty())
        .collect();
    sorted.sort_unstable_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut acc = Neumaier::new();
    let mut iter = sorted.into_iter();
    let Some(mut run) = iter.next() else {
        return 0.0;
    };
    for iv in iter {
        if iv.lo > run.hi {
            acc.add(run.len());
            run = iv;
        } else if iv.hi > run.hi {
            run.hi = iv.hi;
        }
    }
    acc.add(run.len());
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_measure(&[iv(0.0, 1.0), iv(0.5, 2.0)]), 2.0);
        assert!((union_measure(&[iv(0.0, 0.3), iv(0.5, 0.6)]) - 0.4).abs() < 1e-15);
        let doubled = [iv(0.0, 0.5), iv(0.0, 0.5), iv(0.5, 1.0), iv(0.5, 1.0)];
        assert_eq!(union_measure(&doubled), 1.0);
        assert_eq!(union_measure(&[]), 0.0);
    }

    #[test]
    fn sweep_builds_exact_zero_gaps() {
        let f = StepFunction::from_weighted_intervals([
            (iv(0.0, 0.1), 0.3),
            (iv(0.05, 0.2), 0.7),
            (iv(0.5, 0.6), 0.3),
        ]);
        assert_eq!(f.breakpoints(), &[0.0, 0.05, 0.1, 0.2, 0.5, 0.6]);
        assert_eq!(f.values()[3], 0.0);
        assert!((f.values()[1] - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(0.55), 0.3);
        assert_eq!(f.eval(0.6), 0.0);
        assert_eq!(f.eval(-1.0), 0.0);
        assert!((f.integral() - (0.03 + 0.105 + 0.03)).abs() < 1e-15);
    }

    #[test]
    fn l2_examples() {
        let indicator = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert_eq!(indicator.l2_norm(), 1.0);
        let f = StepFunction::new(vec![0.0, 0.25, 1.0], vec![2.0, 0.5]).unwrap();
        let c = 3.5;
        assert!((f.scale(c).l2_norm() - c * f.l2_norm()).abs() < 1e-14);
        assert_eq!(StepFunction::zero().l2_norm(), 0.0);
    }

    #[test]
    fn validation() {
        assert!(StepFunction::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn window_average_cases() {
        let c = 1.7;
        let f = StepFunction::new(vec![0.0, 1.0], vec![c]).unwrap();
        assert!((f.window_average(0.1, 0.5) - c).abs() < 1e-15);
        assert_eq!(f.window_average(0.1, 5.0), 0.0);
        assert!((f.window_average(0.2, 0.0) - c / 2.0).abs() < 1e-15);
    }

    #[test]
    fn window_average_sq_integral_of_indicator() {
        // Averaging the indicator of [0,1] over half-width 1 gives a trapezoid
        // of height 1/2 on [-1, 2]: flat on [0,1], linear ramps of width 1.
        // integral of g^2 = 1/4 + 2 * (1/4)/3.
        let f = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        let exact = 0.25 + 2.0 * 0.25 / 3.0;
        assert!((f.window_average_sq_integral(1.0) - exact).abs() < 1e-14);
    }
}
