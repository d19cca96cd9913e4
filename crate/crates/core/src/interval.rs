//! Outward-rounded f64 intervals, enough to decide strict inequalities
//! between logarithms of large quantities.

use std::ops::{Add, Mul, Neg, Sub};

/// Slack in ulps applied after every libm call, which are not correctly
/// rounded but stay within one ulp on mainstream platforms.
const LIBM_ULPS: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |x, _| x.next_down())
}

fn up(x: f64, n: u32) -> f64 {
    (0..n).fold(x, |x, _| x.next_up())
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    fn widened(lo: f64, hi: f64, ulps: u32) -> Self {
        Self {
            lo: down(lo, ulps),
            hi: up(hi, ulps),
        }
    }

    /// ln of a positive integer, exact input.
    pub fn ln_u64(n: u64) -> Self {
        assert!(n > 0);
        let x = n as f64;
        // the conversion itself may round for n > 2^53
        let (lo, hi) = if x as u64 == n { (x, x) } else { (x.next_down(), x.next_up()) };
        Self::widened(lo.ln(), hi.ln(), LIBM_ULPS)
    }

    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0);
        Self::widened(self.lo.ln(), self.hi.ln(), LIBM_ULPS)
    }

    pub fn exp(self) -> Self {
        Self::widened(self.lo.exp(), self.hi.exp(), LIBM_ULPS)
    }

    /// ln(1 + x) for x > -1.
    pub fn ln_1p(self) -> Self {
        Self::widened(self.lo.ln_1p(), self.hi.ln_1p(), LIBM_ULPS)
    }

    pub fn div(self, o: Self) -> Self {
        assert!(o.lo > 0.0 || o.hi < 0.0, "division by an interval containing 0");
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Self::widened(min4(c), max4(c), 1)
    }

    pub fn max(self, o: Self) -> Self {
        Self {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    /// ln(e^a + e^b).
    pub fn log_sum_exp(a: Self, b: Self) -> Self {
        let m = a.max(b);
        // shift by the lower bound of the max so the exponents stay <= width
        let s = Self::point(m.lo);
        let t = (a - s).exp() + (b - s).exp();
        t.ln() + s
    }

    pub fn certainly_lt(self, o: Self) -> bool {
        self.hi < o.lo
    }

    pub fn certainly_ge(self, o: Self) -> bool {
        self.lo >= o.hi
    }
}

fn min4(c: [f64; 4]) -> f64 {
    c.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max4(c: [f64; 4]) -> f64 {
    c.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

impl Add for Interval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::widened(self.lo + o.lo, self.hi + o.hi, 1)
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::widened(self.lo - o.hi, self.hi - o.lo, 1)
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Self::widened(min4(c), max4(c), 1)
    }
}
