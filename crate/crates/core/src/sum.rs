//! Exactly rounded floating point summation.
//!
//! Keeps a list of non-overlapping partials (Shewchuk) so the final total is
//! the correctly rounded value of the exact sum of every term added. Two
//! accumulators fed the same multiset of reals, in any order or split into
//! any exact pieces, therefore return bit-identical totals.

#[derive(Debug, Default, Clone)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds `count * x` exactly (`count` must be representable, i.e. < 2^53).
    pub fn add_scaled(&mut self, x: f64, count: u64) {
        let c = count as f64;
        let p = c * x;
        let e = c.mul_add(x, -p);
        self.add(p);
        if e != 0.0 {
            self.add(e);
        }
    }

    /// Adds the exact difference `a - b`.
    pub fn add_difference_scaled(&mut self, a: f64, b: f64, count: u64) {
        let s = a - b;
        let bb = s - a;
        let e = (a - (s - bb)) + (-b - bb);
        self.add_scaled(s, count);
        if e != 0.0 {
            self.add_scaled(e, count);
        }
    }

    pub fn total(&self) -> f64 {
        let p = &self.partials;
        let Some(&last) = p.last() else {
            return 0.0;
        };
        let mut n = p.len() - 1;
        let mut hi = last;
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: round using the sign of the next partial
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

pub fn exact_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = ExactSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.total()
}
