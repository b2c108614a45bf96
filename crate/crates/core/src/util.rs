//! Compensated summation and small shared helpers.

use num_complex::Complex64;

/// Neumaier-compensated accumulator.  Used for every sum whose terms span
/// many orders of magnitude or alternate in sign, and to keep parallel
/// pipelines deterministic: parallel stages collect per-item values in index
/// order and a single accumulator folds them sequentially.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        // Neumaier variant: compensate whichever operand lost digits
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Kahan::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    pub fn new() -> Self {
        KahanC::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e16 - 1e16 collapses naively
        let xs = [1.0, 1e16, -1e16];
        assert_eq!(kahan_sum(xs), 1.0);
        let mut naive = 0.0;
        for x in xs {
            naive += x;
        }
        assert_ne!(naive, 1.0);
    }

    #[test]
    fn gcd_small() {
        assert_eq!(gcd_u64(12, 18), 6);
        assert_eq!(gcd_u64(1, 7), 1);
        assert_eq!(gcd_u64(0, 5), 5);
        assert_eq!(gcd_u64(35, 0), 35);
    }
}
