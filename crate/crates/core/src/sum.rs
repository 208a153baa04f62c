//! Neumaier-compensated accumulation of complex sums.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    #[inline]
    pub(crate) fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub(crate) fn sum_complex<I: IntoIterator<Item = Complex64>>(items: I) -> Complex64 {
    let mut acc = ComplexSum::default();
    for v in items {
        acc.add(v);
    }
    acc.value()
}

pub(crate) fn sum_real<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut acc = Neumaier::default();
    for v in items {
        acc.add(v);
    }
    acc.value()
}
