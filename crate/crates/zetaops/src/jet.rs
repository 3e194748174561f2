//! Truncated Taylor series in the log coordinate x = ln t.
//!
//! A jet of length n holds c_0..c_{n-1} with f(e^{x+e}) = sum c_k e^k, so
//! (t d/dt)^k f = k! c_k.

use crate::C64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<C64>);

impl Jet {
    pub fn zeros(n: usize) -> Self {
        Jet(vec![C64::new(0.0, 0.0); n])
    }

    pub fn constant(c: C64, n: usize) -> Self {
        let mut j = Self::zeros(n);
        if n > 0 {
            j.0[0] = c;
        }
        j
    }

    /// The identity jet x0 + e.
    pub fn var(x0: f64, n: usize) -> Self {
        let mut j = Self::constant(C64::new(x0, 0.0), n);
        if n > 1 {
            j.0[1] = C64::new(1.0, 0.0);
        }
        j
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> C64 {
        self.0[0]
    }

    pub fn truncate(mut self, n: usize) -> Self {
        self.0.truncate(n);
        self
    }

    pub fn scale(&self, c: C64) -> Self {
        Jet(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add_const(mut self, c: C64) -> Self {
        if !self.0.is_empty() {
            self.0[0] += c;
        }
        self
    }

    pub fn conj(&self) -> Self {
        Jet(self.0.iter().map(|a| a.conj()).collect())
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        if n == 0 {
            return Jet(b);
        }
        b[0] = self.0[0].exp();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.0[j] * b[k - j] * j as f64;
            }
            b[k] = s / k as f64;
        }
        Jet(b)
    }

    pub fn ln(&self) -> Self {
        let n = self.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        if n == 0 {
            return Jet(b);
        }
        let a0 = self.0[0];
        b[0] = a0.ln();
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..k {
                s += b[j] * self.0[k - j] * j as f64;
            }
            b[k] = (self.0[k] - s / k as f64) / a0;
        }
        Jet(b)
    }

    pub fn recip(&self) -> Self {
        let n = self.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        if n == 0 {
            return Jet(b);
        }
        let inv = 1.0 / self.0[0];
        b[0] = inv;
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.0[j] * b[k - j];
            }
            b[k] = -s * inv;
        }
        Jet(b)
    }

    /// self^p for real or complex p, via the power recurrence.
    pub fn powc(&self, p: C64) -> Self {
        let n = self.len();
        let mut b = vec![C64::new(0.0, 0.0); n];
        if n == 0 {
            return Jet(b);
        }
        let a0 = self.0[0];
        b[0] = a0.powc(p);
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.0[j] * b[k - j] * (p * j as f64 - (k - j) as f64);
            }
            b[k] = s / (a0 * k as f64);
        }
        Jet(b)
    }

    /// Jet of x -> f(mu x) given the jet of f at mu x0.
    pub fn chain_linear(&self, mu: f64) -> Self {
        let mut p = 1.0;
        Jet(self
            .0
            .iter()
            .map(|a| {
                let r = a * p;
                p *= mu;
                r
            })
            .collect())
    }

    /// Jet of D f where D = t d/dt, one shorter.
    pub fn d(&self) -> Self {
        Jet((1..self.len()).map(|k| self.0[k] * k as f64).collect())
    }

    /// k-th log derivative D^k f = k! c_k.
    pub fn log_derivative(&self, k: usize) -> C64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.0[k] * f
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        Jet((0..n).map(|k| self.0[k] + o.0[k]).collect())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        &self + &o
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        Jet((0..n).map(|k| self.0[k] - o.0[k]).collect())
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        &self - &o
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.into_iter().map(|a| -a).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        let mut r = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if self.0[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n - i {
                r[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(r)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        &self * &o
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet(self.0.into_iter().map(|a| a * c).collect())
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, c: C64) -> Jet {
        Jet(self.0.into_iter().map(|a| a * c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_exp_matches_derivatives() {
        // f(t) = e^{-t}; D f = -t e^{-t}; D^2 f = (t^2 - t) e^{-t}
        let x = 0.3f64;
        let t = x.exp();
        let j = (-Jet::var(x, 4).exp()).exp();
        assert!((j.log_derivative(0).re - (-t).exp()).abs() < 1e-15);
        assert!((j.log_derivative(1).re + t * (-t).exp()).abs() < 1e-15);
        assert!((j.log_derivative(2).re - (t * t - t) * (-t).exp()).abs() < 1e-14);
    }

    #[test]
    fn ln_inverts_exp() {
        let a = Jet(vec![C64::new(0.2, 0.1), C64::new(1.0, 0.0), C64::new(-0.5, 0.3), C64::new(0.1, 0.0)]);
        let b = a.exp().ln();
        for k in 0..4 {
            assert!((a.0[k] - b.0[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn powc_matches_exp_ln() {
        let a = Jet(vec![C64::new(2.0, 0.0), C64::new(1.0, 0.5), C64::new(0.3, 0.0), C64::new(0.1, -0.2)]);
        let p = C64::new(-1.5, 0.25);
        let u = a.powc(p);
        let v = (a.ln() * p).exp();
        for k in 0..4 {
            assert!((u.0[k] - v.0[k]).norm() < 1e-13);
        }
    }
}
