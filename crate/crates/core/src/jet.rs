//! Second-order forward-mode jets: a value together with its first and
//! second derivatives with respect to one scalar variable.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0 }
    }

    /// Applies a scalar function given its value and two derivatives at `self.v`.
    pub fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Jet {
            v: g,
            d1: g1 * self.d1,
            d2: g2 * self.d1 * self.d1 + g1 * self.d2,
        }
    }

    /// Natural log; uses `ln_1p` close to 1 where `ln` loses relative accuracy.
    pub fn ln(self) -> Self {
        let x = self.v;
        let g = if x > 0.5 && x < 2.0 { (x - 1.0).ln_1p() } else { x.ln() };
        self.chain(g, 1.0 / x, -1.0 / (x * x))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        let g = x.powf(p);
        self.chain(g, p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn scale(self, c: f64) -> Self {
        Jet::new(c * self.v, c * self.d1, c * self.d2)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_chain_rule() {
        // g(t) = t^2 * exp(t) at t = 0.7
        let t = Jet::variable(0.7);
        let g = t.powf(2.0) * t.exp();
        let e = 0.7f64.exp();
        assert!((g.v - 0.49 * e).abs() < 1e-15);
        assert!((g.d1 - (1.4 + 0.49) * e).abs() < 1e-14);
        assert!((g.d2 - (2.0 + 2.8 + 0.49) * e).abs() < 1e-13);
    }

    #[test]
    fn log_near_one_matches_ln_1p() {
        let t = Jet::variable(1.0 + 1e-12);
        assert_eq!(t.ln().v, (t.v - 1.0).ln_1p());
        assert!((t.ln().d1 - 1.0).abs() < 1e-11);
    }
}
