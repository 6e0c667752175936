//! Order-4 truncated Taylor (jet) arithmetic.
//!
//! A `Jet4` stores the Taylor coefficients `c[k] = f^(k)(r0) / k!` of a
//! scalar function at a point. Propagating jets through arithmetic and
//! elementary functions yields derivatives up to order 4 to machine
//! precision, which is what the bitension formulas need (two derivative
//! levels of the tension `x`, which itself carries two levels of `rho`).
//!
//! Singularities (log of a non-positive value, division by zero, `abs` at
//! a sign change) are signalled by non-finite coefficients; callers map
//! those to `Error::SingularPoint`.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Jet4 {
    pub c: [f64; 5],
}

impl Jet4 {
    pub fn constant(v: f64) -> Self {
        Jet4 {
            c: [v, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// The coordinate itself, seeded with unit first derivative.
    pub fn variable(v: f64) -> Self {
        Jet4 {
            c: [v, 1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Build from plain derivatives `[f, f', f'', f''', f'''']`.
    pub fn from_derivs(d: [f64; 5]) -> Self {
        Jet4 {
            c: [d[0], d[1], d[2] / 2.0, d[3] / 6.0, d[4] / 24.0],
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }
    pub fn d1(&self) -> f64 {
        self.c[1]
    }
    pub fn d2(&self) -> f64 {
        2.0 * self.c[2]
    }
    pub fn d3(&self) -> f64 {
        6.0 * self.c[3]
    }
    pub fn d4(&self) -> f64 {
        24.0 * self.c[4]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Jet of the derivative. The top coefficient is lost (set to zero),
    /// so each application drops one valid order.
    pub fn deriv(&self) -> Jet4 {
        Jet4 {
            c: [self.c[1], 2.0 * self.c[2], 3.0 * self.c[3], 4.0 * self.c[4], 0.0],
        }
    }

    /// Composition `outer(inner)`. `outer` must be the jet of the outer
    /// function taken at `inner.value()` with respect to its own variable.
    pub fn compose(outer: Jet4, inner: Jet4) -> Jet4 {
        let mut w = inner;
        w.c[0] = 0.0;
        // Horner evaluation of the degree-4 outer polynomial in w.
        let mut res = Jet4::constant(outer.c[4]);
        for k in (0..4).rev() {
            res = res * w + outer.c[k];
        }
        res
    }

    /// Apply a scalar function given its derivatives at `self.value()`.
    fn lift(self, d: [f64; 5]) -> Jet4 {
        Jet4::compose(Jet4::from_derivs(d), self)
    }

    pub fn recip(self) -> Jet4 {
        let a = self.c[0];
        let i = 1.0 / a;
        self.lift([
            i,
            -i * i,
            2.0 * i * i * i,
            -6.0 * i * i * i * i,
            24.0 * i * i * i * i * i,
        ])
    }

    pub fn sin(self) -> Jet4 {
        let (s, c) = self.c[0].sin_cos();
        self.lift([s, c, -s, -c, s])
    }

    pub fn cos(self) -> Jet4 {
        let (s, c) = self.c[0].sin_cos();
        self.lift([c, -s, -c, s, c])
    }

    pub fn tan(self) -> Jet4 {
        self.sin() / self.cos()
    }

    pub fn cot(self) -> Jet4 {
        self.cos() / self.sin()
    }

    pub fn exp(self) -> Jet4 {
        let e = self.c[0].exp();
        self.lift([e, e, e, e, e])
    }

    pub fn ln(self) -> Jet4 {
        let a = self.c[0];
        if a <= 0.0 {
            return Jet4::constant(f64::NAN);
        }
        let i = 1.0 / a;
        self.lift([a.ln(), i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i])
    }

    pub fn sqrt(self) -> Jet4 {
        if self.c[0] < 0.0 {
            return Jet4::constant(f64::NAN);
        }
        self.powf(0.5)
    }

    /// Real power, valid for positive base.
    pub fn powf(self, p: f64) -> Jet4 {
        let a = self.c[0];
        let mut d = [0.0; 5];
        let mut coef = 1.0;
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = coef * a.powf(p - k as f64);
            coef *= p - k as f64;
        }
        self.lift(d)
    }

    pub fn powi(self, n: i32) -> Jet4 {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet4::constant(1.0);
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn atan(self) -> Jet4 {
        let a = self.c[0];
        let w = 1.0 + a * a;
        self.lift([
            a.atan(),
            1.0 / w,
            -2.0 * a / (w * w),
            (6.0 * a * a - 2.0) / (w * w * w),
            24.0 * a * (1.0 - a * a) / (w * w * w * w),
        ])
    }

    pub fn acos(self) -> Jet4 {
        let a = self.c[0];
        let w = 1.0 - a * a;
        if w <= 0.0 {
            return Jet4::constant(f64::NAN);
        }
        let s = w.sqrt();
        self.lift([
            a.acos(),
            -1.0 / s,
            -a / (w * s),
            -(1.0 + 2.0 * a * a) / (w * w * s),
            -3.0 * a * (3.0 + 2.0 * a * a) / (w * w * w * s),
        ])
    }

    /// Absolute value. Exactly at a sign change the jet is undefined and a
    /// NaN jet is returned so profile evaluation reports a singular point.
    pub fn abs(self) -> Jet4 {
        if self.c[0] > 0.0 {
            self
        } else if self.c[0] < 0.0 {
            -self
        } else {
            Jet4::constant(f64::NAN)
        }
    }
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: Jet4) -> Jet4 {
        let mut c = self.c;
        for k in 0..5 {
            c[k] += rhs.c[k];
        }
        Jet4 { c }
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: Jet4) -> Jet4 {
        let mut c = self.c;
        for k in 0..5 {
            c[k] -= rhs.c[k];
        }
        Jet4 { c }
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        let mut c = self.c;
        for x in &mut c {
            *x = -*x;
        }
        Jet4 { c }
    }
}

impl Mul for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        let mut c = [0.0; 5];
        for i in 0..5 {
            for j in 0..5 - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Jet4 { c }
    }
}

impl Div for Jet4 {
    type Output = Jet4;
    fn div(self, rhs: Jet4) -> Jet4 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: f64) -> Jet4 {
        let mut c = self.c;
        c[0] += rhs;
        Jet4 { c }
    }
}

impl Add<Jet4> for f64 {
    type Output = Jet4;
    fn add(self, rhs: Jet4) -> Jet4 {
        rhs + self
    }
}

impl Sub<f64> for Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: f64) -> Jet4 {
        self + (-rhs)
    }
}

impl Sub<Jet4> for f64 {
    type Output = Jet4;
    fn sub(self, rhs: Jet4) -> Jet4 {
        -rhs + self
    }
}

impl Mul<f64> for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: f64) -> Jet4 {
        let mut c = self.c;
        for x in &mut c {
            *x *= rhs;
        }
        Jet4 { c }
    }
}

impl Mul<Jet4> for f64 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        rhs * self
    }
}

impl Div<f64> for Jet4 {
    type Output = Jet4;
    fn div(self, rhs: f64) -> Jet4 {
        self * (1.0 / rhs)
    }
}

impl Div<Jet4> for f64 {
    type Output = Jet4;
    fn div(self, rhs: Jet4) -> Jet4 {
        rhs.recip() * self
    }
}
