use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value with first and second partials in two variables (u, v).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub val: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub fn constant(val: f64) -> Self {
        Jet2 {
            val,
            ..Default::default()
        }
    }

    /// Seeded as the first variable.
    pub fn var_u(val: f64) -> Self {
        Jet2 {
            val,
            du: 1.0,
            ..Default::default()
        }
    }

    /// Seeded as the second variable.
    pub fn var_v(val: f64) -> Self {
        Jet2 {
            val,
            dv: 1.0,
            ..Default::default()
        }
    }

    pub fn has_derivatives(&self) -> bool {
        self.du != 0.0
            || self.dv != 0.0
            || self.duu != 0.0
            || self.duv != 0.0
            || self.dvv != 0.0
    }

    /// g∘self given g, g', g'' at self.val.
    pub fn chain(&self, g0: f64, g1: f64, g2: f64) -> Self {
        Jet2 {
            val: g0,
            du: g1 * self.du,
            dv: g1 * self.dv,
            duu: g2 * self.du * self.du + g1 * self.duu,
            duv: g2 * self.du * self.dv + g1 * self.duv,
            dvv: g2 * self.dv * self.dv + g1 * self.dvv,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            val: self.val * s,
            du: self.du * s,
            dv: self.dv * s,
            duu: self.duu * s,
            duv: self.duv * s,
            dvv: self.dvv * s,
        }
    }

    pub fn recip(&self) -> Self {
        let x = self.val;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Self {
        let t = self.val.tan();
        let s2 = 1.0 + t * t;
        self.chain(t, s2, 2.0 * t * s2)
    }

    pub fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.val;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sqrt(&self) -> Self {
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.val))
    }

    pub fn asin(&self) -> Self {
        let x = self.val;
        let w = 1.0 - x * x;
        self.chain(x.asin(), 1.0 / w.sqrt(), x / (w * w.sqrt()))
    }

    pub fn acos(&self) -> Self {
        let x = self.val;
        let w = 1.0 - x * x;
        self.chain(x.acos(), -1.0 / w.sqrt(), -x / (w * w.sqrt()))
    }

    pub fn atan(&self) -> Self {
        let x = self.val;
        let w = 1.0 + x * x;
        self.chain(x.atan(), 1.0 / w, -2.0 * x / (w * w))
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(c, s, c)
    }

    pub fn powi(&self, n: i32) -> Self {
        let x = self.val;
        let nf = n as f64;
        let g1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        let g2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * x.powi(n - 2)
        };
        self.chain(x.powi(n), g1, g2)
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.val;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            val: self.val + o.val,
            du: self.du + o.du,
            dv: self.dv + o.dv,
            duu: self.duu + o.duu,
            duv: self.duv + o.duv,
            dvv: self.dvv + o.dvv,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            val: self.val * o.val,
            du: self.du * o.val + self.val * o.du,
            dv: self.dv * o.val + self.val * o.dv,
            duu: self.duu * o.val + 2.0 * self.du * o.du + self.val * o.duu,
            duv: self.duv * o.val + self.du * o.dv + self.dv * o.du + self.val * o.duv,
            dvv: self.dvv * o.val + 2.0 * self.dv * o.dv + self.val * o.dvv,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}
