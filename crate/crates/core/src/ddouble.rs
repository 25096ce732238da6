//! Double-double arithmetic: unevaluated sums of two `f64`s giving ~31
//! significant decimal digits.
//!
//! The theta-constant substitution route evaluates polynomials whose terms are
//! O(1) but whose value sits at the scale of the first cusp-form Fourier
//! coefficients, i.e. around exp(-8*pi*lambda) ~ 1e-17..1e-20 for the
//! well-conditioned points used here. Plain f64 loses everything to
//! cancellation, so the theta kernels accumulate in double-double.
//!
//! Algorithms follow the classical error-free transformations (Dekker, Knuth)
//! and the transcendental-function recipes of the QD library: range reduction
//! against two-part constants, then Taylor summation in double-double.

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const PI: Dd = Dd {
    hi: 3.141592653589793e0,
    lo: 1.2246467991473532e-16,
};
pub const LN2: Dd = Dd {
    hi: 6.931471805599453e-1,
    lo: 2.3190468138462996e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline(always)]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles as a `Dd`.
    #[inline(always)]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    #[inline(always)]
    pub fn f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline(always)]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn add_f64(self, rhs: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline(always)]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline(always)]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * rhs);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    /// Division by a plain double, full double-double accuracy.
    #[inline(always)]
    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p1, p2) = two_prod(q1, d);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let q2 = (s + e) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    /// Multiplication by a power of two, exact.
    #[inline(always)]
    pub fn ldexp(self, n: i32) -> Dd {
        let s = libm_ldexp(1.0, n);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let a = self.hi.sqrt();
        // one Newton step in double-double: a' = a + (x - a^2) / (2a)
        let err = self.sub(Dd::from_f64(a).mul(Dd::from_f64(a)));
        Dd::from_f64(a).add_f64(err.hi / (2.0 * a))
    }

    /// exp(x) to double-double accuracy for |x| < 700.
    pub fn exp(self) -> Dd {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let m = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(m));
        // Taylor on |r| <= ln2/2; terms decay below 2^-106 by n = 26
        let mut sum = Dd::ONE.add(r);
        let mut term = r;
        for n in 2..=26 {
            term = term.mul(r).div_f64(n as f64);
            sum = sum.add(term);
        }
        sum.ldexp(m as i32)
    }

    /// sin(pi x) and cos(pi x) to double-double accuracy.
    ///
    /// Reduces x mod 2 first, so the argument may be large as long as it is
    /// exactly representable at double-double precision (true for the
    /// half-integer quadratic forms used by the theta kernels).
    pub fn sincos_pi(self) -> (Dd, Dd) {
        // x = n/2 + t with |t| <= 1/4, n integer
        let n = (2.0 * self.hi).round();
        let t = self.add(Dd::from_f64(-0.5).mul_f64(n));
        let (s, c) = sincos_pi_kernel(t);
        // rotate by n quarter-turns of pi/2: angle pi(t + n/2)
        match (n as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        }
    }
}

/// sin(pi t), cos(pi t) for |t| <= 1/4 by Taylor series in double-double.
fn sincos_pi_kernel(t: Dd) -> (Dd, Dd) {
    let x = PI.mul(t);
    let x2 = x.mul(x);
    // sin: x (1 - x^2/3! + x^4/5! - ...), cos analogous; |x| <= pi/4
    // |x| <= pi/4: term n = 29 is below 1e-34
    let mut sin = x;
    let mut term = x;
    let mut k = 1.0f64;
    for _ in 0..14 {
        term = term.mul(x2).div_f64(-(k + 1.0) * (k + 2.0));
        sin = sin.add(term);
        k += 2.0;
    }
    let mut cos = Dd::ONE;
    let mut term = Dd::ONE;
    let mut k = 0.0f64;
    for _ in 0..14 {
        term = term.mul(x2).div_f64(-(k + 1.0) * (k + 2.0));
        cos = cos.add(term);
        k += 2.0;
    }
    (sin, cos)
}

fn libm_ldexp(x: f64, n: i32) -> f64 {
    // powi on 2.0 is exact for the exponent range used here
    if n >= 0 {
        x * 2f64.powi(n)
    } else {
        x / 2f64.powi(-n)
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    #[inline(always)]
    pub fn new(re: Dd, im: Dd) -> Cdd {
        Cdd { re, im }
    }

    pub fn from_c64(z: num_complex::Complex64) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.f64(), self.im.f64())
    }

    #[inline(always)]
    pub fn add(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    #[inline(always)]
    pub fn sub(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(rhs.re),
            im: self.im.sub(rhs.im),
        }
    }

    #[inline(always)]
    pub fn neg(self) -> Cdd {
        Cdd {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    #[inline(always)]
    pub fn mul(self, rhs: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(rhs.re).sub(self.im.mul(rhs.im)),
            im: self.re.mul(rhs.im).add(self.im.mul(rhs.re)),
        }
    }

    #[inline(always)]
    pub fn mul_dd(self, rhs: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(rhs),
            im: self.im.mul(rhs),
        }
    }

    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    pub fn abs(self) -> f64 {
        self.norm_sqr().f64().sqrt()
    }

    /// exp(i pi w) for complex w = u + iv: exp(-pi v) (cos pi u + i sin pi u).
    pub fn exp_i_pi(w: Cdd) -> Cdd {
        let mag = PI.neg().mul(w.im).exp();
        let (s, c) = w.re.sincos_pi();
        Cdd {
            re: mag.mul(c),
            im: mag.mul(s),
        }
    }

    pub fn div(self, rhs: Cdd) -> Cdd {
        let d = rhs.norm_sqr();
        let n = self.mul(rhs.conj());
        Cdd {
            re: n.re.div(d),
            im: n.im.div(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    #[test]
    fn add_mul_roundtrip_identities() {
        let a = dd(1.0, 0.0).div(dd(3.0, 0.0));
        let three_a = a.add(a).add(a);
        assert!((three_a.sub(Dd::ONE)).abs().f64() < 1e-31);

        let x = dd(0.1234567890123456, 0.0);
        let y = x.mul(x).div(x);
        assert!(y.sub(x).abs().f64() < 1e-31);
    }

    #[test]
    fn exp_reference_values() {
        // e = 2.71828182845904523536028747135266249776...
        let e = Dd::ONE.exp();
        let e_ref = dd(2.718281828459045e0, 1.4456468917292502e-16);
        assert!(e.sub(e_ref).abs().f64() < 3e-32);

        // exp(a) * exp(-a) = 1
        for a in [0.3, 1.7, -2.5, 10.0, -37.2] {
            let p = dd(a, 0.0).exp().mul(dd(-a, 0.0).exp());
            assert!(p.sub(Dd::ONE).abs().f64() < 1e-30, "a = {a}");
        }

        // exp(-pi) = 0.0432139182637722497744177371891202...
        let emp = PI.neg().exp();
        assert!((emp.f64() - 0.043213918263772250).abs() < 1e-17);
    }

    #[test]
    fn sincos_pi_reference_values() {
        // x must be 1/6 at double-double accuracy, not fl(1/6)
        let sixth = Dd::ONE.div(dd(6.0, 0.0));
        let (s, c) = sixth.sincos_pi();
        assert!(s.sub(dd(0.5, 0.0)).abs().f64() < 1e-30, "sin(pi/6)");
        // cos(pi/6) = sqrt(3)/2
        let r32 = dd(3.0, 0.0).sqrt().mul_f64(0.5);
        assert!(c.sub(r32).abs().f64() < 1e-30, "cos(pi/6)");

        // exact lattice points: sin(pi k) = 0, cos(pi k) = (-1)^k
        for k in [-7.0, -2.0, 0.0, 1.0, 4.0, 123.0] {
            let (s, c) = dd(k, 0.0).sincos_pi();
            assert_eq!(s.f64(), 0.0, "sin(pi*{k})");
            assert_eq!(c.f64(), if (k as i64) % 2 == 0 { 1.0 } else { -1.0 });
        }

        // pythagorean identity at awkward arguments
        for x in [0.123456, 7.6543210987, -3.25, 0.499999999] {
            let (s, c) = dd(x, 0.0).sincos_pi();
            let one = s.mul(s).add(c.mul(c));
            assert!(one.sub(Dd::ONE).abs().f64() < 1e-30, "x = {x}");
        }
    }

    #[test]
    fn agrees_with_f64_at_low_precision() {
        for x in [0.1, -1.3, 2.7, -0.001, 5.5] {
            assert!((dd(x, 0.0).exp().f64() - x.exp()).abs() <= 1e-13 * x.exp());
            let (s, c) = dd(x, 0.0).sincos_pi();
            assert!((s.f64() - (std::f64::consts::PI * x).sin()).abs() < 1e-13);
            assert!((c.f64() - (std::f64::consts::PI * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_exp_i_pi() {
        // exp(i pi (1/2)) = i
        let z = Cdd::exp_i_pi(Cdd::new(dd(0.5, 0.0), Dd::ZERO));
        assert!(z.re.abs().f64() < 1e-31 && z.im.sub(Dd::ONE).abs().f64() < 1e-31);
        // |exp(i pi (u + iv))| = exp(-pi v)
        let w = Cdd::new(dd(0.37, 0.0), dd(1.25, 0.0));
        let z = Cdd::exp_i_pi(w);
        let expect = PI.neg().mul(dd(1.25, 0.0)).exp();
        assert!((z.abs() - expect.f64()).abs() < 1e-25);
    }
}
