//! Exact subtraction-free rational functions: ratios of multivariate Laurent
//! polynomials with rational coefficients, the coefficient field of every
//! symbolic module in this crate.

pub mod gcd;
pub mod poly;
pub mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

pub use poly::{rat, rat_int, rat_to_f64, LaurentPoly, Rat};

/// Degree bound below which num/den are reduced by a full polynomial gcd.
/// Beyond it, values stay unreduced and equality falls back to
/// cross-multiplication.
pub const GCD_DEGREE_BOUND: i64 = 16;

/// With more variables the primitive-PRS gcd gets expensive; past this many
/// the degree gate tightens sharply.
pub const GCD_MANY_VARS: usize = 2;
pub const GCD_MANY_VARS_DEGREE_BOUND: i64 = 4;

#[derive(Clone)]
pub struct SFRat {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
    /// True when every stored coefficient of num and den is nonnegative and
    /// num is nonzero; such values are strictly positive on positive points.
    pub sf: bool,
}

impl SFRat {
    pub fn from_poly(num: LaurentPoly) -> Self {
        SFRat { num, den: LaurentPoly::one(), sf: false }.reduced()
    }

    pub fn from_parts(num: LaurentPoly, den: LaurentPoly) -> Result<Self, String> {
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(SFRat { num, den, sf: false }.reduced())
    }

    pub fn zero() -> Self {
        Self::from_poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat_int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(LaurentPoly::var(name))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            self.sf = false;
            return self;
        }
        // Make the denominator an honest polynomial by a joint monomial shift.
        let (num, den) = self.num.align(&self.den);
        let md = den.exponent_min().unwrap();
        let mut num = num.shift_exponents(&md);
        let mut den = den.shift_exponents(&md);
        // Cancel the polynomial gcd when cheap.
        let bound = if num.vars.len() > GCD_MANY_VARS {
            GCD_MANY_VARS_DEGREE_BOUND
        } else {
            GCD_DEGREE_BOUND
        };
        if !den.is_one() && num.total_degree() <= bound && den.total_degree() <= bound {
            let mn = num.exponent_min().unwrap().iter().map(|&x| x.min(0)).collect::<Vec<_>>();
            let num0 = num.shift_exponents(&mn);
            let g = gcd::gcd(&num0, &den);
            if !g.is_one() && !g.is_zero() {
                if let (Some(nq), Some(dq)) = (gcd::div_exact(&num0, &g), gcd::div_exact(&den, &g))
                {
                    let back: Vec<i64> = mn.iter().map(|&x| -x).collect();
                    num = nq.on_vars(&num0.vars).shift_exponents(&back);
                    den = dq;
                }
            }
        }
        // Leading-sign normalization on the denominator.
        let lead_neg = den.terms.iter().next_back().map(|(_, c)| c.is_negative()).unwrap_or(false);
        if lead_neg {
            num = num.neg();
            den = den.neg();
        }
        let num = num.prune_vars();
        let den = den.prune_vars();
        let sf = !num.is_zero() && num.all_nonnegative() && den.all_nonnegative();
        SFRat { num, den, sf }
    }

    pub fn add(&self, other: &SFRat) -> SFRat {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        SFRat { num, den, sf: false }.reduced()
    }

    pub fn sub(&self, other: &SFRat) -> SFRat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SFRat {
        SFRat { num: self.num.neg(), den: self.den.clone(), sf: false }.reduced()
    }

    pub fn mul(&self, other: &SFRat) -> SFRat {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        SFRat { num, den, sf: false }.reduced()
    }

    pub fn div(&self, other: &SFRat) -> Result<SFRat, String> {
        if other.is_zero() {
            return Err("division by the zero function".into());
        }
        let num = self.num.mul(&other.den);
        let den = self.den.mul(&other.num);
        Ok(SFRat { num, den, sf: false }.reduced())
    }

    pub fn recip(&self) -> Result<SFRat, String> {
        SFRat::one().div(self)
    }

    pub fn pow(&self, k: i64) -> Result<SFRat, String> {
        if k < 0 && self.is_zero() {
            return Err("negative power of zero".into());
        }
        let mut acc = SFRat::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(self);
        }
        if k < 0 {
            acc = acc.recip()?;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rat) -> SFRat {
        SFRat { num: self.num.scale(c), den: self.den.clone(), sf: false }.reduced()
    }

    /// Exact equality of the represented rational functions, by
    /// cross-multiplication.
    pub fn equals(&self, other: &SFRat) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn eval_rat(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, String> {
        let d = self.den.eval_rat(point)?;
        if d.is_zero() {
            return Err("denominator vanishes at the point".into());
        }
        Ok(self.num.eval_rat(point)? / d)
    }

    pub fn eval_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64, String> {
        let d = self.den.eval_f64(point)?;
        if d == 0.0 {
            return Err("denominator vanishes at the point".into());
        }
        Ok(self.num.eval_f64(point)? / d)
    }

    /// Evaluation at a strictly positive point; positivity of the inputs is
    /// required, and a subtraction-free value is guaranteed positive.
    pub fn eval_positive(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, String> {
        for v in self.variables() {
            match point.get(&v) {
                None => return Err(format!("missing assignment for {v}")),
                Some(x) if !x.is_positive() => {
                    return Err(format!("nonpositive value for {v}"))
                }
                _ => {}
            }
        }
        let val = self.eval_rat(point)?;
        if self.sf {
            assert!(val.is_positive(), "subtraction-free value must be positive");
        }
        Ok(val)
    }

    pub fn eval_positive_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64, String> {
        for v in self.variables() {
            match point.get(&v) {
                None => return Err(format!("missing assignment for {v}")),
                Some(x) if *x <= 0.0 => return Err(format!("nonpositive value for {v}")),
                _ => {}
            }
        }
        self.eval_f64(point)
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vs = self.num.vars.clone();
        for v in &self.den.vars {
            if !vs.contains(v) {
                vs.push(v.clone());
            }
        }
        vs.sort();
        vs
    }

    pub fn partial(&self, var: &str) -> SFRat {
        let n = self.num.partial(var).mul(&self.den).sub(&self.num.mul(&self.den.partial(var)));
        let d = self.den.mul(&self.den);
        SFRat { num: n, den: d, sf: false }.reduced()
    }

    /// True when the reduced denominator is a single monomial, i.e. the value
    /// is a Laurent polynomial in the variables.
    pub fn is_laurent(&self) -> bool {
        self.den.is_monomial()
    }

    /// Restriction to `var = 0`; errors when the denominator vanishes there.
    pub fn substitute_zero(&self, var: &str) -> Result<SFRat, String> {
        let n = self.num.substitute_zero(var)?;
        let d = self.den.substitute_zero(var)?;
        if d.is_zero() {
            return Err(format!("pole along {var} = 0"));
        }
        SFRat::from_parts(n, d)
    }

    /// Truncated series expansion around the origin: returns a base exponent
    /// vector and terms with exponents >= 0 relative to it, exact through
    /// total degree `order`.
    pub fn series_expansion(
        &self,
        order: usize,
    ) -> Result<(Vec<String>, Vec<i64>, BTreeMap<Vec<i64>, Rat>), String> {
        let (num, den) = self.num.align(&self.den);
        let vars = num.vars.clone();
        let shift_n = num.exponent_min().ok_or("zero function")?;
        let shift_d = den.exponent_min().unwrap();
        let n0 = num.shift_exponents(&shift_n);
        let d0 = den.shift_exponents(&shift_d);
        let c0 = d0
            .terms
            .get(&vec![0; vars.len()])
            .ok_or("denominator has no unit leading monomial")?
            .clone();
        // den = c0 (1 + r), invert by geometric series.
        let r = d0.scale(&(Rat::one() / &c0)).sub(&LaurentPoly::one().on_vars(&vars));
        let mut inv = LaurentPoly::one().on_vars(&vars);
        let mut pw = LaurentPoly::one().on_vars(&vars);
        for _ in 0..order {
            pw = pw.mul(&r).neg();
            pw.terms.retain(|e, _| e.iter().sum::<i64>() <= order as i64);
            if pw.is_zero() {
                break;
            }
            inv = inv.add(&pw);
        }
        let mut series = n0.mul(&inv).scale(&(Rat::one() / &c0));
        series.terms.retain(|e, _| e.iter().sum::<i64>() <= order as i64);
        let base: Vec<i64> = shift_n.iter().zip(&shift_d).map(|(a, b)| a - b).collect();
        let series = series.on_vars(&vars);
        Ok((vars, base, series.terms))
    }
}

impl fmt::Display for SFRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::sfrat_to_string(self))
    }
}

impl fmt::Debug for SFRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::sfrat_to_string(self))
    }
}

impl FromStr for SFRat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse_sfrat(s)
    }
}

impl PartialEq for SFRat {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}
