use super::{ParamPoly, Rational, Symbol, SymbolValues};
use std::fmt;

/// Polynomial in the expansion variable `phi` with `ParamPoly` coefficients.
/// Index i of `coeffs` holds the coefficient of phi^i; trailing zeros are
/// trimmed so `degree` is well-defined.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PhiPoly {
    coeffs: Vec<ParamPoly>,
}

impl PhiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(coeffs: Vec<ParamPoly>) -> Self {
        let mut p = PhiPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: ParamPoly) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial phi^1.
    pub fn phi() -> Self {
        Self::from_coeffs(vec![ParamPoly::zero(), ParamPoly::from_integer(1)])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in phi; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> ParamPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(ParamPoly::zero)
    }

    pub fn coeffs(&self) -> &[ParamPoly] {
        &self.coeffs
    }

    pub fn add(&self, other: &PhiPoly) -> PhiPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &PhiPoly) -> PhiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PhiPoly {
        PhiPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &PhiPoly) -> PhiPoly {
        if self.is_zero() || other.is_zero() {
            return PhiPoly::zero();
        }
        let mut out = vec![ParamPoly::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &ParamPoly) -> PhiPoly {
        Self::from_coeffs(self.coeffs.iter().map(|k| k.mul(c)).collect())
    }

    pub fn pow(&self, exp: u32) -> PhiPoly {
        let mut out = PhiPoly::constant(ParamPoly::from_integer(1));
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Formal derivative with respect to phi.
    pub fn formal_derivative(&self) -> PhiPoly {
        if self.coeffs.len() <= 1 {
            return PhiPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Rational::from_integer(i as i64)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// The quadratic D(phi) with d(phi)/d(xi) = D(phi), obtained by
    /// eliminating G and G' from phi = G'/(G' + G + A) using the auxiliary
    /// ODE G'' + B G' + C G + A C = 0:
    ///
    ///   D(phi) = -(C - B + 1) phi^2 - (B - 2C) phi - C
    ///
    /// The shift A cancels in the elimination, so D depends on B and C only.
    pub fn derivative_rule() -> PhiPoly {
        let b = ParamPoly::symbol(Symbol::B);
        let c = ParamPoly::symbol(Symbol::C);
        let one = ParamPoly::from_integer(1);
        let two = ParamPoly::from_integer(2);
        Self::from_coeffs(vec![
            c.neg(),
            two.mul(&c).sub(&b),
            b.sub(&c).sub(&one),
        ])
    }

    /// Apply d/d(xi) k times via the chain rule d(phi)/d(xi) = D(phi).
    pub fn differentiate(&self, k: u32) -> PhiPoly {
        let rule = Self::derivative_rule();
        let mut out = self.clone();
        for _ in 0..k {
            out = out.formal_derivative().mul(&rule);
        }
        out
    }

    /// Evaluate at a numeric phi with the given parameter bindings.
    pub fn eval(&self, phi: f64, values: &SymbolValues) -> Result<f64, Symbol> {
        let mut total = 0.0;
        for c in self.coeffs.iter().rev() {
            total = total * phi + c.eval(values)?;
        }
        Ok(total)
    }

    pub fn contains_symbol(&self, sym: Symbol) -> bool {
        self.coeffs.iter().any(|c| c.contains_symbol(sym))
    }
}

impl fmt::Display for PhiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*phi")?,
                _ => write!(f, "({c})*phi^{i}")?,
            }
        }
        Ok(())
    }
}
