use super::{Rational, Symbol, SymbolValues};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector over the fixed symbol list, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
struct Monomial(Vec<u32>);

impl Monomial {
    fn constant() -> Self {
        Monomial(Vec::new())
    }

    fn var(sym: Symbol, exp: u32) -> Self {
        let mut v = vec![0; sym.index() + 1];
        v[sym.index()] = exp;
        let mut m = Monomial(v);
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = vec![0u32; self.0.len().max(other.0.len())];
        for (i, &e) in self.0.iter().enumerate() {
            v[i] += e;
        }
        for (i, &e) in other.0.iter().enumerate() {
            v[i] += e;
        }
        Monomial(v)
    }

    fn exponent(&self, sym: Symbol) -> u32 {
        self.0.get(sym.index()).copied().unwrap_or(0)
    }
}

/// Sparse multivariate polynomial in the method parameters with exact
/// rational coefficients. Canonical form: no zero terms, monomials keyed
/// by exponent vector, so equality is plain map equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed term `{0}`")]
    MalformedTerm(String),
    #[error("empty input")]
    Empty,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(), c);
        }
        p
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(Rational::from_integer(n))
    }

    pub fn symbol(sym: Symbol) -> Self {
        Self::symbol_pow(sym, 1)
    }

    pub fn symbol_pow(sym: Symbol, exp: u32) -> Self {
        if exp == 0 {
            return Self::from_integer(1);
        }
        let mut p = Self::zero();
        p.terms.insert(Monomial::var(sym, exp), Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (mono, coeff) in &other.terms {
            let entry = out.terms.entry(mono.clone()).or_insert_with(Rational::zero);
            *entry += coeff;
            if entry.is_zero() {
                out.terms.remove(mono);
            }
        }
        out
    }

    pub fn sub(&self, other: &ParamPoly) -> ParamPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono = ma.mul(mb);
                let entry = out.terms.entry(mono.clone()).or_insert_with(Rational::zero);
                *entry += &(ca * cb);
                if entry.is_zero() {
                    out.terms.remove(&mono);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> ParamPoly {
        let mut out = ParamPoly::from_integer(1);
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    pub fn contains_symbol(&self, sym: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(sym) > 0)
    }

    /// Formal partial derivative with respect to one symbol.
    pub fn partial_deriv(&self, sym: Symbol) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (mono, coeff) in &self.terms {
            let e = mono.exponent(sym);
            if e == 0 {
                continue;
            }
            let mut v = mono.0.clone();
            v[sym.index()] -= 1;
            let mut m = Monomial(v);
            m.trim();
            let c = coeff * &Rational::from_integer(e as i64);
            let entry = out.terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += &c;
            if entry.is_zero() {
                out.terms.remove(&m);
            }
        }
        out
    }

    /// Evaluate numerically. Fails with the first unbound symbol.
    pub fn eval(&self, values: &SymbolValues) -> Result<f64, Symbol> {
        let mut total = 0.0;
        for (mono, coeff) in &self.terms {
            let mut term = coeff.to_f64();
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    let sym = Symbol::from_index(i);
                    let v = values.get(sym).ok_or(sym)?;
                    term *= v.powi(e as i32);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Parse the canonical text format: terms joined by `+`/`-`, factors
    /// joined by `*`, powers written `sym^k`, rational coefficients `p/q`.
    pub fn parse(input: &str) -> Result<ParamPoly, ParseError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut out = ParamPoly::zero();
        let mut term = String::new();
        let mut terms: Vec<String> = Vec::new();
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut term));
                if ch == '-' {
                    term.push('-');
                }
            } else {
                term.push(ch);
            }
        }
        terms.push(term);
        for t in terms {
            if t.is_empty() || t == "-" {
                return Err(ParseError::MalformedTerm(t));
            }
            out = out.add(&Self::parse_term(&t)?);
        }
        Ok(out)
    }

    fn parse_term(t: &str) -> Result<ParamPoly, ParseError> {
        let (negate, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let mut coeff = Rational::one();
        let mut mono = Monomial::constant();
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(ParseError::MalformedTerm(t.to_string()));
            }
            if factor.chars().next().unwrap().is_ascii_digit() {
                let r = Rational::parse(factor)
                    .ok_or_else(|| ParseError::MalformedTerm(t.to_string()))?;
                coeff = &coeff * &r;
            } else {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let e: u32 = e
                            .parse()
                            .map_err(|_| ParseError::MalformedTerm(t.to_string()))?;
                        (n, e)
                    }
                    None => (factor, 1),
                };
                let sym = Symbol::parse(name)
                    .ok_or_else(|| ParseError::UnknownSymbol(name.to_string()))?;
                mono = mono.mul(&Monomial::var(sym, exp));
            }
        }
        if negate {
            coeff = -&coeff;
        }
        if coeff.is_zero() {
            return Ok(ParamPoly::zero());
        }
        let mut p = ParamPoly::zero();
        p.terms.insert(mono, coeff);
        Ok(p)
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (mono, coeff)) in self.terms.iter().enumerate() {
            let neg = coeff.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = coeff.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || mono.0.is_empty() {
                factors.push(mag.to_string());
            }
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 1 {
                    factors.push(Symbol::from_index(i).to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", Symbol::from_index(i), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
