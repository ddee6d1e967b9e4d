use std::fmt;

/// One of the method parameters. The ordering below fixes the canonical
/// monomial ordering used everywhere: A, B, C, n, m, alpha, eta, a0, a1, ...
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    A,
    B,
    C,
    N,
    M,
    Alpha,
    Eta,
    /// Ansatz coefficient a_k.
    Coeff(u32),
}

impl Symbol {
    pub fn index(self) -> usize {
        match self {
            Symbol::A => 0,
            Symbol::B => 1,
            Symbol::C => 2,
            Symbol::N => 3,
            Symbol::M => 4,
            Symbol::Alpha => 5,
            Symbol::Eta => 6,
            Symbol::Coeff(k) => 7 + k as usize,
        }
    }

    pub fn from_index(i: usize) -> Symbol {
        match i {
            0 => Symbol::A,
            1 => Symbol::B,
            2 => Symbol::C,
            3 => Symbol::N,
            4 => Symbol::M,
            5 => Symbol::Alpha,
            6 => Symbol::Eta,
            k => Symbol::Coeff((k - 7) as u32),
        }
    }

    pub fn parse(name: &str) -> Option<Symbol> {
        match name {
            "A" => Some(Symbol::A),
            "B" => Some(Symbol::B),
            "C" => Some(Symbol::C),
            "n" => Some(Symbol::N),
            "m" => Some(Symbol::M),
            "alpha" => Some(Symbol::Alpha),
            "eta" => Some(Symbol::Eta),
            _ => {
                let k: u32 = name.strip_prefix('a')?.parse().ok()?;
                Some(Symbol::Coeff(k))
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::A => write!(f, "A"),
            Symbol::B => write!(f, "B"),
            Symbol::C => write!(f, "C"),
            Symbol::N => write!(f, "n"),
            Symbol::M => write!(f, "m"),
            Symbol::Alpha => write!(f, "alpha"),
            Symbol::Eta => write!(f, "eta"),
            Symbol::Coeff(k) => write!(f, "a{k}"),
        }
    }
}

/// Numeric bindings for symbols, used when evaluating polynomials.
#[derive(Clone, Debug, Default)]
pub struct SymbolValues {
    values: Vec<Option<f64>>,
}

impl SymbolValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, sym: Symbol, value: f64) {
        let i = sym.index();
        if self.values.len() <= i {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(value);
    }

    pub fn with(mut self, sym: Symbol, value: f64) -> Self {
        self.set(sym, value);
        self
    }

    pub fn get(&self, sym: Symbol) -> Option<f64> {
        self.values.get(sym.index()).copied().flatten()
    }
}
