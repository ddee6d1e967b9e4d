//! The expansion-method pipeline: homogeneous balance, ansatz construction,
//! substitution into the reduced ODE, collection of the coefficient system,
//! numeric multi-start solving, and the closed-form parameter sets.

use crate::algebra::{ParamPoly, PhiPoly, Symbol, SymbolValues};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// One multiplicative factor (d^order U)^power inside an ODE term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub order: u32,
    pub power: u32,
}

/// coefficient * prod_i (d^{order_i} U)^{power_i}
#[derive(Clone, Debug)]
pub struct OdeTerm {
    pub coefficient: ParamPoly,
    pub factors: Vec<Factor>,
}

/// A reduced ordinary differential equation in U(xi), as a sum of terms
/// that must vanish.
#[derive(Clone, Debug)]
pub struct ReducedOde {
    terms: Vec<OdeTerm>,
}

impl ReducedOde {
    pub fn new(terms: Vec<OdeTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("ODE needs at least one term".into()));
        }
        for t in &terms {
            if t.coefficient.is_zero() {
                return Err(Error::InvalidConfig("zero ODE term coefficient".into()));
            }
            if t.factors.iter().any(|f| f.power == 0) {
                return Err(Error::InvalidConfig("zero factor power".into()));
            }
        }
        Ok(ReducedOde { terms })
    }

    pub fn terms(&self) -> &[OdeTerm] {
        &self.terms
    }

    /// The twice-integrated traveling-wave reduction of the BKP equation:
    /// n^3 m U'' + alpha n^2 m U^2 + eta U = 0.
    pub fn bkp_reduced() -> Self {
        let n = ParamPoly::symbol(Symbol::N);
        let m = ParamPoly::symbol(Symbol::M);
        let alpha = ParamPoly::symbol(Symbol::Alpha);
        let eta = ParamPoly::symbol(Symbol::Eta);
        let n3m = n.pow(3).mul(&m);
        let an2m = alpha.mul(&n.pow(2)).mul(&m);
        ReducedOde {
            terms: vec![
                OdeTerm {
                    coefficient: n3m,
                    factors: vec![Factor { order: 2, power: 1 }],
                },
                OdeTerm {
                    coefficient: an2m,
                    factors: vec![Factor { order: 0, power: 2 }],
                },
                OdeTerm {
                    coefficient: eta,
                    factors: vec![Factor { order: 0, power: 1 }],
                },
            ],
        }
    }
}

/// Homogeneous balance: equate the phi-degree of the highest pure-derivative
/// term (N + order) against the strongest nonlinearity
/// (sum over factors of power*(N + order)) and solve for N.
pub fn balance_number(ode: &ReducedOde) -> Result<u32> {
    let derivative_order = ode
        .terms()
        .iter()
        .filter(|t| t.factors.len() == 1 && t.factors[0].power == 1 && t.factors[0].order >= 1)
        .map(|t| t.factors[0].order)
        .max()
        .ok_or(Error::NoDerivativeTerm)?;

    let mut best: Option<u32> = None;
    let mut saw_nonlinear = false;
    for term in ode.terms() {
        let total_power: u32 = term.factors.iter().map(|f| f.power).sum();
        if total_power < 2 {
            continue;
        }
        saw_nonlinear = true;
        let order_weight: u32 = term.factors.iter().map(|f| f.power * f.order).sum();
        if order_weight >= derivative_order {
            continue; // this nonlinearity cannot balance a positive N
        }
        let num = derivative_order - order_weight;
        let den = total_power - 1;
        if num % den == 0 {
            let n = num / den;
            if n >= 1 && best.map_or(true, |b| n > b) {
                best = Some(n);
            }
        }
    }
    if !saw_nonlinear {
        return Err(Error::NoNonlinearTerm);
    }
    best.ok_or(Error::NonIntegerBalance)
}

/// The degree-N ansatz a0 + a1 phi + ... + aN phi^N with symbolic a_k.
pub fn build_ansatz(n: u32) -> PhiPoly {
    let coeffs = (0..=n).map(|k| ParamPoly::symbol(Symbol::Coeff(k))).collect();
    PhiPoly::from_coeffs(coeffs)
}

/// The coefficient system: one exact polynomial equation per power of phi.
#[derive(Clone, Debug)]
pub struct AlgebraicSystem {
    pub equations: Vec<ParamPoly>,
    pub unknowns: Vec<Symbol>,
}

/// Substitute the ansatz into the ODE using the phi chain rule, expand
/// exactly, and collect the coefficient of each power of phi.
pub fn collect_system(ode: &ReducedOde, ansatz: &PhiPoly) -> AlgebraicSystem {
    let mut total = PhiPoly::zero();
    for term in ode.terms() {
        let mut product = PhiPoly::constant(term.coefficient.clone());
        for f in &term.factors {
            product = product.mul(&ansatz.differentiate(f.order).pow(f.power));
        }
        total = total.add(&product);
    }
    let equations = total.coeffs().to_vec();
    let mut unknowns: Vec<Symbol> = (0..ansatz.coeffs().len())
        .map(|k| Symbol::Coeff(k as u32))
        .collect();
    unknowns.push(Symbol::Eta);
    AlgebraicSystem { equations, unknowns }
}

/// Tag identifying which solution family a parameter set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetTag {
    #[serde(rename = "SET1")]
    Set1,
    #[serde(rename = "SET2")]
    Set2,
    #[serde(rename = "NUMERIC")]
    Numeric,
}

/// One solved coefficient family {eta, a0..aN}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamSet {
    pub set_tag: SetTag,
    pub eta: f64,
    pub a: Vec<f64>,
    pub residual_norm: f64,
}

fn bkp_system() -> &'static AlgebraicSystem {
    static SYSTEM: OnceLock<AlgebraicSystem> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        let ode = ReducedOde::bkp_reduced();
        let n = balance_number(&ode).expect("BKP balance");
        collect_system(&ode, &build_ansatz(n))
    })
}

/// Max absolute equation residual of a candidate set in the collected
/// BKP system at the given parameter point.
pub fn bkp_residual_norm(b: f64, c: f64, n: f64, m: f64, alpha: f64, eta: f64, a: &[f64]) -> f64 {
    let mut vals = SymbolValues::new()
        .with(Symbol::B, b)
        .with(Symbol::C, c)
        .with(Symbol::N, n)
        .with(Symbol::M, m)
        .with(Symbol::Alpha, alpha)
        .with(Symbol::Eta, eta);
    for (k, &ak) in a.iter().enumerate() {
        vals.set(Symbol::Coeff(k as u32), ak);
    }
    bkp_system()
        .equations
        .iter()
        .map(|eq| eq.eval(&vals).expect("bound symbols").abs())
        .fold(0.0, f64::max)
}

/// The two closed-form solution families of the BKP coefficient system.
pub fn paper_parameter_sets(
    b: f64,
    c: f64,
    n: f64,
    m: f64,
    alpha: f64,
) -> Result<[ParamSet; 2]> {
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    if b - c - 1.0 == 0.0 {
        return Err(Error::DegenerateAmplitude);
    }
    let a1 = 6.0 * (b * b * n - 3.0 * b * c * n - b * n + 2.0 * c * c * n + 2.0 * c * n) / alpha;
    let a2 = -6.0 * n * (b - c - 1.0) * (b - c - 1.0) / alpha;
    let eta1 = 4.0 * c * m * n.powi(3) - b * b * m * n.powi(3);
    let a0_1 = -6.0 * c * n * (-b + c + 1.0) / alpha;
    let eta2 = m * n.powi(3) * (b * b - 4.0 * c);
    let a0_2 = (-b * b * n + 6.0 * b * c * n - 6.0 * c * c * n - 2.0 * c * n) / alpha;
    let mk = |tag, eta, a0| {
        let a = vec![a0, a1, a2];
        let residual_norm = bkp_residual_norm(b, c, n, m, alpha, eta, &a);
        ParamSet { set_tag: tag, eta, a, residual_norm }
    };
    Ok([mk(SetTag::Set1, eta1, a0_1), mk(SetTag::Set2, eta2, a0_2)])
}

/// Wave speed from the dispersion relation eta = -(2n^2 + m^2 + 2np + mp).
pub fn p_from_eta(eta: f64, n: f64, m: f64) -> Result<f64> {
    let den = 2.0 * n + m;
    if den.abs() < 1e-14 {
        return Err(Error::DegenerateDirection);
    }
    Ok(-(eta + 2.0 * n * n + m * m) / den)
}

const SOLVE_RESIDUAL_GATE: f64 = 1e-10;
const DEDUP_TOL: f64 = 1e-6;
const DEGENERATE_TOP_COEFF: f64 = 1e-9;

/// Multi-start damped Newton least-squares over the system unknowns.
/// `fixed` must bind every symbol appearing in the equations except the
/// unknowns. Solutions are deduplicated, degenerate roots (top ansatz
/// coefficient zero, or all a_k zero) are dropped, and survivors are
/// returned tagged `NUMERIC` in a deterministic order.
pub fn solve_system(
    system: &AlgebraicSystem,
    fixed: &SymbolValues,
    seeds: u32,
    rng_seed: u64,
) -> Result<Vec<ParamSet>> {
    assert!(seeds >= 1);
    let mut unknowns: Vec<Symbol> = system
        .unknowns
        .iter()
        .copied()
        .filter(|s| fixed.get(*s).is_none())
        .collect();
    let top = *unknowns
        .iter()
        .filter_map(|s| match s {
            Symbol::Coeff(k) => Some(k),
            _ => None,
        })
        .max()
        .ok_or_else(|| Error::InvalidConfig("no ansatz coefficients among unknowns".into()))?;

    // the balance assumption demands a nonzero top coefficient, but the
    // system itself is satisfied by the whole a = 0 valley and Newton
    // drowns in it; a reciprocal constraint a_top * s = 1 on an auxiliary
    // unknown removes that basin entirely
    let aux = Symbol::Coeff(top + 1);
    let mut equations = system.equations.clone();
    equations.push(
        ParamPoly::symbol(Symbol::Coeff(top))
            .mul(&ParamPoly::symbol(aux))
            .sub(&ParamPoly::from_integer(1)),
    );
    unknowns.push(aux);
    let augmented = AlgebraicSystem { equations, unknowns: unknowns.clone() };

    let k = unknowns.len();
    let jacobian: Vec<Vec<ParamPoly>> = augmented
        .equations
        .iter()
        .map(|eq| unknowns.iter().map(|&u| eq.partial_deriv(u)).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for _ in 0..seeds {
        let start: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        if let Some(root) = newton_least_squares(&augmented, &jacobian, &unknowns, fixed, start) {
            found.push(root);
        }
    }

    // deterministic merge order before dedup
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    for root in found {
        let dup = distinct.iter().any(|d| {
            d.iter()
                .zip(&root)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
                < DEDUP_TOL
        });
        if !dup {
            distinct.push(root);
        }
    }

    let mut out = Vec::new();
    for root in distinct {
        let value = |sym: Symbol| {
            unknowns
                .iter()
                .position(|&u| u == sym)
                .map(|i| root[i])
                .or_else(|| fixed.get(sym))
                .expect("unknown or fixed")
        };
        let a: Vec<f64> = (0..=top).map(|k| value(Symbol::Coeff(k))).collect();
        if a.last().unwrap().abs() < DEGENERATE_TOP_COEFF {
            continue; // violates the balance assumption
        }
        if a.iter().all(|x| x.abs() < 1e-8) {
            continue; // trivial root family
        }
        let residual_norm = residual_max(system, &unknowns, fixed, &root);
        if residual_norm >= SOLVE_RESIDUAL_GATE {
            continue;
        }
        out.push(ParamSet {
            set_tag: SetTag::Numeric,
            eta: value(Symbol::Eta),
            a,
            residual_norm,
        });
    }
    if out.is_empty() {
        return Err(Error::NoSolutionFound { seeds });
    }
    Ok(out)
}

fn bind(fixed: &SymbolValues, unknowns: &[Symbol], x: &[f64]) -> SymbolValues {
    let mut v = fixed.clone();
    for (sym, val) in unknowns.iter().zip(x) {
        v.set(*sym, *val);
    }
    v
}

fn residual_max(
    system: &AlgebraicSystem,
    unknowns: &[Symbol],
    fixed: &SymbolValues,
    x: &[f64],
) -> f64 {
    let v = bind(fixed, unknowns, x);
    system
        .equations
        .iter()
        .map(|eq| eq.eval(&v).expect("bound symbols").abs())
        .fold(0.0, f64::max)
}

fn newton_least_squares(
    system: &AlgebraicSystem,
    jacobian: &[Vec<ParamPoly>],
    unknowns: &[Symbol],
    fixed: &SymbolValues,
    mut x: Vec<f64>,
) -> Option<Vec<f64>> {
    let k = x.len();
    let neq = system.equations.len();
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let v = bind(fixed, unknowns, &x);
        let r: Vec<f64> = system
            .equations
            .iter()
            .map(|eq| eq.eval(&v).expect("bound symbols"))
            .collect();
        let norm2: f64 = r.iter().map(|x| x * x).sum();
        if r.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-13 {
            return Some(x);
        }
        // Gauss-Newton normal equations with a small ridge against
        // singular Jacobians (retried implicitly via damping).
        let jac: Vec<Vec<f64>> = jacobian
            .iter()
            .map(|row| row.iter().map(|p| p.eval(&v).expect("bound")).collect())
            .collect();
        let mut jtj = vec![vec![0.0; k]; k];
        let mut jtr = vec![0.0; k];
        for e in 0..neq {
            for i in 0..k {
                jtr[i] += jac[e][i] * r[e];
                for j in 0..k {
                    jtj[i][j] += jac[e][i] * jac[e][j];
                }
            }
        }
        let trace: f64 = (0..k).map(|i| jtj[i][i]).sum();
        let ridge = 1e-12 * (trace / k as f64).max(1e-30);
        for (i, row) in jtj.iter_mut().enumerate() {
            row[i] += ridge;
        }
        let delta = solve_linear(&mut jtj, &jtr)?;
        // backtracking line search on the squared residual norm
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi - step * d).collect();
            let tv = bind(fixed, unknowns, &trial);
            let tnorm2: f64 = system
                .equations
                .iter()
                .map(|eq| {
                    let e = eq.eval(&tv).expect("bound symbols");
                    e * e
                })
                .sum();
            if tnorm2 < norm2 {
                x = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        if norm2 < best {
            best = norm2;
        }
    }
    let final_norm = residual_max(system, unknowns, fixed, &x);
    if final_norm < 1e-11 {
        Some(x)
    } else {
        None
    }
}

/// Gaussian elimination with partial pivoting; `a` is consumed.
fn solve_linear(a: &mut [Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for j in col..n {
                a[row][j] -= f * a[col][j];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}
