//! Evaluators for the auxiliary-ODE solution G, the expansion variable phi,
//! the four closed-form wave profiles, and the integrated profile w.
//!
//! The four profile families (two coefficient sets times two discriminant
//! branches) live behind the [`WaveForm`] trait and are registered by name,
//! so callers select one at runtime.

use crate::error::{Error, Result};
use crate::expansion::{p_from_eta, paper_parameter_sets, ParamSet, SetTag};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Which of the two printed coefficient families is in play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionSet {
    #[serde(rename = "SET1")]
    Set1,
    #[serde(rename = "SET2")]
    Set2,
}

impl SolutionSet {
    pub fn tag(self) -> SetTag {
        match self {
            SolutionSet::Set1 => SetTag::Set1,
            SolutionSet::Set2 => SetTag::Set2,
        }
    }
}

/// Discriminant branch: exponential for Lambda > 0, trigonometric for
/// Lambda < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchCase {
    #[serde(rename = "EXP")]
    Exp,
    #[serde(rename = "TRIG")]
    Trig,
}

/// One of the four closed-form solution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionKind {
    pub set: SolutionSet,
    pub case: BranchCase,
}

impl SolutionKind {
    pub const ALL: [SolutionKind; 4] = [
        SolutionKind { set: SolutionSet::Set1, case: BranchCase::Exp },
        SolutionKind { set: SolutionSet::Set1, case: BranchCase::Trig },
        SolutionKind { set: SolutionSet::Set2, case: BranchCase::Exp },
        SolutionKind { set: SolutionSet::Set2, case: BranchCase::Trig },
    ];

    pub fn name(self) -> &'static str {
        match (self.set, self.case) {
            (SolutionSet::Set1, BranchCase::Exp) => "u11",
            (SolutionSet::Set1, BranchCase::Trig) => "u12",
            (SolutionSet::Set2, BranchCase::Exp) => "u21",
            (SolutionSet::Set2, BranchCase::Trig) => "u22",
        }
    }
}

/// All numeric inputs for evaluating one wave solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WaveConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub n: f64,
    pub m: f64,
    pub alpha: f64,
    pub t: f64,
    pub set: SolutionSet,
}

impl WaveConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        c: f64,
        c1: f64,
        c2: f64,
        n: f64,
        m: f64,
        alpha: f64,
        t: f64,
        set: SolutionSet,
    ) -> Result<Self> {
        let cfg = WaveConfig { a, b, c, c1, c2, n, m, alpha, t, set };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha == 0.0 {
            return Err(Error::AlphaZero);
        }
        if 2.0 * self.n + self.m == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        if self.c1 == 0.0 && self.c2 == 0.0 {
            return Err(Error::InvalidConfig("C1 and C2 cannot both be zero".into()));
        }
        if self.b - self.c - 1.0 == 0.0 {
            return Err(Error::DegenerateAmplitude);
        }
        if self.lambda() == 0.0 {
            return Err(Error::LambdaZero);
        }
        if !(self.a.is_finite()
            && self.b.is_finite()
            && self.c.is_finite()
            && self.c1.is_finite()
            && self.c2.is_finite()
            && self.n.is_finite()
            && self.m.is_finite()
            && self.alpha.is_finite()
            && self.t.is_finite())
        {
            return Err(Error::InvalidConfig("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.b * self.b - 4.0 * self.c
    }

    /// eta for the configured set: -(Lambda m n^3) for SET-1, +(Lambda m n^3)
    /// for SET-2.
    pub fn eta(&self) -> f64 {
        let l = self.lambda() * self.m * self.n.powi(3);
        match self.set {
            SolutionSet::Set1 => -l,
            SolutionSet::Set2 => l,
        }
    }

    pub fn p(&self) -> f64 {
        p_from_eta(self.eta(), self.n, self.m).expect("validated at construction")
    }

    /// Traveling-wave coordinate xi = n x + m y - p t.
    pub fn xi(&self, x: f64, y: f64) -> f64 {
        self.n * x + self.m * y - self.p() * self.t
    }

    /// Coefficients {eta, a0, a1, a2} of the configured set.
    pub fn param_set(&self) -> ParamSet {
        let [s1, s2] = paper_parameter_sets(self.b, self.c, self.n, self.m, self.alpha)
            .expect("validated at construction");
        match self.set {
            SolutionSet::Set1 => s1,
            SolutionSet::Set2 => s2,
        }
    }

    /// The branch selected by the sign of Lambda.
    pub fn kind(&self) -> SolutionKind {
        let case = if self.lambda() > 0.0 { BranchCase::Exp } else { BranchCase::Trig };
        SolutionKind { set: self.set, case }
    }
}

const SINGULAR_REL: f64 = 1e-12;

fn ratio_checked(num: f64, den: f64, scale: f64, xi: f64) -> Result<f64> {
    if den.abs() < SINGULAR_REL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::PhiSingularity { xi });
    }
    Ok(num / den)
}

/// The homogeneous part of G, i.e. G + A.
fn g_core(cfg: &WaveConfig, xi: f64) -> f64 {
    let lambda = cfg.lambda();
    if lambda > 0.0 {
        let s = lambda.sqrt();
        let r1 = 0.5 * (-cfg.b - s);
        let r2 = 0.5 * (-cfg.b + s);
        cfg.c1 * (r1 * xi).exp() + cfg.c2 * (r2 * xi).exp()
    } else {
        let omega = 0.5 * (-lambda).sqrt();
        let envelope = (-0.5 * cfg.b * xi).exp();
        envelope * (cfg.c1 * (omega * xi).cos() + cfg.c2 * (omega * xi).sin())
    }
}

/// The auxiliary-ODE solution G(xi) for the branch selected by Lambda.
pub fn eval_g(cfg: &WaveConfig, xi: f64) -> f64 {
    -cfg.a + g_core(cfg, xi)
}

/// First derivative of G, from the same closed form.
pub fn eval_g_prime(cfg: &WaveConfig, xi: f64) -> f64 {
    let lambda = cfg.lambda();
    if lambda > 0.0 {
        let s = lambda.sqrt();
        let r1 = 0.5 * (-cfg.b - s);
        let r2 = 0.5 * (-cfg.b + s);
        cfg.c1 * r1 * (r1 * xi).exp() + cfg.c2 * r2 * (r2 * xi).exp()
    } else {
        let omega = 0.5 * (-lambda).sqrt();
        let envelope = (-0.5 * cfg.b * xi).exp();
        let trig = cfg.c1 * (omega * xi).cos() + cfg.c2 * (omega * xi).sin();
        let trig_d = -cfg.c1 * (omega * xi).sin() + cfg.c2 * (omega * xi).cos();
        envelope * (-0.5 * cfg.b * trig + omega * trig_d)
    }
}

/// The expansion variable phi = G' / (G' + G + A), formed from the G branch
/// directly. The shift A cancels inside the denominator.
pub fn eval_phi(cfg: &WaveConfig, xi: f64) -> Result<f64> {
    let lambda = cfg.lambda();
    if lambda > 0.0 {
        let s = lambda.sqrt();
        // factored form avoids overflow at large |xi|; the A contribution
        // to the denominator cancels exactly against -A inside G
        if (s * xi).abs() > 300.0 {
            let r1 = 0.5 * (-cfg.b - s);
            let r2 = 0.5 * (-cfg.b + s);
            let (lead_r, lead_c, sub_r, sub_c) = if s * xi > 0.0 {
                (r2, cfg.c2, r1, cfg.c1)
            } else {
                (r1, cfg.c1, r2, cfg.c2)
            };
            let e = ((sub_r - lead_r) * xi).exp();
            let num = lead_c * lead_r + sub_c * sub_r * e;
            let den = lead_c * (lead_r + 1.0) + sub_c * (sub_r + 1.0) * e;
            let scale = (lead_c * (lead_r + 1.0)).abs().max((sub_c * (sub_r + 1.0) * e).abs());
            return ratio_checked(num, den, scale, xi);
        }
    }
    // G + A is the homogeneous part alone, so the shift never enters
    let gp = eval_g_prime(cfg, xi);
    let core = g_core(cfg, xi);
    let den = gp + core;
    let scale = gp.abs().max(core.abs());
    ratio_checked(gp, den, scale, xi)
}

/// Exponential-branch bracket ratio of the printed solutions, evaluated
/// with the dominant exponential factored out.
fn exp_bracket(cfg: &WaveConfig, xi: f64) -> Result<f64> {
    let s = cfg.lambda().sqrt();
    debug_assert!(s > 0.0);
    let (b, c1, c2) = (cfg.b, cfg.c1, cfg.c2);
    if s * xi <= 0.0 {
        let e = (s * xi).exp();
        let num = c1 * (b + s) + c2 * (b - s) * e;
        let den = c1 * (b + s - 2.0) + c2 * (b - s - 2.0) * e;
        let scale = (c1 * (b + s - 2.0)).abs().max((c2 * (b - s - 2.0) * e).abs());
        ratio_checked(num, den, scale, xi)
    } else {
        let e = (-s * xi).exp();
        let num = c1 * (b + s) * e + c2 * (b - s);
        let den = c1 * (b + s - 2.0) * e + c2 * (b - s - 2.0);
        let scale = (c1 * (b + s - 2.0) * e).abs().max((c2 * (b - s - 2.0)).abs());
        ratio_checked(num, den, scale, xi)
    }
}

/// Trigonometric-branch bracket ratio of the printed solutions.
fn trig_bracket(cfg: &WaveConfig, xi: f64) -> Result<f64> {
    let root = (-cfg.lambda()).sqrt();
    debug_assert!(root > 0.0);
    let (b, c1, c2) = (cfg.b, cfg.c1, cfg.c2);
    let sn = (0.5 * root * xi).sin();
    let cs = (0.5 * root * xi).cos();
    let num = sn * (b * c2 + c1 * root) + cs * (b * c1 - c2 * root);
    let den = sn * ((b - 2.0) * c2 + c1 * root) + cs * ((b - 2.0) * c1 - c2 * root);
    let scale = (sn * ((b - 2.0) * c2 + c1 * root))
        .abs()
        .max((cs * ((b - 2.0) * c1 - c2 * root)).abs());
    ratio_checked(num, den, scale, xi)
}

/// One closed-form solution family, selectable by name at runtime.
pub trait WaveForm: Sync {
    fn name(&self) -> &'static str;
    fn kind(&self) -> SolutionKind;
    /// Evaluate U(xi) from the printed closed form. Fails with
    /// `CaseMismatch` when the sign of Lambda contradicts the branch and
    /// with `PhiSingularity` at poles.
    fn eval(&self, cfg: &WaveConfig, xi: f64) -> Result<f64>;
}

/// The printed coefficients {a0, a1, a2} for one set, without the exact
/// residual bookkeeping of `paper_parameter_sets` (this sits on the per-
/// sample hot path).
fn set_coefficients(set: SolutionSet, cfg: &WaveConfig) -> [f64; 3] {
    let (b, c, n, alpha) = (cfg.b, cfg.c, cfg.n, cfg.alpha);
    let a1 = 6.0 * (b * b * n - 3.0 * b * c * n - b * n + 2.0 * c * c * n + 2.0 * c * n) / alpha;
    let a2 = -6.0 * n * (b - c - 1.0) * (b - c - 1.0) / alpha;
    let a0 = match set {
        SolutionSet::Set1 => -6.0 * c * n * (-b + c + 1.0) / alpha,
        SolutionSet::Set2 => (-b * b * n + 6.0 * b * c * n - 6.0 * c * c * n - 2.0 * c * n) / alpha,
    };
    [a0, a1, a2]
}

fn quadratic_in(bracket: f64, set: SolutionSet, cfg: &WaveConfig) -> f64 {
    let [a0, a1, a2] = set_coefficients(set, cfg);
    a0 + a1 * bracket + a2 * bracket * bracket
}

macro_rules! wave_form {
    ($ty:ident, $set:expr, $case:expr, $bracket:ident, $check:expr) => {
        pub struct $ty;

        impl WaveForm for $ty {
            fn name(&self) -> &'static str {
                SolutionKind { set: $set, case: $case }.name()
            }

            fn kind(&self) -> SolutionKind {
                SolutionKind { set: $set, case: $case }
            }

            fn eval(&self, cfg: &WaveConfig, xi: f64) -> Result<f64> {
                let check: fn(f64) -> bool = $check;
                if !check(cfg.lambda()) {
                    return Err(Error::CaseMismatch);
                }
                Ok(quadratic_in($bracket(cfg, xi)?, $set, cfg))
            }
        }
    };
}

wave_form!(KinkExpSet1, SolutionSet::Set1, BranchCase::Exp, exp_bracket, |l| l > 0.0);
wave_form!(PeriodicTrigSet1, SolutionSet::Set1, BranchCase::Trig, trig_bracket, |l| l < 0.0);
wave_form!(SolitonExpSet2, SolutionSet::Set2, BranchCase::Exp, exp_bracket, |l| l > 0.0);
wave_form!(PeriodicTrigSet2, SolutionSet::Set2, BranchCase::Trig, trig_bracket, |l| l < 0.0);

static REGISTRY: [&dyn WaveForm; 4] = [
    &KinkExpSet1,
    &PeriodicTrigSet1,
    &SolitonExpSet2,
    &PeriodicTrigSet2,
];

/// All registered solution families.
pub fn registry() -> &'static [&'static dyn WaveForm] {
    &REGISTRY
}

/// Look a family up by its name (u11, u12, u21, u22).
pub fn lookup(name: &str) -> Option<&'static dyn WaveForm> {
    REGISTRY.iter().copied().find(|w| w.name() == name)
}

/// The family for a given set/case pair.
pub fn for_kind(kind: SolutionKind) -> &'static dyn WaveForm {
    REGISTRY
        .iter()
        .copied()
        .find(|w| w.kind() == kind)
        .expect("all four kinds are registered")
}

/// Evaluate the printed closed form for a kind.
pub fn eval_u(kind: SolutionKind, cfg: &WaveConfig, xi: f64) -> Result<f64> {
    for_kind(kind).eval(cfg, xi)
}

/// w(xi) with w(xi0) = 0, by adaptive quadrature of U. The path from
/// `xi0` to `xi` must not cross a bracket pole.
pub fn eval_w(kind: SolutionKind, cfg: &WaveConfig, xi: f64, xi0: f64) -> Result<f64> {
    if pole_between(cfg, xi0, xi) {
        return Err(Error::SingularPath { from: xi0, to: xi });
    }
    let f = |x: f64| eval_u(kind, cfg, x);
    quad::integrate(&f, xi0, xi, 1e-10)
}

/// Location of the bracket-denominator zeros of a configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PoleStructure {
    /// Denominator never vanishes.
    None,
    /// One pole (exponential branch).
    Single(f64),
    /// Periodic pole lattice `first + k * spacing` (trigonometric branch).
    Lattice { first: f64, spacing: f64 },
}

/// Analytic pole locations of the bracket denominator.
pub fn pole_structure(cfg: &WaveConfig) -> PoleStructure {
    let lambda = cfg.lambda();
    if lambda > 0.0 {
        let s = lambda.sqrt();
        let p = cfg.c1 * (cfg.b + s - 2.0);
        let q = cfg.c2 * (cfg.b - s - 2.0);
        // den = p + q e^{s xi}
        if q == 0.0 || p == 0.0 {
            return PoleStructure::None;
        }
        let ratio = -p / q;
        if ratio > 0.0 {
            PoleStructure::Single(ratio.ln() / s)
        } else {
            PoleStructure::None
        }
    } else {
        let root = (-lambda).sqrt();
        let p = (cfg.b - 2.0) * cfg.c2 + cfg.c1 * root;
        let q = (cfg.b - 2.0) * cfg.c1 - cfg.c2 * root;
        // den = p sin(w xi) + q cos(w xi), w = root / 2
        if p == 0.0 && q == 0.0 {
            return PoleStructure::None;
        }
        let omega = 0.5 * root;
        let gamma = q.atan2(p);
        PoleStructure::Lattice {
            first: -gamma / omega,
            spacing: std::f64::consts::PI / omega,
        }
    }
}

/// Whether the open interval between `a` and `b` contains a bracket pole.
pub fn pole_between(cfg: &WaveConfig, a: f64, b: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    match pole_structure(cfg) {
        PoleStructure::None => false,
        PoleStructure::Single(p) => lo < p && p < hi,
        PoleStructure::Lattice { first, spacing } => {
            let k = ((lo - first) / spacing).floor() + 1.0;
            let next = first + k * spacing;
            lo < next && next < hi
        }
    }
}

/// A pole-free xi window suitable for residual sweeps, with margins away
/// from any denominator zero.
pub fn pole_free_window(cfg: &WaveConfig) -> (f64, f64) {
    match pole_structure(cfg) {
        PoleStructure::None => (-10.0, 10.0),
        PoleStructure::Single(p) => (p + 1.0, p + 21.0),
        PoleStructure::Lattice { first, spacing } => {
            (first + 0.15 * spacing, first + 0.85 * spacing)
        }
    }
}

/// Cumulative w over a sorted list of xi values, base point `xi0`.
/// Each entry is `(w, branch)`; `branch` increments whenever the path
/// crossed a singularity, and each branch carries its own unknown offset
/// (w restarts at 0 there). Points that are themselves singular yield
/// `None`.
pub fn cumulative_w(
    kind: SolutionKind,
    cfg: &WaveConfig,
    xi0: f64,
    sorted_xi: &[f64],
    tol: f64,
) -> Vec<Option<(f64, u32)>> {
    let f = |x: f64| eval_u(kind, cfg, x);
    let mut out = Vec::with_capacity(sorted_xi.len());
    let mut acc = 0.0;
    let mut branch = 0u32;
    let mut prev: Option<f64> = None;
    for &xi in sorted_xi {
        let from = prev.unwrap_or(xi0);
        // known pole inside the segment: skip the doomed integration
        let segment = if pole_between(cfg, from, xi) {
            Err(Error::SingularPath { from, to: xi })
        } else {
            quad::integrate(&f, from, xi, tol)
        };
        match segment {
            Ok(v) => {
                acc += v;
                out.push(Some((acc, branch)));
            }
            Err(_) => {
                // restart on the far side of the pole with a fresh offset
                branch += 1;
                acc = 0.0;
                match f(xi) {
                    Ok(_) => out.push(Some((acc, branch))),
                    Err(_) => out.push(None),
                }
            }
        }
        prev = Some(xi);
    }
    out
}
