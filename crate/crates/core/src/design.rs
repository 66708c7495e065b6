//! Field parameters for the two-loop protocol.
//!
//! Both loops drive the Bloch vector of `ψ₊(θ)` once around the same cone of
//! half-angle θ, in the same direction, with opposite dynamic phases. Fixing
//! the rotation rate ω and the first transverse amplitude ω₁ leaves a single
//! dimensionless knob `x = (ω₁′ − ω₁)/ω ∈ (0, 1]` plus a branch choice, which
//! together set the cone angle and hence the geometric phase
//! `φ_g = −2π(1 − cos θ)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};

/// Width of the excluded zones at both ends of the reachable phase interval.
pub const PHASE_EPSILON: f64 = 1e-6;

/// |ω₀| below this leaves κ = ω₀′/ω₀ undefined.
pub const KAPPA_EPSILON: f64 = 1e-12;

/// Sign choice in `f(x) = (1 ± √(1 − x²))/x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Invalid(format!(
                "branch must be \"plus\" or \"minus\", got {other:?}"
            ))),
        }
    }
}

/// Overall sign of the lab-frame Hamiltonian of a loop.
///
/// `Positive` gives `+½(ω₁σx cos ωt + ω₁σy sin ωt + ω₀σz)` (first loop),
/// `Negative` the negated triple (second loop).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(&self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// One rotating-field schedule, all rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopField {
    /// Rotation rate of the transverse field (> 0).
    pub omega: f64,
    /// Transverse amplitude (> 0).
    pub omega1: f64,
    /// Longitudinal component, any sign.
    pub omega0: f64,
    pub polarity: Polarity,
    /// Gyromagnetic ratio, carried for converting to field units. Never used in computation.
    pub gamma: f64,
}

impl LoopField {
    pub fn new(omega: f64, omega1: f64, omega0: f64, polarity: Polarity) -> Result<Self> {
        positive("omega", omega)?;
        positive("omega1", omega1)?;
        finite("omega0", omega0)?;
        Ok(Self {
            omega,
            omega1,
            omega0,
            polarity,
            gamma: 1.0,
        })
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Time for one full turn of the transverse field, `2π/ω`.
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }
}

/// A solved (or hand-assembled) pair of loops with its derived quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLoopDesign {
    pub loop1: LoopField,
    pub loop2: LoopField,
    /// `(ω₁′ − ω₁)/ω`.
    pub x: f64,
    pub branch: Branch,
    pub f: f64,
    pub cos_theta: f64,
    /// Cone half-angle in `[0, π/2]`.
    pub theta: f64,
    /// Rotating-frame precession rate of loop 1, `√((ω₀ − ω)² + ω₁²)`.
    pub rabi: f64,
    /// Rotating-frame precession rate of loop 2, `√((ω₀′ + ω)² + ω₁′²)`.
    pub rabi_prime: f64,
    /// `ω₀′/ω₀`, `None` when ω₀ vanishes.
    pub kappa: Option<f64>,
    pub phi_g_predicted: f64,
}

impl TwoLoopDesign {
    pub fn omega(&self) -> f64 {
        self.loop1.omega
    }

    pub fn period(&self) -> f64 {
        self.loop1.period()
    }

    pub fn psi_plus(&self) -> crate::qmath::CVec2 {
        crate::qmath::CVec2::cyclic_plus(self.theta)
    }

    pub fn psi_minus(&self) -> crate::qmath::CVec2 {
        crate::qmath::CVec2::cyclic_minus(self.theta)
    }

    /// Assemble a design from raw loop parameters, deriving the cone quantities
    /// from loop 1. No constraint is enforced; use [`validate`] to check.
    pub fn from_fields(
        omega: f64,
        omega1: f64,
        omega0: f64,
        omega1_prime: f64,
        omega0_prime: f64,
        branch: Branch,
    ) -> Result<Self> {
        let loop1 = LoopField::new(omega, omega1, omega0, Polarity::Positive)?;
        let loop2 = LoopField::new(omega, omega1_prime, omega0_prime, Polarity::Negative)?;
        let x = (omega1_prime - omega1) / omega;
        let f = (omega0 - omega) / omega1;
        let theta = omega1.atan2(omega0 - omega);
        Ok(Self {
            loop1,
            loop2,
            x,
            branch,
            f,
            cos_theta: theta.cos(),
            theta,
            rabi: (omega0 - omega).hypot(omega1),
            rabi_prime: (omega0_prime + omega).hypot(omega1_prime),
            kappa: kappa(omega0, omega0_prime),
            phi_g_predicted: geometric_phase(theta.cos()),
        })
    }
}

fn kappa(omega0: f64, omega0_prime: f64) -> Option<f64> {
    (omega0.abs() >= KAPPA_EPSILON).then(|| omega0_prime / omega0)
}

/// Two-loop geometric phase for cone angle θ.
pub fn geometric_phase(cos_theta: f64) -> f64 {
    -TAU * (1.0 - cos_theta)
}

fn check_x(x: f64) -> Result<f64> {
    finite("x", x)?;
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err(Error::OutOfRange {
            name: "x",
            value: x,
            interval: "(0, 1]",
        })
    }
}

/// `f(x) = (1 ± √(1 − x²))/x` on `0 < x ≤ 1`.
///
/// The minus branch is evaluated as `x/(1 + √(1 − x²))` so small `x` does not
/// cancel; the two branches are reciprocals.
pub fn f_of_x(x: f64, branch: Branch) -> Result<f64> {
    check_x(x)?;
    let root = ((1.0 - x) * (1.0 + x)).sqrt();
    Ok(match branch {
        Branch::Plus => (1.0 + root) / x,
        Branch::Minus => x / (1.0 + root),
    })
}

/// Build the design given an `f` already known to solve `x f² − 2f + x = 0`.
fn assemble(x: f64, branch: Branch, f: f64, omega1: f64, omega: f64) -> Result<TwoLoopDesign> {
    let omega1_prime = omega1 + x * omega;
    let omega0 = omega + f * omega1;
    let omega0_prime = -omega + f * omega1_prime;
    let loop1 = LoopField::new(omega, omega1, omega0, Polarity::Positive)?;
    let loop2 = LoopField::new(omega, omega1_prime, omega0_prime, Polarity::Negative)?;
    let norm = f.hypot(1.0);
    let cos_theta = f / norm;
    Ok(TwoLoopDesign {
        loop1,
        loop2,
        x,
        branch,
        f,
        cos_theta,
        theta: 1.0f64.atan2(f),
        rabi: (omega0 - omega).hypot(omega1),
        rabi_prime: (omega0_prime + omega).hypot(omega1_prime),
        kappa: kappa(omega0, omega0_prime),
        phi_g_predicted: geometric_phase(cos_theta),
    })
}

/// Forward design: fields from `(x, branch, ω₁, ω)`.
pub fn solve_forward(x: f64, branch: Branch, omega1: f64, omega: f64) -> Result<TwoLoopDesign> {
    positive("omega1", omega1)?;
    positive("omega", omega)?;
    let f = f_of_x(x, branch)?;
    assemble(x, branch, f, omega1, omega)
}

/// Inverse design: fields that produce the requested two-loop geometric phase.
///
/// `φ_g` must lie in `[−2π + ε, −ε]` with `ε = 1e−6`. The branch is `minus`
/// when `f = cot θ ≤ 1`, `plus` otherwise.
pub fn solve_inverse(phi_g: f64, omega1: f64, omega: f64) -> Result<TwoLoopDesign> {
    finite("phi_g", phi_g)?;
    if !(-TAU + PHASE_EPSILON..=-PHASE_EPSILON).contains(&phi_g) {
        return Err(Error::OutOfRange {
            name: "phi_g",
            value: phi_g,
            interval: "(-2pi, 0) excluding 1e-6 of either endpoint",
        });
    }
    positive("omega1", omega1)?;
    positive("omega", omega)?;
    let cos_theta = 1.0 + phi_g / TAU;
    let sin_theta = ((1.0 - cos_theta) * (1.0 + cos_theta)).sqrt();
    let f = cos_theta / sin_theta;
    let x = (2.0 * f / (f * f + 1.0)).min(1.0);
    let branch = if f <= 1.0 {
        Branch::Minus
    } else {
        Branch::Plus
    };
    assemble(x, branch, f, omega1, omega)
}

/// A named constraint residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
}

/// Constraint residuals of a design. All are absolute differences.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub residuals: Vec<Residual>,
}

impl ValidationReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.value)
    }

    /// Largest residual; NaN residuals count as infinite.
    pub fn max(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| {
                if r.value.is_nan() {
                    f64::INFINITY
                } else {
                    r.value
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() < tol
    }

    /// Residuals at or above `tol`.
    pub fn flagged(&self, tol: f64) -> Vec<&Residual> {
        self.residuals.iter().filter(|r| !(r.value < tol)).collect()
    }
}

pub const RESIDUAL_CONE_LOOP1: &str = "cone_loop1";
pub const RESIDUAL_CONE_LOOP2: &str = "cone_loop2";
pub const RESIDUAL_CANCELLATION: &str = "dynamic_cancellation";
pub const RESIDUAL_BRANCH_PRODUCT: &str = "branch_product";
pub const RESIDUAL_KAPPA: &str = "kappa_consistency";

/// Check the shared-cone condition on both loops, dynamic-phase cancellation,
/// the branch reciprocity of `f` and (when κ is defined) the κ-parameterized
/// form of the loop-1 longitudinal field.
pub fn validate(design: &TwoLoopDesign) -> ValidationReport {
    let d = design;
    let w = d.loop1.omega;
    let (w1, w0) = (d.loop1.omega1, d.loop1.omega0);
    let (w1p, w0p) = (d.loop2.omega1, d.loop2.omega0);
    let tan_theta = d.theta.tan();

    let mut residuals = vec![
        Residual {
            name: RESIDUAL_CONE_LOOP1,
            value: (tan_theta - w1 / (w0 - w)).abs(),
        },
        Residual {
            name: RESIDUAL_CONE_LOOP2,
            value: (tan_theta - w1p / (w0p + w)).abs(),
        },
        Residual {
            name: RESIDUAL_CANCELLATION,
            value: (2.0 * d.cos_theta - (d.rabi_prime - d.rabi) / w).abs(),
        },
    ];
    let product = match (f_of_x(d.x, Branch::Plus), f_of_x(d.x, Branch::Minus)) {
        (Ok(p), Ok(m)) => (p * m - 1.0).abs(),
        _ => f64::NAN,
    };
    residuals.push(Residual {
        name: RESIDUAL_BRANCH_PRODUCT,
        value: product,
    });
    if let Some(k) = d.kappa {
        residuals.push(Residual {
            name: RESIDUAL_KAPPA,
            value: (w0 - w - (1.0 + k) * w1 * w / (w1p - k * w1)).abs(),
        });
    }
    ValidationReport { residuals }
}

/// θ for a given branch; the two branches are complementary about π/4.
pub fn cone_angle(x: f64, branch: Branch) -> Result<f64> {
    let f = f_of_x(x, branch)?;
    Ok(1.0f64.atan2(f))
}
