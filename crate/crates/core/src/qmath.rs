//! Two-level complex linear algebra: state vectors, 2x2 matrices and the
//! closed-form exponential of a Hermitian generator written in the Pauli basis.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{finite, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Generators with |c| below this are treated as pure identity.
const ZERO_GENERATOR: f64 = 1e-300;

/// A two-component complex amplitude vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec2 {
    pub a0: C64,
    pub a1: C64,
}

impl CVec2 {
    pub const fn new(a0: C64, a1: C64) -> Self {
        Self { a0, a1 }
    }

    pub fn from_real(a0: f64, a1: f64) -> Self {
        Self::new(C64::new(a0, 0.0), C64::new(a1, 0.0))
    }

    /// Spin up, `(1, 0)`.
    pub fn up() -> Self {
        Self::new(ONE, ZERO)
    }

    /// Spin down, `(0, 1)`.
    pub fn down() -> Self {
        Self::new(ZERO, ONE)
    }

    /// The cyclic state `(cos θ/2, sin θ/2)` whose Bloch vector sits at polar angle θ.
    pub fn cyclic_plus(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self::from_real(c, s)
    }

    /// The state `(-sin θ/2, cos θ/2)` orthogonal to [`CVec2::cyclic_plus`].
    pub fn cyclic_minus(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self::from_real(-s, c)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, z: C64) -> Self {
        Self::new(self.a0 * z, self.a1 * z)
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.a1.is_finite()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a0 - other.a0).norm().max((self.a1 - other.a1).norm())
    }
}

impl Add for CVec2 {
    type Output = CVec2;

    fn add(self, rhs: CVec2) -> CVec2 {
        CVec2::new(self.a0 + rhs.a0, self.a1 + rhs.a1)
    }
}

impl Sub for CVec2 {
    type Output = CVec2;

    fn sub(self, rhs: CVec2) -> CVec2 {
        CVec2::new(self.a0 - rhs.a0, self.a1 - rhs.a1)
    }
}

impl Mul<f64> for CVec2 {
    type Output = CVec2;

    fn mul(self, rhs: f64) -> CVec2 {
        CVec2::new(self.a0 * rhs, self.a1 * rhs)
    }
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &CVec2, b: &CVec2) -> C64 {
    a.a0.conj() * b.a0 + a.a1.conj() * b.a1
}

/// A 2x2 complex matrix, row-major.
///
/// Values built by [`exp_minus_iht`] and products of such values are unitary
/// to round-off. Hermitian generators are carried as [`PauliCoeffs`] instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    m: [[C64; 2]; 2],
}

impl Unitary2 {
    pub const fn from_rows(m: [[C64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::from_rows([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Self::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Self::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self::from_rows([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        Self::from_rows([[d0, ZERO], [ZERO, d1]])
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(c0: CVec2, c1: CVec2) -> Self {
        Self::from_rows([[c0.a0, c1.a0], [c0.a1, c1.a1]])
    }

    pub fn rows(&self) -> [[C64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.m[row][col]
    }

    pub fn column(&self, col: usize) -> CVec2 {
        CVec2::new(self.m[0][col], self.m[1][col])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::from_rows([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, z: C64) -> Self {
        let m = &self.m;
        Self::from_rows([[m[0][0] * z, m[0][1] * z], [m[1][0] * z, m[1][1] * z]])
    }

    pub fn apply(&self, s: &CVec2) -> CVec2 {
        apply(self, s)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    /// Both eigenvalues from the characteristic polynomial.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let half_tr = 0.5 * self.trace();
        let disc = (half_tr * half_tr - self.det()).sqrt();
        [half_tr + disc, half_tr - disc]
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Unitary2::from_rows(out)
    }
}

impl Sub for Unitary2 {
    type Output = Unitary2;

    fn sub(self, rhs: Unitary2) -> Unitary2 {
        let (a, b) = (&self.m, &rhs.m);
        Unitary2::from_rows([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Mul<CVec2> for Unitary2 {
    type Output = CVec2;

    fn mul(self, rhs: CVec2) -> CVec2 {
        apply(&self, &rhs)
    }
}

/// Matrix-vector product.
pub fn apply(u: &Unitary2, s: &CVec2) -> CVec2 {
    let m = &u.m;
    CVec2::new(
        m[0][0] * s.a0 + m[0][1] * s.a1,
        m[1][0] * s.a0 + m[1][1] * s.a1,
    )
}

/// Real coefficients of a Hermitian operator `c0·I + cx·σx + cy·σy + cz·σz`, in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PauliCoeffs {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl PauliCoeffs {
    pub const fn new(c0: f64, cx: f64, cy: f64, cz: f64) -> Self {
        Self { c0, cx, cy, cz }
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.cx.is_finite() && self.cy.is_finite() && self.cz.is_finite()
    }

    /// Length of the traceless part, `|c|`.
    pub fn magnitude(&self) -> f64 {
        (self.cx * self.cx + self.cy * self.cy + self.cz * self.cz).sqrt()
    }

    /// `H·s`.
    pub fn apply(&self, s: &CVec2) -> CVec2 {
        let off_lo = C64::new(self.cx, self.cy); // row 1, col 0
        let off_hi = C64::new(self.cx, -self.cy); // row 0, col 1
        CVec2::new(
            s.a0 * (self.c0 + self.cz) + off_hi * s.a1,
            off_lo * s.a0 + s.a1 * (self.c0 - self.cz),
        )
    }

    /// `⟨s|H|s⟩`; real for Hermitian `H`.
    pub fn expectation(&self, s: &CVec2) -> f64 {
        inner(s, &self.apply(s)).re
    }

    /// The Hermitian matrix itself.
    pub fn matrix(&self) -> Unitary2 {
        Unitary2::from_rows([
            [
                C64::new(self.c0 + self.cz, 0.0),
                C64::new(self.cx, -self.cy),
            ],
            [C64::new(self.cx, self.cy), C64::new(self.c0 - self.cz, 0.0)],
        ])
    }
}

/// `exp(-i (c0 I + c·σ) t)` in closed form.
pub fn exp_minus_iht(h: &PauliCoeffs, t: f64) -> Result<Unitary2> {
    finite("t", t)?;
    finite("c0", h.c0)?;
    finite("cx", h.cx)?;
    finite("cy", h.cy)?;
    finite("cz", h.cz)?;
    Ok(pauli_exp(h, t))
}

/// Unchecked closed form used on the hot paths where inputs are already validated.
pub(crate) fn pauli_exp(h: &PauliCoeffs, t: f64) -> Unitary2 {
    let global = C64::from_polar(1.0, -h.c0 * t);
    let mag = h.magnitude();
    if mag < ZERO_GENERATOR {
        return Unitary2::diag(global, global);
    }
    let angle = mag * t;
    let (sin, cos) = angle.sin_cos();
    // sin(|c|t)·ĉ
    let k = sin / mag;
    let (nx, ny, nz) = (k * h.cx, k * h.cy, k * h.cz);
    Unitary2::from_rows([
        [C64::new(cos, -nz), C64::new(-ny, -nx)],
        [C64::new(ny, -nx), C64::new(cos, nz)],
    ])
    .scale(global)
}
