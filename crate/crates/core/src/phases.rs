//! Total, dynamic and geometric phases of the two-loop cyclic evolution.
//!
//! Total phase is the Pancharatnam phase `arg⟨ψ(0)|ψ(T)⟩`. Dynamic phase is
//! `−∫⟨ψ|H|ψ⟩dt` by Simpson quadrature over the recorded trajectory. The
//! geometric phase is their difference, reported in `(−2π, 0]`. A second,
//! independent geometric estimate comes from the solid angle swept by the
//! Bloch vector.

use std::f64::consts::{PI, TAU};

use crate::design::TwoLoopDesign;
use crate::error::{Error, Result};
use crate::evolve::{evolve, EvolutionMethod, Trajectory};
use crate::qmath::{inner, CVec2};

/// Overlap magnitudes below this leave the Pancharatnam phase undefined.
pub const MIN_OVERLAP: f64 = 1e-6;

/// Tolerance on `|first − last|` for paths flagged as closed.
const CLOSED_PATH_TOL: f64 = 1e-6;

/// Map an angle into `(−2π, 0]`.
pub fn canonical_phase(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r == 0.0 || r >= TAU {
        0.0
    } else {
        r - TAU
    }
}

/// Signed difference `a − b` reduced to `(−π, π]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let r = (a - b).rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDecomposition {
    /// Pancharatnam phase of the full two-loop evolution, in `(−2π, 0]`.
    pub total: f64,
    /// Sum of the per-loop dynamic phases, unwrapped.
    pub dynamic: f64,
    /// `total − dynamic`, in `(−2π, 0]`.
    pub geometric: f64,
    /// `1 − |⟨ψ(0)|ψ(2T)⟩|`.
    pub cyclicity_defect: f64,
    pub per_loop_dynamic: [f64; 2],
    /// Copied from the design for reporting.
    pub phi_g_predicted: f64,
}

/// `arg⟨psi0|psi_t⟩` in `(−π, π]`.
pub fn pancharatnam_phase(psi0: &CVec2, psi_t: &CVec2) -> Result<f64> {
    let overlap = inner(psi0, psi_t);
    let mag = overlap.norm();
    if !(mag > MIN_OVERLAP) {
        return Err(Error::UndefinedPhase {
            overlap: mag,
            threshold: MIN_OVERLAP,
        });
    }
    Ok(overlap.arg())
}

/// `−∫⟨ψ|H|ψ⟩dt` by composite Simpson's rule over uniform samples.
pub fn dynamic_phase(traj: &Trajectory) -> Result<f64> {
    let n = traj.len();
    if n < 3 || n % 2 == 0 || traj.dynamic_integrand.len() != n {
        return Err(Error::EvenSampleCount(n));
    }
    let h = traj.duration() / (n - 1) as f64;
    let y = &traj.dynamic_integrand;
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let integral = h / 3.0 * (y[0] + y[n - 1] + 4.0 * odd + 2.0 * even);
    Ok(-integral)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 3 || samples % 2 == 0 {
        return Err(Error::BadCount {
            name: "samples",
            value: samples,
            requirement: "must be odd and at least 3",
        });
    }
    Ok(())
}

/// Both loop trajectories of `design` starting from `psi0`, one period each.
pub fn two_loop_trajectories(
    design: &TwoLoopDesign,
    psi0: &CVec2,
    method: EvolutionMethod,
    samples: usize,
) -> Result<(Trajectory, Trajectory)> {
    let period = design.period();
    let first = evolve(&design.loop1, psi0, period, method, samples)?;
    let mid = *first.last().expect("trajectory has samples");
    let second = evolve(&design.loop2, &mid, period, method, samples)?;
    Ok((first, second))
}

/// Decompose the phases of two recorded loop trajectories.
pub fn decompose_trajectories(
    first: &Trajectory,
    second: &Trajectory,
    phi_g_predicted: f64,
) -> Result<PhaseDecomposition> {
    let psi0 = first.initial().ok_or(Error::EvenSampleCount(0))?;
    let end = second.last().ok_or(Error::EvenSampleCount(0))?;
    let total = canonical_phase(pancharatnam_phase(psi0, end)?);
    let per_loop_dynamic = [dynamic_phase(first)?, dynamic_phase(second)?];
    let dynamic = per_loop_dynamic[0] + per_loop_dynamic[1];
    Ok(PhaseDecomposition {
        total,
        dynamic,
        geometric: canonical_phase(total - dynamic),
        cyclicity_defect: (1.0 - inner(psi0, end).norm()).max(0.0),
        per_loop_dynamic,
        phi_g_predicted,
    })
}

/// Run both loops from `ψ₊(θ)` and split the accumulated phase.
pub fn decompose_two_loop(
    design: &TwoLoopDesign,
    method: EvolutionMethod,
    samples: usize,
) -> Result<PhaseDecomposition> {
    decompose_two_loop_from(design, &design.psi_plus(), method, samples)
}

/// As [`decompose_two_loop`] but from an arbitrary normalized initial state.
pub fn decompose_two_loop_from(
    design: &TwoLoopDesign,
    psi0: &CVec2,
    method: EvolutionMethod,
    samples: usize,
) -> Result<PhaseDecomposition> {
    check_samples(samples)?;
    let (first, second) = two_loop_trajectories(design, psi0, method, samples)?;
    decompose_trajectories(&first, &second, design.phi_g_predicted)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopPhases {
    pub geometric: f64,
    pub dynamic: f64,
}

/// Closed-form per-loop phases acquired by `ψ₊`.
///
/// Loop 1: `φ_g = −π(1 − cos θ)`, `φ_d = −π(cos θ + Ω/ω)`.
/// Loop 2: `φ_g = −π(1 − cos θ)`, `φ_d = −π(cos θ − Ω′/ω)`.
pub fn analytic_phases(design: &TwoLoopDesign) -> (LoopPhases, LoopPhases) {
    let c = design.cos_theta;
    let w = design.omega();
    let geometric = -PI * (1.0 - c);
    (
        LoopPhases {
            geometric,
            dynamic: -PI * (c + design.rabi / w),
        },
        LoopPhases {
            geometric,
            dynamic: -PI * (c - design.rabi_prime / w),
        },
    )
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&v, &v).sqrt();
    (n > 1e-9).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    cross(a, b)
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
        .atan2(dot(a, b))
}

/// Signed solid angle of the spherical triangle `(a, b, c)`; positive when
/// the vertices run counter-clockwise seen from outside the sphere.
fn triangle_solid_angle(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let numer = dot(a, &cross(b, c));
    let denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * numer.atan2(denom)
}

/// Geometric phase `−½ × signed solid angle` enclosed by a Bloch-sphere path.
///
/// The path is closed by the geodesic from its last point back to its first.
/// With `closed = true` the caller asserts those points already coincide.
/// The enclosed area is triangulated as a fan from the normalized centroid;
/// when the centroid vanishes (for example a great circle) the fan apex is
/// the path's oriented area normal instead.
pub fn solid_angle_phase(bloch_path: &[[f64; 3]], closed: bool) -> Result<f64> {
    let n = bloch_path.len();
    if n < 3 {
        return Err(Error::BadCount {
            name: "path points",
            value: n,
            requirement: "at least 3 points required",
        });
    }
    let mut points = Vec::with_capacity(n);
    for p in bloch_path {
        points
            .push(normalize(*p).ok_or_else(|| {
                Error::Invalid(format!("Bloch path point {p:?} has zero length"))
            })?);
    }
    if closed {
        let gap = angle_between(&points[0], &points[n - 1]);
        if gap > CLOSED_PATH_TOL {
            return Err(Error::OpenPath(gap));
        }
    }
    for i in 0..n - 1 {
        let angle = angle_between(&points[i], &points[i + 1]);
        if angle >= PI / 2.0 {
            return Err(Error::AmbiguousPath {
                index: i,
                next: i + 1,
                angle,
            });
        }
    }

    let sum = points.iter().fold([0.0; 3], |acc, p| {
        [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
    });
    let centroid = [sum[0] / n as f64, sum[1] / n as f64, sum[2] / n as f64];
    let apex = match normalize(centroid) {
        Some(c) => c,
        None => {
            let area = (0..n).fold([0.0; 3], |acc, i| {
                let c = cross(&points[i], &points[(i + 1) % n]);
                [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]
            });
            // a path along a single great-circle arc encloses nothing
            match normalize(area) {
                Some(a) => a,
                None => return Ok(0.0),
            }
        }
    };

    let mut solid = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        solid += triangle_solid_angle(&apex, &points[i], &points[j]);
    }
    Ok(-0.5 * solid)
}
