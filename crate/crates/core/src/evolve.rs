//! Spin-1/2 evolution under a single rotating-field loop.
//!
//! Two independent routes are provided. The exact route factors the lab-frame
//! propagator as `exp(−iσz ωt/2)·exp(−iH_rot t)`, with `H_rot` the static
//! Hamiltonian seen in the frame co-rotating with the transverse field; this
//! solves the lab-frame equation for every initial state. The RK4 route
//! integrates `i dψ/dt = H(t)ψ` directly and serves as its oracle.

use crate::design::LoopField;
use crate::error::{finite, Error, Result};
use crate::qmath::{pauli_exp, CVec2, PauliCoeffs, Unitary2, C64};

/// Lowest accepted RK4 step count.
pub const MIN_RK4_STEPS: usize = 100;

/// Tolerance on the initial-state norm.
const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMethod {
    /// Closed-form rotating-frame propagator.
    Exact,
    /// Classical fourth-order Runge-Kutta with this many fixed steps over the duration.
    Rk4 { steps: usize },
}

impl EvolutionMethod {
    pub fn rk4(steps: usize) -> Result<Self> {
        if steps < MIN_RK4_STEPS {
            return Err(Error::BadCount {
                name: "steps",
                value: steps,
                requirement: "rk4 needs at least 100 steps",
            });
        }
        Ok(EvolutionMethod::Rk4 { steps })
    }

    fn check(&self) -> Result<()> {
        match *self {
            EvolutionMethod::Exact => Ok(()),
            EvolutionMethod::Rk4 { steps } => Self::rk4(steps).map(|_| ()),
        }
    }
}

/// Lab-frame Hamiltonian `±½(ω₁ cos ωt, ω₁ sin ωt, ω₀)·σ`.
pub fn hamiltonian_lab(field: &LoopField, t: f64) -> PauliCoeffs {
    let s = 0.5 * field.polarity.sign();
    let (sin, cos) = (field.omega * t).sin_cos();
    PauliCoeffs::new(
        0.0,
        s * field.omega1 * cos,
        s * field.omega1 * sin,
        s * field.omega0,
    )
}

/// Static Hamiltonian in the frame rotating with the transverse field.
///
/// Loop 1 gives `½(ω₀ − ω)σz + ½ω₁σx`, loop 2 gives `−½(ω₀′ + ω)σz − ½ω₁′σx`.
pub fn rotating_hamiltonian(field: &LoopField) -> PauliCoeffs {
    let s = field.polarity.sign();
    PauliCoeffs::new(
        0.0,
        0.5 * s * field.omega1,
        0.0,
        0.5 * (s * field.omega0 - field.omega),
    )
}

/// Lab-frame propagator from 0 to `t`.
pub fn propagator_exact(field: &LoopField, t: f64) -> Unitary2 {
    let frame = PauliCoeffs::new(0.0, 0.0, 0.0, 0.5 * field.omega);
    pauli_exp(&frame, t) * pauli_exp(&rotating_hamiltonian(field), t)
}

/// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
pub fn bloch_vector(s: &CVec2) -> [f64; 3] {
    let c = s.a0.conj() * s.a1;
    [2.0 * c.re, 2.0 * c.im, s.a0.norm_sqr() - s.a1.norm_sqr()]
}

fn rhs(field: &LoopField, t: f64, psi: &CVec2) -> CVec2 {
    hamiltonian_lab(field, t)
        .apply(psi)
        .scale(C64::new(0.0, -1.0))
}

/// Advance `psi` from `t0` by `n` RK4 steps of size `h`.
fn rk4_advance(field: &LoopField, psi: CVec2, t0: f64, h: f64, n: usize) -> CVec2 {
    let mut psi = psi;
    for j in 0..n {
        let t = t0 + h * j as f64;
        let k1 = rhs(field, t, &psi);
        let k2 = rhs(field, t + 0.5 * h, &(psi + k1 * (0.5 * h)));
        let k3 = rhs(field, t + 0.5 * h, &(psi + k2 * (0.5 * h)));
        let k4 = rhs(field, t + h, &(psi + k3 * h));
        psi = psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    psi
}

/// Sampled solution of one loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec2>,
    pub bloch: Vec<[f64; 3]>,
    /// `⟨ψ(t)|H(t)|ψ(t)⟩` at each sample, rad/s.
    pub dynamic_integrand: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn initial(&self) -> Option<&CVec2> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&CVec2> {
        self.states.last()
    }

    fn push(&mut self, t: f64, psi: CVec2, h: &PauliCoeffs) {
        self.times.push(t);
        self.bloch.push(bloch_vector(&psi));
        self.dynamic_integrand.push(h.expectation(&psi));
        self.states.push(psi);
    }

    /// Append `next`, which must start where `self` ends, shifting its times.
    /// The shared junction sample is kept once.
    pub fn append(&mut self, next: &Trajectory) {
        let offset = self.duration();
        let skip = usize::from(!self.is_empty());
        for i in skip..next.len() {
            self.times.push(offset + next.times[i]);
            self.states.push(next.states[i]);
            self.bloch.push(next.bloch[i]);
            self.dynamic_integrand.push(next.dynamic_integrand[i]);
        }
    }
}

/// Sample time `k` of `samples` evenly spaced points on `[0, duration]`.
fn sample_time(duration: f64, k: usize, samples: usize) -> f64 {
    duration * (k as f64 / (samples - 1) as f64)
}

/// Final state after `duration` without recording samples.
pub fn propagate(
    field: &LoopField,
    psi0: &CVec2,
    duration: f64,
    method: EvolutionMethod,
) -> Result<CVec2> {
    finite("duration", duration)?;
    method.check()?;
    Ok(match method {
        EvolutionMethod::Exact => propagator_exact(field, duration).apply(psi0),
        EvolutionMethod::Rk4 { steps } => {
            rk4_advance(field, *psi0, 0.0, duration / steps as f64, steps)
        }
    })
}

/// Evolve `psi0` under `field` for `duration`, recording `samples` evenly
/// spaced points including both endpoints.
///
/// With RK4 each sample interval gets `ceil(steps / (samples − 1))` substeps,
/// so the step equals `duration/steps` whenever `samples − 1` divides `steps`
/// and is never larger.
pub fn evolve(
    field: &LoopField,
    psi0: &CVec2,
    duration: f64,
    method: EvolutionMethod,
    samples: usize,
) -> Result<Trajectory> {
    finite("duration", duration)?;
    if duration <= 0.0 {
        return Err(Error::OutOfRange {
            name: "duration",
            value: duration,
            interval: "(0, inf)",
        });
    }
    if samples < 2 {
        return Err(Error::BadCount {
            name: "samples",
            value: samples,
            requirement: "at least 2 samples required",
        });
    }
    if !psi0.is_finite() || (psi0.norm() - 1.0).abs() > NORM_TOL {
        return Err(Error::Invalid(format!(
            "initial state must be normalized, |psi0| = {}",
            psi0.norm()
        )));
    }
    method.check()?;

    let mut traj = Trajectory {
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        bloch: Vec::with_capacity(samples),
        dynamic_integrand: Vec::with_capacity(samples),
    };
    match method {
        EvolutionMethod::Exact => {
            for k in 0..samples {
                let t = sample_time(duration, k, samples);
                let psi = propagator_exact(field, t).apply(psi0);
                traj.push(t, psi, &hamiltonian_lab(field, t));
            }
        }
        EvolutionMethod::Rk4 { steps } => {
            let intervals = samples - 1;
            let sub = steps.div_ceil(intervals);
            let mut psi = *psi0;
            traj.push(0.0, psi, &hamiltonian_lab(field, 0.0));
            for k in 1..samples {
                let t0 = sample_time(duration, k - 1, samples);
                let t1 = sample_time(duration, k, samples);
                psi = rk4_advance(field, psi, t0, (t1 - t0) / sub as f64, sub);
                traj.push(t1, psi, &hamiltonian_lab(field, t1));
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{solve_forward, Branch, Polarity};
    use crate::qmath::inner;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2, TAU};

    fn unit_design() -> crate::design::TwoLoopDesign {
        solve_forward(1.0, Branch::Minus, 1.0, 1.0).unwrap()
    }

    fn wrap(a: f64) -> f64 {
        let r = a.rem_euclid(TAU);
        if r > PI {
            r - TAU
        } else {
            r
        }
    }

    #[test]
    fn lab_hamiltonian_samples() {
        let l1 = LoopField::new(1.0, 1.0, 2.0, Polarity::Positive).unwrap();
        assert_eq!(
            hamiltonian_lab(&l1, 0.0),
            PauliCoeffs::new(0.0, 0.5, 0.0, 1.0)
        );
        let h = hamiltonian_lab(&l1, FRAC_PI_2);
        assert!(h.cx.abs() < 1e-16 && (h.cy - 0.5).abs() < 1e-16 && h.cz == 1.0);
        let l2 = LoopField::new(1.0, 2.0, 1.0, Polarity::Negative).unwrap();
        assert_eq!(
            hamiltonian_lab(&l2, 0.0),
            PauliCoeffs::new(0.0, -1.0, 0.0, -0.5)
        );
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let d = unit_design();
        for l in [d.loop1, d.loop2] {
            assert!(propagator_exact(&l, 0.0).max_abs_diff(&Unitary2::identity()) < 1e-16);
        }
    }

    #[test]
    fn loop1_full_period_phase() {
        let d = unit_design();
        let psi = CVec2::cyclic_plus(d.theta);
        let out = propagator_exact(&d.loop1, TAU).apply(&psi);
        let amp = inner(&psi, &out);
        assert!((amp.norm() - 1.0).abs() < 1e-12);
        assert!((wrap(amp.arg() + PI * (1.0 + SQRT_2))).abs() < 1e-12);
        assert!((amp.arg() - -1.301_290_284_568_53).abs() < 1e-10);
    }

    #[test]
    fn loop2_full_period_phase() {
        let d = unit_design();
        let psi = CVec2::cyclic_plus(d.theta);
        let out = propagator_exact(&d.loop2, TAU).apply(&psi);
        let amp = inner(&psi, &out);
        assert!((amp.norm() - 1.0).abs() < 1e-12);
        assert!((amp.arg().rem_euclid(TAU) - 5.744_173_222_726_93).abs() < 1e-10);
        assert!(wrap(amp.arg() + PI * (1.0 - 2.0 * SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn propagator_is_unitary() {
        let d = solve_forward(0.37, Branch::Plus, 2.5, 1.7).unwrap();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            assert!(propagator_exact(&d.loop1, t).unitarity_defect() < 1e-12);
            assert!(propagator_exact(&d.loop2, t).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn cyclic_trajectory_returns_to_start() {
        let d = unit_design();
        let psi = d.psi_plus();
        let tr = evolve(&d.loop1, &psi, TAU, EvolutionMethod::Exact, 101).unwrap();
        assert_eq!(tr.len(), 101);
        assert_eq!(tr.times[0], 0.0);
        assert_eq!(tr.duration(), TAU);
        let n = tr.bloch.last().unwrap();
        assert!((n[0] - FRAC_1_SQRT_2).abs() < 1e-10);
        assert!(n[1].abs() < 1e-10);
        assert!((n[2] - FRAC_1_SQRT_2).abs() < 1e-10);
        assert!((inner(&psi, tr.last().unwrap()).norm() - 1.0).abs() < 1e-10);
        for (s, b) in tr.states.iter().zip(&tr.bloch) {
            assert!((s.norm() - 1.0).abs() < 1e-12);
            assert!(((b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt() - 1.0).abs() < 1e-12);
        }
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn spin_up_is_not_cyclic() {
        let d = unit_design();
        let exact = evolve(&d.loop1, &CVec2::up(), TAU, EvolutionMethod::Exact, 101).unwrap();
        let rk4 = evolve(
            &d.loop1,
            &CVec2::up(),
            TAU,
            EvolutionMethod::Rk4 { steps: 20000 },
            101,
        )
        .unwrap();
        let end = exact.last().unwrap();
        let overlap = inner(&CVec2::up(), end).norm();
        // high-order adaptive ODE reference
        assert!((overlap - 0.731_741_726_009_122).abs() < 1e-9, "{overlap}");
        assert!((end.norm() - 1.0).abs() < 1e-9);
        assert!(end.max_abs_diff(rk4.last().unwrap()) < 1e-7);
    }

    #[test]
    fn rk4_matches_exact_on_loop2() {
        let d = unit_design();
        let psi = d.psi_plus();
        let a = propagate(&d.loop2, &psi, TAU, EvolutionMethod::Exact).unwrap();
        let b = propagate(&d.loop2, &psi, TAU, EvolutionMethod::Rk4 { steps: 20000 }).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-7);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let d = unit_design();
        let psi = CVec2::up();
        let exact = propagate(&d.loop1, &psi, TAU, EvolutionMethod::Exact).unwrap();
        let err = |n| {
            propagate(&d.loop1, &psi, TAU, EvolutionMethod::Rk4 { steps: n })
                .unwrap()
                .max_abs_diff(&exact)
        };
        let (coarse, fine) = (err(400), err(800));
        assert!(coarse / fine >= 12.0, "{coarse} / {fine}");
    }

    #[test]
    fn rotating_frame_eigenstates() {
        let d = solve_forward(0.6, Branch::Minus, 1.0, 1.0).unwrap();
        let psi = d.psi_plus();
        let h0 = rotating_hamiltonian(&d.loop1).apply(&psi);
        assert!(h0.max_abs_diff(&(psi * (0.5 * d.rabi))) < 1e-12);
        let h0p = rotating_hamiltonian(&d.loop2).apply(&psi);
        assert!(h0p.max_abs_diff(&(psi * (-0.5 * d.rabi_prime))) < 1e-12);
    }

    #[test]
    fn dynamic_integrand_is_constant_on_cyclic_loops() {
        let d = solve_forward(0.8, Branch::Plus, 1.4, 1.0).unwrap();
        let psi = d.psi_plus();
        let t1 = evolve(&d.loop1, &psi, d.period(), EvolutionMethod::Exact, 51).unwrap();
        let t2 = evolve(&d.loop2, &psi, d.period(), EvolutionMethod::Exact, 51).unwrap();
        let e1 = 0.5 * (d.rabi + d.omega() * d.cos_theta);
        let e2 = -0.5 * (d.rabi_prime - d.omega() * d.cos_theta);
        assert!(t1.dynamic_integrand.iter().all(|v| (v - e1).abs() < 1e-9));
        assert!(t2.dynamic_integrand.iter().all(|v| (v - e2).abs() < 1e-9));
    }

    #[test]
    fn bloch_examples() {
        assert_eq!(bloch_vector(&CVec2::up()), [0.0, 0.0, 1.0]);
        let th = 0.7;
        let p = bloch_vector(&CVec2::cyclic_plus(th));
        let m = bloch_vector(&CVec2::cyclic_minus(th));
        let expected = [th.sin(), 0.0, th.cos()];
        for i in 0..3 {
            assert!((p[i] - expected[i]).abs() < 1e-15);
            assert!((m[i] + expected[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn evolve_preconditions() {
        let d = unit_design();
        let psi = d.psi_plus();
        let ex = EvolutionMethod::Exact;
        assert!(evolve(&d.loop1, &psi, 0.0, ex, 11).is_err());
        assert!(evolve(&d.loop1, &psi, -1.0, ex, 11).is_err());
        assert!(evolve(&d.loop1, &psi, 1.0, ex, 1).is_err());
        assert!(evolve(&d.loop1, &(psi * 2.0), 1.0, ex, 11).is_err());
        assert!(evolve(&d.loop1, &psi, 1.0, EvolutionMethod::Rk4 { steps: 99 }, 11).is_err());
        assert!(EvolutionMethod::rk4(50).is_err());
    }

    #[test]
    fn rk4_samples_with_uneven_split() {
        // 1000 steps over 6 intervals: 167 substeps each
        let d = unit_design();
        let psi = CVec2::up();
        let tr = evolve(&d.loop1, &psi, 2.0, EvolutionMethod::Rk4 { steps: 1000 }, 7).unwrap();
        let ex = evolve(&d.loop1, &psi, 2.0, EvolutionMethod::Exact, 7).unwrap();
        assert_eq!(tr.times, ex.times);
        for (a, b) in tr.states.iter().zip(&ex.states) {
            assert!(a.max_abs_diff(b) < 1e-9);
        }
    }

    #[test]
    fn append_shifts_and_dedups() {
        let d = unit_design();
        let psi = d.psi_plus();
        let mut a = evolve(&d.loop1, &psi, TAU, EvolutionMethod::Exact, 5).unwrap();
        let b = evolve(&d.loop2, a.last().unwrap(), TAU, EvolutionMethod::Exact, 5).unwrap();
        a.append(&b);
        assert_eq!(a.len(), 9);
        assert_eq!(a.duration(), 2.0 * TAU);
        assert!(a.times.windows(2).all(|w| w[1] > w[0]));
    }
}
