//! Gate-level view of the two-loop protocol.
//!
//! The cyclic pair `ψ±(θ)` picks up opposite phases `e^{±iφ_g}`, so the
//! protocol realizes a phase gate diagonal in that basis. Tilting the field
//! axis conjugates the gate by the corresponding rotation.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::design::TwoLoopDesign;
use crate::error::{finite, Error, Result};
use crate::evolve::{propagate, propagator_exact, EvolutionMethod};
use crate::qmath::{pauli_exp, CVec2, PauliCoeffs, Unitary2, C64};

/// Unitarity tolerance for [`gate_fidelity`] inputs.
pub const UNITARY_TOL: f64 = 1e-9;

/// Design phase and spec phase must agree this closely in [`tilted_gate`].
pub const PHASE_MATCH_TOL: f64 = 1e-10;

/// Target phase and axis of a (possibly tilted) geometric phase gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateSpec {
    pub phi_g: f64,
    /// Polar angle of the field axis, `[0, π]`.
    pub axis_polar: f64,
    /// Azimuth of the field axis, `[0, 2π)`.
    pub axis_azimuth: f64,
}

impl GateSpec {
    pub fn new(phi_g: f64, axis_polar: f64, axis_azimuth: f64) -> Result<Self> {
        finite("phi_g", phi_g)?;
        finite("axis_polar", axis_polar)?;
        finite("axis_azimuth", axis_azimuth)?;
        if !(phi_g > -TAU && phi_g < 0.0) {
            return Err(Error::OutOfRange {
                name: "phi_g",
                value: phi_g,
                interval: "(-2pi, 0)",
            });
        }
        if !(0.0..=PI).contains(&axis_polar) {
            return Err(Error::OutOfRange {
                name: "axis_polar",
                value: axis_polar,
                interval: "[0, pi]",
            });
        }
        if !(0.0..TAU).contains(&axis_azimuth) {
            return Err(Error::OutOfRange {
                name: "axis_azimuth",
                value: axis_azimuth,
                interval: "[0, 2pi)",
            });
        }
        Ok(Self {
            phi_g,
            axis_polar,
            axis_azimuth,
        })
    }

    /// Gate about the z axis.
    pub fn z_axis(phi_g: f64) -> Result<Self> {
        Self::new(phi_g, 0.0, 0.0)
    }

    /// Rotation taking the z axis to this spec's axis.
    pub fn axis_rotation(&self) -> Unitary2 {
        let az = pauli_exp(
            &PauliCoeffs::new(0.0, 0.0, 0.0, 0.5 * self.axis_azimuth),
            1.0,
        );
        let pol = pauli_exp(&PauliCoeffs::new(0.0, 0.0, 0.5 * self.axis_polar, 0.0), 1.0);
        az * pol
    }
}

/// Basis change `e^{−iθσy/2}` taking spin up to `ψ₊(θ)` and spin down to `ψ₋(θ)`.
pub fn s_operation(theta: f64) -> Result<Unitary2> {
    finite("theta", theta)?;
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            interval: "[0, pi/2]",
        });
    }
    Ok(Unitary2::from_columns(
        CVec2::cyclic_plus(theta),
        CVec2::cyclic_minus(theta),
    ))
}

/// `e^{iφ_g}|ψ₊⟩⟨ψ₊| + e^{−iφ_g}|ψ₋⟩⟨ψ₋|` for the design's θ and φ_g.
pub fn ideal_phase_gate(design: &TwoLoopDesign) -> Unitary2 {
    let s = Unitary2::from_columns(design.psi_plus(), design.psi_minus());
    let phi = design.phi_g_predicted;
    s * Unitary2::diag(C64::from_polar(1.0, phi), C64::from_polar(1.0, -phi)) * s.dagger()
}

/// Propagator of the full two-loop sequence, loop 2 after loop 1.
pub fn simulated_gate(design: &TwoLoopDesign, method: EvolutionMethod) -> Result<Unitary2> {
    let period = design.period();
    match method {
        EvolutionMethod::Exact => {
            Ok(propagator_exact(&design.loop2, period) * propagator_exact(&design.loop1, period))
        }
        EvolutionMethod::Rk4 { .. } => {
            let column = |v: CVec2| -> Result<CVec2> {
                let mid = propagate(&design.loop1, &v, period, method)?;
                propagate(&design.loop2, &mid, period, method)
            };
            Ok(Unitary2::from_columns(
                column(CVec2::up())?,
                column(CVec2::down())?,
            ))
        }
    }
}

fn check_phase_match(spec: &GateSpec, design: &TwoLoopDesign) -> Result<()> {
    if (design.phi_g_predicted - spec.phi_g).abs() > PHASE_MATCH_TOL {
        return Err(Error::PhaseMismatch {
            spec: spec.phi_g,
            design: design.phi_g_predicted,
        });
    }
    Ok(())
}

/// The ideal gate with its field axis tilted to `spec`'s axis, `R·U·R†`.
pub fn tilted_gate(spec: &GateSpec, design: &TwoLoopDesign) -> Result<Unitary2> {
    check_phase_match(spec, design)?;
    Ok(conjugate(&spec.axis_rotation(), &ideal_phase_gate(design)))
}

/// Simulated two-loop gate with every field tilted to `spec`'s axis.
pub fn tilted_simulated_gate(
    spec: &GateSpec,
    design: &TwoLoopDesign,
    method: EvolutionMethod,
) -> Result<Unitary2> {
    check_phase_match(spec, design)?;
    Ok(conjugate(
        &spec.axis_rotation(),
        &simulated_gate(design, method)?,
    ))
}

fn conjugate(r: &Unitary2, u: &Unitary2) -> Unitary2 {
    *r * *u * r.dagger()
}

/// `|Tr(u†v)|/2`; insensitive to global phase.
pub fn gate_fidelity(u: &Unitary2, v: &Unitary2) -> Result<f64> {
    for m in [u, v] {
        let defect = m.unitarity_defect();
        if !(defect <= UNITARY_TOL) {
            return Err(Error::NonUnitary(defect));
        }
    }
    Ok((0.5 * (u.dagger() * *v).trace().norm()).min(1.0))
}

/// Eigenvalue arguments of `u`, sorted ascending, each in `(−π, π]`.
pub fn eigenphases(u: &Unitary2) -> [f64; 2] {
    let ev = u.eigenvalues();
    let mut args = [ev[0].arg(), ev[1].arg()];
    args.sort_by(f64::total_cmp);
    args
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{solve_forward, solve_inverse, Branch};
    use crate::phases::phase_distance;
    use crate::qmath::inner;

    fn unit_design() -> TwoLoopDesign {
        solve_forward(1.0, Branch::Minus, 1.0, 1.0).unwrap()
    }

    #[test]
    fn s_operation_examples() {
        assert!(
            s_operation(0.0)
                .unwrap()
                .max_abs_diff(&Unitary2::identity())
                < 1e-16
        );
        let half = 0.5f64.sqrt();
        let v = s_operation(FRAC_PI_2).unwrap().apply(&CVec2::up());
        assert!(v.max_abs_diff(&CVec2::from_real(half, half)) < 1e-15);
        let th = 0.9;
        let s = s_operation(th).unwrap();
        assert_eq!(s.apply(&CVec2::down()), CVec2::cyclic_minus(th));
        assert_eq!(s.apply(&CVec2::up()), CVec2::cyclic_plus(th));
        // matches the exponential form
        let exp = pauli_exp(&PauliCoeffs::new(0.0, 0.0, 0.5 * th, 0.0), 1.0);
        assert!(s.max_abs_diff(&exp) < 1e-15);
        assert!(s_operation(-0.1).is_err());
        assert!(s_operation(FRAC_PI_2 + 1e-9).is_err());
    }

    #[test]
    fn ideal_gate_acts_diagonally_on_cyclic_pair() {
        let d = unit_design();
        let u = ideal_phase_gate(&d);
        assert!(u.unitarity_defect() < 1e-12);
        let (p, m) = (d.psi_plus(), d.psi_minus());
        let phi = d.phi_g_predicted;
        assert!((inner(&p, &u.apply(&p)) - C64::from_polar(1.0, phi)).norm() < 1e-12);
        assert!((inner(&m, &u.apply(&m)) - C64::from_polar(1.0, -phi)).norm() < 1e-12);
        assert!(inner(&p, &u.apply(&m)).norm() < 1e-12);
        assert!(inner(&m, &u.apply(&p)).norm() < 1e-12);
        let args = eigenphases(&u);
        assert!(args.iter().any(|a| phase_distance(*a, phi).abs() < 1e-12));
        assert!(args.iter().any(|a| phase_distance(*a, -phi).abs() < 1e-12));
    }

    #[test]
    fn ideal_gate_near_zero_phase_is_identity() {
        let d = solve_inverse(-1e-6, 1.0, 1.0).unwrap();
        let u = ideal_phase_gate(&d);
        assert!(u.max_abs_diff(&Unitary2::identity()) < 2e-6);
    }

    #[test]
    fn simulated_matches_ideal() {
        let d = unit_design();
        let sim = simulated_gate(&d, EvolutionMethod::Exact).unwrap();
        let f = gate_fidelity(&sim, &ideal_phase_gate(&d)).unwrap();
        assert!(f > 1.0 - 1e-10, "{f}");

        let d = solve_forward(0.6, Branch::Minus, 1.0, 1.0).unwrap();
        let sim = simulated_gate(&d, EvolutionMethod::Rk4 { steps: 20000 }).unwrap();
        let f = gate_fidelity(&sim, &ideal_phase_gate(&d)).unwrap();
        assert!(f > 1.0 - 1e-6, "{f}");
    }

    #[test]
    fn perturbed_design_loses_fidelity() {
        let good = unit_design();
        let mut bad = good;
        bad.loop2.omega0 += 0.1;
        let sim = simulated_gate(&bad, EvolutionMethod::Exact).unwrap();
        let f = gate_fidelity(&sim, &ideal_phase_gate(&good)).unwrap();
        assert!(f < 1.0 - 1e-4, "{f}");
    }

    #[test]
    fn tilted_gate_examples() {
        let d = solve_inverse(-FRAC_PI_2, 1.0, 1.0).unwrap();
        let z = GateSpec::z_axis(d.phi_g_predicted).unwrap();
        assert_eq!(tilted_gate(&z, &d).unwrap(), ideal_phase_gate(&d));

        let x = GateSpec::new(d.phi_g_predicted, FRAC_PI_2, 0.0).unwrap();
        let gx = tilted_gate(&x, &d).unwrap();
        let gz = tilted_gate(&z, &d).unwrap();
        let (ax, az) = (eigenphases(&gx), eigenphases(&gz));
        assert!((ax[0] - az[0]).abs() < 1e-10 && (ax[1] - az[1]).abs() < 1e-10);
        let comm = gz * gx - gx * gz;
        assert!(comm.frobenius_norm() > 0.1);
    }

    #[test]
    fn tilted_gate_rejects_phase_mismatch() {
        let d = solve_inverse(-FRAC_PI_2, 1.0, 1.0).unwrap();
        let spec = GateSpec::z_axis(-1.0).unwrap();
        assert!(matches!(
            tilted_gate(&spec, &d),
            Err(Error::PhaseMismatch { .. })
        ));
    }

    #[test]
    fn gate_spec_ranges() {
        assert!(GateSpec::new(0.5, 0.0, 0.0).is_err());
        assert!(GateSpec::new(-1.0, -0.1, 0.0).is_err());
        assert!(GateSpec::new(-1.0, 0.0, TAU).is_err());
        assert!(GateSpec::new(-1.0, PI, 0.0).is_ok());
    }

    #[test]
    fn fidelity_examples() {
        let u = simulated_gate(&unit_design(), EvolutionMethod::Exact).unwrap();
        assert!((gate_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let shifted = u.scale(C64::from_polar(1.0, 1.234));
        assert!((gate_fidelity(&u, &shifted).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            gate_fidelity(&Unitary2::identity(), &Unitary2::sigma_x())
                .unwrap()
                .abs()
                < 1e-15
        );
        let not_unitary = Unitary2::identity().scale(C64::new(1.1, 0.0));
        assert!(matches!(
            gate_fidelity(&not_unitary, &u),
            Err(Error::NonUnitary(_))
        ));
    }
}
