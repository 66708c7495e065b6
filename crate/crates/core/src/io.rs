//! JSON and CSV encodings of designs, trajectories, phase decompositions and gates.
//!
//! Every number is written with 17 significant digits so doubles round-trip
//! exactly. Non-finite values become `null` in JSON.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::design::{validate, Branch, TwoLoopDesign, ValidationReport};
use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::phases::PhaseDecomposition;
use crate::qmath::Unitary2;

/// Header of the trajectory CSV.
pub const TRAJECTORY_HEADER: &str = "t,re0,im0,re1,im1,nx,ny,nz,h_expect";

/// `printf("%.17g")`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-4..17).contains(&exp) {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        let e_sign = if exp < 0 { '-' } else { '+' };
        return if rest.is_empty() {
            format!("{sign}{lead}e{e_sign}{:02}", exp.abs())
        } else {
            format!("{sign}{lead}.{rest}e{e_sign}{:02}", exp.abs())
        };
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        ("0".to_string(), format!("{zeros}{digits}"))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn raw(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        fmt17(x)
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted number is valid JSON")
}

fn ser17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    raw(*x).serialize(s)
}

fn ser17_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => raw(*v).serialize(s),
        None => s.serialize_none(),
    }
}

fn ser17_seq<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    xs.iter().map(|x| raw(*x)).collect::<Vec<_>>().serialize(s)
}

/// Flat JSON form of a [`TwoLoopDesign`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    #[serde(serialize_with = "ser17")]
    pub omega: f64,
    #[serde(serialize_with = "ser17")]
    pub omega1: f64,
    #[serde(serialize_with = "ser17")]
    pub omega1_prime: f64,
    #[serde(serialize_with = "ser17")]
    pub omega0: f64,
    #[serde(serialize_with = "ser17")]
    pub omega0_prime: f64,
    #[serde(serialize_with = "ser17")]
    pub x: f64,
    pub branch: Branch,
    #[serde(serialize_with = "ser17")]
    pub f: f64,
    #[serde(serialize_with = "ser17")]
    pub cos_theta: f64,
    #[serde(serialize_with = "ser17")]
    pub theta: f64,
    #[serde(rename = "Omega", serialize_with = "ser17")]
    pub rabi: f64,
    #[serde(rename = "Omega_prime", serialize_with = "ser17")]
    pub rabi_prime: f64,
    #[serde(serialize_with = "ser17_opt")]
    pub kappa: Option<f64>,
    #[serde(serialize_with = "ser17")]
    pub phi_g_predicted: f64,
}

impl From<&TwoLoopDesign> for DesignRecord {
    fn from(d: &TwoLoopDesign) -> Self {
        Self {
            omega: d.loop1.omega,
            omega1: d.loop1.omega1,
            omega1_prime: d.loop2.omega1,
            omega0: d.loop1.omega0,
            omega0_prime: d.loop2.omega0,
            x: d.x,
            branch: d.branch,
            f: d.f,
            cos_theta: d.cos_theta,
            theta: d.theta,
            rabi: d.rabi,
            rabi_prime: d.rabi_prime,
            kappa: d.kappa,
            phi_g_predicted: d.phi_g_predicted,
        }
    }
}

impl DesignRecord {
    /// Rebuild the design. Field values are taken as written, so a record with
    /// hand-edited fields yields a design that may fail [`validate`].
    pub fn to_design(&self) -> Result<TwoLoopDesign> {
        let mut d = TwoLoopDesign::from_fields(
            self.omega,
            self.omega1,
            self.omega0,
            self.omega1_prime,
            self.omega0_prime,
            self.branch,
        )?;
        d.x = self.x;
        d.f = self.f;
        d.cos_theta = self.cos_theta;
        d.theta = self.theta;
        d.rabi = self.rabi;
        d.rabi_prime = self.rabi_prime;
        d.kappa = self.kappa;
        d.phi_g_predicted = self.phi_g_predicted;
        Ok(d)
    }
}

#[derive(Serialize)]
struct DesignDocument<'a> {
    #[serde(flatten)]
    design: &'a DesignRecord,
    residuals: ResidualMap,
}

struct ResidualMap(Vec<(&'static str, f64)>);

impl Serialize for ResidualMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, &raw(*v))?;
        }
        map.end()
    }
}

impl From<&ValidationReport> for ResidualMap {
    fn from(r: &ValidationReport) -> Self {
        ResidualMap(r.residuals.iter().map(|r| (r.name, r.value)).collect())
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable");
    out.push('\n');
    out
}

/// Flat design object only.
pub fn design_to_json(design: &TwoLoopDesign) -> String {
    to_pretty(&DesignRecord::from(design))
}

/// Design object plus a `residuals` map from [`validate`].
pub fn design_document(design: &TwoLoopDesign) -> String {
    let record = DesignRecord::from(design);
    to_pretty(&DesignDocument {
        design: &record,
        residuals: ResidualMap::from(&validate(design)),
    })
}

/// Parse a design object; unknown keys (such as `residuals`) are ignored.
pub fn design_from_json(text: &str) -> Result<TwoLoopDesign> {
    let record: DesignRecord =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("design JSON: {e}")))?;
    record.to_design()
}

/// One CSV row per sample under [`TRAJECTORY_HEADER`].
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.len() * 200);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..traj.len() {
        let s = &traj.states[i];
        let n = &traj.bloch[i];
        let row = [
            traj.times[i],
            s.a0.re,
            s.a0.im,
            s.a1.re,
            s.a1.im,
            n[0],
            n[1],
            n[2],
            traj.dynamic_integrand[i],
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DecompositionRecord {
    #[serde(serialize_with = "ser17")]
    pub total: f64,
    #[serde(serialize_with = "ser17")]
    pub dynamic: f64,
    #[serde(serialize_with = "ser17")]
    pub geometric: f64,
    #[serde(serialize_with = "ser17")]
    pub cyclicity_defect: f64,
    #[serde(serialize_with = "ser17_seq")]
    pub per_loop_dynamic: [f64; 2],
    #[serde(serialize_with = "ser17")]
    pub phi_g_predicted: f64,
}

impl From<&PhaseDecomposition> for DecompositionRecord {
    fn from(p: &PhaseDecomposition) -> Self {
        Self {
            total: p.total,
            dynamic: p.dynamic,
            geometric: p.geometric,
            cyclicity_defect: p.cyclicity_defect,
            per_loop_dynamic: p.per_loop_dynamic,
            phi_g_predicted: p.phi_g_predicted,
        }
    }
}

pub fn decomposition_to_json(p: &PhaseDecomposition) -> String {
    to_pretty(&DecompositionRecord::from(p))
}

/// Row-major `[[re, im]; 4]` form of a 2x2 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRecord(pub [[f64; 2]; 4]);

impl Serialize for MatrixRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<Box<RawValue>>> = self
            .0
            .iter()
            .map(|[re, im]| vec![raw(*re), raw(*im)])
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        <[[f64; 2]; 4]>::deserialize(d).map(MatrixRecord)
    }
}

impl From<&Unitary2> for MatrixRecord {
    fn from(u: &Unitary2) -> Self {
        let m = u.rows();
        MatrixRecord([
            [m[0][0].re, m[0][0].im],
            [m[0][1].re, m[0][1].im],
            [m[1][0].re, m[1][0].im],
            [m[1][1].re, m[1][1].im],
        ])
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Unitary2 {
        use crate::qmath::C64;
        let e = |k: usize| C64::new(self.0[k][0], self.0[k][1]);
        Unitary2::from_rows([[e(0), e(1)], [e(2), e(3)]])
    }
}

pub fn unitary_to_json(u: &Unitary2) -> String {
    to_pretty(&MatrixRecord::from(u))
}

/// Ideal and simulated gate for one target, with their fidelity.
#[derive(Clone, Debug, Serialize)]
pub struct GateReport {
    #[serde(serialize_with = "ser17")]
    pub phi_g: f64,
    #[serde(serialize_with = "ser17")]
    pub axis_polar: f64,
    #[serde(serialize_with = "ser17")]
    pub axis_azimuth: f64,
    pub method: String,
    pub ideal: MatrixRecord,
    pub simulated: MatrixRecord,
    #[serde(serialize_with = "ser17")]
    pub fidelity: f64,
    #[serde(serialize_with = "ser17_seq")]
    pub eigenphases_ideal: [f64; 2],
    #[serde(serialize_with = "ser17_seq")]
    pub eigenphases_simulated: [f64; 2],
    pub design: DesignRecord,
}

pub fn gate_report_to_json(report: &GateReport) -> String {
    to_pretty(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::solve_forward;
    use crate::evolve::{evolve, EvolutionMethod};
    use std::f64::consts::{PI, TAU};

    #[test]
    fn fmt17_matches_printf() {
        let cases = [
            (1.0, "1"),
            (2.0, "2"),
            (-0.5, "-0.5"),
            (0.1, "0.10000000000000001"),
            (PI, "3.1415926535897931"),
            (-1.8403023690212206, "-1.8403023690212206"),
            (1e-7, "9.9999999999999995e-08"),
            (1.5e20, "1.5e+20"),
            (123456.0, "123456"),
            (0.0, "0"),
            (1e-5, "1.0000000000000001e-05"),
            (0.0001, "0.0001"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt17(x), s, "{x}");
        }
    }

    #[test]
    fn design_json_schema() {
        let d = solve_forward(1.0, Branch::Minus, 1.0, 1.0).unwrap();
        let text = design_to_json(&d);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys = [
            "omega",
            "omega1",
            "omega1_prime",
            "omega0",
            "omega0_prime",
            "x",
            "branch",
            "f",
            "cos_theta",
            "theta",
            "Omega",
            "Omega_prime",
            "kappa",
            "phi_g_predicted",
        ];
        assert_eq!(v.as_object().unwrap().len(), keys.len());
        for k in keys {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["branch"], "minus");
        assert_eq!(v["omega0"], 2.0);
        assert!(text.contains("\"phi_g_predicted\": -1.8403023690212206"));
    }

    #[test]
    fn design_round_trips_bitwise() {
        let d = solve_forward(0.37, Branch::Plus, 1.3, 2.9).unwrap();
        let back = design_from_json(&design_document(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn null_kappa() {
        let d = TwoLoopDesign::from_fields(1.0, 1.0, 0.0, 2.0, 1.0, Branch::Minus).unwrap();
        let text = design_to_json(&d);
        assert!(text.contains("\"kappa\": null"));
        assert_eq!(design_from_json(&text).unwrap().kappa, None);
    }

    #[test]
    fn malformed_design_rejected() {
        assert!(design_from_json("{}").is_err());
        assert!(design_from_json("not json").is_err());
    }

    #[test]
    fn trajectory_csv_layout() {
        let d = solve_forward(1.0, Branch::Minus, 1.0, 1.0).unwrap();
        let tr = evolve(&d.loop1, &d.psi_plus(), TAU, EvolutionMethod::Exact, 5).unwrap();
        let csv = trajectory_csv(&tr);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 9));
        let last_t: f64 = lines[5].split(',').next().unwrap().parse().unwrap();
        assert_eq!(last_t, TAU);
    }

    #[test]
    fn matrix_round_trip() {
        let u =
            crate::gates::ideal_phase_gate(&solve_forward(0.8, Branch::Minus, 1.0, 1.0).unwrap());
        let text = unitary_to_json(&u);
        let rec: MatrixRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(rec.to_matrix(), u);
    }
}
