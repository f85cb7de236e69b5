//! Report assembly and rendering. JSON keys and CSV columns are part of the
//! documented output schema; bump [`SCHEMA_VERSION`] when they change.

use std::fmt::Write as _;

use gramlab::energy::{synthesize_min_energy_control, verify_control};
use gramlab::gramian::{finite_horizon_gramian, infinite_horizon_gramian_lyapunov, FiniteHorizonMethod};
use gramlab::{
    controllability_rank, gramian_determinant, gramian_spectrum, info_entropy_report, make_oscillator,
    oscillator_gramian_closed_form, DMatrix, DVector, OscillatorParams, Result,
};
use serde::Serialize;

use crate::args::HorizonArg;

pub const SCHEMA_VERSION: u32 = 1;

/// Final-state error at or above which a synthesized profile is rejected.
pub const VERIFICATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub zeta: f64,
    pub omega_n: f64,
    pub omega_d: Option<f64>,
    pub m: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<f64>,
}

impl From<&OscillatorParams> for ParamsOut {
    fn from(p: &OscillatorParams) -> Self {
        let phys = p.physical();
        ParamsOut {
            zeta: p.zeta(),
            omega_n: p.omega_n(),
            omega_d: p.omega_d(),
            m: phys.map(|x| x.mass),
            c: phys.map(|x| x.damping),
            k: phys.map(|x| x.stiffness),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOut {
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    /// `null` when the smallest eigenvalue is not positive.
    pub condition: Option<f64>,
    pub uncontrollable_direction: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovCheck {
    pub residual: f64,
    /// Frobenius distance to the closed form, relative to it.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub params: ParamsOut,
    pub regime: &'static str,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub controllability_rank: usize,
    pub horizon: &'static str,
    pub horizon_t: Option<f64>,
    pub method: &'static str,
    pub gramian: Vec<Vec<f64>>,
    pub det_wc: f64,
    pub spectrum: SpectrumOut,
    pub lyapunov_check: Option<LyapunovCheck>,
    pub duality_c: f64,
    pub det_i: f64,
    pub differential_entropy_nats: f64,
    pub kb: f64,
    pub thermodynamic_entropy: f64,
    pub entropy_index: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn analyze(params: &OscillatorParams, horizon: HorizonArg, duality: f64, kb: f64) -> Result<AnalysisReport> {
    let model = make_oscillator(params);
    let (g, lyapunov_check) = match horizon {
        HorizonArg::Finite(t) => (finite_horizon_gramian(&model, t, FiniteHorizonMethod::AugmentedExpm)?, None),
        HorizonArg::Infinite => {
            let g = oscillator_gramian_closed_form(params)?;
            // Cross-check through the general solver where it applies (A Hurwitz).
            let check = infinite_horizon_gramian_lyapunov(&model).ok().map(|l| LyapunovCheck {
                residual: l.residual().unwrap_or(f64::NAN),
                relative_gap: (l.matrix() - g.matrix()).norm() / g.matrix().norm(),
            });
            (g, check)
        }
    };
    let spectrum = gramian_spectrum(&g);
    let info = info_entropy_report(&g, duality, kb)?;
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        params: params.into(),
        regime: params.regime().as_str(),
        a: rows(model.a()),
        b: rows(model.b()),
        controllability_rank: controllability_rank(&model),
        horizon: g.horizon().label(),
        horizon_t: match horizon {
            HorizonArg::Finite(t) => Some(t),
            HorizonArg::Infinite => None,
        },
        method: g.method().label(),
        gramian: rows(g.matrix()),
        det_wc: gramian_determinant(&g),
        spectrum: SpectrumOut {
            eigenvalues: spectrum.eigenvalues.clone(),
            trace: spectrum.trace,
            condition: spectrum.condition.is_finite().then_some(spectrum.condition),
            uncontrollable_direction: spectrum.uncontrollable_direction,
        },
        lyapunov_check,
        duality_c: info.duality_c,
        det_i: info.det_i,
        differential_entropy_nats: info.differential_entropy_nats,
        kb: info.k_b,
        thermodynamic_entropy: info.thermodynamic_entropy,
        entropy_index: info.entropy_index,
    })
}

/// Full round-trip precision, locale independent.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub const CSV_COLUMNS: &[&str] = &[
    "zeta",
    "omega_n",
    "regime",
    "horizon",
    "horizon_t",
    "method",
    "w11",
    "w12",
    "w22",
    "det_wc",
    "lambda_min",
    "lambda_max",
    "condition",
    "det_i",
    "differential_entropy_nats",
    "thermodynamic_entropy",
    "entropy_index",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn csv_row(r: &AnalysisReport) -> String {
    let ev = &r.spectrum.eigenvalues;
    [
        num(r.params.zeta),
        num(r.params.omega_n),
        r.regime.to_string(),
        r.horizon.to_string(),
        opt_num(r.horizon_t),
        r.method.to_string(),
        num(r.gramian[0][0]),
        num(r.gramian[0][1]),
        num(r.gramian[1][1]),
        num(r.det_wc),
        num(ev[0]),
        num(ev[ev.len() - 1]),
        opt_num(r.spectrum.condition),
        num(r.det_i),
        num(r.differential_entropy_nats),
        num(r.thermodynamic_entropy),
        num(r.entropy_index),
    ]
    .join(",")
}

fn fmt_matrix(m: &[Vec<f64>]) -> String {
    let inner: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", inner.join(", "))
}

pub fn text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let p = &r.params;
    let _ = writeln!(s, "zeta                      {}", p.zeta);
    let _ = writeln!(s, "omega_n                   {} rad/s", p.omega_n);
    if let (Some(m), Some(c), Some(k)) = (p.m, p.c, p.k) {
        let _ = writeln!(s, "m, c, k                   {m}, {c}, {k}");
    }
    let _ = writeln!(s, "regime                    {}", r.regime);
    let _ = writeln!(s, "A                         {}", fmt_matrix(&r.a));
    let _ = writeln!(s, "B                         {}", fmt_matrix(&r.b));
    let _ = writeln!(s, "controllability rank      {}", r.controllability_rank);
    match r.horizon_t {
        Some(t) => {
            let _ = writeln!(s, "horizon                   {} (T = {t})", r.horizon);
        }
        None => {
            let _ = writeln!(s, "horizon                   {}", r.horizon);
        }
    }
    let _ = writeln!(s, "method                    {}", r.method);
    let _ = writeln!(s, "gramian                   {}", fmt_matrix(&r.gramian));
    let _ = writeln!(s, "det(W_c)                  {}", r.det_wc);
    let _ = writeln!(s, "eigenvalues               {:?}", r.spectrum.eigenvalues);
    let cond = r.spectrum.condition.map_or("inf".to_string(), |c| c.to_string());
    let _ = writeln!(s, "condition                 {cond}");
    if let Some(l) = &r.lyapunov_check {
        let _ = writeln!(s, "lyapunov residual         {:e} (gap {:e})", l.residual, l.relative_gap);
    }
    let _ = writeln!(s, "det(I), c = {:<13} {}", r.duality_c, r.det_i);
    let _ = writeln!(s, "differential entropy      {} nats", r.differential_entropy_nats);
    let _ = writeln!(s, "thermodynamic entropy     {} (k_B = {})", r.thermodynamic_entropy, r.kb);
    let _ = writeln!(s, "entropy index ln det W_c  {}", r.entropy_index);
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub schema_version: u32,
    pub params: ParamsOut,
    pub regime: &'static str,
    pub horizon_t: f64,
    pub steps: usize,
    pub target: Vec<f64>,
    pub predicted_energy: f64,
    pub measured_energy: f64,
    pub energy_mismatch: f64,
    pub achieved_final_state: Vec<f64>,
    pub final_state_error: f64,
    pub verified: bool,
    pub profile_path: Option<String>,
}

pub struct Synthesis {
    pub report: SynthesisReport,
    pub times: Vec<f64>,
    pub inputs: Vec<f64>,
}

pub fn synthesize(params: &OscillatorParams, t: f64, xf: &[f64], steps: usize) -> Result<Synthesis> {
    let model = make_oscillator(params);
    let target = DVector::from_column_slice(xf);
    let profile = synthesize_min_energy_control(&model, t, &target, steps)?;
    let check = verify_control(&model, &profile)?;
    let report = SynthesisReport {
        schema_version: SCHEMA_VERSION,
        params: params.into(),
        regime: params.regime().as_str(),
        horizon_t: t,
        steps,
        target: xf.to_vec(),
        predicted_energy: profile.predicted_energy,
        measured_energy: check.measured_energy,
        energy_mismatch: check.energy_mismatch,
        achieved_final_state: check.achieved_final_state.iter().copied().collect(),
        final_state_error: check.final_state_error,
        verified: check.final_state_error < VERIFICATION_TOL,
        profile_path: None,
    };
    Ok(Synthesis {
        report,
        inputs: profile.values.iter().map(|u| u[0]).collect(),
        times: profile.times,
    })
}

pub fn profile_csv(times: &[f64], inputs: &[f64]) -> String {
    let mut s = String::from("t,u\n");
    for (t, u) in times.iter().zip(inputs) {
        let _ = writeln!(s, "{},{}", num(*t), num(*u));
    }
    s
}

pub fn synthesis_text(r: &SynthesisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "zeta, omega_n             {}, {}", r.params.zeta, r.params.omega_n);
    let _ = writeln!(s, "regime                    {}", r.regime);
    let _ = writeln!(s, "T, steps                  {}, {}", r.horizon_t, r.steps);
    let _ = writeln!(s, "target                    {:?}", r.target);
    let _ = writeln!(s, "achieved                  {:?}", r.achieved_final_state);
    let _ = writeln!(s, "final state error         {:e}", r.final_state_error);
    let _ = writeln!(s, "predicted energy          {}", r.predicted_energy);
    let _ = writeln!(s, "measured energy           {}", r.measured_energy);
    let _ = writeln!(s, "energy mismatch           {:e}", r.energy_mismatch);
    let _ = writeln!(s, "verified                  {}", r.verified);
    if let Some(p) = &r.profile_path {
        let _ = writeln!(s, "profile                   {p}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.015625, 1.0 / 3.0, -2.772588722239781, 1e-300, 6.02214076e23] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.015625), "1.5625000000000000e-2");
    }

    #[test]
    fn row_matches_header() {
        let p = OscillatorParams::new(0.5, 2.0).unwrap();
        let r = analyze(&p, HorizonArg::Infinite, 1.0, 1.0).unwrap();
        assert_eq!(csv_row(&r).split(',').count(), CSV_COLUMNS.len());
        assert_eq!(r.det_wc, 0.015625);
        assert!(r.lyapunov_check.unwrap().residual < 1e-10);
    }

    #[test]
    fn undamped_infinite_is_marked() {
        let p = OscillatorParams::new(0.0, 2.0).unwrap();
        let r = analyze(&p, HorizonArg::Infinite, 1.0, 1.0).unwrap();
        assert_eq!(r.horizon, "paper_adopted_undamped");
        assert_eq!(r.det_wc, 0.25);
        assert!(r.lyapunov_check.is_none());
    }
}
