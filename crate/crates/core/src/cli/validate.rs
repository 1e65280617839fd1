//! Cross-route oracle suite for `qbm validate`.

use std::f64::consts::PI;

use super::output::{fmt_num, Manifest, Table};
use super::{CliError, Outcome};
use crate::bath::{discretize_bath, noise_correlation, BathGrid, NoiseRoute};
use crate::damping::DampingModel;
use crate::dynamics::{
    equilibrium_moments, factorized_state, symplectic_defect, time_reversal_check, BathPreparation, QuadraticHamiltonian,
};
use crate::imaginary_time::{crossover_temperature, crossover_temperature_ohmic, effective_action_quadrature, CubicPotentialSpec, PathGrid};
use crate::oscillator::{position_variance, second_moments, sqq_ohmic_closed_form, sqq_quadrature, weak_coupling_correction, OscillatorSpec};
use crate::response::{current_noise, Admittance};
use crate::thermo::{ln_partition_function, q2_from_partition};
use crate::units::ThermalParams;
use crate::Result;

struct Check {
    name: &'static str,
    computed: f64,
    reference: f64,
    error: f64,
    tol: f64,
}

impl Check {
    fn rel(name: &'static str, computed: f64, reference: f64, tol: f64) -> Self {
        Self { name, computed, reference, error: ((computed - reference) / reference).abs(), tol }
    }

    fn abs(name: &'static str, computed: f64, reference: f64, tol: f64) -> Self {
        Self { name, computed, reference, error: (computed - reference).abs(), tol }
    }

    fn pass(&self) -> bool {
        self.error <= self.tol
    }
}

fn th(t: f64) -> Result<ThermalParams> {
    ThermalParams::new(t)
}

fn unit() -> Result<OscillatorSpec> {
    OscillatorSpec::new(1.0, 1.0)
}

fn fdt_decomposition() -> Result<Check> {
    let adm = Admittance::resistor(1.0)?;
    let mut worst: f64 = 0.0;
    for t in [0.01, 1.0, 100.0] {
        let th = th(t)?;
        for k in 0..=200 {
            let w = -10.0 + 0.1 * k as f64;
            let n = current_noise(&adm, &th, w);
            if n.total != 0.0 {
                worst = worst.max(((n.total - n.decomposed_total()) / n.total).abs());
            }
        }
    }
    Ok(Check::abs("fdt_decomposition_max_rel", worst, 0.0, 1e-12))
}

fn closed_form_vs_quadrature() -> Result<Check> {
    let spec = unit()?;
    let (g, th) = (0.3, th(0.5)?);
    let damp = DampingModel::ohmic(g)?;
    let s0 = sqq_ohmic_closed_form(&spec, g, &th, 0.0, None)?;
    let mut worst: f64 = 0.0;
    for t in [0.0, 1.0, 3.0, 7.0] {
        let a = sqq_ohmic_closed_form(&spec, g, &th, t, None)?;
        let b = sqq_quadrature(&spec, &damp, &th, t)?;
        worst = worst.max((a - b).abs() / s0);
    }
    Ok(Check::abs("sqq_closed_form_vs_quadrature", worst, 0.0, 1e-6))
}

fn undamped_partition() -> Result<Check> {
    let z = ln_partition_function(&unit()?, &DampingModel::undamped(), &th(1.0)?, None)?.exp();
    Ok(Check::rel("undamped_partition_function", z, 1.0 / (2.0 * 0.5f64.sinh()), 1e-10))
}

fn partition_q2() -> Result<Check> {
    let (spec, damp, th) = (unit()?, DampingModel::drude(0.5, 20.0)?, th(1.0)?);
    Ok(Check::rel("q2_from_partition", q2_from_partition(&spec, &damp, &th)?, position_variance(&spec, &damp, &th, None)?, 1e-6))
}

fn normal_modes_vs_matsubara() -> Result<Check> {
    let spec = unit()?;
    let bath = discretize_bath(&DampingModel::drude(0.5, 20.0)?, 400, BathGrid::Tangent, 1.0)?;
    let h = QuadraticHamiltonian::new(&spec, Some(&bath));
    let th = th(0.5)?;
    let nm = equilibrium_moments(&h, &th)?;
    let mats = second_moments(&spec, &DampingModel::from_bath(bath, 1.0)?, &th, None)?;
    Ok(Check::rel("normal_mode_q2_vs_matsubara", nm.q2, mats.q2, 1e-8))
}

fn crossover() -> Result<Check> {
    let pot = CubicPotentialSpec::new(1.0, 1.0, 1.0)?;
    let g = 0.7;
    let a = crossover_temperature(&pot, &DampingModel::ohmic(g)?, 1.0, 1.0)?;
    Ok(Check::rel("crossover_bisection_vs_closed_form", a, crossover_temperature_ohmic(&pot, g, 1.0, 1.0), 1e-10))
}

fn single_mode_action() -> Result<Check> {
    let th = th(0.8)?;
    let damp = DampingModel::drude(0.5, 6.0)?;
    let (hb, nu) = (th.hbar_beta(), th.matsubara(1));
    let path = PathGrid::from_fn(hb, 64, |t| 0.7 * (nu * t).cos())?;
    let q = effective_action_quadrature(&path, &damp, 1.0, &th)?;
    Ok(Check::rel("single_mode_action_quadrature", q, hb * damp.matsubara_weight(nu) * 0.49 / 4.0, 1e-6))
}

fn noise_routes() -> Result<Check> {
    let damp = DampingModel::drude(0.1, 5.0)?;
    let bath = discretize_bath(&damp, 400, BathGrid::Linear { omega_max: 100.0 }, 1.0)?;
    let th = th(1.0)?;
    let t = 0.5;
    let a = bath.noise_correlation(&th, t);
    let b = noise_correlation(NoiseRoute::KernelIntegral { damping: &damp, system_mass: 1.0, band_limit: Some(100.0) }, &th, t)?;
    Ok(Check::rel("noise_bath_sum_vs_kernel", a, b, 1e-2))
}

fn dynamics_checks() -> Result<[Check; 2]> {
    let spec = unit()?;
    let bath = discretize_bath(&DampingModel::drude(0.3, 5.0)?, 20, BathGrid::Tangent, 1.0)?;
    let h = QuadraticHamiltonian::new(&spec, Some(&bath));
    let defect = symplectic_defect(&h.propagator(10.0)?);
    let st = factorized_state(&h, [1.0, 0.0], [[0.5, 0.0], [0.0, 0.5]], &th(0.3)?, BathPreparation::Shifted);
    let rev = time_reversal_check(&h, &st, 10.0)?;
    Ok([Check::abs("symplectic_defect", defect, 0.0, 1e-10), Check::abs("time_reversal_round_trip", rev.round_trip_error, 0.0, 1e-8)])
}

fn weak_coupling_endpoints() -> Result<[Check; 2]> {
    let spec = unit()?;
    let hot = weak_coupling_correction(&spec, &th(100.0)?)?.delta_q;
    let cold = weak_coupling_correction(&spec, &th(0.001)?)?.delta_q;
    Ok([Check::abs("delta_q_high_T", hot, 0.0, 1e-2), Check::abs("delta_q_low_T", cold, -1.0, 1e-2)])
}

fn crossover_undamped() -> Result<Check> {
    let pot = CubicPotentialSpec::new(1.0, 1.0, 1.0)?;
    Ok(Check::rel("crossover_undamped", crossover_temperature(&pot, &DampingModel::undamped(), 1.0, 1.0)?, 1.0 / (2.0 * PI), 1e-12))
}

pub(super) fn run_suite() -> std::result::Result<Outcome, CliError> {
    let mut checks = vec![
        fdt_decomposition()?,
        closed_form_vs_quadrature()?,
        undamped_partition()?,
        partition_q2()?,
        normal_modes_vs_matsubara()?,
        crossover()?,
        crossover_undamped()?,
        single_mode_action()?,
        noise_routes()?,
    ];
    checks.extend(dynamics_checks()?);
    checks.extend(weak_coupling_endpoints()?);
    let mut table = Table::new(&[("check", ""), ("computed", ""), ("reference", ""), ("error", ""), ("tolerance", ""), ("pass", "")]);
    let mut summary = format!("{:<36} {:>12} {:>10}  result\n", "check", "error", "tol");
    let mut failed = Vec::new();
    for c in &checks {
        let ok = c.pass();
        if !ok {
            failed.push(c.name);
        }
        summary += &format!("{:<36} {:>12.3e} {:>10.1e}  {}\n", c.name, c.error, c.tol, if ok { "pass" } else { "FAIL" });
        table.push_text(vec![
            c.name.to_string(),
            fmt_num(c.computed),
            fmt_num(c.reference),
            fmt_num(c.error),
            fmt_num(c.tol),
            ok.to_string(),
        ]);
    }
    let mut manifest = Manifest::default();
    manifest.result("checks", checks.len());
    manifest.result("failed", &failed);
    for c in &checks {
        manifest.tolerance(c.name, c.tol);
    }
    summary += &format!("{} of {} checks passed", checks.len() - failed.len(), checks.len());
    let failed = (!failed.is_empty()).then(|| failed.join(", "));
    Ok(Outcome { table, manifest, summary, failed })
}
