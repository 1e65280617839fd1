use rayon::prelude::*;

use super::config::{DampingKind, GridKind, SpectrumTarget};
use super::output::{Manifest, Table};
use super::{validate, CliError, Command, Outcome, RunConfig};
use crate::bath::{discretize_bath, noise_correlation, BathGrid, BathSpec, NoiseRoute};
use crate::damping::DampingModel;
use crate::dynamics::{
    factorized_state, relaxation_run, symplectic_defect, time_reversal_check, QuadraticHamiltonian, ENERGY_DIM_CAP,
};
use crate::imaginary_time::{
    crossover_temperature, crossover_temperature_ohmic, effective_action, lambda1_sweep, CubicPotentialSpec, PathGrid,
};
use crate::oscillator::{
    dissipative_response, reduced_density_matrix, second_moments, sqq_ohmic_parts, sqq_quadrature, susceptibility,
    weak_coupling_correction,
};
use crate::response::{current_noise, fdt_spectrum, Admittance};
use crate::thermo::{density_of_states, density_of_states_poles, fit_resonances, ground_state_energy, ln_partition_function, q2_from_partition};

pub(super) fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Spectrum => spectrum(cfg),
        Command::Correlation => correlation(cfg),
        Command::Moments => moments(cfg),
        Command::DensityMatrix => density_matrix(cfg),
        Command::Partition => partition(cfg),
        Command::Dos => dos(cfg),
        Command::Noise => noise(cfg),
        Command::BathExport => bath_export(cfg),
        Command::Simulate => simulate(cfg),
        Command::Decay => decay(cfg),
        Command::Action => action(cfg),
        Command::Validate => validate::run_suite(),
    }
}

fn linspace(name: &str, a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(CliError::Config(format!("{name}: need points >= 2 and a finite range with max > min")));
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

fn outcome(table: Table, manifest: Manifest, summary: String) -> Outcome {
    Outcome { table, manifest, summary, failed: None }
}

fn temperatures(cfg: &RunConfig, list: &[f64]) -> Result<Vec<f64>, CliError> {
    if list.is_empty() {
        Ok(vec![cfg.thermal()?.temperature])
    } else {
        Ok(list.to_vec())
    }
}

fn base_manifest(cfg: &RunConfig) -> Result<Manifest, CliError> {
    let mut m = Manifest::default();
    let th = cfg.thermal()?;
    m.resolve("thermal.T", th.temperature);
    if let Some(c) = cfg.resolved_cutoff()? {
        m.resolve("damping.cutoff", c);
    }
    if let Some(n) = cfg.numeric.n_max {
        m.resolve("numeric.n_max", n);
    } else {
        m.resolve("numeric.n_max", crate::oscillator::DEFAULT_DIRECT_TERMS);
    }
    Ok(m)
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let th = cfg.thermal()?;
    let c = &cfg.spectrum;
    let grid = linspace("spectrum", c.omega_min, c.omega_max, c.points)?;
    let mut m = base_manifest(cfg)?;
    let table = match c.target {
        SpectrumTarget::Oscillator => {
            let (spec, damp) = (cfg.oscillator()?, cfg.damping()?);
            let resp = dissipative_response(&spec, &damp);
            let mut t = Table::new(&[
                ("omega", "omega0"),
                ("chi_re", "1/(M*omega0^2)"),
                ("chi_im", "1/(M*omega0^2)"),
                ("S_qq", "hbar/(M*omega0^2)"),
            ]);
            for &w in &grid {
                let chi = susceptibility(&spec, &damp, w);
                t.push(&[w, chi.re, chi.im, fdt_spectrum(&resp, &th, w)]);
            }
            t
        }
        SpectrumTarget::Resistor => {
            let adm = Admittance::resistor(c.resistance)?;
            let mut t = Table::new(&[
                ("omega", "omega0"),
                ("S_II", "hbar*omega0/R"),
                ("S_vacuum", "hbar*omega0/R"),
                ("S_thermal", "hbar*omega0/R"),
            ]);
            let mut worst: f64 = 0.0;
            for &w in &grid {
                let n = current_noise(&adm, &th, w);
                worst = worst.max((n.total - n.decomposed_total()).abs() / n.total.abs().max(f64::MIN_POSITIVE));
                t.push(&[w, n.total, n.vacuum, n.thermal]);
            }
            m.result("decomposition_max_rel_error", worst);
            t
        }
    };
    let summary = format!("spectrum: {} frequencies", table.rows.len());
    Ok(outcome(table, m, summary))
}

fn correlation(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp, th) = (cfg.oscillator()?, cfg.damping()?, cfg.thermal()?);
    let times = linspace("correlation", 0.0, cfg.correlation.t_max, cfg.correlation.points)?;
    let mut m = base_manifest(cfg)?;
    let closed = matches!(damp, DampingModel::Ohmic { gamma } if gamma > 0.0 && gamma < 2.0 * spec.omega0);
    let table = if closed {
        let gamma = damp.static_friction();
        let parts: Vec<_> = times
            .par_iter()
            .map(|&t| sqq_ohmic_parts(&spec, gamma, &th, t, cfg.numeric.n_max))
            .collect::<Result<_, _>>()?;
        let mut t = Table::new(&[
            ("t", "1/omega0"),
            ("S_qq", "hbar/(M*omega0)"),
            ("resonant", "hbar/(M*omega0)"),
            ("matsubara", "hbar/(M*omega0)"),
        ]);
        for (&time, p) in times.iter().zip(&parts) {
            t.push(&[time, p.total(), p.resonant, p.matsubara]);
        }
        m.resolve("correlation.route", "closed_form");
        t
    } else {
        let values: Vec<f64> =
            times.par_iter().map(|&t| sqq_quadrature(&spec, &damp, &th, t)).collect::<Result<_, _>>()?;
        let mut t = Table::new(&[("t", "1/omega0"), ("S_qq", "hbar/(M*omega0)")]);
        for (&time, v) in times.iter().zip(&values) {
            t.push(&[time, *v]);
        }
        m.resolve("correlation.route", "quadrature");
        t
    };
    Ok(outcome(table, m, format!("correlation: {} times", times.len())))
}

fn moments(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp) = (cfg.oscillator()?, cfg.damping()?);
    let temps = temperatures(cfg, &cfg.moments.temperatures)?;
    let thermals = temps.iter().map(|&t| cfg.thermal_at(t)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<[f64; 5]> = thermals
        .par_iter()
        .map(|th| {
            let s = second_moments(&spec, &damp, th, cfg.numeric.n_max)?;
            let dq = weak_coupling_correction(&spec, th)?.delta_q;
            Ok([th.temperature, s.q2, s.p2, s.uncertainty_product(), dq])
        })
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[
        ("T", "hbar*omega0/k"),
        ("q2", "hbar/(M*omega0)"),
        ("p2", "hbar*M*omega0"),
        ("q2_p2", "hbar^2"),
        ("delta_q", ""),
    ]);
    let mut m = base_manifest(cfg)?;
    let hbar = cfg.thermal.hbar;
    let worst = rows.iter().map(|r| r[3] / (0.25 * hbar * hbar)).fold(f64::INFINITY, f64::min);
    m.result("min_uncertainty_ratio", worst);
    if let [r] = rows.as_slice() {
        m.result("q2", r[1]);
        m.result("p2", r[2]);
    }
    rows.iter().for_each(|r| t.push(r));
    let summary = match rows.as_slice() {
        [r] => format!("q2 = {}, p2 = {}", r[1], r[2]),
        _ => format!("moments: {} temperatures", rows.len()),
    };
    Ok(outcome(t, m, summary))
}

fn density_matrix(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp, th) = (cfg.oscillator()?, cfg.damping()?, cfg.thermal()?);
    let s = second_moments(&spec, &damp, &th, cfg.numeric.n_max)?;
    let c = &cfg.density_matrix;
    let half = c.extent * s.q2.sqrt();
    let grid = linspace("density_matrix", -half, half, c.points)?;
    let mut t = Table::new(&[("q", "sqrt(hbar/(M*omega0))"), ("q_prime", "sqrt(hbar/(M*omega0))"), ("rho", "sqrt(M*omega0/hbar)")]);
    for &q in &grid {
        for &qp in &grid {
            t.push(&[q, qp, reduced_density_matrix(&s, th.hbar, q, qp)]);
        }
    }
    let mut m = base_manifest(cfg)?;
    m.result("q2", s.q2);
    m.result("p2", s.p2);
    Ok(outcome(t, m, format!("density matrix on a {0}x{0} grid", grid.len())))
}

fn partition(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp) = (cfg.oscillator()?, cfg.damping()?);
    let temps = temperatures(cfg, &cfg.partition.temperatures)?;
    let thermals = temps.iter().map(|&t| cfg.thermal_at(t)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<[f64; 4]> = thermals
        .par_iter()
        .map(|th| {
            let ln_z = ln_partition_function(&spec, &damp, th, cfg.numeric.n_max)?;
            Ok([th.temperature, ln_z, ln_z.exp(), q2_from_partition(&spec, &damp, th)?])
        })
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[("T", "hbar*omega0/k"), ("ln_Z", ""), ("Z", ""), ("q2_from_partition", "hbar/(M*omega0)")]);
    rows.iter().for_each(|r| t.push(r));
    let mut m = base_manifest(cfg)?;
    m.tolerance("q2_fd_step", crate::thermo::Q2_FD_STEP);
    let eps0 = ground_state_energy(&spec, &damp, cfg.thermal.hbar)?;
    m.result("epsilon0", eps0);
    Ok(outcome(t, m, format!("partition: {} temperatures, epsilon0 = {eps0}", rows.len())))
}

fn dos(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp) = (cfg.oscillator()?, cfg.damping()?);
    let c = &cfg.dos;
    let hbar = cfg.thermal.hbar;
    let unit = hbar * spec.omega0;
    let energies: Vec<f64> = linspace("dos", c.e_min, c.e_max, c.points)?.into_iter().map(|e| e * unit).collect();
    let d = density_of_states(&spec, &damp, hbar, &energies, c.options())?;
    let poles = (c.poles_per_root > 0)
        .then(|| density_of_states_poles(&spec, &damp, hbar, &energies, c.poles_per_root))
        .transpose()?;
    let mut cols = vec![("E_minus_eps0", "hbar*omega0"), ("rho", "1/(hbar*omega0)")];
    if poles.is_some() {
        cols.push(("rho_poles", "1/(hbar*omega0)"));
    }
    let mut t = Table::new(&cols);
    for (k, (&e, &r)) in d.energies.iter().zip(&d.rho).enumerate() {
        match &poles {
            Some(p) => t.push(&[e / unit, r * unit, p[k] * unit]),
            None => t.push(&[e / unit, r * unit]),
        }
    }
    let mut m = base_manifest(cfg)?;
    m.tolerance("dos.tol", c.tol);
    m.result("epsilon0", d.epsilon0);
    m.result("delta_weight", d.delta_weight);
    m.result("contour", d.contour);
    m.result("y_max", d.y_max);
    m.result("shift_discrepancy", d.shift_discrepancy);
    if c.resonances > 0 {
        match fit_resonances(&d, unit, c.resonances) {
            Ok(r) => m.result("resonances", r),
            Err(e) => m.warnings.push(format!("resonance fit: {e}")),
        }
    }
    let summary = format!("dos: {} energies, epsilon0 = {}", energies.len(), d.epsilon0);
    Ok(outcome(t, m, summary))
}

/// Explicit bath for bath-based commands, and the band limit of its grid.
fn explicit_bath(cfg: &RunConfig, damp: &DampingModel, n: usize, m: &mut Manifest) -> Result<(BathSpec, Option<f64>), CliError> {
    if let DampingModel::FromBath { bath, .. } = damp {
        return Ok((bath.clone(), None));
    }
    if cfg.damping.kind != DampingKind::Drude && cfg.numeric.grid == GridKind::Linear && cfg.numeric.omega_max.is_none() {
        return Err(CliError::Config("ohmic friction needs numeric.omega_max to build a bath".into()));
    }
    let grid = cfg.bath_grid()?;
    m.resolve("bath.grid", grid);
    let band = match grid {
        BathGrid::Linear { omega_max } => Some(omega_max),
        BathGrid::Tangent => None,
    };
    Ok((discretize_bath(damp, n, grid, cfg.system.mass)?, band))
}

fn noise(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (damp, th) = (cfg.damping()?, cfg.thermal()?);
    let mass = cfg.system.mass;
    let mut m = base_manifest(cfg)?;
    let (bath, band) = explicit_bath(cfg, &damp, cfg.numeric.n_bath, &mut m)?;
    let times = linspace("noise", 0.0, cfg.noise.t_max, cfg.noise.points)?;
    let continuum = !matches!(damp, DampingModel::FromBath { .. });
    let kernel: Option<Vec<f64>> = continuum
        .then(|| {
            times
                .par_iter()
                .map(|&t| noise_correlation(NoiseRoute::KernelIntegral { damping: &damp, system_mass: mass, band_limit: band }, &th, t))
                .collect::<crate::Result<Vec<f64>>>()
        })
        .transpose()?;
    let mut cols = vec![("t", "1/omega0"), ("bath_sum", "hbar*M*omega0^3")];
    if kernel.is_some() {
        cols.push(("kernel_integral", "hbar*M*omega0^3"));
    }
    cols.push(("classical", "hbar*M*omega0^3"));
    let mut t = Table::new(&cols);
    let s0 = bath.noise_correlation(&th, 0.0).abs();
    let mut worst: f64 = 0.0;
    for (k, &time) in times.iter().enumerate() {
        let b = bath.noise_correlation(&th, time);
        let classical = mass * th.kt() * bath.damping_kernel(mass, time);
        match &kernel {
            Some(kv) => {
                worst = worst.max((b - kv[k]).abs() / s0);
                t.push(&[time, b, kv[k], classical]);
            }
            None => t.push(&[time, b, classical]),
        }
    }
    if kernel.is_some() {
        m.result("max_route_difference_over_S0", worst);
        m.resolve("noise.band_limit", band);
    }
    m.result("n_bath", bath.len());
    Ok(outcome(t, m, format!("noise: {} times, N = {}", times.len(), bath.len())))
}

fn bath_export(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let damp = cfg.damping()?;
    let mut m = base_manifest(cfg)?;
    let (bath, _) = explicit_bath(cfg, &damp, cfg.numeric.n_bath, &mut m)?;
    let mut t = Table::new(&[("index", ""), ("mass", "M"), ("frequency", "omega0"), ("coupling", "M*omega0^2"), ("strength", "omega0")]);
    for (i, o) in bath.oscillators().iter().enumerate() {
        t.push(&[i as f64, o.mass, o.frequency, o.coupling, o.strength()]);
    }
    let total: f64 = bath.oscillators().iter().map(|o| o.strength()).sum::<f64>() / cfg.system.mass;
    m.result("n_bath", bath.len());
    m.result("gamma_t0_reconstructed", total);
    m.result("renormalization", bath.renormalization());
    m.result("recurrence_time", bath.recurrence_time());
    Ok(outcome(t, m, format!("bath: {} oscillators", bath.len())))
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, damp, th) = (cfg.oscillator()?, cfg.damping()?, cfg.thermal()?);
    let c = &cfg.simulate;
    let mut m = base_manifest(cfg)?;
    let (bath, _) = explicit_bath(cfg, &damp, c.n_bath, &mut m)?;
    let h = QuadraticHamiltonian::new(&spec, Some(&bath));
    let hbar = th.hbar;
    let q_var = c.q_var.unwrap_or(hbar / (2.0 * spec.mass * spec.omega0));
    let p_var = c.p_var.unwrap_or(0.5 * hbar * spec.mass * spec.omega0);
    m.resolve("simulate.q_var", q_var);
    m.resolve("simulate.p_var", p_var);
    if q_var * p_var < 0.25 * hbar * hbar * (1.0 - 1e-12) {
        return Err(CliError::Config(format!("initial state violates the uncertainty relation: q_var*p_var = {}", q_var * p_var)));
    }
    let initial = factorized_state(&h, [c.q_mean, c.p_mean], [[q_var, 0.0], [0.0, p_var]], &th, c.preparation);
    let times = linspace("simulate", 0.0, c.t_max, c.points)?;
    let run = relaxation_run(&initial, &h, &times)?;
    let mut t = Table::new(&[
        ("t", "1/omega0"),
        ("mean_q", "sqrt(hbar/(M*omega0))"),
        ("mean_p", "sqrt(hbar*M*omega0)"),
        ("q2", "hbar/(M*omega0)"),
        ("p2", "hbar*M*omega0"),
        ("det_cov", "hbar^2"),
        ("energy", "hbar*omega0"),
        ("q_noise", "hbar*omega0"),
    ]);
    for s in &run.samples {
        t.push(&[s.t, s.mean_q, s.mean_p, s.q2, s.p2, s.det_cov, s.energy, s.q_noise]);
    }
    let min_det = run.samples.iter().map(|s| s.det_cov).fold(f64::INFINITY, f64::min);
    m.result("min_det_cov_over_hbar2_4", min_det / (0.25 * hbar * hbar));
    m.result("recurrence_time", run.recurrence_time);
    if h.dim() <= ENERGY_DIM_CAP {
        m.result("symplectic_defect", symplectic_defect(&h.propagator(c.t_max)?));
        m.result("time_reversal", time_reversal_check(&h, &initial, c.t_max)?);
    }
    m.warnings.extend(run.warning.clone());
    Ok(outcome(t, m, format!("simulate: N = {}, {} samples", bath.len(), times.len())))
}

fn decay(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let damp = cfg.damping()?;
    let s = &cfg.system;
    let pot = CubicPotentialSpec::new(s.mass, s.omega0, s.q0)?;
    let (hbar, kb) = (cfg.thermal.hbar, cfg.thermal.kb);
    let t0 = crossover_temperature(&pot, &damp, hbar, kb)?;
    let mut m = base_manifest(cfg)?;
    let lo = cfg.decay.t_min.unwrap_or(0.25 * t0);
    let hi = cfg.decay.t_max.unwrap_or(4.0 * t0);
    m.resolve("decay.t_min", lo);
    m.resolve("decay.t_max", hi);
    let temps = linspace("decay", lo, hi, cfg.decay.points)?;
    let mut t = Table::new(&[("T", "hbar*omega0/k"), ("lambda1", "omega0^2")]);
    for (temp, l) in lambda1_sweep(&pot, &damp, hbar, kb, &temps) {
        t.push(&[temp, l]);
    }
    m.result("T0", t0);
    if let DampingModel::Ohmic { gamma } = damp {
        m.result("T0_closed_form", crossover_temperature_ohmic(&pot, gamma, hbar, kb));
    }
    m.result("landmarks", pot.landmarks());
    Ok(outcome(t, m, format!("T0 = {t0}")))
}

fn action(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (damp, th) = (cfg.damping()?, cfg.thermal()?);
    th.require_finite("effective action")?;
    let hb = th.hbar_beta();
    let mass = cfg.system.mass;
    let c = &cfg.action;
    let mut m = base_manifest(cfg)?;
    let path = match &c.path_file {
        Some(p) => PathGrid::new(hb, super::config::read_path_samples(p)?)?,
        None => {
            let nu = th.matsubara(c.mode as u64);
            let a = c.amplitude;
            m.resolve("numeric.J", cfg.numeric.path_samples);
            let path = PathGrid::from_fn(hb, cfg.numeric.path_samples, |tau| a * (nu * tau).cos())?;
            if c.mode >= 1 && 2 * (c.mode as usize) < cfg.numeric.path_samples {
                m.result("single_mode_identity", mass * hb * damp.matsubara_weight(nu) * a * a / 4.0);
            }
            path
        }
    };
    m.tolerance("numeric.route_tol", cfg.numeric.route_tol);
    let s = effective_action(&path, &damp, mass, &th, Some(cfg.numeric.route_tol))?;
    let q = s.quadrature.unwrap_or(f64::NAN);
    let mut t = Table::new(&[("J", ""), ("S_fourier", "hbar"), ("S_quadrature", "hbar")]);
    t.push(&[path.len() as f64, s.fourier / th.hbar, q / th.hbar]);
    m.result("S_eff", s.fourier);
    Ok(outcome(t, m, format!("S_eff = {} (quadrature {q})", s.fourier)))
}
