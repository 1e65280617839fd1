//! Acceptance run. Prints one line per criterion and exits non-zero if any
//! criterion misses its tolerance or its runtime budget.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use qbm::bath::{discretize_bath, noise_correlation, BathGrid, NoiseRoute};
use qbm::dynamics::{
    equilibrium_moments, factorized_state, relaxation_run, simulated_correlation, symplectic_defect, time_reversal_check,
    two_time_correlation, BathPreparation, QuadraticHamiltonian,
};
use qbm::imaginary_time::{
    crossover_temperature, crossover_temperature_ohmic, effective_action, effective_action_fourier, CubicPotentialSpec,
    PathGrid,
};
use qbm::oscillator::{
    position_variance, second_moments, sqq_ohmic_parts, sqq_quadrature, weak_coupling_correction, OscillatorSpec,
};
use qbm::response::{current_noise, Admittance};
use qbm::thermo::{density_of_states, density_of_states_poles, ln_partition_function, q2_from_partition, DosOptions};
use qbm::{DampingModel, ThermalParams};

type Outcome = Result<(bool, String), String>;

fn th(t: f64) -> ThermalParams {
    ThermalParams::new(t).unwrap()
}

fn unit() -> OscillatorSpec {
    OscillatorSpec::new(1.0, 1.0).unwrap()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Least-squares slope and intercept of ln|y| against ln x.
fn power_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    (slope, my - slope * mx)
}

fn c1_fdt() -> Outcome {
    let rlc = Admittance::new(|w: f64| {
        let z = Complex64::new(0.5, 0.3 * w) + if w == 0.0 { Complex64::new(1e300, 0.0) } else { Complex64::new(0.0, -1.0 / (2.0 * w)) };
        1.0 / z
    });
    let resistor = Admittance::resistor(2.0).map_err(e)?;
    let mut worst: f64 = 0.0;
    let mut limits: f64 = 0.0;
    for adm in [&resistor, &rlc] {
        for t in [0.01, 1.0, 100.0] {
            let th = th(t);
            for w in linspace(-10.0, 10.0, 401) {
                let n = current_noise(adm, &th, w);
                if n.total != 0.0 {
                    worst = worst.max(((n.total - n.decomposed_total()) / n.total).abs());
                }
            }
            let hot = 0.05 * t;
            let re = adm.eval(hot).re;
            limits = limits.max((current_noise(adm, &th, hot).total / (2.0 * t * re) - 1.0).abs());
            let cold = 20.0 * t;
            let re = adm.eval(cold).re;
            limits = limits.max((current_noise(adm, &th, cold).total / (cold * re) - 1.0).abs());
        }
    }
    Ok((worst <= 1e-12 && limits < 0.01, format!("max rel decomposition error {worst:.2e}; worst limit deviation {:.3}%", 100.0 * limits)))
}

fn c2_closed_form_vs_quadrature() -> Outcome {
    use rayon::prelude::*;
    let spec = unit();
    let gammas = linspace(0.05, 1.9, 20);
    let temps = logspace(0.05, 10.0, 20);
    let times = linspace(0.0, 20.0, 20);
    let cells: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| temps.iter().map(move |&t| (g, t))).collect();
    let errs: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(g, t)| {
            let th = th(t);
            let damp = DampingModel::ohmic(g).map_err(e)?;
            let s0 = sqq_ohmic_parts(&spec, g, &th, 0.0, None).map_err(e)?.total();
            let mut worst = (0.0f64, 0.0f64);
            for &time in &times {
                let a = sqq_ohmic_parts(&spec, g, &th, time, None).map_err(e)?.total();
                let b = sqq_quadrature(&spec, &damp, &th, time).map_err(e)?;
                worst.0 = worst.0.max((a - b).abs() / s0.max(a.abs()));
                worst.1 = worst.1.max((a - b).abs() / a.abs());
            }
            Ok(worst)
        })
        .collect::<Result<_, String>>()?;
    let scaled = errs.iter().map(|w| w.0).fold(0.0, f64::max);
    let pointwise = errs.iter().map(|w| w.1).fold(0.0, f64::max);
    Ok((scaled <= 1e-6, format!("8000 points, max |diff|/S(0) {scaled:.2e} (pointwise relative {pointwise:.2e})")))
}

fn c3_zero_temperature_tail() -> Outcome {
    let spec = unit();
    let (g, zero) = (0.2, th(0.0));
    let amp = g / PI;
    let window = logspace(30.0, 100.0, 40);
    let mats: Vec<f64> = window
        .iter()
        .map(|&t| sqq_ohmic_parts(&spec, g, &zero, t, None).map(|p| p.matsubara))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let (p, _) = power_fit(&window, &mats);
    let fitted_amp = mats.iter().zip(&window).map(|(s, t)| s.abs() * t.powi(-2)).sum::<f64>()
        / window.iter().map(|t| t.powi(-4)).sum::<f64>();
    let far = logspace(200.0, 400.0, 40);
    let full: Vec<f64> = far
        .iter()
        .map(|&t| sqq_ohmic_parts(&spec, g, &zero, t, None).map(|p| p.total()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let (pf, _) = power_fit(&far, &full);
    let full_amp = full.iter().zip(&far).map(|(s, t)| s.abs() * t.powi(-2)).sum::<f64>() / far.iter().map(|t| t.powi(-4)).sum::<f64>();
    let negative = mats.iter().chain(&full).all(|s| *s < 0.0);
    let ok = (p + 2.0).abs() <= 0.05
        && ((fitted_amp - amp) / amp).abs() < 0.05
        && (pf + 2.0).abs() <= 0.05
        && ((full_amp - amp) / amp).abs() < 0.05
        && negative;
    Ok((
        ok,
        format!(
            "[30,100] Matsubara part: power {p:.4}, amplitude {fitted_amp:.5} vs {amp:.5}; [200,400] full S_qq: power {pf:.4}, amplitude {full_amp:.5}"
        ),
    ))
}

const C4_GAMMAS: [f64; 3] = [0.1, 0.5, 1.0];
const C4_TEMPS: [f64; 3] = [0.1, 1.0, 10.0];
const C4_CUTOFF: f64 = 100.0;
const C4_N: usize = 2000;

fn c4_bath(g: f64) -> Result<QuadraticHamiltonian, String> {
    let bath = discretize_bath(&DampingModel::drude(g, C4_CUTOFF).map_err(e)?, C4_N, BathGrid::Tangent, 1.0).map_err(e)?;
    Ok(QuadraticHamiltonian::new(&unit(), Some(&bath)))
}

fn c4_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_product = f64::INFINITY;
    for g in C4_GAMMAS {
        let h = c4_bath(g)?;
        let damp = DampingModel::drude(g, C4_CUTOFF).map_err(e)?;
        for t in C4_TEMPS {
            let nm = equilibrium_moments(&h, &th(t)).map_err(e)?;
            let ms = second_moments(&unit(), &damp, &th(t), None).map_err(e)?;
            worst = worst.max(((nm.q2 - ms.q2) / ms.q2).abs()).max(((nm.p2 - ms.p2) / ms.p2).abs());
            min_product = min_product.min(nm.uncertainty_product()).min(ms.uncertainty_product());
        }
    }
    Ok((worst <= 1e-3, format!("N = {C4_N}, max rel difference {worst:.2e} over 9 points (min q2*p2 = {min_product:.4})")))
}

fn c5_heisenberg() -> Outcome {
    let mut min_ratio = f64::INFINITY;
    for g in C4_GAMMAS {
        let damp = DampingModel::drude(g, C4_CUTOFF).map_err(e)?;
        let h = c4_bath(g)?;
        for t in C4_TEMPS {
            for m in [second_moments(&unit(), &damp, &th(t), None).map_err(e)?, equilibrium_moments(&h, &th(t)).map_err(e)?] {
                min_ratio = min_ratio.min(m.uncertainty_product() / 0.25);
            }
        }
    }
    let grid_min = min_ratio;
    let mut runs = 0;
    let times = linspace(0.0, 10.0, 51);
    for (h, label) in [(c7_moderate_system()?, "N=200"), (c4_bath(0.5)?, "N=2000")] {
        for prep in [BathPreparation::Shifted, BathPreparation::Canonical] {
            for (temp, q0) in [(0.1, 1.0), (1.0, 0.0)] {
                let st = factorized_state(&h, [q0, 0.0], [[0.5, 0.0], [0.0, 0.5]], &th(temp), prep);
                let run = relaxation_run(&st, &h, &times).map_err(|err| format!("{label}: {err}"))?;
                for s in &run.samples {
                    let var_q = s.q2 - s.mean_q * s.mean_q;
                    let var_p = s.p2 - s.mean_p * s.mean_p;
                    min_ratio = min_ratio.min(s.det_cov / 0.25).min(var_q * var_p / 0.25);
                }
                runs += 1;
            }
        }
    }
    Ok((
        min_ratio >= 1.0 - 1e-9,
        format!("min q2*p2/(hbar^2/4): grid {grid_min:.4}, over {runs} trajectories and grid {min_ratio:.6}"),
    ))
}

fn c6_weak_coupling() -> Outcome {
    let s = unit();
    let hot = weak_coupling_correction(&s, &th(100.0)).map_err(e)?.delta_q;
    let cold = weak_coupling_correction(&s, &th(0.001)).map_err(e)?.delta_q;
    let g = 1e-3;
    let mut slope_err: f64 = 0.0;
    for t in [0.05, 0.3, 1.0, 3.0] {
        let q0 = position_variance(&s, &DampingModel::undamped(), &th(t), None).map_err(e)?;
        let qg = position_variance(&s, &DampingModel::ohmic(g).map_err(e)?, &th(t), None).map_err(e)?;
        let slope = (qg / q0 - 1.0) * PI / g;
        let dq = weak_coupling_correction(&s, &th(t)).map_err(e)?.delta_q;
        slope_err = slope_err.max(((slope - dq) / dq).abs());
    }
    let curve: Vec<f64> = logspace(0.001, 100.0, 60)
        .iter()
        .map(|&t| weak_coupling_correction(&s, &th(t)).map(|w| w.delta_q))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let monotone = curve.windows(2).all(|w| w[1] > w[0]);
    let ok = hot.abs() < 0.01 && (cold + 1.0).abs() < 0.01 && slope_err < 0.01 && monotone;
    Ok((ok, format!("Delta_q(kT=100) = {hot:.2e}, Delta_q(kT=0.001) = {cold:.6}, slope error {:.3}%, monotone {monotone}", 100.0 * slope_err)))
}

fn c7_moderate_system() -> Result<QuadraticHamiltonian, String> {
    let bath = discretize_bath(&DampingModel::drude(0.5, 5.0).map_err(e)?, 200, BathGrid::Linear { omega_max: 100.0 }, 1.0).map_err(e)?;
    Ok(QuadraticHamiltonian::new(&unit(), Some(&bath)))
}

fn c7_dynamics() -> Outcome {
    let times = linspace(0.0, 10.0, 101);
    let mut sup: f64 = 0.0;
    for g in C4_GAMMAS {
        let h = c4_bath(g)?;
        let damp = DampingModel::drude(g, C4_CUTOFF).map_err(e)?;
        for t in C4_TEMPS {
            let modes = two_time_correlation(&h, &th(t), &times).map_err(e)?;
            for (k, &time) in times.iter().enumerate() {
                let a = sqq_quadrature(&unit(), &damp, &th(t), time).map_err(e)?;
                sup = sup.max((modes[k] - a).abs());
            }
        }
    }
    // dense propagation of the N = 2000 phase space against the normal-mode sum
    let h = c4_bath(0.5)?;
    let sim = simulated_correlation(&h, &th(1.0), &times).map_err(e)?;
    let damp = DampingModel::drude(0.5, C4_CUTOFF).map_err(e)?;
    let mut sim_gap: f64 = 0.0;
    for (k, &time) in times.iter().enumerate() {
        sim_gap = sim_gap.max((sim[k] - sqq_quadrature(&unit(), &damp, &th(1.0), time).map_err(e)?).abs());
    }

    let h = c7_moderate_system()?;
    let s = h.propagator(50.0).map_err(e)?;
    let defect = symplectic_defect(&s);
    let st = factorized_state(&h, [1.0, 0.3], [[0.6, 0.05], [0.05, 0.5]], &th(0.4), BathPreparation::Shifted);
    let rev = time_reversal_check(&h, &st, 50.0).map_err(e)?;

    // ten oscillators on a uniform band: exact revival at 2 pi / spacing
    let small = discretize_bath(&DampingModel::ohmic(0.5).map_err(e)?, 10, BathGrid::Linear { omega_max: 3.0 }, 1.0).map_err(e)?;
    let hs = QuadraticHamiltonian::new(&unit(), Some(&small));
    let t_rec = hs.recurrence_time();
    let long = linspace(0.0, 1.5 * t_rec, 3001);
    let c = two_time_correlation(&hs, &th(0.5), &long).map_err(e)?;
    let c0 = c[0];
    let envelope = |lo: f64, hi: f64| {
        c.iter().zip(&long).filter(|(_, &t)| t >= lo * t_rec && t <= hi * t_rec).map(|(v, _)| v.abs() / c0).fold(0.0, f64::max)
    };
    let decayed = envelope(0.3, 0.6);
    let revival = envelope(0.9, 1.1);

    let ok = sup < 1e-2 && sim_gap < 1e-2 && defect < 1e-10 && rev.round_trip_error < 1e-8 && revival > 0.5 && decayed < 0.5;
    Ok((
        ok,
        format!(
            "sup|S_modes - S_analytic| {sup:.2e} (9 points, N = {C4_N}); dense propagation vs analytic {sim_gap:.1e}; symplectic defect {defect:.1e}; \
             time reversal {:.1e} (unflipped {:.2}); N = 10 revival {:.0}% after decay to {:.0}% (t_rec = {t_rec:.2})",
            rev.round_trip_error,
            rev.unflipped_error,
            100.0 * revival,
            100.0 * decayed
        ),
    ))
}

fn c8_noise() -> Outcome {
    let damp = DampingModel::drude(0.2, 5.0).map_err(e)?;
    let omega_max = 500.0;
    let bath = discretize_bath(&damp, 2000, BathGrid::Linear { omega_max }, 1.0).map_err(e)?;
    let th1 = th(1.0);
    let times = linspace(0.0, 3.0, 31);
    let mut sup_diff: f64 = 0.0;
    let mut sup_s: f64 = 0.0;
    let mut unmatched: f64 = 0.0;
    for &t in &times {
        let a = bath.noise_correlation(&th1, t);
        let b = noise_correlation(NoiseRoute::KernelIntegral { damping: &damp, system_mass: 1.0, band_limit: Some(omega_max) }, &th1, t).map_err(e)?;
        sup_diff = sup_diff.max((a - b).abs());
        sup_s = sup_s.max(b.abs());
        if t > 0.0 {
            let full = noise_correlation(NoiseRoute::KernelIntegral { damping: &damp, system_mass: 1.0, band_limit: None }, &th1, t).map_err(e)?;
            unmatched = unmatched.max((a - full).abs() / sup_s);
        }
    }
    let hot = th(500.0);
    let mut classical: f64 = 0.0;
    for t in [0.01, 0.05, 0.2, 0.6] {
        let s = noise_correlation(NoiseRoute::KernelIntegral { damping: &damp, system_mass: 1.0, band_limit: None }, &hot, t).map_err(e)?;
        let c = 500.0 * damp.kernel(t).map_err(e)?;
        classical = classical.max(((s - c) / c).abs());
        let sb = bath.noise_correlation(&hot, t);
        let cb = 500.0 * bath.damping_kernel(1.0, t);
        classical = classical.max(((sb - cb) / cb).abs());
    }
    let rel = sup_diff / sup_s;
    Ok((
        rel <= 1e-2 && classical < 0.01,
        format!("bath sum vs band-matched kernel integral {rel:.2e} (vs unbounded integral {unmatched:.2e}); classical limit {:.3}%", 100.0 * classical),
    ))
}

fn c9_thermo() -> Outcome {
    let spec = unit();
    let mut z_err: f64 = 0.0;
    for t in [0.1, 0.5, 1.0, 3.0, 20.0] {
        let z = ln_partition_function(&spec, &DampingModel::undamped(), &th(t), None).map_err(e)?.exp();
        let exact = 1.0 / (2.0 * (0.5 / t).sinh());
        z_err = z_err.max(((z - exact) / exact).abs());
    }
    let mut q2_err: f64 = 0.0;
    for (g, wd, t) in [(0.1, 20.0, 0.3), (0.5, 20.0, 1.0), (1.0, 50.0, 2.0)] {
        let d = DampingModel::drude(g, wd).map_err(e)?;
        let a = q2_from_partition(&spec, &d, &th(t)).map_err(e)?;
        let b = position_variance(&spec, &d, &th(t), None).map_err(e)?;
        q2_err = q2_err.max(((a - b) / b).abs());
    }
    let (g, wd) = (0.1, 100.0);
    let d = DampingModel::drude(g, wd).map_err(e)?;
    let energies = linspace(0.05, 6.0, 4000);
    let dos = density_of_states(&spec, &d, 1.0, &energies, DosOptions::default()).map_err(e)?;
    let mut peaks = Vec::new();
    for k in 1..dos.rho.len() - 1 {
        if dos.rho[k] > dos.rho[k - 1] && dos.rho[k] >= dos.rho[k + 1] {
            peaks.push(dos.energies[k]);
        }
    }
    let peak_err = (1..=5)
        .map(|n| peaks.iter().map(|p| (p - n as f64).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let min_rho = dos.rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let plateau_grid: Vec<f64> = (0..400).map(|k| 8.5 + (k as f64 + 0.5) / 400.0).collect();
    let high = density_of_states(&spec, &d, 1.0, &plateau_grid, DosOptions::default()).map_err(e)?;
    let plateau = high.rho.iter().sum::<f64>() / high.rho.len() as f64;
    let check = [1.0, 2.5, 5.0];
    let poles = density_of_states_poles(&spec, &d, 1.0, &check, 400).map_err(e)?;
    let bromwich = density_of_states(&spec, &d, 1.0, &check, DosOptions::default()).map_err(e)?;
    let pole_gap = poles.iter().zip(&bromwich.rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ok = z_err <= 1e-10 && q2_err <= 1e-6 && peaks.len() >= 5 && peak_err <= g && (plateau - 1.0).abs() < 0.05 && min_rho > 0.0;
    Ok((
        ok,
        format!(
            "Z(gamma=0) {z_err:.1e}; q2 from Z {q2_err:.1e}; peaks within {peak_err:.4} of n (tolerance {g}); plateau {plateau:.4}; \
             min rho {min_rho:.3}; epsilon0 {:.5}; Bromwich vs residues {pole_gap:.1e}",
            dos.epsilon0
        ),
    ))
}

fn c10_decay() -> Outcome {
    let pot = CubicPotentialSpec::new(1.0, 1.0, 1.0).map_err(e)?;
    let gammas = linspace(0.0, 4.5, 10);
    let mut route: f64 = 0.0;
    let mut t0s = Vec::new();
    for &g in &gammas {
        let d = DampingModel::ohmic(g).map_err(e)?;
        let a = crossover_temperature(&pot, &d, 1.0, 1.0).map_err(e)?;
        let b = crossover_temperature_ohmic(&pot, g, 1.0, 1.0);
        route = route.max(((a - b) / b).abs());
        t0s.push(a);
    }
    let monotone = t0s.windows(2).all(|w| w[1] < w[0]);
    let undamped_ok = (t0s[0] - 1.0 / (2.0 * PI)).abs() < 1e-12;
    let thermal = th(0.8);
    let (hb, nu) = (thermal.hbar_beta(), thermal.matsubara(1));
    let mut action_err: f64 = 0.0;
    for d in [DampingModel::drude(0.5, 6.0).map_err(e)?, DampingModel::ohmic(0.3).map_err(e)?] {
        let path = PathGrid::from_fn(hb, 64, |t| 0.7 * (nu * t).cos()).map_err(e)?;
        let expect = hb * nu * d.laplace_real(nu) * 0.49 / 4.0;
        let s = effective_action(&path, &d, 1.0, &thermal, Some(1e-6)).map_err(e)?;
        action_err = action_err.max(((s.quadrature.unwrap() - expect) / expect).abs());
        action_err = action_err.max(((s.fourier - expect) / expect).abs());
    }
    let flat = PathGrid::new(hb, vec![0.4; 64]).map_err(e)?;
    let flat_action = effective_action_fourier(&flat, &DampingModel::drude(0.5, 6.0).map_err(e)?, 1.0);
    let ok = route <= 1e-10 && monotone && undamped_ok && action_err <= 1e-6 && flat_action == 0.0;
    Ok((
        ok,
        format!(
            "closed form vs bisection {route:.1e}; T0 monotone over 10 gammas: {monotone}; single-mode action {action_err:.1e}; constant path {flat_action}"
        ),
    ))
}

fn c11_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qbm");
    let dir = tempfile::tempdir().map_err(e)?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = std::process::Command::new(bin).args(["--quiet", "--out"]).arg(&out).arg("validate").status().map_err(e)?;
        if !status.success() {
            return Ok((false, format!("validate exited with {status}")));
        }
        outputs.push((std::fs::read(out.join("validate.csv")).map_err(e)?, std::fs::read(out.join("validate.json")).map_err(e)?));
    }
    let same = outputs[0] == outputs[1];
    Ok((same, format!("two validate runs: CSV and manifest byte-identical = {same} ({} bytes)", outputs[0].0.len())))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, f64, fn() -> Outcome); 11] = [
        (1, "FDT decomposition", 1.0, c1_fdt),
        (2, "closed form vs quadrature", 30.0, c2_closed_form_vs_quadrature),
        (3, "zero-temperature tail", 10.0, c3_zero_temperature_tail),
        (4, "moments vs normal modes", 120.0, c4_moments),
        (5, "Heisenberg bound", 300.0, c5_heisenberg),
        (6, "weak-coupling Delta_q", 1.0, c6_weak_coupling),
        (7, "bath dynamics", 300.0, c7_dynamics),
        (8, "noise statistics", 30.0, c8_noise),
        (9, "thermodynamics and DOS", 180.0, c9_thermo),
        (10, "crossover and effective action", 60.0, c10_decay),
        (11, "CLI determinism", 60.0, c11_determinism),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (n, name, budget, f) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok((ok, detail)) => (ok && secs <= budget, detail),
            Err(err) => (false, format!("error: {err}")),
        };
        if !ok {
            failures += 1;
        }
        println!("criterion {n:>2} {} {name}: {detail} [{secs:.2} s / {budget} s]", if ok { "PASS" } else { "FAIL" });
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
