use std::f64::consts::TAU;

use num_complex::Complex64;
use qlump_core::models::{
    coherence_coefficients, coherence_residual, lumped_tab, magic_times_m, magic_times_s_with, q1_closed_form,
    ring_hamiltonian, PhaseConvention,
};
use qlump_core::witness::{witness_reference, witness_state, kolmogorov_distance, scan_theta_tau, Marginal};
use qlump_core::{check_lumpability, DensityMatrix64, MesostatePartition, Scheme, Stroboscope64};
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{config, CliError, CliResult};
use crate::output::{json, num, Csv};

fn verification(failures: Vec<String>) -> CliResult<()> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("\n")))
    }
}

/// `T̄_A^B` for the parity blocks from the propagated transition matrix.
fn brute_tab(sites: usize, tau: f64, lump_tol: f64) -> CliResult<(f64, bool)> {
    let ring = ring_hamiltonian::<f64>(sites)?;
    let t = ring.stroboscope(tau)?.transition_matrix();
    let report = check_lumpability(&t, ring.parity_partition(), lump_tol)?;
    let lumped = report.lumped.map(|l| l.get(1, 0));
    Ok((lumped.unwrap_or(f64::NAN), report.lumpable))
}

pub fn tab_sweep(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let sites = cfg.model()?.ring_sites()?;
    let grid = cfg.tau_grid()?;
    let mut notes = Vec::new();
    let values: Vec<f64> = if sites == 2 {
        notes.push("N = 2: the parity blocks are single sites; tab is the ideal transition probability T_1^0".into());
        grid.iter().map(|t| (2.0 * t).sin().powi(2)).collect()
    } else {
        grid.par_iter()
            .map(|&t| lumped_tab::<f64>(sites, t))
            .collect::<Result<_, _>>()?
    };
    if verify {
        let tol = cfg.verify_tol()?;
        let lump_tol = cfg.lumpability_tol()?;
        let brute = grid
            .par_iter()
            .map(|&t| brute_tab(sites, t, lump_tol))
            .collect::<CliResult<Vec<_>>>()?;
        let failures = grid
            .iter()
            .zip(&values)
            .zip(&brute)
            .filter(|((_, v), (b, lumpable))| !lumpable || !((*v - *b).abs() <= tol))
            .map(|((t, v), (b, lumpable))| {
                format!("tau={} closed={} brute={} diff={:e} lumpable={lumpable}", num(*t), num(*v), num(*b), (v - b).abs())
            })
            .collect();
        verification(failures)?;
        notes.push(format!("verified against the propagated transition matrix to {tol:e}"));
    }
    let mut csv = Csv::new("tab-sweep", cfg, &notes, &["tau", "N", "tab"]);
    for (t, v) in grid.iter().zip(&values) {
        csv.row(&[num(*t), sites.to_string(), num(*v)]);
    }
    Ok(csv.finish())
}

/// `c_k` for even `k` is real and equals `2N Q_1[B; A]` for a state whose
/// only coherence is `⟨0|ρ|k⟩ = ⟨k|ρ|0⟩ = 1/2`; `c_0 = 2N T̄_A^B`.
fn brute_coefficient(sites: usize, tau: f64, k: usize, lump_tol: f64) -> CliResult<Complex64> {
    let two_n = 2.0 * sites as f64;
    if k == 0 {
        return Ok(Complex64::new(two_n * brute_tab(sites, tau, lump_tol)?.0, 0.0));
    }
    let ring = ring_hamiltonian::<f64>(sites)?;
    let s = ring.stroboscope(tau)?;
    let mut amps = vec![0.0; sites];
    amps[0] = 1.0;
    amps[k] = 1.0;
    let rho = DensityMatrix64::pure_real(&amps)?;
    Ok(Complex64::new(two_n * s.detectable_coherence(&rho, ring.parity_partition(), &[0, 1])?, 0.0))
}

pub fn coherence_sweep(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let sites = cfg.model()?.ring_sites()?;
    let grid = cfg.tau_grid()?;
    let convention = cfg.convention()?;
    let tol = cfg.root_tol()?;
    let rows = grid
        .par_iter()
        .map(|&t| coherence_coefficients::<f64>(sites, t, convention))
        .collect::<Result<Vec<_>, _>>()?;
    let mut notes = vec![format!("root tolerance {tol:e}")];
    for (t, coeffs) in grid.iter().zip(&rows) {
        if coeffs.iter().all(|(_, c)| c.norm() < tol) {
            notes.push(format!("root: tau={}", num(*t)));
        }
    }
    if verify {
        let vtol = cfg.verify_tol()?;
        let lump_tol = cfg.lumpability_tol()?;
        let mut failures = Vec::new();
        for (t, coeffs) in grid.iter().zip(&rows) {
            for (d, c) in coeffs {
                let k = match convention {
                    PhaseConvention::Consistent => *d,
                    PhaseConvention::Doubled => (2 * d) % sites,
                };
                let b = brute_coefficient(sites, *t, k, lump_tol)?;
                if !((c - b).norm() <= vtol) {
                    failures.push(format!(
                        "tau={} d={d} closed={c} brute={b} diff={:e}",
                        num(*t),
                        (c - b).norm()
                    ));
                }
            }
        }
        verification(failures)?;
        notes.push(format!("verified against detectable coherence of two-site superpositions to {vtol:e}"));
    }
    let mut csv = Csv::new("coherence-sweep", cfg, &notes, &["tau", "d", "re", "im", "abs"]);
    for (t, coeffs) in grid.iter().zip(&rows) {
        for (d, c) in coeffs {
            csv.row(&[num(*t), d.to_string(), num(c.re), num(c.im), num(c.norm())]);
        }
    }
    Ok(csv.finish())
}

/// Marginal of epoch `k` by summing `joint_quantum` over every sequence of
/// `n + 1` outcomes.
fn marginal_by_sequences(
    s: &Stroboscope64,
    rho: &DensityMatrix64,
    part: &MesostatePartition,
    n: usize,
    k: usize,
) -> CliResult<Marginal<f64>> {
    let b = part.len();
    let mut probs = vec![0.0; b];
    for index in 0..b.pow(n as u32 + 1) {
        let mut seq = vec![0; n + 1];
        let mut rest = index;
        for slot in seq.iter_mut().rev() {
            *slot = rest % b;
            rest /= b;
        }
        probs[seq[k]] += s.joint_quantum(rho, part, &seq)?;
    }
    Ok(Marginal {
        labels: part.labels(),
        probs,
    })
}

pub fn witness_grid(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let model = cfg.model()?;
    let part = cfg.partition(&model)?;
    let h = model.hamiltonian()?;
    let thetas = cfg.theta_grid()?;
    let taus = cfg.tau_grid()?;
    let n = cfg.n(1);
    if n == 0 {
        return Err(config("n: the witness needs n >= 1"));
    }
    let grid = scan_theta_tau(&h, &part, &thetas, &taus, n)?;
    let mut notes = vec![format!("D1 = D_{n}, D2 = D_{} (distances of the outcome marginals at epochs {} and {n})", n + 1, n - 1)];
    if verify {
        let vtol = cfg.verify_tol()?;
        let sigma = witness_reference(model.dim())?;
        let ring_parity = matches!(model, crate::config::Model::Ring { .. })
            && part == MesostatePartition::parity(model.dim())?;
        let failures: Vec<String> = (0..thetas.len() * taus.len())
            .into_par_iter()
            .map(|i| -> CliResult<Option<String>> {
                let (ti, tj) = (i / taus.len(), i % taus.len());
                let s = Stroboscope64::new(&h, taus[tj])?;
                let rho = witness_state(model.dim(), thetas[ti])?;
                let d = |k: usize| -> CliResult<f64> {
                    let p = marginal_by_sequences(&s, &rho, &part, n, k)?;
                    let q = marginal_by_sequences(&s, &sigma, &part, n, k)?;
                    Ok(kolmogorov_distance(&p, &q)?)
                };
                let (d1, d2) = (d(n - 1)?, d(n)?);
                let mut d2_closed = d2;
                if n == 1 && ring_parity {
                    // both preparations start in A with equal lumped
                    // classical flow, so only the coherence of ρ_θ differs
                    let q1 = q1_closed_form(model.dim(), taus[tj], &rho)?;
                    d2_closed = 2.0 * q1[0][0].abs();
                }
                let cell = grid.get(ti, tj);
                let worst = (cell.d_n - d1).abs().max((cell.d_next - d2).abs()).max((d2_closed - d2).abs());
                Ok((!(worst <= vtol)).then(|| {
                    format!(
                        "theta={} tau={} D1={} D2={} oracle D1={} D2={} closed D2={} diff={worst:e}",
                        num(thetas[ti]),
                        num(taus[tj]),
                        num(cell.d_n),
                        num(cell.d_next),
                        num(d1),
                        num(d2),
                        num(d2_closed)
                    )
                }))
            })
            .collect::<CliResult<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        verification(failures)?;
        notes.push(format!("verified against per-sequence joint probabilities to {vtol:e}"));
    }
    let mut csv = Csv::new("witness-grid", cfg, &notes, &["theta", "tau", "D1", "D2", "delta"]);
    for (i, theta) in thetas.iter().enumerate() {
        for (j, tau) in taus.iter().enumerate() {
            let c = grid.get(i, j);
            csv.row(&[num(*theta), num(*tau), num(c.d_n), num(c.d_next), num(c.delta)]);
        }
    }
    Ok(csv.finish())
}

/// Largest `|p^Q - p^C|` over sequences of up to `n + 1` outcomes.
fn max_coherence(s: &Stroboscope64, rho: &DensityMatrix64, part: &MesostatePartition, n: usize) -> CliResult<Vec<f64>> {
    (1..=n)
        .map(|m| {
            let q = s.distribution(rho, Scheme::Quantum, part, m)?;
            let c = s.distribution(rho, Scheme::Classical, part, m)?;
            Ok(q.probabilities()
                .iter()
                .zip(c.probabilities())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        })
        .collect()
}

pub fn magic(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let sites = cfg.model()?.ring_sites()?;
    let tau_max = cfg.tau_max(TAU)?;
    let convention = cfg.convention()?;
    let tau_m = magic_times_m::<f64>(sites, tau_max)?;
    let tau_s = magic_times_s_with::<f64>(sites, tau_max, convention)?;
    let res_m = tau_m
        .iter()
        .map(|&t| lumped_tab::<f64>(sites, t).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()?;
    let res_s = tau_s
        .iter()
        .map(|&t| coherence_residual::<f64>(sites, t, convention))
        .collect::<Result<Vec<_>, _>>()?;
    if verify {
        let vtol = cfg.verify_tol()?;
        let lump_tol = cfg.lumpability_tol()?;
        let ring = ring_hamiltonian::<f64>(sites)?;
        let uniform = DensityMatrix64::pure_real(&vec![1.0; sites])?;
        let mut failures = Vec::new();
        for &t in &tau_m {
            let (b, lumpable) = brute_tab(sites, t, lump_tol)?;
            if !lumpable || !(b.abs() <= vtol) {
                failures.push(format!("tau_M={} brute tab={}", num(t), num(b)));
            }
        }
        for &t in &tau_s {
            let s = ring.stroboscope(t)?;
            let q = max_coherence(&s, &uniform, ring.parity_partition(), 2)?
                .into_iter()
                .fold(0.0, f64::max);
            if !(q <= vtol) {
                failures.push(format!("tau_S={} max |Q_n| (n <= 2, uniform superposition)={q:e}", num(t)));
            }
        }
        verification(failures)?;
    }
    Ok(json(&json!({
        "N": sites,
        "tau_max": tau_max,
        "tau_M": tau_m,
        "tau_S": tau_s,
        "residuals": { "tau_M": res_m, "tau_S": res_s },
        "config": cfg.to_toml(),
    })))
}

pub fn markov_check(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let model = cfg.model()?;
    let part = cfg.partition(&model)?;
    let tau = cfg.tau()?;
    let n = cfg.n(2);
    if n == 0 {
        return Err(config("n: markov-check needs n >= 1"));
    }
    let rho = cfg.state(model.dim())?;
    let tol = cfg.root_tol()?;
    let s = Stroboscope64::new(&model.hamiltonian()?, tau)?;
    let report = check_lumpability(&s.transition_matrix(), &part, cfg.lumpability_tol()?)?;
    let by_n = max_coherence(&s, &rho, &part, n)?;
    let max_q = by_n.iter().copied().fold(0.0, f64::max);
    if verify {
        let vtol = cfg.verify_tol()?;
        let mut failures = Vec::new();
        for m in 1..=n {
            let q = s.distribution(&rho, Scheme::Quantum, &part, m)?;
            let c = s.distribution(&rho, Scheme::Classical, &part, m)?;
            for (i, (seq, p)) in q.iter().enumerate() {
                let sum = s.detectable_coherence_path_sum(&rho, &part, &seq)?;
                let diff = p - c.probabilities()[i];
                if !((sum.re - diff).abs() <= vtol && sum.im.abs() <= vtol) {
                    failures.push(format!("sequence {:?}: pQ - pC = {} path sum = {sum}", seq.labels(&part), num(diff)));
                }
            }
        }
        verification(failures)?;
    }
    let classification = if !report.lumpable {
        "classical-memory"
    } else if max_q > tol {
        "purely-quantum-memory"
    } else {
        "markov"
    };
    let witness = report.witness.as_ref().map(|w| {
        json!({
            "dest_block": part.label(w.dest_block),
            "source_block": part.label(w.source_block),
            "sources": [w.sources.0, w.sources.1],
            "difference": w.difference,
        })
    });
    let lumped = report.lumped.as_ref().map(|l| {
        (0..part.len())
            .map(|x| (0..part.len()).map(|y| l.get(x, y)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    Ok(json(&json!({
        "tau": tau,
        "n_max": n,
        "labels": part.labels(),
        "lumpable": report.lumpable,
        "max_violation": report.max_violation,
        "witness": witness,
        "lumped": lumped,
        "max_abs_Q": max_q,
        "max_abs_Q_by_n": by_n,
        "tolerance": tol,
        "classification": classification,
        "verdict": format!("{classification} up to n = {n}"),
        "config": cfg.to_toml(),
    })))
}

pub fn sample(cfg: &ExperimentConfig, verify: bool) -> CliResult<String> {
    let model = cfg.model()?;
    let part = cfg.partition(&model)?;
    let scheme = cfg.scheme()?;
    let tau = cfg.tau()?;
    let n = cfg.n(2);
    let m = cfg.trajectories()?;
    let seed = cfg.seed();
    let rho = cfg.state(model.dim())?;
    let s = Stroboscope64::new(&model.hamiltonian()?, tau)?;
    let trajectories = s.sample_trajectories(&rho, scheme, &part, n, m, seed)?;
    let mut notes = Vec::new();
    if verify {
        let exact = s.distribution(&rho, scheme, &part, n)?;
        let b = part.len();
        let mut counts = vec![0usize; exact.probabilities().len()];
        for t in &trajectories {
            counts[t.iter().fold(0, |acc, &x| acc * b + x)] += 1;
        }
        let mut failures = Vec::new();
        for (i, (&c, &p)) in counts.iter().zip(exact.probabilities()).enumerate() {
            let f = c as f64 / m as f64;
            let se = (p * (1.0 - p) / m as f64).sqrt();
            let bad = if se > 0.0 { (f - p).abs() > 5.0 * se } else { c > 0 };
            if bad {
                failures.push(format!(
                    "sequence {:?}: frequency {} exact {} ({c} of {m})",
                    exact.sequence_at(i).labels(&part),
                    num(f),
                    num(p)
                ));
            }
        }
        verification(failures)?;
        notes.push("verified: every sequence frequency within 5 standard errors of the exact distribution".into());
    }
    let mut csv = Csv::new("sample", cfg, &notes, &["trajectory_id", "step", "label"]);
    for (id, t) in trajectories.iter().enumerate() {
        for (step, &x) in t.iter().enumerate() {
            csv.row(&[id.to_string(), step.to_string(), part.label(x).to_string()]);
        }
    }
    Ok(csv.finish())
}
