use std::path::PathBuf;

use couplecrack::greens::{full_field, DefectCharge, FieldState, MaterialParams};
use couplecrack::post::{self, classical_opening, crack_profiles, log_spaced, stress_ahead_many, tip_quantities};
use couplecrack::sie::{self, CrackProblem, Discretization};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{prepare_dir, write_summary, write_table, Table};
use crate::{BaselineArgs, CliError, FieldArgs, Loading, SolveArgs, SweepArgs};

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_nodes(n: usize) -> Result<Discretization, CliError> {
    Ok(Discretization::new(n)?)
}

fn problem(l: &Loading, p: f64) -> Result<CrackProblem, CliError> {
    if !(p > 0.0) {
        return Err(config_err(format!("--p must be positive, got {p}")));
    }
    let ell = if p.is_infinite() { 0.0 } else { l.a / p };
    let mat = MaterialParams::new(l.mu, l.nu, ell)?;
    Ok(CrackProblem::new(l.a, l.sigma0, mat)?)
}

fn sigma0_nonzero(l: &Loading) -> Result<(), CliError> {
    if l.sigma0 == 0.0 {
        return Err(config_err("--sigma0 must be nonzero (outputs are normalized by it)"));
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<Vec<PathBuf>, CliError> {
    let l = &args.loading;
    sigma0_nonzero(l)?;
    let pb = problem(l, args.p)?;
    let disc = check_nodes(l.n)?;
    if args.profile_samples == 0 || args.tip_samples == 0 {
        return Err(config_err("sample counts must be positive"));
    }
    if !(args.tip_min > 0.0 && args.tip_max > args.tip_min && args.tip_max.is_finite()) {
        return Err(config_err(format!(
            "need 0 < --tip-min < --tip-max, got {} and {}",
            args.tip_min, args.tip_max
        )));
    }
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let sol = sie::solve(&pb, &disc)?;
    let (a, mu, s0, ell) = (l.a, l.mu, l.sigma0, pb.material.char_length);
    let norm = mu / s0;

    let mut dens = Table::new(
        "densities",
        &["i", "s", "x", "f", "g", "f_mu_over_sigma0", "g_mu_over_sigma0"],
    );
    for (i, (&s, (&f, &g))) in disc.nodes.iter().zip(sol.f_vals.iter().zip(&sol.g_vals)).enumerate() {
        dens.push(vec![(i + 1) as f64, s, a * s, f, g, f * norm, g * norm]);
    }

    let prof = crack_profiles(&sol, args.profile_samples);
    let mut profiles = Table::new(
        "profiles",
        &[
            "x",
            "x_over_a",
            "delta_uy",
            "delta_uy_mu_over_sigma0_a",
            "delta_omega",
            "delta_omega_mu_over_sigma0",
            "classical_delta_uy",
            "opening_ratio",
        ],
    );
    for (k, &x) in prof.x_samples.iter().enumerate() {
        let (u, w) = (prof.delta_uy[k], prof.delta_omega[k]);
        let c = classical_opening(&pb, x);
        profiles.push(vec![x, x / a, u, u * norm / a, w, w * norm, c, u / c]);
    }

    let bars = log_spaced(args.tip_min * a, args.tip_max * a, args.tip_samples);
    let xs: Vec<f64> = bars.iter().map(|d| a + d).collect();
    let fields = stress_ahead_many(&sol, &xs)?;
    let mut tip = Table::new(
        "near_tip",
        &[
            "x",
            "x_bar",
            "x_bar_over_a",
            "x_bar_over_ell",
            "sigma_yy",
            "sigma_yy_over_sigma0",
            "m_yz",
            "m_yz_over_sigma0_a",
        ],
    );
    for ((&x, &d), &(s, m)) in xs.iter().zip(&bars).zip(&fields) {
        let over_ell = if ell > 0.0 { d / ell } else { f64::INFINITY };
        tip.push(vec![x, d, d / a, over_ell, s, s / s0, m, m / (s0 * a)]);
    }

    let t = tip_quantities(&sol);
    let fmt = args.common.format;
    let mut files = Vec::new();
    for table in [&dens, &profiles, &tip] {
        files.push(write_table(dir, table, "solve", args, fmt)?);
    }
    let summary = json!({
        "f1": t.f1,
        "g1": t.g1,
        "K_I": t.k_i,
        "K_I_ratio": t.k_ratio,
        "J": t.j,
        "J_ratio": t.j_ratio,
        "n": l.n,
        "condition": sol.condition,
        "residual": sol.residual,
        "a_over_ell": pb.p(),
        "ell": ell,
    });
    files.push(write_summary(dir, "summary", "solve", args, summary)?);
    Ok(files)
}

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    let (lo, hi, k) = (args.p_min, args.p_max, args.p_steps);
    if k == 0 {
        return Err(config_err("empty sweep: --p-steps must be at least 1"));
    }
    if !(lo > 0.0) || !hi.is_finite() || hi < lo {
        return Err(config_err(format!("empty sweep range: need 0 < --p-min <= --p-max, got [{lo}, {hi}]")));
    }
    if k > 1 && hi == lo {
        return Err(config_err("empty sweep range: --p-min equals --p-max with several steps"));
    }
    if args.nu_list.is_empty() {
        return Err(config_err("empty sweep: --nu-list has no values"));
    }
    Ok(if args.log_spaced {
        log_spaced(lo, hi, k)
    } else if k == 1 {
        vec![lo]
    } else {
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    })
}

#[derive(Debug, Serialize)]
struct Trend {
    nu: f64,
    k_ratio_decreasing: bool,
    j_ratio_decreasing: bool,
    j_below_classical: bool,
}

pub fn sweep(args: &SweepArgs) -> Result<Vec<PathBuf>, CliError> {
    let ps = sweep_values(args)?;
    let l = &args.loading;
    sigma0_nonzero(l)?;
    let disc = check_nodes(l.n)?;
    let mut jobs = Vec::new();
    for &p in &ps {
        for &nu in &args.nu_list {
            let loading = Loading { nu, ..l.clone() };
            jobs.push((p, nu, problem(&loading, p)?));
        }
    }
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let mut rows = jobs
        .par_iter()
        .map(|&(p, nu, pb)| {
            let sol = sie::solve(&pb, &disc)?;
            Ok((1.0 / p, nu, tip_quantities(&sol), sol.condition))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut table = Table::new(
        "sweep",
        &["ell_over_a", "a_over_ell", "nu", "f1", "g1", "K_I", "K_I_ratio", "J", "J_ratio", "condition"],
    );
    for (la, nu, t, c) in &rows {
        table.push(vec![*la, 1.0 / la, *nu, t.f1, t.g1, t.k_i, t.k_ratio, t.j, t.j_ratio, *c]);
    }
    let trends: Vec<Trend> = args
        .nu_list
        .iter()
        .map(|&nu| {
            let sel: Vec<_> = rows.iter().filter(|r| r.1 == nu).map(|r| r.2).collect();
            Trend {
                nu,
                k_ratio_decreasing: sel.windows(2).all(|w| w[1].k_ratio < w[0].k_ratio),
                j_ratio_decreasing: sel.windows(2).all(|w| w[1].j_ratio < w[0].j_ratio),
                j_below_classical: sel.iter().all(|t| t.j_ratio < 1.0),
            }
        })
        .collect();
    let files = vec![
        write_table(dir, &table, "sweep", args, args.common.format)?,
        write_summary(dir, "sweep_summary", "sweep", args, json!({ "rows": rows.len(), "trends": trends }))?,
    ];
    Ok(files)
}

fn axis(lo: f64, hi: f64, k: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if k == 0 {
        return Err(config_err(format!("empty grid: --n{name} is 0")));
    }
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(config_err(format!("bad {name} range [{lo}, {hi}]")));
    }
    Ok(if k == 1 {
        vec![lo]
    } else {
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    })
}

pub fn field(args: &FieldArgs) -> Result<Vec<PathBuf>, CliError> {
    let xs = axis(args.x_min, args.x_max, args.nx, "x")?;
    let ys = axis(args.y_min, args.y_max, args.ny, "y")?;
    if args.y_min < 0.0 {
        return Err(config_err(format!("grid must lie in y >= 0, got --y-min {}", args.y_min)));
    }
    if !(args.ell > 0.0) {
        return Err(config_err(format!("--ell must be positive, got {}", args.ell)));
    }
    let mat = MaterialParams::new(args.mu, args.nu, args.ell)?;
    let charge = DefectCharge {
        burgers_b: args.b,
        frank_omega: args.omega,
    };
    let pts: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    if let Some((x, y)) = pts.iter().find(|(x, y)| *x == 0.0 && *y == 0.0) {
        return Err(config_err(format!("grid contains the defect core at ({x}, {y})")));
    }
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let states = pts
        .par_iter()
        .map(|&(x, y)| full_field(x, y, charge, mat))
        .collect::<Result<Vec<FieldState>, _>>()?;

    let mut columns = vec!["x", "y", "x_over_ell", "y_over_ell"];
    columns.extend(FieldState::NAMES);
    columns.extend([
        "sxx_over_mu",
        "syy_over_mu",
        "sxy_over_mu",
        "syx_over_mu",
        "mxz_over_mu_ell",
        "myz_over_mu_ell",
    ]);
    let mut table = Table::new("field", &columns);
    let (mu, ell) = (args.mu, args.ell);
    for (&(x, y), f) in pts.iter().zip(&states) {
        let mut row = vec![x, y, x / ell, y / ell];
        row.extend(f.to_array());
        row.extend([f.sxx / mu, f.syy / mu, f.sxy / mu, f.syx / mu, f.mxz / (mu * ell), f.myz / (mu * ell)]);
        table.push(row);
    }
    Ok(vec![write_table(dir, &table, "field", args, args.common.format)?])
}

pub fn baseline(args: &BaselineArgs) -> Result<Vec<PathBuf>, CliError> {
    let l = &args.loading;
    sigma0_nonzero(l)?;
    let pb = problem(l, f64::INFINITY)?;
    check_nodes(l.n)?;
    if args.profile_samples == 0 {
        return Err(config_err("--profile-samples must be positive"));
    }
    let dir = &args.common.out;
    prepare_dir(dir)?;
    let base = post::classical_baseline(&pb, l.n, args.profile_samples)?;
    let norm = l.mu / (l.sigma0 * l.a);
    let mut table = Table::new(
        "baseline",
        &["x", "x_over_a", "cod_closed", "cod_discrete", "cod_closed_mu_over_sigma0_a"],
    );
    for (k, &x) in base.x_samples.iter().enumerate() {
        let c = base.cod_closed[k];
        table.push(vec![x, x / l.a, c, base.cod_discrete[k], c * norm]);
    }
    let rel = |d: f64, c: f64| ((d - c) / c).abs();
    let summary = json!({
        "K_closed": base.k_closed,
        "K_discrete": base.k_discrete,
        "K_rel_error": rel(base.k_discrete, base.k_closed),
        "J_closed": base.j_closed,
        "J_discrete": base.j_discrete,
        "J_rel_error": rel(base.j_discrete, base.j_closed),
        "n": l.n,
    });
    Ok(vec![
        write_table(dir, &table, "baseline", args, args.common.format)?,
        write_summary(dir, "baseline_summary", "baseline", args, summary)?,
    ])
}
