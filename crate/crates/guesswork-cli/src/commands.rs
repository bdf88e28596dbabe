//! Subcommand implementations.

use std::path::Path;

use serde_json::json;

use guesswork_core::asymptotic::{
    rate_multi, rate_single_with_points, scgf_multi, LogBase, RenyiCurve, Scgf,
    DEFAULT_RATE_POINTS,
};
use guesswork_core::exact::{order_stat_pmf, single_guesswork_pmf, strategy_pmf_exhaustive_with_cap};
use guesswork_core::monte_carlo::{estimate_distribution, SimulationConfig, StrategySelector};
use guesswork_core::sources::CharacterSource;
use guesswork_core::strategy::{optimal_single_strategy, MultiUserStrategy};

use crate::config::{caps_from_env, ProblemConfig, StrategyChoice};
use crate::error::CliError;
use crate::figures;
use crate::output::{csv, fmt_f64, write_file};
use crate::verify;

fn renyi_curve(source: &CharacterSource) -> Result<RenyiCurve, CliError> {
    Ok(match source {
        CharacterSource::Iid(s) => RenyiCurve::iid(s),
        CharacterSource::Markov(s) => RenyiCurve::markov(s)?,
    })
}

/// Orders at which the Renyi curve is tabulated: 0.05 .. 4.00 plus inf.
fn beta_grid() -> Vec<f64> {
    (1..=80).map(|i| i as f64 * 0.05).collect()
}

/// Orders at which the sCGF is tabulated: -2.00 .. 4.00.
fn alpha_grid() -> Vec<f64> {
    (-200..=400).map(|i| i as f64 * 0.01).collect()
}

pub fn analyze(
    config_path: &Path,
    out: &Path,
    grid_flag: Option<usize>,
    base: LogBase,
) -> Result<(), CliError> {
    let config = ProblemConfig::load(config_path)?;
    let sources = config.build_sources()?;
    let v = sources.len();
    let u = config.u;
    let points = grid_flag
        .or(config.grid)
        .unwrap_or(DEFAULT_RATE_POINTS);

    let curves: Vec<RenyiCurve> = sources
        .iter()
        .map(renyi_curve)
        .collect::<Result<_, _>>()?;
    let scgfs: Vec<Scgf> = curves.iter().cloned().map(Scgf::new).collect();

    // Renyi table.
    let mut renyi_rows = Vec::new();
    for beta in beta_grid() {
        let mut row = vec![fmt_f64(beta)];
        for curve in &curves {
            row.push(fmt_f64(base.from_nats(curve.value(beta)?)));
        }
        renyi_rows.push(row);
    }
    let mut inf_row = vec!["inf".to_string()];
    for curve in &curves {
        inf_row.push(fmt_f64(base.from_nats(curve.min_entropy())));
    }
    renyi_rows.push(inf_row);
    let renyi_header = std::iter::once("beta".to_string())
        .chain((1..=v).map(|i| format!("R_{i}")))
        .collect::<Vec<_>>()
        .join(",");
    write_file(out, "renyi.csv", &csv(&renyi_header, renyi_rows))?;

    // sCGF table.
    let mut scgf_rows = Vec::new();
    for alpha in alpha_grid() {
        let mut row = vec![fmt_f64(alpha)];
        for scgf in &scgfs {
            row.push(fmt_f64(base.from_nats(scgf.value(alpha)?)));
        }
        scgf_rows.push(row);
    }
    let scgf_header = std::iter::once("alpha".to_string())
        .chain((1..=v).map(|i| format!("Lambda_{i}")))
        .collect::<Vec<_>>()
        .join(",");
    write_file(out, "scgf.csv", &csv(&scgf_header, scgf_rows))?;

    // Rate curves, single and composed.
    let singles: Vec<_> = scgfs
        .iter()
        .map(|s| rate_single_with_points(s, points).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let multi = rate_multi(&singles, u)?;
    let mut rate_rows = Vec::new();
    for i in 0..points {
        let mut row = vec![fmt_f64(base.from_nats(singles[0].x_at(i)))];
        for s in &singles {
            row.push(fmt_f64(base.from_nats(s.values()[i])));
        }
        row.push(fmt_f64(base.from_nats(multi.curve.values()[i])));
        rate_rows.push(row);
    }
    let rate_header = std::iter::once("x".to_string())
        .chain((1..=v).map(|i| format!("rate_{i}")))
        .chain(std::iter::once("rate_multi".to_string()))
        .collect::<Vec<_>>()
        .join(",");
    write_file(out, "rate.csv", &csv(&rate_header, rate_rows))?;

    // Report.
    let report = multi.convexity_report();
    let homogeneous = config.is_homogeneous();
    let mut doc = json!({
        "users": v,
        "target_count": u,
        "string_length": config.k,
        "log_base": match base { LogBase::Bits => "bits", LogBase::Nats => "nats" },
        "grid_points": points,
        "shannon": curves.iter().map(|c| base.from_nats(c.shannon())).collect::<Vec<_>>(),
        "min_entropy": curves.iter().map(|c| base.from_nats(c.min_entropy())).collect::<Vec<_>>(),
        "homogeneous": homogeneous,
        "moment_growth_rate_alpha1": base.from_nats(scgf_multi(&multi.curve, 1.0)),
        "convexity": {
            "convex": report.convex,
            "witness_x": report.witness.as_ref().map(|w| w.xs.iter().map(|x| base.from_nats(*x)).collect::<Vec<_>>()),
            "identified_set_switches": report.switches.iter().map(|s| json!({
                "x": base.from_nats(s.x),
                "before": s.before,
                "after": s.after,
            })).collect::<Vec<_>>(),
        },
    });
    if homogeneous {
        let exponent_bits =
            LogBase::Bits.from_nats(guesswork_core::asymptotic::avg_growth_exponent(
                &curves[0], u, v,
            )?);
        let key_length = config.key_length.unwrap_or(config.k);
        let log2_guesses = key_length as f64 * exponent_bits;
        doc["avg_growth_exponent_bits"] = json!(exponent_bits);
        doc["key_length"] = json!(key_length);
        doc["approx_avg_guesswork_log2"] = json!(log2_guesses);
        doc["approx_avg_guesswork"] = json!(fmt_f64(log2_guesses.exp2()));
    }
    write_file(
        out,
        "report.json",
        &format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes")),
    )?;
    Ok(())
}

pub fn exact(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let config = ProblemConfig::load(config_path)?;
    let problem = config.problem()?;
    let caps = caps_from_env()?;

    let dists: Vec<_> = problem
        .sources()
        .iter()
        .map(|s| {
            s.enumerate_distribution_with_cap(problem.k(), caps.enumeration)
                .map_err(CliError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let per_user: Vec<_> = dists.iter().map(single_guesswork_pmf).collect();
    for (i, pmf) in per_user.iter().enumerate() {
        write_file(out, &format!("guesswork_user{}.csv", i + 1), &pmf.to_csv())?;
    }
    let bound = order_stat_pmf(&per_user, problem.u())?;
    write_file(out, "guesswork_gopt.csv", &bound.to_csv())?;

    if config.strategy == Some(StrategyChoice::RoundRobin) {
        let singles: Vec<_> = dists.iter().map(optimal_single_strategy).collect();
        let rr = MultiUserStrategy::round_robin(singles)?;
        let pmf = strategy_pmf_exhaustive_with_cap(&rr, &dists, problem.u(), caps.joint)?;
        write_file(out, "guesswork_round_robin.csv", &pmf.to_csv())?;
    }
    Ok(())
}

pub fn simulate(config_path: &Path, out: &Path, seed_flag: Option<u64>) -> Result<(), CliError> {
    let config = ProblemConfig::load(config_path)?;
    let problem = config.problem()?;
    let caps = caps_from_env()?;
    let seed = seed_flag.or(config.seed).ok_or_else(|| {
        CliError::Config("simulate needs a seed (config \"seed\" or --seed)".into())
    })?;
    let selector = match config.strategy.unwrap_or(StrategyChoice::GOpt) {
        StrategyChoice::RoundRobin => StrategySelector::RoundRobin,
        StrategyChoice::GOpt => StrategySelector::GOptBound,
    };
    let mut sim = SimulationConfig::new(
        problem,
        selector,
        config.trials.unwrap_or(100_000),
        seed,
    );
    if let Some(alphas) = &config.alphas {
        sim.alphas = alphas.clone();
    }
    if let Some(bins) = config.bins {
        sim.bins = bins;
    }
    sim.enumeration_cap = caps.enumeration;

    let summary = estimate_distribution(&sim)?;
    write_file(out, "summary.json", &format!("{}\n", summary.to_json()))?;
    write_file(out, "bins.csv", &summary.bins_to_csv())?;
    if let Some(pmf) = summary.empirical_pmf() {
        write_file(out, "counts.csv", &pmf.to_csv())?;
    }
    Ok(())
}

pub fn figures_cmd(which: &str, out: &Path, grid: Option<usize>) -> Result<(), CliError> {
    match which {
        "fig1-left" => {
            let rows = figures::fig1_left_rows()?;
            let body = rows
                .into_iter()
                .map(|(p, n, e)| vec![fmt_f64(p), n.to_string(), fmt_f64(e)]);
            write_file(out, "fig1_left.csv", &csv("p,excess_users,exponent_bits", body))?;
        }
        "fig1-right" => {
            let rows = figures::fig1_right_rows()?;
            let body = rows
                .into_iter()
                .map(|(n, g)| vec![n.to_string(), fmt_f64(g)]);
            write_file(out, "fig1_right.csv", &csv("excess_users,approx_avg_guesswork", body))?;
        }
        "fig2" => {
            let rows = figures::fig2_rows(grid)?;
            let body = rows.into_iter().map(|(x, a, b, c)| {
                vec![fmt_f64(x), fmt_f64(a), fmt_f64(b), fmt_f64(c)]
            });
            write_file(
                out,
                "fig2.csv",
                &csv("x_bits,rate_bit_user,rate_byte_user,rate_identify_one", body),
            )?;
        }
        "fig3" => {
            let rows = figures::fig3_rows(grid)?;
            let body = rows
                .into_iter()
                .map(|(a, b, gap)| vec![fmt_f64(a), fmt_f64(b), fmt_f64(gap)]);
            write_file(out, "fig3.csv", &csv("a,b,gap_bits", body))?;
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown figure {other:?}; expected one of {}",
                figures::FIGURE_IDS.join(", ")
            )));
        }
    }
    Ok(())
}

pub fn verify_cmd() -> Result<(), CliError> {
    let checks = verify::run_all();
    let mut failed = Vec::new();
    for check in &checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", check.name, check.detail);
        if !check.passed {
            failed.push(check.name.to_string());
        }
    }
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failed))
    }
}
