use clap::{Parser, Subcommand};
use dynloc::kg::io;
use dynloc::lattice::{self, LatticeSpacetime, SpacetimeConfig};
use dynloc::scenario::{self, Scenario};
use dynloc::study;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "dynloc", version, about = "Lattice dynamical-locality checks for the Klein-Gordon field")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the sampling seed of every scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiply every comparison tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate a spacetime; writes its summary and metric.
    Build {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one scenario file.
    Run { scenario: PathBuf },
    /// Run all builtin scenarios (or the named ones).
    Suite {
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Refinement studies of the propagator identities and the rce response.
    Converge {
        #[arg(long, value_delimiter = ',', default_values_t = study::DEFAULT_LEVELS.to_vec())]
        levels: Vec<usize>,
    },
    /// List builtin scenarios, or print one as JSON.
    Show { name: Option<String> },
}

#[derive(Serialize)]
struct BuildSummary {
    schema: u32,
    topology: lattice::Topology,
    nx: usize,
    nt: usize,
    dx: f64,
    dt: f64,
    max_speed: f64,
    cone_reach: usize,
    min_signature_margin: f64,
}

/// Write via a temporary file and rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> dynloc::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> dynloc::Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn build(cli: &Cli, config: &Path) -> dynloc::Result<bool> {
    let cfg: SpacetimeConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
    let m = LatticeSpacetime::build(&cfg)?;
    fs::create_dir_all(&cli.out)?;
    let summary = BuildSummary {
        schema: scenario::SCHEMA,
        topology: m.topology,
        nx: m.nx,
        nt: m.nt,
        dx: m.dx,
        dt: m.dt,
        max_speed: m.max_speed(),
        cone_reach: m.cone_reach(),
        min_signature_margin: m.metric.iter().map(lattice::signature_margin).fold(f64::INFINITY, f64::min),
    };
    write_json(&cli.out.join("spacetime.json"), &summary)?;
    let mut csv = String::from("it,ix,g_tt,g_tx,g_xx\n");
    for it in 0..m.nt {
        for ix in 0..m.nx {
            let g = m.g(it, ix);
            csv.push_str(&format!("{it},{ix},{:e},{:e},{:e}\n", g[0], g[1], g[2]));
        }
    }
    write_atomic(&cli.out.join("metric.csv"), csv.as_bytes())?;
    println!("{}x{} {:?} lattice ok", m.nt, m.nx, m.topology);
    Ok(true)
}

/// Run scenarios, write report.json, timings.json and witness CSVs.
fn run_all(cli: &Cli, mut scenarios: Vec<Scenario>) -> dynloc::Result<bool> {
    fs::create_dir_all(&cli.out)?;
    let mut reports = Vec::new();
    let mut timings = BTreeMap::new();
    let mut ok = true;
    for s in scenarios.iter_mut() {
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        s.scale_tolerance(cli.tolerance_scale);
        let t = Instant::now();
        let outcome = s.run()?;
        timings.insert(s.name.clone(), t.elapsed().as_secs_f64());
        let r = &outcome.report;
        println!(
            "{:<28} {:<14} kin {:>4} dyn {:>4}  {}",
            r.scenario,
            format!("{:?}", r.verdict),
            r.dim_kin,
            r.dim_dyn,
            if r.matches { "ok" } else { "MISMATCH" }
        );
        ok &= r.matches;
        if let Some(f) = &outcome.witness_field {
            let mut buf = Vec::new();
            io::write_csv(f, &mut buf)?;
            write_atomic(&cli.out.join(format!("{}_witness.csv", s.name)), &buf)?;
        }
        reports.push(outcome.report);
    }
    let doc = serde_json::json!({ "schema": scenario::SCHEMA, "reports": reports });
    write_json(&cli.out.join("report.json"), &doc)?;
    write_json(&cli.out.join("timings.json"), &timings)?;
    Ok(ok)
}

fn converge(cli: &Cli, levels: &[usize]) -> dynloc::Result<bool> {
    if levels.len() < 3 {
        return Err(dynloc::Error::Scenario { name: "converge".into(), msg: "need at least three levels".into() });
    }
    fs::create_dir_all(&cli.out)?;
    let t = Instant::now();
    let green = study::green_study(levels)?;
    let response = study::response_study(levels)?;
    let causality = study::causality(study::BASE_NX)?;
    let doc = serde_json::json!({
        "schema": scenario::SCHEMA,
        "levels": levels,
        "green": green,
        "causality": causality,
        "response": response,
    });
    write_json(&cli.out.join("convergence.json"), &doc)?;
    write_json(&cli.out.join("timings.json"), &BTreeMap::from([("converge", t.elapsed().as_secs_f64())]))?;
    let mut csv = String::from("nx,sigma_ef_phi_re,sigma_ef_eg_re,derivative_re,response_re,stress_re\n");
    for (g, r) in green.levels.iter().zip(&response.levels) {
        csv.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e}\n",
            g.nx, g.sigma_ef_phi[0], g.sigma_ef_eg[0], r.derivative[0], r.response[0], r.stress[0]
        ));
    }
    write_atomic(&cli.out.join("convergence.csv"), csv.as_bytes())?;
    println!(
        "identity residual {:.2e}, sigma(Ef,phi) error {:.2e} slope {:.2}, response/stress {:.2e} slope {:.2}",
        green.identity_residual,
        green.sigma_ef_phi.base_error,
        green.sigma_ef_phi.slope,
        response.pairwise[2],
        response.pairwise_slopes[2]
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { config } => build(&cli, config),
        Command::Run { scenario } => fs::read_to_string(scenario)
            .map_err(dynloc::Error::from)
            .and_then(|s| Ok(serde_json::from_str::<Scenario>(&s)?))
            .and_then(|s| run_all(&cli, vec![s])),
        Command::Suite { only } => {
            let all = scenario::builtins();
            let unknown: Vec<&String> = only.iter().filter(|n| scenario::builtin(n).is_none()).collect();
            if !unknown.is_empty() {
                eprintln!("unknown scenarios: {unknown:?}");
                return ExitCode::from(2);
            }
            let chosen = all.into_iter().filter(|s| only.is_empty() || only.contains(&s.name)).collect();
            run_all(&cli, chosen)
        }
        Command::Converge { levels } => converge(&cli, levels),
        Command::Show { name: None } => {
            for s in scenario::builtins() {
                println!("{:<28} {}", s.name, s.claim);
            }
            Ok(true)
        }
        Command::Show { name: Some(n) } => match scenario::builtin(n) {
            Some(s) => serde_json::to_string_pretty(&s).map(|j| println!("{j}")).map(|_| true).map_err(Into::into),
            None => {
                eprintln!("unknown scenario {n}");
                return ExitCode::from(2);
            }
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
