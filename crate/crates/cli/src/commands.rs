use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use teamdiff_core::diagnostics::{bound_report, mc_mean, mu_scaling_study, BoundReport, TeamBoundReport};
use teamdiff_core::graph::{verify_topology, NetworkTopology, Team};
use teamdiff_core::rng::{stream, EVAL_SLOT};
use teamdiff_core::{run, GameOracle, RunOutput};

use crate::artifacts::{write_json, MetricsCsv};
use crate::config::{ExperimentConfig, Format, GameBlock, TeamSpec};
use crate::error::CliError;

/// One acceptance-relevant check, printed as a PASS/FAIL line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn checks_json(checks: &[Check]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect(),
    )
}

/// Result of a subcommand: its checks and the files it wrote.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub written: Vec<PathBuf>,
}

struct Sink {
    dir: PathBuf,
    csv: bool,
    json: bool,
}

impl Sink {
    fn new(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Option<Sink>, CliError> {
        let r = cfg.resolve();
        let dir = match (out, r.output.directory.as_deref()) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(d)) => PathBuf::from(d),
            (None, None) => return Ok(None),
        };
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let formats = r.output.formats.unwrap_or_default();
        Ok(Some(Sink {
            dir,
            csv: formats.contains(&Format::Csv),
            json: formats.contains(&Format::Json),
        }))
    }
}

fn require_out(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Sink, CliError> {
    Sink::new(cfg, out)?.ok_or_else(|| CliError::Usage("--out <dir> (or output.directory) is required".into()))
}

fn versions() -> Value {
    json!({
        "teamdiff": env!("CARGO_PKG_VERSION"),
        "teamdiff-core": teamdiff_core::VERSION,
        "summary_format": 1,
    })
}

fn seeds(cfg: &ExperimentConfig) -> Value {
    let r = cfg.resolve();
    let game_seed = match r.game.as_ref().unwrap() {
        GameBlock::Quadratic(q) => json!({"shift_seed": q.shift_seed}),
        GameBlock::Gan(g) => json!({"jitter_seed": g.jitter_seed}),
    };
    let topo = r.topology.as_ref().unwrap();
    let team_seeds: Vec<Value> = topo
        .teams
        .iter()
        .map(|t| match t {
            TeamSpec::Random { seed, .. } => json!(seed),
            _ => Value::Null,
        })
        .collect();
    json!({
        "master_seed": r.engine.master_seed,
        "game": game_seed,
        "init": r.engine.init,
        "estimate_init": r.engine.estimate_init,
        "team_graphs": team_seeds,
        "random_cross_links": topo.random_cross_links.map(|l| l.seed),
    })
}

fn team_json(t: &TeamBoundReport) -> Value {
    json!({
        "lambda2": t.lambda2,
        "rho_sub": t.rho_sub,
        "g_traj": t.g_traj,
        "lemma1_bound": t.lemma1_bound,
        "plateau_within": t.plateau_within,
        "plateau_cross": t.plateau_cross,
        "plateau_perturbation": t.plateau_perturbation,
        "plateau_perturbation_agent": t.plateau_perturbation_agent,
        "burn_in": t.burn_in.map_or(json!("not reached"), |b| json!(b)),
        "max_within_after_burn_in": t.max_within_after_burn_in,
        "bound_holds": t.bound_holds,
    })
}

fn per_team_json(rep: &BoundReport) -> Value {
    json!({"1": team_json(&rep.per_team[0]), "2": team_json(&rep.per_team[1])})
}

struct Built {
    topo: NetworkTopology,
    game: Box<dyn GameOracle>,
    sigma2: Option<f64>,
    centroid_dims: Option<[usize; 2]>,
}

fn build(cfg: &ExperimentConfig) -> Result<Built, CliError> {
    let tb = cfg.topology_block();
    let topo = tb.build()?;
    let sizes = tb.sizes();
    Ok(match cfg.game_block() {
        GameBlock::Quadratic(q) => {
            let game = q.build(sizes)?;
            let sigma = game.sigma();
            let dims = [game.dim(Team::One), game.dim(Team::Two)];
            Built {
                topo,
                game: Box::new(game),
                sigma2: Some(sigma * sigma),
                centroid_dims: Some(dims),
            }
        }
        GameBlock::Gan(g) => Built {
            topo,
            game: Box::new(g.build(sizes)?),
            sigma2: None,
            centroid_dims: None,
        },
    })
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{}", c.line());
    }
}

pub fn verify_graph(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    let topo = cfg.topology_block().build()?;
    let rep = verify_topology(&topo);
    let mut outcome = Outcome::default();
    for t in Team::BOTH {
        println!(
            "team {}: K = {}, lambda2 = {:.6}, rho(B) = {:.6}",
            t.id(),
            topo.team_size(t),
            rep.lambda2[t.index()],
            rep.rho_sub[t.index()]
        );
    }
    outcome.checks.push(Check::new(
        "connectivity",
        rep.pass,
        format!(
            "lambda2 = {:?}, rho(B) = {:?}, max stochasticity error = {:e}",
            rep.lambda2, rep.rho_sub, rep.max_stochastic_error
        ),
    ));
    print_checks(&outcome.checks);
    if let Some(sink) = Sink::new(cfg, out)? {
        if sink.json {
            let summary = json!({
                "command": "verify-graph",
                "graph": rep,
                "cross_links": topo.cross_links().iter().map(|l| [l.src, l.dst]).collect::<Vec<_>>(),
                "seeds": seeds(cfg),
                "versions": versions(),
                "checks": checks_json(&outcome.checks),
                "config": cfg.resolve(),
            });
            outcome.written.push(write_json(&sink.dir, "summary.json", &summary)?);
        }
    }
    if !rep.pass {
        return Err(CliError::Core(teamdiff_core::Error::AssumptionViolation {
            assumption: "cross-team connectivity",
            detail: "verify-graph found a violated invariant".into(),
        }));
    }
    Ok(outcome)
}

fn write_metrics(sink: &Sink, built: &Built, mu: f64, out: &RunOutput) -> Result<Option<PathBuf>, CliError> {
    if !sink.csv {
        return Ok(None);
    }
    let mut csv = MetricsCsv::create(&sink.dir, built.centroid_dims)?;
    for trace in &out.runs {
        csv.write_run(mu, trace)?;
    }
    csv.finish().map(Some)
}

fn bound_checks(rep: &BoundReport, checks: &mut Vec<Check>) {
    for t in Team::BOTH {
        let r = &rep.per_team[t.index()];
        let id = t.id();
        if let (Some(b), Some(m)) = (r.lemma1_bound, r.max_within_after_burn_in) {
            checks.push(Check::new(
                format!("lemma1-bound[team {id}]"),
                r.bound_holds == Some(true),
                format!("max within after burn-in {m:.3e} vs bound {b:.3e} (margin 1 + 3/sqrt({}))", rep.mc_runs),
            ));
        }
        let limit = 0.1 / rep.mu;
        checks.push(Check::new(
            format!("burn-in[team {id}]"),
            r.burn_in.is_some_and(|b| b as f64 <= limit),
            match r.burn_in {
                Some(b) => format!("burn-in {b} vs 0.1/mu = {limit}"),
                None => "plateau not reached".into(),
            },
        ));
    }
}

pub fn run_quadratic(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    if !matches!(cfg.game_block(), GameBlock::Quadratic(_)) {
        return Err(CliError::Usage("run-quadratic needs game.kind = \"quadratic\"".into()));
    }
    let sink = require_out(cfg, out)?;
    let built = build(cfg)?;
    let rc = cfg.run_config();
    let output = run(&built.topo, built.game.as_ref(), &rc)?;
    let mut outcome = Outcome::default();
    outcome.written.extend(write_metrics(&sink, &built, rc.mu, &output)?);
    let rep = bound_report(&output, &built.topo, built.sigma2, rc.mu, cfg.plateau_settings())?;
    let nash = mc_mean(&output.runs, |r| r.nash_error.unwrap_or(f64::NAN));
    let (first, last) = (nash[0], *nash.last().unwrap());
    outcome.checks.push(Check::new(
        "nash-error",
        last <= 1e-2 && (last < first || first == 0.0 && last == 0.0),
        format!("MC-mean squared error {first:.3e} at start, {last:.3e} at iteration {}", rc.horizon),
    ));
    bound_checks(&rep, &mut outcome.checks);
    print_checks(&outcome.checks);
    if sink.json {
        let summary = json!({
            "command": "run-quadratic",
            "mu": rc.mu,
            "mc_runs": rc.mc_runs,
            "per_team": per_team_json(&rep),
            "nash_error_final": rep.nash_error_final,
            "nash_point": built.game.nash(),
            "mu_scaling": Value::Null,
            "bound_check_mode": rep.bound_check_mode,
            "seeds": seeds(cfg),
            "versions": versions(),
            "checks": checks_json(&outcome.checks),
            "config": cfg.resolve(),
        });
        outcome.written.push(write_json(&sink.dir, "summary.json", &summary)?);
    }
    Ok(outcome)
}

/// GAN end-of-run statistics for one output.
pub struct GanStats {
    /// Min and max of the MC-mean discriminator output on real data over the last 10% of records.
    pub d_real_tail: (f64, f64),
    pub generator_means: Vec<Vec<f64>>,
    pub target_mean: Vec<f64>,
    pub zero_sum: bool,
}

pub fn gan_stats(game: &teamdiff_core::GanGame, output: &RunOutput, master_seed: u64, samples: usize) -> Result<GanStats, CliError> {
    let d_real = mc_mean(&output.runs, |r| r.losses.map_or(f64::NAN, |l| l.d_real));
    let tail = &d_real[d_real.len() - (d_real.len() / 10).max(1)..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut generator_means = Vec::new();
    for trace in &output.runs {
        let c = teamdiff_core::diagnostics::centroids(&trace.final_state);
        let mut rng = stream(master_seed, trace.run as u64, EVAL_SLOT, 0);
        generator_means.push(game.sample_mean(&c[0], samples, &mut rng)?);
    }
    let zero_sum = output
        .runs
        .iter()
        .flat_map(|t| &t.records)
        .all(|r| r.losses.is_some_and(|l| l.team1 + l.team2 == 0.0));
    Ok(GanStats {
        d_real_tail: (lo, hi),
        generator_means,
        target_mean: game.spec().target.mean(),
        zero_sum,
    })
}

pub fn run_gan(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    let GameBlock::Gan(block) = cfg.game_block() else {
        return Err(CliError::Usage("run-gan needs game.kind = \"gan\"".into()));
    };
    let sink = require_out(cfg, out)?;
    let tb = cfg.topology_block();
    let topo = tb.build()?;
    let game = block.build(tb.sizes())?;
    let rc = cfg.run_config();
    let output = run(&topo, &game, &rc)?;
    let built = Built {
        topo,
        game: Box::new(game.clone()),
        sigma2: None,
        centroid_dims: None,
    };
    let mut outcome = Outcome::default();
    outcome.written.extend(write_metrics(&sink, &built, rc.mu, &output)?);
    let rep = bound_report(&output, &built.topo, None, rc.mu, cfg.plateau_settings())?;
    let stats = gan_stats(&game, &output, rc.master_seed, block.check_samples.unwrap_or(20_000))?;
    let (lo, hi) = stats.d_real_tail;
    outcome.checks.push(Check::new(
        "gan-d-real",
        lo >= 0.35 && hi <= 0.65,
        format!("mean d(real) over the last 10% of records in [{lo:.4}, {hi:.4}], required within [0.35, 0.65]"),
    ));
    let worst = stats
        .generator_means
        .iter()
        .flat_map(|m| m.iter().zip(&stats.target_mean).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    outcome.checks.push(Check::new(
        "gan-generator-mean",
        worst <= 0.25,
        format!("generator means {:?} vs target {:?} (worst coordinate gap {worst:.4})", stats.generator_means, stats.target_mean),
    ));
    outcome.checks.push(Check::new(
        "gan-zero-sum",
        stats.zero_sum,
        "generator loss + discriminator loss == 0 on every recorded batch",
    ));
    print_checks(&outcome.checks);
    if sink.json {
        let summary = json!({
            "command": "run-gan",
            "mu": rc.mu,
            "mc_runs": rc.mc_runs,
            "per_team": per_team_json(&rep),
            "nash_error_final": Value::Null,
            "mu_scaling": Value::Null,
            "gan": {
                "d_real_tail": [lo, hi],
                "generator_means": stats.generator_means,
                "target_mean": stats.target_mean,
                "zero_sum": stats.zero_sum,
            },
            "bound_check_mode": rep.bound_check_mode,
            "seeds": seeds(cfg),
            "versions": versions(),
            "checks": checks_json(&outcome.checks),
            "config": cfg.resolve(),
        });
        outcome.written.push(write_json(&sink.dir, "summary.json", &summary)?);
    }
    Ok(outcome)
}

/// Parses `0.02,0.01,0.005`.
pub fn parse_mus(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("--mus: `{p}` is not a positive number")))
        })
        .collect()
}

pub fn sweep_mu(cfg: &ExperimentConfig, mus: &[f64], out: Option<&Path>) -> Result<Outcome, CliError> {
    let sink = require_out(cfg, out)?;
    let built = build(cfg)?;
    let base = cfg.run_config();
    let mut csv = if sink.csv {
        Some(MetricsCsv::create(&sink.dir, built.centroid_dims)?)
    } else {
        None
    };
    let mut write_error = None;
    let study = mu_scaling_study(
        &built.topo,
        built.game.as_ref(),
        &base,
        mus,
        built.sigma2,
        cfg.plateau_settings(),
        |mu, output| {
            println!("mu = {mu}: {} runs done", output.runs.len());
            if let Some(csv) = csv.as_mut() {
                for trace in &output.runs {
                    if let Err(e) = csv.write_run(mu, trace) {
                        let msg = e.to_string();
                        write_error = Some(e);
                        return Err(teamdiff_core::Error::InvalidArgument(msg));
                    }
                }
            }
            Ok(())
        },
    );
    if let Some(e) = write_error {
        return Err(e);
    }
    let study = study?;
    let mut outcome = Outcome::default();
    if let Some(csv) = csv {
        outcome.written.push(csv.finish()?);
    }
    let ratios = &study.ratios;
    for (i, w) in study.mus.windows(2).enumerate() {
        for t in Team::BOTH {
            for (name, v) in [
                ("within", ratios.within[i][t.index()]),
                ("cross", ratios.cross[i][t.index()]),
                ("perturbation", ratios.perturbation[i][t.index()]),
            ] {
                outcome.checks.push(Check::new(
                    format!("ratio-{name}[team {}, mu {} / {}]", t.id(), w[0], w[1]),
                    v.is_some_and(|r| (2.5..=6.0).contains(&r)),
                    match v {
                        Some(r) => format!("plateau ratio {r:.3}, required within [2.5, 6]"),
                        None => "degenerate plateaus".into(),
                    },
                ));
            }
        }
    }
    for p in &study.points {
        for t in Team::BOTH {
            let b = p.report.per_team[t.index()].burn_in;
            outcome.checks.push(Check::new(
                format!("burn-in[team {}, mu {}]", t.id(), p.mu),
                b.is_some_and(|b| b as f64 <= 0.1 / p.mu),
                format!("burn-in {b:?} vs 0.1/mu = {}", 0.1 / p.mu),
            ));
        }
    }
    for w in study.points.windows(2) {
        for t in Team::BOTH {
            let (a, b) = (w[0].report.per_team[t.index()].burn_in, w[1].report.per_team[t.index()].burn_in);
            outcome.checks.push(Check::new(
                format!("burn-in-growth[team {}, mu {} -> {}]", t.id(), w[0].mu, w[1].mu),
                matches!((a, b), (Some(a), Some(b)) if b <= 2 * a),
                format!("burn-in {a:?} -> {b:?}, allowed growth 2x"),
            ));
        }
    }
    print_checks(&outcome.checks);
    if sink.json {
        let pair = |v: &Vec<[Option<f64>; 2]>| -> Value { json!(v) };
        let summary = json!({
            "command": "sweep-mu",
            "mc_runs": base.mc_runs,
            "points": study.points.iter().map(|p| json!({
                "mu": p.mu,
                "per_team": per_team_json(&p.report),
                "nash_error_final": p.report.nash_error_final,
            })).collect::<Vec<_>>(),
            "mu_scaling": {
                "mus": study.mus,
                "ratios_within": pair(&ratios.within),
                "ratios_cross": pair(&ratios.cross),
                "ratios_perturbation": pair(&ratios.perturbation),
                "ratios_perturbation_agent": pair(&ratios.perturbation_agent),
            },
            "bound_check_mode": teamdiff_core::diagnostics::BOUND_CHECK_MODE,
            "seeds": seeds(cfg),
            "versions": versions(),
            "checks": checks_json(&outcome.checks),
            "config": cfg.resolve(),
        });
        outcome.written.push(write_json(&sink.dir, "summary.json", &summary)?);
    }
    Ok(outcome)
}
