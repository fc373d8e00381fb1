//! Experiment configuration: strict JSON, defaults resolved up front.
//!
//! Every block is optional. [`ExperimentConfig::resolve`] fills in every
//! default so the resolved value, serialised back to JSON, reproduces the
//! same experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};
use teamdiff_core::gan::GaussianMixture;
use teamdiff_core::graph::{
    build_team_graph, random_cross_links, CrossLink, GraphKind, NetworkTopology, Team, TeamGraph,
};
use teamdiff_core::linalg::Matrix;
use teamdiff_core::{GanGame, GanSpec, Init, PlateauSettings, QuadraticZeroSumGame, RunConfig};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameBlock>,
    /// Absent: the default topology for the game. Present: links come only
    /// from what the block lists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologyBlock>,
    #[serde(default)]
    pub engine: EngineBlock,
    #[serde(default)]
    pub diagnostics: DiagnosticsBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameBlock {
    Quadratic(QuadraticBlock),
    Gan(GanBlock),
}

/// A dense matrix (list of rows) or a multiple of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Dense(Vec<Vec<f64>>),
    Scaled { identity_times: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticBlock {
    #[serde(rename = "M1", default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<usize>,
    #[serde(rename = "M2", default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<usize>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<MatrixSpec>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<MatrixSpec>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<MatrixSpec>,
    #[serde(rename = "b", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(rename = "c", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Standard deviation of the per-agent linear shifts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureBlock {
    pub means: Vec<Vec<f64>>,
    pub covs: Vec<MatrixSpec>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GanBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_gen: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_disc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_log: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<MixtureBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_batch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_batch: Option<usize>,
    /// Generator samples used for the end-of-run mean check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TeamSpec {
    Ring { size: usize },
    Full { size: usize },
    Random { size: usize, p: f64, seed: u64 },
    /// Undirected edges in team-local indices; self-loops are implied.
    Edges { size: usize, edges: Vec<[usize; 2]> },
}

impl TeamSpec {
    pub fn size(&self) -> usize {
        match *self {
            TeamSpec::Ring { size } | TeamSpec::Full { size } => size,
            TeamSpec::Random { size, .. } | TeamSpec::Edges { size, .. } => size,
        }
    }
}

/// A directed cross link, `[team id, team-local index]` at each end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub from: (u8, usize),
    pub to: (u8, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomLinks {
    pub per_direction: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyBlock {
    pub teams: [TeamSpec; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_links: Vec<LinkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_cross_links: Option<RandomLinks>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Zeros,
    Gaussian { scale: f64, seed: u64 },
}

impl From<InitSpec> for Init {
    fn from(s: InitSpec) -> Init {
        match s {
            InitSpec::Zeros => Init::Zeros,
            InitSpec::Gaussian { scale, seed } => Init::Gaussian { scale, seed },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_runs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate_init: Option<InitSpec>,
    /// Co-run the centralized recursion and measure the perturbation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_frac: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = parse_config(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses JSON strictly; errors carry the key path and line.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config {
            path: if path == "." { "<root>".into() } else { path },
            msg: format!("{inner} (line {}, column {})", inner.line(), inner.column()),
        }
    })
}

fn bad(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        msg: msg.into(),
    }
}

fn matrix(spec: &MatrixSpec, rows: usize, cols: usize, path: &str) -> Result<Matrix, CliError> {
    match spec {
        MatrixSpec::Scaled { identity_times } => {
            if rows != cols {
                return Err(bad(path, format!("identity_times needs a square {rows}x{cols} block")));
            }
            Ok(Matrix::identity(rows, cols) * *identity_times)
        }
        MatrixSpec::Dense(r) => {
            if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                return Err(bad(path, format!("expected a {rows}x{cols} matrix")));
            }
            Ok(Matrix::from_fn(rows, cols, |i, j| r[i][j]))
        }
    }
}

fn dense(m: &Matrix) -> MatrixSpec {
    MatrixSpec::Dense((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
}

fn default_quadratic_coupling() -> Matrix {
    Matrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.4])
}

impl QuadraticBlock {
    fn resolved(&self) -> QuadraticBlock {
        let m1 = self.m1.unwrap_or(2);
        let m2 = self.m2.unwrap_or(2);
        let default_dims = m1 == 2 && m2 == 2;
        let vec_or = |v: &Option<Vec<f64>>, d: [f64; 2], m: usize| {
            v.clone().unwrap_or_else(|| if default_dims { d.to_vec() } else { vec![0.0; m] })
        };
        QuadraticBlock {
            m1: Some(m1),
            m2: Some(m2),
            p: Some(self.p.clone().unwrap_or(MatrixSpec::Scaled { identity_times: 1.0 })),
            q: Some(self.q.clone().unwrap_or(MatrixSpec::Scaled { identity_times: 1.0 })),
            coupling: Some(self.coupling.clone().unwrap_or_else(|| {
                if default_dims {
                    dense(&default_quadratic_coupling())
                } else {
                    MatrixSpec::Dense(vec![vec![0.0; m2]; m1])
                }
            })),
            b: Some(vec_or(&self.b, [1.0, -0.5], m1)),
            c: Some(vec_or(&self.c, [0.3, 0.8], m2)),
            sigma: Some(self.sigma.unwrap_or(0.1)),
            shift_scale: Some(self.shift_scale.unwrap_or(1.0)),
            shift_seed: Some(self.shift_seed.unwrap_or(1)),
        }
    }

    /// Builds the game; `self` must be resolved.
    pub fn build(&self, sizes: [usize; 2]) -> Result<QuadraticZeroSumGame, CliError> {
        let r = self.resolved();
        let (m1, m2) = (r.m1.unwrap(), r.m2.unwrap());
        if m1 == 0 || m2 == 0 {
            return Err(bad("game.M1", "dimensions must be positive"));
        }
        let p = matrix(r.p.as_ref().unwrap(), m1, m1, "game.P")?;
        let q = matrix(r.q.as_ref().unwrap(), m2, m2, "game.Q")?;
        let c = matrix(r.coupling.as_ref().unwrap(), m1, m2, "game.C")?;
        let b = r.b.unwrap();
        let cl = r.c.unwrap();
        if b.len() != m1 {
            return Err(bad("game.b", format!("expected length M1 = {m1}")));
        }
        if cl.len() != m2 {
            return Err(bad("game.c", format!("expected length M2 = {m2}")));
        }
        for (path, m) in [("game.P", &p), ("game.Q", &q)] {
            if (m - m.transpose()).amax() > 1e-12 {
                return Err(bad(path, "must be symmetric"));
            }
        }
        let sigma = r.sigma.unwrap();
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(bad("game.sigma", "must be finite and >= 0"));
        }
        let scale = r.shift_scale.unwrap();
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(bad("game.shift_scale", "must be finite and >= 0"));
        }
        QuadraticZeroSumGame::with_random_shifts(p, q, c, b, cl, sizes, scale, r.shift_seed.unwrap(), sigma)
            .map_err(|e| bad("game", e.to_string()))
    }
}

impl GanBlock {
    fn resolved(&self) -> GanBlock {
        let d = GanSpec::default();
        GanBlock {
            noise_dim: Some(self.noise_dim.unwrap_or(d.noise_dim)),
            data_dim: Some(self.data_dim.unwrap_or(d.data_dim)),
            hidden_gen: Some(self.hidden_gen.unwrap_or(d.hidden_gen)),
            hidden_disc: Some(self.hidden_disc.unwrap_or(d.hidden_disc)),
            batch_size: Some(self.batch_size.unwrap_or(d.batch_size)),
            eps_log: Some(self.eps_log.unwrap_or(d.eps_log)),
            target: Some(self.target.clone().unwrap_or_else(|| MixtureBlock {
                means: d.target.means().to_vec(),
                covs: d.target.covs().iter().map(dense).collect(),
                weights: d.target.weights().to_vec(),
            })),
            jitter_scale: Some(self.jitter_scale.unwrap_or(d.jitter_scale)),
            jitter_seed: Some(self.jitter_seed.unwrap_or(d.jitter_seed)),
            reference_batch: Some(self.reference_batch.unwrap_or(d.reference_batch)),
            eval_batch: Some(self.eval_batch.unwrap_or(d.eval_batch)),
            check_samples: Some(self.check_samples.unwrap_or(20_000)),
        }
    }

    pub fn build(&self, sizes: [usize; 2]) -> Result<GanGame, CliError> {
        let r = self.resolved();
        let data_dim = r.data_dim.unwrap();
        let t = r.target.as_ref().unwrap();
        if t.means.len() != t.covs.len() || t.means.len() != t.weights.len() {
            return Err(bad("game.target", "means, covs and weights need one entry per component"));
        }
        if let Some(i) = t.means.iter().position(|m| m.len() != data_dim) {
            return Err(bad(&format!("game.target.means[{i}]"), format!("expected length data_dim = {data_dim}")));
        }
        let covs = t
            .covs
            .iter()
            .enumerate()
            .map(|(i, c)| matrix(c, data_dim, data_dim, &format!("game.target.covs[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let target = GaussianMixture::new(t.means.clone(), covs, t.weights.clone())
            .map_err(|e| bad("game.target", e.to_string()))?;
        if r.check_samples == Some(0) {
            return Err(bad("game.check_samples", "must be positive"));
        }
        let spec = GanSpec {
            noise_dim: r.noise_dim.unwrap(),
            data_dim,
            hidden_gen: r.hidden_gen.unwrap(),
            hidden_disc: r.hidden_disc.unwrap(),
            batch_size: r.batch_size.unwrap(),
            eps_log: r.eps_log.unwrap(),
            target,
            jitter_scale: r.jitter_scale.unwrap(),
            jitter_seed: r.jitter_seed.unwrap(),
            reference_batch: r.reference_batch.unwrap(),
            eval_batch: r.eval_batch.unwrap(),
        };
        GanGame::new(spec, sizes).map_err(|e| bad("game", e.to_string()))
    }
}

impl TopologyBlock {
    fn default_for(game: &GameBlock) -> TopologyBlock {
        let size = match game {
            GameBlock::Quadratic(_) => 8,
            GameBlock::Gan(_) => 4,
        };
        TopologyBlock {
            teams: [TeamSpec::Ring { size }, TeamSpec::Ring { size }],
            cross_links: Vec::new(),
            random_cross_links: Some(RandomLinks { per_direction: 2, seed: 5 }),
        }
    }

    pub fn sizes(&self) -> [usize; 2] {
        [self.teams[0].size(), self.teams[1].size()]
    }

    /// Builds and checks the topology. Missing cross links are an
    /// Connectivity violation, reported by the graph module.
    pub fn build(&self) -> Result<NetworkTopology, CliError> {
        let sizes = self.sizes();
        let mut graphs = Vec::with_capacity(2);
        for (i, (spec, team)) in self.teams.iter().zip(Team::BOTH).enumerate() {
            let path = format!("topology.teams[{i}]");
            if spec.size() == 0 {
                return Err(bad(&path, "a team needs at least one agent"));
            }
            let g = match spec {
                TeamSpec::Ring { size } => build_team_graph(team, GraphKind::Ring, *size),
                TeamSpec::Full { size } => build_team_graph(team, GraphKind::Full, *size),
                TeamSpec::Random { size, p, seed } => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(bad(&format!("{path}.p"), "must lie in [0, 1]"));
                    }
                    build_team_graph(team, GraphKind::RandomConnected { p: *p, seed: *seed }, *size)
                }
                TeamSpec::Edges { size, edges } => {
                    if let Some(j) = edges.iter().position(|e| e[0] >= *size || e[1] >= *size) {
                        return Err(bad(&format!("{path}.edges[{j}]"), format!("index out of range for size {size}")));
                    }
                    let e: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                    TeamGraph::from_edges(team, *size, &e)
                }
            }
            .map_err(CliError::Core)?;
            graphs.push(g);
        }
        let offset = |team: u8| if team == 1 { 0 } else { sizes[0] };
        let mut links = Vec::new();
        for (j, l) in self.cross_links.iter().enumerate() {
            let path = format!("topology.cross_links[{j}]");
            for (team, k) in [l.from, l.to] {
                if !(team == 1 || team == 2) {
                    return Err(bad(&path, format!("team id must be 1 or 2, got {team}")));
                }
                if k >= sizes[team as usize - 1] {
                    return Err(bad(&path, format!("agent {k} out of range for team {team}")));
                }
            }
            if l.from.0 == l.to.0 {
                return Err(bad(&path, "a cross link must join the two teams"));
            }
            links.push(CrossLink {
                src: offset(l.from.0) + l.from.1,
                dst: offset(l.to.0) + l.to.1,
            });
        }
        if let Some(r) = self.random_cross_links {
            links.extend(
                random_cross_links(sizes, r.per_direction, r.seed)
                    .map_err(|e| bad("topology.random_cross_links", e.to_string()))?,
            );
        }
        let g2 = graphs.pop().unwrap();
        let g1 = graphs.pop().unwrap();
        NetworkTopology::new(g1, g2, links).map_err(CliError::Core)
    }
}

impl ExperimentConfig {
    /// The same config with every default written out.
    pub fn resolve(&self) -> ExperimentConfig {
        let game = match self.game.clone().unwrap_or(GameBlock::Quadratic(QuadraticBlock::default())) {
            GameBlock::Quadratic(q) => GameBlock::Quadratic(q.resolved()),
            GameBlock::Gan(g) => GameBlock::Gan(g.resolved()),
        };
        let gan = matches!(game, GameBlock::Gan(_));
        let topology = self.topology.clone().unwrap_or_else(|| TopologyBlock::default_for(&game));
        let e = &self.engine;
        let engine = EngineBlock {
            mu: Some(e.mu.unwrap_or(if gan { 0.01 } else { 0.005 })),
            horizon: Some(e.horizon.unwrap_or(if gan { 30_000 } else { 20_000 })),
            mc_runs: Some(e.mc_runs.unwrap_or(if gan { 1 } else { 100 })),
            master_seed: Some(e.master_seed.unwrap_or(0)),
            init: Some(e.init.unwrap_or(if gan {
                InitSpec::Gaussian { scale: 0.5, seed: 0 }
            } else {
                InitSpec::Zeros
            })),
            estimate_init: Some(e.estimate_init.unwrap_or(InitSpec::Zeros)),
            baseline: Some(e.baseline.unwrap_or(!gan)),
            parallel: Some(e.parallel.unwrap_or(true)),
        };
        let d = PlateauSettings::default();
        let diagnostics = DiagnosticsBlock {
            window_frac: Some(self.diagnostics.window_frac.unwrap_or(d.window_frac)),
            rel_tol: Some(self.diagnostics.rel_tol.unwrap_or(d.rel_tol)),
            record_every: Some(self.diagnostics.record_every.unwrap_or(10)),
        };
        let output = OutputBlock {
            directory: self.output.directory.clone(),
            formats: Some(self.output.formats.clone().unwrap_or(vec![Format::Csv, Format::Json])),
        };
        ExperimentConfig {
            game: Some(game),
            topology: Some(topology),
            engine,
            diagnostics,
            output,
        }
    }

    /// Checks every block, building the game and topology once.
    pub fn validate(&self) -> Result<(), CliError> {
        let r = self.resolve();
        let e = &r.engine;
        let mu = e.mu.unwrap();
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(bad("engine.mu", "must be positive and finite"));
        }
        if e.mc_runs == Some(0) {
            return Err(bad("engine.mc_runs", "must be at least 1"));
        }
        for (path, init) in [("engine.init", e.init.unwrap()), ("engine.estimate_init", e.estimate_init.unwrap())] {
            if let InitSpec::Gaussian { scale, .. } = init {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(bad(&format!("{path}.scale"), "must be finite and >= 0"));
                }
            }
        }
        let d = &r.diagnostics;
        if !matches!(d.window_frac, Some(w) if w > 0.0 && w <= 0.5) {
            return Err(bad("diagnostics.window_frac", "must lie in (0, 0.5]"));
        }
        if !matches!(d.rel_tol, Some(t) if t > 0.0 && t.is_finite()) {
            return Err(bad("diagnostics.rel_tol", "must be positive"));
        }
        if d.record_every == Some(0) {
            return Err(bad("diagnostics.record_every", "must be at least 1"));
        }
        let topo = r.topology.as_ref().unwrap();
        let sizes = topo.sizes();
        match r.game.as_ref().unwrap() {
            GameBlock::Quadratic(q) => drop(q.build(sizes)?),
            GameBlock::Gan(g) => drop(g.build(sizes)?),
        }
        topo.build()?;
        Ok(())
    }

    /// Resolved engine settings.
    pub fn run_config(&self) -> RunConfig {
        let e = self.resolve().engine;
        RunConfig {
            mu: e.mu.unwrap(),
            horizon: e.horizon.unwrap(),
            init: e.init.unwrap().into(),
            estimate_init: e.estimate_init.unwrap().into(),
            mc_runs: e.mc_runs.unwrap(),
            master_seed: e.master_seed.unwrap(),
            baseline_enabled: e.baseline.unwrap(),
            record_every: self.resolve().diagnostics.record_every.unwrap(),
            parallel: e.parallel.unwrap(),
        }
    }

    pub fn plateau_settings(&self) -> PlateauSettings {
        let d = self.resolve().diagnostics;
        PlateauSettings {
            window_frac: d.window_frac.unwrap(),
            rel_tol: d.rel_tol.unwrap(),
        }
    }

    pub fn game_block(&self) -> GameBlock {
        self.resolve().game.unwrap()
    }

    pub fn topology_block(&self) -> TopologyBlock {
        self.resolve().topology.unwrap()
    }
}
