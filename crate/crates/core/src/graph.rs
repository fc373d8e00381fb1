//! Team graphs, combination matrices and cross-team matrices.
//!
//! Agents carry global indices: team 1 occupies `0..K1` and team 2 occupies
//! `K1..K1+K2`. Team graphs use team-local indices.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{minus_averaging, spectral_radius, Matrix};
use crate::rng::StreamRng;

/// Row/column sum tolerance for stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// One of the two competing teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Team {
    One,
    Two,
}

impl Team {
    pub const BOTH: [Team; 2] = [Team::One, Team::Two];

    pub fn other(self) -> Team {
        match self {
            Team::One => Team::Two,
            Team::Two => Team::One,
        }
    }

    /// Zero-based position, for indexing per-team arrays.
    pub fn index(self) -> usize {
        match self {
            Team::One => 0,
            Team::Two => 1,
        }
    }

    /// The team number as written in configs and reports (1 or 2).
    pub fn id(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_id(id: u8) -> Result<Team> {
        match id {
            1 => Ok(Team::One),
            2 => Ok(Team::Two),
            _ => Err(Error::invalid(format!("team id must be 1 or 2, got {id}"))),
        }
    }
}

/// Family of team graphs that [`build_team_graph`] can produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Ring,
    Full,
    RandomConnected { p: f64, seed: u64 },
}

/// Undirected team graph with mandatory self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamGraph {
    team: Team,
    adjacency: Vec<Vec<bool>>,
}

impl TeamGraph {
    /// Builds a graph from undirected team-local edges. Self-loops are added.
    pub fn from_edges(team: Team, size: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("team size must be positive"));
        }
        let mut adjacency = vec![vec![false; size]; size];
        for (i, row) in adjacency.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in edges {
            if i >= size || j >= size {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) out of range for team {} of size {size}",
                    team.id()
                )));
            }
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        let g = TeamGraph { team, adjacency };
        if !g.is_connected() {
            return Err(Error::connectivity(format!(
                "team {} graph is disconnected",
                team.id()
            )));
        }
        Ok(g)
    }

    pub fn team(&self) -> Team {
        self.team
    }

    pub fn size(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    /// Neighbour count excluding the self-loop.
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&a| a).count() - 1
    }

    /// Team-local neighbours of `i`, excluding `i`, ascending.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i]
            .iter()
            .enumerate()
            .filter(move |&(j, &a)| a && j != i)
            .map(|(j, _)| j)
    }

    /// Undirected edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adjacency[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Builds a connected team graph of the requested family.
pub fn build_team_graph(team: Team, kind: GraphKind, size: usize) -> Result<TeamGraph> {
    if size == 0 {
        return Err(Error::invalid("team size must be positive"));
    }
    let edges: Vec<(usize, usize)> = match kind {
        GraphKind::Full => (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
            .collect(),
        GraphKind::Ring => match size {
            1 => vec![],
            2 => vec![(0, 1)],
            _ => (0..size).map(|i| (i, (i + 1) % size)).collect(),
        },
        GraphKind::RandomConnected { p, seed } => {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(format!(
                    "edge probability must lie in (0, 1], got {p}"
                )));
            }
            random_connected_edges(size, p, seed)
        }
    };
    TeamGraph::from_edges(team, size, &edges)
}

// Random spanning tree (random attachment over a shuffled order) plus
// independent Bernoulli(p) edges.
fn random_connected_edges(size: usize, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for pos in 1..size {
        let parent = order[rng.gen_range(0..pos)];
        edges.push((parent.min(order[pos]), parent.max(order[pos])));
    }
    for i in 0..size {
        for j in i + 1..size {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Doubly-stochastic within-team combination matrix `A^(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    entries: Matrix,
    lambda2: f64,
}

impl CombinationMatrix {
    /// `entries[(l, k)]` is the weight agent `k` gives to neighbour `l`.
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Mixing rate `ρ(A - 11ᵀ/K)`.
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// Metropolis–Hastings weights on a team graph.
///
/// `a_lk = 1 / (1 + max(deg l, deg k))` for neighbours and the remainder on
/// the diagonal.
pub fn metropolis_weights(g: &TeamGraph) -> Result<CombinationMatrix> {
    if !g.is_connected() {
        return Err(Error::invalid("metropolis weights need a connected graph"));
    }
    let n = g.size();
    let mut a = Matrix::zeros(n, n);
    for k in 0..n {
        let mut off = 0.0;
        for l in g.neighbors(k) {
            let w = 1.0 / (1.0 + g.degree(l).max(g.degree(k)) as f64);
            a[(l, k)] = w;
            off += w;
        }
        a[(k, k)] = 1.0 - off;
    }
    let lambda2 = spectral_radius(&minus_averaging(&a))?;
    if lambda2 >= 1.0 - 1e-10 {
        return Err(Error::connectivity(format!(
            "team {} combination matrix is not primitive (lambda2 = {lambda2})",
            g.team().id()
        )));
    }
    Ok(CombinationMatrix { entries: a, lambda2 })
}

/// Directed link from one agent to an agent of the other team (global indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CrossLink {
    pub src: usize,
    pub dst: usize,
}

/// Left-stochastic cross matrix `A^(t't)`: the weights agents of the
/// receiving team `t` use to average their estimates of team `t'`'s model.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMatrix {
    receiving: Team,
    entries: Matrix,
    sub_block: Matrix,
    rho_sub: f64,
}

impl CrossMatrix {
    pub fn receiving(&self) -> Team {
        self.receiving
    }

    /// `K x K_t`; row = global sender index, column = receiving team-local index.
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Rows of the receiving team only.
    pub fn sub_block(&self) -> &Matrix {
        &self.sub_block
    }

    pub fn rho_sub(&self) -> f64 {
        self.rho_sub
    }
}

/// Two team graphs, their combination matrices and both cross matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    graphs: [TeamGraph; 2],
    combination: [CombinationMatrix; 2],
    cross: [CrossMatrix; 2],
    cross_links: Vec<CrossLink>,
}

impl NetworkTopology {
    /// Derives all four matrices and checks the connectivity assumption.
    pub fn new(team1: TeamGraph, team2: TeamGraph, mut cross_links: Vec<CrossLink>) -> Result<Self> {
        if team1.team() != Team::One || team2.team() != Team::Two {
            return Err(Error::invalid("team graphs must be given in order (1, 2)"));
        }
        let sizes = [team1.size(), team2.size()];
        let total = sizes[0] + sizes[1];
        for link in &cross_links {
            if link.src >= total || link.dst >= total {
                return Err(Error::invalid(format!(
                    "cross link {} -> {} out of range for {total} agents",
                    link.src, link.dst
                )));
            }
            if team_of(sizes, link.src) == team_of(sizes, link.dst) {
                return Err(Error::invalid(format!(
                    "cross link {} -> {} does not span teams",
                    link.src, link.dst
                )));
            }
        }
        cross_links.sort();
        cross_links.dedup();
        let combination = [metropolis_weights(&team1)?, metropolis_weights(&team2)?];
        let graphs = [team1, team2];
        let cross = [
            build_cross_matrix(&graphs, &cross_links, Team::One)?,
            build_cross_matrix(&graphs, &cross_links, Team::Two)?,
        ];
        Ok(NetworkTopology {
            graphs,
            combination,
            cross,
            cross_links,
        })
    }

    pub fn graph(&self, t: Team) -> &TeamGraph {
        &self.graphs[t.index()]
    }

    pub fn combination(&self, t: Team) -> &CombinationMatrix {
        &self.combination[t.index()]
    }

    /// Cross matrix used by agents of team `receiving`.
    pub fn cross(&self, receiving: Team) -> &CrossMatrix {
        &self.cross[receiving.index()]
    }

    pub fn cross_links(&self) -> &[CrossLink] {
        &self.cross_links
    }

    pub fn team_size(&self, t: Team) -> usize {
        self.graphs[t.index()].size()
    }

    pub fn total_agents(&self) -> usize {
        self.team_size(Team::One) + self.team_size(Team::Two)
    }

    /// Global index of team-local agent `k`.
    pub fn global(&self, t: Team, k: usize) -> usize {
        match t {
            Team::One => k,
            Team::Two => self.team_size(Team::One) + k,
        }
    }

    /// Team and team-local index of a global agent.
    pub fn locate(&self, agent: usize) -> (Team, usize) {
        let k1 = self.team_size(Team::One);
        if agent < k1 {
            (Team::One, agent)
        } else {
            (Team::Two, agent - k1)
        }
    }
}

fn team_of(sizes: [usize; 2], agent: usize) -> Team {
    if agent < sizes[0] {
        Team::One
    } else {
        Team::Two
    }
}

/// Uniform in-neighbour weights for the agents of `receiving`.
///
/// Agent `k`'s in-neighbourhood is itself, its team neighbours, and every
/// agent of the other team with a cross link ending at `k`.
pub fn build_cross_matrix(
    graphs: &[TeamGraph; 2],
    cross_links: &[CrossLink],
    receiving: Team,
) -> Result<CrossMatrix> {
    let sizes = [graphs[0].size(), graphs[1].size()];
    let total = sizes[0] + sizes[1];
    let offset = match receiving {
        Team::One => 0,
        Team::Two => sizes[0],
    };
    let g = &graphs[receiving.index()];
    let kt = g.size();
    let mut entries = Matrix::zeros(total, kt);
    let mut inflow = false;
    for k in 0..kt {
        let mut sources: Vec<usize> = std::iter::once(k)
            .chain(g.neighbors(k))
            .map(|l| l + offset)
            .collect();
        for link in cross_links.iter().filter(|l| l.dst == k + offset) {
            if team_of(sizes, link.src) != receiving {
                sources.push(link.src);
                inflow = true;
            }
        }
        sources.sort_unstable();
        sources.dedup();
        let w = 1.0 / sources.len() as f64;
        for l in sources {
            entries[(l, k)] = w;
        }
    }
    if !inflow {
        return Err(Error::connectivity(format!(
            "no cross link carries information from team {} into team {}",
            receiving.other().id(),
            receiving.id()
        )));
    }
    let sub_block = entries.rows(offset, kt).into_owned();
    let rho_sub = spectral_radius(&sub_block)?;
    if rho_sub >= 1.0 - 1e-10 {
        return Err(Error::connectivity(format!(
            "cross sub-block for team {} has spectral radius {rho_sub}",
            receiving.id()
        )));
    }
    Ok(CrossMatrix {
        receiving,
        entries,
        sub_block,
        rho_sub,
    })
}

/// Picks `per_direction` distinct random cross links into each team.
pub fn random_cross_links(sizes: [usize; 2], per_direction: usize, seed: u64) -> Result<Vec<CrossLink>> {
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut links = Vec::new();
    for (src_team, dst_team) in [(0usize, 1usize), (1, 0)] {
        let capacity = sizes[src_team] * sizes[dst_team];
        if per_direction == 0 || per_direction > capacity {
            return Err(Error::invalid(format!(
                "cannot place {per_direction} cross links between teams of sizes {} and {}",
                sizes[src_team], sizes[dst_team]
            )));
        }
        let base = |t: usize| if t == 0 { 0 } else { sizes[0] };
        let mut all: Vec<CrossLink> = (0..sizes[src_team])
            .flat_map(|s| {
                (0..sizes[dst_team]).map(move |d| CrossLink {
                    src: base(src_team) + s,
                    dst: base(dst_team) + d,
                })
            })
            .collect();
        all.shuffle(&mut rng);
        links.extend_from_slice(&all[..per_direction]);
    }
    links.sort();
    Ok(links)
}

/// Connectivity diagnostics for a topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub lambda2: [f64; 2],
    pub rho_sub: [f64; 2],
    pub max_stochastic_error: f64,
    pub pass: bool,
}

/// Re-checks every invariant the algorithm relies on.
pub fn verify_topology(topo: &NetworkTopology) -> GraphReport {
    let mut err: f64 = 0.0;
    for t in Team::BOTH {
        let a = topo.combination(t).entries();
        for i in 0..a.nrows() {
            err = err.max((a.row(i).sum() - 1.0).abs());
            err = err.max((a.column(i).sum() - 1.0).abs());
        }
        let c = topo.cross(t).entries();
        for k in 0..c.ncols() {
            err = err.max((c.column(k).sum() - 1.0).abs());
        }
    }
    let lambda2 = [topo.combination(Team::One).lambda2(), topo.combination(Team::Two).lambda2()];
    let rho_sub = [topo.cross(Team::One).rho_sub(), topo.cross(Team::Two).rho_sub()];
    let pass = err <= STOCHASTIC_TOL && lambda2.iter().chain(&rho_sub).all(|&v| v < 1.0);
    GraphReport {
        lambda2,
        rho_sub,
        max_stochastic_error: err,
        pass,
    }
}
