//! The coevolving language-change dynamics.
//!
//! Each node carries a trait vector of length `F` over `{1..q}`. One step:
//! draw an active node `i` and a neighbor `j`; with full overlap nothing
//! happens; with zero overlap the edge is rewired away from `j`; otherwise
//! with probability `m/F` the active node copies one differing trait from
//! `j`.
//!
//! All randomness flows through a seeded `ChaCha8` stream with a fixed draw
//! order (active node, then neighbor, then branch-specific draws), so a
//! `(config, seed)` pair pins the whole trajectory bit-for-bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::{Error, Result};

/// How a zero-overlap edge picks its new endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Uniform over nodes two hops from the active node.
    LocalUniform,
    /// Two-hop candidates weighted by `(degree + 1)^2`.
    LocalPreferential,
    /// Uniform over all non-neighbors; the earlier adaptive model.
    GlobalUniform,
    /// No rewiring at all; the original static-lattice model.
    StaticLattice,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::LocalUniform,
        Strategy::LocalPreferential,
        Strategy::GlobalUniform,
        Strategy::StaticLattice,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::LocalUniform => "local-uniform",
            Strategy::LocalPreferential => "local-preferential",
            Strategy::GlobalUniform => "global-uniform",
            Strategy::StaticLattice => "static-lattice",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local-uniform" => Ok(Strategy::LocalUniform),
            "local-preferential" => Ok(Strategy::LocalPreferential),
            "global-uniform" => Ok(Strategy::GlobalUniform),
            "static-lattice" => Ok(Strategy::StaticLattice),
            other => Err(Error::Parameter(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Full parameter set of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    /// Target average degree; the edge count is `round(n * avg_degree / 2)`.
    /// Ignored by the static lattice (degree is 4 there by construction).
    pub avg_degree: f64,
    pub f: usize,
    pub q: u32,
    pub strategy: Strategy,
    pub max_steps: u64,
    /// Steps without an imitation, with no partially-overlapping edge left,
    /// after which the run is declared stalled.
    pub quiescence_window: u64,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(n: usize, avg_degree: f64, f: usize, q: u32, strategy: Strategy, seed: u64) -> Self {
        ModelConfig {
            n,
            avg_degree,
            f,
            q,
            strategy,
            max_steps: default_max_steps(n),
            quiescence_window: default_quiescence_window(n, f),
            seed,
        }
    }

    /// `M = round(N * <k> / 2)`.
    pub fn edge_target(&self) -> usize {
        (self.n as f64 * self.avg_degree / 2.0).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter("n must be >= 2".into()));
        }
        if self.f < 1 {
            return Err(Error::Parameter("f must be >= 1".into()));
        }
        if self.q < 1 {
            return Err(Error::Parameter("q must be >= 1".into()));
        }
        if self.max_steps < 1 {
            return Err(Error::Parameter("max_steps must be >= 1".into()));
        }
        if self.strategy == Strategy::StaticLattice {
            let side = (self.n as f64).sqrt().round() as usize;
            if side * side != self.n || side < 3 {
                return Err(Error::Parameter(format!(
                    "static-lattice requires n to be a perfect square >= 9, got {}",
                    self.n
                )));
            }
        } else {
            if !(self.avg_degree > 0.0) {
                return Err(Error::Parameter("avg_degree must be positive".into()));
            }
            let max = self.n * (self.n - 1) / 2;
            let m = self.edge_target();
            if m < 1 || m > max {
                return Err(Error::Parameter(format!(
                    "edge target {m} out of range [1, {max}]"
                )));
            }
        }
        Ok(())
    }
}

pub fn default_max_steps(n: usize) -> u64 {
    (5_000_000.0 * n as f64 / 100.0).ceil() as u64
}

pub fn default_quiescence_window(n: usize, f: usize) -> u64 {
    (10 * n * f) as u64
}

/// Per-node trait vectors, row-major, entries in `{1..q}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMatrix {
    data: Vec<u32>,
    f: usize,
}

impl StateMatrix {
    /// Every entry i.i.d. uniform on `{1..q}`.
    pub fn init(n: usize, f: usize, q: u32, rng: &mut impl Rng) -> Self {
        let data = (0..n * f).map(|_| rng.gen_range(1..=q)).collect();
        StateMatrix { data, f }
    }

    pub fn from_rows(rows: Vec<Vec<u32>>, f: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * f);
        for row in &rows {
            assert_eq!(row.len(), f);
            data.extend_from_slice(row);
        }
        StateMatrix { data, f }
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.f
    }

    pub fn trait_count(&self) -> usize {
        self.f
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.f..(i + 1) * self.f]
    }

    pub fn set(&mut self, i: usize, t: usize, value: u32) {
        self.data[i * self.f + t] = value;
    }

    /// CSV dump: `node,trait1,...,traitF`, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node");
        for t in 1..=self.f {
            out.push_str(&format!(",trait{t}"));
        }
        out.push('\n');
        for i in 0..self.node_count() {
            out.push_str(&i.to_string());
            for &v in self.row(i) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format produced by [`StateMatrix::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("states file is empty".into()))?;
        let f = header.split(',').count().saturating_sub(1);
        if f == 0 || !header.starts_with("node,") {
            return Err(Error::Parse("states header must be `node,trait1,...`".into()));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != f + 1 {
                return Err(Error::Parse(format!(
                    "states line {}: expected {} fields",
                    lineno + 2,
                    f + 1
                )));
            }
            let node: usize = fields[0].parse().map_err(|_| {
                Error::Parse(format!("states line {}: bad node id", lineno + 2))
            })?;
            if node != rows.len() {
                return Err(Error::Parse(format!(
                    "states line {}: node ids must be 0,1,2,...",
                    lineno + 2
                )));
            }
            let row: Vec<u32> = fields[1..]
                .iter()
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| {
                    Error::Parse(format!("states line {}: non-numeric trait", lineno + 2))
                })?;
            rows.push(row);
        }
        Ok(StateMatrix::from_rows(rows, f))
    }
}

/// Number of positions on which two trait vectors agree.
pub fn overlap(a: &[u32], b: &[u32]) -> usize {
    assert_eq!(a.len(), b.len(), "trait vector length mismatch");
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Copies one differing trait of `j` onto `i`, chosen uniformly among the
/// differing positions. Returns the trait index. The caller must have
/// established `0 < overlap < F`.
pub fn imitate(states: &mut StateMatrix, i: usize, j: usize, rng: &mut impl Rng) -> usize {
    let diff: Vec<usize> = (0..states.trait_count())
        .filter(|&t| states.row(i)[t] != states.row(j)[t])
        .collect();
    assert!(!diff.is_empty(), "imitate called with full overlap");
    assert!(
        diff.len() < states.trait_count(),
        "imitate called with zero overlap"
    );
    let t = diff[rng.gen_range(0..diff.len())];
    let v = states.row(j)[t];
    states.set(i, t, v);
    t
}

/// Picks the new endpoint for a zero-overlap edge `(i, j)`, or `None` when
/// the candidate set is empty. Candidates are computed on the graph before
/// the edge is deleted; `j` is never a candidate.
pub fn select_rewire_target(
    g: &Graph,
    i: usize,
    _j: usize,
    strategy: Strategy,
    rng: &mut impl Rng,
) -> Option<usize> {
    match strategy {
        Strategy::StaticLattice => None,
        Strategy::LocalUniform => {
            let cands = g.distance_two_set(i);
            if cands.is_empty() {
                None
            } else {
                Some(cands[rng.gen_range(0..cands.len())])
            }
        }
        Strategy::LocalPreferential => {
            let cands = g.distance_two_set(i);
            if cands.is_empty() {
                return None;
            }
            // cumulative (k+1)^2 weights, exact integer arithmetic
            let weights: Vec<u64> = cands
                .iter()
                .map(|&l| {
                    let k = g.degree(l) as u64 + 1;
                    k * k
                })
                .collect();
            let total: u64 = weights.iter().sum();
            let mut pick = rng.gen_range(0..total);
            for (l, w) in cands.iter().zip(&weights) {
                if pick < *w {
                    return Some(*l);
                }
                pick -= w;
            }
            unreachable!()
        }
        Strategy::GlobalUniform => {
            let cands: Vec<usize> = (0..g.node_count())
                .filter(|&l| l != i && !g.has_edge(i, l))
                .collect();
            if cands.is_empty() {
                None
            } else {
                Some(cands[rng.gen_range(0..cands.len())])
            }
        }
    }
}

/// What a single update attempt did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    NoOp,
    Imitation {
        active: usize,
        partner: usize,
        trait_index: usize,
    },
    Rewired {
        active: usize,
        old_partner: usize,
        new_neighbor: usize,
    },
    RewireSkipped {
        active: usize,
        partner: usize,
    },
}

/// One asynchronous update attempt.
///
/// The active node is drawn uniformly from all `N` nodes; drawing an
/// isolated node is a no-op that still consumes the step.
pub fn step(
    g: &mut Graph,
    states: &mut StateMatrix,
    cfg: &ModelConfig,
    rng: &mut impl Rng,
) -> Result<StepOutcome> {
    if g.edge_count() == 0 {
        return Err(Error::Parameter("dynamics undefined on an edgeless graph".into()));
    }
    let i = rng.gen_range(0..g.node_count());
    if g.degree(i) == 0 {
        return Ok(StepOutcome::NoOp);
    }
    let j = g.neighbors(i)[rng.gen_range(0..g.degree(i))];
    let m = overlap(states.row(i), states.row(j));
    let f = states.trait_count();
    if m == f {
        return Ok(StepOutcome::NoOp);
    }
    if m == 0 {
        return Ok(match select_rewire_target(g, i, j, cfg.strategy, rng) {
            Some(l) => {
                g.rewire(i, j, l);
                StepOutcome::Rewired {
                    active: i,
                    old_partner: j,
                    new_neighbor: l,
                }
            }
            None => StepOutcome::RewireSkipped {
                active: i,
                partner: j,
            },
        });
    }
    // positive interaction with probability m/F, exact rational coin
    if rng.gen_range(0..f) < m {
        let t = imitate(states, i, j, rng);
        Ok(StepOutcome::Imitation {
            active: i,
            partner: j,
            trait_index: t,
        })
    } else {
        Ok(StepOutcome::NoOp)
    }
}

/// True iff every edge connects identical trait vectors: the strictly
/// absorbing state. Zero-overlap edges keep rewiring, so they block
/// quiescence.
pub fn is_quiescent(g: &Graph, states: &StateMatrix) -> bool {
    g.edges()
        .all(|(u, v)| overlap(states.row(u), states.row(v)) == states.trait_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Every edge connects identical vectors; no step can change anything.
    Frozen,
    /// No trait change possible, but zero-overlap edges keep rewiring.
    Stalled,
    /// Step budget exhausted.
    Budget,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Frozen => "frozen",
            StopReason::Stalled => "stalled",
            StopReason::Budget => "budget",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub graph: Graph,
    pub states: StateMatrix,
    pub steps: u64,
    pub stop_reason: StopReason,
}

impl RunResult {
    /// Run manifest: all config fields plus outcome, `key=value` per line.
    pub fn manifest(&self, cfg: &ModelConfig) -> String {
        format!(
            "n={}\navg_degree={}\nf={}\nq={}\nstrategy={}\nmax_steps={}\nquiescence_window={}\nseed={}\nstop_reason={}\nsteps_executed={}\n",
            cfg.n,
            cfg.avg_degree,
            cfg.f,
            cfg.q,
            cfg.strategy,
            cfg.max_steps,
            cfg.quiescence_window,
            cfg.seed,
            self.stop_reason,
            self.steps
        )
    }
}

/// Scans all edges once; returns (any edge with 0 < m < F, any edge with m = 0).
fn edge_overlap_scan(g: &Graph, states: &StateMatrix) -> (bool, bool) {
    let f = states.trait_count();
    let mut has_mid = false;
    let mut has_zero = false;
    for (u, v) in g.edges() {
        let m = overlap(states.row(u), states.row(v));
        if m == 0 {
            has_zero = true;
        } else if m < f {
            has_mid = true;
        }
        if has_mid && has_zero {
            break;
        }
    }
    (has_mid, has_zero)
}

/// Runs one realization from scratch: builds the initial graph and states
/// from `cfg.seed` and iterates [`step`] until frozen, stalled, or out of
/// budget.
pub fn run(cfg: &ModelConfig) -> Result<RunResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut g = match cfg.strategy {
        Strategy::StaticLattice => Graph::lattice((cfg.n as f64).sqrt().round() as usize)?,
        _ => Graph::random(cfg.n, cfg.edge_target(), &mut rng)?,
    };
    let mut states = StateMatrix::init(cfg.n, cfg.f, cfg.q, &mut rng);

    // Stop conditions are checked by a full edge scan every `n` steps;
    // the scan at step 0 catches configurations that are frozen at start.
    let scan_interval = cfg.n as u64;
    let mut steps = 0u64;
    let mut since_imitation = 0u64;
    loop {
        if steps % scan_interval == 0 {
            let (has_mid, has_zero) = edge_overlap_scan(&g, &states);
            if !has_mid && !has_zero {
                return Ok(RunResult {
                    graph: g,
                    states,
                    steps,
                    stop_reason: StopReason::Frozen,
                });
            }
            if !has_mid && since_imitation >= cfg.quiescence_window {
                return Ok(RunResult {
                    graph: g,
                    states,
                    steps,
                    stop_reason: StopReason::Stalled,
                });
            }
        }
        if steps >= cfg.max_steps {
            return Ok(RunResult {
                graph: g,
                states,
                steps,
                stop_reason: StopReason::Budget,
            });
        }
        match step(&mut g, &mut states, cfg, &mut rng)? {
            StepOutcome::Imitation { .. } => since_imitation = 0,
            _ => since_imitation += 1,
        }
        steps += 1;
    }
}
