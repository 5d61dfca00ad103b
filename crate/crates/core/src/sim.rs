//! Half-duplex D2D discovery simulation.
//!
//! UEs are dropped uniformly in a grid of pointy-top hexagonal cells, each
//! takes a distinct logical resource, and every discovery frame each UE
//! transmits on its pattern coordinate `(i(t), j(t))`. A receiver cannot hear
//! anyone transmitting in its own subframe. Beyond that a link closes either
//! by distance ([`LinkMode::Ideal`]) or by SINR against co-subframe
//! transmitters leaking across channels ([`LinkMode::Sinr`]).
//!
//! No fast fading is modelled: link outcomes depend only on who shares a
//! subframe (and on which channels), so once the collision partition repeats
//! no new discoveries happen.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::patterns::{HoppingPattern, LogicalResource, PatternError, PatternSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{ues} UEs need distinct resources but the frame has only {resources}")]
    TooManyUes { ues: u64, resources: u64 },
    #[error("invalid simulation parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("UE {0} reuses a resource already taken")]
    DuplicateResource(usize),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMode {
    /// Link closes iff the pair is within `radius` meters.
    Ideal,
    /// Link closes iff SINR meets the threshold.
    Sinr,
}

/// `PL(d) = reference_loss_db + 10 * exponent * log10(d) + offset_db`, with
/// `d` clamped to at least 1 m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub exponent: f64,
    pub reference_loss_db: f64,
    pub offset_db: f64,
}

impl Default for PathLoss {
    fn default() -> Self {
        PathLoss {
            exponent: 3.0,
            reference_loss_db: 40.0,
            offset_db: -5.0,
        }
    }
}

impl PathLoss {
    pub fn loss_db(&self, distance_m: f64) -> f64 {
        self.reference_loss_db + 10.0 * self.exponent * distance_m.max(1.0).log10() + self.offset_db
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub cells: u32,
    /// Cells per hex-grid row; rows are filled in order.
    pub grid_cols: u32,
    /// Inter-site distance in meters.
    pub isd: f64,
    pub ues_per_cell: u32,
    pub pattern: PatternSpec,
    pub pathloss: PathLoss,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub sinr_threshold_db: f64,
    /// In-band emission attenuation per channel of separation, in dB.
    pub ibe_attenuation_db: f64,
    pub mode: LinkMode,
    /// Link range for [`LinkMode::Ideal`], meters (may be infinite).
    pub radius: f64,
    pub frames: u64,
    pub seed: u64,
}

impl SimConfig {
    /// 7x3 cells, 500 m ISD, 23 UEs per cell, ideal links of unlimited range.
    pub fn with_pattern(pattern: PatternSpec) -> Self {
        SimConfig {
            cells: 21,
            grid_cols: 7,
            isd: 500.0,
            ues_per_cell: 23,
            pattern,
            pathloss: PathLoss::default(),
            tx_power_dbm: 23.0,
            noise_dbm: -110.0,
            sinr_threshold_db: 0.0,
            ibe_attenuation_db: 3.0,
            mode: LinkMode::Ideal,
            radius: f64::INFINITY,
            frames: 150,
            seed: 1,
        }
    }

    pub fn total_ues(&self) -> u64 {
        self.cells as u64 * self.ues_per_cell as u64
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |name: &'static str, reason: &str| {
            Err(SimError::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.cells == 0 {
            return bad("cells", "must be >= 1");
        }
        if self.grid_cols == 0 {
            return bad("grid_cols", "must be >= 1");
        }
        if !(self.isd.is_finite() && self.isd > 0.0) {
            return bad("isd", "must be finite and > 0");
        }
        if self.frames == 0 {
            return bad("frames", "must be >= 1");
        }
        if self.radius.is_nan() || self.radius < 0.0 {
            return bad("radius", "must be >= 0");
        }
        let finite = [
            ("pathloss_exponent", self.pathloss.exponent),
            ("reference_loss_db", self.pathloss.reference_loss_db),
            ("offset_db", self.pathloss.offset_db),
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_dbm", self.noise_dbm),
            ("sinr_threshold_db", self.sinr_threshold_db),
            ("ibe_attenuation_db", self.ibe_attenuation_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        let resources = self.pattern.frame.resources() as u64;
        if self.total_ues() > resources {
            return Err(SimError::TooManyUes {
                ues: self.total_ues(),
                resources,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub id: usize,
    pub cell: u32,
    pub position: (f64, f64),
    pub resource: LogicalResource,
}

/// Center of cell `index` in a pointy-top hex grid with `cols` cells per row;
/// odd rows are shifted right by half a spacing.
pub fn cell_center(index: u32, cols: u32, isd: f64) -> (f64, f64) {
    let row = index / cols;
    let col = index % cols;
    let circumradius = isd / 3f64.sqrt();
    let shift = if row % 2 == 1 { isd / 2.0 } else { 0.0 };
    (col as f64 * isd + shift, row as f64 * 1.5 * circumradius)
}

/// Whether `offset` (relative to the center) lies in the pointy-top hexagon
/// with the given circumradius.
pub fn in_hexagon(offset: (f64, f64), circumradius: f64) -> bool {
    let (x, y) = (offset.0.abs(), offset.1.abs());
    let half_width = circumradius * 3f64.sqrt() / 2.0;
    x <= half_width && y <= circumradius - x / 3f64.sqrt()
}

/// Uniform drop in every cell plus a seeded resource permutation.
pub fn drop_ues(config: &SimConfig) -> Result<Vec<Ue>, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let circumradius = config.isd / 3f64.sqrt();
    let half_width = circumradius * 3f64.sqrt() / 2.0;
    let mut resources: Vec<usize> = (0..config.pattern.frame.resources()).collect();
    resources.shuffle(&mut rng);
    let mut ues = Vec::with_capacity(config.total_ues() as usize);
    for cell in 0..config.cells {
        let center = cell_center(cell, config.grid_cols, config.isd);
        for _ in 0..config.ues_per_cell {
            let offset = loop {
                let candidate = (
                    rng.gen_range(-half_width..=half_width),
                    rng.gen_range(-circumradius..=circumradius),
                );
                if in_hexagon(candidate, circumradius) {
                    break candidate;
                }
            };
            let id = ues.len();
            ues.push(Ue {
                id,
                cell,
                position: (center.0 + offset.0, center.1 + offset.1),
                resource: config.pattern.frame.resource(resources[id])?,
            });
        }
    }
    Ok(ues)
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Per-frame and final discovery statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub ue_count: usize,
    /// Ordered (receiver, transmitter) pairs first discovered at each frame.
    pub new_pairs: Vec<u64>,
    /// Running total of `new_pairs`.
    pub cumulative_pairs: Vec<u64>,
    /// Number of UEs each UE has discovered after the last frame.
    pub final_discovered: Vec<u32>,
}

impl SimResult {
    /// Mean number of UEs discovered per UE after frame `t`.
    pub fn cum_mean(&self, t: usize) -> f64 {
        if self.ue_count == 0 {
            0.0
        } else {
            self.cumulative_pairs[t] as f64 / self.ue_count as f64
        }
    }
}

/// Stateful discovery simulation over a fixed set of UEs.
pub struct Simulation {
    config: SimConfig,
    pattern: HoppingPattern,
    ues: Vec<Ue>,
    /// IDEAL: in range. Row = receiver, column = transmitter.
    in_range: Vec<bool>,
    /// SINR: received power in mW.
    rx_mw: Vec<f64>,
    /// attenuation factor by channel separation
    ibe: Vec<f64>,
    noise_mw: f64,
    threshold: f64,
    discovered: Vec<bool>,
    per_ue: Vec<u32>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        let ues = drop_ues(&config)?;
        Self::with_ues(config, ues)
    }

    /// Uses the given UEs instead of a random drop.
    pub fn with_ues(config: SimConfig, ues: Vec<Ue>) -> Result<Self, SimError> {
        config.validate()?;
        let pattern = config.pattern.build()?;
        let mut taken = vec![false; pattern.resources()];
        for (k, ue) in ues.iter().enumerate() {
            let slot = &mut taken[ue.resource.index()];
            if *slot {
                return Err(SimError::DuplicateResource(k));
            }
            *slot = true;
        }
        let n = ues.len();
        let mut in_range = Vec::new();
        let mut rx_mw = Vec::new();
        match config.mode {
            LinkMode::Ideal => {
                in_range = vec![false; n * n];
                for r in 0..n {
                    for u in 0..n {
                        in_range[r * n + u] =
                            r != u && distance(ues[r].position, ues[u].position) <= config.radius;
                    }
                }
            }
            LinkMode::Sinr => {
                rx_mw = vec![0.0; n * n];
                for r in 0..n {
                    for u in 0..n {
                        if r != u {
                            let d = distance(ues[r].position, ues[u].position);
                            rx_mw[r * n + u] =
                                db_to_linear(config.tx_power_dbm - config.pathloss.loss_db(d));
                        }
                    }
                }
            }
        }
        let m = pattern.frame().m() as usize;
        let ibe = (0..m)
            .map(|sep| db_to_linear(-config.ibe_attenuation_db * sep as f64))
            .collect();
        Ok(Simulation {
            noise_mw: db_to_linear(config.noise_dbm),
            threshold: db_to_linear(config.sinr_threshold_db),
            config,
            pattern,
            discovered: vec![false; n * n],
            per_ue: vec![0; n],
            in_range,
            rx_mw,
            ibe,
            ues,
        })
    }

    pub fn ues(&self) -> &[Ue] {
        &self.ues
    }

    pub fn pattern(&self) -> &HoppingPattern {
        &self.pattern
    }

    pub fn is_discovered(&self, receiver: usize, transmitter: usize) -> bool {
        self.discovered[receiver * self.ues.len() + transmitter]
    }

    /// Advances one discovery frame and returns the newly discovered ordered
    /// `(receiver, transmitter)` pairs, ascending.
    pub fn step_frame(&mut self, t: i64) -> Vec<(usize, usize)> {
        let n = self.ues.len();
        let coords: Vec<_> = self
            .ues
            .iter()
            .map(|ue| self.pattern.coords(ue.resource, t))
            .collect();
        let subframes = self.pattern.frame().n() as usize;
        let mut by_subframe: Vec<Vec<usize>> = vec![Vec::new(); subframes];
        for (k, c) in coords.iter().enumerate() {
            by_subframe[c.j as usize].push(k);
        }
        let mut found = Vec::new();
        for r in 0..n {
            let jr = coords[r].j as usize;
            for (j, group) in by_subframe.iter().enumerate() {
                if j == jr {
                    continue;
                }
                for &u in group {
                    if self.discovered[r * n + u] {
                        continue;
                    }
                    let hears = match self.config.mode {
                        LinkMode::Ideal => self.in_range[r * n + u],
                        LinkMode::Sinr => {
                            let iu = coords[u].i;
                            let interference: f64 = group
                                .iter()
                                .filter(|&&v| v != u)
                                .map(|&v| {
                                    let sep = coords[v].i.abs_diff(iu) as usize;
                                    self.rx_mw[r * n + v] * self.ibe[sep]
                                })
                                .sum();
                            self.rx_mw[r * n + u] >= self.threshold * (self.noise_mw + interference)
                        }
                    };
                    if hears {
                        found.push((r, u));
                    }
                }
            }
        }
        found.sort_unstable();
        for &(r, u) in &found {
            self.discovered[r * n + u] = true;
            self.per_ue[r] += 1;
        }
        found
    }

    /// Runs frames `0..frames` from the current state.
    pub fn run_frames(&mut self, frames: u64) -> SimResult {
        let mut new_pairs = Vec::with_capacity(frames as usize);
        let mut cumulative_pairs = Vec::with_capacity(frames as usize);
        let mut total = 0u64;
        for t in 0..frames {
            let fresh = self.step_frame(t as i64).len() as u64;
            total += fresh;
            new_pairs.push(fresh);
            cumulative_pairs.push(total);
        }
        SimResult {
            ue_count: self.ues.len(),
            new_pairs,
            cumulative_pairs,
            final_discovered: self.per_ue.clone(),
        }
    }
}

/// Drops UEs and runs `config.frames` frames.
pub fn run(config: &SimConfig) -> Result<SimResult, SimError> {
    let frames = config.frames;
    Ok(Simulation::new(config.clone())?.run_frames(frames))
}
