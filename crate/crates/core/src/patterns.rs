//! Frequency-time hopping patterns on an `m x n` discovery frame.
//!
//! A pattern assigns each logical resource `s` a coordinate `(i(t), j(t))`
//! per discovery frame `t`: `i` is the frequency channel in `Z/mZ`, `j` the
//! subframe in `Z/nZ`. Three kinds are provided:
//!
//! * **Random** – i.i.d. uniform over `I x J`, keyed by `(seed, s, t)`.
//! * **QC** – `i(t) = i0 + k t mod m`,
//!   `j(t) = j0 + (i0 mod n) t + floor(i0/n) t^2 mod n`.
//! * **New** – `n = p` prime, `i(t) = i0 + k t mod m`,
//!   `j(t) = j0 + digits_p(i0) . b(t) mod p`, where `b(t)` walks the
//!   nonzero vectors of `GF(p)^r` through powers of the companion matrix of a
//!   primitive `f`.
//!
//! A [`PatternSpec`] is the declarative description; [`PatternSpec::build`]
//! validates it and yields an evaluable [`HoppingPattern`].

use thiserror::Error;

use crate::ff_linalg::{BSequence, FpVec, LinalgError};
use crate::ff_poly::{min_exponent, FpPoly, PolyError, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("frame dimensions must be >= 1 (got m={m}, n={n})")]
    InvalidFrame { m: u64, n: u64 },
    #[error("resource {s} out of range (frame has {count} resources)")]
    ResourceOutOfRange { s: u64, count: u64 },
    #[error("initial map is not a permutation of {count} cells: {reason}")]
    NotPermutation { count: usize, reason: String },
    #[error("the new pattern needs a prime number of subframes (n={0})")]
    SubframesNotPrime(u64),
    #[error("f must be monic of degree {expected} for m={m}, p={p} (got degree {got})")]
    WrongDegree {
        expected: u32,
        got: usize,
        m: u64,
        p: u64,
    },
    #[error("f and b must be over GF({n}), got GF({got})")]
    FieldMismatch { n: u64, got: u64 },
    #[error("digit value {value} does not fit in {r} base-{p} digits")]
    DigitOverflow { value: u64, p: u64, r: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The `m x n` discovery grid: `m` frequency channels, `n` subframes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameStructure {
    m: u32,
    n: u32,
}

impl FrameStructure {
    pub fn new(m: u32, n: u32) -> Result<Self, PatternError> {
        if m == 0 || n == 0 {
            return Err(PatternError::InvalidFrame {
                m: m as u64,
                n: n as u64,
            });
        }
        Ok(FrameStructure { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `m * n`.
    pub fn resources(&self) -> usize {
        self.m as usize * self.n as usize
    }

    pub fn resource(&self, s: usize) -> Result<LogicalResource, PatternError> {
        if s < self.resources() {
            Ok(LogicalResource(s))
        } else {
            Err(PatternError::ResourceOutOfRange {
                s: s as u64,
                count: self.resources() as u64,
            })
        }
    }
}

/// Index of a logical discovery resource, `0 <= s < m n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalResource(usize);

impl LogicalResource {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A frequency-time coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub i: u32,
    pub j: u32,
}

/// Bijection `S -> Z/mZ x Z/nZ` giving each resource its frame-0 coordinate.
///
/// Stored as a cell table: resource `s` starts at cell `c = i*n + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InitialMap {
    cells: Vec<u32>,
}

impl InitialMap {
    /// `s -> (floor(s/n), s mod n)`.
    pub fn row_major(frame: FrameStructure) -> Self {
        InitialMap {
            cells: (0..frame.resources() as u32).collect(),
        }
    }

    /// `cells[s]` is the starting cell index `i*n + j` of resource `s`.
    pub fn from_cells(frame: FrameStructure, cells: Vec<u32>) -> Result<Self, PatternError> {
        let count = frame.resources();
        if cells.len() != count {
            return Err(PatternError::NotPermutation {
                count,
                reason: format!("expected {count} entries, got {}", cells.len()),
            });
        }
        let mut seen = vec![false; count];
        for &c in &cells {
            let slot = seen
                .get_mut(c as usize)
                .ok_or_else(|| PatternError::NotPermutation {
                    count,
                    reason: format!("cell {c} out of range"),
                })?;
            if *slot {
                return Err(PatternError::NotPermutation {
                    count,
                    reason: format!("cell {c} used twice"),
                });
            }
            *slot = true;
        }
        Ok(InitialMap { cells })
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn coord(&self, frame: FrameStructure, s: usize) -> Coord {
        let c = self.cells[s];
        Coord {
            i: c / frame.n,
            j: c % frame.n,
        }
    }

    /// Resource starting at `(i, j)`.
    pub fn resource_at(&self, frame: FrameStructure, at: Coord) -> Option<usize> {
        let want = at.i * frame.n + at.j;
        self.cells.iter().position(|&c| c == want)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternKind {
    Random { seed: u64 },
    Qc { k: i64 },
    New { k: i64, f: FpPoly, b: FpVec },
}

impl PatternKind {
    pub fn name(&self) -> &'static str {
        match self {
            PatternKind::Random { .. } => "random",
            PatternKind::Qc { .. } => "qc",
            PatternKind::New { .. } => "new",
        }
    }
}

/// Declarative pattern description. The initial map is ignored by Random.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSpec {
    pub frame: FrameStructure,
    pub kind: PatternKind,
    pub init: InitialMap,
}

impl PatternSpec {
    pub fn new(frame: FrameStructure, kind: PatternKind) -> Self {
        PatternSpec {
            frame,
            kind,
            init: InitialMap::row_major(frame),
        }
    }

    pub fn with_init(mut self, init: InitialMap) -> Self {
        self.init = init;
        self
    }

    pub fn random(frame: FrameStructure, seed: u64) -> Self {
        Self::new(frame, PatternKind::Random { seed })
    }

    pub fn qc(frame: FrameStructure, k: i64) -> Self {
        Self::new(frame, PatternKind::Qc { k })
    }

    /// New pattern with `b = (1, 0, ..., 0)`.
    pub fn new_pattern(frame: FrameStructure, k: i64, f: FpPoly) -> Result<Self, PatternError> {
        let r = f.degree().unwrap_or(0).max(1);
        let b = FpVec::unit(f.field(), r)?;
        Ok(Self::new(frame, PatternKind::New { k, f, b }))
    }

    pub fn build(&self) -> Result<HoppingPattern, PatternError> {
        HoppingPattern::new(self.clone())
    }
}

/// `r` base-`p` digits of `value`, least significant first, zero padded.
pub fn digits(value: u64, p: Prime, r: u32) -> Result<Vec<u64>, PatternError> {
    let pv = p.get();
    let bound = p.checked_pow(r);
    if bound.is_some_and(|b| value >= b) {
        return Err(PatternError::DigitOverflow { value, p: pv, r });
    }
    let mut rest = value;
    Ok((0..r)
        .map(|_| {
            let d = rest % pv;
            rest /= pv;
            d
        })
        .collect())
}

/// Above this many `b(t)` entries per period, evaluation falls back to
/// random access through matrix powers.
const B_TABLE_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone)]
enum Eval {
    Random {
        seed: u64,
    },
    Qc {
        k: i64,
        /// `(i0 mod n, floor(i0/n) mod n)` per resource
        coef: Vec<(u64, u64)>,
    },
    New {
        k: i64,
        p: Prime,
        r: usize,
        /// digits of `i0`, `r` per resource
        digits: Vec<u64>,
        seq: BSequence,
        table: Option<Vec<u64>>,
    },
}

/// A validated, evaluable hopping pattern.
#[derive(Debug, Clone)]
pub struct HoppingPattern {
    spec: PatternSpec,
    start: Vec<Coord>,
    eval: Eval,
}

impl HoppingPattern {
    pub fn new(spec: PatternSpec) -> Result<Self, PatternError> {
        let frame = spec.frame;
        // re-validate in case the fields were assembled by hand
        let init = InitialMap::from_cells(frame, spec.init.cells.clone())?;
        let start: Vec<Coord> = (0..frame.resources())
            .map(|s| init.coord(frame, s))
            .collect();
        let n = frame.n as u64;
        let eval = match &spec.kind {
            PatternKind::Random { seed } => Eval::Random { seed: *seed },
            PatternKind::Qc { k } => Eval::Qc {
                k: *k,
                coef: start
                    .iter()
                    .map(|c| (c.i as u64 % n, (c.i as u64 / n) % n))
                    .collect(),
            },
            PatternKind::New { k, f, b } => {
                let p = Prime::new(n).map_err(|_| PatternError::SubframesNotPrime(n))?;
                if f.field() != p {
                    return Err(PatternError::FieldMismatch {
                        n,
                        got: f.field().get(),
                    });
                }
                if b.field() != p {
                    return Err(PatternError::FieldMismatch {
                        n,
                        got: b.field().get(),
                    });
                }
                let expected = min_exponent(n, frame.m as u64)?.max(1);
                let got = f.degree().unwrap_or(0);
                if got != expected as usize || !f.is_monic() {
                    return Err(PatternError::WrongDegree {
                        expected,
                        got,
                        m: frame.m as u64,
                        p: n,
                    });
                }
                let seq = BSequence::new(f, b, true)?;
                let r = expected as usize;
                let mut digit_table = Vec::with_capacity(start.len() * r);
                for c in &start {
                    digit_table.extend(digits(c.i as u64, p, expected)?);
                }
                let table = (seq.period().saturating_mul(r as u64) <= B_TABLE_LIMIT)
                    .then(|| seq.period_table());
                Eval::New {
                    k: *k,
                    p,
                    r,
                    digits: digit_table,
                    seq,
                    table,
                }
            }
        };
        Ok(HoppingPattern { spec, start, eval })
    }

    pub fn spec(&self) -> &PatternSpec {
        &self.spec
    }

    pub fn frame(&self) -> FrameStructure {
        self.spec.frame
    }

    pub fn resources(&self) -> usize {
        self.spec.frame.resources()
    }

    pub fn is_random(&self) -> bool {
        matches!(self.eval, Eval::Random { .. })
    }

    /// Period of every `j(t)(s)` sequence: `n` for QC, `p^r` for New, `None`
    /// for Random.
    pub fn j_period(&self) -> Option<u64> {
        match &self.eval {
            Eval::Random { .. } => None,
            Eval::Qc { .. } => Some(self.spec.frame.n as u64),
            Eval::New { seq, .. } => Some(seq.period()),
        }
    }

    /// Frame-0 coordinate of resource `s` (Random ignores it).
    pub fn start(&self, s: usize) -> Coord {
        self.start[s]
    }

    pub fn coords(&self, s: LogicalResource, t: i64) -> Coord {
        self.coords_raw(s.0, t)
    }

    /// Like [`coords`](Self::coords) with an unchecked index; panics when
    /// `s >= m n`.
    pub fn coords_raw(&self, s: usize, t: i64) -> Coord {
        let frame = self.spec.frame;
        match &self.eval {
            Eval::Random { seed } => {
                let cell = uniform_below(keyed_u64(*seed, s as u64, t), frame.resources() as u64);
                Coord {
                    i: (cell / frame.n as u64) as u32,
                    j: (cell % frame.n as u64) as u32,
                }
            }
            Eval::Qc { k, .. } | Eval::New { k, .. } => Coord {
                i: self.hop_i(s, *k, t),
                j: self.j_raw(s, t),
            },
        }
    }

    fn hop_i(&self, s: usize, k: i64, t: i64) -> u32 {
        let m = self.spec.frame.m as i128;
        (self.start[s].i as i128 + k as i128 * t as i128).rem_euclid(m) as u32
    }

    /// Subframe of resource `s` at frame `t`.
    pub fn j_raw(&self, s: usize, t: i64) -> u32 {
        let n = self.spec.frame.n as u64;
        match &self.eval {
            Eval::Random { .. } => self.coords_raw(s, t).j,
            Eval::Qc { coef, .. } => {
                let tt = (t as i128).rem_euclid(n as i128) as u64;
                let (lin, quad) = coef[s];
                let j0 = self.start[s].j as u64;
                ((j0 + lin * tt + quad * (tt * tt % n)) % n) as u32
            }
            Eval::New {
                p,
                r,
                digits,
                seq,
                table,
                ..
            } => {
                let alpha = &digits[s * r..(s + 1) * r];
                let phase = (t as i128).rem_euclid(seq.period() as i128) as usize;
                let dot = match table {
                    Some(tab) => dot_mod(*p, alpha, &tab[phase * r..(phase + 1) * r]),
                    None => dot_mod(*p, alpha, seq.at(phase as i64).entries()),
                };
                ((self.start[s].j as u64 + dot) % p.get()) as u32
            }
        }
    }

    /// `j(t)(s)` for every resource, indexed by `s`.
    pub fn j_column(&self, t: i64) -> Vec<u32> {
        (0..self.resources()).map(|s| self.j_raw(s, t)).collect()
    }

    /// Resources grouped by subframe at frame `t`.
    pub fn collision_partition(&self, t: i64) -> Partition {
        Partition::from_labels(&self.j_column(t))
    }
}

fn dot_mod(p: Prime, a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| p.add(acc, p.mul(x, y)))
}

/// A partition of the resource set, canonical: each group ascending, groups
/// ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition(Vec<Vec<usize>>);

impl Partition {
    pub fn from_labels(labels: &[u32]) -> Self {
        let canon = canonical_labels(labels);
        let groups = canon.iter().copied().max().map_or(0, |g| g as usize + 1);
        let mut out = vec![Vec::new(); groups];
        for (s, &g) in canon.iter().enumerate() {
            out[g as usize].push(s);
        }
        Partition(out)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.0
    }
}

/// Relabels so that groups are numbered by first appearance. Two label
/// vectors induce the same partition iff their canonical forms are equal.
pub fn canonical_labels(labels: &[u32]) -> Vec<u32> {
    let width = labels.iter().copied().max().map_or(0, |v| v as usize + 1);
    let mut map = vec![u32::MAX; width];
    let mut next = 0u32;
    labels
        .iter()
        .map(|&l| {
            let slot = &mut map[l as usize];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect()
}

// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Counter-based draw keyed by `(seed, s, t)`: the same key always yields
/// the same word regardless of evaluation order.
pub fn keyed_u64(seed: u64, s: u64, t: i64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ s.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    mix64(
        h ^ (t as u64)
            .wrapping_mul(0xd1b5_4a32_d192_ed03)
            .wrapping_add(GOLDEN),
    )
}

/// Maps a uniform 64-bit word onto `[0, bound)` by multiply-shift. The
/// relative bias of any outcome is at most `bound / 2^64`, below `2^-32`
/// whenever `bound < 2^32`.
#[inline]
pub fn uniform_below(word: u64, bound: u64) -> u64 {
    ((word as u128 * bound as u128) >> 64) as u64
}
