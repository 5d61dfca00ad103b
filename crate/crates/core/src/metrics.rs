//! Pattern quality metrics: column period, maximal collision ratio and
//! maximal continual collision number.
//!
//! Deterministic patterns (QC, New) have `j(t)(s)` periodic in `t` with a
//! known period `P`, so every metric reduces to a finite scan over one or two
//! periods and is exact. Random patterns are scanned over a caller-supplied
//! horizon and the results are estimates or capped searches.
//!
//! Pairs are always reported as `(s, s')` with `s < s'`, sorted ascending;
//! the first entry of an offender list is the tie-break winner.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::ff_poly::{is_prime, min_exponent, PolyError};
use crate::patterns::{canonical_labels, HoppingPattern, PatternKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("t_cap must be >= 1")]
    ZeroCap,
    #[error("t_b must be >= 1")]
    ZeroHorizon,
    #[error("exact collision ratio needs a deterministic pattern; use the empirical estimate")]
    NotDeterministic,
    #[error("{pairs} resource pairs exceed the pair-table limit")]
    TooLarge { pairs: u64 },
    #[error("detected column period {detected} disagrees with the algebraic period {algebraic}")]
    PeriodMismatch { detected: u64, algebraic: u64 },
    #[error("j(t + {period}) differs from j(t) for resource {s} at t={t}")]
    NotPeriodic { period: u64, s: usize, t: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A count that may be infinite, or only known to exceed a search budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedCount {
    Finite(u64),
    Infinite,
    /// The search hit its budget (the cap used) without a definite answer.
    ExceedsCap(u64),
}

impl ExtendedCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedCount::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCount::Finite(v) => write!(f, "{v}"),
            ExtendedCount::Infinite => write!(f, "inf"),
            ExtendedCount::ExceedsCap(c) => write!(f, "cap:{c}"),
        }
    }
}

impl FromStr for ExtendedCount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtendedCount::Infinite);
        }
        if let Some(cap) = s.strip_prefix("cap:") {
            return cap
                .parse()
                .map(ExtendedCount::ExceedsCap)
                .map_err(|_| format!("bad cap value `{s}`"));
        }
        s.parse()
            .map(ExtendedCount::Finite)
            .map_err(|_| format!("bad count `{s}`"))
    }
}

/// Largest number of unordered pairs the pair tables will allocate.
const MAX_PAIRS: u64 = 1 << 28;

/// Triangular index of unordered pairs `(a, b)`, `a < b`, ordered
/// lexicographically.
struct PairIndex {
    n: usize,
}

impl PairIndex {
    fn new(n: usize) -> Result<Self, MetricsError> {
        let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
        if pairs > MAX_PAIRS {
            return Err(MetricsError::TooLarge { pairs });
        }
        Ok(PairIndex { n })
    }

    fn len(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    #[inline]
    fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b);
        // pairs before row a: sum_{k<a} (n-1-k)
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    fn pair(&self, mut idx: usize) -> (usize, usize) {
        let mut a = 0;
        loop {
            let row = self.n - 1 - a;
            if idx < row {
                return (a, a + 1 + idx);
            }
            idx -= row;
            a += 1;
        }
    }
}

/// Calls `visit(pair_index)` for every colliding pair at frame `t`.
fn for_each_collision(
    pattern: &HoppingPattern,
    index: &PairIndex,
    t: i64,
    buckets: &mut Vec<Vec<usize>>,
    mut visit: impl FnMut(usize),
) {
    let n = pattern.frame().n() as usize;
    buckets.resize_with(n, Vec::new);
    for b in buckets.iter_mut() {
        b.clear();
    }
    for s in 0..pattern.resources() {
        buckets[pattern.j_raw(s, t) as usize].push(s);
    }
    for bucket in buckets.iter() {
        for (k, &a) in bucket.iter().enumerate() {
            for &b in &bucket[k + 1..] {
                visit(index.index(a, b));
            }
        }
    }
}

/// Collision ratio result: `collisions / horizon` for the worst pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionRatio {
    pub ratio: Ratio<u64>,
    /// Collisions of the worst pair within the horizon.
    pub collisions: u64,
    /// Number of frames counted.
    pub horizon: u64,
    /// `true` when the horizon is a full period of a deterministic pattern.
    pub exact: bool,
    /// Every pair attaining the maximum, ascending.
    pub offenders: Vec<(usize, usize)>,
}

fn collision_counts(
    pattern: &HoppingPattern,
    horizon: u64,
) -> Result<(u64, Vec<(usize, usize)>), MetricsError> {
    let index = PairIndex::new(pattern.resources())?;
    let mut counts = vec![0u32; index.len()];
    let mut buckets = Vec::new();
    for t in 0..horizon {
        for_each_collision(pattern, &index, t as i64, &mut buckets, |k| counts[k] += 1);
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let offenders = if max == 0 {
        Vec::new()
    } else {
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == max)
            .map(|(k, _)| index.pair(k))
            .collect()
    };
    Ok((max as u64, offenders))
}

/// Maximal collision ratio over one full `j`-period of a deterministic
/// pattern, as an exact rational.
pub fn max_collision_ratio_exact(pattern: &HoppingPattern) -> Result<CollisionRatio, MetricsError> {
    let period = pattern.j_period().ok_or(MetricsError::NotDeterministic)?;
    let (collisions, offenders) = collision_counts(pattern, period)?;
    Ok(CollisionRatio {
        ratio: Ratio::new(collisions, period),
        collisions,
        horizon: period,
        exact: true,
        offenders,
    })
}

/// Maximal collision ratio over frames `0..t_b`.
pub fn max_collision_ratio_empirical(
    pattern: &HoppingPattern,
    t_b: u64,
) -> Result<CollisionRatio, MetricsError> {
    if t_b == 0 {
        return Err(MetricsError::ZeroHorizon);
    }
    let (collisions, offenders) = collision_counts(pattern, t_b)?;
    Ok(CollisionRatio {
        ratio: Ratio::new(collisions, t_b),
        collisions,
        horizon: t_b,
        exact: false,
        offenders,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinualCollision {
    pub value: ExtendedCount,
    /// Longest run actually seen in the scanned window.
    pub longest_observed: u64,
    /// Frames scanned.
    pub window: u64,
    /// Pairs attaining the longest run, ascending.
    pub offenders: Vec<(usize, usize)>,
}

/// Longest run of consecutive frames in which some pair shares a subframe.
///
/// Deterministic patterns are scanned over two periods; a run as long as the
/// period means the pair collides forever (`Infinite`). Random patterns are
/// scanned over `t_cap` frames; a longest run that reaches the last scanned
/// frame could continue, so the result is `ExceedsCap(t_cap)`.
pub fn max_continual_collision(
    pattern: &HoppingPattern,
    t_cap: u64,
) -> Result<ContinualCollision, MetricsError> {
    if t_cap == 0 {
        return Err(MetricsError::ZeroCap);
    }
    let period = pattern.j_period();
    let window = period.map_or(t_cap, |p| 2 * p);
    let index = PairIndex::new(pattern.resources())?;
    // run length and last colliding frame (+1, so 0 means never)
    let mut runs = vec![0u32; index.len()];
    let mut last = vec![0u32; index.len()];
    let mut best = vec![0u32; index.len()];
    let mut best_end = vec![0u32; index.len()];
    let mut buckets = Vec::new();
    for t in 0..window {
        let stamp = t as u32 + 1;
        for_each_collision(pattern, &index, t as i64, &mut buckets, |k| {
            runs[k] = if last[k] == stamp - 1 && last[k] != 0 {
                runs[k] + 1
            } else {
                1
            };
            last[k] = stamp;
            if runs[k] > best[k] {
                best[k] = runs[k];
                best_end[k] = stamp;
            }
        });
    }
    let longest = best.iter().copied().max().unwrap_or(0) as u64;
    let offenders: Vec<(usize, usize)> = if longest == 0 {
        Vec::new()
    } else {
        best.iter()
            .enumerate()
            .filter(|&(_, &b)| b as u64 == longest)
            .map(|(k, _)| index.pair(k))
            .collect()
    };
    let value = match period {
        Some(p) if longest >= p => ExtendedCount::Infinite,
        Some(_) => ExtendedCount::Finite(longest),
        None => {
            let touches_edge = best
                .iter()
                .zip(&best_end)
                .any(|(&b, &e)| longest > 0 && b as u64 == longest && e as u64 == window);
            if touches_edge {
                ExtendedCount::ExceedsCap(t_cap)
            } else {
                ExtendedCount::Finite(longest)
            }
        }
    };
    Ok(ContinualCollision {
        value,
        longest_observed: longest,
        window,
        offenders,
    })
}

/// Lower bound on the maximal continual collision number: the smallest `r`
/// with `n^r >= m`.
pub fn continual_lower_bound(pattern: &HoppingPattern) -> Result<u64, MetricsError> {
    let frame = pattern.frame();
    if frame.n() < 2 {
        // every pair collides in every frame; the bound degenerates
        return Ok(if frame.resources() > 1 { u64::MAX } else { 0 });
    }
    Ok(min_exponent(frame.n() as u64, frame.m() as u64)? as u64)
}

/// A pattern is locally good when its maximal continual collision number
/// equals [`continual_lower_bound`].
pub fn is_local_good(pattern: &HoppingPattern, t_cap: u64) -> Result<bool, MetricsError> {
    let bound = continual_lower_bound(pattern)?;
    let cc = max_continual_collision(pattern, t_cap)?;
    Ok(cc.value == ExtendedCount::Finite(bound))
}

/// The column period predicted by the construction: `n` for QC with prime
/// `n`, `p^r` for New, `1` for single-channel or single-subframe frames.
pub fn algebraic_column_period(pattern: &HoppingPattern) -> Option<u64> {
    let frame = pattern.frame();
    if pattern.is_random() {
        return None;
    }
    if frame.m() == 1 || frame.n() == 1 {
        return Some(1);
    }
    match pattern.spec().kind {
        PatternKind::Qc { .. } if is_prime(frame.n() as u64) => Some(frame.n() as u64),
        PatternKind::New { .. } => pattern.j_period(),
        _ => None,
    }
}

/// Interns partitions so that equality checks are integer comparisons.
fn partition_ids(pattern: &HoppingPattern, frames: u64) -> Vec<usize> {
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    (0..frames)
        .map(|t| {
            let labels = canonical_labels(&pattern.j_column(t as i64));
            let next = seen.len();
            *seen.entry(labels).or_insert(next)
        })
        .collect()
}

/// Minimal `T >= 1` such that `j(t)(s) = j(t)(s')` iff
/// `j(t+T)(s) = j(t+T)(s')` for every pair and every `t`.
///
/// For deterministic patterns the `j` values have period `P`, so checking
/// `t` over one period (with wrap-around) is exhaustive; the periodicity
/// itself is re-checked, and the result must agree with
/// [`algebraic_column_period`] when that is known. Random patterns are
/// searched over `T <= t_cap`, `t < t_cap`.
pub fn column_period(pattern: &HoppingPattern, t_cap: u64) -> Result<ExtendedCount, MetricsError> {
    if t_cap == 0 {
        return Err(MetricsError::ZeroCap);
    }
    match pattern.j_period() {
        Some(period) => {
            for t in 0..period {
                let now = pattern.j_column(t as i64);
                let later = pattern.j_column((t + period) as i64);
                if let Some(s) = (0..now.len()).find(|&s| now[s] != later[s]) {
                    return Err(MetricsError::NotPeriodic { period, s, t });
                }
            }
            let ids = partition_ids(pattern, period);
            let p = period as usize;
            let detected = (1..=p)
                .find(|&shift| (0..p).all(|t| ids[t] == ids[(t + shift) % p]))
                .expect("the period itself always satisfies condition (P)")
                as u64;
            if let Some(algebraic) = algebraic_column_period(pattern) {
                if algebraic != detected {
                    return Err(MetricsError::PeriodMismatch {
                        detected,
                        algebraic,
                    });
                }
            }
            Ok(if detected <= t_cap {
                ExtendedCount::Finite(detected)
            } else {
                ExtendedCount::ExceedsCap(t_cap)
            })
        }
        None => {
            let cap = t_cap as usize;
            let ids = partition_ids(pattern, 2 * t_cap);
            Ok((1..=cap)
                .find(|&shift| (0..cap).all(|t| ids[t] == ids[t + shift]))
                .map_or(ExtendedCount::ExceedsCap(t_cap), |s| {
                    ExtendedCount::Finite(s as u64)
                }))
        }
    }
}

/// All three metrics for one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub kind: &'static str,
    pub m: u32,
    pub n: u32,
    pub column_period: ExtendedCount,
    pub algebraic_period: Option<u64>,
    pub collision: CollisionRatio,
    pub continual: ContinualCollision,
    pub lower_bound: u64,
    pub local_good: bool,
}

/// Maximum number of offender pairs printed per metric.
pub const OFFENDERS_SHOWN: usize = 16;

impl MetricsReport {
    /// Uses the exact collision ratio for deterministic patterns and the
    /// `t_b`-horizon estimate for Random.
    pub fn evaluate(pattern: &HoppingPattern, t_cap: u64, t_b: u64) -> Result<Self, MetricsError> {
        if t_b == 0 {
            return Err(MetricsError::ZeroHorizon);
        }
        let column_period = column_period(pattern, t_cap)?;
        let collision = if pattern.is_random() {
            max_collision_ratio_empirical(pattern, t_b)?
        } else {
            max_collision_ratio_exact(pattern)?
        };
        let continual = max_continual_collision(pattern, t_cap)?;
        let lower_bound = continual_lower_bound(pattern)?;
        let local_good = continual.value == ExtendedCount::Finite(lower_bound);
        Ok(MetricsReport {
            kind: pattern.spec().kind.name(),
            m: pattern.frame().m(),
            n: pattern.frame().n(),
            column_period,
            algebraic_period: algebraic_column_period(pattern),
            collision,
            continual,
            lower_bound,
            local_good,
        })
    }
}

fn write_pairs(f: &mut fmt::Formatter<'_>, key: &str, pairs: &[(usize, usize)]) -> fmt::Result {
    write!(f, "{key}_offenders =")?;
    for (a, b) in pairs.iter().take(OFFENDERS_SHOWN) {
        write!(f, " {a}-{b}")?;
    }
    writeln!(f)?;
    writeln!(f, "{key}_offender_count = {}", pairs.len())
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind = {}", self.kind)?;
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "column_period = {}", self.column_period)?;
        match self.algebraic_period {
            Some(p) => writeln!(f, "algebraic_column_period = {p}")?,
            None => writeln!(f, "algebraic_column_period = none")?,
        }
        writeln!(
            f,
            "max_collision_ratio = {}/{}",
            self.collision.ratio.numer(),
            self.collision.ratio.denom()
        )?;
        writeln!(
            f,
            "max_collision_ratio_mode = {}",
            if self.collision.exact {
                "exact"
            } else {
                "empirical"
            }
        )?;
        writeln!(f, "max_collision_count = {}", self.collision.collisions)?;
        writeln!(f, "max_collision_horizon = {}", self.collision.horizon)?;
        write_pairs(f, "max_collision_ratio", &self.collision.offenders)?;
        writeln!(f, "max_continual_collision = {}", self.continual.value)?;
        writeln!(
            f,
            "max_continual_collision_observed = {}",
            self.continual.longest_observed
        )?;
        writeln!(
            f,
            "max_continual_collision_window = {}",
            self.continual.window
        )?;
        write_pairs(f, "max_continual_collision", &self.continual.offenders)?;
        writeln!(f, "continual_lower_bound = {}", self.lower_bound)?;
        writeln!(f, "local_good = {}", self.local_good)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_poly::{FpPoly, Prime};
    use crate::patterns::{FrameStructure, PatternSpec};

    fn qc(m: u32, n: u32) -> HoppingPattern {
        PatternSpec::qc(FrameStructure::new(m, n).unwrap(), 0)
            .build()
            .unwrap()
    }

    fn small_new() -> HoppingPattern {
        let f = FpPoly::monic(Prime::new(3).unwrap(), &[-1, -1]);
        PatternSpec::new_pattern(FrameStructure::new(6, 3).unwrap(), 3, f)
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn pair_index_roundtrip() {
        let idx = PairIndex::new(7).unwrap();
        let mut k = 0;
        for a in 0..7 {
            for b in a + 1..7 {
                assert_eq!(idx.index(a, b), k);
                assert_eq!(idx.pair(k), (a, b));
                k += 1;
            }
        }
        assert_eq!(idx.len(), k);
    }

    #[test]
    fn extended_count_text() {
        for v in [
            ExtendedCount::Finite(3),
            ExtendedCount::Infinite,
            ExtendedCount::ExceedsCap(200),
        ] {
            assert_eq!(v.to_string().parse::<ExtendedCount>().unwrap(), v);
        }
        assert_eq!(ExtendedCount::ExceedsCap(200).to_string(), "cap:200");
        assert!("cap:x".parse::<ExtendedCount>().is_err());
    }

    #[test]
    fn qc_example_values() {
        let a = qc(4, 5);
        assert_eq!(
            max_collision_ratio_exact(&a).unwrap().ratio,
            Ratio::new(1, 5)
        );
        assert_eq!(
            max_continual_collision(&a, 100).unwrap().value,
            ExtendedCount::Finite(1)
        );
        let b = qc(6, 3);
        assert_eq!(
            max_collision_ratio_exact(&b).unwrap().ratio,
            Ratio::new(2, 3)
        );
        assert_eq!(
            max_continual_collision(&b, 100).unwrap().value,
            ExtendedCount::Finite(2)
        );
        let c = qc(10, 3);
        assert_eq!(
            max_collision_ratio_exact(&c).unwrap().ratio,
            Ratio::new(1, 1)
        );
        assert_eq!(
            max_continual_collision(&c, 100).unwrap().value,
            ExtendedCount::Infinite
        );
        assert!(!is_local_good(&c, 100).unwrap());
    }

    #[test]
    fn qc_witness_pair_among_offenders() {
        // (i0, j0) = (1, 0) vs (n, 0) collide at t ≡ 0, 1 mod n
        let pat = qc(6, 3);
        let init = &pat.spec().init;
        let frame = pat.frame();
        let s = init
            .resource_at(frame, crate::Coord { i: 1, j: 0 })
            .unwrap();
        let s2 = init
            .resource_at(frame, crate::Coord { i: 3, j: 0 })
            .unwrap();
        let pair = (s.min(s2), s.max(s2));
        let cr = max_collision_ratio_exact(&pat).unwrap();
        assert!(cr.offenders.contains(&pair));
        let cc = max_continual_collision(&pat, 10).unwrap();
        assert!(cc.offenders.contains(&pair));
    }

    #[test]
    fn new_pattern_values() {
        let pat = small_new();
        assert_eq!(column_period(&pat, 100).unwrap(), ExtendedCount::Finite(9));
        assert_eq!(
            column_period(&pat, 5).unwrap(),
            ExtendedCount::ExceedsCap(5)
        );
        assert_eq!(
            max_collision_ratio_exact(&pat).unwrap().ratio,
            Ratio::new(1, 3)
        );
        assert_eq!(
            max_collision_ratio_empirical(&pat, 9).unwrap().ratio,
            Ratio::new(1, 3)
        );
        assert_eq!(
            max_continual_collision(&pat, 1).unwrap().value,
            ExtendedCount::Finite(2)
        );
        assert!(is_local_good(&pat, 1).unwrap());
    }

    #[test]
    fn errors() {
        let pat = small_new();
        assert_eq!(column_period(&pat, 0), Err(MetricsError::ZeroCap));
        assert_eq!(
            max_continual_collision(&pat, 0).unwrap_err(),
            MetricsError::ZeroCap
        );
        assert_eq!(
            max_collision_ratio_empirical(&pat, 0).unwrap_err(),
            MetricsError::ZeroHorizon
        );
        let rnd = PatternSpec::random(FrameStructure::new(4, 5).unwrap(), 1)
            .build()
            .unwrap();
        assert_eq!(
            max_collision_ratio_exact(&rnd).unwrap_err(),
            MetricsError::NotDeterministic
        );
    }

    #[test]
    fn degenerate_frames() {
        let single = qc(1, 5);
        assert_eq!(
            column_period(&single, 10).unwrap(),
            ExtendedCount::Finite(1)
        );
        let cc = max_continual_collision(&single, 10).unwrap();
        assert_eq!(cc.value, ExtendedCount::Finite(0));
        assert!(cc.offenders.is_empty());
        assert!(is_local_good(&single, 10).unwrap());
    }

    #[test]
    fn report_text() {
        let report = MetricsReport::evaluate(&small_new(), 100, 100).unwrap();
        let text = report.to_string();
        assert!(text.contains("column_period = 9\n"));
        assert!(text.contains("max_collision_ratio = 1/3\n"));
        assert!(text.contains("max_continual_collision = 2\n"));
        assert!(text.contains("local_good = true\n"));
    }
}
