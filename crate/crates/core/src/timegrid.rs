//! The fixed 12-slot assessment grid and its phase segmentation.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const TIMEPOINT_COUNT: usize = 12;

const LABELS: [&str; TIMEPOINT_COUNT] = [
    "wk0", "wk1", "wk2", "wk3", "wk4", "wk5", "wk6", "wk7", "post6w", "post6m", "post12m",
    "post18m",
];

// Treatment ends at week 7 (day 49); late points add 6 weeks, 6, 12 and 18 months.
const DAY_OFFSETS: [u32; TIMEPOINT_COUNT] = [0, 7, 14, 21, 28, 35, 42, 49, 91, 229, 414, 596];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Baseline,
    Acute,
    Late,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Baseline, Phase::Acute, Phase::Late];

    /// Grid indices belonging to the phase.
    pub fn indices(self) -> RangeInclusive<usize> {
        match self {
            Phase::Baseline => 0..=0,
            Phase::Acute => 1..=7,
            Phase::Late => 8..=11,
        }
    }

    pub fn timepoints(self) -> impl Iterator<Item = TimePoint> {
        self.indices().map(|i| TimePoint(i as u8))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Baseline => "baseline",
            Phase::Acute => "acute",
            Phase::Late => "late",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown phase `{0}`")]
pub struct UnknownPhase(pub String);

impl FromStr for Phase {
    type Err = UnknownPhase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Ok(Phase::Baseline),
            "acute" => Ok(Phase::Acute),
            "late" => Ok(Phase::Late),
            _ => Err(UnknownPhase(s.to_string())),
        }
    }
}

/// A slot on the canonical grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimePoint(u8);

impl TimePoint {
    pub fn new(index: usize) -> Option<TimePoint> {
        (index < TIMEPOINT_COUNT).then_some(TimePoint(index as u8))
    }

    pub fn all() -> impl ExactSizeIterator<Item = TimePoint> + Clone {
        (0..TIMEPOINT_COUNT as u8).map(TimePoint)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> &'static str {
        LABELS[self.index()]
    }

    pub fn phase(self) -> Phase {
        phase_of(self)
    }

    /// Days since treatment start.
    pub fn day_offset(self) -> u32 {
        DAY_OFFSETS[self.index()]
    }

    pub fn next(self) -> Option<TimePoint> {
        TimePoint::new(self.index() + 1)
    }

    /// Accepts either a canonical label (`wk3`, `post6m`) or a bare index `0..=11`.
    pub fn parse(s: &str) -> Option<TimePoint> {
        let s = s.trim();
        if let Some(i) = LABELS.iter().position(|l| l.eq_ignore_ascii_case(s)) {
            return TimePoint::new(i);
        }
        s.parse::<usize>().ok().and_then(TimePoint::new)
    }
}

pub fn phase_of(tp: TimePoint) -> Phase {
    match tp.index() {
        0 => Phase::Baseline,
        1..=7 => Phase::Acute,
        _ => Phase::Late,
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown timepoint `{0}`")]
pub struct UnknownTimepoint(pub String);

impl FromStr for TimePoint {
    type Err = UnknownTimepoint;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TimePoint::parse(s).ok_or_else(|| UnknownTimepoint(s.to_string()))
    }
}

impl Serialize for TimePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_boundaries() {
        assert_eq!(phase_of(TimePoint::new(0).unwrap()), Phase::Baseline);
        assert_eq!(phase_of(TimePoint::new(1).unwrap()), Phase::Acute);
        assert_eq!(phase_of(TimePoint::new(7).unwrap()), Phase::Acute);
        assert_eq!(phase_of(TimePoint::new(8).unwrap()), Phase::Late);
        assert_eq!(phase_of(TimePoint::new(11).unwrap()), Phase::Late);
    }

    #[test]
    fn phases_partition_the_grid() {
        let mut seen = [0; TIMEPOINT_COUNT];
        for phase in Phase::ALL {
            for tp in phase.timepoints() {
                assert_eq!(tp.phase(), phase);
                seen[tp.index()] += 1;
            }
        }
        assert!(seen.iter().all(|&n| n == 1));
    }

    #[test]
    fn day_offsets_strictly_increase() {
        let days: Vec<_> = TimePoint::all().map(TimePoint::day_offset).collect();
        assert!(days.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(days[0], 0);
        for (week, &d) in days.iter().enumerate().take(8) {
            assert_eq!(d, 7 * week as u32);
        }
    }

    #[test]
    fn parse_labels_and_indices() {
        assert_eq!(TimePoint::parse("wk0"), TimePoint::new(0));
        assert_eq!(TimePoint::parse("post18m"), TimePoint::new(11));
        assert_eq!(TimePoint::parse("7"), TimePoint::new(7));
        assert_eq!(TimePoint::parse("wk9"), None);
        assert_eq!(TimePoint::parse("12"), None);
    }
}
