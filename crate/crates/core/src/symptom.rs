//! Canonical symptom manifest.
//!
//! The 28 questionnaire items, grouped into three categories. Ids are the
//! join key for every CSV and JSON payload the engine reads or writes, so the
//! spellings here are pinned and versioned by [`MANIFEST_VERSION`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Bumped whenever an id is added, removed or renamed.
pub const MANIFEST_VERSION: u32 = 1;

pub const SYMPTOM_COUNT: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Core,
    #[serde(rename = "HNCSpecific")]
    HncSpecific,
    Interference,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Core, Category::HncSpecific, Category::Interference];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Core => "Core",
            Category::HncSpecific => "HNCSpecific",
            Category::Interference => "Interference",
        }
    }
}

const MANIFEST: [(&str, Category); SYMPTOM_COUNT] = [
    ("fatigue", Category::Core),
    ("sleep", Category::Core),
    ("distress", Category::Core),
    ("pain", Category::Core),
    ("drowsiness", Category::Core),
    ("sadness", Category::Core),
    ("memory", Category::Core),
    ("numbness", Category::Core),
    ("dry_mouth", Category::Core),
    ("appetite", Category::Core),
    ("breath", Category::Core),
    ("nausea", Category::Core),
    ("vomit", Category::Core),
    ("swallow", Category::HncSpecific),
    ("speech", Category::HncSpecific),
    ("mucus", Category::HncSpecific),
    ("taste", Category::HncSpecific),
    ("constipation", Category::HncSpecific),
    ("teeth", Category::HncSpecific),
    ("sores", Category::HncSpecific),
    ("choking", Category::HncSpecific),
    ("skin", Category::HncSpecific),
    ("work", Category::Interference),
    ("enjoyment", Category::Interference),
    ("activity", Category::Interference),
    ("mood", Category::Interference),
    ("walk", Category::Interference),
    ("relations", Category::Interference),
];

/// One of the 28 canonical symptoms, identified by its manifest position.
///
/// Ordering follows the manifest (and therefore the category order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symptom(u8);

impl Symptom {
    pub fn all() -> impl ExactSizeIterator<Item = Symptom> + Clone {
        (0..SYMPTOM_COUNT as u8).map(Symptom)
    }

    pub fn from_index(index: usize) -> Option<Symptom> {
        (index < SYMPTOM_COUNT).then_some(Symptom(index as u8))
    }

    pub fn from_id(id: &str) -> Option<Symptom> {
        MANIFEST
            .iter()
            .position(|(name, _)| *name == id)
            .map(|i| Symptom(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn id(self) -> &'static str {
        MANIFEST[self.index()].0
    }

    pub fn category(self) -> Category {
        MANIFEST[self.index()].1
    }

    pub fn in_category(category: Category) -> impl Iterator<Item = Symptom> {
        Symptom::all().filter(move |s| s.category() == category)
    }
}

impl fmt::Debug for Symptom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symptom({})", self.id())
    }
}

impl fmt::Display for Symptom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown symptom `{0}`")]
pub struct UnknownSymptomId(pub String);

impl FromStr for Symptom {
    type Err = UnknownSymptomId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Symptom::from_id(s.trim()).ok_or_else(|| UnknownSymptomId(s.to_string()))
    }
}

impl Serialize for Symptom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Symptom {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
