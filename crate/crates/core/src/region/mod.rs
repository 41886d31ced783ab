//! Region-based effect inference: provenance regions for values, method
//! signatures over regions, class tables, and the fixed-point inference of
//! finite-trace, exceptional and call effects.

mod infer;
pub mod intrinsics;
mod table;
mod typeff;

use std::collections::BTreeSet;
use std::fmt;

use crate::fj::{Program, NULL_TYPE};

pub use infer::{check_well_typed, infer, infer_demand, infer_full, untyped_sigs, Inferred, WellTypedError};
pub use intrinsics::{ArgPat, ConfigError, IntrinsicEntry, Intrinsics, RetRegion};
pub use table::{check_class_table, init, init_demand, ClassTableB, MEntry};
pub use typeff::{except_filter, typeff, Env, Typed, Violation};

/// Where a value may have come from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Null,
    CreatedAt(String),
    Unknown,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Null => f.write_str("Null"),
            Region::CreatedAt(l) => write!(f, "CreatedAt({l})"),
            Region::Unknown => f.write_str("Unknown"),
        }
    }
}

impl Region {
    /// Parses the `Display` form.
    pub fn parse(s: &str) -> Option<Region> {
        match s {
            "Null" => Some(Region::Null),
            "Unknown" => Some(Region::Unknown),
            _ => {
                let l = s.strip_prefix("CreatedAt(")?.strip_suffix(')')?;
                (!l.is_empty()).then(|| Region::CreatedAt(l.to_string()))
            }
        }
    }

    pub fn disjoint(&self, other: &Region) -> bool {
        !matches!(self, Region::Unknown) && !matches!(other, Region::Unknown) && self != other
    }
}

/// A method signature `(C, r, m, s̄)`: class, receiver region, method name,
/// argument regions. The derived order is the lexicographic one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sig {
    pub class: String,
    pub recv: Region,
    pub method: String,
    pub args: Vec<Region>,
}

impl Sig {
    pub fn new(class: &str, recv: Region, method: &str, args: Vec<Region>) -> Self {
        Sig { class: class.to_string(), recv, method: method.to_string(), args }
    }
}

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(Region::to_string).collect();
        write!(f, "({}, {}, {}, ({}))", self.class, self.recv, self.method, args.join(", "))
    }
}

/// Regions of a program and the classes each may contain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionMeta {
    regions: Vec<Region>,
    cls: Vec<(Region, BTreeSet<String>)>,
}

pub fn region_meta(p: &Program) -> RegionMeta {
    let mut regions = vec![Region::Null];
    let mut cls = vec![(Region::Null, BTreeSet::from([NULL_TYPE.to_string()]))];
    for (l, c) in p.labels() {
        regions.push(Region::CreatedAt(l.clone()));
        cls.push((Region::CreatedAt(l), BTreeSet::from([c])));
    }
    regions.push(Region::Unknown);
    cls.push((Region::Unknown, p.class_names().map(str::to_string).collect()));
    RegionMeta { regions, cls }
}

impl RegionMeta {
    /// Null, every label in order, Unknown.
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn cls(&self, r: &Region) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.cls.iter().find(|(s, _)| s == r).map_or(&EMPTY, |(_, c)| c)
    }

    pub fn contains(&self, r: &Region, class: &str) -> bool {
        self.cls(r).contains(class)
    }

    pub fn disjoint(&self, r: &Region, s: &Region) -> bool {
        r.disjoint(s)
    }
}
