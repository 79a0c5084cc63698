//! Scheme lookup by name.

use crate::edgecount::{CrossEdgeCount, InducedEdgeCount};
use crate::graphapps::{Acyclicity, Components, MaxMatchFrugal, MaxMatchLaconic, Mis, TopoSort};
use crate::protocol::{Scheme, Tuning};
use crate::sssp::{SsspUnweighted, SsspWeightedTurnstile, SsspWeightedVanilla, StPath};
use crate::triangles::{TriAdj, TriFrugal, TriLaconic, TriSparse};

pub const SCHEME_NAMES: [&str; 16] = [
    "tri-laconic",
    "tri-frugal",
    "tri-sparse",
    "tri-adj",
    "edgecount-induced",
    "edgecount-cross",
    "maxmatch-frugal",
    "maxmatch-laconic",
    "mis",
    "toposort",
    "acyclicity",
    "components",
    "sssp-unweighted",
    "stpath",
    "sssp-wturnstile",
    "sssp-wvanilla",
];

pub fn build_scheme(name: &str, tuning: Tuning) -> Option<Box<dyn Scheme>> {
    Some(match name {
        "tri-laconic" => Box::new(TriLaconic { tuning }),
        "tri-frugal" => Box::new(TriFrugal { tuning }),
        "tri-sparse" => Box::new(TriSparse { tuning }),
        "tri-adj" => Box::new(TriAdj { tuning }),
        "edgecount-induced" => Box::new(InducedEdgeCount { tuning }),
        "edgecount-cross" => Box::new(CrossEdgeCount { tuning }),
        "maxmatch-frugal" => Box::new(MaxMatchFrugal { tuning }),
        "maxmatch-laconic" => Box::new(MaxMatchLaconic { tuning }),
        "mis" => Box::new(Mis { tuning }),
        "toposort" => Box::new(TopoSort { tuning }),
        "acyclicity" => Box::new(Acyclicity { tuning }),
        "components" => Box::new(Components { tuning }),
        "sssp-unweighted" => Box::new(SsspUnweighted { tuning }),
        "stpath" => Box::new(StPath { tuning }),
        "sssp-wturnstile" => Box::new(SsspWeightedTurnstile { tuning }),
        "sssp-wvanilla" => Box::new(SsspWeightedVanilla { tuning }),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in SCHEME_NAMES {
            assert_eq!(build_scheme(name, Tuning::new(1, 1)).unwrap().name(), name);
        }
        assert!(build_scheme("nope", Tuning::new(1, 1)).is_none());
    }
}
