//! Catalogue of concept anchors attached to report checks.

/// `(anchor, what the check establishes)`
pub const ANCHORS: &[(&str, &str)] = &[
    ("scenario-setup", "inputs of the scenario could be assembled"),
    ("epr-state", "phi((A-B)^2) = 0 for a commuting pair, with diagonal and unitary-grid forms"),
    ("joint-distribution-diagonal", "joint distribution of a commuting pair is concentrated on the diagonal"),
    ("incommensurable-pairs", "same-side members of two EPR pairs fail to commute in the state"),
    ("epr-witness-construction", "EPR state for incommensurable projection pairs built from two commuting factors"),
    ("gns-representation", "GNS vector reproduces the state and is annihilated by A-B"),
    ("beable-conditions", "state is classical on the algebra and the measured observable belongs to it"),
    ("partner-commutation", "EPR partner of the measured observable commutes in the state with the beable algebra"),
    ("exclusion", "incommensurable observables cannot belong to a beable algebra of the context"),
    ("appropriate-mixture", "greedy beable algebra from the measured observable and its EPR partners"),
    ("function-transport", "EPR correlation passes to functions of the pair"),
    ("weyl-commutation", "clock and shift satisfy ZX = omega XZ and have order d"),
    ("offset-epr-state", "maximally entangled offset state has the prescribed correlators"),
    ("weyl-exclusion", "Weyl relation forbids the second-side shift from a beable algebra of the first-side clock"),
];

pub fn is_known(anchor: &str) -> bool {
    ANCHORS.iter().any(|(a, _)| *a == anchor)
}

pub fn description(anchor: &str) -> Option<&'static str> {
    ANCHORS.iter().find(|(a, _)| *a == anchor).map(|(_, d)| *d)
}
