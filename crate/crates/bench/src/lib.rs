//! Shared fixtures for the benchmarks: generated datasets on the default
//! district network, sized by class count.

use trajcc_core::bigraph::TraversalMatrix;
use trajcc_core::generator::{generate, GeneratorConfig};
use trajcc_core::network::synthetic::DistrictLayout;
use trajcc_core::network::RoadNetwork;

pub struct Fixture {
    pub network: RoadNetwork,
    pub matrix: TraversalMatrix,
}

/// Roughly 400 traversals per class on a 16 x 16 zone grid.
pub fn fixture(classes: usize, seed: u64) -> Fixture {
    let network = DistrictLayout::default().build();
    let cfg = GeneratorConfig {
        classes,
        grid_rows: 16,
        grid_cols: 16,
        min_size: 15,
        max_size: 19,
        seed,
        ..GeneratorConfig::default()
    };
    let ds = generate(&network, &cfg).expect("default network supports generation");
    let matrix = TraversalMatrix::from_dataset(&ds).expect("generated data is non-empty");
    Fixture { network, matrix }
}
