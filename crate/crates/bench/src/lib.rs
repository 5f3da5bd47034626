//! Shared inputs for the criterion benchmarks in `benches/`.

use adderlab_core::{AdderConfig, Architecture, Netlist};

/// Every generated architecture at `width` in its benchmark configuration.
pub fn suite(width: usize) -> Vec<(Architecture, Netlist)> {
    Architecture::ALL
        .into_iter()
        .map(|arch| {
            let nl = AdderConfig::benchmark_default(arch, width)
                .build()
                .expect("default configurations build");
            (arch, nl)
        })
        .collect()
}
