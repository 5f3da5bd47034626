//! Acceptance suite. Prints one pass/fail line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use adderlab_core::arch::{
    build_bcla, build_bec, build_csla, build_rca, build_rca_dbfa, build_rcla,
    PUBLISHED_CSLA_PARTITION,
};
use adderlab_core::bench::{metrics_from_fixture, PUBLISHED_FIXTURE};
use adderlab_core::cell::LibrarySource;
use adderlab_core::netlist::Driver;
use adderlab_core::report::metrics_csv;
use adderlab_core::rng::{exhaustive_vectors, SplitMix64};
use adderlab_core::sim::{simulate_ports, AdderSim, GateToggles};
use adderlab_core::{
    avg_power, critical_path, delay_exceedance, normalize, run_bench, AdderConfig, Architecture,
    BenchmarkConfig, CellLibrary, FaStyle, InputVector, Metric, NetId, Netlist, ToggleStats,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn lib() -> &'static CellLibrary {
    CellLibrary::builtin()
}

/// Wide-integer oracle, kept separate from the library's own reference.
fn oracle(width: usize, v: InputVector) -> (u64, bool) {
    let total = v.a as u128 + v.b as u128 + v.cin as u128;
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    ((total as u64) & mask, (total >> width) & 1 == 1)
}

fn agrees(nl: &Netlist, vectors: &[InputVector]) -> Result<(), String> {
    let sim = AdderSim::new(nl, lib()).map_err(|e| e.to_string())?;
    let outs = sim.run(vectors).map_err(|e| e.to_string())?;
    for (v, o) in vectors.iter().zip(outs) {
        let (sum, cout) = oracle(nl.width, *v);
        if o.sum != sum || o.cout != cout {
            return Err(format!(
                "{v:?} gave sum {:#x} cout {}, expected {sum:#x} {cout}",
                o.sum, o.cout
            ));
        }
    }
    Ok(())
}

fn configs(width: usize) -> Vec<AdderConfig> {
    let mut out = Vec::new();
    for arch in Architecture::ALL {
        for style in [FaStyle::Cell, FaStyle::Gates] {
            out.push(AdderConfig::new(arch, width).with_fa_style(style));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut exhaustive = 0u64;
    for width in [4, 8] {
        let vectors: Vec<InputVector> = exhaustive_vectors(width).collect();
        ensure!(
            vectors.len() == 1 << (2 * width + 1),
            "enumeration size at width {width}"
        );
        for cfg in configs(width) {
            let nl = cfg.build().map_err(|e| format!("{cfg}: {e}"))?;
            agrees(&nl, &vectors).map_err(|e| format!("{cfg}: {e}"))?;
            exhaustive += vectors.len() as u64;
        }
    }
    // random operands drawn independently of the library's vector stream
    let mut rng = SplitMix64::new(0xACCE_97ED);
    let vectors: Vec<InputVector> = (0..100_000)
        .map(|_| {
            let a = rng.next_u64() & 0xFFFF_FFFF;
            let b = rng.next_u64() >> 32;
            InputVector {
                a,
                b,
                cin: rng.next_u64() & 1 == 1,
            }
        })
        .collect();
    let mut corners = vec![
        InputVector {
            a: 0xFFFF_FFFF,
            b: 0,
            cin: true,
        },
        InputVector {
            a: 0xFFFF_FFFF,
            b: 0xFFFF_FFFF,
            cin: true,
        },
        InputVector {
            a: 0,
            b: 0,
            cin: false,
        },
    ];
    corners.extend(vectors);
    for cfg in configs(32) {
        let nl = cfg.build().map_err(|e| format!("{cfg}: {e}"))?;
        agrees(&nl, &corners).map_err(|e| format!("{cfg}: {e}"))?;
    }
    Ok(format!(
        "16 configurations exhaustive at widths 4 and 8 ({exhaustive} vectors), 10^5 random at width 32"
    ))
}

fn criterion_2() -> Outcome {
    let table = metrics_from_fixture(PUBLISHED_FIXTURE).map_err(|e| e.to_string())?;
    let want = [
        (Metric::Pdp, "Adder8"),
        (Metric::Edp, "Adder8"),
        (Metric::Adp, "Adder11"),
        (Metric::Pdap, "Adder1"),
    ];
    for (metric, legend) in want {
        ensure!(
            table.argmin(metric) == legend,
            "least {metric} is {}, expected {legend}",
            table.argmin(metric)
        );
    }
    let d1 = table.row("Adder1").ok_or("Adder1 missing")?.delay_ns;
    let d11 = table.row("Adder11").ok_or("Adder11 missing")?.delay_ns;
    let pct = delay_exceedance(d1, d11).map_err(|e| e.to_string())?;
    ensure!(
        (pct - 196.5).abs() <= 0.1,
        "delay exceedance {pct:.3}% outside 196.5 +/- 0.1"
    );
    Ok(format!(
        "argmins Adder8/Adder8/Adder11/Adder1, exceedance {pct:.2}%"
    ))
}

/// Minimum and maximum gate counts over all paths from `from` to `to`.
fn path_gate_counts(nl: &Netlist, from: NetId, to: NetId) -> Option<(usize, usize)> {
    let drivers = nl.drivers();
    let mut memo: HashMap<NetId, Option<(usize, usize)>> = HashMap::new();
    fn walk(
        nl: &Netlist,
        drivers: &[Option<Driver>],
        memo: &mut HashMap<NetId, Option<(usize, usize)>>,
        from: NetId,
        net: NetId,
    ) -> Option<(usize, usize)> {
        if net == from {
            return Some((0, 0));
        }
        if let Some(&r) = memo.get(&net) {
            return r;
        }
        let r = match drivers[net.index()] {
            Some(Driver::Gate { gate, .. }) => nl.gates[gate]
                .inputs
                .iter()
                .filter_map(|&n| walk(nl, drivers, memo, from, n))
                .fold(None, |acc: Option<(usize, usize)>, (lo, hi)| match acc {
                    None => Some((lo + 1, hi + 1)),
                    Some((a, b)) => Some((a.min(lo + 1), b.max(hi + 1))),
                }),
            _ => None,
        };
        memo.insert(net, r);
        r
    }
    walk(nl, &drivers, &mut memo, from, to)
}

fn criterion_3() -> Outcome {
    let rca = build_rca(32, FaStyle::Cell).map_err(|e| e.to_string())?;
    ensure!(
        rca.count_cells("FA") == 32 && rca.gates.len() == 32,
        "RCA has {} FAs",
        rca.count_cells("FA")
    );

    let dbfa = build_rca_dbfa(32, FaStyle::Cell).map_err(|e| e.to_string())?;
    ensure!(
        dbfa.count_cells("DBFA") == 16 && dbfa.gates.len() == 16,
        "RCA_DBFA has {} DBFAs",
        dbfa.count_cells("DBFA")
    );
    let stages = build_rca_dbfa(32, FaStyle::Gates).map_err(|e| e.to_string())?;
    let stage_labels = stages
        .labels
        .iter()
        .filter(|(n, _)| n.starts_with("stage"))
        .count();
    ensure!(
        stage_labels == 16,
        "gate-level RCA_DBFA has {stage_labels} stages"
    );

    let bec = build_bec(5).map_err(|e| e.to_string())?;
    for x in 0..32u64 {
        let y = simulate_ports(&bec, lib(), &[x]).map_err(|e| e.to_string())?;
        ensure!(y == vec![(x + 1) % 32], "BEC(5) maps {x} to {y:?}");
    }

    let csla = build_csla(32, &PUBLISHED_CSLA_PARTITION, false, FaStyle::Cell)
        .map_err(|e| e.to_string())?;
    let (fa, mux) = (csla.count_cells("FA"), csla.count_cells("MUX2"));
    ensure!(fa == 62 && mux == 36, "CSLA has {fa} FAs and {mux} MUX2");

    let mut hops = 0;
    let lookahead = [
        ("RCLA", build_rcla(32, &[4; 8])),
        ("BCLA", build_bcla(32, &[4; 8], FaStyle::Cell)),
        ("BCLA gates", build_bcla(32, &[4; 8], FaStyle::Gates)),
        (
            "RCLA_RCA",
            AdderConfig::new(Architecture::RclaRca, 32).build(),
        ),
        (
            "BCLA_RCA",
            AdderConfig::new(Architecture::BclaRca, 32).build(),
        ),
    ];
    for (name, nl) in lookahead {
        let nl = nl.map_err(|e| format!("{name}: {e}"))?;
        let groups = nl
            .labels
            .iter()
            .filter(|(n, _)| n.ends_with(".cin"))
            .count();
        // the first and last groups are not intermediate
        for k in 1..groups - 1 {
            let cin = nl
                .label(&format!("g{k}.cin"))
                .ok_or(format!("{name}: g{k}.cin missing"))?;
            let cout = nl
                .label(&format!("g{k}.cout"))
                .ok_or(format!("{name}: g{k}.cout missing"))?;
            let counts = path_gate_counts(&nl, cin, cout);
            ensure!(
                counts == Some((1, 1)),
                "{name} group {k}: carry path gate counts {counts:?}"
            );
            let Some(Driver::Gate { gate, .. }) = nl.drivers()[cout.index()] else {
                return Err(format!("{name} group {k}: carry-out is not gate driven"));
            };
            ensure!(
                nl.gates[gate].cell == "AO21",
                "{name} group {k}: carry hop is {}",
                nl.gates[gate].cell
            );
            hops += 1;
        }
    }
    Ok(format!(
        "32 FA, 16 DBFA, BEC(5) exhaustive, CSLA 62 FA + 36 MUX2, {hops} group hops are one AO21"
    ))
}

fn criterion_4() -> Outcome {
    let cfg = BenchmarkConfig::default();
    ensure!(
        cfg.n_vectors == 1000,
        "default stream has {} vectors",
        cfg.n_vectors
    );
    let outcome = run_bench(&cfg, lib()).map_err(|e| e.to_string())?;
    let by_arch: HashMap<Architecture, _> =
        outcome.adders.iter().map(|r| (r.config.arch, r)).collect();
    ensure!(
        by_arch.len() == 8,
        "expected 8 generated adders, got {}",
        by_arch.len()
    );
    let get = |a: Architecture| by_arch[&a];
    let rca = get(Architecture::RcaFa);
    for arch in [
        Architecture::Rcla,
        Architecture::RclaRca,
        Architecture::Bcla,
        Architecture::BclaRca,
        Architecture::Csla,
        Architecture::CslaBec,
    ] {
        ensure!(
            rca.delay_ps > get(arch).delay_ps,
            "delay RCA_FA {} ps is not above {arch} {} ps",
            rca.delay_ps,
            get(arch).delay_ps
        );
    }
    for r in &outcome.adders {
        if r.config.arch != Architecture::RcaFa {
            ensure!(
                rca.area < r.area,
                "area RCA_FA {} is not below {} {}",
                rca.area,
                r.config.arch,
                r.area
            );
        }
    }
    let pairs = [
        (Architecture::RclaRca, Architecture::Rcla),
        (Architecture::BclaRca, Architecture::Bcla),
    ];
    for (hybrid, plain) in pairs {
        ensure!(
            get(hybrid).delay_ps <= get(plain).delay_ps,
            "delay {hybrid} {} ps exceeds {plain} {} ps",
            get(hybrid).delay_ps,
            get(plain).delay_ps
        );
    }
    let csla = get(Architecture::Csla);
    ensure!(
        csla.power_uw > rca.power_uw,
        "power CSLA {} uW is not above RCA_FA {} uW",
        csla.power_uw,
        rca.power_uw
    );
    Ok(format!(
        "RCA_FA {:.0} ps / area {:.1} / {:.3} uW; CSLA {:.0} ps / {:.3} uW; RCLA_RCA {:.0} <= RCLA {:.0}; BCLA_RCA {:.0} <= BCLA {:.0}",
        rca.delay_ps,
        rca.area,
        rca.power_uw,
        csla.delay_ps,
        csla.power_uw,
        get(Architecture::RclaRca).delay_ps,
        get(Architecture::Rcla).delay_ps,
        get(Architecture::BclaRca).delay_ps,
        get(Architecture::Bcla).delay_ps
    ))
}

fn criterion_5() -> Outcome {
    let cfg = BenchmarkConfig::default();
    let first = metrics_csv(&run_bench(&cfg, lib()).map_err(|e| e.to_string())?.table);
    let second = metrics_csv(&run_bench(&cfg, lib()).map_err(|e| e.to_string())?.table);
    ensure!(
        first.as_bytes() == second.as_bytes(),
        "CSV reports differ between runs"
    );
    Ok(format!("two runs give identical {}-byte CSV", first.len()))
}

/// Longest port-to-port delay by memoized search from each output bit.
fn longest_path_ps(nl: &Netlist, lib: &CellLibrary) -> f64 {
    let drivers = nl.drivers();
    let mut memo = vec![None; nl.net_count];
    fn arrival(
        nl: &Netlist,
        lib: &CellLibrary,
        drivers: &[Option<Driver>],
        memo: &mut [Option<f64>],
        net: NetId,
    ) -> f64 {
        if let Some(t) = memo[net.index()] {
            return t;
        }
        let t = match drivers[net.index()] {
            Some(Driver::Gate { gate, pin }) => {
                let g = &nl.gates[gate];
                let worst = g
                    .inputs
                    .iter()
                    .map(|&n| arrival(nl, lib, drivers, memo, n))
                    .fold(0.0, f64::max);
                worst + lib.get(&g.cell).unwrap().outputs[pin].delay_ps
            }
            _ => 0.0,
        };
        memo[net.index()] = Some(t);
        t
    }
    nl.outputs
        .iter()
        .flat_map(|p| p.nets.iter())
        .map(|&n| arrival(nl, lib, &drivers, &mut memo, n))
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let rca = build_rca(32, FaStyle::Cell).map_err(|e| e.to_string())?;
    let timing = critical_path(&rca, lib()).map_err(|e| e.to_string())?;
    let oracle = longest_path_ps(&rca, lib());
    ensure!(oracle == 1455.0, "longest-path oracle gives {oracle} ps");
    ensure!(
        timing.critical_delay_ps == 1455.0,
        "critical path is {} ps",
        timing.critical_delay_ps
    );

    let unit_text = CellLibrary::builtin_source().replace("energy_fj = 0.9", "energy_fj = 1.0");
    let unit = CellLibrary::from_toml_str(&unit_text, LibrarySource::Default)
        .map_err(|e| e.to_string())?;
    ensure!(
        unit.get("AND2").unwrap().switch_energy_fj == 1.0,
        "AND2 energy was not rescaled"
    );
    let stats = ToggleStats {
        gates: (0..100)
            .map(|g| GateToggles {
                gate: g,
                cell: "AND2".into(),
                outputs: vec![1],
            })
            .collect(),
        vectors_applied: 1001,
        seed: None,
    };
    let p = avg_power(&stats, &unit, 5.0).map_err(|e| e.to_string())?;
    ensure!(p == 0.02, "power example gives {p} uW");

    let mut rng = SplitMix64::new(6);
    for _ in 0..200 {
        let n = 1 + (rng.next_u64() % 20) as usize;
        let values: Vec<f64> = (0..n)
            .map(|_| 1e-3 + (rng.next_u64() >> 11) as f64 / 1e9)
            .collect();
        let normed = normalize(&values).map_err(|e| e.to_string())?;
        let i = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        ensure!(
            normed[i] == 1.0,
            "maximum of {values:?} normalizes to {}",
            normed[i]
        );
        ensure!(
            normed.iter().all(|&x| x > 0.0 && x <= 1.0),
            "normalized values leave (0, 1]"
        );
    }
    let table = metrics_from_fixture(PUBLISHED_FIXTURE).map_err(|e| e.to_string())?;
    for metric in Metric::ALL {
        let best = table
            .rows
            .iter()
            .map(|r| r.value(metric))
            .fold(f64::MIN, f64::max);
        let row = table.rows.iter().find(|r| r.value(metric) == best).unwrap();
        ensure!(
            row.normalized(metric) == 1.0,
            "largest {metric} row normalizes to {}",
            row.normalized(metric)
        );
    }
    Ok("RCA32 critical path 1455 ps, power example 0.02 uW, maximum normalizes to 1.0".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 6] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match result {
            Ok(detail) => println!("[PASS] criterion {n}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: 6 of 6 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 6 criteria failed");
        ExitCode::FAILURE
    }
}
