//! Prints every claim of the four dihedral constructions for small `n`.
//!
//! `cargo run --example claims -p norm1lat-core`

use std::time::Instant;

use norm1lat::paperdihedral::{build, dimension_report, BuildOptions, CaseId};

fn main() -> Result<(), norm1lat::Error> {
    let runs = [
        (CaseId::MainIi, [6, 10, 14]),
        (CaseId::MainI, [4, 8, 12]),
        (CaseId::AppendixGalois, [3, 5, 7]),
        (CaseId::AppendixC2, [3, 5, 7]),
    ];
    for (case, ns) in runs {
        for n in ns {
            let t = Instant::now();
            let c = build(case, n, &BuildOptions::new())?;
            println!("== {case} n={n}: all passed {}, {:.1?}", c.all_passed(), t.elapsed());
            for cl in &c.claims {
                let mark = if cl.passed { "ok" } else { "FAIL" };
                println!("  [{mark}] {}: {}", cl.name, cl.detail);
            }
            for f in &c.findings {
                println!("  finding: {f}");
            }
            if let Ok(d) = dimension_report(&c) {
                println!("  dimensions: {}", d.rendered);
            }
        }
    }
    Ok(())
}
