use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use norm1lat::certify::{self, Certificate, IsoOutcome, SearchOptions};
use norm1lat::classify::{self, ClassifyOptions, Verdict};
use norm1lat::cohomology::{self, Degree, TableRow};
use norm1lat::glattice::{self, GLattice};
use norm1lat::groups::{FiniteGroup, GroupSpec, Subgroup};
use norm1lat::paperdihedral::{self, BuildOptions, CaseId};
use norm1lat::{resolution, Error};
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Outcome};

pub fn execute(cmd: &Command, cli: &Cli) -> Result<Outcome> {
    match cmd {
        Command::Classify { group, subgroup } => run_classify(group, subgroup, cli),
        Command::VerifyPaper { case, n } => verify_paper(*case, *n, cli),
        Command::Cohomology {
            group,
            lattice,
            subgroup,
            degree,
        } => cohomology_cmd(group, lattice, subgroup, degree, cli),
        Command::Resolve {
            group,
            subgroup,
            lattice,
            target,
            pad,
        } => resolve(group, subgroup, lattice.as_deref(), target.as_deref(), *pad, cli),
        Command::Selftest => selftest(cli),
    }
}

fn group(spec: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(GroupSpec::parse(spec)?.build()?))
}

fn run_classify(g: &str, h: &str, cli: &Cli) -> Result<Outcome> {
    let opts = ClassifyOptions {
        max_group_order: cli.max_group_order,
        with_certificates: true,
    };
    let c = classify::classify_str(g, h, &opts)?;
    let failed = !c.verify_certificates()?;
    Ok(Outcome {
        value: serde_json::to_value(&c)?,
        failed,
    })
}

fn verify_paper(case: CaseId, n: usize, cli: &Cli) -> Result<Outcome> {
    let opts = BuildOptions {
        max_group_order: cli.max_group_order,
        ..BuildOptions::new()
    };
    let c = paperdihedral::build(case, n, &opts)?;
    let report = c.to_report(cli.timings);
    Ok(Outcome {
        failed: !report.all_passed,
        value: serde_json::to_value(&report)?,
    })
}

fn rows_json(rows: &[TableRow]) -> Value {
    rows.iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("subgroup".into(), r.subgroup.clone().into());
            m.insert("order".into(), r.order.into());
            for (d, v) in &r.values {
                m.insert(format!("H^{}", d.as_int()), v.to_string().into());
            }
            Value::Object(m)
        })
        .collect()
}

fn subgroups(g: &FiniteGroup, specs: &[String], max: usize) -> Result<Vec<Subgroup>> {
    if specs.iter().any(|s| s.trim() == "all") {
        return Ok(g.subgroup_classes(max)?.to_vec());
    }
    Ok(specs.iter().map(|s| g.parse_subgroup(s)).collect::<Result<_, Error>>()?)
}

fn cohomology_cmd(g: &str, lattice: &str, subs: &[String], degrees: &[i32], cli: &Cli) -> Result<Outcome> {
    let grp = group(g)?;
    let m = glattice::parse_lattice(&grp, lattice)?;
    let us = subgroups(&grp, subs, cli.max_group_order)?;
    let ds = degrees.iter().map(|&d| Degree::from_int(d)).collect::<Result<Vec<_>, Error>>()?;
    let rows = cohomology::cohomology_table(&m, &us, &ds)?;
    Ok(Outcome {
        value: json!({
            "schema": 1,
            "group": grp.spec(),
            "lattice": lattice,
            "rank": m.rank(),
            "rows": rows_json(&rows),
        }),
        failed: false,
    })
}

fn resolve(
    g: &str,
    h: &str,
    lattice: Option<&str>,
    target: Option<&str>,
    pad: Option<usize>,
    cli: &Cli,
) -> Result<Outcome> {
    let grp = group(g)?;
    let m: GLattice = match lattice {
        Some(spec) => glattice::parse_lattice(&grp, spec)?,
        None => glattice::chevalley_module(&grp, &grp.parse_subgroup(h)?)?,
    };
    let r = resolution::flabby_resolution(&m, cli.max_group_order)?;
    let exact = certify::verify_exact(&r.triple)?;
    let f = &r.triple.right;
    let fp = resolution::fingerprint_of(f, cli.max_group_order)?;
    let mut failed = !exact.ok;
    let mut out = json!({
        "schema": 1,
        "group": grp.spec(),
        "lattice": m.label(),
        "rank": m.rank(),
        "rank_p": r.triple.mid.rank(),
        "rank_f": f.rank(),
        "exact": exact.ok,
        "exactness_failures": exact.failures,
        "f_cohomology": rows_json(&fp.table),
        "resolution": r.triple.to_json(),
    });
    if let Some(t) = target {
        let targets = t
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| grp.parse_subgroup(s))
            .collect::<Result<Vec<_>, Error>>()?;
        let total: usize = targets.iter().map(|u| grp.index(u)).sum();
        let pad = match pad {
            Some(p) => p,
            None => total.checked_sub(f.rank()).ok_or_else(|| {
                Error::Parameter(format!("target rank {total} is below rank F = {}", f.rank()))
            })?,
        };
        let opts = SearchOptions {
            bound: cli.search_bound,
            ..SearchOptions::default()
        };
        let outcome = certify::stably_permutation_certificate(f, pad, &targets, opts)?;
        let (status, cert) = match &outcome {
            IsoOutcome::Found(iso) => (
                json!("found"),
                Some(Certificate::FlabbyClassZero {
                    resolution: r.triple.to_json(),
                    pad,
                    iso: iso.to_json(),
                }),
            ),
            IsoOutcome::NotIsomorphic { reason } => (json!({"not_isomorphic": reason}), None),
            IsoOutcome::Unknown { tried } => (json!({"unknown_after": tried}), None),
        };
        let verified = match &cert {
            Some(c) => c.verify()?,
            None => false,
        };
        failed |= !verified;
        out["stably_permutation"] = json!({
            "targets": targets.iter().map(|u| glattice::subgroup_name(&grp, u)).collect::<Vec<_>>(),
            "pad": pad,
            "search_bound": cli.search_bound,
            "outcome": status,
            "verified": verified,
            "certificate": cert,
        });
    }
    Ok(Outcome { value: out, failed })
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
    ms: u128,
}

fn selftest(cli: &Cli) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut run = |name: &str, f: &dyn Fn() -> Result<(bool, String)>| {
        let t = Instant::now();
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e:#}")));
        checks.push(Check {
            name: name.into(),
            passed,
            detail,
            ms: t.elapsed().as_millis(),
        });
    };
    for (case, n) in [
        (CaseId::MainIi, 6),
        (CaseId::MainI, 4),
        (CaseId::AppendixGalois, 3),
        (CaseId::AppendixC2, 3),
    ] {
        run(&format!("{case} n={n}"), &|| {
            let c = paperdihedral::build(case, n, &BuildOptions::new())?;
            let bad: Vec<&str> = c.claims.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            Ok((bad.is_empty(), format!("{} claims, failed: {bad:?}", c.claims.len())))
        });
    }
    run("decision table n=3..8", &|| {
        let mut wrong = Vec::new();
        for n in 3..=8usize {
            for h in ["1", "<x*y>"] {
                let c = classify::classify_str(&format!("dihedral:n={n}"), h, &ClassifyOptions::default())?;
                let sr = if h == "1" { n % 2 == 1 } else { n % 4 != 0 };
                let want = if sr { Verdict::StablyRational } else { Verdict::NotRetractRational };
                if c.verdict != want || !c.verify_certificates()? {
                    wrong.push(format!("n={n} H={h}"));
                }
            }
        }
        Ok((wrong.is_empty(), format!("mismatches: {wrong:?}")))
    });
    run("H^1 presentation vs bar on D6", &|| {
        let g = group("dihedral:n=6")?;
        let m = glattice::parse_lattice(&g, "J:<x*y> + I:<y>")?;
        let mut n = 0;
        for u in g.subgroup_classes(cli.max_group_order)? {
            if let Some(p) = cohomology::h1_presentation(u, &m) {
                if p != cohomology::h1_bar(u, &m)? {
                    return Ok((false, format!("disagree on {}", glattice::subgroup_name(&g, u))));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} subgroup classes agree")))
    });
    run("flabby resolution of J over D4", &|| {
        let g = group("dihedral:n=4")?;
        let j = glattice::parse_lattice(&g, "J:<x*y>")?;
        let r = resolution::flabby_resolution(&j, cli.max_group_order)?;
        let e = certify::verify_exact(&r.triple)?;
        Ok((e.ok, format!("rank P = {}, rank F = {}", r.triple.mid.rank(), r.triple.right.rank())))
    });
    let failed = checks.iter().any(|c| !c.passed);
    let value = json!({
        "schema": 1,
        "all_passed": !failed,
        "checks": checks
            .iter()
            .map(|c| {
                let mut v = json!({"name": c.name, "passed": c.passed, "detail": c.detail});
                if cli.timings {
                    v["ms"] = json!(c.ms as u64);
                }
                v
            })
            .collect::<Vec<_>>(),
    });
    Ok(Outcome { value, failed })
}
