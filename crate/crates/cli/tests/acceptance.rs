//! Acceptance run: one PASS/FAIL line per criterion, each against its time bound.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use confound::bayesnet::{Cpt, DiscreteBayesNet, Factor, Variable};
use confound::intervention::{
    adjusted_estimate, conditioning_bias, effect_report, select_sufficient_confounders,
    true_effect, unadjusted_estimate, SelectOptions,
};
use confound::latent::{
    decompose_common_cause, decompose_oriented, Orientation, ScenarioParams, Template,
};
use confound::{Dag, Error};
use confound_cli::bundled;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_confound"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random strictly positive rows on the structure of `net`.
fn reparameterize(rng: &mut StdRng, net: &DiscreteBayesNet<f64>) -> DiscreteBayesNet<f64> {
    let cpts: Vec<Cpt<f64>> = net
        .cpts()
        .iter()
        .map(|c| {
            let table = c
                .rows()
                .iter()
                .map(|row| {
                    let w: Vec<f64> = row.iter().map(|_| rng.random_range(0.05..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect();
            Cpt::new(c.child(), c.parents().iter().cloned(), table)
        })
        .collect();
    DiscreteBayesNet::from_parts(net.variables().to_vec(), &net.dag().edges(), cpts).unwrap()
}

fn random_scenario(rng: &mut StdRng, template: Template) -> DiscreteBayesNet<f64> {
    let mut sp = ScenarioParams::defaults(template);
    for name in template.parameter_names() {
        sp.set(&name, rng.random_range(0.02..=0.98)).unwrap();
    }
    sp.build().unwrap()
}

fn random_net(rng: &mut StdRng, n: usize) -> DiscreteBayesNet<f64> {
    let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.random_bool(0.5) {
                edges.push((names[order[i]].clone(), names[order[j]].clone()));
            }
        }
    }
    let dag = Dag::new(names.clone(), &edges).unwrap();
    let variables: Vec<Variable> = (0..n)
        .map(|i| Variable::new(names[i].clone(), (0..2 + i % 2).map(|s| s.to_string())).unwrap())
        .collect();
    let cpts = (0..n)
        .map(|i| {
            let parents = dag.parent_indices(i);
            let rows: usize = parents
                .iter()
                .map(|&p| variables[p].cardinality())
                .product();
            let table = (0..rows)
                .map(|_| {
                    let w: Vec<f64> = (0..variables[i].cardinality())
                        .map(|_| rng.random_range(0.05..1.0))
                        .collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect();
            Cpt::new(
                names[i].clone(),
                parents.iter().map(|&p| names[p].clone()),
                table,
            )
        })
        .collect();
    DiscreteBayesNet::from_parts(variables, &edges, cpts).unwrap()
}

fn subsets(items: &[String]) -> Vec<Vec<String>> {
    (0..1usize << items.len())
        .map(|m| {
            (0..items.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| items[i].clone())
                .collect()
        })
        .collect()
}

fn c1_correlation_anchor() -> Check {
    let out = bin()
        .args(["--json", "corr", "--r1", "0.8", "--r2", "0.7"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("exit {:?}", out.status.code())
    })?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    let r = 0.1836f64.sqrt();
    ensure(
        (lo - (0.56 - r)).abs() < 1e-9 && (hi - (0.56 + r)).abs() < 1e-9,
        || format!("[{lo}, {hi}]"),
    )?;
    ensure(v["excludes_zero"] == true && lo > 0.0, || {
        "interval contains 0".into()
    })?;
    Ok(format!("[{lo}, {hi}] excludes 0"))
}

fn c2_m_bias() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    let mut biased = 0;
    for _ in 0..1000 {
        let net = random_scenario(&mut rng, Template::ModelB);
        let truth = true_effect(&net, "Z", "Y").unwrap();
        let gap = unadjusted_estimate(&net, "Z", "Y")
            .unwrap()
            .max_abs_diff(&truth);
        ensure(gap < 1e-12, || format!("unadjusted differs by {gap}"))?;
        if adjusted_estimate(&net, "Z", "Y", &["X"])
            .unwrap()
            .max_abs_diff(&truth)
            > 1e-6
        {
            biased += 1;
        }
    }
    ensure(biased >= 950, || {
        format!("only {biased}/1000 adjusted draws biased")
    })?;
    Ok(format!(
        "unadjusted exact in 1000/1000, adjusted biased in {biased}/1000"
    ))
}

fn c3_backdoor_soundness() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut checked = 0;
    for (name, _) in bundled::MODELS {
        let net = bundled::load(name).unwrap();
        let others: Vec<String> = net
            .variables()
            .iter()
            .map(|v| v.name().to_string())
            .filter(|n| n != "Z" && n != "Y")
            .collect();
        let admissible: Vec<Vec<String>> = subsets(&others)
            .into_iter()
            .filter(|s| net.dag().backdoor_admissible("Z", "Y", s).unwrap())
            .collect();
        for _ in 0..100 {
            let net = reparameterize(&mut rng, &net);
            let truth = true_effect(&net, "Z", "Y").unwrap();
            for s in &admissible {
                let gap = adjusted_estimate(&net, "Z", "Y", s)
                    .unwrap()
                    .max_abs_diff(&truth);
                ensure(gap < 1e-10, || format!("{name} {s:?}: {gap}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} (graph, set, parameterization) triples exact"
    ))
}

fn c4_bias_identity() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let net = random_net(&mut rng, 5);
        let cov = [format!("N{}", 2 + trial % 3)];
        let report = effect_report(&net, "N0", "N1", &[cov.to_vec()], "1", "0").unwrap();
        let formula = conditioning_bias(&net, "N0", "N1", &cov, "1", "0", None).unwrap();
        let gap = (report.adjusted[0].ace - report.ace_unadjusted - formula).abs();
        worst = worst.max(gap);
    }
    ensure(worst < 1e-12, || format!("max gap {worst:e}"))?;
    Ok(format!("1000 nets, max gap {worst:e}"))
}

fn c5_decomposition() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut rejected = 0;
    for _ in 0..10_000 {
        let mut v: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
        v.sort_by(f64::total_cmp);
        let (lo, hi) = (v[0], v[3]);
        let (py, pyp) = if rng.random_bool(0.5) {
            (v[1], v[2])
        } else {
            (v[2], v[1])
        };
        for o in [Orientation::UpperIsT, Orientation::LowerIsT] {
            let d = decompose_oriented(py, pyp, lo, hi, o).map_err(|e| e.to_string())?;
            worst = worst.max(d.check().max_residual());
        }
        if hi > lo {
            match decompose_common_cause(py, pyp, hi, lo) {
                Err(Error::InfeasibleEndpoints(_)) => rejected += 1,
                other => return Err(format!("swapped endpoints gave {other:?}")),
            }
        }
    }
    ensure(worst < 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!(
        "max residual {worst:e}, {rejected} swapped orderings rejected"
    ))
}

fn c6_selection() -> Check {
    let mut rng = StdRng::seed_from_u64(6);
    for (name, want) in [
        ("fig1_left", vec!["X"]),
        ("fig1_right", vec![]),
        ("fig2_model1", vec!["W", "X"]),
    ] {
        let base = bundled::load(name).unwrap();
        let sel =
            select_sufficient_confounders(&base, "Z", "Y", &SelectOptions::graphical()).unwrap();
        let mut got = sel.chosen.clone();
        got.sort();
        ensure(got == want, || format!("{name}: chose {got:?}"))?;
        for _ in 0..100 {
            let net = reparameterize(&mut rng, &base);
            let sel =
                select_sufficient_confounders(&net, "Z", "Y", &SelectOptions::graphical()).unwrap();
            let truth = true_effect(&net, "Z", "Y").unwrap();
            let gap = adjusted_estimate(&net, "Z", "Y", &sel.chosen)
                .unwrap()
                .max_abs_diff(&truth);
            ensure(gap < 1e-10, || {
                format!("{name}: {:?} off by {gap}", sel.chosen)
            })?;
        }
    }
    Ok("{X}, {}, {W, X}; exact on 300 parameterizations".into())
}

fn c7_double_failure() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let mut parts = Vec::new();
    for template in [Template::ModelC, Template::ModelD] {
        let mut both = 0;
        for _ in 0..1000 {
            let net = random_scenario(&mut rng, template);
            let report = effect_report(&net, "Z", "Y", &[vec!["X"]], "1", "0").unwrap();
            let adj = &report.adjusted[0].level_errors;
            let unadj = &report.unadjusted_level_errors;
            if adj
                .iter()
                .zip(unadj)
                .any(|(a, u)| a.abs() > 1e-6 && u.abs() > 1e-6)
            {
                both += 1;
            }
        }
        ensure(both >= 950, || format!("{template}: {both}/1000"))?;
        parts.push(format!("{template} {both}/1000"));
    }
    Ok(parts.join(", "))
}

fn sample_csv(path: &Path) -> Result<Vec<u8>, String> {
    let status = bin()
        .args([
            "sample",
            "fig1_left",
            "-n",
            "1000000",
            "--seed",
            "7",
            "--out",
        ])
        .arg(path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        String::from_utf8_lossy(&status.stderr).into_owned()
    })?;
    std::fs::read(path).map_err(|e| e.to_string())
}

fn c8_sampling() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = sample_csv(&dir.path().join("a.csv"))?;
    let b = sample_csv(&dir.path().join("b.csv"))?;
    ensure(a == b, || "runs differ".into())?;
    let net = bundled::load("fig1_left").unwrap();
    let exact = net.joint().unwrap();
    let text = std::str::from_utf8(&a).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let pos: Vec<usize> = header.iter().map(|h| exact.position(h).unwrap()).collect();
    let mut counts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut n = 0.0;
    for line in lines {
        let mut cfg = vec![0; pos.len()];
        for (k, cell) in line.split(',').enumerate() {
            cfg[pos[k]] = exact.scope()[pos[k]]
                .state_index(cell)
                .map_err(|e| e.to_string())?;
        }
        *counts.entry(cfg).or_default() += 1.0;
        n += 1.0;
    }
    ensure(n == 1e6, || format!("{n} rows"))?;
    let values = exact
        .entries()
        .iter()
        .map(|(cfg, _)| counts.get(cfg).copied().unwrap_or(0.0) / n)
        .collect();
    let empirical = Factor::new(exact.scope().to_vec(), values).unwrap();
    let tv = empirical.total_variation(&exact).unwrap();
    ensure(tv < 0.01, || format!("TV {tv}"))?;
    Ok(format!("TV {tv:.5}, {} identical bytes", a.len()))
}

fn scan(dir: &Path, file: &str, serial: bool) -> Result<(Vec<u8>, String), String> {
    let path = dir.join(file);
    let mut cmd = bin();
    cmd.args([
        "scan",
        "--template",
        "modelD",
        "--param",
        "p_w_u1=0.05:0.95:0.1",
        "--param",
        "p_x_u1w1=0.05:0.95:0.1",
        "--out",
    ])
    .arg(&path);
    if serial {
        cmd.arg("--serial");
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let csv = std::fs::read(&path).map_err(|e| e.to_string())?;
    Ok((csv, String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn c9_scan() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (par, summary) = scan(dir.path(), "par.csv", false)?;
    let (ser, _) = scan(dir.path(), "ser.csv", true)?;
    ensure(par == ser, || "parallel and serial CSV differ".into())?;
    let rows = par.iter().filter(|&&b| b == b'\n').count() - 1;
    ensure(rows == 100, || format!("{rows} cells"))?;
    ensure(summary.contains("condition_frac"), || {
        "summary lacks the condition fraction".into()
    })?;
    for line in summary.lines() {
        println!("    {line}");
    }
    Ok("100 cells, parallel == serial".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("correlation bound anchor", 1, c1_correlation_anchor),
        ("M-bias identity", 10, c2_m_bias),
        ("back-door soundness", 10, c3_backdoor_soundness),
        ("bias-formula identity", 10, c4_bias_identity),
        ("decomposition identities", 5, c5_decomposition),
        ("confounder selection", 30, c6_selection),
        ("models C/D double failure", 20, c7_double_failure),
        ("Monte Carlo consistency", 30, c8_sampling),
        ("scan determinism and report", 60, c9_scan),
    ];
    let mut failed = 0;
    for (i, (name, bound, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let line = match result {
            Ok(detail) if elapsed < Duration::from_secs(bound) => {
                format!(
                    "PASS {}. {name} ({:.2}s < {bound}s): {detail}",
                    i + 1,
                    elapsed.as_secs_f64()
                )
            }
            Ok(detail) => {
                failed += 1;
                format!(
                    "FAIL {}. {name} ({:.2}s >= {bound}s): {detail}",
                    i + 1,
                    elapsed.as_secs_f64()
                )
            }
            Err(why) => {
                failed += 1;
                format!(
                    "FAIL {}. {name} ({:.2}s): {why}",
                    i + 1,
                    elapsed.as_secs_f64()
                )
            }
        };
        println!("{line}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
