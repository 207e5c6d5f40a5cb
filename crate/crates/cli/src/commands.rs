use confound::bayesnet::{forward_sample, DiscreteBayesNet, Factor};
use confound::intervention::{
    adjusted_estimate, effect_report, interventional_distribution, select_sufficient_confounders,
    true_effect, OutcomeValues, SelectOptions, SelectionMode, SizeMetric,
};
use confound::latent::{
    bias_scan, correlation_feasible, decompose_oriented, decompose_with_margin,
    third_correlation_interval, write_scan_csv, CommonCauseDecomposition, GridAxis, GridSpec,
    Orientation, ScanOptions, ScanRoles, ScanSummary, ScenarioParams, DEFAULT_MARGIN,
};
use serde_json::{json, Value};

use crate::output::{jnum, num, set, Table};
use crate::{
    bundled, exit, Assignment, CliError, Command, MetricArg, ModeArg, ModelFile, OrientationArg,
    Report,
};

type Out = Result<Report, CliError>;

fn ok(stdout: String) -> Out {
    Ok(Report {
        stdout,
        code: exit::OK,
    })
}

fn verdict(stdout: String, holds: bool) -> Out {
    Ok(Report {
        stdout,
        code: if holds { exit::OK } else { exit::FALSE },
    })
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

/// Drops empty names so that `--set ""` means the empty set.
fn names(v: &[String]) -> Vec<&str> {
    v.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect()
}

fn pairs(v: &[Assignment]) -> Vec<(&str, &str)> {
    v.iter().map(|a| (a.0.as_str(), a.1.as_str())).collect()
}

fn levels<'a>(
    net: &'a DiscreteBayesNet<f64>,
    treatment: &str,
    z1: &'a Option<String>,
    z0: &'a Option<String>,
) -> Result<(&'a str, &'a str), CliError> {
    let states = net.variable(treatment)?.states();
    let z1 = z1.as_deref().unwrap_or(states[states.len() - 1].as_str());
    let z0 = z0.as_deref().unwrap_or(states[0].as_str());
    Ok((z1, z0))
}

pub fn execute(command: &Command, as_json: bool) -> Out {
    match command {
        Command::Query {
            model,
            target,
            given,
        } => {
            let net = bundled::load(model)?;
            let mut targets = names(target);
            targets.sort_unstable();
            let f = net.query(&targets, &pairs(given))?;
            let cond: Vec<String> = given.iter().map(|a| format!("{}={}", a.0, a.1)).collect();
            let title = if cond.is_empty() {
                format!("p({})", targets.join(", "))
            } else {
                format!("p({} | {})", targets.join(", "), cond.join(", "))
            };
            ok(factor_output(&f, &title, as_json))
        }
        Command::Do {
            model,
            target,
            assign,
        } => {
            let net = bundled::load(model)?;
            let mut targets = names(target);
            targets.sort_unstable();
            let f = interventional_distribution(&net, &targets, &pairs(assign))?;
            let cond: Vec<String> = assign.iter().map(|a| format!("{}={}", a.0, a.1)).collect();
            let title = format!("p({} | do({}))", targets.join(", "), cond.join(", "));
            ok(factor_output(&f, &title, as_json))
        }
        Command::Ace {
            model,
            treatment,
            outcome,
            z1,
            z0,
            values,
        } => {
            let net = bundled::load(model)?;
            let (l1, l0) = levels(&net, treatment, z1, z0)?;
            let ov = if values.is_empty() {
                OutcomeValues::default_for(net.variable(outcome)?)
            } else {
                OutcomeValues::new(net.variable(outcome)?, values.clone())?
            };
            let v = confound::intervention::ace(&net, treatment, outcome, l1, l0, Some(&ov))?;
            if as_json {
                return ok(render_json(&json!({
                    "treatment": treatment, "outcome": outcome, "z1": l1, "z0": l0,
                    "outcome_values": ov.values().iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
                    "ace": jnum(v),
                })));
            }
            ok(format!(
                "ace = E[{outcome} | do({treatment}={l1})] - E[{outcome} | do({treatment}={l0})] = {}\n",
                num(v)
            ))
        }
        Command::Adjust {
            model,
            treatment,
            outcome,
            set: adj_set,
        } => {
            let net = bundled::load(model)?;
            let s = names(adj_set);
            let adj = adjusted_estimate(&net, treatment, outcome, &s)?;
            let truth = true_effect(&net, treatment, outcome)?;
            let admissible = net.dag().backdoor_admissible(treatment, outcome, &s)?;
            let gap = adj.max_abs_diff(&truth);
            let mut rows = Vec::new();
            let mut table = Table::new([
                treatment.as_str(),
                outcome.as_str(),
                "adjusted",
                "do",
                "diff",
            ]);
            for (z, level) in adj.treatment().states().iter().enumerate() {
                for (y, state) in adj.outcome().states().iter().enumerate() {
                    let (a, t) = (adj.row(z)[y], truth.row(z)[y]);
                    table.row([level.clone(), state.clone(), num(a), num(t), num(a - t)]);
                    rows.push(json!({"level": level, "state": state, "adjusted": jnum(a), "do": jnum(t), "diff": jnum(a - t)}));
                }
            }
            if as_json {
                return ok(render_json(&json!({
                    "treatment": treatment, "outcome": outcome, "set": s,
                    "backdoor_admissible": admissible, "rows": rows, "max_abs_diff": jnum(gap),
                })));
            }
            ok(format!(
                "adjusted p({outcome} | {treatment}) over {}\nbackdoor admissible: {admissible}\n{}max |adjusted - do| = {}\n",
                set(&s),
                table.render(),
                num(gap)
            ))
        }
        Command::Dsep { model, a, b, given } => {
            let net = bundled::load(model)?;
            let (a, b, g) = (names(a), names(b), names(given));
            let holds = net.dag().d_separated(&a, &b, &g)?;
            if as_json {
                return verdict(
                    render_json(&json!({"a": a, "b": b, "given": g, "d_separated": holds})),
                    holds,
                );
            }
            let phrase = if holds { "are" } else { "are not" };
            verdict(
                format!(
                    "{holds}: {} and {} {phrase} d-separated given {}\n",
                    set(&a),
                    set(&b),
                    set(&g)
                ),
                holds,
            )
        }
        Command::Backdoor {
            model,
            treatment,
            outcome,
            set: adj_set,
        } => {
            let net = bundled::load(model)?;
            let s = names(adj_set);
            let holds = net.dag().backdoor_admissible(treatment, outcome, &s)?;
            if as_json {
                return verdict(
                    render_json(
                        &json!({"treatment": treatment, "outcome": outcome, "set": s, "admissible": holds}),
                    ),
                    holds,
                );
            }
            let phrase = if holds {
                "satisfies"
            } else {
                "does not satisfy"
            };
            verdict(
                format!(
                    "{holds}: {} {phrase} the back-door criterion for {treatment} -> {outcome}\n",
                    set(&s)
                ),
                holds,
            )
        }
        Command::Select {
            model,
            treatment,
            outcome,
            mode,
            tol,
            metric,
        } => {
            let net = bundled::load(model)?;
            let options = SelectOptions {
                mode: match mode {
                    ModeArg::Graph => SelectionMode::Graphical,
                    ModeArg::Dist => SelectionMode::Distributional,
                },
                metric: match metric {
                    MetricArg::Sum => SizeMetric::Sum,
                    MetricArg::Product => SizeMetric::Product,
                },
                tolerance: *tol,
            };
            let sel = select_sufficient_confounders(&net, treatment, outcome, &options)?;
            if as_json {
                let audit: Vec<Value> = sel
                    .audit
                    .iter()
                    .map(|e| {
                        json!({"stage": e.stage, "subset": e.subset, "size": e.size as u64,
                               "holds": e.holds, "discrepancy": e.discrepancy.map(jnum)})
                    })
                    .collect();
                return ok(render_json(&json!({
                    "mode": sel.mode, "metric": sel.metric, "pool": sel.pool,
                    "stage1": sel.stage1, "chosen": sel.chosen, "audit": audit,
                })));
            }
            let mut table = Table::new(["stage", "subset", "size", "holds", "discrepancy"]);
            for e in &sel.audit {
                table.row([
                    e.stage.to_string(),
                    set(&e.subset),
                    e.size.to_string(),
                    e.holds.to_string(),
                    e.discrepancy.map(num).unwrap_or_else(|| "-".into()),
                ]);
            }
            let mode = match sel.mode {
                SelectionMode::Graphical => "graphical",
                SelectionMode::Distributional => "distributional",
            };
            let metric = match sel.metric {
                SizeMetric::Sum => "sum",
                SizeMetric::Product => "product",
            };
            ok(format!(
                "chosen: {}\nstage 1: {}\npool: {}\nmode: {mode}, metric: {metric}\naudit:\n{}",
                set(&sel.chosen),
                set(&sel.stage1),
                set(&sel.pool),
                table.render()
            ))
        }
        Command::Bias {
            model,
            treatment,
            outcome,
            covariate,
            z1,
            z0,
        } => {
            let net = bundled::load(model)?;
            let (l1, l0) = levels(&net, treatment, z1, z0)?;
            let cov = names(covariate);
            let report =
                effect_report(&net, treatment, outcome, std::slice::from_ref(&cov), l1, l0)?;
            let entry = &report.adjusted[0];
            let values = OutcomeValues::new(net.variable(outcome)?, report.outcome_values.clone())?;
            let (t, a, u) = (
                report.truth.expectations(&values),
                entry.table.expectations(&values),
                report.unadjusted.expectations(&values),
            );
            let states = report.truth.treatment().states();
            if as_json {
                let per_level: Vec<Value> = states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        json!({"level": s, "truth": jnum(t[i]), "adjusted": jnum(a[i]), "unadjusted": jnum(u[i]),
                               "err_adjusted": jnum(entry.level_errors[i]),
                               "err_unadjusted": jnum(report.unadjusted_level_errors[i])})
                    })
                    .collect();
                return ok(render_json(&json!({
                    "treatment": treatment, "outcome": outcome, "covariates": cov, "z1": l1, "z0": l0,
                    "conditioning_bias": jnum(entry.conditioning_bias),
                    "backdoor_admissible": entry.backdoor_admissible,
                    "levels": per_level,
                    "ace": {"truth": jnum(report.ace_true), "adjusted": jnum(entry.ace),
                            "unadjusted": jnum(report.ace_unadjusted), "err_adjusted": jnum(entry.ace_error),
                            "err_unadjusted": jnum(report.unadjusted_ace_error)},
                })));
            }
            let mut table = Table::new([
                "level",
                "truth",
                "adjusted",
                "unadjusted",
                "err_adjusted",
                "err_unadjusted",
            ]);
            for (i, s) in states.iter().enumerate() {
                table.row([
                    s.clone(),
                    num(t[i]),
                    num(a[i]),
                    num(u[i]),
                    num(entry.level_errors[i]),
                    num(report.unadjusted_level_errors[i]),
                ]);
            }
            table.row([
                "ace".to_string(),
                num(report.ace_true),
                num(entry.ace),
                num(report.ace_unadjusted),
                num(entry.ace_error),
                num(report.unadjusted_ace_error),
            ]);
            ok(format!(
                "bias of conditioning on {} for {treatment} -> {outcome} ({l1} vs {l0}) = {}\nbackdoor admissible: {}\nexpected {outcome}:\n{}",
                set(&cov),
                num(entry.conditioning_bias),
                entry.backdoor_admissible,
                table.render()
            ))
        }
        Command::Scan {
            template,
            param,
            set: fixed,
            out,
            serial,
            mi,
            treatment,
            outcome,
            covariate,
        } => {
            let mut base = ScenarioParams::<f64>::defaults(*template);
            for (name, v) in fixed {
                base.set(name, *v)?;
            }
            let axes = param
                .iter()
                .map(|a| GridAxis::range(a.name.clone(), a.start, a.stop, a.step))
                .collect::<confound::Result<Vec<_>>>()?;
            let grid = GridSpec::new(axes);
            let roles = ScanRoles {
                treatment: treatment.clone(),
                outcome: outcome.clone(),
                covariate: covariate.clone(),
                causes: template
                    .hidden_causes()
                    .map(|(u, w)| (u.to_string(), w.to_string())),
            };
            let options = ScanOptions {
                parallel: !serial,
                mutual_information: *mi,
                ..ScanOptions::default()
            };
            let results = bias_scan(&base, &grid, &roles, &options)?;
            let mut csv = Vec::new();
            write_scan_csv(&results, &mut csv)?;
            let Some(path) = out else {
                return ok(String::from_utf8(csv).expect("csv is utf-8"));
            };
            std::fs::write(path, &csv)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let summary = ScanSummary::from_results(&results);
            if as_json {
                let strata: Vec<Value> = summary
                    .strata
                    .iter()
                    .map(|((class, band), t)| {
                        json!({"interaction_class": class, "strength": band, "cells": t.cells,
                               "condition": t.condition, "ignore": t.ignore, "tie": t.tie,
                               "condition_fraction": jnum(t.condition_fraction())})
                    })
                    .collect();
                let o = &summary.overall;
                return ok(render_json(&json!({
                    "template": template.name(), "out": path.display().to_string(),
                    "cells": results.len(), "failed": summary.failed,
                    "overall": {"cells": o.cells, "condition": o.condition, "ignore": o.ignore, "tie": o.tie,
                                "condition_fraction": jnum(o.condition_fraction())},
                    "strata": strata,
                })));
            }
            ok(format!(
                "scanned {} cells of {} into {}\n{}",
                results.len(),
                template,
                path.display(),
                summary.render()
            ))
        }
        Command::Decompose {
            py,
            pyp,
            lo,
            hi,
            margin,
            orientation,
        } => {
            let orientation = match orientation {
                OrientationArg::Upper => Orientation::UpperIsT,
                OrientationArg::Lower => Orientation::LowerIsT,
            };
            let d = match (lo, hi) {
                (Some(lo), Some(hi)) => decompose_oriented(*py, *pyp, *lo, *hi, orientation)?,
                _ => {
                    decompose_with_margin(*py, *pyp, margin.unwrap_or(DEFAULT_MARGIN), orientation)?
                }
            };
            ok(decomposition_output(&d, as_json))
        }
        Command::Corr { r1, r2, r3 } => {
            let iv = third_correlation_interval(*r1, *r2)?;
            let feasible = r3.map(|r| correlation_feasible(r, *r1, *r2)).transpose()?;
            if as_json {
                let v = json!({"r1": jnum(*r1), "r2": jnum(*r2), "lo": jnum(iv.lo), "hi": jnum(iv.hi),
                               "excludes_zero": iv.excludes_zero(), "r3": r3.map(jnum), "feasible": feasible});
                return verdict(render_json(&v), feasible.unwrap_or(true));
            }
            let mut s = format!(
                "feasible interval for r3: [{}, {}]\n0 {}\n",
                num(iv.lo),
                num(iv.hi),
                if iv.excludes_zero() {
                    "excluded"
                } else {
                    "included"
                }
            );
            if let (Some(r), Some(f)) = (r3, feasible) {
                s.push_str(&format!(
                    "r3 = {}: {}\n",
                    num(*r),
                    if f { "feasible" } else { "infeasible" }
                ));
            }
            verdict(s, feasible.unwrap_or(true))
        }
        Command::Sample {
            model,
            n,
            seed,
            out,
        } => {
            let net = bundled::load(model)?;
            let data = forward_sample(&net, *n, *seed)?;
            let mut csv = Vec::new();
            data.write_csv(&mut csv)?;
            match out {
                None => ok(String::from_utf8(csv).expect("csv is utf-8")),
                Some(path) => {
                    std::fs::write(path, &csv)
                        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    if as_json {
                        return ok(render_json(
                            &json!({"rows": n, "seed": seed, "out": path.display().to_string()}),
                        ));
                    }
                    ok(format!(
                        "wrote {n} rows (seed {seed}) to {}\n",
                        path.display()
                    ))
                }
            }
        }
        Command::Show { model } => {
            let file = ModelFile::parse(&bundled::load_text(model)?)?;
            file.to_net()?;
            ok(file.to_text())
        }
    }
}

fn factor_output(f: &Factor<f64>, title: &str, as_json: bool) -> String {
    let vars: Vec<&str> = f.scope().iter().map(|v| v.name()).collect();
    if as_json {
        let rows: Vec<Value> = f
            .entries()
            .into_iter()
            .map(|(cfg, p)| {
                let states: Vec<&str> = cfg
                    .iter()
                    .zip(f.scope())
                    .map(|(&s, v)| v.state(s))
                    .collect();
                json!({"states": states, "p": jnum(p)})
            })
            .collect();
        return render_json(&json!({"distribution": title, "variables": vars, "rows": rows}));
    }
    let mut table = Table::new(vars.iter().copied().chain(["p"]));
    for (cfg, p) in f.entries() {
        let mut row: Vec<String> = cfg
            .iter()
            .zip(f.scope())
            .map(|(&s, v)| v.state(s).to_string())
            .collect();
        row.push(num(p));
        table.row(row);
    }
    format!("{title}\n{}", table.render())
}

fn decomposition_output(d: &CommonCauseDecomposition<f64>, as_json: bool) -> String {
    let c = d.check();
    if as_json {
        return render_json(&json!({
            "p_x_given_y": jnum(d.p_x_given_y), "p_x_given_yprime": jnum(d.p_x_given_yprime),
            "p_x_given_t": jnum(d.p_x_given_t), "p_x_given_tprime": jnum(d.p_x_given_tprime),
            "p_t_given_y": jnum(d.p_t_given_y), "p_t_given_yprime": jnum(d.p_t_given_yprime),
            "dissection_ratio": d.dissection_ratio().map(jnum),
            "residuals": {"reconstruction_y": jnum(c.reconstruction_y), "reconstruction_yprime": jnum(c.reconstruction_yprime),
                          "ratio_y": jnum(c.ratio_y), "ratio_yprime": jnum(c.ratio_yprime)},
            "max_residual": jnum(c.max_residual()),
        }));
    }
    let mut t = Table::new(["quantity", "value"]);
    for (k, v) in [
        ("p(x|y)", d.p_x_given_y),
        ("p(x|y')", d.p_x_given_yprime),
        ("p(x|t)", d.p_x_given_t),
        ("p(x|t')", d.p_x_given_tprime),
        ("p(t|y)", d.p_t_given_y),
        ("p(t'|y)", d.p_tprime_given_y()),
        ("p(t|y')", d.p_t_given_yprime),
        ("p(t'|y')", d.p_tprime_given_yprime()),
    ] {
        t.row([k.to_string(), num(v)]);
    }
    if let Some(r) = d.dissection_ratio() {
        t.row(["dissection ratio".to_string(), num(r)]);
    }
    let mut r = Table::new(["identity", "residual"]);
    for (k, v) in [
        ("reconstruction (y)", c.reconstruction_y),
        ("reconstruction (y')", c.reconstruction_yprime),
        ("ratio (y)", c.ratio_y),
        ("ratio (y')", c.ratio_yprime),
    ] {
        r.row([k.to_string(), num(v)]);
    }
    format!(
        "{}{}max residual: {}\n",
        t.render(),
        r.render(),
        num(c.max_residual())
    )
}
