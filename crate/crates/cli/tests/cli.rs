use std::process::{Command, Output};

use confound::latent::{ScenarioParams, Template};
use confound_cli::{bundled, run, ModelFile};

fn confound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confound"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(args: &[&str]) -> i32 {
    let mut full = vec!["confound"];
    full.extend_from_slice(args);
    match run(full) {
        Ok(r) => r.code,
        Err(e) => e.code,
    }
}

#[test]
fn do_query_on_fig1_left() {
    let o = confound(&["do", "fig1_left", "--target", "Y", "--do", "Z=1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "p(Y | do(Z=1))\nY  p\n0  0.25\n1  0.75\n");
    let o = confound(&["query", "fig1_left", "--target", "Y", "--given", "Z=1"]);
    assert_eq!(stdout(&o), "p(Y | Z=1)\nY  p\n0  0.16\n1  0.84\n");
    let o = confound(&["ace", "fig1_left", "--treatment", "Z", "--outcome", "Y"]);
    assert!(stdout(&o).ends_with("= 0.45\n"));
}

#[test]
fn verdicts_use_exit_codes() {
    let o = confound(&["dsep", "modelB", "--a", "Z", "--b", "W"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("true"));
    let o = confound(&["dsep", "modelB", "--a", "Z", "--b", "W", "--given", "X"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("false"));
    assert_eq!(
        code(&["backdoor", "modelB", "--treatment", "Z", "--outcome", "Y"]),
        0
    );
    assert_eq!(
        code(&[
            "backdoor",
            "modelB",
            "--treatment",
            "Z",
            "--outcome",
            "Y",
            "--set",
            "X"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "backdoor",
            "fig2_model1",
            "--treatment",
            "Z",
            "--outcome",
            "Y",
            "--set",
            "X,W"
        ]),
        0
    );
    assert_eq!(
        code(&["corr", "--r1", "0.1", "--r2", "0.1", "--r3", "-0.99"]),
        1
    );
    assert_eq!(
        code(&["corr", "--r1", "0.1", "--r2", "0.1", "--r3", "0.5"]),
        0
    );
}

#[test]
fn correlation_output() {
    let o = confound(&["corr", "--r1", "0.8", "--r2", "0.7"]);
    assert_eq!(
        stdout(&o),
        "feasible interval for r3: [0.131514294287, 0.988485705713]\n0 excluded\n"
    );
}

#[test]
fn error_classes_map_to_exit_codes() {
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["do", "fig1_left", "--target", "Y"]), 2);
    assert_eq!(code(&["show", "no_such_model"]), 2);
    assert_eq!(code(&["dsep", "modelB", "--a", "Q", "--b", "W"]), 2);
    assert_eq!(
        code(&[
            "decompose",
            "--py",
            "0.3",
            "--pyp",
            "0.6",
            "--lo",
            "0.5",
            "--hi",
            "0.9"
        ]),
        4
    );
    assert_eq!(code(&["sample", "fig1_left", "-n", "0"]), 2);
    assert_eq!(code(&["--help"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.model");
    std::fs::write(&bad, "{\n  \"variables\": [,]\n}\n").unwrap();
    let o = confound(&["show", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let sums = bundled::text("fig1_left")
        .unwrap()
        .replacen("[0.5,0.5]", "[0.5,0.6]", 1);
    assert_ne!(sums, bundled::text("fig1_left").unwrap());
    std::fs::write(&bad, sums).unwrap();
    assert_eq!(code(&["show", bad.to_str().unwrap()]), 3);
}

#[test]
fn positivity_violation_is_a_math_error() {
    let net = ScenarioParams::<f64>::defaults(Template::Model1Fig1)
        .with("p_z_x1", 1.0)
        .unwrap()
        .build()
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degenerate.model");
    std::fs::write(&path, ModelFile::from_net(&net).to_text()).unwrap();
    let o = confound(&[
        "adjust",
        path.to_str().unwrap(),
        "--treatment",
        "Z",
        "--outcome",
        "Y",
        "--set",
        "X",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bundled_models_are_canonical_and_match_templates() {
    for (name, text) in bundled::MODELS {
        let file = ModelFile::parse(text).unwrap();
        assert_eq!(file.to_text(), text, "{name}");
        file.to_net().unwrap();
    }
    for (name, template) in [
        ("fig1_left", Template::Model1Fig1),
        ("fig1_right", Template::Model2Fig1),
        ("fig2_model1", Template::Model1Fig2),
        ("modelA_observed", Template::ModelA),
        ("modelB", Template::ModelB),
        ("modelC", Template::ModelC),
        ("modelD", Template::ModelD),
    ] {
        let from_template = ScenarioParams::<f64>::defaults(template).build().unwrap();
        let bundled = bundled::load(name).unwrap();
        let (a, b) = (bundled.joint().unwrap(), from_template.joint().unwrap());
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "{name}");
    }
}

#[test]
fn show_round_trips_every_example() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in bundled::MODELS {
        let path = dir.path().join(format!("{name}.model"));
        std::fs::write(&path, text).unwrap();
        let o = confound(&["show", path.to_str().unwrap()]);
        assert_eq!(stdout(&o), text);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: [&[&str]; 4] = [
        &["sample", "modelD", "-n", "2000", "--seed", "11"],
        &[
            "scan",
            "--template",
            "modelB",
            "--param",
            "p_x_u1w1=0.1:0.9:0.2",
            "--mi",
        ],
        &[
            "--json",
            "select",
            "fig2_model1",
            "--treatment",
            "Z",
            "--outcome",
            "Y",
            "--mode",
            "dist",
        ],
        &[
            "bias",
            "modelB",
            "--treatment",
            "Z",
            "--outcome",
            "Y",
            "--covariate",
            "X",
        ],
    ];
    for args in runs {
        let (a, b) = (confound(args), confound(args));
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.contains(&b'\r'));
    }
    let o = confound(&["sample", "fig1_left", "-n", "5", "--seed", "7"]);
    assert!(stdout(&o).starts_with("X,Z,Y\n"));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn json_mode_matches_text_numbers() {
    let o = confound(&["--json", "do", "fig1_left", "--target", "Y", "--do", "Z=1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][1]["p"], 0.75);
    assert_eq!(v["rows"][1]["states"][0], "1");
    let o = confound(&[
        "--json",
        "bias",
        "modelB",
        "--treatment",
        "Z",
        "--outcome",
        "Y",
        "--covariate",
        "X",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["conditioning_bias"], -0.0340810604449);
    assert_eq!(v["backdoor_admissible"], false);
}

#[test]
fn selection_and_adjustment_on_fig2() {
    let o = confound(&[
        "select",
        "fig2_model1",
        "--treatment",
        "Z",
        "--outcome",
        "Y",
    ]);
    assert!(stdout(&o).starts_with("chosen: {W, X}\n"));
    let o = confound(&[
        "adjust",
        "fig2_model1",
        "--treatment",
        "Z",
        "--outcome",
        "Y",
        "--set",
        "X",
    ]);
    assert!(stdout(&o).contains("0.342376468757"));
    let o = confound(&[
        "adjust",
        "fig1_right",
        "--treatment",
        "Z",
        "--outcome",
        "Y",
        "--set",
        "",
    ]);
    assert!(stdout(&o).contains("backdoor admissible: true"));
    assert!(stdout(&o).ends_with("max |adjusted - do| = 0\n"));
}

#[test]
fn decompose_reports_small_residuals() {
    let o = confound(&[
        "--json",
        "decompose",
        "--py",
        "0.3",
        "--pyp",
        "0.6",
        "--lo",
        "0.1",
        "--hi",
        "0.9",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p_t_given_y"], 0.25);
    assert_eq!(v["p_t_given_yprime"], 0.625);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-12);
    let o = confound(&[
        "decompose",
        "--py",
        "0.3",
        "--pyp",
        "0.6",
        "--orientation",
        "lower",
    ]);
    assert!(stdout(&o).contains("p(t|y)            0.875"));
}
