//! Command-line cases with committed expected output, shared by the golden
//! test and the acceptance suite.

use std::path::PathBuf;
use std::process::Command;

const WORD_PROBLEM: &str = r#"{"alphabet":{"levels":[[[0],[1]]],"zero":[0]},"mode":"unsigned","k":1,"colours":2,"lengths":[2,4]}"#;
const PIPELINE_PROBLEM: &str = r#"{"alphabet":{"levels":[[[0],[1]]],"zero":[0]},"mode":"unsigned","k":1,"lengths":[2,3],"samples":8,"seed":3}"#;

pub struct Case {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub code: i32,
}

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "span_two_blocks",
            args: vec![
                "span",
                "--mode",
                "unsigned",
                "--k",
                "1",
                "--blocks",
                r#"[{"entries":[[0,1]]},{"entries":[[1,1]]}]"#,
            ],
            code: 0,
        },
        Case {
            name: "span_signed_limited",
            args: vec![
                "span",
                "--mode",
                "signed",
                "--k",
                "2",
                "--blocks",
                r#"[{"entries":[[0,2]]},{"entries":[[1,-1],[2,2]]}]"#,
                "--limit",
                "5",
            ],
            code: 0,
        },
        Case {
            name: "search_exhausted",
            args: vec![
                "search", "--mode", "unsigned", "--k", "1", "--N", "2", "--m", "2", "--colours", "2",
                "--family", "min-position-mod",
            ],
            code: 3,
        },
        Case {
            name: "search_witness",
            args: vec![
                "search", "--mode", "unsigned", "--k", "1", "--N", "4", "--m", "2", "--colours", "2",
                "--family", "support-size-mod",
            ],
            code: 0,
        },
        Case {
            name: "search_random_parallel",
            args: vec![
                "search", "--mode", "signed", "--k", "1", "--N", "4", "--m", "2", "--radius", "1",
                "--colours", "3", "--family", "random", "--seed", "11", "--parallel",
            ],
            code: 0,
        },
        Case {
            name: "search_words",
            args: vec!["search", "--kind", "word", "--family", "length-mod", "--problem", WORD_PROBLEM],
            code: 0,
        },
        Case {
            name: "pipeline_matrix_bit",
            args: vec![
                "pipeline",
                "--problem",
                PIPELINE_PROBLEM,
                "--family",
                "matrix-bit",
                "--verify",
            ],
            code: 0,
        },
        Case {
            name: "selftest",
            args: vec!["selftest"],
            code: 0,
        },
    ]
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.out"))
}

pub fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gowers"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exited normally"),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}
