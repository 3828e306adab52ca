//! Runs a batch problem file through the command-line front end in-process.

use std::io::Write;

fn main() -> std::io::Result<()> {
    let batch = r#"[
        {"command": "check", "class": "cm", "orders": [0, 1, 2], "values": [2, 1, 1]},
        {"command": "witness", "class": "mm", "orders": [0, 1, 2], "values": [1, 1, 1]},
        {"command": "moment-bound", "class": "cm", "r": 2, "orders": [0, 2], "values": [1, 1], "p": 1},
        {"command": "extremal-dist", "orders": [0, 1], "r": 1, "values": [1, 1], "A": -0.5}
    ]"#;
    let path = std::env::temp_dir().join("kolmo_batch_example.json");
    std::fs::File::create(&path)?.write_all(batch.as_bytes())?;

    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["kolmo", "run", "--file", path.to_str().unwrap(), "--pretty"];
    let code = kolmo::cli::run(args, &mut out, &mut err);
    std::io::stdout().write_all(&out)?;
    std::io::stderr().write_all(&err)?;
    println!("exit code {code}");
    std::fs::remove_file(path)
}
