//! Drive the batch front end from code: extract and frequency runs on a
//! minimal config, written to a temporary directory.

use junction_lab::cli::{run, Command, RunConfig, RunOptions};

fn main() -> junction_lab::Result<()> {
    let cfg = RunConfig::from_json(r#"{"coefficients": {"p": "0", "q": "0"}, "arc": "cos(t/2)"}"#)?;
    let out = std::env::temp_dir().join("junction-lab-example");
    let opts = RunOptions::resolve(&cfg, Some(out), None, 0);
    for cmd in [Command::Extract, Command::Frequency] {
        for f in run(cmd, &cfg, &opts)? {
            println!("wrote {}", f.display());
        }
    }
    println!("{}", std::fs::read_to_string(opts.out.join("extract.json"))?);
    Ok(())
}
