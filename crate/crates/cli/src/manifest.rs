use std::path::{Path, PathBuf};

use fqgraph::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Command;

/// Everything needed to reproduce a run: the arguments, digests of the input
/// files, and the field sizes, shard, output path and seed they select.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, without `--manifest`.
    pub args: Vec<String>,
    pub inputs: Vec<InputFile>,
    pub fields: Vec<u64>,
    pub shard: Option<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub version: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

fn digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn input_file(path: &Path) -> Result<InputFile> {
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: digest(path)?,
    })
}

/// Input files named by a graph argument; named graphs have none.
fn graph_inputs(spec: &str) -> Result<Vec<InputFile>> {
    let path = Path::new(spec);
    if path.is_file() {
        Ok(vec![input_file(path)?])
    } else {
        Ok(Vec::new())
    }
}

/// `argv` without the `--manifest` option and its value.
fn strip_manifest(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for arg in argv {
        if skip {
            skip = false;
        } else if arg == "--manifest" {
            skip = true;
        } else if !arg.starts_with("--manifest=") {
            out.push(arg.clone());
        }
    }
    out
}

impl RunManifest {
    pub fn record(argv: &[String], command: &Command) -> Result<RunManifest> {
        let args = strip_manifest(argv.get(1..).unwrap_or_default());
        let mut fields = Vec::new();
        let mut shard = None;
        let mut seed = None;
        let (name, inputs) = match command {
            Command::Psi { graph, .. } => ("psi", graph_inputs(graph)?),
            Command::Count(a) => {
                fields.push(a.q);
                shard = a.shard.clone();
                ("count", vec![input_file(&a.system)?])
            }
            Command::Merge { records } => ("merge", records.iter().map(|p| input_file(p)).collect::<Result<_>>()?),
            Command::Reduce(a) => {
                fields = a.certify_q.clone();
                let inputs = if a.system {
                    vec![input_file(Path::new(&a.input))?]
                } else {
                    graph_inputs(&a.input)?
                };
                ("reduce", inputs)
            }
            Command::Replay { report } => ("replay", vec![input_file(report)?]),
            Command::Interp(a) => ("interp", vec![input_file(&a.samples)?]),
            Command::Amplitude(a) => {
                fields = a.q.clone();
                ("amplitude", graph_inputs(&a.graph)?)
            }
            Command::Corpus(a) => {
                seed = (a.random > 0).then_some(a.seed);
                ("corpus", Vec::new())
            }
            Command::C2(a) => {
                fields = a.q.clone();
                ("c2", graph_inputs(&a.graph)?)
            }
            Command::Scan { .. } => ("scan", Vec::new()),
            Command::Zeta(a) => ("zeta", a.report.iter().map(|p| input_file(p)).collect::<Result<_>>()?),
            Command::Rerun { manifest } => ("rerun", vec![input_file(manifest)?]),
        };
        let output = args
            .iter()
            .position(|a| a == "--output" || a == "-o")
            .and_then(|i| args.get(i + 1))
            .map(PathBuf::from);
        Ok(RunManifest {
            command: name.to_string(),
            args,
            inputs,
            fields,
            shard,
            output,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Checks the recorded input digests and runs the recorded arguments again.
pub fn rerun(path: &Path, run: fn(&[String]) -> Result<()>) -> Result<()> {
    let manifest: RunManifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    for input in &manifest.inputs {
        let now = digest(&input.path)?;
        if now != input.sha256 {
            return Err(Error::InvalidInput(format!(
                "{} changed since the manifest was recorded",
                input.path.display()
            )));
        }
    }
    let mut argv = vec!["fqgraph".to_string()];
    argv.extend(manifest.args);
    run(&argv)
}
