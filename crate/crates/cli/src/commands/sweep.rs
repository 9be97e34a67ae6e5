//! `sweep`: hyperparameter grid driven by a JSON config, one CSV per
//! distribution plus a provenance manifest.

use std::fs;
use std::path::PathBuf;

use clap::Args as ClapArgs;
use rayon::prelude::*;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{build_config, spectrum_rows, ActArg, DistArg, KindArg, SPECTRUM_HEADER};
use crate::output::{CliError, CliResult};

#[derive(ClapArgs)]
pub struct Args {
    /// JSON sweep configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for the CSVs and manifest (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    distributions: Vec<String>,
    kinds: Vec<String>,
    activations: Vec<String>,
    depths: Vec<usize>,
    weight_vars: Vec<f64>,
    bias_vars: Vec<f64>,
    dims: Vec<usize>,
    degree_max: usize,
    /// Worker-thread count; `NEUROKERNEL_WORKERS` overrides it.
    #[serde(default)]
    workers: Option<usize>,
}

fn parse_dist(s: &str) -> CliResult<DistArg> {
    match s {
        "cube" => Ok(DistArg::Cube),
        "sphere" => Ok(DistArg::Sphere),
        "gaussian" => Ok(DistArg::Gaussian),
        other => Err(CliError::usage(format!("unknown distribution {other:?}"))),
    }
}

fn parse_kind(s: &str) -> CliResult<KindArg> {
    match s {
        "ck" => Ok(KindArg::Ck),
        "ntk" => Ok(KindArg::Ntk),
        other => Err(CliError::usage(format!("unknown kernel kind {other:?}"))),
    }
}

fn parse_act(s: &str) -> CliResult<ActArg> {
    match s {
        "relu" => Ok(ActArg::Relu),
        "erf" => Ok(ActArg::Erf),
        other => Err(CliError::usage(format!("unknown activation {other:?}"))),
    }
}

struct Cell {
    dist: DistArg,
    kind: KindArg,
    act: ActArg,
    depth: usize,
    sigw2: f64,
    sigb2: f64,
    d: usize,
}

pub fn run(args: &Args) -> CliResult<()> {
    let raw = fs::read(&args.config)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.config.display())))?;
    let config: SweepConfig = serde_json::from_slice(&raw)
        .map_err(|e| CliError::usage(format!("invalid sweep config: {e}")))?;
    validate(&config)?;

    // deterministic cell order: the nested grid order below; rows are
    // emitted in this order regardless of which worker computed them
    let mut cells: Vec<Cell> = Vec::new();
    for dist in &config.distributions {
        let dist = parse_dist(dist)?;
        for kind in &config.kinds {
            let kind = parse_kind(kind)?;
            for act in &config.activations {
                let act = parse_act(act)?;
                for &depth in &config.depths {
                    for &sigw2 in &config.weight_vars {
                        for &sigb2 in &config.bias_vars {
                            for &d in &config.dims {
                                if d < 3 && dist != DistArg::Cube {
                                    return Err(CliError::usage(format!(
                                        "distribution {} needs d >= 3, got {d}",
                                        dist.name()
                                    )));
                                }
                                cells.push(Cell { dist, kind, act, depth, sigw2, sigb2, d });
                            }
                        }
                    }
                }
            }
        }
    }

    let workers = match std::env::var("NEUROKERNEL_WORKERS") {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| {
            CliError::usage(format!("NEUROKERNEL_WORKERS must be a positive integer, got {v:?}"))
        })?),
        Err(_) => config.workers,
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            if w == 0 {
                return Err(CliError::usage("worker count must be >= 1"));
            }
            b = b.num_threads(w);
        }
        b.build().map_err(|e| CliError::usage(format!("thread pool: {e}")))?
    };

    let computed: Vec<Result<Vec<String>, neurokernel::Error>> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                let cfg = build_config(c.kind, c.act, c.depth, c.sigw2, c.sigb2);
                spectrum_rows(c.dist, &cfg, c.d, config.degree_max)
            })
            .collect()
    });

    fs::create_dir_all(&args.out_dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    let result = write_outputs(args, &config, &raw, &cells, &computed, &mut written);
    if result.is_err() {
        // no partial artifacts on failure
        for p in written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

fn validate(c: &SweepConfig) -> CliResult<()> {
    let grids: [(&str, usize); 7] = [
        ("distributions", c.distributions.len()),
        ("kinds", c.kinds.len()),
        ("activations", c.activations.len()),
        ("depths", c.depths.len()),
        ("weight_vars", c.weight_vars.len()),
        ("bias_vars", c.bias_vars.len()),
        ("dims", c.dims.len()),
    ];
    for (name, len) in grids {
        if len == 0 {
            return Err(CliError::usage(format!("sweep grid {name:?} is empty")));
        }
    }
    Ok(())
}

fn write_outputs(
    args: &Args,
    config: &SweepConfig,
    raw_config: &[u8],
    cells: &[Cell],
    computed: &[Result<Vec<String>, neurokernel::Error>],
    written: &mut Vec<PathBuf>,
) -> CliResult<()> {
    for (cell, rows) in cells.iter().zip(computed) {
        if let Err(e) = rows {
            return Err(CliError::from(e.clone()).with_context(format!(
                "cell {} depth {} d {}",
                cell.dist.name(),
                cell.depth,
                cell.d
            )));
        }
    }
    let mut manifest_files = Vec::new();
    for dist in [DistArg::Cube, DistArg::Sphere, DistArg::Gaussian] {
        let rows: Vec<&String> = cells
            .iter()
            .zip(computed)
            .filter(|(c, _)| c.dist == dist)
            .flat_map(|(_, r)| r.as_ref().expect("checked above"))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let path = args.out_dir.join(format!("{}.csv", dist.name()));
        let mut text = String::from(SPECTRUM_HEADER);
        text.push('\n');
        for row in &rows {
            text.push_str(row);
            text.push('\n');
        }
        fs::write(&path, text)?;
        written.push(path.clone());
        manifest_files.push(serde_json::json!({
            "file": format!("{}.csv", dist.name()),
            "rows": rows.len(),
        }));
    }
    let manifest = serde_json::json!({
        "config_sha256": format!("{:x}", Sha256::digest(raw_config)),
        "library_version": env!("CARGO_PKG_VERSION"),
        "degree_max": config.degree_max,
        "cells": cells.len(),
        "outputs": manifest_files,
    });
    let manifest_path = args.out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("valid json"))?;
    written.push(manifest_path);
    Ok(())
}

impl CliError {
    fn with_context(self, ctx: String) -> CliError {
        CliError { code: self.code, message: format!("{ctx}: {}", self.message) }
    }
}
