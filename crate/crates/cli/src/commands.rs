//! Subcommand handlers.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use kari_core::automaton::{self, Configuration, FiniteGroup};
use kari_core::entropy::{self, WordSet};
use kari_core::freegroup::{self, events, BallPattern};
use kari_core::hilbert::{self, SubstTile, Variant};
use kari_core::io;
use kari_core::tiles::{self, DirectedTileSet, Grid, Orient, Rule6Variant, Topology, Validity};
use kari_core::{Cell, Error};
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::{
    CaCmd, Cli, Command, EntropyCmd, EventArg, Format, FreegroupCmd, GridInput, HilbertCmd, OutputArgs, Rule6,
    TilesCmd, TopologyArg, WindowArgs,
};

pub fn run(cli: &Cli) -> Result<()> {
    let spec = serde_json::to_value(&cli.command)?;
    match &cli.command {
        Command::Hilbert(c) => hilbert_cmd(c),
        Command::Tiles(c) => tiles_cmd(c),
        Command::Ca(c) => ca_cmd(c),
        Command::Entropy(c) => entropy_cmd(c, &spec),
        Command::Freegroup(c) => freegroup_cmd(c, &spec),
    }
}

fn emit(out: &OutputArgs, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &OutputArgs, value: &Value) -> Result<()> {
    emit(out, serde_json::to_string_pretty(value)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn rule6(v: Rule6) -> Rule6Variant {
    match v {
        Rule6::A => Rule6Variant::Literal,
        Rule6::B => Rule6Variant::Corrected,
    }
}

/// Resolves a tile-set name, swapping the Kari reading when requested.
fn tileset(name: &str, variant: Option<Rule6>) -> Result<Arc<DirectedTileSet>> {
    let name = match (name, variant) {
        ("kari" | "kari-literal", Some(Rule6::A)) => "kari-literal",
        ("kari" | "kari-literal", Some(Rule6::B)) => "kari",
        (n, _) => n,
    };
    Ok(DirectedTileSet::by_name(name)?)
}

fn adjust_grid(grid: Grid, input: &GridInput) -> Result<Grid> {
    let mut grid = match input.topology {
        Some(TopologyArg::Window) => grid.with_topology(Topology::Window),
        Some(TopologyArg::Torus) => grid.with_topology(Topology::Torus),
        None => grid,
    };
    if input.rule6_variant.is_some() {
        grid.tileset = tileset(grid.tileset.name(), input.rule6_variant)?;
    }
    Ok(grid)
}

fn load_config(input: &GridInput, group: &str) -> Result<Configuration> {
    let group: FiniteGroup = group.parse()?;
    let mut config = io::configuration_or_grid_from_json(&read(&input.input)?, Arc::new(group))?;
    config.grid = adjust_grid(config.grid, input)?;
    Ok(config)
}

fn load_grid(input: &GridInput) -> Result<Grid> {
    let text = read(&input.input)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    let grid = if value.get("gamma").is_some() {
        io::configuration_from_json(&text)?.grid
    } else {
        io::grid_from_json(&text)?
    };
    adjust_grid(grid, input)
}

fn parse_pair(s: &str, sep: char, what: &str) -> Result<(i64, i64)> {
    let parsed = s.split_once(sep).and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    match parsed {
        Some(p) => Ok(p),
        None => Err(Error::InvalidArgument(format!("{what} must look like `a{sep}b`, got `{s}`")).into()),
    }
}

fn window_size(s: &str) -> Result<(usize, usize)> {
    let (w, h) = parse_pair(s, 'x', "window")?;
    if w <= 0 || h <= 0 {
        bail!(Error::InvalidArgument(format!("window `{s}` must be positive")));
    }
    Ok((w as usize, h as usize))
}

fn window_cells(args: &WindowArgs) -> Result<Vec<Cell>> {
    let (w, h) = window_size(&args.window)?;
    let (x0, y0) = parse_pair(&args.origin, ',', "origin")?;
    Ok((0..h as i64).flat_map(|y| (0..w as i64).map(move |x| Cell::new(x0 + x, y0 + y))).collect())
}

fn list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad list entry `{t}`")).into()))
        .collect()
}

fn ratio(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn hilbert_cmd(cmd: &HilbertCmd) -> Result<()> {
    match cmd {
        HilbertCmd::Path { variant, level, format, out } => {
            let path = hilbert::hilbert_path(variant.parse()?, *level)?;
            emit(
                out,
                match format {
                    Format::Csv => io::path_to_csv(&path),
                    Format::Json => io::path_to_json(&path),
                },
            )
        }
        HilbertCmd::Substitute { tile, steps, out } => {
            let grid = hilbert::iterate(SubstTile::parse(tile)?, *steps)?;
            emit(out, io::subst_grid_to_json(&grid))
        }
        HilbertCmd::Derive { input, out } => {
            let block = io::subst_grid_from_json(&read(input)?)?;
            let d = hilbert::derive(&block)?;
            let preimage: Value = serde_json::from_str(&io::subst_grid_to_json(&d.preimage))?;
            emit_json(out, &json!({ "shift": [d.shift.0, d.shift.1], "preimage": preimage }))
        }
        HilbertCmd::Lemma5 { variant, level, n, out } => {
            let path = hilbert::hilbert_path(variant.parse()?, *level)?;
            let report = hilbert::square_fill_report(&path, *n);
            emit_json(out, &serde_json::to_value(report)?)
        }
        HilbertCmd::Alphabet { out } => emit_json(out, &io::subst_catalog()),
    }
}

fn validity_name(v: Validity) -> &'static str {
    match v {
        Validity::Valid => "valid",
        Validity::Invalid => "invalid",
        Validity::Unknown => "unknown",
    }
}

fn tiles_cmd(cmd: &TilesCmd) -> Result<()> {
    match cmd {
        TilesCmd::Enumerate { tileset: name, rule6_variant, out } => {
            emit_json(out, &io::tile_catalog(&*tileset(name, *rule6_variant)?))
        }
        TilesCmd::Validate { grid, out } => {
            let grid = load_grid(grid)?;
            let cells: Vec<&str> = (0..grid.len()).map(|i| validity_name(grid.validity(i))).collect();
            let count = |s: &str| cells.iter().filter(|&&c| c == s).count();
            emit_json(
                out,
                &json!({
                    "tileset": grid.tileset.name(),
                    "width": grid.width,
                    "height": grid.height,
                    "valid": count("valid"),
                    "invalid": count("invalid"),
                    "unknown": count("unknown"),
                    "cells": cells,
                }),
            )
        }
        TilesCmd::Bxy { level, orient, label, framed, rule6_variant, out } => {
            let orient: Orient = orient.parse()?;
            let label: Variant = label.parse()?;
            let variant = rule6_variant.map(rule6).unwrap_or_default();
            let grid = if *framed {
                tiles::build_bxy_framed(*level, orient, label, variant)?.grid
            } else {
                let mut g = tiles::build_bxy(*level, orient, label)?;
                g.tileset = tileset("kari", *rule6_variant)?;
                g
            };
            emit(out, io::grid_to_json(&grid))
        }
        TilesCmd::Trace { grid, start, max_length, out } => {
            let grid = load_grid(grid)?;
            let (x, y) = parse_pair(start, ',', "start")?;
            let trace = tiles::trace_path(&grid, Cell::new(x, y), *max_length)?;
            emit_json(out, &serde_json::to_value(trace)?)
        }
        TilesCmd::Components { grid, out } => {
            let grid = load_grid(grid)?;
            let comps = tiles::path_components(&grid);
            emit_json(out, &json!({ "count": comps.len(), "components": comps }))
        }
    }
}

fn ca_cmd(cmd: &CaCmd) -> Result<()> {
    match cmd {
        CaCmd::Step { grid, group, steps, out } => {
            let mut config = load_config(grid, group)?;
            let mut snapshots = Vec::with_capacity(*steps);
            for _ in 0..*steps {
                config = if config.m > 1 { automaton::step_sliced(&config) } else { automaton::step(&config) };
                snapshots.push(config.clone());
            }
            emit(out, io::configurations_to_json_lines(&snapshots))
        }
        CaCmd::Preimage { grid, group, window, out } => {
            let target = load_config(grid, group)?;
            let pre = automaton::preimage(&target, &window_cells(window)?)?;
            emit(out, io::configuration_to_json(&pre))
        }
        CaCmd::Word { grid, group, window, horizon, out } => {
            let config = load_config(grid, group)?;
            let word = automaton::trajectory_word(&config, &window_cells(window)?, *horizon)?;
            emit_json(out, &serde_json::to_value(word)?)
        }
    }
}

/// Word counts per horizon with an entropy-rate fit, as JSON or CSV.
fn word_report(spec: &Value, rows: &[WordSet], format: Format, out: &OutputArgs) -> Result<()> {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.horizon as f64, r.log_count())).collect();
    let rate = if points.len() >= 2 { Some(entropy::entropy_rate(&points)?) } else { None };
    match format {
        Format::Json => emit_json(
            out,
            &json!({
                "command": spec,
                "rows": rows,
                "log_counts": points.iter().map(|p| p.1).collect::<Vec<_>>(),
                "rate": rate,
                "slope_over_log2": rate.as_ref().map(|r| r.slope / std::f64::consts::LN_2),
            }),
        ),
        Format::Csv => {
            let mut text = format!("# {}\nhorizon,distinct,log_count,dependency_size,total\n", spec);
            for r in rows {
                text += &format!("{},{},{},{},{}\n", r.horizon, r.distinct, r.log_count(), r.dependency_size, r.total);
            }
            emit(out, text)
        }
    }
}

fn entropy_cmd(cmd: &EntropyCmd, spec: &Value) -> Result<()> {
    match cmd {
        EntropyCmd::Exact { grid, group, window, horizon, m, budget, format, out } => {
            let grid = load_grid(grid)?;
            let group = Arc::new(group.parse::<FiniteGroup>()?);
            let cells = window_cells(window)?;
            let rows = (1..=*horizon)
                .map(|t| entropy::count_words_exact(&grid, &group, &cells, t, *m, *budget))
                .collect::<kari_core::Result<Vec<_>>>()?;
            word_report(spec, &rows, *format, out)
        }
        EntropyCmd::Sampled { grid, group, window, horizon, m, samples, seed, format, out } => {
            let grid = load_grid(grid)?;
            let group = Arc::new(group.parse::<FiniteGroup>()?);
            let cells = window_cells(window)?;
            let rows = (1..=*horizon)
                .map(|t| entropy::count_words_sampled(&grid, &group, &cells, t, *m, *samples, *seed))
                .collect::<kari_core::Result<Vec<_>>>()?;
            word_report(spec, &rows, *format, out)
        }
        EntropyCmd::Rate { input, out } => {
            let mut points = Vec::new();
            for (i, line) in read(input)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let parsed =
                    line.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
                match parsed {
                    Some(p) => points.push(p),
                    None if i == 0 => continue,
                    None => bail!(Error::Schema(format!("line {}: expected `horizon,value`", i + 1))),
                }
            }
            let est = entropy::entropy_rate(&points)?;
            emit_json(out, &json!({ "command": spec, "estimate": est }))
        }
        EntropyCmd::Periodicity { grid, group, window, bound, budget, out } => {
            let grid = load_grid(grid)?;
            let group: FiniteGroup = group.parse()?;
            let period = entropy::periodicity_check(&grid, &group, &window_cells(window)?, *bound, *budget)?;
            emit_json(out, &json!({ "command": spec, "period": period }))
        }
        EntropyCmd::Measure { tileset: name, rule6_variant, group, window, horizon, samples, seed, out } => {
            let set = tileset(name, *rule6_variant)?;
            let group = Arc::new(group.parse::<FiniteGroup>()?);
            let est = entropy::measure_entropy_estimate(&set, &group, window_size(window)?, *horizon, *samples, *seed)?;
            emit_json(
                out,
                &json!({
                    "command": spec,
                    "estimate": est,
                    "slope_over_log2": est.slope / std::f64::consts::LN_2,
                }),
            )
        }
        EntropyCmd::Survival { tileset: name, rule6_variant, windows, thresholds, samples, seed, format, out } => {
            let set = tileset(name, *rule6_variant)?;
            let table = entropy::valid_path_survival(&set, &list(windows)?, &list(thresholds)?, *samples, *seed)?;
            match format {
                Format::Json => emit_json(out, &json!({ "command": spec, "table": table })),
                Format::Csv => {
                    let mut text = format!("# {}\nthreshold,window,probability,hits,samples,seed\n", spec);
                    for r in &table.rows {
                        text += &format!(
                            "{},{},{},{},{},{}\n",
                            r.threshold, r.window, r.probability, r.hits, r.samples, r.seed
                        );
                    }
                    emit(out, text)
                }
            }
        }
        EntropyCmd::Constants { out } => {
            let c = entropy::report_constants();
            emit_json(out, &json!({ "epsilon": ratio(c.epsilon), "M": c.m, "refined": c.refined }))
        }
    }
}

fn event_row<F>(name: &str, (cells, pred): (Vec<freegroup::Word>, F)) -> Result<Value>
where
    F: Fn(&[u8]) -> bool + Sync,
{
    let p = freegroup::exact_event_probability(&cells, pred)?;
    Ok(json!({ "event": name, "cells": cells, "probability": ratio(p) }))
}

fn freegroup_cmd(cmd: &FreegroupCmd, spec: &Value) -> Result<()> {
    match cmd {
        FreegroupCmd::Prob { event, out } => {
            use events::PairReading::*;
            let want = |e: EventArg| {
                matches!(event, EventArg::All) || std::mem::discriminant(event) == std::mem::discriminant(&e)
            };
            let mut rows = Vec::new();
            if want(EventArg::Disagreement) {
                rows.push(event_row("disagreement", events::disagreement())?);
            }
            if want(EventArg::Preimage) {
                rows.push(event_row("preimage", events::disagreement_preimage())?);
            }
            for (arg, name, reading) in [
                (EventArg::PairsExclusive, "pairs-exclusive", Exclusive),
                (EventArg::PairsBoth, "pairs-both", Both),
                (EventArg::PairsEither, "pairs-either", Either),
            ] {
                if want(arg) {
                    rows.push(event_row(name, events::pair_disagreement(reading))?);
                }
            }
            emit_json(out, &json!({ "command": spec, "events": rows }))
        }
        FreegroupCmd::Preimage { input, window_radius, out } => {
            let target: BallPattern = serde_json::from_str(&read(input)?).map_err(|e| Error::Schema(e.to_string()))?;
            target.validate()?;
            let r = window_radius.unwrap_or(target.radius);
            if r > target.radius {
                bail!(Error::InvalidArgument(format!("window radius {r} exceeds pattern radius {}", target.radius)));
            }
            let window = freegroup::ball(r);
            let pre = freegroup::preimage_on_tree(&target, &window)?;
            emit_json(out, &serde_json::to_value(pre)?)
        }
    }
}
