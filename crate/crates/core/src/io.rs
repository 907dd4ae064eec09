//! Interchange formats: Grid and Configuration JSON, ball patterns, paths
//! and tile catalogs.
//!
//! Grids are row-major with north at row 0. Substitution tilings use the
//! same layout with tile set `hilbert12`, whose identifiers index the
//! sorted substitution alphabet.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automaton::{Configuration, FiniteGroup};
use crate::error::{Error, Result};
use crate::hilbert::{alphabet, SubstGrid, SubstTile};
use crate::lattice::Cell;
use crate::tiles::{kari_tiles, DirectedTileSet, Grid, Topology};

/// Tile set name used for substitution tilings.
pub const SUBST_TILESET: &str = "hilbert12";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridJson {
    tileset: String,
    topology: Topology,
    width: usize,
    height: usize,
    cells: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigurationJson {
    tileset: String,
    topology: Topology,
    width: usize,
    height: usize,
    cells: Vec<u32>,
    group: String,
    gamma: Vec<u32>,
    phase: u32,
    m: u32,
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

fn grid_json(grid: &Grid) -> GridJson {
    GridJson {
        tileset: grid.tileset.name().to_string(),
        topology: grid.topology,
        width: grid.width,
        height: grid.height,
        cells: grid.cells.clone(),
    }
}

pub fn grid_to_json(grid: &Grid) -> String {
    serde_json::to_string(&grid_json(grid)).expect("grid serializes")
}

pub fn grid_from_json(text: &str) -> Result<Grid> {
    let g: GridJson = serde_json::from_str(text).map_err(schema)?;
    let tileset = DirectedTileSet::by_name(&g.tileset).map_err(|e| Error::Schema(e.to_string()))?;
    Grid::new(tileset, g.topology, g.width, g.height, g.cells)
}

pub fn configuration_to_json(config: &Configuration) -> String {
    let g = grid_json(&config.grid);
    let c = ConfigurationJson {
        tileset: g.tileset,
        topology: g.topology,
        width: g.width,
        height: g.height,
        cells: g.cells,
        group: config.group.name().to_string(),
        gamma: config.gamma.clone(),
        phase: config.phase,
        m: config.m,
    };
    serde_json::to_string(&c).expect("configuration serializes")
}

pub fn configuration_from_json(text: &str) -> Result<Configuration> {
    let c: ConfigurationJson = serde_json::from_str(text).map_err(schema)?;
    let tileset = DirectedTileSet::by_name(&c.tileset).map_err(|e| Error::Schema(e.to_string()))?;
    let grid = Grid::new(tileset, c.topology, c.width, c.height, c.cells)?;
    let group: FiniteGroup = c.group.parse().map_err(|e: Error| Error::Schema(e.to_string()))?;
    Configuration::sliced(grid, Arc::new(group), c.gamma, c.phase, c.m)
}

/// Parses either a Configuration or a bare Grid (identity group values,
/// the given group).
pub fn configuration_or_grid_from_json(text: &str, group: Arc<FiniteGroup>) -> Result<Configuration> {
    let value: Value = serde_json::from_str(text).map_err(schema)?;
    if value.get("gamma").is_some() {
        configuration_from_json(text)
    } else {
        Ok(Configuration::identity(grid_from_json(text)?, group))
    }
}

/// One JSON document per line.
pub fn configurations_to_json_lines(configs: &[Configuration]) -> String {
    configs.iter().map(|c| configuration_to_json(c) + "\n").collect()
}

pub fn configurations_from_json_lines(text: &str) -> Result<Vec<Configuration>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(configuration_from_json).collect()
}

fn subst_index(tile: &SubstTile) -> u32 {
    alphabet().iter().position(|t| t == tile).expect("tile in alphabet") as u32
}

/// Substitution tiling as Grid JSON; row 0 is the top (`y = height − 1`).
pub fn subst_grid_to_json(grid: &SubstGrid) -> String {
    let mut cells = Vec::with_capacity(grid.cells.len());
    for row in 0..grid.height {
        let y = grid.height - 1 - row;
        cells.extend((0..grid.width).map(|x| subst_index(&grid.at(x, y))));
    }
    let g = GridJson {
        tileset: SUBST_TILESET.into(),
        topology: Topology::Window,
        width: grid.width,
        height: grid.height,
        cells,
    };
    serde_json::to_string(&g).expect("grid serializes")
}

pub fn subst_grid_from_json(text: &str) -> Result<SubstGrid> {
    let g: GridJson = serde_json::from_str(text).map_err(schema)?;
    if g.tileset != SUBST_TILESET {
        return Err(Error::Schema(format!("expected tile set `{SUBST_TILESET}`, got `{}`", g.tileset)));
    }
    if g.width == 0 || g.height == 0 || g.cells.len() != g.width * g.height {
        return Err(Error::Schema("cell count does not match dimensions".into()));
    }
    let tiles: Vec<SubstTile> = alphabet().iter().copied().collect();
    if let Some(&bad) = g.cells.iter().find(|&&c| c as usize >= tiles.len()) {
        return Err(Error::UnknownTile(format!("{bad} (tile set `{SUBST_TILESET}`)")));
    }
    Ok(SubstGrid::from_fn(g.width, g.height, |x, y| tiles[g.cells[(g.height - 1 - y) * g.width + x] as usize]))
}

pub fn path_to_json(path: &[Cell]) -> String {
    let pairs: Vec<[i64; 2]> = path.iter().map(|c| [c.x, c.y]).collect();
    serde_json::to_string(&pairs).expect("path serializes")
}

pub fn path_from_json(text: &str) -> Result<Vec<Cell>> {
    let pairs: Vec<[i64; 2]> = serde_json::from_str(text).map_err(schema)?;
    Ok(pairs.into_iter().map(|[x, y]| Cell::new(x, y)).collect())
}

/// CSV with header `step,x,y`.
pub fn path_to_csv(path: &[Cell]) -> String {
    let mut out = String::from("step,x,y\n");
    for (i, c) in path.iter().enumerate() {
        writeln!(out, "{i},{},{}", c.x, c.y).expect("write to string");
    }
    out
}

/// Label tuples per tile identifier.
pub fn tile_catalog(tileset: &DirectedTileSet) -> Value {
    if tileset.kari_rules().is_some() {
        let entries: Vec<Value> = kari_tiles()
            .iter()
            .enumerate()
            .map(|(id, t)| {
                let mut v = serde_json::to_value(t).expect("tile serializes");
                v["id"] = json!(id);
                v
            })
            .collect();
        return json!({ "tileset": tileset.name(), "tiles": entries });
    }
    let entries: Vec<Value> = (0..tileset.len() as u32)
        .map(|id| {
            json!({
                "id": id,
                "direction": tileset.direction(id).letter().to_string(),
                "valid": tileset.fixed_validity(id),
            })
        })
        .collect();
    json!({ "tileset": tileset.name(), "tiles": entries })
}

/// The substitution alphabet with its identifiers.
pub fn subst_catalog() -> Value {
    let entries: Vec<Value> =
        alphabet().iter().enumerate().map(|(id, t)| json!({ "id": id, "name": t.name(), "tile": t })).collect();
    json!({ "tileset": SUBST_TILESET, "tiles": entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{ball, BallPattern};
    use crate::hilbert::{hilbert_path, iterate, Variant};
    use crate::tiles::build_bxy;
    use proptest::prelude::*;

    #[test]
    fn grid_round_trip() {
        let grid = build_bxy(2, "NE".parse().unwrap(), Variant::A).unwrap();
        let text = grid_to_json(&grid);
        assert_eq!(grid_from_json(&text).unwrap(), grid);
        assert!(text.starts_with("{\"tileset\":\"kari\""));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(grid_from_json("{}"), Err(Error::Schema(_))));
        let bad = r#"{"tileset":"simple2","topology":"window","width":2,"height":1,"cells":[0]}"#;
        assert!(matches!(grid_from_json(bad), Err(Error::Schema(_))));
        let unknown = r#"{"tileset":"simple2","topology":"window","width":1,"height":1,"cells":[7]}"#;
        assert!(matches!(grid_from_json(unknown), Err(Error::UnknownTile(_))));
        let set = r#"{"tileset":"nope","topology":"window","width":1,"height":1,"cells":[0]}"#;
        assert!(matches!(grid_from_json(set), Err(Error::Schema(_))));
    }

    #[test]
    fn configuration_round_trip_and_lines() {
        let set = DirectedTileSet::by_name("stop2").unwrap();
        let grid = Grid::new(set, Topology::Torus, 3, 2, vec![0, 1, 2, 2, 1, 0]).unwrap();
        let group = Arc::new(FiniteGroup::cyclic(3).unwrap());
        let c = Configuration::sliced(grid, group.clone(), vec![0, 1, 2, 1, 0, 2], 1, 2).unwrap();
        let text = configuration_to_json(&c);
        assert_eq!(configuration_from_json(&text).unwrap(), c);
        let lines = configurations_to_json_lines(&[c.clone(), c.clone()]);
        assert_eq!(lines.lines().count(), 2);
        assert_eq!(configurations_from_json_lines(&lines).unwrap(), vec![c.clone(), c.clone()]);
        let g = configuration_or_grid_from_json(&grid_to_json(&c.grid), group).unwrap();
        assert_eq!(g.gamma, vec![0; 6]);
    }

    #[test]
    fn subst_round_trip() {
        let t = *alphabet().iter().next().unwrap();
        let g = iterate(t, 2).unwrap();
        assert_eq!(subst_grid_from_json(&subst_grid_to_json(&g)).unwrap(), g);
        assert_eq!(subst_catalog()["tiles"].as_array().unwrap().len(), 12);
    }

    #[test]
    fn path_formats() {
        let p = hilbert_path(Variant::A, 1).unwrap();
        assert_eq!(path_to_json(&p), "[[0,0],[0,1],[1,1],[1,0]]");
        assert_eq!(path_from_json(&path_to_json(&p)).unwrap(), p);
        assert_eq!(path_to_csv(&p), "step,x,y\n0,0,0\n1,0,1\n2,1,1\n3,1,0\n");
    }

    #[test]
    fn ball_pattern_json() {
        let text = serde_json::to_string(&BallPattern::zeros(1)).unwrap();
        assert_eq!(text, r#"{"radius":1,"values":{"":0,"a":0,"b":0,"A":0,"B":0}}"#);
        let back: BallPattern = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.values.len(), ball(1).len());
    }

    #[test]
    fn catalogs() {
        let k = tile_catalog(&DirectedTileSet::kari(Default::default()));
        assert_eq!(k["tiles"].as_array().unwrap().len(), 50432);
        let s = tile_catalog(&DirectedTileSet::with_stop());
        assert_eq!(s["tiles"][2]["valid"], json!(false));
    }

    proptest! {
        #[test]
        fn random_configurations_round_trip(
            w in 1usize..6, h in 1usize..6, torus in any::<bool>(), m in 1u32..4, seed in any::<u64>()
        ) {
            let set = DirectedTileSet::by_name("stop2").unwrap();
            let mut s = seed;
            let mut next = |k: u64| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); ((s >> 33) % k) as u32 };
            let cells = (0..w * h).map(|_| next(3)).collect();
            let topology = if torus { Topology::Torus } else { Topology::Window };
            let grid = Grid::new(set, topology, w, h, cells).unwrap();
            let gamma = (0..w * h).map(|_| next(3)).collect();
            let phase = next(m as u64);
            let c = Configuration::sliced(grid, Arc::new(FiniteGroup::cyclic(3).unwrap()), gamma, phase, m).unwrap();
            prop_assert_eq!(configuration_from_json(&configuration_to_json(&c)).unwrap(), c);
        }
    }
}
