//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The plain functions return `Result<_, String>` and are tested natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use std::cell::RefCell;

use crystal_basis::{expand_group, BasisDocument, BasisSet, CosetGroup, GroupDatabase, GroupKey, LatticeCell, OrbitMetric};
use wasm_bindgen::prelude::*;

const MAX_GRID: usize = 512;
const MAX_RADIUS: u32 = 12;

thread_local! {
    static CACHE: RefCell<Option<(String, u32, BasisSet)>> = const { RefCell::new(None) };
}

fn group(key: &str) -> Result<CosetGroup, String> {
    let key: GroupKey = key.parse().expect("infallible");
    let spec = GroupDatabase::bundled().get(2, &key).map_err(|e| e.to_string())?;
    expand_group(spec).map_err(|e| e.to_string())
}

fn with_basis<T>(key: &str, radius: u32, f: impl FnOnce(&BasisSet) -> Result<T, String>) -> Result<T, String> {
    if radius > MAX_RADIUS {
        return Err(format!("radius is limited to {MAX_RADIUS} in the demo"));
    }
    CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let hit = matches!(&*cache, Some((k, r, _)) if k == key && *r == radius);
        if !hit {
            let basis = BasisSet::build(&group(key)?, radius).map_err(|e| e.to_string())?;
            *cache = Some((key.to_string(), radius, basis));
        }
        f(&cache.as_ref().unwrap().2)
    })
}

fn check_grid(grid: usize) -> Result<(), String> {
    if grid == 0 || grid > MAX_GRID {
        return Err(format!("grid must be between 1 and {MAX_GRID}"));
    }
    Ok(())
}

/// `[{"number": 1, "symbol": "p1"}, ...]` for the wallpaper groups.
pub fn wallpaper_groups_json() -> String {
    let list: Vec<serde_json::Value> = GroupDatabase::bundled()
        .in_dim(2)
        .map(|s| serde_json::json!({ "number": s.number, "symbol": s.symbol, "lattice": s.bravais.to_string() }))
        .collect();
    serde_json::to_string(&list).expect("serializable")
}

/// Orbit listing, the same document the CLI `basis` command writes.
pub fn basis_summary_json(key: &str, radius: u32) -> Result<String, String> {
    with_basis(key, radius, |b| Ok(serde_json::to_string(&BasisDocument::new(b)).expect("serializable")))
}

/// Interleaved `(re, im)` values of basis function `index` on a `grid × grid`
/// raster of the fractional unit square, row `j` holding `x2 = j / grid`.
pub fn basis_heatmap(key: &str, radius: u32, index: usize, grid: usize) -> Result<Vec<f64>, String> {
    check_grid(grid)?;
    with_basis(key, radius, |b| {
        if index >= b.len() {
            return Err(format!("basis index {index} out of range (size {})", b.len()));
        }
        let mut out = Vec::with_capacity(2 * grid * grid);
        for j in 0..grid {
            for i in 0..grid {
                let x = [i as f64 / grid as f64, j as f64 / grid as f64];
                let v = b.evaluate_orbit(index, &x).map_err(|e| e.to_string())?;
                out.push(v.re);
                out.push(v.im);
            }
        }
        Ok(out)
    })
}

/// `d_G(x, p)` on a `grid × grid` raster, using the unit cell of the
/// group's lattice type (square/rectangular/oblique cells are unit square,
/// hexagonal cells have a 120° angle).
pub fn orbit_distance_field(key: &str, px: f64, py: f64, grid: usize) -> Result<Vec<f64>, String> {
    check_grid(grid)?;
    let g = group(key)?;
    let cell = LatticeCell::reference(2, &g.spec().bravais);
    let metric = OrbitMetric::new(&g, &cell, 1).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(grid * grid);
    for j in 0..grid {
        for i in 0..grid {
            let x = [i as f64 / grid as f64, j as f64 / grid as f64];
            out.push(metric.distance(&x, &[px, py]).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// Images of `(px, py)` under the coset group, wrapped into the unit
/// square, as a flat `[x0, y0, x1, y1, ...]` list.
pub fn orbit_points(key: &str, px: f64, py: f64) -> Result<Vec<f64>, String> {
    let g = group(key)?;
    let mut out = Vec::with_capacity(2 * g.order());
    for op in g.elements() {
        let y = op.act_on_point(&[px, py]).map_err(|e| e.to_string())?;
        out.extend(y.iter().map(|v| crystal_basis::metric::wrap_unit(*v)));
    }
    Ok(out)
}

#[wasm_bindgen(js_name = wallpaperGroups)]
pub fn wallpaper_groups() -> String {
    wallpaper_groups_json()
}

#[wasm_bindgen(js_name = basisSummary)]
pub fn basis_summary(group: &str, radius: u32) -> Result<String, JsValue> {
    basis_summary_json(group, radius).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = basisHeatmap)]
pub fn basis_heatmap_js(group: &str, radius: u32, index: usize, grid: usize) -> Result<Vec<f64>, JsValue> {
    basis_heatmap(group, radius, index, grid).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = orbitDistanceField)]
pub fn orbit_distance_field_js(group: &str, px: f64, py: f64, grid: usize) -> Result<Vec<f64>, JsValue> {
    orbit_distance_field(group, px, py, grid).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = orbitPoints)]
pub fn orbit_points_js(group: &str, px: f64, py: f64) -> Result<Vec<f64>, JsValue> {
    orbit_points(group, px, py).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_all_wallpaper_groups() {
        let v: serde_json::Value = serde_json::from_str(&wallpaper_groups_json()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 17);
        assert_eq!(v[16]["symbol"], "p6m");
    }

    #[test]
    fn pg_heatmap_matches_closed_form() {
        let grid = 8;
        let h = basis_heatmap("pg", 2, 1, grid).unwrap();
        assert_eq!(h.len(), 2 * grid * grid);
        for j in 0..grid {
            for i in 0..grid {
                let x1 = i as f64 / grid as f64;
                let re = h[2 * (j * grid + i)];
                assert!((re - 2.0 * (std::f64::consts::TAU * x1).cos()).abs() < 1e-12);
            }
        }
        assert!(basis_heatmap("pg", 2, 999, grid).is_err());
        assert!(basis_heatmap("pg", 2, 0, 0).is_err());
    }

    #[test]
    fn distance_field_vanishes_on_orbit() {
        let grid = 20;
        let field = orbit_distance_field("p4m", 0.25, 0.1, grid).unwrap();
        // (0.1, 0.25) is the diagonal mirror image
        assert!(field[5 * grid + 2] < 1e-12);
        assert!(field.iter().all(|d| *d >= 0.0));
        let pts = orbit_points("p4m", 0.25, 0.1).unwrap();
        assert_eq!(pts.len(), 16);
    }

    #[test]
    fn summary_and_errors() {
        let v: serde_json::Value = serde_json::from_str(&basis_summary_json("p3", 3).unwrap()).unwrap();
        assert_eq!(v["group"], "p3");
        assert!(basis_summary_json("nonsense", 3).is_err());
        assert!(basis_summary_json("p1", 99).is_err());
    }
}
