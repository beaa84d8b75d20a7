//! Browser bindings. Each entry point takes plain text and returns a JSON
//! string; errors come back as `{"error": {"code", "message"}}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hyperdeck::error::Result;
use hyperdeck::hypermatrix::{sum_deck_direct, sum_deck_via_beta, sum_deck_via_gamma, DeckMode, Hypermatrix};
use hyperdeck::lattice::PointSet;
use hyperdeck::oracle::{find_collision, MapMode};
use hyperdeck::peak::{degree_report, verify_peak};
use hyperdeck::planar::{construct_peak_2, PlanarOptions};

fn wrap(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "code": e.code(), "message": e.to_string() } }).to_string(),
    }
}

/// Sum deck of a hypermatrix in `"d n\nbits"` form, direct and via the
/// closed-form basis, with a flag saying whether they agree.
#[wasm_bindgen]
pub fn sum_deck(text: &str, k: usize, principal: bool) -> String {
    wrap((|| {
        let a = Hypermatrix::parse(text)?;
        let mode = if principal { DeckMode::Principal } else { DeckMode::Full };
        let direct = sum_deck_direct(&a, k, mode)?;
        let basis = if principal { sum_deck_via_gamma(&a, k)? } else { sum_deck_via_beta(&a, k)? };
        Ok(json!({ "sum": direct.to_json(), "basis_agrees": direct == basis }))
    })())
}

/// Two distinct `n^d` hypermatrices with equal images at `k`, if any.
#[wasm_bindgen]
pub fn collide(n: usize, d: usize, k: usize, mode: &str, seed: u64) -> String {
    wrap((|| {
        let mode: MapMode = mode.parse()?;
        Ok(serde_json::to_value(find_collision(n, d, k, mode, 20_000, seed)?).expect("serializable"))
    })())
}

/// Planar peak for points given one per line as `x y`.
#[wasm_bindgen]
pub fn planar_peak(points: &str, n: u64) -> String {
    wrap((|| {
        let h = PointSet::parse(points, n)?;
        let b = construct_peak_2(&h, &PlanarOptions::default())?;
        let v = verify_peak(&b.product, &h.points)?;
        let two = &b.directions;
        Ok(json!({
            "h": two.h,
            "u1": two.u1,
            "u2": two.u2,
            "hull": hyperdeck::planar::convex_hull(&h.points).vertices,
            "status": v.status,
            "peak": v.peak,
            "sum": v.sum,
            "degree": degree_report(&b.product),
            "grid": b.report.grid,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_deck_agrees() {
        let v: Value = serde_json::from_str(&sum_deck("2 3\n101010011\n", 2, false)).unwrap();
        assert_eq!(v["basis_agrees"], true);
    }

    #[test]
    fn errors_are_json() {
        let v: Value = serde_json::from_str(&sum_deck("2 3\n1x1\n", 2, false)).unwrap();
        assert_eq!(v["error"]["code"], "PARSE");
        let v: Value = serde_json::from_str(&collide(3, 1, 2, "bogus", 0)).unwrap();
        assert_eq!(v["error"]["code"], "PARSE");
    }

    #[test]
    fn collision_on_a_line() {
        let v: Value = serde_json::from_str(&collide(4, 1, 2, "deck", 0)).unwrap();
        assert!(v["pair"].is_array());
    }

    #[test]
    fn planar_certifies() {
        let v: Value = serde_json::from_str(&planar_peak("1 1\n5 2\n2 7\n4 4\n", 10)).unwrap();
        assert_eq!(v["status"], "CERTIFIED");
    }
}
