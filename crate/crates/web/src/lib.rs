//! Browser bindings. Every entry point takes and returns JSON strings; the
//! page in `www/` renders them on a canvas.

use majorana::classical::{solve_thomson, solve_toth, to_symmetric_state};
use majorana::extremal::{named_state, NAMED_STATES};
use majorana::geometric::{find_cpps, overlap};
use majorana::majorana::{points_to_state, state_to_points};
use majorana::state::read_state_json;
use majorana::{InnerConfig, SearchConfig, SpherePoint, SymmetricState};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const RING_SAMPLES: usize = 72;

fn point_json(p: &SpherePoint) -> Value {
    let [x, y, z] = p.bloch();
    json!({ "theta": p.theta, "phi": p.phi, "x": x, "y": y, "z": z })
}

/// g² on a `n_theta × n_phi` grid, θ including both poles, row-major.
fn g2_grid(state: &SymmetricState, n_theta: usize, n_phi: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = std::f64::consts::TAU * j as f64 / n_phi as f64;
            g.push(overlap(state, &SpherePoint::new(theta, phi)).powi(2));
        }
    }
    g
}

fn analysis_json(state: &SymmetricState, n_theta: usize, n_phi: usize) -> Result<Value, String> {
    if n_theta < 2 || n_phi < 1 || n_theta * n_phi > 1 << 20 {
        return Err("grid must be at least 2x1 and at most 2^20 samples".into());
    }
    let e = |e: majorana::Error| e.to_string();
    let mps = state_to_points(state).map_err(e)?;
    let a = find_cpps(state, &InnerConfig::default()).map_err(e)?;
    let info = state.classify();
    Ok(json!({
        "n": state.n(),
        "coeffs": state.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "e_g": a.e_g,
        "g_max": a.g_max,
        "ring": a.cpps.count().is_none(),
        "cpps": a.cpps.sample(RING_SAMPLES).iter().map(point_json).collect::<Vec<_>>(),
        "majorana_points": mps.points.iter().map(point_json).collect::<Vec<_>>(),
        "rotational_order": info.rotational_order,
        "is_real": info.is_real,
        "is_positive": info.is_positive,
        "grid": { "n_theta": n_theta, "n_phi": n_phi, "g2": g2_grid(state, n_theta, n_phi) },
    }))
}

/// Names accepted by [`analyze_state`], as a JSON array.
pub fn named_states_json() -> String {
    serde_json::to_string(&NAMED_STATES).expect("json")
}

/// `spec` is a built-in name or a state JSON `{"n", "coeffs": [[re, im]]}`.
pub fn analyze_state_json(spec: &str, n_theta: usize, n_phi: usize) -> Result<String, String> {
    let spec = spec.trim();
    let state = if spec.starts_with('{') {
        read_state_json(spec).map_err(|e| e.to_string())?.0
    } else {
        named_state(spec).map_err(|e| e.to_string())?
    };
    Ok(analysis_json(&state, n_theta, n_phi)?.to_string())
}

/// `points` is a JSON array of `[theta, phi]` pairs.
pub fn state_from_points_json(points: &str, n_theta: usize, n_phi: usize) -> Result<String, String> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(points).map_err(|e| e.to_string())?;
    if raw.is_empty() || raw.len() > 16 {
        return Err("between 1 and 16 points are supported".into());
    }
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return Err("point coordinates must be finite".into());
    }
    let pts: Vec<SpherePoint> = raw.iter().map(|[t, p]| SpherePoint::new(*t, *p)).collect();
    let (state, _) = points_to_state(&pts, pts.len()).map_err(|e| e.to_string())?;
    Ok(analysis_json(&state, n_theta, n_phi)?.to_string())
}

/// Solves Thomson or Tóth for `n` points and analyzes them as a state.
pub fn classical_json(problem: &str, n: usize, seed: u32, n_theta: usize, n_phi: usize) -> Result<String, String> {
    if !(2..=16).contains(&n) {
        return Err("n must be in 2..=16".into());
    }
    let cfg = SearchConfig { seed: seed as u64, ..SearchConfig::default() };
    let c = match problem {
        "thomson" => solve_thomson(n, &cfg),
        "toth" => solve_toth(n, &cfg),
        other => return Err(format!("unknown problem '{other}' (thomson or toth)")),
    }
    .map_err(|e| e.to_string())?
    .canonicalize();
    let state = to_symmetric_state(&c).map_err(|e| e.to_string())?;
    let mut v = analysis_json(&state, n_theta, n_phi)?;
    v["thomson_cost"] = json!(c.thomson_cost);
    v["toth_cost"] = json!(c.toth_cost);
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn named_states() -> String {
    named_states_json()
}

#[wasm_bindgen]
pub fn analyze_state(spec: &str, n_theta: usize, n_phi: usize) -> Result<String, JsValue> {
    analyze_state_json(spec, n_theta, n_phi).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn state_from_points(points: &str, n_theta: usize, n_phi: usize) -> Result<String, JsValue> {
    state_from_points_json(points, n_theta, n_phi).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classical(problem: &str, n: usize, seed: u32, n_theta: usize, n_phi: usize) -> Result<String, JsValue> {
    classical_json(problem, n, seed, n_theta, n_phi).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn named_tetrahedron() {
        let v = parse(&analyze_state_json("tetrahedron", 5, 8).unwrap());
        assert!((v["e_g"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-10);
        assert_eq!(v["grid"]["g2"].as_array().unwrap().len(), 40);
        assert_eq!(v["cpps"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn custom_state_and_errors() {
        let v = parse(&analyze_state_json(r#"{"n":2,"coeffs":[[0,0],[1,0],[0,0]]}"#, 3, 4).unwrap());
        assert_eq!(v["ring"], true);
        assert!(analyze_state_json("nope", 3, 4).is_err());
        assert!(analyze_state_json("bell", 1, 4).is_err());
    }

    #[test]
    fn points_editor_round_trip() {
        let v = parse(&state_from_points_json("[[0,0],[3.141592653589793,0]]", 3, 4).unwrap());
        assert!((v["e_g"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert!(state_from_points_json("[]", 3, 4).is_err());
    }

    #[test]
    fn classical_octahedron() {
        let v = parse(&classical_json("toth", 6, 1, 3, 4).unwrap());
        assert!((v["toth_cost"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
        assert!((v["e_g"].as_f64().unwrap() - 4.5f64.log2()).abs() < 1e-6);
        assert!(classical_json("tammes", 6, 1, 3, 4).is_err());
    }
}
