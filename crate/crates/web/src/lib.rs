//! Browser bindings. Every export takes a diagram string and returns a JSON
//! string; errors come back as `{"error": "..."}`.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;
use wythoff::decoration::{decoration_from_s, is_degenerate, stabilizer_generators, valid_s_sets};
use wythoff::{f_vector_formula, is_regular_ruled, realize, wythoff_point, DecoratedDiagram, Decoration012, FaceLattice, Group};

/// Largest group the page will enumerate.
pub const BROWSER_BUDGET: usize = 20_000;

fn parse(text: &str) -> Result<DecoratedDiagram, String> {
    let d = DecoratedDiagram::parse(text).map_err(|e| e.to_string())?;
    if is_degenerate(&d, &Decoration012::initial(&d)) {
        return Err("degenerate: some component has no ringed node".into());
    }
    Ok(d)
}

fn envelope(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Families, group order, f-vector and the regularity verdict.
pub fn describe_json(text: &str) -> Result<Value, String> {
    let d = parse(text)?;
    let f: Vec<String> = f_vector_formula(&d).map_err(|e| e.to_string())?.iter().map(|x| x.to_string()).collect();
    let verdict = is_regular_ruled(&d).map_err(|e| e.to_string())?;
    Ok(json!({
        "families": d.family_tags().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "order": d.group_order().to_string(),
        "f_vector": f,
        "verdict": verdict.to_string(),
    }))
}

/// Face decorations of rank `k` with their counts.
pub fn faces_json(text: &str, k: usize) -> Result<Value, String> {
    let d = parse(text)?;
    if k > d.len() {
        return Err(format!("rank {k} exceeds {}", d.len()));
    }
    let f0 = Decoration012::initial(&d);
    let order = d.group_order();
    let mut out = Vec::new();
    for s in valid_s_sets(&d, &f0, k) {
        let f = decoration_from_s(&d, &f0, s).map_err(|e| e.to_string())?;
        let stab = d.parabolic_order(stabilizer_generators(&f));
        out.push(json!({
            "decoration": f.to_string(),
            "s_set": (0..d.len()).filter(|&v| s & (1 << v) != 0).map(|v| d.ids()[v].clone()).collect::<Vec<_>>(),
            "count": (&order / &stab).to_string(),
        }));
    }
    Ok(json!({ "rank": k, "faces": out }))
}

#[derive(Serialize)]
pub struct Mesh {
    pub dimension: usize,
    /// Points in three dimensions; higher dimensions are projected.
    pub points: Vec<[f64; 3]>,
    pub edges: Vec<[u32; 2]>,
    /// Boundary polygons, only for three-dimensional polytopes.
    pub polygons: Vec<Vec<u32>>,
}

/// Perspective projection from dimension `n` down to three, dropping one
/// coordinate at a time with the eye at distance `eye` along the last axis.
fn project(v: &[f64], eye: f64) -> [f64; 3] {
    let mut p = v.to_vec();
    while p.len() > 3 {
        let w = p.pop().unwrap();
        let s = 1.0 / (eye - w);
        p.iter_mut().for_each(|x| *x *= s);
    }
    p.resize(3, 0.0);
    [p[0], p[1], p[2]]
}

pub fn build_mesh(text: &str) -> Result<Mesh, String> {
    let d = parse(text)?;
    let g = Group::of_with_budget(&d, BROWSER_BUDGET).map_err(|e| e.to_string())?;
    let l = FaceLattice::build(&d, &g).map_err(|e| e.to_string())?;
    let x = wythoff_point(g.normals(), &Decoration012::initial(&d)).map_err(|e| e.to_string())?;
    let r = realize(&l, &g, &x).map_err(|e| e.to_string())?;
    let n = r.dim();
    let points = r.vertices().iter().map(|v| project(v.as_slice(), 2.0)).collect();
    let edges = if n >= 1 {
        r.faces_of_rank(1)
            .iter()
            .map(|&e| {
                let v = r.face_vertices(e);
                [v[0], v[v.len() - 1]]
            })
            .collect()
    } else {
        Vec::new()
    };
    let polygons = if n == 3 { r.faces_of_rank(2).iter().map(|&f| r.polygon_cycle(f)).collect() } else { Vec::new() };
    Ok(Mesh { dimension: n, points, edges, polygons })
}

#[wasm_bindgen]
pub fn describe(diagram: &str) -> String {
    envelope(describe_json(diagram))
}

#[wasm_bindgen]
pub fn faces(diagram: &str, rank: usize) -> String {
    envelope(faces_json(diagram, rank))
}

#[wasm_bindgen]
pub fn mesh(diagram: &str) -> String {
    envelope(build_mesh(diagram).map(|m| serde_json::to_value(m).expect("serializable")))
}
