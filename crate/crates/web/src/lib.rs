//! WebAssembly bindings for the planar demo page in `www/`.

pub mod api;

use wasm_bindgen::prelude::*;

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

/// Verdict, dimensions and normalized internal flexes of a sketch read in `model`.
#[wasm_bindgen]
pub fn analyze(sketch_json: &str, model: &str) -> Result<String, JsError> {
    js(api::analyze(sketch_json, model))
}

/// Verdicts for the same coordinates in every planar model.
#[wasm_bindgen]
pub fn compare(sketch_json: &str) -> Result<String, JsError> {
    js(api::compare(sketch_json))
}

#[wasm_bindgen]
pub fn example(name: &str, scale: f64) -> Result<String, JsError> {
    js(api::example(name, scale))
}
