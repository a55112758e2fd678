//! WebAssembly front end for `heun-core`.
//!
//! Every export takes a JSON request string and returns a JSON string, either
//! `{"ok": ...}` or `{"error": {"module": ..., "message": ...}}`. The same
//! operations are available natively through [`demo`].

pub mod demo;

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use demo::DemoError;

fn respond<T: Serialize>(r: Result<T, DemoError>) -> String {
    match r {
        Ok(v) => json!({ "ok": v }).to_string(),
        Err(e) => json!({ "error": { "module": e.module, "message": e.message } }).to_string(),
    }
}

/// Values of a local Frobenius solution sampled along a segment.
#[wasm_bindgen]
pub fn profile(request: &str) -> String {
    respond(demo::parse(request).and_then(|r| demo::profile(&r)))
}

/// Monodromy matrix of a local basis around a singular point.
#[wasm_bindgen]
pub fn monodromy(request: &str) -> String {
    respond(demo::parse(request).and_then(|r| demo::monodromy(&r)))
}

/// Grid scan of the matching determinant and the Regge-Wheeler modes it encloses.
#[wasm_bindgen]
pub fn qnm_scan(request: &str) -> String {
    respond(demo::parse(request).and_then(|r| demo::qnm_scan(&r)))
}
