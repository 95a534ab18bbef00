//! Query playground bindings. Every entry point takes source text and returns
//! either the rendered result or the first diagnostic.

use gral::golden::Corpus;
use gral::{
    eval_pattern, parse_graph_in, parse_pattern_in, parse_query_in, run_query, serialize_graph,
    serialize_table, FreshVars, TableFormat,
};
use wasm_bindgen::prelude::*;

pub fn eval_text(graph: &str, query: &str) -> Result<String, String> {
    let g = parse_graph_in(graph, "graph").map_err(|e| e.to_string())?;
    let q = parse_query_in(query, "query").map_err(|e| e.to_string())?;
    let r = run_query(&q.query, &g).map_err(|e| e.to_string())?;
    Ok(serialize_graph(&r))
}

pub fn matches_text(graph: &str, pattern: &str, format: &str) -> Result<String, String> {
    let format: TableFormat = format
        .parse()
        .map_err(|e: gral::frontend::UnknownFormat| e.to_string())?;
    let g = parse_graph_in(graph, "graph").map_err(|e| e.to_string())?;
    let p = parse_pattern_in(pattern, "query").map_err(|e| e.to_string())?;
    let ms = eval_pattern(&p.pattern, &g, &mut FreshVars::new()).map_err(|e| e.to_string())?;
    Ok(serialize_table(&ms.table(), format))
}

/// Diagnostics for both panes, one line each; empty when both are clean.
pub fn check_text(graph: &str, query: &str) -> String {
    let mut out = Vec::new();
    if let Err(e) = parse_graph_in(graph, "graph") {
        out.push(e.to_string());
    }
    match parse_pattern_in(query, "query") {
        Err(e) => out.push(e.to_string()),
        Ok(p) if p.wrapped => {
            if let Err(e) = parse_query_in(query, "query") {
                out.push(e.to_string());
            }
        }
        Ok(_) => {}
    }
    out.join("\n")
}

#[wasm_bindgen(js_name = evalQuery)]
pub fn eval(graph: &str, query: &str) -> Result<String, JsError> {
    eval_text(graph, query).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn matches(graph: &str, pattern: &str, format: &str) -> Result<String, JsError> {
    matches_text(graph, pattern, format).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(graph: &str, query: &str) -> String {
    check_text(graph, query)
}

/// Names of the built-in example files, newline separated.
#[wasm_bindgen]
pub fn example_names() -> String {
    let c = Corpus::embedded();
    let names: Vec<&str> = c
        .files()
        .keys()
        .filter(|n| n.ends_with(".gral") || n.ends_with(".gtf"))
        .filter(|n| !n.contains(".expected."))
        .map(String::as_str)
        .collect();
    names.join("\n")
}

#[wasm_bindgen]
pub fn example(name: &str) -> Option<String> {
    Corpus::embedded().get(name).map(str::to_string)
}
