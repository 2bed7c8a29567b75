use pathmine::Extraction;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRequest {
    #[serde(default)]
    pub id: Option<String>,
    pub context: String,
    pub query: String,
}

impl ExtractionRequest {
    pub fn parse(line: &str) -> Result<Self, String> {
        let req: ExtractionRequest = serde_json::from_str(line).map_err(|e| format!("malformed request: {e}"))?;
        if req.context.trim().is_empty() {
            return Err("context is empty".into());
        }
        if req.query.trim().is_empty() {
            return Err("query is empty".into());
        }
        Ok(req)
    }
}

/// Per-request counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestStats {
    pub context_concepts: usize,
    pub query_concepts: usize,
    pub trees: usize,
    pub tree_nodes: usize,
    pub full_paths: usize,
    pub truncations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_us: Option<u64>,
}

impl RequestStats {
    pub fn of(out: &Extraction) -> Self {
        RequestStats {
            context_concepts: out.pair.context_mentions.len(),
            query_concepts: out.pair.query_concepts.len(),
            trees: out.trees.len(),
            tree_nodes: out.trees.iter().map(|t| t.scored.tree.len()).sum(),
            full_paths: out.full_path_count(),
            truncations: out.truncation_count(),
            elapsed_us: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub id: Option<String>,
    pub paths: Vec<Vec<String>>,
    pub error: Option<String>,
    pub stats: Option<RequestStats>,
}

impl ExtractionResult {
    pub fn ok(id: Option<String>, out: &Extraction) -> Self {
        ExtractionResult {
            id,
            paths: out.paths().cloned().collect(),
            error: None,
            stats: Some(RequestStats::of(out)),
        }
    }

    pub fn failed(id: Option<String>, error: String) -> Self {
        ExtractionResult {
            id,
            paths: Vec::new(),
            error: Some(error),
            stats: None,
        }
    }
}

/// Best-effort id of a line that failed to parse as a request.
pub fn salvage_id(line: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    value.get("id")?.as_str().map(str::to_owned)
}
