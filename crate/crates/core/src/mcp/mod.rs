//! MCP tool server over newline-delimited JSON-RPC 2.0 on stdio.
//!
//! Requests are handled one at a time in arrival order and each response is
//! written as a single line before the next request is read. Only the tools
//! capability is offered.

mod catalog;

use std::io::{BufRead, Write};

use serde_json::{json, Value};

pub use catalog::{call, descriptors, InvalidParams, ToolDescriptor};

use crate::tools::{SolveContext, ToolOutput};

/// The protocol revision echoed at `initialize`, whatever the client asks for.
pub const PROTOCOL_VERSION: &str = "2024-11-05";
pub const SERVER_NAME: &str = "pddl-copilot";

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;

fn error_response(id: Value, code: i64, message: impl Into<String>) -> Value {
    json!({"jsonrpc": "2.0", "id": id, "error": {"code": code, "message": message.into()}})
}

fn result_response(id: Value, result: Value) -> Value {
    json!({"jsonrpc": "2.0", "id": id, "result": result})
}

/// MCP `tools/call` result: the text first, then the JSON document.
pub fn tool_result(out: &ToolOutput) -> Value {
    json!({
        "content": [
            {"type": "text", "text": out.text},
            {"type": "text", "text": out.json.to_string()},
        ],
        "isError": out.is_error,
    })
}

/// Handles one input line. Returns the response, or `None` for
/// notifications and blank lines.
pub fn handle_line(line: &str, ctx: &SolveContext) -> Option<Value> {
    if line.trim().is_empty() {
        return None;
    }
    let message: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return Some(error_response(Value::Null, PARSE_ERROR, format!("parse error: {e}"))),
    };
    let Value::Object(request) = message else {
        let what = if message.is_array() { "batches are not supported" } else { "expected a request object" };
        return Some(error_response(Value::Null, INVALID_REQUEST, what));
    };
    let id = request.get("id").cloned();
    let valid_id = matches!(id, None | Some(Value::String(_)) | Some(Value::Number(_)) | Some(Value::Null));
    let method = request.get("method").and_then(Value::as_str);
    let (Some(method), true, true) = (method, request.get("jsonrpc") == Some(&json!("2.0")), valid_id) else {
        let id = if valid_id { id.unwrap_or(Value::Null) } else { Value::Null };
        return Some(error_response(id, INVALID_REQUEST, "invalid JSON-RPC 2.0 request"));
    };
    // Notifications never get a reply, not even an error.
    let id = id?;
    let params = request.get("params");
    Some(match method {
        "initialize" => result_response(
            id,
            json!({
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {"listChanged": false}},
                "serverInfo": {"name": SERVER_NAME, "version": env!("CARGO_PKG_VERSION")},
            }),
        ),
        "ping" => result_response(id, json!({})),
        "tools/list" => result_response(id, json!({"tools": descriptors()})),
        "tools/call" => {
            let name = params.and_then(|p| p.get("name")).and_then(Value::as_str);
            let Some(name) = name else {
                return Some(error_response(id, INVALID_PARAMS, "tools/call needs a string 'name'"));
            };
            match call(name, params.and_then(|p| p.get("arguments")), ctx) {
                Ok(out) => result_response(id, tool_result(&out)),
                Err(InvalidParams(msg)) => error_response(id, INVALID_PARAMS, msg),
            }
        }
        other => error_response(id, METHOD_NOT_FOUND, format!("method not found: {other}")),
    })
}

/// Serves until end of input. Returns the process exit status: 0 on EOF,
/// 1 when reading or writing fails.
pub fn serve<R: BufRead, W: Write>(mut input: R, mut output: W, ctx: &SolveContext) -> i32 {
    let mut buf = Vec::new();
    loop {
        buf.clear();
        match input.read_until(b'\n', &mut buf) {
            Ok(0) => return 0,
            Ok(_) => {}
            Err(_) => return 1,
        }
        let response = match std::str::from_utf8(&buf) {
            Ok(line) => handle_line(line, ctx),
            Err(_) => Some(error_response(Value::Null, PARSE_ERROR, "parse error: input is not UTF-8")),
        };
        if let Some(response) = response {
            let mut bytes = serde_json::to_vec(&response).expect("responses serialize");
            bytes.push(b'\n');
            if output.write_all(&bytes).and_then(|_| output.flush()).is_err() {
                return 1;
            }
        }
    }
}
