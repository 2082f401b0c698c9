//! Line-delimited JSON records for externally parsed trees.
//!
//! A node is `{"kind": string, "token": string|null, "children": [node...]}`.

use serde_json::Value;

use crate::ast::AstNode;
use crate::error::{Error, Result};

/// Decode one AST record.
pub fn load_ast_record(bytes: &[u8]) -> Result<AstNode> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::format_detail("record", e.to_string()))?;
    ast_from_value(&value)
}

/// Canonical single-line encoding of a tree.
pub fn serialize_ast(node: &AstNode) -> String {
    serde_json::to_string(node).expect("AstNode always serializes")
}

/// Read every record from a line-delimited file body, skipping blank lines.
pub fn load_ast_records(text: &str) -> Result<Vec<AstNode>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| load_ast_record(l.as_bytes()))
        .collect()
}

pub(crate) fn ast_from_value(value: &Value) -> Result<AstNode> {
    // Iterative walk so deeply nested imported trees cannot exhaust the stack.
    enum Frame<'a> {
        Enter(&'a Value),
        Exit { kind: String, token: Option<String>, arity: usize },
    }
    let mut stack = vec![Frame::Enter(value)];
    let mut built: Vec<AstNode> = Vec::new();
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Enter(v) => {
                let obj = v.as_object().ok_or_else(|| Error::format("node"))?;
                let kind = match obj.get("kind") {
                    Some(Value::String(s)) if !s.is_empty() => s.clone(),
                    _ => return Err(Error::format("kind")),
                };
                let token = match obj.get("token") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.clone()),
                    Some(_) => return Err(Error::format("token")),
                };
                let children: &[Value] = match obj.get("children") {
                    None => &[],
                    Some(Value::Array(items)) => items,
                    Some(_) => return Err(Error::format("children")),
                };
                stack.push(Frame::Exit {
                    kind,
                    token,
                    arity: children.len(),
                });
                stack.extend(children.iter().rev().map(Frame::Enter));
            }
            Frame::Exit { kind, token, arity } => {
                let children = built.split_off(built.len() - arity);
                built.push(AstNode {
                    kind,
                    token,
                    children,
                });
            }
        }
    }
    Ok(built.pop().expect("root built"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_mini;

    #[test]
    fn direct_mapping() {
        let rec = br#"{"kind":"Return","token":null,"children":[{"kind":"Literal","token":"1","children":[]}]}"#;
        let ast = load_ast_record(rec).unwrap();
        assert_eq!(ast.size(), 2);
        assert_eq!(ast.children[0].token.as_deref(), Some("1"));
        assert_eq!(serialize_ast(&ast).as_bytes(), rec);
    }

    #[test]
    fn missing_kind_names_the_field() {
        let err = load_ast_record(br#"{"token":null,"children":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Format { ref field, .. } if field == "kind"), "{err}");
        let err = load_ast_record(br#"{"kind":"A","children":[{"kind":"B","token":3}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Format { ref field, .. } if field == "token"), "{err}");
    }

    #[test]
    fn parsed_tree_round_trips() {
        let ast = parse_mini("int f(){return 1;}").unwrap();
        let text = serialize_ast(&ast);
        assert_eq!(load_ast_record(text.as_bytes()).unwrap(), ast);
    }

    #[test]
    fn multi_line_file() {
        let text = "{\"kind\":\"A\",\"token\":\"x\",\"children\":[]}\n\n{\"kind\":\"B\"}\n";
        let trees = load_ast_records(text).unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(trees[1], AstNode::new("B"));
    }
}
