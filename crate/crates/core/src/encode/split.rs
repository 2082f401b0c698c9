use crate::ast::{kind, AstNode};

/// A statement node with its nested statements cut away, or an `END_BLOCK` marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatementTree {
    pub root: AstNode,
}

impl StatementTree {
    pub fn end_block() -> Self {
        StatementTree {
            root: AstNode::new(kind::END_BLOCK),
        }
    }

    pub fn is_end_block(&self) -> bool {
        self.root.is(kind::END_BLOCK)
    }
}

/// Split a tree into its statement sequence.
///
/// Statements are emitted in preorder; each compound statement is followed by
/// the statements of its body and then one `END_BLOCK` marker.
pub fn split_statements(ast: &AstNode) -> Vec<StatementTree> {
    let mut out = Vec::new();
    walk(ast, &mut out);
    out
}

fn walk(node: &AstNode, out: &mut Vec<StatementTree>) {
    let is_stmt = kind::is_statement(&node.kind);
    if is_stmt {
        out.push(StatementTree {
            root: header(node),
        });
    }
    for child in &node.children {
        walk(child, out);
    }
    if is_stmt && kind::is_compound(&node.kind) {
        out.push(StatementTree::end_block());
    }
}

fn header(node: &AstNode) -> AstNode {
    AstNode {
        kind: node.kind.clone(),
        token: node.token.clone(),
        children: node
            .children
            .iter()
            .filter(|c| !kind::is_statement(&c.kind))
            .map(header)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_mini;

    #[test]
    fn loop_fixture_splits_into_seven() {
        let ast = parse_mini("int f(){int a; while(a<1){a=a+1;} return a;}").unwrap();
        let kinds: Vec<_> = split_statements(&ast)
            .into_iter()
            .map(|t| t.root.kind)
            .collect();
        assert_eq!(
            kinds,
            ["FuncDef", "Decl", "While", "Assign", "END_BLOCK", "Return", "END_BLOCK"]
        );
    }

    #[test]
    fn headers_drop_nested_statements() {
        let ast = parse_mini("int f(){int a; while(a<1){a=a+1;} return a;}").unwrap();
        let trees = split_statements(&ast);
        assert_eq!(trees[0].root.leaf_tokens(), ["int", "f"]);
        assert_eq!(trees[2].root.leaf_tokens(), ["a", "<", "1"]);
        for t in &trees {
            assert!(t.root.preorder().skip(1).all(|n| !kind::is_statement(&n.kind)));
        }
        assert!(trees[4].is_end_block() && trees[4].root.is_leaf());
    }

    #[test]
    fn lone_return() {
        let ret = AstNode::with_children(kind::RETURN, vec![AstNode::leaf(kind::LITERAL, "1")]);
        let trees = split_statements(&ret);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].root, ret);
    }

    #[test]
    fn non_statement_root_without_statements() {
        let expr = AstNode::with_children(
            kind::BIN_OP,
            vec![
                AstNode::leaf(kind::IDENTIFIER, "a"),
                AstNode::leaf(kind::OPERATOR, "+"),
                AstNode::leaf(kind::LITERAL, "1"),
            ],
        );
        assert!(split_statements(&expr).is_empty());
    }

    #[test]
    fn if_else_emits_single_marker() {
        let ast = parse_mini("void f(){ if (a) { x = 1; } else { x = 2; } }").unwrap();
        let kinds: Vec<_> = split_statements(&ast).into_iter().map(|t| t.root.kind).collect();
        assert_eq!(
            kinds,
            ["FuncDef", "If", "Assign", "Assign", "END_BLOCK", "END_BLOCK"]
        );
    }
}
