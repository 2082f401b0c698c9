//! Generic typed syntax tree shared by every stage of the pipeline.

use serde::Serialize;

/// Node-kind labels produced by the mini-language parser.
pub mod kind {
    pub const COMPILATION_UNIT: &str = "CompilationUnit";
    pub const FUNC_DEF: &str = "FuncDef";
    pub const CLASS_DEF: &str = "ClassDef";
    pub const INTERFACE_DEF: &str = "InterfaceDef";
    pub const METHOD: &str = "Method";
    pub const CONSTRUCTOR: &str = "Constructor";
    pub const FIELD: &str = "Field";
    pub const MODIFIER: &str = "Modifier";
    pub const EXTENDS: &str = "Extends";
    pub const IMPLEMENTS: &str = "Implements";
    pub const PARAMS: &str = "Params";
    pub const PARAM: &str = "Param";
    pub const TYPE: &str = "Type";
    pub const ARRAY_TYPE: &str = "ArrayType";
    pub const BLOCK: &str = "Block";
    pub const DECL: &str = "Decl";
    pub const ASSIGN: &str = "Assign";
    pub const IF: &str = "If";
    pub const WHILE: &str = "While";
    pub const FOR: &str = "For";
    pub const FOR_INIT: &str = "ForInit";
    pub const FOR_UPDATE: &str = "ForUpdate";
    pub const RETURN: &str = "Return";
    pub const CALL_STMT: &str = "CallStmt";
    pub const CALL: &str = "Call";
    pub const ARGS: &str = "Args";
    pub const MEMBER: &str = "Member";
    pub const INDEX: &str = "Index";
    pub const NEW: &str = "New";
    pub const BIN_OP: &str = "BinOp";
    pub const UNARY_OP: &str = "UnaryOp";
    pub const IDENTIFIER: &str = "Identifier";
    pub const LITERAL: &str = "Literal";
    pub const OPERATOR: &str = "Operator";
    pub const THIS: &str = "This";
    /// Marker closing the body of a compound statement in a statement sequence.
    pub const END_BLOCK: &str = "END_BLOCK";

    /// Every kind the mini-language parser can emit, plus the block marker.
    pub const ALL: &[&str] = &[
        COMPILATION_UNIT,
        FUNC_DEF,
        CLASS_DEF,
        INTERFACE_DEF,
        METHOD,
        CONSTRUCTOR,
        FIELD,
        MODIFIER,
        EXTENDS,
        IMPLEMENTS,
        PARAMS,
        PARAM,
        TYPE,
        ARRAY_TYPE,
        BLOCK,
        DECL,
        ASSIGN,
        IF,
        WHILE,
        FOR,
        FOR_INIT,
        FOR_UPDATE,
        RETURN,
        CALL_STMT,
        CALL,
        ARGS,
        MEMBER,
        INDEX,
        NEW,
        BIN_OP,
        UNARY_OP,
        IDENTIFIER,
        LITERAL,
        OPERATOR,
        THIS,
        END_BLOCK,
    ];

    /// Kinds that start a statement tree.
    pub const STATEMENTS: &[&str] = &[
        FUNC_DEF,
        CLASS_DEF,
        INTERFACE_DEF,
        METHOD,
        CONSTRUCTOR,
        FIELD,
        DECL,
        ASSIGN,
        IF,
        WHILE,
        FOR,
        RETURN,
        CALL_STMT,
    ];

    /// Statement kinds that own a body and are closed by an `END_BLOCK` marker.
    pub const COMPOUND: &[&str] = &[
        FUNC_DEF,
        CLASS_DEF,
        INTERFACE_DEF,
        METHOD,
        CONSTRUCTOR,
        IF,
        WHILE,
        FOR,
    ];

    pub fn is_statement(kind: &str) -> bool {
        STATEMENTS.contains(&kind)
    }

    pub fn is_compound(kind: &str) -> bool {
        COMPOUND.contains(&kind)
    }
}

/// A syntax tree node: a kind label, an optional lexeme and ordered children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AstNode {
    pub kind: String,
    pub token: Option<String>,
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(kind: impl Into<String>) -> Self {
        AstNode {
            kind: kind.into(),
            token: None,
            children: Vec::new(),
        }
    }

    pub fn leaf(kind: impl Into<String>, token: impl Into<String>) -> Self {
        AstNode {
            kind: kind.into(),
            token: Some(token.into()),
            children: Vec::new(),
        }
    }

    pub fn with_children(kind: impl Into<String>, children: Vec<AstNode>) -> Self {
        AstNode {
            kind: kind.into(),
            token: None,
            children,
        }
    }

    pub fn is(&self, kind: &str) -> bool {
        self.kind == kind
    }

    /// Token if present, otherwise the kind label.
    pub fn symbol(&self) -> &str {
        self.token.as_deref().unwrap_or(&self.kind)
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(AstNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(AstNode::depth).max().unwrap_or(0)
    }

    /// Preorder traversal.
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    /// Tokens of all leaves, left to right.
    pub fn leaf_tokens(&self) -> Vec<&str> {
        self.preorder()
            .filter(|n| n.is_leaf())
            .filter_map(|n| n.token.as_deref())
            .collect()
    }

    pub fn children_of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a AstNode> + 'a {
        self.children.iter().filter(move |c| c.kind == kind)
    }

    pub fn first_child(&self, kind: &str) -> Option<&AstNode> {
        self.children.iter().find(|c| c.kind == kind)
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a AstNode>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a AstNode;

    fn next(&mut self) -> Option<&'a AstNode> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_visits_parent_before_children() {
        let tree = AstNode::with_children(
            "A",
            vec![
                AstNode::with_children("B", vec![AstNode::leaf("C", "c")]),
                AstNode::leaf("D", "d"),
            ],
        );
        let kinds: Vec<_> = tree.preorder().map(|n| n.kind.as_str()).collect();
        assert_eq!(kinds, ["A", "B", "C", "D"]);
        assert_eq!(tree.size(), 4);
        assert_eq!(tree.depth(), 3);
        assert_eq!(tree.leaf_tokens(), ["c", "d"]);
    }
}
