//! Recursive-descent parser for the mini-language.
//!
//! Grammar (informal):
//!
//! ```text
//! unit      := (func | class | interface)*
//! func      := type IDENT '(' params ')' block
//! class     := modifier* 'class' IDENT ('extends' IDENT)? ('implements' IDENT (',' IDENT)*)? '{' member* '}'
//! interface := 'interface' IDENT '{' (modifier* type IDENT '(' params ')' ';')* '}'
//! member    := modifier* (IDENT '(' params ')' block            -- constructor
//!                        | type IDENT '(' params ')' (block | ';')
//!                        | type IDENT ('=' expr)? ';')
//! stmt      := type IDENT ('=' expr)? ';'
//!            | lvalue '=' expr ';' | call ';'
//!            | 'if' '(' expr ')' block ('else' (block | if))?
//!            | 'while' '(' expr ')' block
//!            | 'for' '(' init ';' expr ';' update ')' block
//!            | 'return' expr? ';'
//! type      := (TYPEKW | IDENT) ('[' ']')?
//! ```
//!
//! Expressions use the usual C precedence for `|| && == != < > <= >= + - * / %`,
//! prefix `- !`, and postfix call, member access and indexing.
//!
//! Bodies of functions, methods, constructors, loops and class declarations hold
//! their statements as direct children; `if` branches are wrapped in `Block`.
//! Every leaf carries a token, and leaf tokens in order equal the significant
//! lexemes of the source (punctuation and structural keywords are implied by kinds).

use super::lexer::{lex, Lexeme, TokenClass};
use crate::ast::{kind, AstNode};
use crate::error::{Error, Result};

/// Parse mini-language source text into a tree rooted at `CompilationUnit`.
pub fn parse_mini(source: &str) -> Result<AstNode> {
    parse_mini_with_lines(source).map(|(ast, _)| ast)
}

/// Like [`parse_mini`], also returning the starting source line of every
/// statement node in preorder (the order [`crate::encode::split_statements`]
/// emits non-marker trees).
pub fn parse_mini_with_lines(source: &str) -> Result<(AstNode, Vec<u32>)> {
    let tokens = lex(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        lines: Vec::new(),
    };
    let unit = parser.unit()?;
    Ok((unit, parser.lines))
}

struct Parser {
    tokens: Vec<Lexeme>,
    pos: usize,
    lines: Vec<u32>,
}

impl Parser {
    fn peek(&self) -> &Lexeme {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Lexeme {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx]
    }

    fn bump(&mut self) -> Lexeme {
        let tok = self.tokens[self.pos].clone();
        if tok.class != TokenClass::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        let tok = self.peek();
        let found = if tok.class == TokenClass::Eof {
            "end of input".to_string()
        } else {
            format!("`{}`", tok.text)
        };
        Err(Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is(text)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> Result<()> {
        if self.eat(text) {
            Ok(())
        } else {
            self.error(&format!("`{text}`"))
        }
    }

    fn mark_statement(&mut self) {
        let line = self.peek().line as u32;
        self.lines.push(line);
    }

    fn ident(&mut self) -> Result<AstNode> {
        if self.peek().class == TokenClass::Ident {
            Ok(AstNode::leaf(kind::IDENTIFIER, self.bump().text))
        } else {
            self.error("identifier")
        }
    }

    fn is_type_start(&self) -> bool {
        matches!(
            self.peek().class,
            TokenClass::TypeKeyword | TokenClass::Ident
        )
    }

    fn ty(&mut self) -> Result<AstNode> {
        if !self.is_type_start() {
            return self.error("type");
        }
        let base = AstNode::leaf(kind::TYPE, self.bump().text);
        if self.at("[") && self.peek_at(1).is("]") {
            self.bump();
            self.bump();
            return Ok(AstNode::with_children(kind::ARRAY_TYPE, vec![base]));
        }
        Ok(base)
    }

    fn modifiers(&mut self) -> Vec<AstNode> {
        let mut mods = Vec::new();
        while matches!(
            self.peek().class,
            TokenClass::Modifier | TokenClass::Annotation
        ) {
            mods.push(AstNode::leaf(kind::MODIFIER, self.bump().text));
        }
        mods
    }

    fn unit(&mut self) -> Result<AstNode> {
        let mut items = Vec::new();
        while self.peek().class != TokenClass::Eof {
            let start = self.pos;
            let mods = self.modifiers();
            if self.at("class") {
                self.pos = start;
                items.push(self.class_def()?);
            } else if self.at("interface") {
                self.pos = start;
                items.push(self.interface_def()?);
            } else if mods.is_empty() {
                items.push(self.func_def()?);
            } else {
                return self.error("`class`");
            }
        }
        Ok(AstNode::with_children(kind::COMPILATION_UNIT, items))
    }

    fn params(&mut self) -> Result<AstNode> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.at(")") {
            loop {
                let ty = self.ty()?;
                let name = self.ident()?;
                params.push(AstNode::with_children(kind::PARAM, vec![ty, name]));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(AstNode::with_children(kind::PARAMS, params))
    }

    /// `{ stmt* }`, returning the statements.
    fn body(&mut self) -> Result<Vec<AstNode>> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at("}") {
            if self.peek().class == TokenClass::Eof {
                return self.error("`}`");
            }
            stmts.push(self.statement()?);
        }
        self.expect("}")?;
        Ok(stmts)
    }

    fn func_def(&mut self) -> Result<AstNode> {
        self.mark_statement();
        let ty = self.ty()?;
        let name = self.ident()?;
        let params = self.params()?;
        let mut children = vec![ty, name, params];
        children.extend(self.body()?);
        Ok(AstNode::with_children(kind::FUNC_DEF, children))
    }

    fn class_def(&mut self) -> Result<AstNode> {
        self.mark_statement();
        let mut children = self.modifiers();
        self.expect("class")?;
        let name_node = self.ident()?;
        let class_name = name_node.token.clone().unwrap_or_default();
        children.push(name_node);
        if self.eat("extends") {
            let sup = self.ident()?;
            children.push(AstNode::with_children(kind::EXTENDS, vec![sup]));
        }
        if self.eat("implements") {
            let mut ifaces = vec![self.ident()?];
            while self.eat(",") {
                ifaces.push(self.ident()?);
            }
            children.push(AstNode::with_children(kind::IMPLEMENTS, ifaces));
        }
        self.expect("{")?;
        while !self.at("}") {
            if self.peek().class == TokenClass::Eof {
                return self.error("`}`");
            }
            children.push(self.member(&class_name)?);
        }
        self.expect("}")?;
        Ok(AstNode::with_children(kind::CLASS_DEF, children))
    }

    fn member(&mut self, class_name: &str) -> Result<AstNode> {
        self.mark_statement();
        let mut children = self.modifiers();
        if self.peek().class == TokenClass::Ident
            && self.peek().text == class_name
            && self.peek_at(1).is("(")
        {
            children.push(self.ident()?);
            children.push(self.params()?);
            children.extend(self.body()?);
            return Ok(AstNode::with_children(kind::CONSTRUCTOR, children));
        }
        children.push(self.ty()?);
        children.push(self.ident()?);
        if self.at("(") {
            children.push(self.params()?);
            if !self.eat(";") {
                children.extend(self.body()?);
            }
            return Ok(AstNode::with_children(kind::METHOD, children));
        }
        if self.at("=") {
            children.push(AstNode::leaf(kind::OPERATOR, self.bump().text));
            children.push(self.expr()?);
        }
        self.expect(";")?;
        Ok(AstNode::with_children(kind::FIELD, children))
    }

    fn interface_def(&mut self) -> Result<AstNode> {
        self.mark_statement();
        self.expect("interface")?;
        let mut children = vec![self.ident()?];
        self.expect("{")?;
        while !self.at("}") {
            if self.peek().class == TokenClass::Eof {
                return self.error("`}`");
            }
            self.mark_statement();
            let mut method = self.modifiers();
            method.push(self.ty()?);
            method.push(self.ident()?);
            method.push(self.params()?);
            self.expect(";")?;
            children.push(AstNode::with_children(kind::METHOD, method));
        }
        self.expect("}")?;
        Ok(AstNode::with_children(kind::INTERFACE_DEF, children))
    }

    fn looks_like_decl(&self) -> bool {
        match self.peek().class {
            TokenClass::TypeKeyword => true,
            TokenClass::Ident => {
                let next = self.peek_at(1);
                next.class == TokenClass::Ident
                    || (next.is("[")
                        && self.peek_at(2).is("]")
                        && self.peek_at(3).class == TokenClass::Ident)
            }
            _ => false,
        }
    }

    fn statement(&mut self) -> Result<AstNode> {
        if self.at("if") {
            self.mark_statement();
            return self.if_stmt();
        }
        self.mark_statement();
        if self.eat("while") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let mut children = vec![cond];
            children.extend(self.body()?);
            return Ok(AstNode::with_children(kind::WHILE, children));
        }
        if self.eat("for") {
            self.expect("(")?;
            let init = self.for_clause(kind::FOR_INIT, true)?;
            self.expect(";")?;
            let cond = self.expr()?;
            self.expect(";")?;
            let update = self.for_clause(kind::FOR_UPDATE, false)?;
            self.expect(")")?;
            let mut children = vec![init, cond, update];
            children.extend(self.body()?);
            return Ok(AstNode::with_children(kind::FOR, children));
        }
        if self.eat("return") {
            let mut children = Vec::new();
            if !self.at(";") {
                children.push(self.expr()?);
            }
            self.expect(";")?;
            return Ok(AstNode::with_children(kind::RETURN, children));
        }
        if self.looks_like_decl() {
            let mut children = vec![self.ty()?, self.ident()?];
            if self.at("=") {
                children.push(AstNode::leaf(kind::OPERATOR, self.bump().text));
                children.push(self.expr()?);
            }
            self.expect(";")?;
            return Ok(AstNode::with_children(kind::DECL, children));
        }
        let start = self.pos;
        let lhs = self.expr()?;
        if self.at("=") {
            if !is_lvalue(&lhs) {
                self.pos = start;
                return self.error("assignable expression");
            }
            let op = AstNode::leaf(kind::OPERATOR, self.bump().text);
            let rhs = self.expr()?;
            self.expect(";")?;
            return Ok(AstNode::with_children(kind::ASSIGN, vec![lhs, op, rhs]));
        }
        if lhs.is(kind::CALL) {
            self.expect(";")?;
            return Ok(AstNode::with_children(kind::CALL_STMT, vec![lhs]));
        }
        self.error("`=` or a call statement")
    }

    fn if_stmt(&mut self) -> Result<AstNode> {
        self.expect("if")?;
        self.expect("(")?;
        let cond = self.expr()?;
        self.expect(")")?;
        let then = AstNode::with_children(kind::BLOCK, self.body()?);
        let mut children = vec![cond, then];
        if self.eat("else") {
            let stmts = if self.at("if") {
                self.mark_statement();
                vec![self.if_stmt()?]
            } else {
                self.body()?
            };
            children.push(AstNode::with_children(kind::BLOCK, stmts));
        }
        Ok(AstNode::with_children(kind::IF, children))
    }

    fn for_clause(&mut self, node_kind: &str, allow_decl: bool) -> Result<AstNode> {
        let mut children = Vec::new();
        if allow_decl && self.looks_like_decl() {
            children.push(self.ty()?);
            children.push(self.ident()?);
        } else {
            let lhs = self.postfix()?;
            if !is_lvalue(&lhs) {
                return self.error("assignable expression");
            }
            children.push(lhs);
        }
        if !self.at("=") {
            return self.error("`=`");
        }
        children.push(AstNode::leaf(kind::OPERATOR, self.bump().text));
        children.push(self.expr()?);
        Ok(AstNode::with_children(node_kind, children))
    }

    fn expr(&mut self) -> Result<AstNode> {
        self.binary(0)
    }

    fn binary(&mut self, level: usize) -> Result<AstNode> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while self.peek().class == TokenClass::Operator
            && LEVELS[level].contains(&self.peek().text.as_str())
        {
            let op = AstNode::leaf(kind::OPERATOR, self.bump().text);
            let rhs = self.binary(level + 1)?;
            lhs = AstNode::with_children(kind::BIN_OP, vec![lhs, op, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<AstNode> {
        if self.peek().class == TokenClass::Operator && (self.at("-") || self.at("!")) {
            let op = AstNode::leaf(kind::OPERATOR, self.bump().text);
            let operand = self.unary()?;
            return Ok(AstNode::with_children(kind::UNARY_OP, vec![op, operand]));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<AstNode> {
        let mut node = self.primary()?;
        loop {
            if self.eat(".") {
                let name = self.ident()?;
                node = AstNode::with_children(kind::MEMBER, vec![node, name]);
            } else if self.at("(") {
                let args = self.args()?;
                node = AstNode::with_children(kind::CALL, vec![node, args]);
            } else if self.eat("[") {
                let idx = self.expr()?;
                self.expect("]")?;
                node = AstNode::with_children(kind::INDEX, vec![node, idx]);
            } else {
                return Ok(node);
            }
        }
    }

    fn args(&mut self) -> Result<AstNode> {
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.at(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(AstNode::with_children(kind::ARGS, args))
    }

    fn primary(&mut self) -> Result<AstNode> {
        let tok = self.peek().clone();
        match tok.class {
            TokenClass::Ident => self.ident(),
            TokenClass::Number | TokenClass::Str | TokenClass::Constant => {
                self.bump();
                Ok(AstNode::leaf(kind::LITERAL, tok.text))
            }
            TokenClass::This => {
                self.bump();
                Ok(AstNode::leaf(kind::THIS, tok.text))
            }
            TokenClass::Keyword if tok.text == "new" => {
                self.bump();
                let ty = self.ty()?;
                let args = self.args()?;
                Ok(AstNode::with_children(kind::NEW, vec![ty, args]))
            }
            TokenClass::Punct if tok.text == "(" => {
                self.bump();
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            _ => self.error("expression"),
        }
    }
}

fn is_lvalue(node: &AstNode) -> bool {
    node.is(kind::IDENTIFIER) || node.is(kind::MEMBER) || node.is(kind::INDEX)
}
