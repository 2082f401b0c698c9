//! Class-level and method-level structural features.

use std::collections::BTreeSet;

use crate::ast::{kind, AstNode};
use crate::error::{Error, Result};

pub const FEATURE_COUNT: usize = 16;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "method_count",
    "field_count",
    "constructor_count",
    "private_constructor_flag",
    "static_self_field_flag",
    "implemented_interface_count",
    "superclass_flag",
    "abstract_flag",
    "static_factory_method_count",
    "interface_typed_field_count",
    "collection_field_count",
    "override_count",
    "delegating_method_count",
    "self_returning_method_count",
    "iteration_notify_call_count",
    "parameter_count_mean",
];

pub const COLLECTION_TYPES: &[&str] = &[
    "List", "ArrayList", "LinkedList", "Set", "HashSet", "TreeSet", "Map", "HashMap", "TreeMap",
    "Collection", "Vector", "Queue", "Deque",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PatternFeatures(pub [f64; FEATURE_COUNT]);

impl PatternFeatures {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn modifiers(node: &AstNode) -> impl Iterator<Item = &str> {
    node.children_of_kind(kind::MODIFIER).filter_map(|m| m.token.as_deref())
}

fn has_modifier(node: &AstNode, m: &str) -> bool {
    modifiers(node).any(|x| x == m)
}

fn type_name(node: &AstNode) -> Option<String> {
    node.children.iter().find_map(|c| match c.kind.as_str() {
        kind::TYPE => c.token.clone(),
        kind::ARRAY_TYPE => c.first_child(kind::TYPE).and_then(|t| t.token.clone()).map(|t| t + "[]"),
        _ => None,
    })
}

fn decl_name(node: &AstNode) -> Option<&str> {
    node.first_child(kind::IDENTIFIER).and_then(|i| i.token.as_deref())
}

/// Children after the parameter list.
fn body(node: &AstNode) -> &[AstNode] {
    match node.children.iter().position(|c| c.is(kind::PARAMS)) {
        Some(p) => &node.children[p + 1..],
        None => &[],
    }
}

fn param_count(node: &AstNode) -> usize {
    node.first_child(kind::PARAMS).map_or(0, |p| p.children.len())
}

fn identifier_token(node: &AstNode) -> Option<&str> {
    if node.is(kind::IDENTIFIER) {
        node.token.as_deref()
    } else {
        None
    }
}

/// Field named by `f` or `this.f`.
fn field_target<'a>(node: &'a AstNode, fields: &BTreeSet<String>) -> Option<&'a str> {
    let name = match node.kind.as_str() {
        kind::IDENTIFIER => node.token.as_deref(),
        kind::MEMBER if node.children.first().is_some_and(|c| c.is(kind::THIS)) => {
            node.children.get(1).and_then(identifier_token)
        }
        _ => None,
    }?;
    fields.contains(name).then_some(name)
}

fn is_forwarding_call(call: &AstNode, fields: &BTreeSet<String>) -> bool {
    call.is(kind::CALL)
        && call
            .children
            .first()
            .filter(|callee| callee.is(kind::MEMBER))
            .and_then(|callee| callee.children.first())
            .is_some_and(|target| field_target(target, fields).is_some())
}

fn count_loop_member_calls(node: &AstNode, in_loop: bool) -> usize {
    let here = usize::from(
        in_loop && node.is(kind::CALL) && node.children.first().is_some_and(|c| c.is(kind::MEMBER)),
    );
    let inner = in_loop || node.is(kind::WHILE) || node.is(kind::FOR);
    here + node
        .children
        .iter()
        .map(|c| count_loop_member_calls(c, inner))
        .sum::<usize>()
}

fn returns(stmts: &[AstNode]) -> impl Iterator<Item = &AstNode> {
    stmts
        .iter()
        .flat_map(AstNode::preorder)
        .filter(|n| n.is(kind::RETURN))
}

fn locate_class(root: &AstNode) -> Result<(&AstNode, Vec<&AstNode>)> {
    if root.is(kind::CLASS_DEF) {
        return Ok((root, Vec::new()));
    }
    if !root.is(kind::COMPILATION_UNIT) {
        return Err(Error::NotAClass(format!("root is {}", root.kind)));
    }
    let classes: Vec<&AstNode> = root.children_of_kind(kind::CLASS_DEF).collect();
    match classes.as_slice() {
        [one] => Ok((one, root.children.iter().filter(|c| !std::ptr::eq(*c, *one)).collect())),
        [] => Err(Error::NotAClass("compilation unit declares no class".into())),
        many => Err(Error::NotAClass(format!("compilation unit declares {} classes", many.len()))),
    }
}

/// Extract the 16 features from a class, or a compilation unit holding exactly one class.
///
/// Sibling interfaces and functions in the same unit are used to resolve which
/// field types are interfaces and which methods implement interface methods.
pub fn extract_pattern_features(root: &AstNode) -> Result<PatternFeatures> {
    let (class, siblings) = locate_class(root)?;
    let class_name = decl_name(class).unwrap_or_default().to_string();
    let implements: Vec<String> = class
        .first_child(kind::IMPLEMENTS)
        .map(|i| i.children.iter().filter_map(|c| c.token.clone()).collect())
        .unwrap_or_default();
    let superclass = class
        .first_child(kind::EXTENDS)
        .and_then(|e| e.children.first())
        .and_then(|c| c.token.clone());

    let unit_interfaces: Vec<&AstNode> = siblings.iter().copied().filter(|s| s.is(kind::INTERFACE_DEF)).collect();
    let mut abstract_types: BTreeSet<String> = unit_interfaces
        .iter()
        .filter_map(|i| decl_name(i).map(String::from))
        .collect();
    abstract_types.extend(implements.iter().cloned());
    abstract_types.extend(superclass.iter().cloned());
    let inherited_methods: BTreeSet<String> = unit_interfaces
        .iter()
        .filter(|i| decl_name(i).is_some_and(|n| implements.iter().any(|x| x == n)))
        .flat_map(|i| i.children_of_kind(kind::METHOD))
        .filter_map(|m| decl_name(m).map(String::from))
        .collect();

    let methods: Vec<&AstNode> = class.children_of_kind(kind::METHOD).collect();
    let fields: Vec<&AstNode> = class.children_of_kind(kind::FIELD).collect();
    let ctors: Vec<&AstNode> = class.children_of_kind(kind::CONSTRUCTOR).collect();
    let field_names: BTreeSet<String> = fields.iter().filter_map(|f| decl_name(f).map(String::from)).collect();

    let flag = |b: bool| f64::from(u8::from(b));
    let count = |n: usize| n as f64;

    let static_self_field = fields
        .iter()
        .any(|f| has_modifier(f, "static") && type_name(f).as_deref() == Some(class_name.as_str()));
    let factory = methods
        .iter()
        .filter(|m| {
            let static_self = has_modifier(m, "static") && type_name(m).as_deref() == Some(class_name.as_str());
            let returns_new = returns(body(m)).any(|r| r.children.first().is_some_and(|e| e.is(kind::NEW)));
            static_self || returns_new
        })
        .count();
    let interface_fields = fields
        .iter()
        .filter(|f| type_name(f).is_some_and(|t| abstract_types.contains(&t)))
        .count();
    let collection_fields = fields
        .iter()
        .filter(|f| {
            f.first_child(kind::ARRAY_TYPE).is_some()
                || type_name(f).is_some_and(|t| COLLECTION_TYPES.contains(&t.as_str()))
        })
        .count();
    let overrides = methods
        .iter()
        .filter(|m| {
            has_modifier(m, "@Override") || decl_name(m).is_some_and(|n| inherited_methods.contains(n))
        })
        .count();
    let delegating = methods
        .iter()
        .filter(|m| {
            body(m)
                .iter()
                .flat_map(AstNode::preorder)
                .any(|n| is_forwarding_call(n, &field_names))
        })
        .count();
    let self_returning = methods
        .iter()
        .filter(|m| {
            returns(body(m)).any(|r| r.children.first().is_some_and(|e| e.is(kind::THIS)))
                || (!has_modifier(m, "static") && type_name(m).as_deref() == Some(class_name.as_str()))
        })
        .count();
    let notify_calls: usize = methods
        .iter()
        .flat_map(|m| body(m))
        .map(|s| count_loop_member_calls(s, false))
        .sum();
    let callables = methods.len() + ctors.len();
    let param_mean = if callables == 0 {
        0.0
    } else {
        methods.iter().chain(&ctors).map(|m| param_count(m)).sum::<usize>() as f64 / callables as f64
    };

    Ok(PatternFeatures([
        count(methods.len()),
        count(fields.len()),
        count(ctors.len()),
        flag(ctors.iter().any(|c| has_modifier(c, "private"))),
        flag(static_self_field),
        count(implements.len()),
        flag(superclass.is_some()),
        flag(has_modifier(class, "abstract")),
        count(factory),
        count(interface_fields),
        count(collection_fields),
        count(overrides),
        count(delegating),
        count(self_returning),
        count(notify_calls),
        param_mean,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_mini;

    fn features(src: &str) -> PatternFeatures {
        extract_pattern_features(&parse_mini(src).unwrap()).unwrap()
    }

    #[test]
    fn singleton_fixture() {
        let f = features(
            "class Registry {
                private static Registry instance;
                private Registry() { }
                public static Registry getInstance() {
                    if (instance == null) { instance = new Registry(); }
                    return instance;
                }
            }",
        );
        assert_eq!(f.get("private_constructor_flag"), Some(1.0));
        assert_eq!(f.get("static_self_field_flag"), Some(1.0));
        assert!(f.get("static_factory_method_count").unwrap() >= 1.0);
        assert_eq!(f.get("constructor_count"), Some(1.0));
        assert_eq!(f.get("method_count"), Some(1.0));
    }

    #[test]
    fn empty_class_is_all_zero() {
        assert_eq!(features("class Empty { }"), PatternFeatures::default());
    }

    #[test]
    fn decorator_fixture() {
        let f = features(
            "interface Shape { int area(); int width(); int height(); }
             class Framed implements Shape {
                private Shape inner;
                Framed(Shape s) { inner = s; }
                public int area() { return inner.area() + 4; }
                public int width() { return this.inner.width() + 2; }
                public int height() { return inner.height() + 2; }
             }",
        );
        assert_eq!(f.get("delegating_method_count"), Some(3.0));
        assert_eq!(f.get("interface_typed_field_count"), Some(1.0));
        assert_eq!(f.get("override_count"), Some(3.0));
        assert_eq!(f.get("implemented_interface_count"), Some(1.0));
        assert_eq!(f.get("parameter_count_mean"), Some(0.25));
    }

    #[test]
    fn observer_fixture() {
        let f = features(
            "class Feed {
                private Listener[] listeners;
                private int count;
                public void publish(int v) {
                    for (int i = 0; i < count; i = i + 1) { listeners[i].update(v); }
                }
             }",
        );
        assert_eq!(f.get("collection_field_count"), Some(1.0));
        assert_eq!(f.get("iteration_notify_call_count"), Some(1.0));
        assert_eq!(f.get("delegating_method_count"), Some(0.0));
    }

    #[test]
    fn builder_style_self_return() {
        let f = features("class B { int x; B setX(int v) { x = v; return this; } }");
        assert_eq!(f.get("self_returning_method_count"), Some(1.0));
    }

    #[test]
    fn non_class_roots_rejected() {
        assert!(matches!(
            extract_pattern_features(&parse_mini("int f(){return 1;}").unwrap()),
            Err(Error::NotAClass(_))
        ));
        assert!(matches!(
            extract_pattern_features(&parse_mini("class A{} class B{}").unwrap()),
            Err(Error::NotAClass(_))
        ));
    }

    #[test]
    fn nonnegative_and_flags_binary() {
        let f = features("abstract class A extends B { static A make() { return new A(); } }");
        assert!(f.0.iter().all(|v| *v >= 0.0));
        for i in [3, 4, 6, 7] {
            assert!(f.0[i] == 0.0 || f.0[i] == 1.0);
        }
        assert_eq!(f.get("abstract_flag"), Some(1.0));
        assert_eq!(f.get("superclass_flag"), Some(1.0));
        assert_eq!(f.get("static_factory_method_count"), Some(1.0));
    }
}
