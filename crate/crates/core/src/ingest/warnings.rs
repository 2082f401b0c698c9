//! Bug-detector warnings in the FindBugs XML report layout.
//!
//! Recognized subset: `BugCollection > BugInstance[type, priority, category]`
//! with children `Class[classname]`, `Method[name]`, `SourceLine[start, end]`
//! and `LongMessage` text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The detector's public warning taxonomy; anything else maps to [`UNKNOWN_CATEGORY`].
pub const CATEGORIES: [&str; 9] = [
    "CORRECTNESS",
    "BAD_PRACTICE",
    "STYLE",
    "PERFORMANCE",
    "MALICIOUS_CODE",
    "MT_CORRECTNESS",
    "I18N",
    "SECURITY",
    "EXPERIMENTAL",
];
pub const UNKNOWN_CATEGORY: &str = "UNKNOWN";
/// Width of the one-hot category encoding (the nine categories plus UNKNOWN).
pub const CATEGORY_SLOTS: usize = CATEGORIES.len() + 1;

pub fn category_slot(category: &str) -> usize {
    CATEGORIES
        .iter()
        .position(|c| *c == category)
        .unwrap_or(CATEGORIES.len())
}

pub fn normalize_category(category: &str) -> String {
    if CATEGORIES.contains(&category) {
        category.to_string()
    } else {
        UNKNOWN_CATEGORY.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugWarning {
    #[serde(rename = "type")]
    pub warning_type: String,
    pub category: String,
    /// 1 (high) to 3 (low).
    pub priority: u8,
    #[serde(rename = "class")]
    pub class_name: String,
    #[serde(default, rename = "method")]
    pub method_name: Option<String>,
    #[serde(default, rename = "start")]
    pub line_start: u32,
    #[serde(default, rename = "end")]
    pub line_end: u32,
    #[serde(default)]
    pub message: String,
}

impl BugWarning {
    /// Enforce the documented invariants, normalizing the category.
    pub fn validated(mut self) -> Result<Self> {
        if !(1..=3).contains(&self.priority) {
            return Err(Error::format_detail(
                "priority",
                format!("{} not in 1..=3", self.priority),
            ));
        }
        if self.line_start > self.line_end {
            return Err(Error::format_detail(
                "SourceLine",
                format!("start {} > end {}", self.line_start, self.line_end),
            ));
        }
        self.category = normalize_category(&self.category);
        Ok(self)
    }

    pub fn overlaps(&self, start: u32, end: u32) -> bool {
        self.line_start <= end && start <= self.line_end
    }
}

/// Parse a warning report. Warnings are returned in document order.
pub fn load_warnings(bytes: &[u8]) -> Result<Vec<BugWarning>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::format_detail("xml", e.to_string()))?;
    let doc = roxmltree::Document::parse(text)
        .map_err(|e| Error::format_detail("xml", e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "BugCollection" {
        return Err(Error::format_detail(
            "BugCollection",
            format!("root element is <{}>", root.tag_name().name()),
        ));
    }
    root.children()
        .filter(|n| n.has_tag_name("BugInstance"))
        .map(parse_instance)
        .collect()
}

fn parse_instance(node: roxmltree::Node<'_, '_>) -> Result<BugWarning> {
    let attr = |name: &str| -> Result<&str> {
        node.attribute(name).ok_or_else(|| Error::format(name))
    };
    let warning_type = attr("type")?.to_string();
    let priority: u8 = attr("priority")?
        .trim()
        .parse()
        .map_err(|_| Error::format("priority"))?;
    let category = attr("category")?.to_string();
    let child = |tag: &str| node.children().find(|c| c.has_tag_name(tag));
    let class_name = child("Class")
        .and_then(|c| c.attribute("classname"))
        .ok_or_else(|| Error::format("Class"))?
        .to_string();
    let method_name = child("Method")
        .and_then(|m| m.attribute("name"))
        .map(str::to_string);
    // Prefer a SourceLine directly under the instance, then any nested one.
    let source_line = child("SourceLine").or_else(|| node.descendants().find(|d| d.has_tag_name("SourceLine")));
    let line_attr = |name: &str| -> Result<u32> {
        match source_line.and_then(|s| s.attribute(name)) {
            None => Ok(0),
            Some(v) => v.trim().parse().map_err(|_| Error::format(name)),
        }
    };
    let line_start = line_attr("start")?;
    let line_end = line_attr("end")?;
    let message = child("LongMessage")
        .and_then(|m| m.text())
        .unwrap_or("")
        .trim()
        .to_string();
    BugWarning {
        warning_type,
        category,
        priority,
        class_name,
        method_name,
        line_start,
        line_end,
        message,
    }
    .validated()
}

/// Write warnings back out in the same XML subset.
pub fn write_warnings(warnings: &[BugWarning]) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<BugCollection>\n");
    for w in warnings {
        out.push_str(&format!(
            "  <BugInstance type=\"{}\" priority=\"{}\" category=\"{}\">\n",
            xml_escape(&w.warning_type),
            w.priority,
            xml_escape(&w.category)
        ));
        out.push_str(&format!("    <Class classname=\"{}\"/>\n", xml_escape(&w.class_name)));
        if let Some(m) = &w.method_name {
            out.push_str(&format!("    <Method name=\"{}\"/>\n", xml_escape(m)));
        }
        out.push_str(&format!(
            "    <SourceLine start=\"{}\" end=\"{}\"/>\n",
            w.line_start, w.line_end
        ));
        out.push_str(&format!(
            "    <LongMessage>{}</LongMessage>\n  </BugInstance>\n",
            xml_escape(&w.message)
        ));
    }
    out.push_str("</BugCollection>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
