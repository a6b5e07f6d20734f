//! A small DOT reader/writer: directed graphs with node, edge and graph
//! attribute statements. Subgraphs, ports and HTML labels are rejected.

use std::fmt::{self, Write as _};

use super::DotError;

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotNode {
    pub id: String,
    pub attrs: Attrs,
    /// 1-based source line of the first mention (0 when built in memory).
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotEdge {
    pub source: String,
    pub target: String,
    pub attrs: Attrs,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotDocument {
    pub name: Option<String>,
    /// Lines written as `// ...` before the graph; not read back.
    pub comments: Vec<String>,
    pub graph_attrs: Attrs,
    pub nodes: Vec<DotNode>,
    pub edges: Vec<DotEdge>,
}

pub fn attr<'a>(attrs: &'a Attrs, key: &str) -> Option<&'a str> {
    attrs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn set_attr(attrs: &mut Attrs, key: String, value: String) {
    match attrs.iter_mut().find(|(k, _)| *k == key) {
        Some(slot) => slot.1 = value,
        None => attrs.push((key, value)),
    }
}

impl DotDocument {
    pub fn new(name: impl Into<String>) -> Self {
        DotDocument { name: Some(name.into()), ..Default::default() }
    }

    pub fn graph_attr(&self, key: &str) -> Option<&str> {
        attr(&self.graph_attrs, key)
    }

    pub fn node(&self, id: &str) -> Option<&DotNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn parse(text: &str) -> Result<DotDocument, DotError> {
        Parser::new(text)?.document()
    }

    fn node_mut(&mut self, id: &str, line: usize, defaults: &Attrs) -> &mut DotNode {
        let pos = match self.nodes.iter().position(|n| n.id == id) {
            Some(p) => p,
            None => {
                self.nodes.push(DotNode { id: id.to_string(), attrs: defaults.clone(), line });
                self.nodes.len() - 1
            }
        };
        &mut self.nodes[pos]
    }
}

fn is_plain_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(s))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn id(s: &str) -> String {
    if is_plain_id(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn write_attrs(out: &mut String, attrs: &Attrs) {
    if attrs.is_empty() {
        return;
    }
    out.push_str(" [");
    for (i, (k, v)) in attrs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}={}", id(k), quote(v));
    }
    out.push(']');
}

impl fmt::Display for DotDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "// {c}");
        }
        match &self.name {
            Some(n) => {
                let _ = writeln!(out, "digraph {} {{", id(n));
            }
            None => out.push_str("digraph {\n"),
        }
        for (k, v) in &self.graph_attrs {
            let _ = writeln!(out, "  {}={};", id(k), quote(v));
        }
        for n in &self.nodes {
            out.push_str("  ");
            out.push_str(&id(&n.id));
            write_attrs(&mut out, &n.attrs);
            out.push_str(";\n");
        }
        for e in &self.edges {
            let _ = write!(out, "  {} -> {}", id(&e.source), id(&e.target));
            write_attrs(&mut out, &e.attrs);
            out.push_str(";\n");
        }
        out.push_str("}\n");
        f.write_str(&out)
    }
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Quoted(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Equals,
    Semi,
    Comma,
    Arrow,
    Undirected,
    Colon,
    Lt,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, DotError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let syntax = |line, col, msg: String| DotError::Syntax { line, column: col, message: msg };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' && col == 1 {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(syntax(l0, c0, "unterminated comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '=' => Some(Tok::Equals),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '<' => Some(Tok::Lt),
            _ => None,
        };
        if let Some(tok) = simple {
            bump!();
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            bump!();
            bump!();
            out.push(Spanned { tok: Tok::Arrow, line: l0, col: c0 });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            bump!();
            bump!();
            out.push(Spanned { tok: Tok::Undirected, line: l0, col: c0 });
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(syntax(l0, c0, "unterminated string".into())),
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        match chars.get(i) {
                            Some('n') => s.push('\n'),
                            Some('\n') => {}
                            Some(&other) => s.push(other),
                            None => return Err(syntax(l0, c0, "unterminated string".into())),
                        }
                        bump!();
                    }
                    Some(&other) => {
                        s.push(other);
                        bump!();
                    }
                }
            }
            out.push(Spanned { tok: Tok::Quoted(s), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let mut s = String::new();
            while let Some(&d) = chars.get(i) {
                if d.is_ascii_alphanumeric() || d == '_' || d == '.' || (d == '-' && s.is_empty()) {
                    s.push(d);
                    bump!();
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Id(s), line: l0, col: c0 });
            continue;
        }
        return Err(syntax(l0, c0, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Self, DotError> {
        let toks = tokenize(text)?;
        let lines = text.lines().count().max(1);
        let last_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        Ok(Parser { toks, pos: 0, end: (lines, last_col) })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, DotError> {
        let (line, column) = self.here();
        Err(DotError::Syntax { line, column, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), DotError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn id(&mut self) -> Result<String, DotError> {
        match self.peek().cloned() {
            Some(Tok::Id(s)) | Some(Tok::Quoted(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Lt) => self.error("HTML labels are not supported"),
            _ => self.error("expected identifier"),
        }
    }

    fn document(mut self) -> Result<DotDocument, DotError> {
        let mut doc = DotDocument::default();
        if self.keyword("strict") {
            self.pos += 1;
        }
        if self.keyword("graph") {
            return self.error("undirected graphs are not supported");
        }
        if !self.keyword("digraph") {
            return self.error("expected `digraph`");
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_)) | Some(Tok::Quoted(_))) {
            doc.name = Some(self.id()?);
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut node_defaults = Attrs::new();
        let mut edge_defaults = Attrs::new();
        loop {
            match self.peek() {
                None => return self.error("expected `}`"),
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Semi) => {
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }
            self.statement(&mut doc, &mut node_defaults, &mut edge_defaults)?;
        }
        if self.peek().is_some() {
            return self.error("trailing input after graph");
        }
        Ok(doc)
    }

    fn statement(
        &mut self,
        doc: &mut DotDocument,
        node_defaults: &mut Attrs,
        edge_defaults: &mut Attrs,
    ) -> Result<(), DotError> {
        if self.keyword("subgraph") || self.peek() == Some(&Tok::LBrace) {
            return self.error("subgraphs are not supported");
        }
        for (kw, target) in [("graph", 0), ("node", 1), ("edge", 2)] {
            if self.keyword(kw) && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LBracket) {
                self.pos += 1;
                let attrs = self.attr_lists()?;
                let dest = match target {
                    0 => &mut doc.graph_attrs,
                    1 => &mut *node_defaults,
                    _ => &mut *edge_defaults,
                };
                for (k, v) in attrs {
                    set_attr(dest, k, v);
                }
                return Ok(());
            }
        }
        let (line, _) = self.here();
        let first = self.id()?;
        if self.peek() == Some(&Tok::Colon) {
            return self.error("ports are not supported");
        }
        if self.peek() == Some(&Tok::Equals) {
            self.pos += 1;
            let value = self.id()?;
            set_attr(&mut doc.graph_attrs, first, value);
            return Ok(());
        }
        let mut chain = vec![first];
        loop {
            match self.peek() {
                Some(Tok::Arrow) => {
                    self.pos += 1;
                    chain.push(self.id()?);
                    if self.peek() == Some(&Tok::Colon) {
                        return self.error("ports are not supported");
                    }
                }
                Some(Tok::Undirected) => return self.error("undirected edge `--` in a digraph"),
                _ => break,
            }
        }
        let attrs = if self.peek() == Some(&Tok::LBracket) { self.attr_lists()? } else { Attrs::new() };
        if chain.len() == 1 {
            let node = doc.node_mut(&chain[0], line, node_defaults);
            for (k, v) in attrs {
                set_attr(&mut node.attrs, k, v);
            }
        } else {
            for id in &chain {
                doc.node_mut(id, line, node_defaults);
            }
            for pair in chain.windows(2) {
                let mut merged = edge_defaults.clone();
                for (k, v) in &attrs {
                    set_attr(&mut merged, k.clone(), v.clone());
                }
                doc.edges.push(DotEdge { source: pair[0].clone(), target: pair[1].clone(), attrs: merged, line });
            }
        }
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
        }
        Ok(())
    }

    fn attr_lists(&mut self) -> Result<Attrs, DotError> {
        let mut out = Attrs::new();
        while self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            loop {
                match self.peek() {
                    Some(Tok::RBracket) => {
                        self.pos += 1;
                        break;
                    }
                    Some(Tok::Comma) | Some(Tok::Semi) => {
                        self.pos += 1;
                    }
                    _ => {
                        let key = self.id()?;
                        self.expect(Tok::Equals, "`=` in attribute")?;
                        let value = self.id()?;
                        set_attr(&mut out, key, value);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_statements_and_defaults() {
        let doc = DotDocument::parse(
            r#"
            /* header */
            digraph g {
              rankdir=LR; // layout
              graph [actions="a,b"];
              node [shape=circle];
              s0 [initial="true"];
              s0 -> s1 -> "s 2" [label=a, reset="x"];
              edge [guard="x>=1"]
              s1 -> s0 [label="b"; reset=y]
            }"#,
        )
        .unwrap();
        assert_eq!(doc.name.as_deref(), Some("g"));
        assert_eq!(doc.graph_attr("rankdir"), Some("LR"));
        assert_eq!(doc.graph_attr("actions"), Some("a,b"));
        assert_eq!(doc.nodes.iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["s0", "s1", "s 2"]);
        assert_eq!(attr(&doc.nodes[0].attrs, "shape"), Some("circle"));
        assert_eq!(doc.edges.len(), 3);
        assert_eq!(attr(&doc.edges[1].attrs, "label"), Some("a"));
        assert_eq!(attr(&doc.edges[2].attrs, "guard"), Some("x>=1"));
        assert_eq!(doc.edges[2].line, 10);
    }

    #[test]
    fn reports_positions() {
        let err = DotDocument::parse("digraph {\n  a -> ;\n}").unwrap_err();
        assert_eq!(err, DotError::Syntax { line: 2, column: 8, message: "expected identifier".into() });
        assert!(matches!(DotDocument::parse("graph { a -- b }"), Err(DotError::Syntax { .. })));
        assert!(matches!(DotDocument::parse("digraph { subgraph c { a } }"), Err(DotError::Syntax { .. })));
        assert!(matches!(DotDocument::parse("digraph { a"), Err(DotError::Syntax { .. })));
        assert!(matches!(DotDocument::parse("digraph { a [x=\"y] }"), Err(DotError::Syntax { .. })));
        assert!(matches!(DotDocument::parse("digraph { a:p -> b }"), Err(DotError::Syntax { .. })));
    }

    #[test]
    fn render_round_trips() {
        let mut doc = DotDocument::new("m");
        doc.graph_attrs.push(("actions".into(), "a".into()));
        doc.nodes.push(DotNode { id: "s1+s2".into(), attrs: vec![("q".into(), "say \"hi\"".into())], line: 0 });
        doc.nodes.push(DotNode { id: "node".into(), attrs: vec![], line: 0 });
        doc.edges.push(DotEdge { source: "s1+s2".into(), target: "node".into(), attrs: vec![], line: 0 });
        let text = doc.to_string();
        let back = DotDocument::parse(&text).unwrap();
        assert_eq!(back.nodes.len(), 2);
        assert_eq!(back.nodes[0].id, "s1+s2");
        assert_eq!(attr(&back.nodes[0].attrs, "q"), Some("say \"hi\""));
        assert_eq!(back.nodes[1].id, "node");
        assert_eq!(back.to_string(), text);
    }
}
