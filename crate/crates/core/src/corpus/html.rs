use std::path::Path;

use ego_tree::NodeRef;
use scraper::{Html, Node};
use walkdir::WalkDir;

use super::{normalize_whitespace, Document, DocumentKind};
use crate::error::{Error, Result};

const HIDDEN: &[&str] = &[
    "head", "script", "style", "noscript", "template", "svg", "iframe", "object",
];

const BLOCK: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "br",
    "caption",
    "dd",
    "details",
    "div",
    "dl",
    "dt",
    "fieldset",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "li",
    "main",
    "nav",
    "ol",
    "option",
    "p",
    "pre",
    "section",
    "summary",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "tr",
    "ul",
];

/// Visible text of an API reference page. Inline markup (`<code>`, `<a>`,
/// `<b>` ...) is flattened without separators so that signatures split over
/// several tags stay contiguous; block elements are separated by a space.
pub fn extract_api_doc_text(html: &str, id: &str) -> Result<Document> {
    let doc = Html::parse_document(html);
    let mut out = String::new();
    collect_text(doc.tree.root(), &mut out);
    // decoded entities such as `&lt;E&gt;` must not reintroduce markup
    let text = normalize_whitespace(&out.replace('<', "\u{2039}").replace('>', "\u{203a}"));
    if text.is_empty() {
        return Err(Error::EmptyDocument(id.to_owned()));
    }
    Ok(Document::new(id, DocumentKind::ApiDoc, text))
}

fn collect_text(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(el) => {
            let name = el.name();
            if HIDDEN.contains(&name) {
                return;
            }
            let block = BLOCK.contains(&name);
            if block {
                out.push(' ');
            }
            for child in node.children() {
                collect_text(child, out);
            }
            if block {
                out.push(' ');
            }
        }
        Node::Document | Node::Fragment => {
            for child in node.children() {
                collect_text(child, out);
            }
        }
        _ => {}
    }
}

/// Loads every `.html`/`.htm` (extracted) and `.txt` (verbatim) file under
/// `dir`, sorted by path. Document ids are the relative paths without
/// extension. Pages without visible text are skipped.
pub fn load_api_docs(dir: &Path) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(
                path,
                e.into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("walk failed")),
            )
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        let is_html = matches!(ext.as_deref(), Some("html" | "htm"));
        if !is_html && ext.as_deref() != Some("txt") {
            continue;
        }
        let id = doc_id(dir, path);
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc = if is_html {
            extract_api_doc_text(&raw, &id)
        } else {
            let text = normalize_whitespace(&raw);
            if text.is_empty() {
                Err(Error::EmptyDocument(id.clone()))
            } else {
                Ok(Document::new(id, DocumentKind::ApiDoc, text))
            }
        };
        match doc {
            Ok(d) => docs.push(d),
            Err(Error::EmptyDocument(id)) => log::warn!("skipping {id}: no visible text"),
            Err(e) => return Err(e),
        }
    }
    Ok(docs)
}

fn doc_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path).with_extension("");
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}
