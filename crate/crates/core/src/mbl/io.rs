//! Plain-text model files.
//!
//! ```text
//! MBSP-MODEL v1
//! algorithm<TAB>ib1ig|igtree
//! features<TAB>N
//! <name><TAB>symbolic|numeric<TAB><weight>      (N lines)
//! classes<TAB>M
//! <label>                                      (M lines)
//! instances<TAB>K                              (ib1ig)
//! <value><TAB>...<TAB><value><TAB><class>      (K lines)
//! tree<TAB>K                                   (igtree)
//! *<TAB><default class>                        (root)
//! <2*depth spaces>=<value><TAB><default class> (K-1 lines, pre-order)
//! ```
//!
//! Fields are tab-separated. Backslash, tab, newline and carriage return
//! inside a field are written as `\\`, `\t`, `\n`, `\r`; the padding value
//! is the field `\_`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::igtree::{IgTreeModel, NodeRef};
use super::schema::{FeatureKind, FeatureSchema, FeatureSpec, FeatureValue, Instance};
use super::{Algorithm, Classifier, Ib1Model, InstanceBase, MblError};

pub const MAGIC: &str = "MBSP-MODEL";
pub const VERSION: &str = "v1";

const MISSING_FIELD: &str = "\\_";

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported model version {version:?} (this build reads {VERSION})")]
    UnsupportedVersion { line: usize, version: String },
    #[error(transparent)]
    Model(#[from] MblError),
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(c) => return Err(format!("unknown escape \\{c}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

fn encode_value(value: &FeatureValue) -> String {
    match value {
        FeatureValue::Missing => MISSING_FIELD.to_string(),
        FeatureValue::Symbolic(s) => escape(s),
        FeatureValue::Numeric(x) => format!("{x}"),
    }
}

fn decode_value(kind: FeatureKind, field: &str) -> Result<FeatureValue, String> {
    if field == MISSING_FIELD {
        return Ok(FeatureValue::Missing);
    }
    match kind {
        FeatureKind::Symbolic => unescape(field).map(FeatureValue::Symbolic),
        FeatureKind::Numeric => field
            .parse::<f64>()
            .map(FeatureValue::Numeric)
            .map_err(|_| format!("bad numeric value {field:?}")),
    }
}

pub fn write_model<W: Write>(model: &Classifier, out: &mut W) -> io::Result<()> {
    writeln!(out, "{MAGIC} {VERSION}")?;
    writeln!(out, "algorithm\t{}", model.algorithm())?;
    let schema = model.schema();
    writeln!(out, "features\t{}", schema.len())?;
    for (spec, w) in schema.features().iter().zip(schema.weights()) {
        writeln!(out, "{}\t{}\t{w}", escape(&spec.name), spec.kind.as_str())?;
    }
    writeln!(out, "classes\t{}", schema.class_domain().len())?;
    for class in schema.class_domain() {
        writeln!(out, "{}", escape(class))?;
    }
    match model {
        Classifier::Ib1(m) => {
            let instances = m.base().instances();
            writeln!(out, "instances\t{}", instances.len())?;
            for inst in instances {
                for v in &inst.values {
                    write!(out, "{}\t", encode_value(v))?;
                }
                writeln!(out, "{}", escape(&inst.class))?;
            }
        }
        Classifier::IgTree(m) => {
            writeln!(out, "tree\t{}", m.node_count())?;
            write_node(out, m.root(), None)?;
        }
    }
    Ok(())
}

fn write_node<W: Write>(
    out: &mut W,
    node: NodeRef<'_>,
    value: Option<&FeatureValue>,
) -> io::Result<()> {
    match value {
        None => writeln!(out, "*\t{}", escape(node.default_class()))?,
        Some(v) => writeln!(
            out,
            "{:indent$}={}\t{}",
            "",
            encode_value(v),
            escape(node.default_class()),
            indent = 2 * node.depth()
        )?,
    }
    for (v, child) in node.children() {
        write_node(out, child, Some(v))?;
    }
    Ok(())
}

pub fn save_model(model: &Classifier, path: impl AsRef<Path>) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_model(model, &mut out)?;
    out.flush()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Classifier, ModelIoError> {
    read_model(BufReader::new(File::open(path)?))
}

struct LineReader<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> LineReader<R> {
    fn next(&mut self) -> Result<String, ModelIoError> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => {
                let mut l = l?;
                if l.ends_with('\r') {
                    l.pop();
                }
                Ok(l)
            }
            None => Err(self.error("unexpected end of file")),
        }
    }

    fn error(&self, message: impl Into<String>) -> ModelIoError {
        ModelIoError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<String, ModelIoError> {
        let l = self.next()?;
        match l.split_once('\t') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => Err(self.error(format!("expected `{key}<TAB>...`, found {l:?}"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize, ModelIoError> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| self.error(format!("bad {key} count {v:?}")))
    }
}

pub fn read_model<R: BufRead>(input: R) -> Result<Classifier, ModelIoError> {
    let mut lines = LineReader {
        inner: input.lines(),
        line: 0,
    };
    let header = lines.next()?;
    match header.split_once(' ') {
        Some((MAGIC, VERSION)) => {}
        Some((MAGIC, version)) => {
            return Err(ModelIoError::UnsupportedVersion {
                line: 1,
                version: version.to_string(),
            })
        }
        _ => return Err(lines.error(format!("not a model file (header {header:?})"))),
    }
    let algorithm: Algorithm = lines
        .keyed("algorithm")?
        .parse()
        .map_err(|e: MblError| lines.error(e.to_string()))?;

    let n_features = lines.count("features")?;
    let mut specs = Vec::with_capacity(n_features);
    let mut weights = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        let l = lines.next()?;
        let fields: Vec<&str> = l.split('\t').collect();
        let [name, kind, weight] = fields[..] else {
            return Err(lines.error("feature line needs name, kind and weight"));
        };
        let name = unescape(name).map_err(|e| lines.error(e))?;
        let kind: FeatureKind = kind
            .parse()
            .map_err(|e: MblError| lines.error(e.to_string()))?;
        let weight: f64 = weight
            .parse()
            .map_err(|_| lines.error(format!("bad weight {weight:?}")))?;
        specs.push(FeatureSpec { name, kind });
        weights.push(weight);
    }
    let mut schema = FeatureSchema::new(specs).map_err(|e| lines.error(e.to_string()))?;
    schema
        .set_weights(weights)
        .map_err(|e| lines.error(e.to_string()))?;

    let n_classes = lines.count("classes")?;
    for _ in 0..n_classes {
        let l = lines.next()?;
        let class = unescape(&l).map_err(|e| lines.error(e))?;
        schema.insert_class(&class);
    }

    match algorithm {
        Algorithm::Ib1Ig => {
            let n = lines.count("instances")?;
            let mut base = InstanceBase::new(schema);
            for _ in 0..n {
                let l = lines.next()?;
                let fields: Vec<&str> = l.split('\t').collect();
                if fields.len() != base.schema().len() + 1 {
                    return Err(lines.error(format!(
                        "instance needs {} fields, found {}",
                        base.schema().len() + 1,
                        fields.len()
                    )));
                }
                let values = fields[..fields.len() - 1]
                    .iter()
                    .enumerate()
                    .map(|(f, field)| decode_value(base.schema().kind(f), field))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| lines.error(e))?;
                let class = unescape(fields[fields.len() - 1]).map_err(|e| lines.error(e))?;
                if !base.schema().class_domain().contains(&class) {
                    return Err(lines.error(format!("class {class:?} is not in the class list")));
                }
                base.push(Instance::new(values, class))
                    .map_err(|e| lines.error(e.to_string()))?;
            }
            Ok(Classifier::Ib1(Ib1Model::from_weighted(base)?))
        }
        Algorithm::IgTree => {
            let n = lines.count("tree")?;
            if n == 0 {
                return Err(lines.error("a tree has at least one node"));
            }
            let order = schema.order_by_weight();
            let mut nodes = Vec::with_capacity(n);
            for _ in 0..n {
                let l = lines.next()?;
                let (head, class) = l
                    .rsplit_once('\t')
                    .ok_or_else(|| lines.error("tree line needs a default class"))?;
                let class = unescape(class).map_err(|e| lines.error(e))?;
                if head == "*" {
                    nodes.push((0, None, class));
                    continue;
                }
                let indent = head.len() - head.trim_start_matches(' ').len();
                let rest = &head[indent..];
                let Some(field) = rest.strip_prefix('=') else {
                    return Err(lines.error("tree line must start with `*` or indented `=`"));
                };
                if indent == 0 || indent % 2 != 0 || indent / 2 > order.len() {
                    return Err(lines.error(format!("bad indentation {indent}")));
                }
                let depth = indent / 2;
                let value = decode_value(schema.kind(order[depth - 1]), field)
                    .map_err(|e| lines.error(e))?;
                nodes.push((depth, Some(value), class));
            }
            IgTreeModel::from_parts(schema, nodes)
                .map(Classifier::IgTree)
                .map_err(|e| lines.error(e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_base() -> InstanceBase {
        let schema = FeatureSchema::new(vec![
            FeatureSpec::symbolic("w\tord"),
            FeatureSpec::numeric("dist"),
        ])
        .unwrap();
        InstanceBase::with_instances(
            schema,
            [
                (FeatureValue::symbol(""), FeatureValue::Numeric(-1.0), "S"),
                (
                    FeatureValue::symbol("a\\b"),
                    FeatureValue::Numeric(2.5),
                    "O",
                ),
                (FeatureValue::Missing, FeatureValue::Missing, "-"),
                (
                    FeatureValue::symbol("x\ny"),
                    FeatureValue::Numeric(2.5),
                    "-",
                ),
            ]
            .into_iter()
            .map(|(a, b, c)| Instance::new(vec![a, b], c)),
        )
        .unwrap()
    }

    fn round_trip(model: &Classifier) -> Classifier {
        let mut buf = Vec::new();
        write_model(model, &mut buf).unwrap();
        read_model(&buf[..]).unwrap()
    }

    #[test]
    fn escaping_round_trips() {
        for s in ["", "plain", "tab\there", "back\\slash", "nl\n", "\\t"] {
            assert_eq!(unescape(&escape(s)).unwrap(), s);
        }
    }

    #[test]
    fn ib1_model_round_trips_values() {
        let model = Classifier::train(sample_base(), Algorithm::Ib1Ig).unwrap();
        let loaded = round_trip(&model);
        let (Classifier::Ib1(a), Classifier::Ib1(b)) = (&model, &loaded) else {
            panic!("algorithm changed");
        };
        assert_eq!(a.base().instances(), b.base().instances());
        assert_eq!(a.schema(), b.schema());
        assert_eq!(b.base().instances()[0].values[0], FeatureValue::symbol(""));
    }

    #[test]
    fn igtree_model_round_trips_structure() {
        let model = Classifier::train(sample_base(), Algorithm::IgTree).unwrap();
        let mut first = Vec::new();
        write_model(&model, &mut first).unwrap();
        let loaded = read_model(&first[..]).unwrap();
        let mut second = Vec::new();
        write_model(&loaded, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn other_version_is_rejected_explicitly() {
        let err = read_model("MBSP-MODEL v2\nalgorithm\tib1ig\n".as_bytes()).unwrap_err();
        assert!(
            matches!(err, ModelIoError::UnsupportedVersion { line: 1, ref version } if version == "v2")
        );
    }

    #[test]
    fn garbage_header_reports_line_one() {
        let err = read_model("hello\n".as_bytes()).unwrap_err();
        assert!(matches!(err, ModelIoError::Parse { line: 1, .. }));
    }

    #[test]
    fn truncated_file_reports_line() {
        let model = Classifier::train(sample_base(), Algorithm::Ib1Ig).unwrap();
        let mut buf = Vec::new();
        write_model(&model, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
        let err = read_model(cut.as_bytes()).unwrap_err();
        assert!(matches!(err, ModelIoError::Parse { line: 9, .. }), "{err}");
    }
}
