//! State sources: zoo descriptors and state files.

use std::collections::BTreeMap;
use std::path::Path;

use blochsep::states::{ComplexMatrix, DensityMatrix, ZooSpec};
use num_complex::Complex64;
use serde::Deserialize;

use crate::json::Json;
use crate::{CliError, SCHEMA};

/// Families accepted after `zoo:`, with their parameter keys.
pub const FAMILIES: &[(&str, &str)] = &[
    ("ghz", "N, d"),
    ("ghz-noisy", "N, d, p"),
    ("qutrit-ghz-noisy", "N, p"),
    ("w", "N"),
    ("w-noisy", "N, p"),
    ("reduced-w-noisy", "N, n, p"),
    ("smolin", ""),
    ("duer4", ""),
    ("psi-234", ""),
    ("state-234-noisy", "p"),
    ("werner", "p"),
    ("mixed", "dims"),
];

struct Params {
    family: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn parse(text: &str) -> Result<Self, CliError> {
        let (family, rest) = match text.split_once(':') {
            Some((f, r)) => (f, r),
            None => (text, ""),
        };
        let mut values = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("parameter `{item}` is not key=value")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::invalid(format!("parameter `{k}` given twice")));
            }
        }
        Ok(Self { family: family.trim().to_string(), values })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(CliError::invalid(format!(
                "family `{}` has no parameter `{k}` (accepted: {})",
                self.family,
                if keys.is_empty() { "none".to_string() } else { keys.join(", ") }
            ))),
            None => Ok(()),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::invalid(format!("parameter {key} = `{v}` is not a nonnegative integer"))),
        }
    }

    fn p(&self, fallback: Option<f64>) -> Result<f64, CliError> {
        match self.values.get("p") {
            Some(v) => {
                let p: f64 = v
                    .parse()
                    .map_err(|_| CliError::invalid(format!("parameter p = `{v}` is not a number")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(CliError::invalid(format!("parameter p = {p} outside [0, 1]")));
                }
                Ok(p)
            }
            None => fallback.ok_or_else(|| {
                CliError::invalid(format!("family `{}` needs parameter p", self.family))
            }),
        }
    }

    fn dims(&self) -> Result<Vec<usize>, CliError> {
        let text = self
            .values
            .get("dims")
            .ok_or_else(|| CliError::invalid("family `mixed` needs parameter dims, e.g. dims=2x3"))?;
        text.split('x')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&d| d >= 2)
                    .ok_or_else(|| CliError::invalid(format!("bad dimension `{d}` in dims={text}")))
            })
            .collect()
    }
}

/// Parse `family[:k=v,...]`. Missing `p` falls back to `default_p` when
/// given and is an error otherwise.
pub fn parse_family(text: &str, default_p: Option<f64>) -> Result<ZooSpec, CliError> {
    let params = Params::parse(text)?;
    let spec = match params.family.as_str() {
        "ghz" => {
            params.allow(&["N", "d"])?;
            ZooSpec::Ghz { parties: params.usize_or("N", 3)?, levels: params.usize_or("d", 2)? }
        }
        "ghz-noisy" => {
            params.allow(&["N", "d", "p"])?;
            ZooSpec::GhzNoisy {
                parties: params.usize_or("N", 3)?,
                levels: params.usize_or("d", 2)?,
                p: params.p(default_p)?,
            }
        }
        "qutrit-ghz-noisy" => {
            params.allow(&["N", "p"])?;
            ZooSpec::GhzNoisy { parties: params.usize_or("N", 3)?, levels: 3, p: params.p(default_p)? }
        }
        "w" => {
            params.allow(&["N"])?;
            ZooSpec::W { parties: params.usize_or("N", 3)? }
        }
        "w-noisy" => {
            params.allow(&["N", "p"])?;
            ZooSpec::WNoisy { parties: params.usize_or("N", 3)?, p: params.p(default_p)? }
        }
        "reduced-w-noisy" => {
            params.allow(&["N", "n", "p"])?;
            ZooSpec::ReducedWNoisy {
                parties: params.usize_or("N", 6)?,
                removed: params.usize_or("n", 2)?,
                p: params.p(default_p)?,
            }
        }
        "smolin" => {
            params.allow(&[])?;
            ZooSpec::Smolin
        }
        "duer4" => {
            params.allow(&[])?;
            ZooSpec::DuerBe4
        }
        "psi-234" => {
            params.allow(&[])?;
            ZooSpec::Psi234
        }
        "state-234-noisy" => {
            params.allow(&["p"])?;
            ZooSpec::Psi234Noisy { p: params.p(default_p)? }
        }
        "werner" => {
            params.allow(&["p"])?;
            ZooSpec::Werner { p: params.p(default_p)? }
        }
        "mixed" => {
            params.allow(&["dims"])?;
            ZooSpec::MaximallyMixed { dims: params.dims()? }
        }
        other => {
            let known: Vec<&str> = FAMILIES.iter().map(|(f, _)| *f).collect();
            return Err(CliError::invalid(format!(
                "unknown family `{other}` (known: {})",
                known.join(", ")
            )));
        }
    };
    Ok(spec)
}

/// A loaded state with a description of where it came from.
pub struct Loaded {
    pub state: DensityMatrix,
    pub source: String,
    pub kind: &'static str,
}

impl Loaded {
    pub fn descriptor(&self) -> Json {
        Json::obj()
            .with("source", self.source.as_str())
            .with("kind", self.kind)
            .with("dims", self.state.dims().to_vec())
    }
}

/// `zoo:<family>[:k=v,...]` or a path to a state file.
pub fn load_source(source: &str) -> Result<Loaded, CliError> {
    if let Some(rest) = source.strip_prefix("zoo:") {
        let spec = parse_family(rest, None)?;
        let state = spec.build()?;
        return Ok(Loaded { state, source: source.to_string(), kind: "zoo" });
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| CliError::invalid(format!("cannot read state file `{source}`: {e}")))?;
    let state = parse_state_file(&text)
        .map_err(|e| CliError { message: format!("{source}: {}", e.message), ..e })?;
    Ok(Loaded { state, source: source.to_string(), kind: "file" })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileIn {
    schema: String,
    dims: Vec<usize>,
    #[serde(default)]
    metadata: Metadata,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: Option<String>,
    pub source: Option<String>,
}

/// Parse and validate a state file, naming the first violated invariant.
pub fn parse_state_file(text: &str) -> Result<DensityMatrix, CliError> {
    parse_state_file_with_metadata(text).map(|(state, _)| state)
}

pub fn parse_state_file_with_metadata(text: &str) -> Result<(DensityMatrix, Metadata), CliError> {
    let file: StateFileIn = serde_json::from_str(text)
        .map_err(|e| CliError::invalid(format!("malformed state file: {e}")))?;
    if file.schema != SCHEMA {
        return Err(CliError::invalid(format!(
            "schema `{}` is not `{SCHEMA}`",
            file.schema
        )));
    }
    if file.dims.is_empty() {
        return Err(CliError::invalid("dims is empty"));
    }
    if let Some(d) = file.dims.iter().find(|&&d| d < 2) {
        return Err(CliError::invalid(format!("subsystem dimension {d} < 2")));
    }
    let n: usize = file.dims.iter().product();
    if file.matrix.len() != n {
        return Err(CliError::invalid(format!(
            "matrix has {} rows, dims {:?} need {n}",
            file.matrix.len(),
            file.dims
        )));
    }
    if let Some((r, row)) = file.matrix.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(CliError::invalid(format!(
            "matrix row {r} has {} entries, expected {n}",
            row.len()
        )));
    }
    let m = ComplexMatrix::from_fn(n, n, |r, c| {
        let [re, im] = file.matrix[r][c];
        Complex64::new(re, im)
    });
    let state = DensityMatrix::new(file.dims, m).map_err(|e| CliError::invalid(e.to_string()))?;
    Ok((state, file.metadata))
}

/// Deterministic state-file text: one matrix row per line, every number
/// with 17 significant digits.
pub fn write_state_file(state: &DensityMatrix, meta: &Metadata) -> String {
    let mut meta_json = Json::obj();
    if let Some(n) = &meta.name {
        meta_json = meta_json.with("name", n.as_str());
    }
    if let Some(s) = &meta.source {
        meta_json = meta_json.with("source", s.as_str());
    }
    let dims = serde_json::to_string(&Json::from(state.dims().to_vec())).expect("dims serialize");
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"schema\": \"{SCHEMA}\",\n"));
    out.push_str(&format!("  \"dims\": {dims},\n"));
    out.push_str(&format!(
        "  \"metadata\": {},\n",
        serde_json::to_string(&meta_json).expect("metadata serializes")
    ));
    out.push_str("  \"matrix\": [\n");
    let m = state.matrix();
    for r in 0..m.nrows() {
        let row = Json::Arr(
            (0..m.ncols())
                .map(|c| Json::Arr(vec![Json::Exact(m[(r, c)].re), Json::Exact(m[(r, c)].im)]))
                .collect(),
        );
        let sep = if r + 1 == m.nrows() { "" } else { "," };
        out.push_str(&format!(
            "    {}{sep}\n",
            serde_json::to_string(&row).expect("row serializes")
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Write `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::invalid(format!("cannot create file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
