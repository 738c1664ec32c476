//! The JSON state format.
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "dims": [2,2,2],
//!   "labels": {"A":[0],"B":[1],"C":[2]},
//!   "matrix": [
//!     [0.5, 0.0],
//!     ...
//!   ]
//! }
//! ```
//!
//! `matrix` holds the `D²` entries row-major as `[re, im]` pairs. A pure state
//! may instead give its `D` amplitudes under `amplitudes`. Numbers are written
//! in shortest round-trip form, so load followed by [`StateFile::to_json`]
//! reproduces a file byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use pptmerge::linalg::{CMatrix, CVector, C64};
use pptmerge::{DensityMatrix, Party, PureState, TripartiteState};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// Subsystem indices of each party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "C")]
    pub c: Vec<usize>,
}

impl Labels {
    pub fn abc() -> Self {
        Labels {
            a: vec![0],
            b: vec![1],
            c: vec![2],
        }
    }

    pub fn of(state: &TripartiteState) -> Self {
        Labels {
            a: state.indices(Party::A).to_vec(),
            b: state.indices(Party::B).to_vec(),
            c: state.indices(Party::C).to_vec(),
        }
    }

    pub fn party(&self, party: Party) -> &[usize] {
        match party {
            Party::A => &self.a,
            Party::B => &self.b,
            Party::C => &self.c,
        }
    }

    /// Parses `A:B:C` index lists such as `0:1:2` or `0,1:2:3`.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!("labels must look like 0:1:2, got {spec:?}")));
        }
        let list = |s: &str| parse_index_list(s).map_err(|e| CliError::usage(format!("labels {spec:?}: {e}")));
        Ok(Labels {
            a: list(parts[0])?,
            b: list(parts[1])?,
            c: list(parts[2])?,
        })
    }
}

pub(crate) fn parse_index_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not an index")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub format_version: u32,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

/// A validated state.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn dims(&self) -> &[usize] {
        match self {
            LoadedState::Pure(psi) => psi.dims(),
            LoadedState::Mixed(rho) => rho.dims(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(psi) => psi.to_density(),
            LoadedState::Mixed(rho) => rho.clone(),
        }
    }
}

fn pairs(values: impl Iterator<Item = C64>) -> Vec<[f64; 2]> {
    values.map(|z| [z.re, z.im]).collect()
}

impl StateFile {
    pub fn from_pure(psi: &PureState, labels: Option<Labels>) -> Self {
        StateFile {
            format_version: FORMAT_VERSION,
            dims: psi.dims().to_vec(),
            labels,
            matrix: None,
            amplitudes: Some(pairs(psi.amplitudes().iter().copied())),
        }
    }

    pub fn from_density(rho: &DensityMatrix, labels: Option<Labels>) -> Self {
        let m = rho.matrix();
        let d = m.nrows();
        StateFile {
            format_version: FORMAT_VERSION,
            dims: rho.dims().to_vec(),
            labels,
            matrix: Some(pairs((0..d * d).map(|k| m[(k / d, k % d)]))),
            amplitudes: None,
        }
    }

    pub fn from_tripartite(state: &TripartiteState) -> Self {
        StateFile::from_density(state.state(), Some(Labels::of(state)))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("malformed state file: {e}")))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::usage(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> CliResult<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let text =
            std::str::from_utf8(&bytes).map_err(|_| CliError::usage(format!("{} is not UTF-8", path.display())))?;
        Ok((StateFile::parse(text)?, bytes))
    }

    /// Builds and validates the state the file describes.
    pub fn load(&self) -> CliResult<LoadedState> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(CliError::usage(format!("invalid dims {:?}", self.dims)));
        }
        let d = self
            .dims
            .iter()
            .try_fold(1usize, |acc, &x| acc.checked_mul(x))
            .ok_or_else(|| CliError::failure("dimension overflows"))?;
        let to_c = |p: &[f64; 2]| C64::new(p[0], p[1]);
        match (&self.matrix, &self.amplitudes) {
            (Some(m), None) => {
                if d > pptmerge::state::DEFAULT_DIM_CAP {
                    return Err(pptmerge::Error::SizeLimit {
                        dim: d,
                        cap: pptmerge::state::DEFAULT_DIM_CAP,
                    }
                    .into());
                }
                if m.len() != d * d {
                    return Err(CliError::usage(format!(
                        "matrix has {} entries, dims {:?} need {}",
                        m.len(),
                        self.dims,
                        d * d
                    )));
                }
                let data = CMatrix::from_row_iterator(d, d, m.iter().map(to_c));
                Ok(LoadedState::Mixed(DensityMatrix::new(self.dims.clone(), data)?))
            }
            (None, Some(a)) => {
                if a.len() != d {
                    return Err(CliError::usage(format!(
                        "amplitudes has {} entries, dims {:?} need {d}",
                        a.len(),
                        self.dims
                    )));
                }
                let v = CVector::from_iterator(d, a.iter().map(to_c));
                Ok(LoadedState::Pure(PureState::new(self.dims.clone(), v)?))
            }
            _ => Err(CliError::usage(
                "state file needs exactly one of `matrix` and `amplitudes`",
            )),
        }
    }

    /// The loaded state with parties assigned by `labels`, or the file's own.
    pub fn tripartite(&self, labels: Option<&Labels>) -> CliResult<TripartiteState> {
        let labels = labels
            .or(self.labels.as_ref())
            .ok_or_else(|| CliError::usage("state has no A/B/C labels; pass --labels"))?;
        let rho = self.load()?.to_density();
        Ok(TripartiteState::new(rho, &labels.a, &labels.b, &labels.c)?)
    }

    /// Canonical text: one `[re, im]` pair per line.
    pub fn to_json(&self) -> String {
        let num = |x: f64| serde_json::to_string(&x).expect("finite entries");
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"format_version\": {},", self.format_version);
        let _ = write!(s, "  \"dims\": {}", serde_json::to_string(&self.dims).expect("dims"));
        if let Some(labels) = &self.labels {
            let _ = write!(s, ",\n  \"labels\": {}", serde_json::to_string(labels).expect("labels"));
        }
        for (key, entries) in [("matrix", &self.matrix), ("amplitudes", &self.amplitudes)] {
            if let Some(entries) = entries {
                let _ = write!(s, ",\n  \"{key}\": [");
                for (i, [re, im]) in entries.iter().enumerate() {
                    let sep = if i == 0 { "" } else { "," };
                    let _ = write!(s, "{sep}\n    [{}, {}]", num(*re), num(*im));
                }
                s.push_str("\n  ]");
            }
        }
        s.push_str("\n}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pptmerge::families;

    #[test]
    fn pure_round_trip() {
        let file = StateFile::from_pure(&families::phi_plus(), None);
        let text = file.to_json();
        let again = StateFile::parse(&text).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_json(), text);
        assert!(matches!(again.load().unwrap(), LoadedState::Pure(_)));
    }

    #[test]
    fn mixed_round_trip_keeps_labels() {
        let file = StateFile::from_tripartite(&families::ghz());
        let text = file.to_json();
        let again = StateFile::parse(&text).unwrap();
        assert_eq!(again.to_json(), text);
        assert_eq!(again.labels, Some(Labels::abc()));
        let t = again.tripartite(None).unwrap();
        assert_eq!(t.state().dims(), &[2, 2, 2]);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "not json",
            r#"{"format_version":2,"dims":[2],"amplitudes":[[1,0],[0,0]]}"#,
            r#"{"format_version":1,"dims":[2],"amplitudes":[[1,0]]}"#,
            r#"{"format_version":1,"dims":[2]}"#,
            r#"{"format_version":1,"dims":[2],"matrix":[[1,0],[0,0],[0,0],[1,0]]}"#,
            r#"{"format_version":1,"dims":[2],"amplitudes":[[1,0],[0,0]],"extra":1}"#,
        ] {
            let err = StateFile::parse(text).and_then(|f| f.load().map(|_| ()));
            assert_eq!(err.unwrap_err().code, crate::error::EXIT_USAGE, "{text}");
        }
    }

    #[test]
    fn missing_labels() {
        let file = StateFile::from_density(&families::ghz().into_state(), None);
        assert_eq!(file.tripartite(None).unwrap_err().code, crate::error::EXIT_USAGE);
        assert!(file.tripartite(Some(&Labels::abc())).is_ok());
    }

    #[test]
    fn label_syntax() {
        assert_eq!(Labels::parse("0:1:2").unwrap(), Labels::abc());
        assert_eq!(Labels::parse("0,1:2:3").unwrap().a, vec![0, 1]);
        assert!(Labels::parse("0:1").is_err());
        assert!(Labels::parse("0:x:2").is_err());
    }
}
