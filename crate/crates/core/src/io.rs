//! Sessions, the pair file format and command-line argument parsing
//! helpers.
//!
//! A pair file is JSON:
//!
//! ```text
//! {
//!   "carrier": {"kind": "fixture", "name": "real-line"},
//!   "sigma": "negation",
//!   "g": ..., "f": ..., "alpha": [2.0, 0.0],
//!   "provenance": {...}
//! }
//! ```
//!
//! Relative paths are resolved against the session's output directory,
//! which is `$SEMIFN_OUT_DIR` when set and the working directory otherwise.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyDescriptor, FunctionRef, Registry, SolutionPair};
use crate::functions::{FnRule, ScalarFunction};
use crate::scalar::{parse_complex, C64};
use crate::semigroup::{load_semigroup, Carrier, FiniteSemigroup, FixtureId, Involution};

pub const OUT_DIR_VAR: &str = "SEMIFN_OUT_DIR";

/// Where a carrier comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CarrierSource {
    Fixture {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<usize>,
    },
    Table {
        semigroup: FiniteSemigroup,
    },
}

impl CarrierSource {
    /// A fixture name, or else a path to a semigroup file. The file's
    /// `sigma` line, if any, comes back alongside.
    pub fn load(spec: &str, window: Option<usize>) -> Result<(Self, Option<Involution>)> {
        match spec.parse::<FixtureId>() {
            Ok(id) => Ok((
                CarrierSource::Fixture {
                    name: id.name().to_string(),
                    window,
                },
                None,
            )),
            Err(Error::UnknownName(_)) if Path::new(spec).is_file() => {
                let (semigroup, sigma) = load_semigroup(spec)?;
                Ok((CarrierSource::Table { semigroup }, sigma))
            }
            Err(e) => Err(e),
        }
    }

    pub fn carrier(&self) -> Result<Carrier> {
        match self {
            CarrierSource::Fixture { name, window } => name.parse::<FixtureId>()?.carrier(*window),
            CarrierSource::Table { semigroup } => Ok(Carrier::Finite(semigroup.clone())),
        }
    }
}

/// The contents of a pair file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub carrier: CarrierSource,
    pub sigma: Involution,
    #[serde(flatten)]
    pub pair: SolutionPair,
}

impl PairFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A carrier loaded into a session with its involutions, the default first.
#[derive(Clone, Debug)]
pub struct LoadedCarrier {
    pub source: CarrierSource,
    pub carrier: Carrier,
    pub sigmas: Vec<Involution>,
}

impl LoadedCarrier {
    /// A file's own σ if it has one; otherwise the non-trivial rule of a
    /// procedural fixture, or the identity.
    pub fn new(source: CarrierSource, file_sigma: Option<Involution>) -> Result<Self> {
        let carrier = source.carrier()?;
        let mut sigmas = carrier.involutions()?;
        let default = match (&file_sigma, &carrier) {
            (Some(s), _) => sigmas.iter().position(|t| t == s),
            (None, Carrier::Procedural(_)) => sigmas.iter().rposition(|t| !t.is_identity()),
            (None, Carrier::Finite(_)) => sigmas.iter().position(Involution::is_identity),
        };
        match (default, file_sigma) {
            (Some(k), _) => sigmas[..=k].rotate_right(1),
            (None, Some(s)) => sigmas.insert(0, s),
            (None, None) => {}
        }
        Ok(LoadedCarrier {
            source,
            carrier,
            sigmas,
        })
    }

    pub fn default_sigma(&self) -> &Involution {
        &self.sigmas[0]
    }

    /// σ by name (as printed by [`Involution::name`]), by position in
    /// [`Self::sigmas`], or as a permutation `0,2,1`.
    pub fn sigma(&self, text: &str) -> Result<Involution> {
        if let Some(s) = self.sigmas.iter().find(|s| s.name() == text) {
            return Ok(s.clone());
        }
        if let Ok(k) = text.parse::<usize>() {
            if let Some(s) = self.sigmas.get(k) {
                return Ok(s.clone());
            }
        }
        let perm: Option<Vec<usize>> = text
            .split([',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().ok())
            .collect();
        match perm {
            Some(p) if self.carrier.is_finite() && !p.is_empty() => {
                let inv = Involution::Permutation(p);
                if let Some(v) = inv.violations(&self.carrier)?.into_iter().next() {
                    return Err(Error::NotAnInvolution(v));
                }
                Ok(inv)
            }
            _ => Err(Error::UnknownName(format!("sigma `{text}`"))),
        }
    }
}

/// Loaded carriers, named functions and descriptors, and the output
/// directory. Names are unique across all three.
#[derive(Debug)]
pub struct Session {
    carriers: BTreeMap<String, LoadedCarrier>,
    registry: Registry,
    descriptors: BTreeMap<String, FamilyDescriptor>,
    out_dir: PathBuf,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        let out_dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        Self::with_out_dir(out_dir)
    }

    pub fn with_out_dir(out_dir: impl Into<PathBuf>) -> Self {
        Session {
            carriers: BTreeMap::new(),
            registry: Registry::new(),
            descriptors: BTreeMap::new(),
            out_dir: out_dir.into(),
        }
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn resolve_path(&self, path: impl AsRef<Path>) -> PathBuf {
        let path = path.as_ref();
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out_dir.join(path)
        }
    }

    fn claim(&self, name: &str) -> Result<()> {
        let taken = self.carriers.contains_key(name)
            || self.descriptors.contains_key(name)
            || self.registry.get(name).is_some();
        if taken {
            return Err(Error::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    /// Loads a fixture or semigroup file under `name`.
    pub fn load_carrier(&mut self, name: &str, spec: &str, window: Option<usize>) -> Result<&LoadedCarrier> {
        self.claim(name)?;
        let (source, sigma) = CarrierSource::load(spec, window)?;
        let loaded = LoadedCarrier::new(source, sigma)?;
        Ok(self.carriers.entry(name.to_string()).or_insert(loaded))
    }

    pub fn carrier(&self, name: &str) -> Result<&LoadedCarrier> {
        self.carriers.get(name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn register_function(&mut self, name: &str, f: ScalarFunction) -> Result<()> {
        self.claim(name)?;
        self.registry.register(name, f)
    }

    pub fn register_descriptor(&mut self, name: &str, d: FamilyDescriptor) -> Result<()> {
        self.claim(name)?;
        self.descriptors.insert(name.to_string(), d);
        Ok(())
    }

    pub fn descriptor(&self, name: &str) -> Result<&FamilyDescriptor> {
        self.descriptors.get(name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    /// Writes a pair file, creating parent directories; returns the path written.
    pub fn write_pair(&self, path: impl AsRef<Path>, file: &PairFile) -> Result<PathBuf> {
        let path = self.resolve_path(path);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, file.to_json()? + "\n")?;
        Ok(path)
    }

    pub fn read_pair(&self, path: impl AsRef<Path>) -> Result<PairFile> {
        PairFile::from_json(&std::fs::read_to_string(self.resolve_path(path))?)
    }
}

/// A function reference from the command line:
///
/// * a registry or built-in name (`one`, `chi1`, `parity`, `a5`, …)
/// * `exp:λ`, x ↦ e^{iλx} on the real line
/// * `linear:δ`, x ↦ δx on the real line
/// * `heis:a,b`, e^{ax+by} on H₃, and `heislinear:a,b`, ax + by
/// * `const:v`, `power:s`
/// * inline JSON
pub fn parse_function_ref(text: &str) -> Result<FunctionRef> {
    let text = text.trim();
    if text.starts_with(['{', '[']) {
        return Ok(FunctionRef::Inline(serde_json::from_str(text)?));
    }
    let Some((kind, arg)) = text.split_once(':') else {
        return Ok(FunctionRef::named(text));
    };
    let pair = |arg: &str| -> Result<(C64, C64)> {
        let (a, b) = arg
            .split_once(',')
            .ok_or_else(|| Error::UnknownName(format!("`{text}` needs two comma-separated values")))?;
        Ok((parse_complex(a)?, parse_complex(b)?))
    };
    let rule = match kind {
        "exp" => FnRule::Exp { lambda: parse_complex(arg)? },
        "linear" => FnRule::RealLinear { slope: parse_complex(arg)? },
        "const" => FnRule::Const { value: parse_complex(arg)? },
        "power" => FnRule::Power { exponent: parse_complex(arg)? },
        "heis" => {
            let (a, b) = pair(arg)?;
            FnRule::HeisExp { a, b }
        }
        "heislinear" => {
            let (a, b) = pair(arg)?;
            FnRule::HeisLinear { a, b }
        }
        _ => return Err(Error::UnknownName(format!("function form `{kind}`"))),
    };
    Ok(FunctionRef::Inline(ScalarFunction::Rule(rule)))
}

/// `+`, `-`, `1`, `-1`, `+1`.
pub fn parse_branch(text: &str) -> Result<i8> {
    match text.trim() {
        "+" | "1" | "+1" => Ok(1),
        "-" | "-1" => Ok(-1),
        other => Err(Error::UnknownName(format!("sign branch `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{construct, Mode};
    use crate::scalar::c;

    #[test]
    fn names_are_unique_across_kinds() {
        let mut session = Session::with_out_dir("/nonexistent");
        session.load_carrier("s", "c3", None).unwrap();
        assert!(matches!(session.load_carrier("s", "c2", None), Err(Error::DuplicateName(_))));
        assert!(matches!(
            session.register_function("s", ScalarFunction::constant(c(1.0, 0.0))),
            Err(Error::DuplicateName(_))
        ));
        session.register_function("f", ScalarFunction::constant(c(1.0, 0.0))).unwrap();
        assert!(matches!(
            session.register_descriptor("f", FamilyDescriptor::new(4, c(0.0, 0.0))),
            Err(Error::DuplicateName(_))
        ));
        session.register_descriptor("d", FamilyDescriptor::new(4, c(0.0, 0.0))).unwrap();
        assert_eq!(session.descriptor("d").unwrap().family_tag, 4);
        assert!(session.carrier("t").is_err());
    }

    #[test]
    fn default_sigmas() {
        let line = LoadedCarrier::new(CarrierSource::load("real-line", None).unwrap().0, None).unwrap();
        assert_eq!(*line.default_sigma(), Involution::Negation);
        assert_eq!(line.sigma("identity").unwrap(), Involution::Identity);
        let heis = LoadedCarrier::new(CarrierSource::load("heisenberg", None).unwrap().0, None).unwrap();
        assert_eq!(*heis.default_sigma(), Involution::HeisenbergFlip);
        let c3 = LoadedCarrier::new(CarrierSource::load("c3", None).unwrap().0, None).unwrap();
        assert!(c3.default_sigma().is_identity());
        assert_eq!(c3.sigma("0,2,1").unwrap(), Involution::Permutation(vec![0, 2, 1]));
        assert!(c3.sigma("1,0,2").is_err());
        assert!(c3.sigma("flip").is_err());
    }

    #[test]
    fn file_sigma_comes_first() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c3.txt");
        std::fs::write(&path, "order 3\n0 1 2\n1 2 0\n2 0 1\nsigma 0 2 1\n").unwrap();
        let (source, sigma) = CarrierSource::load(path.to_str().unwrap(), None).unwrap();
        let loaded = LoadedCarrier::new(source, sigma).unwrap();
        assert_eq!(*loaded.default_sigma(), Involution::Permutation(vec![0, 2, 1]));
        assert_eq!(loaded.sigmas.len(), 2);
        assert!(matches!(CarrierSource::load("no-such-fixture", None), Err(Error::UnknownName(_))));
    }

    #[test]
    fn function_refs() {
        assert_eq!(parse_function_ref("chi1").unwrap(), FunctionRef::named("chi1"));
        assert_eq!(
            parse_function_ref("exp:2+1i").unwrap(),
            FunctionRef::Inline(ScalarFunction::Rule(FnRule::Exp { lambda: c(2.0, 1.0) }))
        );
        assert_eq!(
            parse_function_ref("heis:1,-2").unwrap(),
            FunctionRef::Inline(ScalarFunction::Rule(FnRule::HeisExp {
                a: c(1.0, 0.0),
                b: c(-2.0, 0.0)
            }))
        );
        assert_eq!(
            parse_function_ref("[[1.0, 0.0], [0.0, 1.0]]").unwrap(),
            FunctionRef::Inline(ScalarFunction::Dense(vec![c(1.0, 0.0), c(0.0, 1.0)]))
        );
        assert!(parse_function_ref("heis:1").is_err());
        assert!(parse_function_ref("exp:x").is_err());
        assert!(parse_function_ref("bogus:1").is_err());
        assert_eq!(parse_branch("-").unwrap(), -1);
        assert!(parse_branch("0").is_err());
    }

    #[test]
    fn pair_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::with_out_dir(dir.path());
        let (source, _) = CarrierSource::load("c3", None).unwrap();
        let s = source.carrier().unwrap();
        let sigma = Involution::Permutation(vec![0, 2, 1]);
        for mode in [Mode::Float, Mode::Exact] {
            let d = FamilyDescriptor::new(8, c(0.5, -0.25)).with_chi(2usize);
            let pair = construct(&s, &sigma, &d, None, &Registry::new(), mode).unwrap();
            let file = PairFile {
                carrier: source.clone(),
                sigma: sigma.clone(),
                pair,
            };
            let written = session.write_pair("sub/pair.json", &file).unwrap();
            assert!(written.starts_with(dir.path()));
            assert_eq!(session.read_pair("sub/pair.json").unwrap(), file);
        }
    }
}
