//! Case files, built-in examples and report assembly for the command-line
//! driver.

use std::fmt::Write as _;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::parse::parse_scalar;
use crate::arith::FieldCtx;
use crate::catalog::random::random_direct_sum;
use crate::catalog::{global_dual_of_sheaf, SheafSpec};
use crate::error::{Error, Result};
use crate::global::{chi_lower_bound, etale_chi, CohomReport, PlaceIndex};
use crate::local::{Frame, IndexValue, LocalUnitModule, RootOptions, RootStatus, DEFAULT_PRECISION};
use crate::oracle::{certify_minimal_root, chi_topological, Certification};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    LocalIndex,
    #[default]
    Global,
    BoundOnly,
}

/// A local presentation `K^m + A^s` with structure matrix entries written
/// as Laurent polynomials in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSpec {
    pub m: usize,
    pub s: usize,
    pub b: Vec<Vec<String>>,
}

/// Inputs of the bound formula alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInput {
    pub n: usize,
    #[serde(default)]
    pub g: u64,
    pub indices: Vec<IndexValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub p: u64,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default)]
    pub precision: Option<i64>,
    #[serde(default = "one")]
    pub field_ext: u32,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub spec: Option<SheafSpec>,
    #[serde(default)]
    pub local: Option<LocalSpec>,
    #[serde(default)]
    pub bound: Option<BoundInput>,
}

fn one() -> u32 {
    1
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn uses_covers(s: &SheafSpec) -> bool {
    match s {
        SheafSpec::TameCover { .. } => true,
        SheafSpec::DirectSum { summands } => summands.iter().any(uses_covers),
        _ => false,
    }
}

impl CaseFile {
    pub fn from_json(src: &str) -> Result<CaseFile> {
        let c: CaseFile = serde_json::from_str(src).map_err(|e| Error::Schema(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Schema(format!("p = {} is not prime", self.p)));
        }
        if self.r == 0 || self.field_ext == 0 {
            return Err(Error::Schema("r and field_ext must be positive".into()));
        }
        if self.precision.is_some_and(|n| n < 1) {
            return Err(Error::Schema("precision must be positive".into()));
        }
        match self.mode {
            Mode::LocalIndex if self.local.is_none() => {
                return Err(Error::Schema("mode local-index needs a `local` presentation".into()))
            }
            Mode::Global if self.spec.is_none() => return Err(Error::Schema("mode global needs a `spec`".into())),
            Mode::BoundOnly if self.spec.is_none() && self.bound.is_none() => {
                return Err(Error::Schema("mode bound-only needs a `spec` or `bound`".into()))
            }
            _ => {}
        }
        if self.spec.as_ref().is_some_and(uses_covers) && self.p < 5 {
            return Err(Error::Schema("double covers need p >= 5".into()));
        }
        if let Some(l) = &self.local {
            let n = l.m + l.s;
            if n == 0 || l.b.len() != n || l.b.iter().any(|r| r.len() != n) {
                return Err(Error::Schema(format!("local.b must be a {n}x{n} matrix")));
            }
        }
        Ok(())
    }

    fn global(p: u64, spec: SheafSpec) -> CaseFile {
        CaseFile {
            p,
            r: 1,
            precision: None,
            field_ext: 1,
            mode: Mode::Global,
            oracle: false,
            spec: Some(spec),
            local: None,
            bound: None,
        }
    }
}

/// Built-in cases: `example:shriek`, `example:quad-cover`,
/// `example:elliptic(f,p)` and `random:direct-sum` (drawn from `seed`).
pub fn builtin(name: &str, p: Option<u64>, seed: u64) -> Result<Option<CaseFile>> {
    let p5 = p.unwrap_or(5);
    Ok(Some(match name {
        "example:shriek" => {
            CaseFile::global(p5, SheafSpec::Shriek { rank: 2, punctures: vec!["0".into(), "inf".into()] })
        }
        "example:quad-cover" => CaseFile::global(p5, SheafSpec::tame_cover("x")),
        "random:direct-sum" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            CaseFile::global(p5, random_direct_sum(p5, 1, &mut rng))
        }
        _ => {
            let Some(args) = name.strip_prefix("example:elliptic(").and_then(|s| s.strip_suffix(')')) else {
                if name.starts_with("example:") || name.starts_with("random:") {
                    return Err(Error::Schema(format!("unknown built-in {name:?}")));
                }
                return Ok(None);
            };
            let (f, bp) = match args.rsplit_once(',') {
                Some((f, q)) => {
                    let v: u64 = q.trim().parse().map_err(|_| Error::Schema(format!("bad prime in {name:?}")))?;
                    if p.is_some_and(|x| x != v) {
                        return Err(Error::Schema(format!("{name} conflicts with --p {}", p.unwrap())));
                    }
                    (f, v)
                }
                None => (args, p5),
            };
            CaseFile::global(bp, SheafSpec::tame_cover(f.trim()))
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFields {
    pub chi_top: Option<i64>,
    pub p_rank: Option<u32>,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub schema_version: u32,
    pub p: u64,
    pub r: u32,
    pub case: String,
    #[serde(flatten)]
    pub cohom: CohomReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleFields>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub schema_version: u32,
    pub p: u64,
    pub r: u32,
    pub case: String,
    pub m: usize,
    pub s: usize,
    pub index: IndexValue,
    pub minimal_root: String,
    pub generation: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub p: u64,
    pub r: u32,
    pub case: String,
    pub n: usize,
    pub g: u64,
    pub local_indices: Vec<PlaceIndex>,
    pub bound: IndexValue,
    pub bound_ceil: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Global(GlobalReport),
    Local(LocalReport),
    Bound(BoundReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// A plain-text table; fractions are printed exactly.
    pub fn table(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Global(g) => {
                let c = &g.cohom;
                let _ = writeln!(s, "case {}  (p = {}, r = {}, rank {})", g.case, g.p, g.r, c.n);
                for pi in &c.local_indices {
                    let _ = writeln!(s, "  index at {:<8} {}", pi.place, IndexValue::new(pi.num, pi.den));
                }
                let _ = writeln!(s, "  root degree      {}", c.degree_root);
                let _ = writeln!(s, "  splitting        {:?}", c.splitting);
                let _ = writeln!(s, "  h0 / h1          {} / {}  (nilpotent part of H1: {})", c.h0, c.h1, c.nil1);
                let _ = writeln!(s, "  chi              {}", c.chi);
                let _ = writeln!(s, "  bound            {}  (ceiling {})", c.bound, c.bound_ceil);
                let _ = writeln!(s, "  equality         {}", c.equality);
                if let Some(o) = &g.oracle {
                    let chi = o.chi_top.map_or("unsupported".to_string(), |v| v.to_string());
                    let _ = writeln!(s, "  oracle chi       {chi}");
                    if let Some(pr) = o.p_rank {
                        let _ = writeln!(s, "  oracle p-rank    {pr}");
                    }
                }
            }
            Report::Local(l) => {
                let _ = writeln!(s, "case {}  (p = {}, r = {}, K^{} + A^{})", l.case, l.p, l.r, l.m, l.s);
                let _ = writeln!(s, "  minimal root     {}", l.minimal_root);
                let _ = writeln!(s, "  index            {}", l.index);
                let _ = writeln!(s, "  generation       {}", l.generation);
                if let Some(o) = &l.oracle {
                    let _ = writeln!(s, "  oracle           {o}");
                }
            }
            Report::Bound(b) => {
                let _ = writeln!(s, "case {}  (rank {}, genus {})", b.case, b.n, b.g);
                for pi in &b.local_indices {
                    let _ = writeln!(s, "  index at {:<8} {}", pi.place, IndexValue::new(pi.num, pi.den));
                }
                let _ = writeln!(s, "  bound            {}  (ceiling {})", b.bound, b.bound_ceil);
            }
        }
        s
    }
}

/// Overrides applied on top of a case file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub oracle: bool,
    pub precision: Option<i64>,
    pub field_ext: Option<u32>,
    pub seed: u64,
}

impl LocalSpec {
    /// The module over `F_{p^(r e)}` with `q = p^r`.
    pub fn module(&self, p: u64, r: u32, field_ext: u32) -> Result<LocalUnitModule> {
        let ctx = FieldCtx::new(p, r, field_ext)?;
        let b = self
            .b
            .iter()
            .map(|row| row.iter().map(|e| parse_scalar(e, &ctx, 't')).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        LocalUnitModule::new(&ctx, self.m, self.s, b)
    }
}

pub fn run_case(name: &str, case: &CaseFile, opts: &RunOptions) -> Result<Report> {
    let mut case = case.clone();
    case.oracle |= opts.oracle;
    if let Some(pr) = opts.precision {
        case.precision = Some(pr);
    }
    if let Some(e) = opts.field_ext {
        case.field_ext = e;
    }
    case.validate()?;
    let precision = case.precision.unwrap_or(DEFAULT_PRECISION);
    match case.mode {
        Mode::Global => {
            let spec = case.spec.as_ref().unwrap();
            let gm = global_dual_of_sheaf(spec, case.p, case.r, case.field_ext)?;
            let cohom = etale_chi(&gm)?;
            let oracle = if case.oracle {
                Some(match chi_topological(spec, case.p, case.r) {
                    Ok(o) => {
                        if o.chi_top != cohom.chi {
                            return Err(Error::OracleMismatch(format!(
                                "pipeline chi {} but topological chi {}",
                                cohom.chi, o.chi_top
                            )));
                        }
                        if let Some(pr) = o.p_rank {
                            if pr as usize != cohom.ss1 {
                                return Err(Error::OracleMismatch(format!(
                                    "p-rank {pr} but H^1 has semisimple rank {}",
                                    cohom.ss1
                                )));
                            }
                        }
                        OracleFields { chi_top: Some(o.chi_top), p_rank: o.p_rank, details: o.details }
                    }
                    Err(Error::UnsupportedVariant(msg)) => OracleFields { chi_top: None, p_rank: None, details: vec![msg] },
                    Err(e) => return Err(e),
                })
            } else {
                None
            };
            Ok(Report::Global(GlobalReport {
                schema_version: SCHEMA_VERSION,
                p: case.p,
                r: case.r,
                case: name.to_string(),
                cohom,
                oracle,
            }))
        }
        Mode::LocalIndex => {
            let w = case.local.as_ref().unwrap().module(case.p, case.r, case.field_ext)?;
            let frame = Frame::new(&w)?;
            let l = frame.minimal_root()?;
            let generation = match frame.is_root(&l, RootOptions { precision, trace: true })? {
                RootStatus::Root(cert) => serde_json::to_string(&cert.trace).expect("serializable"),
                other => return Err(Error::Undetermined(format!("minimal root failed re-verification: {other:?}"))),
            };
            let oracle = if case.oracle {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                let (_, cert) = certify_minimal_root(&w, &mut rng)?;
                Some(match cert {
                    Certification::Exhaustive(b) => format!("exhaustive search in [{}, {}] agrees", b.lo, b.hi),
                    Certification::Sampled { roots, samples } => {
                        format!("{roots} roots among {samples} sampled lattices contain it")
                    }
                })
            } else {
                None
            };
            Ok(Report::Local(LocalReport {
                schema_version: SCHEMA_VERSION,
                p: case.p,
                r: case.r,
                case: name.to_string(),
                m: w.m(),
                s: w.s(),
                index: frame.index_of(&l),
                minimal_root: l.to_string(),
                generation,
                oracle,
            }))
        }
        Mode::BoundOnly => {
            let (n, g, local_indices) = match (&case.bound, &case.spec) {
                (Some(b), _) => (
                    b.n,
                    b.g,
                    b.indices
                        .iter()
                        .map(|v| PlaceIndex { place: String::new(), num: v.num(), den: v.den() })
                        .collect::<Vec<_>>(),
                ),
                (None, Some(spec)) => {
                    let gm = global_dual_of_sheaf(spec, case.p, case.r, case.field_ext)?;
                    let rb = crate::global::global_minimal_root(&gm)?;
                    let idx = rb
                        .indices
                        .iter()
                        .map(|(p, v)| PlaceIndex { place: p.to_string(), num: v.num(), den: v.den() })
                        .collect();
                    (gm.n(), 0, idx)
                }
                (None, None) => unreachable!("validated"),
            };
            let values: Vec<IndexValue> = local_indices.iter().map(|i| IndexValue::new(i.num, i.den)).collect();
            let bound: Ratio<i64> = chi_lower_bound(n, g, &values);
            Ok(Report::Bound(BoundReport {
                schema_version: SCHEMA_VERSION,
                p: case.p,
                r: case.r,
                case: name.to_string(),
                n,
                g,
                local_indices,
                bound: IndexValue::from_ratio(bound),
                bound_ceil: bound.ceil().to_integer(),
            }))
        }
    }
}

/// One-line rendering of an error with the module it comes from.
pub fn describe_error(e: &Error) -> String {
    format!("error [{}]: {e}", e.module())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        let c = builtin("example:elliptic(x^3 + 1, 7)", None, 0).unwrap().unwrap();
        assert_eq!(c.p, 7);
        assert!(builtin("example:nothing", None, 0).is_err());
        assert!(builtin("cases/a.json", None, 0).unwrap().is_none());
        assert!(matches!(builtin("example:elliptic(x^3+1,7)", Some(5), 0), Err(Error::Schema(_))));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(CaseFile::from_json(r#"{"p": 6, "spec": {"kind":"constant","rank":1}}"#), Err(Error::Schema(_))));
        assert!(matches!(CaseFile::from_json(r#"{"p": 5, "bogus": 1}"#), Err(Error::Schema(_))));
        assert!(matches!(CaseFile::from_json(r#"{"p": 3, "spec": {"kind":"tame-cover","f":"x"}}"#), Err(Error::Schema(_))));
        assert!(CaseFile::from_json(r#"{"p": 5, "spec": {"kind":"constant","rank":1}}"#).is_ok());
    }
}
