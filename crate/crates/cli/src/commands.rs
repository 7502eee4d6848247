//! The subcommands, as functions from input text to output text.

use std::ops::RangeInclusive;

use lkt_core::eqelim::has_complex_eql;
use lkt_core::lk_baseline::tree_instances;
use lkt_core::random::{random_proof, RandomConfig};
use lkt_core::{
    atomize_eqls, eliminate_inductions, extract_instances, gentzen_eliminate, herbrand_sequent, normalize,
    normalize_with, to_tree, validate_ground, Budget, Family, Generated, Policy, Proof, RecursiveDefinitions,
};
use thiserror::Error;

use crate::doc::{parse_located, Document, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("{0}")]
    Type(ParseError),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A check that ran to completion and found a problem; `report` is the
    /// regular output produced so far.
    #[error("{msg}")]
    Rejected { report: String, msg: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Type(_) => "type",
            CliError::Budget(_) => "budget",
            CliError::Failed(_) => "failed",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Rejected { .. } => "rejected",
        }
    }

    /// `error<TAB>kind<TAB>message` on one line.
    pub fn machine_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\t'], " ");
        format!("error\t{}\t{msg}", self.kind())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn budget(steps: Option<u64>) -> Budget {
    steps.map_or_else(Budget::unlimited, Budget::new)
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Parses and type-checks a document.
pub fn load(src: &str) -> Result<Document> {
    let parsed = parse_located(src).map_err(CliError::Parse)?;
    parsed.check().map_err(CliError::Type)?;
    Ok(parsed.doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Lkt,
    Tree,
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lkt" => Ok(EngineKind::Lkt),
            "tree" => Ok(EngineKind::Tree),
            _ => Err(format!("unknown engine `{s}` (expected lkt or tree)")),
        }
    }
}

pub fn cmd_check(src: &str) -> Result<String> {
    let d = load(src)?;
    Ok(format!("ok size={} cuts={}\n", d.proof.size(), d.proof.cut_count()))
}

/// The input `normalize` runs on: complex equational inferences are
/// atomized first when every cut is to be eliminated.
pub fn prepare(proof: &Proof, g: &Generated, policy: Policy) -> Result<Proof> {
    if policy == Policy::Full && has_complex_eql(proof) {
        atomize_eqls(proof, &g.ctx).map_err(failed)
    } else {
        Ok(proof.clone())
    }
}

pub fn cmd_normalize(src: &str, policy: Policy, steps: Option<u64>, engine: EngineKind) -> Result<String> {
    let d = load(src)?;
    let g = d.generated().map_err(failed)?;
    let mut b = budget(steps);
    match engine {
        EngineKind::Lkt => {
            let input = prepare(&d.proof, &g, policy)?;
            let out = normalize_with(&input, policy, &mut b).map_err(|e| CliError::Budget(e.to_string()))?;
            Ok(d.with_proof(out).to_string())
        }
        EngineKind::Tree => {
            if policy != Policy::Full {
                return Err(CliError::Usage("the tree engine only supports --policy full".into()));
            }
            let t = to_tree(&d.proof, &d.ctx).map_err(failed)?;
            let out = gentzen_eliminate(&t, &mut b).map_err(|e| CliError::Budget(e.to_string()))?;
            Ok(out.to_string())
        }
    }
}

pub fn cmd_indelim(src: &str, steps: Option<u64>) -> Result<String> {
    let d = load(src)?;
    let defs = d.definitions().map_err(failed)?;
    let out = eliminate_inductions(&d.proof, &defs, &mut budget(steps)).map_err(|e| match e {
        lkt_core::InductionError::Budget(b) => CliError::Budget(b.to_string()),
        e => failed(e),
    })?;
    Ok(d.with_proof(out).to_string())
}

pub fn cmd_atomize(src: &str) -> Result<String> {
    let d = load(src)?;
    let out = atomize_eqls(&d.proof, &d.ctx).map_err(failed)?;
    Ok(d.with_proof(out).to_string())
}

/// Prints the Herbrand sequent and whether it is a propositional tautology.
/// All cuts of the input must be quantifier-free.
pub fn cmd_herbrand(src: &str) -> Result<String> {
    let d = load(src)?;
    let inst = extract_instances(&d.proof, &d.ctx).map_err(failed)?;
    let seq = herbrand_sequent(&inst, &d.ctx);
    let valid = validate_ground(&seq).map_err(failed)?;
    let report = format!("{seq}\n{}\n", if valid { "valid" } else { "invalid" });
    if valid {
        Ok(report)
    } else {
        Err(CliError::Rejected {
            report,
            msg: "Herbrand sequent is not valid".into(),
        })
    }
}

/// `family` is a family name or `random`, for which `n` is the depth.
pub fn cmd_gen(family: &str, n: usize, seed: u64) -> Result<String> {
    let g = if family == "random" {
        random_proof(
            seed,
            RandomConfig {
                depth: n,
                ..RandomConfig::default()
            },
        )
    } else {
        family.parse::<Family>().map_err(CliError::Usage)?.generate(n)
    };
    Ok(Document::from_generated(&g).to_string())
}

/// `a..b` or `a..=b` (both inclusive), or a single number.
pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number `{t}` in range `{s}`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok(a..=b)
        }
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

pub fn parse_families(s: &str) -> std::result::Result<Vec<Family>, String> {
    s.split(',').filter(|f| !f.is_empty()).map(|f| f.trim().parse()).collect()
}

/// Runs the tree engine and the evaluator on every input and reports
/// disagreement on end-sequents or invalid Herbrand sequents.
pub fn cmd_diff(families: &[Family], ns: RangeInclusive<usize>, steps: Option<u64>) -> Result<String> {
    let mut report = String::new();
    let mut bad = 0;
    for &fam in families {
        for n in ns.clone() {
            let verdict = diff_one(&fam.generate(n), steps);
            if verdict.is_err() {
                bad += 1;
            }
            let line = match verdict {
                Ok(()) => "ok".to_string(),
                Err(m) => format!("mismatch: {m}"),
            };
            report.push_str(&format!("{fam} {n} {line}\n"));
        }
    }
    if bad == 0 {
        Ok(report)
    } else {
        Err(CliError::Rejected {
            report,
            msg: format!("{bad} inputs disagree"),
        })
    }
}

fn diff_one(g: &Generated, steps: Option<u64>) -> std::result::Result<(), String> {
    let tree = to_tree(&g.proof, &g.ctx).map_err(|e| e.to_string())?;
    let t = gentzen_eliminate(&tree, &mut budget(steps)).map_err(|e| format!("tree: {e}"))?;
    t.verify().map_err(|e| format!("tree: {e}"))?;
    let p = normalize(&g.proof, &mut budget(steps)).map_err(|e| format!("lkt: {e}"))?;
    lkt_core::check_closed(&p, &g.ctx).map_err(|e| format!("lkt: {e}"))?;
    if t.end_sequent() != g.ctx.end_sequent() {
        return Err("end-sequents differ".into());
    }
    let tseq = herbrand_sequent(&tree_instances(&t), &t.concl);
    let inst = extract_instances(&p, &g.ctx).map_err(|e| e.to_string())?;
    let pseq = herbrand_sequent(&inst, &g.ctx);
    for (who, seq) in [("tree", tseq), ("lkt", pseq)] {
        if !validate_ground(&seq).map_err(|e| e.to_string())? {
            return Err(format!("{who} Herbrand sequent invalid: {seq}"));
        }
    }
    Ok(())
}

pub fn definitions_of(g: &Generated) -> RecursiveDefinitions {
    g.defs.clone().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..8").unwrap(), 0..=8);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("a..1").is_err());
    }

    #[test]
    fn machine_line_is_single_line() {
        let e = CliError::Failed("a\nb".into());
        assert_eq!(e.machine_line(), "error\tfailed\ta b");
    }

    #[test]
    fn unknown_family() {
        assert!(matches!(cmd_gen("nope", 1, 0), Err(CliError::Usage(_))));
    }
}
