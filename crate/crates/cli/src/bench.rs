//! The benchmark harness behind `lkt bench`.
//!
//! CSV columns, one row per (family, n, engine):
//!
//! | column          | meaning                                              |
//! |-----------------|------------------------------------------------------|
//! | `family`        | generator family name                                |
//! | `n`             | family parameter                                     |
//! | `engine`        | `lkt-full`, `lkt-atomic`, `lkt-qfree`, `tree`, `ind-elim` |
//! | `wall_nanos`    | fastest measured run; `0` unless `status` is `ok`     |
//! | `input_size`    | node count of the engine input                       |
//! | `output_size`   | node count of the result, `0` on failure             |
//! | `cut_count_out` | cuts left in the result, `0` on failure              |
//! | `status`        | `ok`, `budget` (step budget ran out) or `error`      |

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use lkt_core::timing::Timing;
use lkt_core::{
    eliminate_inductions, gentzen_eliminate, normalize_with, to_tree, Budget, Family, InductionError, Policy,
};

use crate::commands::{definitions_of, prepare};

pub const CSV_HEADER: &str = "family,n,engine,wall_nanos,input_size,output_size,cut_count_out,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Lkt(Policy),
    Tree,
    IndElim,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Lkt(Policy::Full),
        Engine::Lkt(Policy::UntilAtomic),
        Engine::Lkt(Policy::UntilQuantifierFree),
        Engine::Tree,
        Engine::IndElim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Lkt(Policy::Full) => "lkt-full",
            Engine::Lkt(Policy::UntilAtomic) => "lkt-atomic",
            Engine::Lkt(Policy::UntilQuantifierFree) => "lkt-qfree",
            Engine::Tree => "tree",
            Engine::IndElim => "ind-elim",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Engine, String> {
        Engine::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Engine::ALL.iter().map(|e| e.name()).collect();
            format!("unknown engine `{s}` (expected one of {})", names.join(", "))
        })
    }
}

pub fn parse_engines(s: &str) -> Result<Vec<Engine>, String> {
    s.split(',').filter(|e| !e.is_empty()).map(|e| e.trim().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Budget,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Budget => "budget",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub family: Family,
    pub n: usize,
    pub engine: Engine,
    pub wall_nanos: u128,
    pub input_size: usize,
    pub output_size: usize,
    pub cut_count_out: usize,
    pub status: Status,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.engine,
            self.wall_nanos,
            self.input_size,
            self.output_size,
            self.cut_count_out,
            self.status.name()
        )
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub families: Vec<Family>,
    pub ns: RangeInclusive<usize>,
    pub engines: Vec<Engine>,
    pub timing: Timing,
    /// Step budget of a single run.
    pub budget: Option<u64>,
}

/// Size of the result, its cut count, and whether the budget ran out.
type RunResult = Result<(usize, usize), Status>;

fn budget(steps: Option<u64>) -> Budget {
    steps.map_or_else(Budget::unlimited, Budget::new)
}

/// Times one cell. Preparation (tree translation, equality atomization)
/// happens outside the timed region.
pub fn run_cell(family: Family, n: usize, engine: Engine, timing: Timing, steps: Option<u64>) -> BenchRecord {
    let g = family.generate(n);
    let mut rec = BenchRecord {
        family,
        n,
        engine,
        wall_nanos: 0,
        input_size: g.proof.size(),
        output_size: 0,
        cut_count_out: 0,
        status: Status::Error,
    };
    let measured: Result<(u128, (usize, usize)), Status> = match engine {
        Engine::Lkt(policy) => match prepare(&g.proof, &g, policy) {
            Ok(input) => {
                rec.input_size = input.size();
                timing
                    .measure(|| -> RunResult {
                        let p = normalize_with(&input, policy, &mut budget(steps)).map_err(|_| Status::Budget)?;
                        Ok((p.size(), p.cut_count()))
                    })
                    .map(|m| (m.min().as_nanos(), m.value))
            }
            Err(_) => Err(Status::Error),
        },
        Engine::Tree => match to_tree(&g.proof, &g.ctx) {
            Ok(tree) => {
                rec.input_size = tree.size();
                timing
                    .measure(|| -> RunResult {
                        let t = gentzen_eliminate(&tree, &mut budget(steps)).map_err(|_| Status::Budget)?;
                        Ok((t.size(), t.cut_count()))
                    })
                    .map(|m| (m.min().as_nanos(), m.value))
            }
            Err(_) => Err(Status::Error),
        },
        Engine::IndElim => {
            let defs = definitions_of(&g);
            timing
                .measure(|| -> RunResult {
                    let p = eliminate_inductions(&g.proof, &defs, &mut budget(steps)).map_err(|e| match e {
                        InductionError::Budget(_) => Status::Budget,
                        _ => Status::Error,
                    })?;
                    Ok((p.size(), p.cut_count()))
                })
                .map(|m| (m.min().as_nanos(), m.value))
        }
    };
    match measured {
        Ok((nanos, (size, cuts))) => {
            rec.wall_nanos = nanos.max(1);
            rec.output_size = size;
            rec.cut_count_out = cuts;
            rec.status = Status::Ok;
        }
        Err(s) => rec.status = s,
    }
    rec
}

/// Runs every cell in family, n, engine order.
pub fn run(config: &BenchConfig, mut progress: impl FnMut(&BenchRecord)) -> Vec<BenchRecord> {
    let mut out = Vec::new();
    for &family in &config.families {
        for n in config.ns.clone() {
            for &engine in &config.engines {
                let rec = run_cell(family, n, engine, config.timing, config.budget);
                progress(&rec);
                out.push(rec);
            }
        }
    }
    out
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for e in Engine::ALL {
            assert_eq!(e.name().parse::<Engine>().unwrap(), e);
        }
        assert!(parse_engines("lkt-full,nope").is_err());
    }

    #[test]
    fn tree_rejects_equational_families() {
        let r = run_cell(Family::AddDefs, 1, Engine::Tree, Timing::new(0, 1), None);
        assert_eq!(r.status, Status::Error);
        assert_eq!(r.wall_nanos, 0);
    }

    #[test]
    fn budget_status() {
        let r = run_cell(Family::LinearCut, 6, Engine::Lkt(Policy::Full), Timing::new(0, 1), Some(3));
        assert_eq!(r.status, Status::Budget);
        let r = run_cell(Family::LinearCut, 6, Engine::Lkt(Policy::Full), Timing::new(0, 1), None);
        assert_eq!(r.status, Status::Ok);
        assert!(r.wall_nanos > 0);
        assert_eq!(r.cut_count_out, 0);
    }
}
