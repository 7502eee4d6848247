//! One line per acceptance criterion, then a single assertion over all of them.
//!
//! Run with `cargo test -p lkt-core --test acceptance -- --nocapture` to see
//! the report.

use std::collections::BTreeSet;
use std::time::Duration;

use lkt_core::eqelim::eqls_are_atomic;
use lkt_core::formula::is_atomic;
use lkt_core::generators::{add_defs_instance, ind_linear_proof};
use lkt_core::lk_baseline::tree_instances;
use lkt_core::random::{random_proof, RandomConfig};
use lkt_core::timing::{time_once, Measured, Timing};
use lkt_core::*;

const MAX_N: usize = 10;
const RANDOM_PROOFS: u64 = 1000;
const NOISE: f64 = 1.2;
const ORDER_WARMUP: usize = 3;
const ORDER_ROUNDS: usize = 11;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        let (ok, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let line = format!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cut_formulas(p: &Proof, out: &mut Vec<Expr>) {
    if let ProofKind::Cut { formula, .. } = p.kind() {
        out.push(formula.clone());
    }
    for c in p.children() {
        cut_formulas(c, out);
    }
}

fn reduce(g: &Generated) -> Result<Proof, String> {
    let mut budget = Budget::unlimited();
    let p = match &g.defs {
        Some(defs) => eliminate_inductions(&g.proof, defs, &mut budget).map_err(|e| e.to_string())?,
        None => g.proof.clone(),
    };
    normalize(&p, &mut budget).map_err(|e| e.to_string())
}

fn subject_reduction() -> Result<String, String> {
    let mut count = 0;
    for fam in Family::ALL {
        for n in 0..=MAX_N {
            let g = fam.generate(n);
            let before = g.ctx.end_sequent();
            check_closed(&g.proof, &g.ctx).map_err(|e| format!("{fam}({n}) input: {e}"))?;
            let out = reduce(&g).map_err(|e| format!("{fam}({n}): {e}"))?;
            check_closed(&out, &g.ctx).map_err(|e| format!("{fam}({n}) output: {e}"))?;
            ensure(g.ctx.end_sequent() == before, || format!("{fam}({n}) end-sequent changed"))?;
            count += 1;
        }
    }
    Ok(format!("{count} proofs checked before and after reduction"))
}

fn cut_elimination() -> Result<String, String> {
    let mut count = 0;
    for fam in Family::EQUALITY_FREE {
        for n in 0..=MAX_N {
            let g = fam.generate(n);
            let out = normalize(&g.proof, &mut Budget::unlimited()).map_err(|e| e.to_string())?;
            ensure(out.cut_count() == 0, || format!("{fam}({n}) keeps {} cuts", out.cut_count()))?;
            count += 1;
        }
    }
    Ok(format!("{count} normal forms are cut-free"))
}

fn idempotence() -> Result<String, String> {
    let twice = |p: &Proof, what: &str| -> Result<(), String> {
        let once = normalize(p, &mut Budget::unlimited()).map_err(|e| format!("{what}: {e}"))?;
        let again = normalize(&once, &mut Budget::unlimited()).map_err(|e| format!("{what}: {e}"))?;
        ensure(once == again, || format!("{what}: second pass changed the proof"))
    };
    let mut count = 0;
    for fam in Family::ALL {
        for n in 0..=MAX_N {
            let g = fam.generate(n);
            let input = match &g.defs {
                Some(defs) => eliminate_inductions(&g.proof, defs, &mut Budget::unlimited())
                    .map_err(|e| e.to_string())?,
                None => g.proof.clone(),
            };
            twice(&input, &format!("{fam}({n})"))?;
            count += 1;
        }
    }
    let config = RandomConfig {
        depth: 6,
        ..RandomConfig::default()
    };
    for seed in 0..RANDOM_PROOFS {
        let g = random_proof(seed, config);
        check_closed(&g.proof, &g.ctx).map_err(|e| format!("random seed {seed} ill-typed: {e}"))?;
        twice(&g.proof, &format!("random seed {seed}"))?;
        count += 1;
    }
    Ok(format!("{count} proofs, {RANDOM_PROOFS} of them random"))
}

fn herbrand_soundness() -> Result<String, String> {
    let mut count = 0;
    for fam in Family::EQUALITY_FREE {
        for n in 0..=8 {
            let g = fam.generate(n);
            let out = normalize_with(&g.proof, Policy::UntilQuantifierFree, &mut Budget::unlimited())
                .map_err(|e| e.to_string())?;
            let inst = extract_instances(&out, &g.ctx).map_err(|e| format!("{fam}({n}): {e}"))?;
            let seq = herbrand_sequent(&inst, &g.ctx);
            let valid = validate_ground(&seq).map_err(|e| format!("{fam}({n}): {e}"))?;
            ensure(valid, || format!("{fam}({n}) invalid: {seq}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} Herbrand sequents valid"))
}

fn induction_observability() -> Result<String, String> {
    let step = Hyp::new(-2).unwrap();
    for n in 0..=12 {
        let g = ind_linear_proof(n);
        let out = eliminate_inductions(&g.proof, &RecursiveDefinitions::new(), &mut Budget::unlimited())
            .map_err(|e| e.to_string())?;
        let inst = extract_instances(&out, &g.ctx).map_err(|e| e.to_string())?;
        let got: BTreeSet<String> = inst
            .get(&step)
            .map(|vs| vs.iter().map(|v| v[0].to_string()).collect())
            .unwrap_or_default();
        let want: BTreeSet<String> = (0..n).map(|k| Expr::numeral(k).to_string()).collect();
        let vectors = inst.get(&step).map_or(0, |vs| vs.len());
        ensure(got == want && vectors == n, || {
            format!("ind_linear({n}): got {got:?}, want {want:?}")
        })?;
    }
    Ok("step instances are s^k(0) for k < n, n <= 12".into())
}

fn differential() -> Result<String, String> {
    let mut count = 0;
    for fam in Family::EQUALITY_FREE {
        for n in 0..=6 {
            let g = fam.generate(n);
            let tree = to_tree(&g.proof, &g.ctx).map_err(|e| format!("{fam}({n}): {e}"))?;
            let t = gentzen_eliminate(&tree, &mut Budget::unlimited()).map_err(|e| e.to_string())?;
            t.verify().map_err(|e| format!("{fam}({n}) tree: {e}"))?;
            let p = normalize(&g.proof, &mut Budget::unlimited()).map_err(|e| e.to_string())?;
            check_closed(&p, &g.ctx).map_err(|e| format!("{fam}({n}): {e}"))?;
            ensure(t.end_sequent() == g.ctx.end_sequent(), || format!("{fam}({n}) end-sequents differ"))?;
            ensure(t.cut_count() == 0, || format!("{fam}({n}) tree keeps cuts"))?;
            let tseq = herbrand_sequent(&tree_instances(&t), &t.concl);
            let pseq = herbrand_sequent(
                &extract_instances(&p, &g.ctx).map_err(|e| e.to_string())?,
                &g.ctx,
            );
            for (who, seq) in [("tree", &tseq), ("lkt", &pseq)] {
                let ok = validate_ground(seq).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{fam}({n}) {who} Herbrand sequent invalid: {seq}"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} inputs agree"))
}

fn timed(timing: Timing, p: &Proof, policy: Policy) -> Measured<Proof> {
    timing
        .measure(|| normalize_with(p, policy, &mut Budget::unlimited()))
        .expect("unlimited budget")
}

fn ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

fn perf_speedup() -> Result<String, String> {
    let g = Family::LinearCut.generate(8);
    let lkt = timed(Timing::default(), &g.proof, Policy::Full).min();
    let tree = to_tree(&g.proof, &g.ctx).map_err(|e| e.to_string())?;
    let base = Timing::new(1, 5)
        .measure(|| gentzen_eliminate(&tree, &mut Budget::unlimited()))
        .map_err(|e| e.to_string())?
        .min();
    let ratio = base.as_secs_f64() / lkt.as_secs_f64();
    let detail = format!("linear_cut(8) lkt-full {} vs tree {} ({ratio:.0}x)", ms(lkt), ms(base));
    ensure(ratio >= 10.0, || detail.clone())?;
    Ok(detail)
}

fn perf_linear_cut_12() -> Result<String, String> {
    let g = Family::LinearCut.generate(12);
    let t = timed(Timing::new(0, 5), &g.proof, Policy::Full).min();
    let detail = format!("linear_cut(12) lkt-full {}", ms(t));
    ensure(t < Duration::from_secs(10), || detail.clone())?;
    Ok(detail)
}

fn perf_acnf_100() -> Result<String, String> {
    let g = Family::LinearAcnf.generate(100);
    let t = timed(Timing::default(), &g.proof, Policy::UntilAtomic).min();
    let detail = format!("linear_acnf(100) until-atomic {}", ms(t));
    ensure(t < Duration::from_millis(100), || detail.clone())?;
    Ok(detail)
}

/// Medians per policy, measured round-robin so that load spikes on a shared
/// machine hit every policy alike.
fn interleaved_medians(p: &Proof, policies: [Policy; 3], warmup: usize, rounds: usize) -> [Duration; 3] {
    let run = |pol: Policy| time_once(|| normalize_with(p, pol, &mut Budget::unlimited()).expect("unlimited")).1;
    for _ in 0..warmup {
        policies.map(run);
    }
    let mut samples: [Vec<Duration>; 3] = Default::default();
    for _ in 0..rounds {
        for (i, pol) in policies.into_iter().enumerate() {
            samples[i].push(run(pol));
        }
    }
    samples.map(|mut s| {
        s.sort();
        s[s.len() / 2]
    })
}

fn perf_ordering() -> Result<String, String> {
    let mut parts = vec![];
    for n in [6, 8, 10] {
        let g = Family::LinearCut.generate(n);
        let policies = [Policy::UntilQuantifierFree, Policy::UntilAtomic, Policy::Full];
        let [q, a, f] = interleaved_medians(&g.proof, policies, ORDER_WARMUP, ORDER_ROUNDS);
        let detail = format!("n={n}: qfree {} atomic {} full {}", ms(q), ms(a), ms(f));
        let within = |x: Duration, y: Duration| x.as_secs_f64() <= NOISE * y.as_secs_f64();
        ensure(within(q, a) && within(a, f), || detail.clone())?;
        parts.push(detail);
    }
    Ok(parts.join("; "))
}

fn equality_atomization() -> Result<String, String> {
    for k in 0..=5 {
        let g = add_defs_instance(k);
        let a = atomize_eqls(&g.proof, &g.ctx).map_err(|e| format!("add_defs({k}): {e}"))?;
        check_closed(&a, &g.ctx).map_err(|e| format!("add_defs({k}) atomized: {e}"))?;
        let out = normalize(&a, &mut Budget::unlimited()).map_err(|e| e.to_string())?;
        check_closed(&out, &g.ctx).map_err(|e| format!("add_defs({k}) normalized: {e}"))?;
        ensure(eqls_are_atomic(&out), || format!("add_defs({k}) has a complex Eql"))?;
        let mut cuts = vec![];
        cut_formulas(&out, &mut cuts);
        if let Some(bad) = cuts.iter().find(|f| !is_atomic(f)) {
            return Err(format!("add_defs({k}) keeps a cut on {bad}"));
        }
    }
    Ok("add_defs(0..=5): all Eql contexts and cut formulas atomic".into())
}

#[test]
fn acceptance() {
    let mut r = Report { lines: vec![] };
    r.record("subject reduction", subject_reduction());
    r.record("cut elimination", cut_elimination());
    r.record("idempotence", idempotence());
    r.record("herbrand soundness", herbrand_soundness());
    r.record("induction observability", induction_observability());
    r.record("differential oracle", differential());
    r.record("performance (a) speedup over tree engine >= 10x", perf_speedup());
    r.record("performance (b) linear_cut(12) < 10 s", perf_linear_cut_12());
    r.record("performance (c) linear_acnf(100) < 100 ms", perf_acnf_100());
    r.record("performance (d) qfree <= atomic <= full (20%)", perf_ordering());
    r.record("equality atomization", equality_atomization());
    let failed: Vec<_> = r.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
