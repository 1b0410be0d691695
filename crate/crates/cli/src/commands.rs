use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use ltlab::arith::{zn_canonical, zn_reduce, WittCtx, ZnElt};
use ltlab::lubin_tate::{act_on, crossed_law, LtResult, LubinTate};
use ltlab::parse::parse_elt;
use ltlab::ring::Ring;
use ltlab::stabilizer::{r_of, StabElt};
use ltlab::verdicts::{self, Verdict};
use ltlab::SCHEMA;

use crate::config::RunConfig;
use crate::{CliError, Report};

fn witt(cfg: &RunConfig) -> Result<WittCtx, CliError> {
    Ok(WittCtx::new(cfg.p, cfg.n as usize, cfg.k)?)
}

fn parse_g(cfg: &RunConfig, text: &str) -> Result<StabElt, CliError> {
    Ok(StabElt::parse(witt(cfg)?, text)?)
}

fn doc(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    v
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verdict_line(v: &Verdict) -> String {
    format!("[{}] {}: {} ({})", mark(v.passed()), v.rule, v.statement, v.detail)
}

pub fn det(cfg: &RunConfig, g: &str) -> Result<Report, CliError> {
    let g = parse_g(cfg, g)?;
    let w = *g.ctx();
    let d = g.det()?;
    let f = w.residue_field();
    let r = r_of(cfg.p, cfg.n as usize);
    let a0r = f.pow(&g.leading_residue(), r);
    let congruent = w.residue(&d) == a0r;
    let frob_fixed = w.frobenius(&d) == d;
    let lines = vec![
        format!("g              = {g}"),
        format!("det(g)         = {}  (mod {}^{})", w.format(&d), cfg.p, cfg.k),
        format!("a_0^r(n) mod p = {}  (r(n) = {r})", f.format(&a0r)),
        format!("det = a_0^r(n) mod p: {}", mark(congruent)),
        format!("det is Frobenius-fixed: {}", mark(frob_fixed)),
    ];
    let docs = vec![doc(
        "det",
        json!({
            "p": cfg.p, "n": cfg.n, "k": cfg.k, "g": g.to_string(),
            "det": w.format(&d), "det_int": w.as_int(&d), "r": r,
            "a0_pow_r_mod_p": f.format(&a0r), "congruent": congruent, "frobenius_fixed": frob_fixed,
        }),
    )];
    Ok(Report { lines, docs, failed: !(congruent && frob_fixed) })
}

pub fn zeta(cfg: &RunConfig, g: &str) -> Result<Report, CliError> {
    let g = parse_g(cfg, g)?;
    let z = g.zeta()?;
    let lines = vec![format!("g       = {g}"), format!("zeta(g) = {} mod {}", z.value, z.modulus)];
    let docs = vec![doc("zeta", json!({ "p": cfg.p, "n": cfg.n, "k": cfg.k, "g": g.to_string(), "zeta": z }))];
    Ok(Report { lines, docs, failed: false })
}

fn solver(cfg: &RunConfig) -> Result<LubinTate, CliError> {
    Ok(LubinTate::new(cfg.p, cfg.n as usize, cfg.j, cfg.big_n)?)
}

fn emit(cfg: &RunConfig, lt: &LubinTate, res: &LtResult) -> Result<(), CliError> {
    if let Some(path) = &cfg.emit_fixture {
        let v = json!({ "schema": SCHEMA, "fgl": lt.gn.to_document(), "action": res.to_document() });
        let text = serde_json::to_string_pretty(&v).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn action_lines(res: &LtResult) -> Vec<String> {
    let r = &res.ring;
    let mut lines = vec![format!("g       = {}", res.g)];
    for (i, e) in res.phi.iter().enumerate() {
        lines.push(format!("phi(u{}) = {}", i + 1, r.format(e)));
    }
    lines.push(format!("t0(g)   = {}", r.format(res.t0())));
    lines.push(format!(
        "precision: E_0/m^{}, equation imposed through x^{}",
        r.truncation(),
        res.effective_degree
    ));
    lines
}

pub fn t0(cfg: &RunConfig, g: &str) -> Result<Report, CliError> {
    let g = parse_g(cfg, g)?;
    let lt = solver(cfg)?;
    let res = lt.lt_action(&g)?;
    emit(cfg, &lt, &res)?;
    let lines = action_lines(&res);
    let docs = vec![doc("t0", serde_json::to_value(res.to_document()).expect("serializable"))];
    Ok(Report { lines, docs, failed: false })
}

pub fn act(cfg: &RunConfig, g: &str, x: &str) -> Result<Report, CliError> {
    let g = parse_g(cfg, g)?;
    let lt = solver(cfg)?;
    let r = lt.ring();
    let xv = parse_elt(r, x)?;
    let res = lt.lt_action(&g)?;
    emit(cfg, &lt, &res)?;
    let y = act_on(&res, &xv);
    let mut lines = action_lines(&res);
    lines.push(format!("g . ({}) = {}", r.format(&xv), r.format(&y)));
    let docs = vec![doc(
        "act",
        json!({ "p": cfg.p, "n": cfg.n, "j": cfg.j, "g": g.to_string(), "x": r.format(&xv), "image": r.format(&y) }),
    )];
    Ok(Report { lines, docs, failed: false })
}

struct Trial {
    index: usize,
    g: StabElt,
    verdicts: Vec<Verdict>,
    crossed_holds: bool,
    crossed: Value,
}

impl Trial {
    fn passed(&self) -> bool {
        self.crossed_holds && self.verdicts.iter().all(Verdict::passed)
    }
}

/// Trial `i` checks the identities for `g_i` and the crossed law for `(g_i, g_{i+1})`.
pub fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let ctx = witt(cfg)?;
    let lt = solver(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gs: Vec<StabElt> = (0..cfg.trials).map(|_| StabElt::random(ctx, &mut rng, true)).collect();
    let results: Vec<LtResult> = lt.lt_action_batch(&gs).into_iter().collect::<Result<_, _>>()?;
    let mut trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| -> Result<Trial, CliError> {
            let next = (i + 1) % cfg.trials;
            let res = &results[i];
            let gh = gs[i].mul(&gs[next])?;
            let cr = crossed_law(res, &results[next], &lt.lt_action(&gh)?);
            let verdicts = vec![verdicts::fund_alpha(res)?, verdicts::detred(res)?, verdicts::mod_p_class(res)?];
            let crossed = json!({ "h": gs[next].to_string(), "holds": cr.holds, "lhs": cr.lhs, "rhs": cr.rhs });
            Ok(Trial { index: i, g: gs[i].clone(), verdicts, crossed_holds: cr.holds, crossed })
        })
        .collect::<Result<_, _>>()?;
    trials.sort_by_key(|t| t.index);

    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut statements: BTreeMap<&str, &str> = BTreeMap::new();
    for t in &trials {
        for v in &t.verdicts {
            let c = counts.entry(v.rule).or_default();
            c.0 += usize::from(v.passed());
            c.1 += 1;
            statements.insert(v.rule, v.statement);
        }
        let c = counts.entry("crossed-law").or_default();
        c.0 += usize::from(t.crossed_holds);
        c.1 += 1;
    }
    statements.insert("crossed-law", "t0(gh) equals g(t0(h)) t0(g)");
    let failing: Vec<usize> = trials.iter().filter(|t| !t.passed()).map(|t| t.index).collect();

    let mut docs: Vec<Value> = trials
        .iter()
        .map(|t| {
            doc(
                "verify",
                json!({ "trial": t.index, "g": t.g.to_string(), "verdicts": t.verdicts, "crossed": t.crossed, "passed": t.passed() }),
            )
        })
        .collect();
    let rules: BTreeMap<&str, Value> =
        counts.iter().map(|(k, (pass, total))| (*k, json!({ "passed": pass, "total": total }))).collect();
    docs.push(doc(
        "verify-summary",
        json!({
            "p": cfg.p, "n": cfg.n, "k": cfg.k, "j": cfg.j, "seed": cfg.seed, "trials": cfg.trials,
            "effective_degree": lt.effective_degree(), "rules": rules, "failing_trials": failing, "all_passed": failing.is_empty(),
        }),
    ));

    let mut lines = vec![format!(
        "verify p={} n={} k={} j={} seed={} trials={}",
        cfg.p, cfg.n, cfg.k, cfg.j, cfg.seed, cfg.trials
    )];
    for (rule, (pass, total)) in &counts {
        lines.push(format!("[{}] {rule}: {pass}/{total}  {}", mark(pass == total), statements[rule]));
    }
    for t in trials.iter().filter(|t| !t.passed()) {
        lines.push(format!("trial {} failed for g = {}", t.index, t.g));
        lines.extend(t.verdicts.iter().filter(|v| !v.passed()).map(verdict_line));
    }
    lines.push(if failing.is_empty() { "all passed".into() } else { format!("{} trial(s) failed", failing.len()) });
    Ok(Report { lines, docs, failed: !failing.is_empty() })
}

pub fn shifts(cfg: &RunConfig) -> Result<Report, CliError> {
    let s = verdicts::duality_shifts(cfg.p, cfg.n, cfg.k)?;
    let mut lines = vec![
        format!("p={} n={} k={}", s.p, s.n, s.k),
        format!("bc shift  = {}", s.bc_shift),
        format!("alg shift = {}", s.alg_shift),
    ];
    lines.extend(s.notes.iter().map(|n| format!("note: {n}")));
    let docs = vec![doc("shifts", serde_json::to_value(&s).expect("serializable"))];
    Ok(Report { lines, docs, failed: false })
}

pub fn moore(cfg: &RunConfig, s: u64) -> Result<Report, CliError> {
    let m = verdicts::moore_duality_report(cfg.p, cfg.k, s)?;
    let mut lines = vec![
        format!("p={} k={} s={}", m.p, m.k, m.s),
        format!("bc shift = {}", m.bc_shift),
        format!("d shift  = {}", m.d_shift),
        format!("net      = {}", m.net),
    ];
    if let Some(f) = &m.fixture {
        lines.push(format!(
            "net mod {} = {}, known {}, discrepancy {}",
            f.period, f.net_mod_period, f.known, f.discrepancy
        ));
    }
    lines.extend(m.warnings.iter().map(|w| format!("warning: {w}")));
    let docs = vec![doc("moore", serde_json::to_value(&m).expect("serializable"))];
    Ok(Report { lines, docs, failed: false })
}

/// Rule lookups answer a question; a negative answer is not a failure.
pub fn rule(v: Verdict) -> Result<Report, CliError> {
    let value = match v.outcome {
        verdicts::Outcome::Pass => "true".to_string(),
        verdicts::Outcome::Fail => "false".to_string(),
        verdicts::Outcome::ForcedZero => "forced zero".to_string(),
        verdicts::Outcome::NotForced => "not forced".to_string(),
        verdicts::Outcome::Bound(b) => format!("killed by {b}"),
        verdicts::Outcome::VanishesAbove(s) => format!("vanishes above filtration {s}"),
        verdicts::Outcome::NoLine => "no vanishing line".to_string(),
    };
    let inputs: Vec<String> = v.inputs.iter().map(|(k, x)| format!("{k}={x}")).collect();
    let lines = vec![
        format!("{}({}): {value}", v.rule, inputs.join(", ")),
        format!("  rule: {}", v.statement),
        format!("  {}", v.detail),
    ];
    let docs = vec![doc("anss", serde_json::to_value(&v).expect("serializable"))];
    Ok(Report { lines, docs, failed: false })
}

pub fn zn(cfg: &RunConfig, value: Option<i64>) -> Result<Report, CliError> {
    let c = zn_canonical(cfg.p, cfg.n, cfg.k)?;
    let reductions = |a: &ZnElt| -> Result<Vec<u64>, CliError> { Ok((1..=cfg.k).map(|i| zn_reduce(a, i)).collect::<Result<_, _>>()?) };
    let (ra, rl) = (reductions(&c.alpha)?, reductions(&c.lambda)?);
    let mut lines = vec![
        format!("p={} n={} K={}  r(n) = {}", cfg.p, cfg.n, cfg.k, c.r),
        format!("alpha:  additive order {}, reductions mod p^i (p^n-1): {:?}", c.alpha.additive_order(), ra),
        format!("lambda: additive order {}, reductions mod p^i (p^n-1): {:?}", c.lambda.additive_order(), rl),
    ];
    let mut body = json!({
        "p": cfg.p, "n": cfg.n, "k": cfg.k, "r": c.r,
        "alpha": { "zp": c.alpha.zp, "res": c.alpha.res, "additive_order": c.alpha.additive_order(), "reductions": ra },
        "lambda": { "zp": c.lambda.zp, "res": c.lambda.res, "additive_order": c.lambda.additive_order(), "reductions": rl },
    });
    if let Some(v) = value {
        let e = ZnElt::from_int(cfg.p, cfg.n, cfg.k, v)?;
        let rv = reductions(&e)?;
        lines.push(format!("{v}: additive order {}, reductions: {:?}", e.additive_order(), rv));
        body["value"] = json!({ "input": v, "zp": e.zp, "res": e.res, "additive_order": e.additive_order(), "reductions": rv });
    }
    Ok(Report { lines, docs: vec![doc("zn", body)], failed: false })
}
