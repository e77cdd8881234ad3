use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use dcfg::geometry::{constituent_table, constituents_rank1, pump_table, pumps_rank1, Constituent1, Pump2};
use dcfg::parser::{parse_all, recognize};
use dcfg::pumping::{ogden_certificate, pump_word, pumping_certificate, PumpError};
use dcfg::{language, to_cnf, CnfGrammar, Grammar, Violation};
use serde_json::{json, Map, Value};

pub struct Outcome {
    pub code: u8,
    pub payload: Option<Value>,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome {
            code: 0,
            payload: Some(payload),
        }
    }

    fn negative(payload: Value) -> Self {
        Outcome {
            code: 1,
            payload: Some(payload),
        }
    }
}

/// A usage or input error: reported on stderr, exit status 2.
pub struct Failure(String);

impl From<Failure> for Outcome {
    fn from(f: Failure) -> Self {
        eprintln!("error: {}", f.0);
        Outcome { code: 2, payload: None }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read_grammar(path: &Path) -> Result<Grammar> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn violation_json(v: &Violation) -> Value {
    json!({ "rule": v.rule, "line": v.line, "message": v.to_string() })
}

fn load_cnf(path: &Path) -> Result<(Grammar, CnfGrammar)> {
    let g = read_grammar(path)?;
    let cnf = to_cnf(&g).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok((g, cnf))
}

fn check_word(g: &Grammar, word: &str) -> Result<()> {
    match word.chars().enumerate().find(|(_, c)| !g.alphabet().contains(c)) {
        Some((i, c)) => Err(Failure(format!("symbol {c:?} at position {i} is not in the alphabet"))),
        None => Ok(()),
    }
}

fn pump_failure(e: PumpError) -> Failure {
    Failure(e.to_string())
}

pub fn validate(path: &Path) -> Result<Outcome> {
    let g = read_grammar(path)?;
    let violations = g.validate();
    for v in &violations {
        eprintln!("{}: {v}", path.display());
    }
    let payload = json!({
        "valid": violations.is_empty(),
        "violations": violations.iter().map(violation_json).collect::<Vec<_>>(),
    });
    Ok(if violations.is_empty() {
        Outcome::ok(payload)
    } else {
        Outcome::negative(payload)
    })
}

pub fn cnf(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let (_, cnf) = load_cnf(path)?;
    let text = cnf.to_string();
    let mut payload = json!({
        "nonterminals": cnf.nonterminal_count(),
        "rules": cnf.rules().len(),
    });
    match out {
        Some(out) => {
            fs::write(out, &text).map_err(|e| Failure(format!("{}: {e}", out.display())))?;
            payload["output"] = json!(out.display().to_string());
        }
        None => payload["grammar"] = json!(text),
    }
    Ok(Outcome::ok(payload))
}

pub fn parse(path: &Path, word: &str, count: usize) -> Result<Outcome> {
    let (g, cnf) = load_cnf(path)?;
    check_word(&g, word)?;
    let trees = parse_all(&cnf, word, count).map_err(|e| Failure(e.to_string()))?;
    let member = !trees.is_empty();
    let payload = json!({ "member": member, "trees": trees });
    Ok(if member {
        Outcome::ok(payload)
    } else {
        Outcome::negative(payload)
    })
}

pub fn generate(path: &Path, max_len: usize) -> Result<Outcome> {
    let g = read_grammar(path)?;
    let violations = g.validate();
    if let Some(v) = violations.first() {
        return Err(Failure(format!("{}: {v}", path.display())));
    }
    let words: BTreeSet<String> = language(&g, max_len).iter().map(|w| w.to_plain()).collect();
    Ok(Outcome::ok(json!({ "words": words })))
}

pub fn pump(path: &Path, word: &str, powers: &[usize], select: &[usize], max_trees: usize) -> Result<Outcome> {
    let (g, cnf) = load_cnf(path)?;
    check_word(&g, word)?;
    if !recognize(&cnf, word).map_err(|e| Failure(e.to_string()))? {
        return Ok(Outcome::negative(json!({ "member": false, "certificate": null })));
    }
    let selected: BTreeSet<usize> = select.iter().copied().collect();
    let found = if selected.is_empty() {
        pumping_certificate(&cnf, word, max_trees)
    } else {
        ogden_certificate(&cnf, word, &selected, max_trees)
    }
    .map_err(pump_failure)?;
    let Some(cert) = found else {
        let reason = if selected.is_empty() {
            format!("no pump with non-empty y/z in the first {max_trees} parse trees")
        } else {
            format!("no pump covers a selected position in the first {max_trees} parse trees")
        };
        eprintln!("{reason}");
        return Ok(Outcome::negative(json!({ "member": true, "certificate": null, "reason": reason })));
    };
    let mut verified = Map::new();
    for &p in powers {
        let pumped = pump_word(&cert.decomposition, p);
        verified.insert(p.to_string(), json!(recognize(&cnf, &pumped).expect("letters stay in the alphabet")));
    }
    let mut payload = serde_json::to_value(&cert).expect("certificates serialize");
    payload["verified_powers"] = Value::Object(verified);
    Ok(Outcome::ok(payload))
}

pub fn geometry(path: &Path, word: &str, max_trees: usize) -> Result<Outcome> {
    let (g, cnf) = load_cnf(path)?;
    if g.k() > 1 {
        return Err(Failure(format!(
            "geometry covers grammars of order at most 1, this one has order {}",
            g.k()
        )));
    }
    check_word(&g, word)?;
    let trees = parse_all(&cnf, word, max_trees).map_err(|e| Failure(e.to_string()))?;
    if trees.is_empty() {
        return Ok(Outcome::negative(json!({ "member": false, "trees": [] })));
    }
    let mut unclassifiable = 0;
    let mut reports = Vec::new();
    for t in &trees {
        let cs: Vec<Constituent1> = constituents_rank1(t).map_err(|e| Failure(e.to_string()))?.into_iter().map(|(_, c)| c).collect();
        let ps: Vec<Pump2> = pumps_rank1(t).map_err(|e| Failure(e.to_string()))?.into_iter().map(|(_, p)| p).collect();
        let ct = constituent_table(&cs);
        let pt = pump_table(&ps);
        unclassifiable += ct.iter().filter(|r| r.case.is_none()).count() + pt.iter().filter(|r| r.case.is_none()).count();
        reports.push(json!({
            "constituents": cs,
            "pumps": ps,
            "constituent_table": ct,
            "pump_table": pt,
        }));
    }
    Ok(Outcome::ok(json!({
        "member": true,
        "trees": reports,
        "unclassifiable": unclassifiable,
    })))
}
