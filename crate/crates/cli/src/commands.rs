use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use bidual::bea::{check_axioms, family_bea, separate, Axiom, BeaOracle, ALL_AXIOMS};
use bidual::caps::Caps;
use bidual::convexity::{self, bea_from_biconvexity};
use bidual::dual::{bidual_and_evaluate, bidual_bea, dual_lenient, ultimate_dual, DualInduced, EvalReport};
use bidual::instances::generators::{self, PRNG_ALGORITHM};
use bidual::instances::verify::{self, SuiteReport};
use bidual::io::{self, CorpusMeta, Document};
use bidual::{mask, Error, FiniteStructure, Mask, Result, Template};

use crate::output::{indices, list, Report};
use crate::{Cli, Command, GenClass, Suite, Verdict};

pub fn run(cli: &Cli, caps: &Caps) -> Result<Report> {
    match &cli.command {
        Command::CheckAxioms { input, axioms } => check_axioms_cmd(input, axioms, caps),
        Command::Dual {
            input,
            template,
            e_template,
            out,
        } => dual_cmd(input, template, e_template.as_deref(), out.as_deref(), caps),
        Command::Reflexivity {
            input,
            template,
            e_template,
        } => reflexivity_cmd(input, template, e_template.as_deref(), caps),
        Command::Separate { input, a, b } => separate_cmd(input, a, b),
        Command::Verify {
            suite,
            max_size,
            samples,
            seed,
        } => verify_cmd(cli, *suite, *max_size, *samples, *seed, caps),
        Command::Gen {
            class,
            size,
            seed,
            count,
            exhaustive,
            out,
        } => gen_cmd(*class, *size, *seed, *count, *exhaustive, out.as_deref(), caps),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// A ⋈-oracle from a bea, family or biconvexity document.
fn load_oracle(path: &Path, caps: &Caps) -> Result<BeaOracle> {
    match io::read_document(path)? {
        Document::Bea(d) => io::bea_from_doc(&d),
        Document::Family(d) => family_bea(&io::family_from_doc(&d)?),
        Document::Biconvexity(d) => bea_from_biconvexity(&io::biconvexity_from_doc(&d)?, true, caps),
        other => Err(Error::Parse(format!("expected a bea, family or biconvexity document, found {}", other.kind()))),
    }
}

fn load_template(spec: &str) -> Result<Template> {
    if let Some(t) = Template::by_name(spec) {
        return Ok(t);
    }
    let path = Path::new(spec);
    if path.exists() {
        return Ok(Template::Relational(io::read_template(path)?));
    }
    Err(Error::InvalidTemplate(format!("`{spec}` is neither a known template nor a file")))
}

fn parse_set(spec: &str, n: usize) -> Result<Mask> {
    let mut m = 0;
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i: usize = part.parse().map_err(|_| Error::Parse(format!("`{part}` is not an index")))?;
        if i >= n {
            return Err(Error::Parse(format!("index {i} outside a universe of {n}")));
        }
        m |= mask::bit(i);
    }
    Ok(m)
}

fn check_axioms_cmd(input: &Path, names: &[String], caps: &Caps) -> Result<Report> {
    let o = load_oracle(input, caps)?;
    let axioms: Vec<Axiom> = if names.is_empty() {
        ALL_AXIOMS
            .iter()
            .copied()
            .filter(|a| match a {
                Axiom::C0 => o.zero.is_some(),
                Axiom::C1 => o.one.is_some(),
                _ => true,
            })
            .collect()
    } else {
        names.iter().map(|s| s.trim().parse()).collect::<Result<_>>()?
    };
    let reports = check_axioms(&o, &axioms, caps)?;
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    let results: Vec<Value> = reports
        .iter()
        .map(|r| {
            let witness = r.witness.as_ref().map(|w| w.iter().map(|&m| indices(m)).collect::<Vec<_>>());
            match &witness {
                None => writeln!(text, "{}: pass", r.axiom).unwrap(),
                Some(w) => writeln!(text, "{}: FAIL, witness {:?}", r.axiom, w).unwrap(),
            }
            json!({ "axiom": r.axiom, "pass": r.pass, "witness": witness })
        })
        .collect();
    let verdict = if pass { Verdict::Pass } else { Verdict::Counterexample };
    Ok(Report::new(
        "check-axioms",
        verdict,
        json!({ "universe": o.n, "axioms": results }),
        text,
    ))
}

fn write_doc(path: &Path, doc: &Document) -> Result<()> {
    fs::write(path, io::to_json(doc)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn dual_cmd(input: &Path, template: &str, e_template: Option<&str>, out: Option<&Path>, caps: &Caps) -> Result<Report> {
    let d = load_template(template)?;
    let doc = io::read_document(input)?;
    let (carrier, problems, out_doc) = match (&d, &doc) {
        (Template::Relational(dt), Document::Structure(_)) => {
            let x = doc.to_structure()?;
            let e = match e_template {
                Some(spec) => load_template(spec)?,
                None => Template::Ultimate(d.ultimate_partner()),
            };
            let ds = dual_lenient(&x, dt, &e, caps)?;
            let out_doc = match &ds.induced {
                DualInduced::Relational(s) => Document::Structure(io::structure_doc(s)),
                DualInduced::Bea(o) => Document::Bea(io::bea_doc(o)?),
            };
            (ds.carrier, ds.violations, out_doc)
        }
        (Template::Ultimate(_), _) => {
            let o = load_oracle(input, caps)?;
            let ud = ultimate_dual(&o, caps)?;
            let out_doc = Document::Bea(io::bea_doc(&ud.oracle)?);
            (ud.carrier, ud.missing_constants, out_doc)
        }
        (Template::Relational(_), other) => {
            return Err(Error::Parse(format!(
                "template {} needs a structure document, found {}",
                d.name(),
                other.kind()
            )))
        }
    };
    if let Some(path) = out {
        write_doc(path, &out_doc)?;
    }
    let mut text = format!("dual has {} elements:\n", carrier.len());
    for &s in &carrier.sets {
        writeln!(text, "  {}", list(s)).unwrap();
    }
    for p in &problems {
        writeln!(text, "violation: {p}").unwrap();
    }
    let verdict = if problems.is_empty() { Verdict::Pass } else { Verdict::Counterexample };
    Ok(Report::new(
        "dual",
        verdict,
        json!({
            "template": d.name(),
            "carrier": io::family_doc(&carrier),
            "violations": problems,
        }),
        text,
    ))
}

fn eval_text(r: &EvalReport) -> String {
    let mut text = format!(
        "|X| = {}, |X*| = {}, |X**| = {}\ninjective: {}, embedding: {}, surjective: {}\n",
        r.sizes.x, r.sizes.xstar, r.sizes.xbidual, r.injective, r.embedding, r.surjective
    );
    for c in &r.collisions {
        writeln!(text, "collision: {c:?}").unwrap();
    }
    for u in &r.unrepresented {
        writeln!(text, "not an evaluation: {u:?}").unwrap();
    }
    text
}

fn reflexivity_cmd(input: &Path, template: &str, e_template: Option<&str>, caps: &Caps) -> Result<Report> {
    let d = load_template(template)?;
    let r = match &d {
        Template::Relational(dt) => {
            let x: FiniteStructure = io::read_document(input)?.to_structure()?;
            let e = match e_template {
                Some(spec) => load_template(spec)?,
                None => Template::Ultimate(d.ultimate_partner()),
            };
            bidual_and_evaluate(&x, dt, &e, caps)?
        }
        Template::Ultimate(_) => bidual_bea(&load_oracle(input, caps)?, caps)?,
    };
    let verdict = if r.bijective() && r.embedding {
        Verdict::Pass
    } else {
        Verdict::Counterexample
    };
    Ok(Report::new("reflexivity", verdict, to_value(&r), eval_text(&r)))
}

fn separate_cmd(input: &Path, a: &str, b: &str) -> Result<Report> {
    let o = load_oracle(input, &Caps::default())?;
    let (am, bm) = (parse_set(a, o.n)?, parse_set(b, o.n)?);
    match separate(&o, am, bm) {
        Ok(u) => Ok(Report::new(
            "separate",
            Verdict::Pass,
            json!({ "a": indices(am), "b": indices(bm), "U": indices(u) }),
            format!("U={}", list(u)),
        )),
        Err(Error::PaschFailure { stage, point, detail }) => Ok(Report::new(
            "separate",
            Verdict::Counterexample,
            json!({ "a": indices(am), "b": indices(bm), "pasch_failure": { "stage": stage, "point": point, "detail": detail } }),
            format!("Pasch failure at stage {stage}: {detail}"),
        )),
        Err(e) => Err(e),
    }
}

/// Whether the user set `name` through DUALITY_CAPS or --caps.
fn cap_overridden(cli: &Cli, name: &str) -> bool {
    let mentions = |spec: &str| spec.split(',').any(|item| item.split('=').next().map(str::trim) == Some(name));
    std::env::var("DUALITY_CAPS").is_ok_and(|s| mentions(&s)) || cli.caps.as_deref().is_some_and(mentions)
}

fn verify_cmd(cli: &Cli, suite: Suite, max_size: usize, samples: usize, seed: u64, caps: &Caps) -> Result<Report> {
    let mut caps = caps.clone();
    // Down-set lattices of 4-point posets reach 16 elements.
    if matches!(suite, Suite::Priestley | Suite::Stone) && !cap_overridden(cli, "bidual_x") {
        caps.bidual_x = caps.bidual_x.max(16);
    }
    let caps = &caps;
    let report: SuiteReport = match suite {
        Suite::Priestley => {
            let posets = verify::poset_corpus(max_size)?;
            let lattices: Vec<_> = posets.iter().map(generators::downset_lattice).collect();
            verify::verify_priestley(&posets, &lattices, caps)
        }
        Suite::Stone => {
            let lattices: Vec<_> = verify::poset_corpus(max_size.min(3))?.iter().map(generators::downset_lattice).collect();
            let sizes: Vec<usize> = (1..=max_size).collect();
            verify::verify_stone(&sizes, &lattices, caps)
        }
        Suite::Hms => verify::verify_hms(&verify::semilattice_corpus(max_size, samples, seed)?, caps),
        Suite::Biconvex => verify::verify_biconvex(&verify::biconvex_corpus(max_size, samples, seed, caps)?, caps),
        Suite::Pasch => verify::verify_pasch(samples, max_size, 50, 20, seed, caps),
        Suite::Betweenness => verify::verify_betweenness(&verify::betweenness_corpus(max_size, samples, seed), caps),
        Suite::Ultimate => verify::verify_ultimate(samples, max_size, seed, caps),
    };
    let verdict = if !report.pass {
        Verdict::Counterexample
    } else if report.skipped > 0 {
        Verdict::Capped
    } else {
        Verdict::Pass
    };
    let mut text = format!(
        "suite {}: {} ({} items, {} skipped)\n",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" },
        report.checked,
        report.skipped
    );
    for item in &report.items {
        let status = match (&item.skipped, item.pass) {
            (Some(_), _) => "skip",
            (None, true) => "pass",
            (None, false) => "FAIL",
        };
        writeln!(text, "  {status}  {}", item.label).unwrap();
        for c in &item.counterexamples {
            writeln!(text, "        {c}").unwrap();
        }
    }
    Ok(Report::new("verify", verdict, to_value(&report), text))
}

fn gen_cmd(class: GenClass, size: usize, seed: u64, count: usize, exhaustive: bool, out: Option<&Path>, caps: &Caps) -> Result<Report> {
    if size == 0 {
        return Err(Error::EmptyUniverse);
    }
    let mut rng = generators::rng(seed);
    let structures = |v: Vec<FiniteStructure>| v.iter().map(|x| Document::Structure(io::structure_doc(x))).collect::<Vec<_>>();
    let docs: Vec<Document> = match class {
        GenClass::Poset if exhaustive => structures(generators::exhaustive_posets(size)?),
        GenClass::Poset => structures((0..count).map(|_| generators::random_poset(size, &mut rng)).collect()),
        GenClass::Semilattice if exhaustive => structures(generators::exhaustive_semilattices(size)?),
        GenClass::Semilattice => structures((0..count).map(|_| generators::random_semilattice(size, &mut rng)).collect()),
        GenClass::Dlattice if exhaustive => {
            structures(generators::exhaustive_posets(size)?.iter().map(generators::downset_lattice).collect())
        }
        GenClass::Dlattice => structures(
            (0..count)
                .map(|_| generators::downset_lattice(&generators::random_poset(size, &mut rng)))
                .collect(),
        ),
        GenClass::Family => (0..count)
            .map(|_| {
                let sets = rand::Rng::gen_range(&mut rng, 1..=2 * size);
                Document::Family(io::family_doc(&generators::random_family(size, sets, &mut rng)))
            })
            .collect(),
        GenClass::Betweenness if exhaustive => structures(vec![generators::minimal_betweenness(size)]),
        GenClass::Betweenness => structures((0..count).map(|_| generators::random_betweenness(size, &mut rng)).collect()),
        GenClass::Biconvexity => {
            let mut docs = Vec::new();
            for _ in 0..count {
                if let Some(s) = convexity::random_normal(size, 200, &mut rng, caps)? {
                    docs.push(Document::Biconvexity(io::biconvexity_doc(&s)));
                }
            }
            docs
        }
    };
    let generator = format!("{class:?}").to_lowercase();
    let meta = CorpusMeta {
        seed,
        generator: generator.clone(),
        prng: PRNG_ALGORITHM.to_string(),
        params: BTreeMap::from([
            ("size".to_string(), size as u64),
            ("count".to_string(), count as u64),
            ("exhaustive".to_string(), exhaustive as u64),
        ]),
    };
    let corpus = io::corpus_to_jsonl(&meta, &docs)?;
    let body = json!({ "generator": generator, "documents": docs.len(), "path": out.map(|p| p.display().to_string()) });
    let text = format!("{} {} documents", docs.len(), generator);
    let mut report = Report::new("gen", Verdict::Pass, body, text);
    match out {
        Some(path) => fs::write(path, corpus).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?,
        None => report.raw = Some(corpus),
    }
    Ok(report)
}
