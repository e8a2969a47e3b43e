use std::io::Read;
use std::path::Path;

use serde_json::{json, Map, Value};

use polymat::expansion::BlockCounts;
use polymat::ground::{GroundSet, SubsetMask};
use polymat::polymatroid::elemental_violations;
use polymat::reproduce::{reproduce, Fixtures};
use polymat::secret_sharing::{important_bound_check, realizes, sigma, DensePort, ExpandedPort};
use polymat::{
    helgason_expand, mmrv_with_roles, AccessStructure, AnyRankVector, Error, JointDistribution, Matroid, Polymatroid,
    Rank, RankVector, Result, Roles, Strategy,
};

use crate::{Command, Common, Format};

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::NotPolymatroid(_) | Error::NotAMatroid(_) => 1,
        _ => 2,
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, code: 0 }
    }

    fn verdict(text: String, holds: bool) -> Output {
        Output { text, code: if holds { 0 } else { 1 } }
    }
}

macro_rules! with_rank {
    ($any:expr, |$r:ident| $body:expr) => {
        match $any {
            AnyRankVector::Int($r) => $body,
            AnyRankVector::Float($r) => $body,
        }
    };
}

pub fn run(command: Command) -> Result<u8> {
    let (out, path) = match command {
        Command::Validate(c) => (with_rank!(load_rank(&c)?, |r| validate(r, &c)), c.out),
        Command::Dual(c) => (with_rank!(load_rank(&c)?, |r| rank_output(&valid(r, &c)?.dual(), &c)), c.out),
        Command::Tighten(c) => (with_rank!(load_rank(&c)?, |r| rank_output(&valid(r, &c)?.tighten(), &c)), c.out),
        Command::Entropy(c) => {
            let dist = JointDistribution::from_json_str(&read_input(&c.input)?)?;
            (rank_output(&dist.entropy_vector(), &c), c.out)
        }
        Command::Mmrv { common: c, roles } => {
            (with_rank!(load_rank(&c)?, |r| mmrv_cmd(valid(r, &c)?, roles.as_deref(), &c)?), c.out)
        }
        Command::Split { common: c, element, alphas, labels } => {
            let out =
                with_rank!(load_rank(&c)?, |r| split_cmd(valid(r, &c)?, &element, &alphas, labels.as_deref(), &c)?);
            (out, c.out)
        }
        Command::Extend { common: c, element, alpha, label } => {
            let out =
                with_rank!(load_rank(&c)?, |r| extend_cmd(valid(r, &c)?, &element, &alpha, label.as_deref(), &c)?);
            (out, c.out)
        }
        Command::Expand { common: c, dual, rank, roles, dense } => {
            (expand_cmd(&c, dual, rank.as_deref(), roles.as_deref(), dense)?, c.out)
        }
        Command::Circuits { common: c, classes } => (circuits_cmd(&c, classes)?, c.out),
        Command::Port { common: c, secret, expanded, dual, query } => {
            (port_cmd(&c, &secret, expanded, dual, query.as_deref())?, c.out)
        }
        Command::AccessDual(c) => {
            let a = load_access(&c.input)?;
            let d = a.dual().to_explicit()?;
            let text = match c.format {
                Format::Json => d.to_json_string(),
                Format::Table => d
                    .minimal_qualified()
                    .into_iter()
                    .map(|m| format!("{{{}}}\n", d.participants().format_subset(m)))
                    .collect(),
            };
            (Output::ok(text), c.out)
        }
        Command::Realizes { common: c, secret, access } => {
            let a = AccessStructure::load(&access)?;
            (with_rank!(load_rank(&c)?, |r| realizes_cmd(valid(r, &c)?, &secret, &a, &c)?), c.out)
        }
        Command::Sigma { common: c, secret, access } => {
            let a = access.map(AccessStructure::load).transpose()?;
            (with_rank!(load_rank(&c)?, |r| sigma_cmd(valid(r, &c)?, &secret, a.as_ref(), &c)?), c.out)
        }
        Command::Reproduce { step, data, format, out } => {
            let fixtures = match data {
                Some(dir) => Fixtures::from_dir(dir)?,
                None => Fixtures::bundled(),
            };
            let report = reproduce(&fixtures, step)?;
            let text = match format {
                Format::Json => report.to_json_string(),
                Format::Table => format!("{report}\n"),
            };
            (Output::verdict(text, report.passed), out)
        }
    };
    emit(&out.text, path.as_deref())?;
    Ok(out.code)
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }
}

fn load_rank(c: &Common) -> Result<AnyRankVector> {
    AnyRankVector::from_json_str(&read_input(&c.input)?)
}

fn load_int(c: &Common) -> Result<Polymatroid<i64>> {
    Polymatroid::validate(load_rank(c)?.into_int()?, 0.0)
}

fn load_access(path: &Path) -> Result<AccessStructure> {
    if path == Path::new("-") {
        AccessStructure::from_json_str(&read_input(path)?, Path::new("."))
    } else {
        AccessStructure::load(path)
    }
}

fn valid<T: Rank>(r: RankVector<T>, c: &Common) -> Result<Polymatroid<T>> {
    Polymatroid::validate(r, c.tolerance)
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn rank_output<T: Rank>(p: &Polymatroid<T>, c: &Common) -> Output {
    Output::ok(rank_text(p.rank_vector(), c.format))
}

fn rank_text<T: Rank>(r: &RankVector<T>, format: Format) -> String {
    match format {
        Format::Json => r.to_json_string(),
        Format::Table => r
            .ordered_subsets()
            .into_iter()
            .map(|s| format!("{:<12} {}\n", r.ground().format_subset(s), r.get(s)))
            .collect(),
    }
}

fn validate<T: Rank>(r: RankVector<T>, c: &Common) -> Output {
    let report = elemental_violations(&r, c.tolerance, Strategy::default());
    let text = match c.format {
        Format::Json => to_json(&json!({ "valid": report.is_empty(), "violations": report })),
        Format::Table if report.is_empty() => "valid polymatroid\n".to_string(),
        Format::Table => format!("{report}\n"),
    };
    Output::verdict(text, report.is_empty())
}

fn roles_for(ground: &GroundSet, roles: Option<&str>) -> Result<Roles> {
    match roles {
        Some(spec) => Roles::from_labels(ground, spec),
        None => Roles::positional(ground),
    }
}

fn number<T: Rank>(v: T, format: Format) -> String {
    match (format, T::MODE) {
        (Format::Table, polymat::Mode::Float) => format!("{:.6}", v.to_f64()),
        _ => v.to_string(),
    }
}

fn mmrv_cmd<T: Rank>(p: Polymatroid<T>, roles: Option<&str>, c: &Common) -> Result<Output> {
    let roles = roles_for(p.ground(), roles)?;
    let v = mmrv_with_roles(&p, &roles)?;
    let holds = v.nonneg_within(c.tolerance);
    let text = match c.format {
        Format::Json => to_json(&json!({ "mmrv": v.to_json(), "violated": !holds })),
        Format::Table => format!("{}\n", number(v, c.format)),
    };
    Ok(Output::verdict(text, holds))
}

fn parse_value<T: Rank>(text: &str) -> Result<T> {
    serde_json::from_str::<Value>(text.trim())
        .ok()
        .and_then(|v| T::from_json(&v))
        .ok_or_else(|| Error::Usage(format!("{text:?} is not a valid {} value", T::MODE.name())))
}

fn split_cmd<T: Rank>(
    p: Polymatroid<T>,
    element: &str,
    alphas: &str,
    labels: Option<&str>,
    c: &Common,
) -> Result<Output> {
    let a = p.ground().index(element)?;
    let (x, y) =
        alphas.split_once(',').ok_or_else(|| Error::Usage("--alphas takes two comma-separated values".into()))?;
    let default = format!("{element}1,{element}2");
    let (l1, l2) = labels
        .unwrap_or(&default)
        .split_once(',')
        .ok_or_else(|| Error::Usage("--labels takes two comma-separated labels".into()))?;
    let q = p.split_atom(a, parse_value(x)?, parse_value(y)?, [l1.trim(), l2.trim()], c.tolerance)?;
    Ok(rank_output(&q, c))
}

fn extend_cmd<T: Rank>(
    p: Polymatroid<T>,
    element: &str,
    alpha: &str,
    label: Option<&str>,
    c: &Common,
) -> Result<Output> {
    let a = p.ground().index(element)?;
    let default = format!("{element}'");
    let q = p.principal_extension(a, parse_value(alpha)?, label.unwrap_or(&default))?;
    Ok(rank_output(&q, c))
}

fn counts_json(blocks: &GroundSet, counts: &BlockCounts) -> Value {
    let mut m = Map::new();
    for (i, &k) in counts.0.iter().enumerate() {
        m.insert(blocks.label(i).to_string(), Value::from(k));
    }
    Value::Object(m)
}

fn expand_cmd(c: &Common, dual: bool, rank: Option<&str>, roles: Option<&str>, dense: bool) -> Result<Output> {
    let base = load_int(c)?;
    let mut e = helgason_expand(&base)?;
    if dual {
        e = e.dual();
    }
    if dense {
        return Ok(rank_output(&e.to_dense()?, c));
    }
    let mut out = Map::new();
    out.insert("dualized".into(), Value::from(dual));
    out.insert("elements".into(), Value::from(e.element_count()));
    out.insert("blocks".into(), counts_json(e.blocks(), &e.full_counts()));
    out.insert("rank".into(), Value::from(e.rank(&e.full_counts())?));
    let mut lines = vec![format!("elements {}", e.element_count()), format!("rank {}", e.rank(&e.full_counts())?)];
    if let Some(sel) = rank {
        let counts = e.parse_selection(sel)?;
        let r = e.rank(&counts)?;
        out.insert("selection".into(), counts_json(e.blocks(), &counts));
        out.insert("selection_rank".into(), Value::from(r));
        lines.push(format!("rank({sel}) {r}"));
    }
    let mut holds = true;
    if let Some(spec) = roles {
        let v = e.mmrv(&Roles::from_labels(e.blocks(), spec)?)?;
        holds = v >= 0;
        out.insert("mmrv".into(), Value::from(v));
        lines.push(format!("mmrv {v}"));
    }
    let text = match c.format {
        Format::Json => to_json(&Value::Object(out)),
        Format::Table => lines.iter().map(|l| format!("{l}\n")).collect(),
    };
    Ok(Output::verdict(text, holds))
}

fn sets_json(ground: &GroundSet, sets: &[SubsetMask]) -> Value {
    Value::from(sets.iter().map(|&s| Value::from(ground.subset_labels(s))).collect::<Vec<_>>())
}

fn sets_table(ground: &GroundSet, sets: &[SubsetMask]) -> String {
    sets.iter().map(|&s| format!("{}\n", ground.format_subset(s))).collect()
}

fn circuits_cmd(c: &Common, classes: bool) -> Result<Output> {
    let m = Matroid::new(load_int(c)?)?;
    let g = m.ground().clone();
    let text = if classes {
        let cls = m.circuit_classes()?;
        match c.format {
            Format::Json => to_json(&json!({ "classes": sets_json(&g, &cls), "connected": cls.len() == 1 })),
            Format::Table => sets_table(&g, &cls),
        }
    } else {
        let circuits = m.circuits()?;
        match c.format {
            Format::Json => to_json(&json!({ "circuits": sets_json(&g, &circuits) })),
            Format::Table => sets_table(&g, &circuits),
        }
    };
    Ok(Output::ok(text))
}

fn qualified_output(query: &str, q: bool, format: Format) -> Output {
    let text = match format {
        Format::Json => to_json(&json!({ "query": query, "qualified": q })),
        Format::Table => format!("{}\n", if q { "qualified" } else { "unqualified" }),
    };
    Output::verdict(text, q)
}

fn port_cmd(c: &Common, secret: &str, expanded: bool, dual: bool, query: Option<&str>) -> Result<Output> {
    let base = load_int(c)?;
    if !expanded {
        if dual {
            return Err(Error::Usage("--dual applies to --expanded ports; use access-dual".into()));
        }
        let port = DensePort::new(base.clone(), base.ground().index(secret)?)?;
        return Ok(match query {
            Some(q) => qualified_output(q, port.is_qualified(port.participants().parse_subset(q)?), c.format),
            None => {
                let e = AccessStructure::Port(port).to_explicit()?;
                match c.format {
                    Format::Json => Output::ok(e.to_json_string()),
                    Format::Table => Output::ok(sets_table(e.participants(), &e.minimal_qualified())),
                }
            }
        });
    }
    let mut e = helgason_expand(&base)?;
    if dual {
        e = e.dual();
    }
    let s = e.parse_selection(secret)?;
    if s.total() != 1 {
        return Err(Error::InvalidSelection(format!("secret {secret:?} must name exactly one element")));
    }
    let block = s.0.iter().position(|&k| k == 1).expect("one element selected");
    let port = ExpandedPort::new(e, block)?;
    match query {
        Some(q) => {
            let counts = port.expansion().parse_selection(q)?;
            Ok(qualified_output(q, port.is_qualified(&counts)?, c.format))
        }
        None => {
            let blocks = port.expansion().blocks();
            let v = json!({
                "participants": port.participant_count(),
                "secret_block": blocks.label(block),
                "available": counts_json(blocks, &port.all_participants()),
            });
            Ok(Output::ok(match c.format {
                Format::Json => to_json(&v),
                Format::Table => format!("participants {}\n", port.participant_count()),
            }))
        }
    }
}

fn realizes_cmd<T: Rank>(p: Polymatroid<T>, secret: &str, a: &AccessStructure, c: &Common) -> Result<Output> {
    let s = p.ground().index(secret)?;
    let r = realizes(&p, s, a, c.tolerance)?;
    let participants = p.ground().without(s)?;
    let counterexample = r.counterexample.map(|m| participants.subset_labels(m));
    let text = match c.format {
        Format::Json => to_json(&json!({ "realizes": r.holds(), "counterexample": counterexample })),
        Format::Table => match r.counterexample {
            None => "realizes\n".to_string(),
            Some(m) => format!("does not realize; fails at {{{}}}\n", participants.format_subset(m)),
        },
    };
    Ok(Output::verdict(text, r.holds()))
}

fn sigma_cmd<T: Rank>(p: Polymatroid<T>, secret: &str, a: Option<&AccessStructure>, c: &Common) -> Result<Output> {
    let s = p.ground().index(secret)?;
    let value = sigma(&p, s)?;
    let mut out = Map::new();
    out.insert("sigma".into(), Value::from(value));
    out.insert("ideal".into(), Value::from((value - 1.0).abs() <= c.tolerance));
    let mut holds = true;
    if let Some(a) = a {
        let report = important_bound_check(&p, s, a, c.tolerance)?;
        holds = report.violations.is_empty();
        out.insert("important_bound".into(), serde_json::to_value(&report)?);
    }
    let text = match c.format {
        Format::Json => to_json(&Value::Object(out)),
        Format::Table => format!("{value}\n"),
    };
    Ok(Output::verdict(text, holds))
}
