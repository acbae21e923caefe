use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use ultragreedoid::greedoid::{
    check_greedoid_axioms, check_prefix_theorem, max_perimeter_sets, MaxPerFamily,
};
use ultragreedoid::greedy::{all_greedy_orders, greedy_order, GreedyTrace, ALL_ORDERS_CAP};
use ultragreedoid::io::{self, parse_family, parse_triple};
use ultragreedoid::oracle::{
    brute_all_permutation_perimeters, brute_dist_r, brute_max_perimeter, DIST_CAP, PERMUTATION_CAP,
    SUBSET_CAP,
};
use ultragreedoid::perimeter::{dist_r, per_r_ordered, per_r_set, profile, MonotoneFamily};
use ultragreedoid::property_s::{
    check_s1, check_s2, reconstruct_f, verify_reconstruction, DistFunctional, FamilyDist, Farthest,
    Nearest, RRemoved,
};
use ultragreedoid::{PointSet, Rat, UltraTriple};

use crate::{Command, Common, DistKind, FamilyArgs, FunctionalArgs, Ties};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Domain(ultragreedoid::Error),
    #[error("{0}")]
    Falsified(String),
    #[error("{0}")]
    Argument(String),
}

impl From<ultragreedoid::Error> for CommandError {
    fn from(e: ultragreedoid::Error) -> Self {
        if e.is_falsification() {
            CommandError::Falsified(e.to_string())
        } else {
            CommandError::Domain(e)
        }
    }
}

type CmdResult<T> = Result<T, CommandError>;

pub struct Outcome {
    pub results: Value,
    pub verification: Option<Value>,
    /// False when an oracle disagreed or a theorem check failed.
    pub sound: bool,
}

/// SHA-256 over every input file, in the order read.
#[derive(Default)]
pub struct Digest {
    hasher: Option<Sha256>,
}

impl Digest {
    fn read(&mut self, path: &Path) -> CmdResult<String> {
        let bytes = std::fs::read(path).map_err(|source| CommandError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.hasher.get_or_insert_with(Sha256::new).update(&bytes);
        String::from_utf8(bytes)
            .map_err(|_| CommandError::Argument(format!("{} is not valid UTF-8", path.display())))
    }

    pub fn finish(self) -> Value {
        match self.hasher {
            Some(h) => Value::String(format!("sha256:{:x}", h.finalize())),
            None => Value::Null,
        }
    }
}

/// Oracle comparisons for one command.
#[derive(Default)]
struct Checks {
    items: Vec<Value>,
    agree: bool,
    any: bool,
}

impl Checks {
    fn new() -> Self {
        Checks {
            agree: true,
            ..Default::default()
        }
    }

    fn compare(&mut self, name: impl Into<String>, ours: Value, oracle: Value) {
        let ok = ours == oracle;
        self.agree &= ok;
        self.any = true;
        self.items
            .push(json!({"check": name.into(), "agree": ok, "result": ours, "oracle": oracle}));
    }

    fn skip(&mut self, name: impl Into<String>, reason: String) {
        self.items
            .push(json!({"check": name.into(), "skipped": reason}));
    }

    fn into_outcome(self, results: Value, verify: bool, sound: bool) -> Outcome {
        let verification = verify.then(|| {
            json!({
                "oracle_agreement": self.agree,
                "checked": self.any,
                "checks": self.items,
            })
        });
        Outcome {
            results,
            verification,
            sound: sound && self.agree,
        }
    }
}

fn labels(list: &str) -> Vec<&str> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn load(common: &Common, digest: &mut Digest) -> CmdResult<UltraTriple> {
    Ok(parse_triple(&digest.read(&common.input)?)?)
}

pub fn run(cmd: &Command, digest: &mut Digest) -> CmdResult<Outcome> {
    match cmd {
        Command::Validate(common) => validate(common, digest),
        Command::Dist {
            common,
            set,
            point,
            r,
        } => dist(common, digest, set, point, *r),
        Command::Perimeter {
            common,
            set,
            r,
            ordered,
        } => perimeter(common, digest, set, *r, *ordered),
        Command::Order { common, r, m, ties } => order(common, digest, *r, *m, *ties),
        Command::Signature { common, r, m } => signature(common, digest, *r, *m),
        Command::Maxsets(args) => maxsets(args, digest),
        Command::Greedoid(args) => greedoid(args, digest),
        Command::PrefixCheck { common, set, r } => prefix_check(common, digest, set, *r),
        Command::Props {
            common,
            functional,
            size_cap,
        } => props(common, functional, *size_cap, digest),
        Command::Reconstruct {
            functional,
            p,
            mmax,
            domain,
            verify,
        } => reconstruct(functional, *p, *mmax, domain, *verify, digest),
    }
}

fn validate(common: &Common, digest: &mut Digest) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let generic = io::triple_to_json(&t);
    let mut checks = Checks::new();
    if common.verify {
        let again = parse_triple(&generic.to_string())?;
        checks.compare("reload of the generic form", json!(true), json!(again == t));
    }
    let results = json!({
        "points": t.labels(),
        "ultrametric": true,
        "triple": generic,
    });
    Ok(checks.into_outcome(results, common.verify, true))
}

fn dist(
    common: &Common,
    digest: &mut Digest,
    set: &str,
    point: &str,
    r: usize,
) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let c = t.set_of(&labels(set))?;
    let v = t.point(point)?;
    let value = dist_r(&t, c, v, r)?;
    let prof = profile(&t, c, v)?;
    let mut checks = Checks::new();
    if common.verify {
        if c.len() <= DIST_CAP {
            let oracle = brute_dist_r(&t, c, v, r)?;
            checks.compare("dist_r", io::rat_json(&value), io::rat_json(&oracle.value));
        } else {
            checks.skip(
                "dist_r",
                format!("|C| exceeds the oracle cap of {DIST_CAP}"),
            );
        }
    }
    let results = json!({
        "value": io::rat_json(&value),
        "profile": io::rats_json(prof.values()),
    });
    Ok(checks.into_outcome(results, common.verify, true))
}

fn perimeter(
    common: &Common,
    digest: &mut Digest,
    set: &str,
    r: usize,
    ordered: bool,
) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let names = labels(set);
    let (value, members) = if ordered {
        let seq = t.seq_of(&names)?;
        (
            per_r_ordered(&t, &seq, r)?,
            seq.iter().collect::<PointSet>(),
        )
    } else {
        let a = t.set_of(&names)?;
        (per_r_set(&t, a, r)?, a)
    };
    let mut checks = Checks::new();
    if common.verify {
        if members.len() <= PERMUTATION_CAP {
            let all = brute_all_permutation_perimeters(&t, members, r)?;
            let oracle: Vec<Value> = all.iter().map(io::rat_json).collect();
            checks.compare(
                "perimeter over every ordering",
                json!([io::rat_json(&value)]),
                Value::Array(oracle),
            );
        } else {
            checks.skip(
                "perimeter over every ordering",
                format!("|A| exceeds the oracle cap of {PERMUTATION_CAP}"),
            );
        }
    }
    Ok(checks.into_outcome(io::rat_json(&value), common.verify, true))
}

/// Compares every prefix of `traces` against the brute-force maximum.
fn check_prefixes(
    t: &UltraTriple,
    traces: &[GreedyTrace],
    r: usize,
    checks: &mut Checks,
) -> CmdResult<()> {
    if t.len() > SUBSET_CAP {
        checks.skip(
            "greedy prefixes",
            format!("n exceeds the oracle cap of {SUBSET_CAP}"),
        );
        return Ok(());
    }
    let m = traces.iter().map(GreedyTrace::len).max().unwrap_or(0);
    let oracle: Vec<Rat> = (0..=m)
        .map(|k| brute_max_perimeter(t, k, r).map(|o| o.value))
        .collect::<Result<_, _>>()?;
    for (i, tr) in traces.iter().enumerate() {
        let ours: Vec<Rat> = (0..=tr.len()).map(|k| tr.prefix_perimeter(k)).collect();
        checks.compare(
            format!("prefix perimeters of trace {i}"),
            io::rats_json(&ours),
            io::rats_json(&oracle[..=tr.len()]),
        );
    }
    Ok(())
}

fn order(
    common: &Common,
    digest: &mut Digest,
    r: usize,
    m: Option<usize>,
    ties: Ties,
) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let m = m.unwrap_or(t.len());
    let traces = match ties {
        Ties::First => vec![greedy_order(&t, t.ground(), m, r)?],
        Ties::All => all_greedy_orders(&t, t.ground(), m, r)?,
    };
    let mut checks = Checks::new();
    if common.verify {
        check_prefixes(&t, &traces, r, &mut checks)?;
    }
    let results = match ties {
        Ties::First => io::trace_json(&t, &traces[0]),
        Ties::All => json!({
            "count": traces.len(),
            "traces": traces.iter().map(|tr| io::trace_json(&t, tr)).collect::<Vec<_>>(),
        }),
    };
    Ok(checks.into_outcome(results, common.verify, true))
}

fn signature(
    common: &Common,
    digest: &mut Digest,
    r: usize,
    m: Option<usize>,
) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let m = m.unwrap_or(t.len());
    let trace = greedy_order(&t, t.ground(), m, r)?;
    let mut checks = Checks::new();
    if common.verify {
        check_prefixes(&t, std::slice::from_ref(&trace), r, &mut checks)?;
        if t.len() <= ALL_ORDERS_CAP {
            let all = all_greedy_orders(&t, t.ground(), m, r)?;
            let signatures: BTreeSet<Vec<Rat>> = all.into_iter().map(|tr| tr.increments).collect();
            let others: Vec<Value> = signatures.iter().map(|s| io::rats_json(s)).collect();
            checks.compare(
                "increments of every greedy ordering",
                json!([io::rats_json(&trace.increments)]),
                Value::Array(others),
            );
        } else {
            checks.skip(
                "increments of every greedy ordering",
                format!("n exceeds {ALL_ORDERS_CAP}"),
            );
        }
    }
    Ok(checks.into_outcome(io::rats_json(&trace.increments), common.verify, true))
}

fn family_checks(
    t: &UltraTriple,
    fam: &MaxPerFamily,
    r: usize,
    checks: &mut Checks,
) -> CmdResult<()> {
    if t.len() > SUBSET_CAP {
        checks.skip(
            "maximum-perimeter sets",
            format!("n exceeds the oracle cap of {SUBSET_CAP}"),
        );
        return Ok(());
    }
    for (k, sets) in fam.family.by_size.iter().enumerate() {
        let oracle = brute_max_perimeter(t, k, r)?;
        let ours: Vec<Value> = io::sorted_members(sets)
            .iter()
            .map(|s| io::seq_json(t, s))
            .collect();
        let theirs: Vec<Value> = oracle
            .witnesses
            .iter()
            .map(|w| io::seq_json(t, w))
            .collect();
        checks.compare(
            format!("size {k}"),
            json!({"value": io::rat_json(&fam.max_value[k]), "sets": ours}),
            json!({"value": io::rat_json(&oracle.value), "sets": theirs}),
        );
    }
    Ok(())
}

fn load_family(args: &FamilyArgs, digest: &mut Digest) -> CmdResult<(UltraTriple, MaxPerFamily)> {
    let t = load(&args.common, digest)?;
    let kmax = args.kmax.unwrap_or(t.len());
    let fam = max_perimeter_sets(&t, args.r, kmax, args.cap)?;
    Ok((t, fam))
}

fn maxsets(args: &FamilyArgs, digest: &mut Digest) -> CmdResult<Outcome> {
    let (t, fam) = load_family(args, digest)?;
    let mut checks = Checks::new();
    if args.common.verify {
        family_checks(&t, &fam, args.r, &mut checks)?;
    }
    Ok(checks.into_outcome(io::max_family_json(&t, &fam), args.common.verify, true))
}

fn greedoid(args: &FamilyArgs, digest: &mut Digest) -> CmdResult<Outcome> {
    let (t, fam) = load_family(args, digest)?;
    let report = check_greedoid_axioms(&fam.family);
    let mut checks = Checks::new();
    if args.common.verify {
        family_checks(&t, &fam, args.r, &mut checks)?;
    }
    let results = io::axiom_report_json(&t, &report);
    Ok(checks.into_outcome(results, args.common.verify, report.all_hold()))
}

fn prefix_check(common: &Common, digest: &mut Digest, set: &str, r: usize) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let a = t.set_of(&labels(set))?;
    let trace = check_prefix_theorem(&t, t.ground(), a, r)?;
    let mut checks = Checks::new();
    if common.verify {
        check_prefixes(&t, std::slice::from_ref(&trace), r, &mut checks)?;
        checks.compare(
            "prefix set",
            io::set_json(&t, trace.prefix_set(a.len())),
            io::set_json(&t, a),
        );
    }
    Ok(checks.into_outcome(io::trace_json(&t, &trace), common.verify, true))
}

enum Functional {
    R(usize),
    Nearest,
    Farthest,
    Family(MonotoneFamily),
}

impl Functional {
    fn load(args: &FunctionalArgs, digest: &mut Digest) -> CmdResult<Self> {
        match (args.dist, &args.family) {
            (DistKind::R, _) => Ok(Functional::R(args.r)),
            (DistKind::Nearest, _) => Ok(Functional::Nearest),
            (DistKind::Farthest, _) => Ok(Functional::Farthest),
            (DistKind::Family, Some(path)) => {
                Ok(Functional::Family(parse_family(&digest.read(path)?)?))
            }
            (DistKind::Family, None) => Err(CommandError::Argument(
                "--dist family needs --family <path>".into(),
            )),
        }
    }

    fn as_dyn(&self) -> Box<dyn DistFunctional + '_> {
        match self {
            Functional::R(r) => Box::new(RRemoved(*r)),
            Functional::Nearest => Box::new(Nearest),
            Functional::Farthest => Box::new(Farthest),
            Functional::Family(f) => Box::new(FamilyDist(f.clone())),
        }
    }

    /// Whether the functional is known to satisfy both properties.
    fn guaranteed(&self) -> bool {
        !matches!(self, Functional::Farthest)
    }
}

fn props(
    common: &Common,
    functional: &FunctionalArgs,
    size_cap: usize,
    digest: &mut Digest,
) -> CmdResult<Outcome> {
    let t = load(common, digest)?;
    let g = Functional::load(functional, digest)?;
    let dist = g.as_dyn();
    let s1 = check_s1(&t, dist.as_ref(), size_cap)?;
    let s2 = check_s2(&t, dist.as_ref(), size_cap)?;
    let mut checks = Checks::new();
    if common.verify {
        match &g {
            Functional::R(r) => {
                let ground = t.ground();
                let mut mismatches = 0usize;
                let mut compared = 0usize;
                for k in 0..=size_cap.min(t.len()).min(DIST_CAP) {
                    for c in ground.subsets_of_size(k) {
                        for v in ground.difference(c) {
                            compared += 1;
                            if dist_r(&t, c, v, *r)? != brute_dist_r(&t, c, v, *r)?.value {
                                mismatches += 1;
                            }
                        }
                    }
                }
                checks.compare(
                    format!("dist_r on {compared} (C, v) pairs"),
                    json!({"mismatches": mismatches}),
                    json!({"mismatches": 0}),
                );
            }
            _ => checks.skip(
                "distance values",
                "no independent oracle for this functional".into(),
            ),
        }
    }
    let holds = s1.is_empty() && s2.is_empty();
    let results = json!({
        "s1": {"holds": s1.is_empty(), "counterexamples": s1.iter().map(|e| io::s_counterexample_json(&t, e)).collect::<Vec<_>>()},
        "s2": {"holds": s2.is_empty(), "counterexamples": s2.iter().map(|e| io::s_counterexample_json(&t, e)).collect::<Vec<_>>()},
        "size_cap": size_cap,
    });
    Ok(checks.into_outcome(results, common.verify, holds || !g.guaranteed()))
}

fn reconstruct(
    functional: &FunctionalArgs,
    p: u64,
    mmax: usize,
    domain: &str,
    verify: bool,
    digest: &mut Digest,
) -> CmdResult<Outcome> {
    let domain: Vec<i64> = labels(domain)
        .iter()
        .map(|s| {
            s.parse().map_err(|_| {
                CommandError::Argument(format!("domain value `{s}` is not an integer"))
            })
        })
        .collect::<CmdResult<_>>()?;
    let g = Functional::load(functional, digest)?;
    let dist = g.as_dyn();
    let fam = reconstruct_f(dist.as_ref(), p, mmax, &domain)?;
    let mismatch = verify_reconstruction(dist.as_ref(), &fam, p, mmax, &domain)?;
    let verified_to = if mismatch.is_some() { 0 } else { mmax };

    let mut checks = Checks::new();
    if verify {
        let expected: Option<MonotoneFamily> = match &g {
            Functional::R(r) => {
                let dom: Vec<Rat> = fam.domain.iter().map(|&d| Rat::from_int(d)).collect();
                let id = ultragreedoid::MonotoneTable::identity_on(&dom);
                Some(MonotoneFamily::step(&id, *r, mmax)?)
            }
            Functional::Family(f) => Some(f.clone()),
            Functional::Nearest => {
                let dom: Vec<Rat> = fam.domain.iter().map(|&d| Rat::from_int(d)).collect();
                let id = ultragreedoid::MonotoneTable::identity_on(&dom);
                let zero = ultragreedoid::MonotoneTable::constant_on(&dom, &Rat::zero());
                let levels = (1..=mmax)
                    .map(|m| if m == 1 { id.clone() } else { zero.clone() })
                    .collect();
                Some(MonotoneFamily::new(levels)?)
            }
            Functional::Farthest => None,
        };
        match expected {
            Some(f) => {
                for (m, table) in fam.tables.iter().enumerate() {
                    let ours: Vec<Value> = table
                        .iter()
                        .map(|(d, v)| json!([d.to_string(), v.to_string()]))
                        .collect();
                    let theirs: Vec<Value> = match f.tables().get(m) {
                        Some(level) => table
                            .keys()
                            .map(|d| {
                                let v = level.eval(&Rat::from_int(*d))?;
                                Ok(json!([d.to_string(), v.to_string()]))
                            })
                            .collect::<CmdResult<_>>()?,
                        None => Vec::new(),
                    };
                    checks.compare(
                        format!("level {}", m + 1),
                        Value::Array(ours),
                        Value::Array(theirs),
                    );
                }
            }
            None => checks.skip(
                "level tables",
                "no reference family for this functional".into(),
            ),
        }
    }
    let results = io::reconstruction_json(&fam, verified_to, mismatch.as_ref());
    let sound = !g.guaranteed() || (fam.monotone && mismatch.is_none());
    Ok(checks.into_outcome(results, verify, sound))
}
