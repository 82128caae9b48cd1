use std::collections::BTreeMap;
use std::fmt::Write as _;

use blockers_core::blocker_model::{corner_forbidden_region, flag_positions, l_shape_positions};
use blockers_core::cardinality::{audit, CardinalityAudit};
use blockers_core::oracle::{
    hankel_coverage, intersection_count, is_blocker, once_intersecting_avoiders, private_witnesses,
};
use blockers_core::perm_core::{avoiders, hankel_label};
use blockers_core::polytope_rank::{check_forbidden_corner, face_rank, face_rank_of_flag, FaceReport};
use blockers_core::search_engine::{
    conjecture_probe, enumerate_minimum_blockers, enumerate_resumable, Checkpoint, ConjectureReport,
    PrivateWitness, SearchConfig, SearchOutcome, DEFAULT_SEARCH_LIMIT, MAX_SEARCH_ORDER,
};
use blockers_core::{Cell, FlagSpec, Permutation, PositionSet, DEFAULT_ORDER_LIMIT};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::input::load_set;
use crate::{cache, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    Incomplete,
}

pub struct Report {
    pub body: String,
    pub status: Status,
}

pub struct Ctx {
    pub json: bool,
    pub limit: Option<usize>,
    pub use_cache: bool,
}

impl Ctx {
    fn limit(&self) -> usize {
        self.limit.unwrap_or(DEFAULT_ORDER_LIMIT)
    }

    fn warm(&self, n: usize, limit: usize) {
        if self.use_cache && n <= limit {
            cache::warm(n, limit);
        }
    }
}

fn json_body<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn report(body: String, status: Status) -> Result<Report, CliError> {
    Ok(Report { body, status })
}

fn status_if(violated: bool) -> Status {
    if violated {
        Status::Violation
    } else {
        Status::Ok
    }
}

fn fmt_cell(c: Cell) -> String {
    format!("({},{})", c.row, c.col)
}

fn describe(set: &PositionSet) -> String {
    match FlagSpec::recognize(set) {
        Some(spec) => format!("{spec}, {} cells", set.len()),
        None => format!("n = {}, {} cells", set.n(), set.len()),
    }
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Report, CliError> {
    match cmd {
        Command::Avoiders(a) => cmd_avoiders(a, ctx),
        Command::Hankel(a) => cmd_hankel(a, ctx),
        Command::Flag(a) => {
            let set = flag_positions(FlagSpec::new(a.n, a.m, a.t)?);
            emit_set(&set, ctx)
        }
        Command::Lshape(a) => emit_set(&l_shape_positions(a.n, a.s, a.r)?, ctx),
        Command::Verify(a) => cmd_verify(a, ctx),
        Command::Once(a) => cmd_once(a, ctx),
        Command::FaceRank(a) => cmd_face_rank(a, ctx),
        Command::CornerCheck(a) => cmd_corner(a, ctx),
        Command::CardAudit(a) => cmd_audit(a, ctx),
        Command::Search(a) => cmd_search(a, ctx),
        Command::Conjecture(a) => cmd_conjecture(a, ctx),
    }
}

#[derive(Serialize)]
struct AvoidersReport<'a> {
    n: usize,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    avoiders: Option<&'a [Permutation]>,
}

fn cmd_avoiders(a: &AvoidersArgs, ctx: &Ctx) -> Result<Report, CliError> {
    ctx.warm(a.n, ctx.limit());
    let list = avoiders(a.n, ctx.limit())?;
    let body = if ctx.json {
        json_body(&AvoidersReport {
            n: a.n,
            count: list.len(),
            avoiders: (!a.count_only).then_some(&list[..]),
        })
    } else if a.count_only {
        format!("{}\n", list.len())
    } else {
        list.iter().map(|p| format!("{p}\n")).collect()
    };
    report(body, Status::Ok)
}

#[derive(Serialize)]
struct HankelReport {
    n: usize,
    labels: Vec<Vec<usize>>,
}

fn cmd_hankel(a: &OrderArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let n = a.n;
    if n == 0 {
        return Err(CliError::Input("order must be at least 1".into()));
    }
    let labels: Vec<Vec<usize>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| hankel_label(n, i, j).map(|l| l.value()))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if ctx.json {
        return report(json_body(&HankelReport { n, labels }), Status::Ok);
    }
    let mut body = String::new();
    let width = (n - 1).to_string().len();
    for row in &labels {
        let line: Vec<String> = if n <= 26 {
            row.iter()
                .map(|&l| char::from(b'a' + l as u8).to_string())
                .collect()
        } else {
            row.iter().map(|l| format!("{l:>width$}")).collect()
        };
        body.push_str(&line.join(if n <= 26 { "" } else { " " }));
        body.push('\n');
    }
    report(body, Status::Ok)
}

fn emit_set(set: &PositionSet, ctx: &Ctx) -> Result<Report, CliError> {
    let body = if ctx.json { json_body(set) } else { set.to_grid() };
    report(body, Status::Ok)
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    cardinality: usize,
    flag: Option<FlagSpec>,
    is_blocker: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Permutation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_minimum: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    private_witnesses: Option<Vec<PrivateWitness>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    redundant_cells: Option<Vec<Cell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_minimal: Option<bool>,
    hankel_coverage: Vec<usize>,
}

fn cmd_verify(a: &VerifyArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let set = load_set(&a.set)?;
    let limit = ctx.limit();
    ctx.warm(set.n(), limit);
    let verdict = is_blocker(&set, limit)?;
    if let Some(w) = &verdict.witness {
        // the witness has to stand on its own
        if w.contains_123() || intersection_count(w, &set)? != 0 {
            return Err(CliError::Internal(format!("witness {w} failed re-verification")));
        }
    }
    let mut rep = VerifyReport {
        n: set.n(),
        cardinality: set.len(),
        flag: FlagSpec::recognize(&set),
        is_blocker: verdict.is_blocker,
        witness: verdict.witness,
        is_minimum: None,
        private_witnesses: None,
        redundant_cells: None,
        is_minimal: None,
        hankel_coverage: hankel_coverage(&set),
    };
    if a.minimum {
        if verdict.is_blocker {
            let found = private_witnesses(&set, limit)?;
            rep.redundant_cells = Some(set.iter().filter(|c| !found.contains_key(c)).collect());
            rep.is_minimum = Some(found.len() == set.len());
            rep.private_witnesses = Some(
                found
                    .into_iter()
                    .map(|(cell, witness)| PrivateWitness { cell, witness })
                    .collect(),
            );
        } else {
            rep.is_minimum = Some(false);
        }
    }
    if a.minimal {
        rep.is_minimal = Some(verdict.is_blocker && set.len() == set.n());
    }
    let violated = !rep.is_blocker || rep.is_minimum == Some(false) || rep.is_minimal == Some(false);
    if ctx.json {
        return report(json_body(&rep), status_if(violated));
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut body = format!("set: {}\nblocker: {}\n", describe(&set), yes(rep.is_blocker));
    if let Some(w) = &rep.witness {
        let _ = writeln!(body, "witness: {w} avoids 123 and meets none of the cells");
    }
    if let Some(m) = rep.is_minimum {
        let _ = writeln!(body, "minimum: {}", yes(m));
        if let Some(cells) = rep.redundant_cells.as_ref().filter(|c| !c.is_empty()) {
            let list: Vec<String> = cells.iter().map(|&c| fmt_cell(c)).collect();
            let _ = writeln!(body, "redundant cells: {}", list.join(" "));
        }
        for pw in rep.private_witnesses.iter().flatten() {
            let _ = writeln!(body, "  {} private witness {}", fmt_cell(pw.cell), pw.witness);
        }
    }
    if let Some(m) = rep.is_minimal {
        let _ = writeln!(
            body,
            "minimal: {} ({} cells, order {})",
            yes(m),
            set.len(),
            set.n()
        );
    }
    let cov: Vec<String> = rep.hankel_coverage.iter().map(usize::to_string).collect();
    let _ = writeln!(body, "hankel coverage: {}", cov.join(" "));
    report(body, status_if(violated))
}

#[derive(Serialize)]
struct OnceEntry {
    permutation: Permutation,
    cell: Cell,
}

#[derive(Serialize)]
struct OnceReport {
    n: usize,
    cardinality: usize,
    count: usize,
    avoiders: Vec<OnceEntry>,
}

fn cmd_once(a: &SetArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let set = load_set(a)?;
    ctx.warm(set.n(), ctx.limit());
    let list = once_intersecting_avoiders(&set, ctx.limit())?;
    let entries: Vec<OnceEntry> = list
        .into_iter()
        .map(|p| {
            let cell = p.cells().find(|&c| set.contains(c)).expect("meets the set once");
            OnceEntry { permutation: p, cell }
        })
        .collect();
    let rep = OnceReport {
        n: set.n(),
        cardinality: set.len(),
        count: entries.len(),
        avoiders: entries,
    };
    if ctx.json {
        return report(json_body(&rep), Status::Ok);
    }
    let mut body = format!(
        "set: {}\nonce-intersecting avoiders: {}\n",
        describe(&set),
        rep.count
    );
    for e in &rep.avoiders {
        let _ = writeln!(body, "{}  at {}", e.permutation, fmt_cell(e.cell));
    }
    report(body, Status::Ok)
}

#[derive(Serialize)]
struct FaceRankReport {
    n: usize,
    reports: Vec<FaceReport>,
}

fn face_violation(r: &FaceReport) -> bool {
    let rect = r.spec.is_some_and(|s| s.is_rectangular());
    r.within_bounds == Some(false) || (rect && r.meets_upper == Some(false))
}

fn cmd_face_rank(a: &FaceRankArgs, ctx: &Ctx) -> Result<Report, CliError> {
    if a.csv && ctx.json {
        return Err(CliError::Input("--csv and --json are mutually exclusive".into()));
    }
    let limit = ctx.limit();
    let reports = if a.all_flags {
        let n = a.set.n.expect("clap requires --n");
        ctx.warm(n, limit);
        let specs: Vec<FlagSpec> = FlagSpec::all(n).collect();
        specs
            .par_iter()
            .map(|&spec| face_rank_of_flag(spec, limit))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let set = load_set(&a.set)?;
        ctx.warm(set.n(), limit);
        vec![face_rank(&set, limit)?]
    };
    let n = reports.first().map_or(0, |r| r.n);
    let status = status_if(reports.iter().any(face_violation));
    if ctx.json {
        return report(json_body(&FaceRankReport { n, reports }), status);
    }
    let mut body = String::new();
    if a.csv {
        body.push_str(FaceReport::CSV_HEADER);
        body.push('\n');
        for r in &reports {
            body.push_str(&r.csv_row());
            body.push('\n');
        }
        return report(body, status);
    }
    for r in &reports {
        let name = r.spec.map_or_else(|| format!("n = {}", r.n), |s| s.to_string());
        let _ = write!(
            body,
            "{name}: rank {} from {} once-intersecting avoiders",
            r.rank, r.once_count
        );
        match (r.lower_bound, r.upper_bound) {
            (Some(lo), Some(hi)) => {
                let verdict = if face_violation(r) { "VIOLATED" } else { "ok" };
                let _ = writeln!(body, ", bounds [{lo}, {hi}] {verdict}");
            }
            _ => {
                let _ = writeln!(body, ", ambient rank {}", r.ambient_rank);
            }
        }
    }
    report(body, status)
}

#[derive(Serialize)]
struct CornerEntry {
    m: usize,
    t: usize,
    corner_cells: usize,
    holds: bool,
}

#[derive(Serialize)]
struct CornerReport {
    n: usize,
    checks: Vec<CornerEntry>,
}

fn cmd_corner(a: &CornerArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let limit = ctx.limit();
    let specs: Vec<FlagSpec> = match (a.m, a.t) {
        (Some(m), Some(t)) => vec![FlagSpec::new(a.n, m, t)?],
        _ => FlagSpec::all(a.n).collect(),
    };
    ctx.warm(a.n, limit);
    let checks = specs
        .par_iter()
        .map(|&spec| {
            Ok(CornerEntry {
                m: spec.m(),
                t: spec.t(),
                corner_cells: corner_forbidden_region(spec).len(),
                holds: check_forbidden_corner(spec, limit)?,
            })
        })
        .collect::<Result<Vec<_>, blockers_core::Error>>()?;
    let status = status_if(checks.iter().any(|c| !c.holds));
    let rep = CornerReport { n: a.n, checks };
    if ctx.json {
        return report(json_body(&rep), status);
    }
    let mut body = String::new();
    for c in &rep.checks {
        let verdict = if c.holds { "clear" } else { "VIOLATED" };
        let _ = writeln!(
            body,
            "B_{}({},{}): corner of {} cells {verdict}",
            rep.n, c.m, c.t, c.corner_cells
        );
    }
    report(body, status)
}

#[derive(Serialize)]
struct Discrepancy {
    n: usize,
    p: u64,
    achievable: bool,
    predicate: bool,
}

#[derive(Serialize)]
struct AuditReport {
    audits: Vec<CardinalityAudit>,
    discrepancies: Vec<Discrepancy>,
}

fn cmd_audit(a: &AuditArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let orders: Vec<usize> = match a.n {
        Some(n) => vec![n],
        None => (1..=a.max_n).collect(),
    };
    if orders.first().is_none_or(|&n| n == 0) {
        return Err(CliError::Input("orders must be at least 1".into()));
    }
    let audits: Vec<CardinalityAudit> = orders.into_iter().map(audit).collect();
    let discrepancies = audits
        .iter()
        .flat_map(|au| {
            au.discrepancies.iter().map(|&p| Discrepancy {
                n: au.n,
                p,
                achievable: au.achievable.contains(&p),
                predicate: au.paper_predicate_set.contains(&p),
            })
        })
        .collect();
    let rep = AuditReport {
        audits,
        discrepancies,
    };
    // disagreements are documented findings, not failures
    if ctx.json {
        return report(json_body(&rep), Status::Ok);
    }
    let mut body: String = rep.audits.iter().map(|au| au.table() + "\n").collect();
    if rep.discrepancies.is_empty() {
        body.push_str("discrepancies: none\n");
    } else {
        body.push_str("discrepancies:\n");
        for d in &rep.discrepancies {
            let oracle = if d.achievable {
                "achievable"
            } else {
                "not achievable"
            };
            let _ = writeln!(
                body,
                "  n = {}, p = {}: oracle {oracle}, predicate {}",
                d.n, d.p, d.predicate
            );
        }
    }
    report(body, Status::Ok)
}

fn search_config(a: &SearchArgs, ctx: &Ctx) -> SearchConfig {
    let default_limit = if a.allow_order_seven {
        MAX_SEARCH_ORDER
    } else {
        DEFAULT_SEARCH_LIMIT
    };
    SearchConfig {
        max_cardinality: a.cap,
        dedup_symmetry: !a.no_dedup,
        budget: a.budget,
        order_limit: ctx.limit.unwrap_or(default_limit),
        allow_order_seven: a.allow_order_seven,
        ..SearchConfig::new(a.n)
    }
}

fn save_checkpoint(path: &std::path::Path, cp: &Checkpoint) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, json_body(cp))?;
    std::fs::rename(&tmp, path)
}

fn cmd_search(a: &SearchArgs, ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = search_config(a, ctx);
    ctx.warm(a.n, cfg.order_limit.min(MAX_SEARCH_ORDER));
    let outcome = match &a.checkpoint {
        None => enumerate_minimum_blockers(&cfg)?,
        Some(path) => {
            let resume =
                match std::fs::read_to_string(path) {
                    Ok(text) => Some(serde_json::from_str::<Checkpoint>(&text).map_err(|e| {
                        CliError::Input(format!("invalid checkpoint {}: {e}", path.display()))
                    })?),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
                    Err(e) => return Err(CliError::Input(format!("cannot read {}: {e}", path.display()))),
                };
            let mut save_err = None;
            let (outcome, last) = enumerate_resumable(&cfg, resume, |cp| {
                if save_err.is_none() {
                    save_err = save_checkpoint(path, cp).err();
                }
            })?;
            save_checkpoint(path, &last).map_err(|e| CliError::Io(e.to_string()))?;
            if let Some(e) = save_err {
                return Err(CliError::Io(e.to_string()));
            }
            outcome
        }
    };
    let status = if outcome.results.iter().any(|r| !r.is_verified_minimum) {
        Status::Violation
    } else if !outcome.complete {
        Status::Incomplete
    } else {
        Status::Ok
    };
    let body = if ctx.json {
        json_body(&outcome)
    } else {
        search_text(&outcome)
    };
    report(body, status)
}

fn by_cardinality(outcome: &SearchOutcome) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for r in &outcome.results {
        *m.entry(r.cardinality).or_insert(0) += 1;
    }
    m
}

fn search_text(o: &SearchOutcome) -> String {
    let mut body = format!(
        "n = {}, cap {}, symmetry dedup {}, {} nodes, {}\n",
        o.n,
        o.cap,
        if o.dedup_symmetry { "on" } else { "off" },
        o.nodes,
        if o.complete {
            "complete"
        } else {
            "budget exhausted (partial)"
        }
    );
    let counts: Vec<String> = by_cardinality(o)
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let _ = writeln!(body, "minimum blockers by size: {}", counts.join(" "));
    for r in &o.results {
        let cells: Vec<String> = r.blocker.iter().map(fmt_cell).collect();
        let check = if r.is_verified_minimum { "" } else { "  UNVERIFIED" };
        let _ = writeln!(
            body,
            "{:>3} [x{}] {}{check}",
            r.cardinality,
            r.symmetry_class_size,
            cells.join(" ")
        );
    }
    body
}

fn cmd_conjecture(a: &ConjectureArgs, ctx: &Ctx) -> Result<Report, CliError> {
    ctx.warm(
        a.n,
        if a.allow_order_seven {
            MAX_SEARCH_ORDER
        } else {
            DEFAULT_SEARCH_LIMIT
        },
    );
    if let Some(limit) = ctx.limit {
        if a.n > limit {
            return Err(blockers_core::Error::OrderTooLarge { n: a.n, limit }.into());
        }
    }
    let rep: ConjectureReport = conjecture_probe(a.n, a.budget, a.allow_order_seven)?;
    let status = if rep.falsified {
        Status::Violation
    } else if !rep.complete {
        Status::Incomplete
    } else {
        Status::Ok
    };
    if ctx.json {
        return report(json_body(&rep), status);
    }
    let counts: Vec<String> = rep
        .classes_by_cardinality
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let verdict = match (rep.falsified, rep.complete) {
        (true, _) => "FALSIFIED: a minimum blocker exceeds r*s",
        (false, true) => "no minimum blocker exceeds r*s",
        (false, false) => "budget exhausted before the search finished",
    };
    let body = format!(
        "n = {}, r = {}, s = {}, target r*s = {}, cap {}\nmax found: {}\nclasses by size: {}\nnodes: {}\n{verdict}\nlargest:\n{}",
        rep.n,
        rep.r,
        rep.s,
        rep.target,
        rep.cap,
        rep.max_found,
        counts.join(" "),
        rep.nodes,
        rep.witness.to_grid()
    );
    report(body, status)
}
