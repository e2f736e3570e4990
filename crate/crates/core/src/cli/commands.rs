use std::collections::BTreeSet;
use std::fs;
use std::io::{stdin, stdout, BufReader};
use std::path::Path;
use std::process::Command;

use serde_json::{json, Map, Value};

use super::report::{put_rational, Report};
use super::{
    Cli, DbKind, DbScoresArgs, DistributionKind, LineageArgs, MlKind, MlScoresArgs, QueryInput,
    RespSemanticsArg,
};
use crate::classify::{
    parse_constraint, parse_constraints, serve, Classifier, Constraint, Distribution, Entity,
    ExternalClassifier, FeatureSpace, Sample, SampleClassifier, TruthTable,
};
use crate::dbscores::{
    causes, causes_from_lineage, score_tuples, CauseReport, DbScoreOptions, Explained, ScoreKind,
    ScoreMode, TupleProbabilities, TupleScore,
};
use crate::error::{Error, Result};
use crate::games::{MonteCarloConfig, ScoreValue};
use crate::mlscores::{score_all, ExplanationRequest, MlScoreKind, RespSemantics};
use crate::rational;
use crate::reldb::{
    analyze as analyze_query, compile_lineage, load_csv, parse_lineage, parse_lineage_unchecked,
    parse_query, ConjunctiveQuery, CsvSource, Database, Lineage, TupleId,
};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn key_value<'a>(arg: &'a str, what: &str) -> Result<(&'a str, &'a str)> {
    arg.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, v)| !k.is_empty() && !v.is_empty())
        .ok_or_else(|| Error::InvalidParameter(format!("expected {what}, got `{arg}`")))
}

fn load_database(relations: &[String]) -> Result<Database> {
    let sources = relations
        .iter()
        .map(|r| key_value(r, "NAME=PATH").map(|(n, p)| CsvSource::new(n, p)))
        .collect::<Result<Vec<_>>>()?;
    load_csv(&sources)
}

fn load_query(text: Option<&String>, file: Option<&Path>) -> Result<Option<ConjunctiveQuery>> {
    match (text, file) {
        (Some(t), _) => parse_query(t).map(Some),
        (None, Some(p)) => parse_query(&read_text(p)?).map(Some),
        (None, None) => Ok(None),
    }
}

/// Resolves a tuple given by id or as a fact such as `R(a,b)`.
fn resolve_tuple(db: Option<&Database>, text: &str) -> Result<TupleId> {
    let id = TupleId::from(text.trim());
    let Some(db) = db else { return Ok(id) };
    if db.contains(&id) {
        return Ok(id);
    }
    let fact = text.trim();
    if let Some((rel, rest)) = fact.split_once('(') {
        if let Some(args) = rest.strip_suffix(')') {
            let values: Vec<&str> = args.split(',').map(str::trim).collect();
            if let Some(found) = db.find(rel.trim(), &values) {
                return Ok(found.clone());
            }
        }
    }
    Err(Error::UnknownTuple(text.to_string()))
}

fn db_kind(k: DbKind) -> ScoreKind {
    match k {
        DbKind::Responsibility => ScoreKind::Responsibility,
        DbKind::CausalEffect => ScoreKind::CausalEffect,
        DbKind::Shapley => ScoreKind::Shapley,
        DbKind::Banzhaf => ScoreKind::Banzhaf,
    }
}

fn tuple_record(db: Option<&Database>, s: &TupleScore, cause: Option<&CauseReport>) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(s.kind));
    m.insert("tuple".into(), json!(s.tuple));
    if let Some(fact) = db.and_then(|d| d.fact(&s.tuple)) {
        m.insert("fact".into(), json!(fact));
    }
    m.insert("mode".into(), json!(s.value.mode()));
    match &s.value {
        ScoreValue::Exact(r) => put_rational(&mut m, r),
        ScoreValue::Approximate(est) => {
            m.insert("value".into(), Value::Null);
            m.insert("decimal".into(), json!(est.value));
            m.insert("estimate".into(), json!(est));
        }
    }
    if let Some(c) = cause {
        m.insert("is_actual_cause".into(), json!(c.is_actual_cause));
        m.insert(
            "is_counterfactual_cause".into(),
            json!(c.is_counterfactual_cause),
        );
        m.insert("min_contingency_size".into(), json!(c.min_contingency_size));
        m.insert("witness_contingency".into(), json!(c.witness_contingency));
    }
    Value::Object(m)
}

fn is_zero(v: &ScoreValue) -> bool {
    match v {
        ScoreValue::Exact(r) => *r == rational::int(0),
        ScoreValue::Approximate(e) => e.value == 0.0,
    }
}

pub fn db_scores(cli: &Cli, args: &DbScoresArgs, config: Value) -> Result<Report> {
    let mut report = Report::new("db-scores", config);
    let db = if args.db.relations.is_empty() {
        None
    } else {
        Some(load_database(&args.db.relations)?)
    };
    let query = load_query(args.query.as_ref(), args.query_file.as_deref())?;
    let lineage_text = match (&args.lineage, &args.lineage_file) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(p)) => Some(read_text(p)?),
        (None, None) => None,
    };
    let lineage: Option<Lineage> = match (&lineage_text, &db) {
        (Some(t), Some(d)) => Some(parse_lineage(t, d)?),
        (Some(t), None) => Some(parse_lineage_unchecked(t)?),
        (None, _) => None,
    };
    let target = match (&query, &lineage, &db) {
        (Some(q), None, Some(d)) => Explained::Query { db: d, query: q },
        (Some(_), None, None) => {
            return Err(Error::InvalidParameter(
                "a query needs at least one --relation".into(),
            ))
        }
        (None, Some(l), _) => Explained::Lineage(l),
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --query, --query-file, --lineage, --lineage-file".into(),
            ))
        }
    };

    let mut probabilities = TupleProbabilities::with_default(rational::parse(&args.default_prob)?)?;
    for tp in &args.tuple_probs {
        let (t, p) = key_value(tp, "ID=P")?;
        probabilities.set(resolve_tuple(db.as_ref(), t)?, rational::parse(p)?)?;
    }
    let mode = if args.monte_carlo {
        ScoreMode::MonteCarlo(MonteCarloConfig::new(args.epsilon, args.delta, cli.seed))
    } else {
        ScoreMode::Exact
    };
    let opts = DbScoreOptions {
        mode,
        budget: cli.budget,
        probabilities,
    };
    let kinds: Vec<ScoreKind> = if args.kinds.is_empty() {
        vec![
            ScoreKind::Responsibility,
            ScoreKind::CausalEffect,
            ScoreKind::Shapley,
            ScoreKind::Banzhaf,
        ]
    } else {
        args.kinds.iter().map(|&k| db_kind(k)).collect()
    };

    let reports = if kinds.contains(&ScoreKind::Responsibility) {
        match target {
            Explained::Query { db, query } => causes(db, query, cli.budget)?,
            Explained::Lineage(l) => causes_from_lineage(l, cli.budget)?,
        }
    } else {
        Vec::new()
    };
    let others: Vec<ScoreKind> = kinds
        .iter()
        .copied()
        .filter(|&k| k != ScoreKind::Responsibility)
        .collect();
    let mut scores: Vec<TupleScore> = reports
        .iter()
        .map(|r| TupleScore {
            tuple: r.tuple.clone(),
            kind: ScoreKind::Responsibility,
            value: ScoreValue::Exact(r.responsibility.clone()),
        })
        .collect();
    if !others.is_empty() {
        scores.extend(score_tuples(target, &others, &opts)?);
    }

    let wanted: Option<BTreeSet<TupleId>> = if args.tuples.is_empty() {
        None
    } else {
        Some(
            args.tuples
                .iter()
                .map(|t| resolve_tuple(db.as_ref(), t))
                .collect::<Result<_>>()?,
        )
    };
    for s in &scores {
        if wanted.as_ref().is_some_and(|w| !w.contains(&s.tuple)) {
            continue;
        }
        if args.nonzero && is_zero(&s.value) {
            continue;
        }
        let cause = (s.kind == ScoreKind::Responsibility)
            .then(|| reports.iter().find(|r| r.tuple == s.tuple))
            .flatten();
        report.records.push(tuple_record(db.as_ref(), s, cause));
    }
    if let Some(w) = &wanted {
        let known: BTreeSet<&TupleId> = scores.iter().map(|s| &s.tuple).collect();
        for t in w.iter().filter(|t| !known.contains(t)) {
            report.warnings.push(format!(
                "tuple {t} does not occur in the lineage; it scores 0 throughout"
            ));
        }
    }
    Ok(report)
}

fn ml_kind(k: MlKind) -> MlScoreKind {
    match k {
        MlKind::Shap => MlScoreKind::Shap,
        MlKind::Counter => MlScoreKind::Counter,
        MlKind::Resp => MlScoreKind::Resp,
    }
}

pub fn ml_scores(cli: &Cli, args: &MlScoresArgs, config: Value) -> Result<Report> {
    let mut report = Report::new("ml-scores", config);
    let table = args
        .truth_table
        .as_deref()
        .map(TruthTable::read_csv)
        .transpose()?;
    let declared = if args.features.is_empty() {
        None
    } else {
        Some(FeatureSpace::new(args.features.iter().map(|f| f.trim()))?)
    };
    if let (Some(d), Some(t)) = (&declared, &table) {
        if d != t.space() {
            return Err(Error::FeatureSpace(
                "--features does not match the truth table header".into(),
            ));
        }
    }
    let known = declared
        .clone()
        .or_else(|| table.as_ref().map(|t| t.space().clone()));
    let sample = args
        .sample
        .as_deref()
        .map(|p| Sample::read_csv(p, known.as_ref()))
        .transpose()?;
    let known = known.or_else(|| sample.as_ref().map(|s| s.space.clone()));
    let external = match &args.external {
        Some(prog) => {
            let mut cmd = Command::new(prog);
            cmd.args(&args.external_args);
            let deterministic = !args.nondeterministic;
            Some(match &known {
                Some(s) => ExternalClassifier::spawn(cmd, s.width(), deterministic)?,
                None => ExternalClassifier::spawn_any_width(cmd, deterministic)?,
            })
        }
        None => None,
    };
    let space = match (known, &external) {
        (Some(s), _) => s,
        (None, Some(x)) => FeatureSpace::numbered(x.width())?,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "feature names unknown: give --features, a truth table or a sample".into(),
            ))
        }
    };

    let entity = Entity::parse(&args.entity)?;
    space.check(&entity)?;
    let from_sample = match (&table, &external, &sample) {
        (None, None, Some(s)) => {
            let labels = s.labels.as_ref().ok_or_else(|| {
                Error::InvalidParameter(
                    "no classifier: give --truth-table, --external, or a sample with a `_label` column".into(),
                )
            })?;
            report
                .warnings
                .push("labels taken from the sample; entities outside it have none".into());
            Some(SampleClassifier::new(
                space.width(),
                s.entities.iter().copied().zip(labels.iter().copied()),
            )?)
        }
        (None, None, None) => {
            return Err(Error::InvalidParameter(
                "no classifier: give --truth-table, --external, or a labelled --sample".into(),
            ))
        }
        _ => None,
    };
    let classifier: &dyn Classifier = match (&table, &external, &from_sample) {
        (Some(t), _, _) => t,
        (_, Some(x), _) => x,
        (_, _, Some(s)) => s,
        _ => unreachable!("a classifier source was checked above"),
    };

    let base = match args.distribution {
        DistributionKind::Uniform => Distribution::uniform(space.width()),
        DistributionKind::Empirical => {
            let s = sample.as_ref().ok_or_else(|| {
                Error::InvalidParameter("the empirical distribution needs --sample".into())
            })?;
            Distribution::empirical(s.entities.iter().copied(), args.dedupe)?
        }
        DistributionKind::Product if !args.marginals.is_empty() => Distribution::product(
            args.marginals
                .iter()
                .map(|m| rational::parse(m))
                .collect::<Result<_>>()?,
        )?,
        DistributionKind::Product => {
            let s = sample.as_ref().ok_or_else(|| {
                Error::InvalidParameter(
                    "the product distribution needs --marginals or --sample".into(),
                )
            })?;
            Distribution::product_from_sample(&s.entities)?
        }
    };
    if base.width() != space.width() {
        return Err(Error::WidthMismatch {
            expected: space.width(),
            found: base.width(),
        });
    }
    let mut theta: Vec<Constraint> = args
        .constraints
        .iter()
        .map(|c| parse_constraint(c, &space))
        .collect::<Result<_>>()?;
    if let Some(p) = &args.constraint_file {
        theta.extend(parse_constraints(&read_text(p)?, &space)?);
    }
    let dist = base.condition(&theta)?;

    let mut req = ExplanationRequest::new(&space, classifier, &dist, entity)?;
    req.max_contingency = args.max_contingency;
    req.resp_semantics = match args.resp_semantics {
        RespSemanticsArg::JointChange => RespSemantics::JointChange,
        RespSemanticsArg::Strict => RespSemantics::Strict,
    };
    req.skip_zero_mass = args.skip_zero_mass;
    req.budget = cli.budget;

    let kinds: Vec<MlScoreKind> = if args.kinds.is_empty() {
        vec![MlScoreKind::Shap, MlScoreKind::Counter, MlScoreKind::Resp]
    } else {
        args.kinds.iter().map(|&k| ml_kind(k)).collect()
    };
    let result = score_all(&req, &kinds)?;
    report.warnings.extend(result.warnings);
    for s in result.scores {
        if args.nonzero && s.value == rational::int(0) {
            continue;
        }
        let mut v = serde_json::to_value(&s).expect("score serializes");
        if let Value::Object(m) = &mut v {
            m.insert("decimal".into(), json!(rational::to_f64(&s.value)));
        }
        report.records.push(v);
    }
    Ok(report)
}

fn query_from(input: &QueryInput) -> Result<ConjunctiveQuery> {
    load_query(input.query.as_ref(), input.query_file.as_deref())?
        .ok_or_else(|| Error::InvalidParameter("give --query or --query-file".into()))
}

pub fn analyze(input: &QueryInput, config: Value) -> Result<Report> {
    let q = query_from(input)?;
    let mut report = Report::new("analyze", config);
    let mut rec = serde_json::to_value(analyze_query(&q)).expect("analysis serializes");
    if let Value::Object(m) = &mut rec {
        m.insert("query".into(), json!(q.to_string()));
    }
    report.records.push(rec);
    Ok(report)
}

pub fn lineage(args: &LineageArgs, config: Value) -> Result<Report> {
    let q = query_from(&args.query)?;
    let db = load_database(&args.db.relations)?;
    let lin = compile_lineage(&db, &q)?;
    let mut report = Report::new("lineage", config);
    report.records.push(json!({
        "query": q.to_string(),
        "lineage": lin.to_string(),
        "provenance": lin.provenance,
        "support": lin.support(),
    }));
    Ok(report)
}

pub fn serve_table(path: &Path) -> Result<()> {
    let table = TruthTable::read_csv(path)?;
    serve(&table, BufReader::new(stdin().lock()), stdout().lock())
}
