use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use cubetight::complex::{HellyOutcome, VertexPath};
use cubetight::hypdiag::{are_l_separated, four_point_delta, grid_thinness, CurtainValue, SeparationProfile};
use cubetight::medianrec::{cubify, is_median};
use cubetight::numeric::{int, parse_rational};
use cubetight::sageev::{dual_complex, roundtrip_check, walls_of};
use cubetight::tightspan::{self, FiniteMetric, MetricDoc};
use cubetight::wallsys::validate;
use cubetight::{
    ComplexDoc, CubeComplex, Error, GraphDoc, Metric, MetricForm, PseudoMetricTable, Rational, Result, SimpleGraph,
    WallSystem, WallSystemDoc,
};

use crate::args::{Command, CubeCmd, DeltaMetric, Format, Global, HypCmd, MedianCmd, MetricArg, SageevCmd, TightspanCmd, WallsCmd};
use crate::render::{curtain_json, form_json, pair_key, put_form, put_rational};

/// What a command produces.
pub enum Artifact {
    Json(Value),
    Text(String),
}

pub fn execute(command: &Command, global: &Global) -> Result<Artifact> {
    match command {
        Command::Walls(cmd) => walls(cmd, global),
        Command::Cube(cmd) => cube(cmd, global),
        Command::Sageev(cmd) => sageev(cmd, global),
        Command::Median(cmd) => median(cmd, global),
        Command::Hyp(cmd) => hyp(cmd, global),
        Command::Tightspan(cmd) => tightspan_cmd(cmd, global),
    }
}

fn read_input(global: &Global) -> Result<String> {
    let mut text = String::new();
    match global.input.as_deref() {
        Some(path) if path.as_os_str() != "-" => {
            text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn load_wall_doc(global: &Global) -> Result<WallSystemDoc> {
    parse_json(&read_input(global)?)
}

fn load_wall_system(global: &Global) -> Result<WallSystem> {
    WallSystem::from_doc(&load_wall_doc(global)?)
}

/// A complex document, or a bare wall system or graph.
fn load_complex(global: &Global) -> Result<CubeComplex> {
    let text = read_input(global)?;
    let value: Value = parse_json(&text)?;
    if value.get("graph").is_some() || value.get("walls").is_some_and(|w| w.is_object()) {
        return parse_json::<ComplexDoc>(&text)?.load();
    }
    if value.get("ground").is_some() {
        return dual_complex(&WallSystem::from_doc(&parse_json(&text)?)?);
    }
    if value.get("vertices").is_some() {
        return cubify(&SimpleGraph::from_doc(&parse_json(&text)?)?);
    }
    Err(Error::Parse("expected a complex, wall system or graph document".into()))
}

fn load_graph(global: &Global) -> Result<SimpleGraph> {
    let text = read_input(global)?;
    let value: Value = parse_json(&text)?;
    let doc: GraphDoc = match value.get("graph") {
        Some(graph) => serde_json::from_value(graph.clone()).map_err(|e| Error::Parse(e.to_string()))?,
        None => parse_json(&text)?,
    };
    SimpleGraph::from_doc(&doc)
}

fn load_metric(global: &Global) -> Result<FiniteMetric> {
    let text = read_input(global)?;
    let is_csv = global.input.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "csv"))
        || !text.trim_start().starts_with('{');
    if is_csv {
        FiniteMetric::from_csv(&text)
    } else {
        FiniteMetric::from_doc(&parse_json::<MetricDoc>(&text)?)
    }
}

fn vertex_list(x: &CubeComplex, names: &[String]) -> Result<Vec<usize>> {
    names.iter().map(|n| x.vertex(n)).collect()
}

fn names_of(x: &CubeComplex, vs: &[usize]) -> Value {
    Value::Array(vs.iter().map(|&v| Value::String(x.name(v).to_string())).collect())
}

fn metric_of(arg: MetricArg) -> Metric {
    match arg {
        MetricArg::L1 => Metric::L1,
        MetricArg::Linf => Metric::Linf,
    }
}

fn complex_artifact(x: &CubeComplex, format: Format) -> Artifact {
    match format {
        Format::Dot => Artifact::Text(x.to_dot()),
        Format::Json => Artifact::Json(serde_json::to_value(x.to_doc()).expect("documents serialize")),
    }
}

/// `name:radius`, split at the last colon.
fn split_ball(text: &str) -> Result<(&str, &str)> {
    text.rsplit_once(':').ok_or_else(|| Error::Parameter(format!("ball `{text}` must look like `center:radius`")))
}

fn walls(cmd: &WallsCmd, global: &Global) -> Result<Artifact> {
    match cmd {
        WallsCmd::Validate => {
            let report = validate(&load_wall_doc(global)?);
            Ok(Artifact::Json(json!({ "valid": report.is_valid(), "violations": report.violations })))
        }
        WallsCmd::Random { points, walls } => {
            if *points < 2 {
                return Err(Error::Parameter("need at least two points".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
            let ws = cubetight::families::random_wall_system(*points, *walls, &mut rng);
            Ok(Artifact::Json(serde_json::to_value(ws.to_doc()).expect("documents serialize")))
        }
        WallsCmd::Chain { from, to } => {
            let ws = load_wall_system(global)?;
            let chain = ws.max_separating_chain(from, to)?;
            Ok(Artifact::Json(json!({ "length": chain.len(), "chain": chain.walls() })))
        }
    }
}

fn cube(cmd: &CubeCmd, global: &Global) -> Result<Artifact> {
    let x = load_complex(global)?;
    let out = match cmd {
        CubeCmd::Dist { metric, from, to } => {
            json!({ "dist": x.dist(metric_of(*metric), x.vertex(from)?, x.vertex(to)?) })
        }
        CubeCmd::Median { vertices } => {
            let vs = vertex_list(&x, vertices)?;
            if vs.len() != 3 {
                return Err(Error::Parameter("median takes exactly three vertices".into()));
            }
            json!({ "median": x.name(x.median(vs[0], vs[1], vs[2])?) })
        }
        CubeCmd::Interval { from, to } => {
            json!({ "interval": names_of(&x, &x.interval(x.vertex(from)?, x.vertex(to)?)?) })
        }
        CubeCmd::Hull { vertices } => {
            let hull = x.hull(&vertex_list(&x, vertices)?)?;
            json!({ "hull": names_of(&x, &hull.vertices), "iterations": hull.iterations })
        }
        CubeCmd::Gate { from, target } => {
            json!({ "gate": x.name(x.gate(x.vertex(from)?, &vertex_list(&x, target)?)?) })
        }
        CubeCmd::Geodesic { path } => {
            json!({ "geodesic": x.is_geodesic(&VertexPath { vertices: vertex_list(&x, path)? })? })
        }
        CubeCmd::Dimension => json!({ "dimension": x.dimension(), "cube_counts": x.cube_counts() }),
        CubeCmd::Helly { metric, balls } => {
            let parsed = balls
                .iter()
                .map(|b| {
                    let (c, r) = split_ball(b)?;
                    let r = r.parse::<usize>().map_err(|_| Error::Parameter(format!("radius `{r}` is not a natural number")))?;
                    Ok((x.vertex(c)?, r))
                })
                .collect::<Result<Vec<_>>>()?;
            match x.helly_discrete(&parsed, metric_of(*metric))? {
                HellyOutcome::Common(v) => json!({ "outcome": "common", "vertex": x.name(v) }),
                HellyOutcome::NotPairwise(i, j) => json!({ "outcome": "not_pairwise", "balls": [i, j] }),
                HellyOutcome::EmptyIntersection(sub) => json!({ "outcome": "empty_intersection", "balls": sub }),
            }
        }
        CubeCmd::Dot => return Ok(complex_artifact(&x, global.format)),
    };
    Ok(Artifact::Json(out))
}

fn sageev(cmd: &SageevCmd, global: &Global) -> Result<Artifact> {
    match cmd {
        SageevCmd::Dual => Ok(complex_artifact(&dual_complex(&load_wall_system(global)?)?, global.format)),
        SageevCmd::Walls => {
            let x = load_complex(global)?;
            Ok(Artifact::Json(serde_json::to_value(walls_of(&x)?.to_doc()).expect("documents serialize")))
        }
        SageevCmd::Roundtrip => {
            let cert = roundtrip_check(&load_wall_system(global)?)?;
            if !cert.isomorphic {
                return Err(Error::Internal(format!("round trip failed: {}", cert.failures.join("; "))));
            }
            Ok(Artifact::Json(serde_json::to_value(cert).expect("certificates serialize")))
        }
    }
}

fn median(cmd: &MedianCmd, global: &Global) -> Result<Artifact> {
    let g = load_graph(global)?;
    match cmd {
        MedianCmd::Check => {
            let check = is_median(&g)?;
            let witness = check.witness.map(|(triple, count)| {
                json!({ "triple": triple.iter().map(|&v| g.names()[v].clone()).collect::<Vec<_>>(), "medians": count })
            });
            Ok(Artifact::Json(json!({ "is_median": check.is_median, "witness": witness })))
        }
        MedianCmd::Cubify => Ok(complex_artifact(&cubify(&g)?, global.format)),
    }
}

fn pair_table<F>(x: &CubeComplex, f: F) -> Result<Value>
where
    F: Fn(usize, usize) -> Result<Value>,
{
    let mut table = Map::new();
    for a in 0..x.num_vertices() {
        for b in a + 1..x.num_vertices() {
            table.insert(pair_key(x.name(a), x.name(b)), f(a, b)?);
        }
    }
    Ok(Value::Object(table))
}

fn hyp(cmd: &HypCmd, global: &Global) -> Result<Artifact> {
    let x = load_complex(global)?;
    let profile = SeparationProfile::new(&x);
    let out = match cmd {
        HypCmd::Lsep { h, k, l } => match (h, k, l) {
            (Some(h), Some(k), Some(l)) => json!({ "separated": are_l_separated(&x, *h, *k, *l)?, "width": profile.width(*h, *k) }),
            (None, None, None) => {
                let mut widths = Map::new();
                for h in 0..x.num_walls() {
                    for k in h + 1..x.num_walls() {
                        if let Some(w) = profile.width(h, k) {
                            widths.insert(format!("{h}|{k}"), json!(w));
                        }
                    }
                }
                json!({ "widths": widths, "max_width": profile.max_width() })
            }
            _ => return Err(Error::Parameter("give all of --h, --k and --L, or none".into())),
        },
        HypCmd::Grids => serde_json::to_value(grid_thinness(&x)).expect("grids serialize"),
        HypCmd::Dl { l } => json!({ "L": l, "dist": pair_table(&x, |a, b| Ok(json!(profile.dist_l(*l, a, b))))? }),
        HypCmd::CurtainModel { exponent } => json!({
            "exponent": exponent,
            "dist": pair_table(&x, |a, b| Ok(curtain_json(&profile.curtain_model_dist(a, b, *exponent)?)))?,
        }),
        HypCmd::Delta { metric, l, exponent } => delta(&x, &profile, *metric, *l, *exponent)?,
    };
    Ok(Artifact::Json(out))
}

fn delta(x: &CubeComplex, profile: &SeparationProfile, metric: DeltaMetric, l: usize, exponent: u32) -> Result<Value> {
    let quad = |w: Option<[usize; 4]>| w.map(|q| q.iter().map(|&v| x.name(v).to_string()).collect::<Vec<_>>());
    let integral = |f: &(dyn Fn(usize, usize) -> usize + Sync)| -> Result<Value> {
        let table = PseudoMetricTable::from_complex(x, |a, b| Ok(int(f(a, b) as i64)))?;
        let mut obj = Map::new();
        match four_point_delta(&table) {
            Some(est) => {
                put_rational(&mut obj, "delta", &est.delta);
                obj.insert("witness".into(), json!(quad(est.witness)));
            }
            None => {
                obj.insert("delta".into(), json!(0));
                obj.insert("witness".into(), Value::Null);
            }
        }
        Ok(Value::Object(obj))
    };
    match metric {
        DeltaMetric::L1 => integral(&|a, b| x.dist_l1(a, b)),
        DeltaMetric::Linf => integral(&|a, b| x.dist_linf(a, b)),
        DeltaMetric::Dl => integral(&|a, b| profile.dist_l(l, a, b)),
        DeltaMetric::Curtain => {
            let table: PseudoMetricTable<CurtainValue> =
                PseudoMetricTable::from_complex(x, |a, b| profile.curtain_model_dist(a, b, exponent))?;
            Ok(match four_point_delta(&table) {
                Some(est) => json!({ "delta": curtain_json(&est.delta), "witness": quad(est.witness) }),
                None => json!({ "delta": curtain_json(&CurtainValue::zero(exponent)), "witness": null }),
            })
        }
    }
}

/// A comma-separated list of rationals, or a point name meaning its
/// distance form.
fn parse_form(m: &FiniteMetric, text: &str) -> Result<MetricForm> {
    if let Ok(p) = m.point(text) {
        return Ok(tightspan::kuratowski(m, p));
    }
    let values = text.split(',').map(parse_rational).collect::<Result<Vec<Rational>>>()?;
    if values.len() != m.len() {
        return Err(Error::FormLength { expected: m.len(), got: values.len() });
    }
    Ok(MetricForm::new(values))
}

fn points_of(m: &FiniteMetric, names: &[String]) -> Result<Vec<usize>> {
    names.iter().map(|n| m.point(n)).collect()
}

fn tightspan_cmd(cmd: &TightspanCmd, global: &Global) -> Result<Artifact> {
    let m = load_metric(global)?;
    let tol = global.tol;
    let mut obj = Map::new();
    match cmd {
        TightspanCmd::Cells => {
            let report = tightspan::tight_span_cells(&m)?;
            obj.insert("zero_cells".into(), Value::Array(report.zero_cells.iter().map(form_json).collect()));
            put_rational(&mut obj, "coarse_gap", &report.coarse_gap);
        }
        TightspanCmd::Retract { form } => {
            let r = tightspan::retract(&m, &parse_form(&m, form)?, tol)?;
            put_form(&mut obj, "form", &r.form);
            obj.insert("iterations".into(), json!(r.iterations));
            obj.insert("snapped".into(), json!(r.snapped));
        }
        TightspanCmd::Helly { balls } => {
            let parsed = balls
                .iter()
                .map(|b| {
                    let (c, r) = split_ball(b)?;
                    Ok((m.point(c)?, parse_rational(r)?))
                })
                .collect::<Result<Vec<_>>>()?;
            match tightspan::helly_witness(&m, &parsed, tol)? {
                tightspan::HellyWitness::Point(f) => put_form(&mut obj, "witness", &f),
                tightspan::HellyWitness::Infeasible(i, j) => {
                    obj.insert("infeasible".into(), json!([m.points()[parsed[i].0], m.points()[parsed[j].0]]));
                }
            }
        }
        TightspanCmd::Tripod { points } => {
            let ps = points_of(&m, points)?;
            if ps.len() != 3 {
                return Err(Error::Parameter("tripod takes exactly three points".into()));
            }
            let t = tightspan::tripod_center(&m, ps[0], ps[1], ps[2], tol)?;
            put_rational(&mut obj, "a", &t.a);
            put_rational(&mut obj, "b", &t.b);
            put_rational(&mut obj, "c", &t.c);
            put_form(&mut obj, "center", &t.center);
        }
        TightspanCmd::Center { points } => {
            put_form(&mut obj, "center", &tightspan::center(&m, &points_of(&m, points)?, tol)?);
        }
        TightspanCmd::Comb { f, g, t } => {
            let t = parse_rational(t)?;
            let point = tightspan::comb(&m, &parse_form(&m, f)?, &parse_form(&m, g)?, &t, tol)?;
            put_rational(&mut obj, "t", &t);
            put_form(&mut obj, "form", &point);
        }
    }
    obj.insert("points".into(), json!(m.points()));
    Ok(Artifact::Json(Value::Object(obj)))
}
