//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polylift_core::circulation::{circulation_or_cut, hoffman_feasible_subsets, DEFAULT_SUBSET_LIMIT};
use polylift_core::descriptions::{
    blossom_system, edge_polytope_system, qxy_system, qxyz_system, small_clique_system, vande_vate_system,
    InequalitySystem,
};
use polylift_core::families::{
    enum_edge_vertices, enum_matchings, enum_path_sets, enum_small_cliques, FamilyError, VRep,
};
use polylift_core::lifting::{
    check_point, check_section_enforcing, LiftError, Lifting, MatchingLifting, OrbisackLifting, PathSetLifting,
    QxyLifting, SmallCliqueLifting,
};
use polylift_core::orbisack::{
    enum_orbisack_vertices, lifted_xy_vertices, lifted_xyz_vertices, orbisack_system, separate_block, OrbMatrix,
    OrbisackError,
};
use polylift_core::verify::{check_completeness_with_cap, classify_constraints, dd_vertices_with_cap, VerifyError};
use polylift_core::{Digraph, Graph, Rational};

use crate::format::{parse_instance, FormatError};
use crate::json::{self, JsonError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "polylift", version, about = "Exact checks of polytope descriptions and their liftings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the inequality system of a family.
    Gen(Options),
    /// Print the vertices of a family (enumerated, or from the system with --dd).
    Vertices(Options),
    /// Compare the system against the enumerated vertices.
    Verify(Options),
    /// Check the lifting on one point or on the vertices of the system plus random samples.
    Lift(Options),
    /// Separate a point from the orbisack by a block inequality.
    Separate(Options),
    /// Decide circulation feasibility for a JSON capacity instance.
    Hoffman(Options),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Gen,
    Vertices,
    Verify,
    Lift,
    Separate,
    Hoffman,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Matching,
    Pathset,
    Smallclique,
    Edgepoly,
    Orbisack,
    Qxy,
    Qxyz,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Matching => "matching",
            Family::Pathset => "pathset",
            Family::Smallclique => "smallclique",
            Family::Edgepoly => "edgepoly",
            Family::Orbisack => "orbisack",
            Family::Qxy => "qxy",
            Family::Qxyz => "qxyz",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Graph instance file, or a JSON capacity instance for `hoffman`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Number of rows for the orbisack families.
    #[arg(long)]
    pub p: Option<usize>,
    /// Keep only facet-defining small-clique inequalities.
    #[arg(long)]
    pub irredundant: bool,
    /// Omit the two redundant bound inequalities of the orbisack system.
    #[arg(long)]
    pub drop_redundant: bool,
    /// Remove every constraint whose tag starts with this prefix (repeatable).
    #[arg(long)]
    pub drop_class: Vec<String>,
    #[arg(long, env = "POLYLIFT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated rationals, e.g. "0/1,1/2".
    #[arg(long)]
    pub point: Option<String>,
    /// Random convex combinations checked after the vertices.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Largest ambient dimension handed to vertex enumeration.
    #[arg(long, default_value_t = 24)]
    pub max_dim: usize,
    /// Compute vertices from the system instead of enumerating them.
    #[arg(long)]
    pub dd: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub options: Options,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, options) = match cli.command {
            Command::Gen(o) => (CommandKind::Gen, o),
            Command::Vertices(o) => (CommandKind::Vertices, o),
            Command::Verify(o) => (CommandKind::Verify, o),
            Command::Lift(o) => (CommandKind::Lift, o),
            Command::Separate(o) => (CommandKind::Separate, o),
            Command::Hoffman(o) => (CommandKind::Hoffman, o),
        };
        RunConfig { command, options }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<OrbisackError> for CliError {
    fn from(e: OrbisackError) -> Self {
        match e {
            OrbisackError::InfeasibleTau(_) | OrbisackError::Unlabelled(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<polylift_core::descriptions::DescriptionError> for CliError {
    fn from(e: polylift_core::descriptions::DescriptionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<polylift_core::circulation::CirculationError> for CliError {
    fn from(e: polylift_core::circulation::CirculationError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Num(_) | VerifyError::InvalidConstraint { .. } | VerifyError::Incomplete(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LiftError> for CliError {
    fn from(e: LiftError) -> Self {
        match e {
            LiftError::Verify(v) => v.into(),
            LiftError::Orbisack(o) => o.into(),
            LiftError::Circulation(polylift_core::circulation::CirculationError::Num(_)) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Exit code and pretty-printed JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub json: String,
}

enum Instance {
    Graph(Graph),
    Path(Digraph, usize, usize),
    Order(usize),
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })
}

impl Options {
    fn family(&self) -> Result<Family, CliError> {
        self.family.ok_or_else(|| CliError::Usage("--family is required".into()))
    }

    fn instance(&self, family: Family) -> Result<Instance, CliError> {
        match family {
            Family::Orbisack | Family::Qxy | Family::Qxyz => match self.p {
                Some(p) if p >= 1 => Ok(Instance::Order(p)),
                Some(_) => usage("--p must be at least 1"),
                None => usage(format!("--p is required for family {}", family.name())),
            },
            _ => {
                let Some(path) = &self.instance else {
                    return usage(format!("--instance is required for family {}", family.name()));
                };
                let inst = parse_instance(&read(path)?)?;
                if family == Family::Pathset {
                    let (d, s, t) = inst.to_path_instance()?;
                    Ok(Instance::Path(d, s, t))
                } else {
                    Ok(Instance::Graph(inst.to_graph()?))
                }
            }
        }
    }

    fn system(&self, family: Family, inst: &Instance) -> Result<InequalitySystem, CliError> {
        let sys = match (family, inst) {
            (Family::Matching, Instance::Graph(g)) => blossom_system(g)?,
            (Family::Pathset, Instance::Path(d, s, t)) => vande_vate_system(d, *s, *t)?,
            (Family::Smallclique, Instance::Graph(g)) => small_clique_system(g, self.irredundant)?,
            (Family::Edgepoly, Instance::Graph(g)) => edge_polytope_system(g)?,
            (Family::Orbisack, Instance::Order(p)) => orbisack_system(*p, self.drop_redundant)?,
            (Family::Qxy, Instance::Order(p)) => qxy_system(*p)?,
            (Family::Qxyz, Instance::Order(p)) => qxyz_system(*p)?,
            _ => return Err(CliError::Internal("instance does not match family".into())),
        };
        Ok(self.drop_class.iter().fold(sys, |s, prefix| s.without_tag_prefix(prefix)))
    }

    fn enumerated(&self, family: Family, inst: &Instance) -> Result<VRep, CliError> {
        Ok(match (family, inst) {
            (Family::Matching, Instance::Graph(g)) => enum_matchings(g)?,
            (Family::Pathset, Instance::Path(d, s, t)) => enum_path_sets(d, *s, *t)?,
            (Family::Smallclique, Instance::Graph(g)) => enum_small_cliques(g),
            (Family::Edgepoly, Instance::Graph(g)) => enum_edge_vertices(g),
            (Family::Orbisack, Instance::Order(p)) => enum_orbisack_vertices(*p)?,
            (Family::Qxy, Instance::Order(p)) => lifted_xy_vertices(*p)?,
            (Family::Qxyz, Instance::Order(p)) => lifted_xyz_vertices(*p)?,
            _ => return Err(CliError::Internal("instance does not match family".into())),
        })
    }

    fn lifting(&self, family: Family, inst: Instance) -> Result<Box<dyn Lifting>, CliError> {
        Ok(match (family, inst) {
            (Family::Matching, Instance::Graph(g)) => Box::new(MatchingLifting::new(g)?),
            (Family::Pathset, Instance::Path(d, s, t)) => Box::new(PathSetLifting::new(d, s, t)?),
            (Family::Smallclique, Instance::Graph(g)) => Box::new(SmallCliqueLifting::new(g)),
            (Family::Orbisack, Instance::Order(p)) => Box::new(OrbisackLifting::new(p)?),
            (Family::Qxy, Instance::Order(p)) => Box::new(QxyLifting::new(p)?),
            (f, _) => return usage(format!("family {} has no lifting", f.name())),
        })
    }

    fn point(&self) -> Result<Option<Vec<Rational>>, CliError> {
        Ok(match &self.point {
            Some(text) => Some(json::parse_point(text)?),
            None => None,
        })
    }
}

fn gen(o: &Options) -> Result<(i32, Value), CliError> {
    let family = o.family()?;
    let inst = o.instance(family)?;
    Ok((EXIT_OK, json::system(&o.system(family, &inst)?)))
}

fn vertices(o: &Options) -> Result<(i32, Value), CliError> {
    let family = o.family()?;
    let inst = o.instance(family)?;
    if !o.dd {
        return Ok((EXIT_OK, json::vrep(&o.enumerated(family, &inst)?)));
    }
    let sys = o.system(family, &inst)?;
    match dd_vertices_with_cap(&sys, o.max_dim) {
        Ok(v) => Ok((EXIT_OK, json::vrep(&v))),
        Err(VerifyError::Unbounded) => {
            Ok((EXIT_FAILED, json!({ "vars": sys.vars, "points": null, "error": VerifyError::Unbounded.to_string() })))
        }
        Err(e) => Err(e.into()),
    }
}

fn verify(o: &Options) -> Result<(i32, Value), CliError> {
    let family = o.family()?;
    let inst = o.instance(family)?;
    let sys = o.system(family, &inst)?;
    let v = o.enumerated(family, &inst)?;
    let report = match check_completeness_with_cap(&sys, &v, o.max_dim) {
        Ok(r) => r,
        Err(VerifyError::Unbounded) => {
            return Ok((EXIT_FAILED, json!({ "complete": false, "error": VerifyError::Unbounded.to_string() })));
        }
        Err(e) => return Err(e.into()),
    };
    if !report.is_complete() {
        return Ok((EXIT_FAILED, json::completeness(&report, &sys, None)));
    }
    let classes = classify_constraints(&sys, &v)?;
    Ok((EXIT_OK, json::completeness(&report, &sys, Some(&classes))))
}

fn lift(o: &Options) -> Result<(i32, Value), CliError> {
    let family = o.family()?;
    let inst = o.instance(family)?;
    let sys = o.system(family, &inst).ok();
    let l = o.lifting(family, inst)?;
    if let Some(x) = o.point()? {
        let failure = check_point(l.as_ref(), &x)?;
        let lifted = match l.lift(&x)? {
            polylift_core::lifting::LiftOutcome::Point(y) => Some(y),
            polylift_core::lifting::LiftOutcome::MarkedInfeasible(_) => None,
        };
        let code = if failure.is_none() { EXIT_OK } else { EXIT_FAILED };
        return Ok((code, json::single_lift(&x, failure.as_ref(), lifted.as_deref())));
    }
    let sys = sys.ok_or_else(|| CliError::Internal("missing system".into()))?;
    match check_section_enforcing(l.as_ref(), &sys, o.samples, o.seed) {
        Ok(r) => Ok((if r.passed() { EXIT_OK } else { EXIT_FAILED }, json::section(&r))),
        Err(LiftError::Verify(VerifyError::Unbounded)) => {
            Ok((EXIT_FAILED, json!({ "passed": false, "error": VerifyError::Unbounded.to_string() })))
        }
        Err(e) => Err(e.into()),
    }
}

fn separate(o: &Options) -> Result<(i32, Value), CliError> {
    let family = o.family()?;
    if family != Family::Orbisack {
        return usage(format!("separation is only available for family orbisack, not {}", family.name()));
    }
    let Instance::Order(p) = o.instance(family)? else { unreachable!() };
    let Some(x) = o.point()? else { return usage("--point is required for separate") };
    if x.len() != 2 * p {
        return usage(format!("point has {} coordinates, expected {}", x.len(), 2 * p));
    }
    let m = OrbMatrix::from_flat(&x)?;
    Ok(match separate_block(&m)? {
        None => (EXIT_OK, json!({ "violated": false })),
        Some(b) => {
            let mut out = json!({ "violated": true });
            for (k, v) in json::block(&b, &polylift_core::descriptions::orbisack_vars(p)).as_object().expect("object") {
                out[k] = v.clone();
            }
            (EXIT_FAILED, out)
        }
    })
}

fn hoffman(o: &Options) -> Result<(i32, Value), CliError> {
    let Some(path) = &o.instance else { return usage("--instance is required for hoffman") };
    let value: Value = serde_json::from_str(&read(path)?).map_err(JsonError::from)?;
    let inst = json::parse_hoffman(&value).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = circulation_or_cut(&inst.digraph, &inst.bounds)?;
    let agree = if inst.digraph.node_count() <= DEFAULT_SUBSET_LIMIT {
        Some(hoffman_feasible_subsets(&inst.digraph, &inst.bounds)?.is_feasible() == result.is_ok())
    } else {
        None
    };
    if agree == Some(false) {
        return Err(CliError::Internal("subset and flow feasibility checks disagree".into()));
    }
    if let Ok(c) = &result {
        if !c.is_valid(&inst.digraph, &inst.bounds) {
            return Err(CliError::Internal("computed circulation violates bounds or conservation".into()));
        }
    }
    let code = if result.is_ok() { EXIT_OK } else { EXIT_FAILED };
    Ok((code, json::hoffman_result(&result, agree)))
}

/// Runs one command. Errors carry exit code 2 (bad input) or 3 (internal).
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let o = &config.options;
    let (code, value) = match config.command {
        CommandKind::Gen => gen(o)?,
        CommandKind::Vertices => vertices(o)?,
        CommandKind::Verify => verify(o)?,
        CommandKind::Lift => lift(o)?,
        CommandKind::Separate => separate(o)?,
        CommandKind::Hoffman => hoffman(o)?,
    };
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(RunOutput { code, json: text })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        let mut argv = vec!["polylift"];
        argv.extend_from_slice(args);
        Cli::try_parse_from(argv).unwrap().into()
    }

    #[test]
    fn orbisack_verify_passes() {
        let out = run(&config(&["verify", "--family", "orbisack", "--p", "3"])).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let v: Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["vertex_match"], true);
        let redundant: Vec<&str> = v["classes"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["class"] == "redundant")
            .map(|c| c["tag"].as_str().unwrap())
            .collect();
        assert_eq!(redundant, ["lower x_1_1", "upper x_1_2"]);
    }

    #[test]
    fn dropping_blocks_fails_verification() {
        let out = run(&config(&["verify", "--family", "orbisack", "--p", "2", "--drop-class", "block"])).unwrap();
        assert_eq!(out.code, EXIT_FAILED);
    }

    #[test]
    fn separation_exit_codes() {
        let out = run(&config(&["separate", "--family", "orbisack", "--p", "1", "--point", "0/1,1/1"])).unwrap();
        assert_eq!(out.code, EXIT_FAILED);
        let v: Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["tau"], json!([3]));
        assert_eq!(v["constraint"]["coef"], json!({ "x_1_1": "-1/1", "x_1_2": "1/1" }));
        assert_eq!(v["beta"], "0/1");
        let out = run(&config(&["separate", "--family", "orbisack", "--p", "1", "--point", "1/2,1/2"])).unwrap();
        assert_eq!(out.code, EXIT_OK);
    }

    #[test]
    fn usage_errors() {
        let err = run(&config(&["gen", "--family", "orbisack"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        let err = run(&config(&["lift", "--family", "qxyz", "--p", "2"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        let err = run(&config(&["separate", "--family", "orbisack", "--p", "1", "--point", "2,0"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        let err = run(&config(&["separate", "--family", "qxy", "--p", "1", "--point", "0,0"])).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn orbisack_lift_sections() {
        let out = run(&config(&["lift", "--family", "orbisack", "--p", "2", "--samples", "20"])).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let out =
            run(&config(&["lift", "--family", "orbisack", "--p", "2", "--samples", "20", "--drop-class", "block"]))
                .unwrap();
        assert_eq!(out.code, EXIT_FAILED);
        let v: Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(v["passed"], false);
        assert!(v["counterexample"]["point"].is_array());
    }
}
