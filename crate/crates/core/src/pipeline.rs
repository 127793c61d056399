//! Default parameters, family selection and suite reports.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cover::{CoverError, CoveredGraph};
use crate::graph::{CaseTag, CoxeterGraph, GraphError, Label, VertexId};
use crate::rep::{
    build_cover_rep, build_pgl_rep, build_pi1_rep, replace_infinite_labels, Family,
    OrientedSpecialEdge, RepError, RepWindow, Structure,
};
use crate::scalar::ScalarContext;
use crate::verify::{
    primary_side, run_suite, Status, SuiteConfig, VerificationReport, PGL_CLOSURE_BUDGET,
};

pub const DEFAULT_WINDOW: usize = 6;
pub const DEFAULT_DEPTH: usize = 10;
/// Label substituted for `∞` before the fundamental-group construction.
pub const INFINITE_REPLACEMENT: u32 = 3;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("family {family} does not apply: {reason}")]
    Inapplicable { family: Family, reason: String },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOptions {
    pub family: Family,
    pub window: Option<usize>,
    pub depth: Option<usize>,
    pub buffer: Option<usize>,
    /// Special edges for the fundamental-group family, as `(tail, head)`.
    pub edge1: Option<(String, String)>,
    pub edge2: Option<(String, String)>,
    /// Distinguished edge `(s1, s2)` for the covering family.
    pub special: Option<(String, String)>,
}

impl BuildOptions {
    pub fn new(family: Family) -> Self {
        BuildOptions {
            family,
            window: None,
            depth: None,
            buffer: None,
            edge1: None,
            edge2: None,
            special: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowInfo {
    /// `W` for pi1 and pgl, `D` for cover.
    pub core: usize,
    pub buffer: usize,
    pub buffer_auto: bool,
    pub modulus: u32,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Built {
    pub rep: RepWindow,
    pub window: WindowInfo,
    pub construction: Value,
}

fn inapplicable(family: Family, reason: impl Into<String>) -> PipelineError {
    PipelineError::Inapplicable {
        family,
        reason: reason.into(),
    }
}

fn positive(v: Option<usize>, what: &'static str) -> Result<Option<usize>, PipelineError> {
    match v {
        Some(0) => Err(PipelineError::NonPositive(what)),
        v => Ok(v),
    }
}

fn edge_names(g: &CoxeterGraph, a: VertexId, b: VertexId) -> [String; 2] {
    [g.name(a).to_string(), g.name(b).to_string()]
}

/// Builds the representation window for `opts.family` with defaults filled in.
pub fn build(g: &CoxeterGraph, opts: &BuildOptions, seed: u64) -> Result<Built, PipelineError> {
    let window = positive(opts.window, "window")?;
    let depth = positive(opts.depth, "depth")?;
    let buffer = positive(opts.buffer, "buffer")?;
    match opts.family {
        Family::Pi1 => build_pi1(g, opts, window.unwrap_or(DEFAULT_WINDOW), buffer, seed),
        Family::Cover => build_cover(g, opts, depth.unwrap_or(DEFAULT_DEPTH), buffer, seed),
        Family::Pgl => {
            g.pgl_roles()
                .ok_or_else(|| inapplicable(Family::Pgl, "needs the path s1 -3- s2 -inf- s3"))?;
            let w = window.unwrap_or(DEFAULT_WINDOW);
            let b = buffer.unwrap_or(PGL_CLOSURE_BUDGET.max(6));
            let ctx = ScalarContext::new([3]);
            let rep = build_pgl_rep(g, w, b, &ctx)?;
            let Structure::Pgl(p) = rep.structure() else {
                unreachable!()
            };
            let roles: Vec<&str> = p.roles.iter().map(|&v| g.name(v)).collect();
            Ok(Built {
                window: WindowInfo {
                    core: w,
                    buffer: b,
                    buffer_auto: buffer.is_none(),
                    modulus: ctx.modulus(),
                    seed,
                },
                construction: json!({ "roles": roles }),
                rep,
            })
        }
    }
}

fn orient(g: &CoxeterGraph, pair: &(String, String)) -> Result<OrientedSpecialEdge, PipelineError> {
    Ok(OrientedSpecialEdge {
        tail: g.vertex(&pair.0)?,
        head: g.vertex(&pair.1)?,
    })
}

fn build_pi1(
    g: &CoxeterGraph,
    opts: &BuildOptions,
    w: usize,
    buffer: Option<usize>,
    seed: u64,
) -> Result<Built, PipelineError> {
    if g.cycle_rank() < 2 {
        return Err(inapplicable(
            Family::Pi1,
            "needs at least two independent circuits",
        ));
    }
    let replaced = g.edges().filter(|(_, _, l)| *l == Label::Infinite).count();
    let g1 = replace_infinite_labels(g, INFINITE_REPLACEMENT);
    let s0 = 0;
    let tree = g1.spanning_tree(s0)?;
    let gens = g1.fundamental_generators(&tree, s0)?;
    let natural = |i: usize| OrientedSpecialEdge {
        tail: gens[i].tail,
        head: gens[i].head,
    };
    let e1 = opts
        .edge1
        .as_ref()
        .map(|p| orient(&g1, p))
        .transpose()?
        .unwrap_or_else(|| natural(0));
    let e2 = match &opts.edge2 {
        Some(p) => orient(&g1, p)?,
        None => {
            let key = (e1.tail.min(e1.head), e1.tail.max(e1.head));
            let other = gens.iter().position(|c| c.edge != key).expect("rank >= 2");
            natural(other)
        }
    };
    let max_m = g1.max_finite_label().unwrap_or(3) as usize;
    let longest = gens.iter().map(|c| c.len()).max().unwrap_or(0);
    let b = buffer.unwrap_or(2 * max_m + longest);
    let ctx = ScalarContext::new(g1.finite_labels());
    let rep = build_pi1_rep(&g1, &tree, s0, e1, e2, w, b, &ctx)?;
    let Structure::Pi1(p) = rep.structure() else {
        unreachable!()
    };
    let tree_edges: Vec<[String; 2]> = tree
        .edges()
        .iter()
        .map(|&(a, b)| edge_names(&g1, a, b))
        .collect();
    let construction = json!({
        "case": g.classify_case().to_string(),
        "base": g1.name(s0),
        "tree": tree_edges,
        "edge1": edge_names(&g1, e1.tail, e1.head),
        "edge2": edge_names(&g1, e2.tail, e2.head),
        "generators": p.generators.iter().map(|c| c.render(&g1)).collect::<Vec<_>>(),
        "infinite_labels_replaced": replaced,
        "replacement_label": INFINITE_REPLACEMENT,
    });
    Ok(Built {
        window: WindowInfo {
            core: w,
            buffer: b,
            buffer_auto: buffer.is_none(),
            modulus: ctx.modulus(),
            seed,
        },
        construction,
        rep,
    })
}

/// First edge with a finite label `≥ 4`, smaller vertex id first.
pub fn default_special_edge(g: &CoxeterGraph) -> Option<(VertexId, VertexId)> {
    g.edges()
        .find(|(_, _, l)| matches!(l, Label::Finite(m) if *m >= 4))
        .map(|(a, b, _)| (a, b))
}

fn build_cover(
    g: &CoxeterGraph,
    opts: &BuildOptions,
    d: usize,
    buffer: Option<usize>,
    seed: u64,
) -> Result<Built, PipelineError> {
    if d < 2 {
        return Err(inapplicable(Family::Cover, "depth must be at least 2"));
    }
    let (s1, s2) = match &opts.special {
        Some((a, b)) => (g.vertex(a)?, g.vertex(b)?),
        None => default_special_edge(g)
            .ok_or_else(|| inapplicable(Family::Cover, "no edge with label >= 4"))?,
    };
    match g.label(s1, s2) {
        Some(Label::Finite(m)) if m >= 4 => {}
        Some(l) => {
            return Err(inapplicable(
                Family::Cover,
                format!("distinguished edge has label {l}"),
            ))
        }
        None => return Err(GraphError::NotAnEdge(g.name(s1).into(), g.name(s2).into()).into()),
    }
    let b = buffer.unwrap_or(2 * g.max_finite_label().unwrap_or(2) as usize);
    let cover = CoveredGraph::build(g, s1, s2, d + b)?;
    let ctx = ScalarContext::new(g.finite_labels());
    let rep = build_cover_rep(g, &cover, d, b, &ctx)?;
    let construction = json!({
        "case": g.classify_case().to_string(),
        "special": edge_names(g, s1, s2),
        "label": g.label(s1, s2),
        "cover_depth": cover.depth(),
        "cover_vertices": cover.len(),
        "primary_side": primary_side(&cover, d),
    });
    Ok(Built {
        window: WindowInfo {
            core: d,
            buffer: b,
            buffer_auto: buffer.is_none(),
            modulus: ctx.modulus(),
            seed,
        },
        construction,
        rep,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub graph: String,
    pub family: Family,
    pub window: WindowInfo,
    pub construction: Value,
    pub checks: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(VerificationReport::is_failure)
    }

    pub fn check(&self, name: &str) -> Option<&VerificationReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = format!("graph {} family {}\n", self.graph, self.family);
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
                Status::Evidence => "evidence",
            };
            out.push_str(&format!("{status:>8}  {}", c.name));
            if let Some(cx) = &c.counterexample {
                out.push_str(&format!(
                    "  at {}: expected {}, got {}",
                    cx.index, cx.expected, cx.got
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds and runs the full suite.
pub fn verify(
    name: &str,
    g: &CoxeterGraph,
    opts: &BuildOptions,
    config: &SuiteConfig,
) -> Result<SuiteReport, PipelineError> {
    let built = build(g, opts, config.seed)?;
    Ok(report_for(name, &built, config))
}

pub fn report_for(name: &str, built: &Built, config: &SuiteConfig) -> SuiteReport {
    SuiteReport {
        graph: name.to_string(),
        family: built.rep.family(),
        window: built.window.clone(),
        construction: built.construction.clone(),
        checks: run_suite(&built.rep, config),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub vertices: usize,
    pub edges: usize,
    pub cycle_rank: usize,
    pub case: CaseTag,
    pub generators: Vec<String>,
    pub recommended: Option<Family>,
}

pub fn analyze(g: &CoxeterGraph) -> Result<Analysis, PipelineError> {
    let tree = g.spanning_tree(0)?;
    let generators = g
        .fundamental_generators(&tree, 0)?
        .iter()
        .map(|c| c.render(g))
        .collect();
    let case = g.classify_case();
    let recommended = match case {
        CaseTag::TwoCircuits => Some(Family::Pi1),
        CaseTag::OneCircuitWithBigLabel if default_special_edge(g).is_some() => Some(Family::Cover),
        CaseTag::Tree if g.pgl_roles().is_some() => Some(Family::Pgl),
        _ => None,
    };
    Ok(Analysis {
        vertices: g.len(),
        edges: g.edge_count(),
        cycle_rank: g.cycle_rank(),
        case,
        generators,
        recommended,
    })
}

impl Analysis {
    pub fn render(&self) -> String {
        let mut out = format!(
            "vertices: {}\nedges: {}\ncycle rank: {}\ncase: {}, {} generators\n",
            self.vertices,
            self.edges,
            self.cycle_rank,
            self.case,
            self.generators.len()
        );
        for (i, c) in self.generators.iter().enumerate() {
            out.push_str(&format!("c{} = {}\n", i + 1, c));
        }
        match self.recommended {
            Some(f) => out.push_str(&format!("recommended family: {f}\n")),
            None => out.push_str("recommended family: none\n"),
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgl_rejects_other_graphs() {
        let g = CoxeterGraph::parse("vertices: a b c\nedge a b 3\nedge b c 3").unwrap();
        let r = build(&g, &BuildOptions::new(Family::Pgl), 0);
        assert!(matches!(r, Err(PipelineError::Inapplicable { .. })));
    }

    #[test]
    fn default_buffers() {
        let g = CoxeterGraph::parse("vertices: a b c\nedge a b 5\nedge b c 3\nedge c a 3").unwrap();
        let mut opts = BuildOptions::new(Family::Cover);
        opts.depth = Some(4);
        let built = build(&g, &opts, 0).unwrap();
        assert_eq!(built.window.buffer, 10);
        assert_eq!(built.window.modulus, 15);
        opts.buffer = Some(0);
        assert!(matches!(
            build(&g, &opts, 0),
            Err(PipelineError::NonPositive("buffer"))
        ));
    }

    #[test]
    fn analysis_of_path() {
        let g = CoxeterGraph::parse("vertices: a b c\nedge a b 3\nedge b c 3").unwrap();
        let a = analyze(&g).unwrap();
        assert_eq!(a.case, CaseTag::Tree);
        assert!(a.render().contains("case: Tree, 0 generators"));
        assert_eq!(a.recommended, None);
    }
}
