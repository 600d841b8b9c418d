//! Report records and their json, csv and pretty renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use comax_core::comonotone::Verdict;
use comax_core::framework::{Outcome, Solution};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Framework,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionRecord {
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
    /// Component per row (1-based); 0 leaves the row unassigned.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    pub fallback: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub problem: String,
    pub mode: Mode,
    pub value: f64,
    /// 1-based.
    pub support: Vec<usize>,
    pub solution: SolutionRecord,
    pub regime: Option<String>,
    pub complexity: Option<String>,
    pub rank: Option<usize>,
    pub n: usize,
    pub candidate_count: Option<usize>,
    pub cell_count: Option<usize>,
    pub oracle_calls: Option<usize>,
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub framework_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_agreement: Option<bool>,
}

fn solution_record(s: &Solution, d: Option<usize>) -> SolutionRecord {
    SolutionRecord {
        x: s.x.clone(),
        signs: s.signs.clone(),
        assignment: s.assignment.as_ref().map(|labels| {
            let d = d.unwrap_or(0);
            labels
                .iter()
                .map(|&l| if l < d { l + 1 } else { 0 })
                .collect()
        }),
        fallback: s.fallback,
    }
}

impl SolveRecord {
    pub fn new(
        problem: &str,
        mode: Mode,
        n: usize,
        d: Option<usize>,
        framework: Option<&Outcome>,
        oracle: Option<&Solution>,
        timing: bool,
    ) -> Self {
        let primary = framework
            .map(|o| &o.solution)
            .or(oracle)
            .expect("at least one mode ran");
        let report = framework.map(|o| &o.report);
        let agreement = match (framework, oracle) {
            (Some(f), Some(o)) => Some(agrees(f.solution.value, o.value)),
            _ => None,
        };
        Self {
            problem: problem.into(),
            mode,
            value: primary.value,
            support: primary.one_based_support(),
            solution: solution_record(primary, d),
            regime: report.map(|r| r.regime.clone()),
            complexity: report.map(|r| r.complexity.clone()),
            rank: report.map(|r| r.rank),
            n,
            candidate_count: report.map(|r| r.candidate_count),
            cell_count: report.map(|r| r.cell_count),
            oracle_calls: report.map(|r| r.oracle_calls),
            wall_ms: if timing {
                report.and_then(|r| r.wall_ms)
            } else {
                None
            },
            framework_value: (mode == Mode::Both)
                .then(|| framework.map(|f| f.solution.value))
                .flatten(),
            oracle_value: (mode == Mode::Both)
                .then(|| oracle.map(|o| o.value))
                .flatten(),
            mode_agreement: agreement,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut out = format!(
                    "# comax solve report\n# problem={} mode={:?}\n",
                    self.problem, self.mode
                )
                .to_lowercase();
                out.push_str("value,support,regime,rank,n,candidate_count,cell_count,oracle_calls,wall_ms,mode_agreement\n");
                let support: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
                let opt = |v: Option<String>| v.unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{:?},{},{},{},{},{},{},{},{},{}",
                    self.value,
                    support.join(";"),
                    opt(self.regime.clone()),
                    opt(self.rank.map(|v| v.to_string())),
                    self.n,
                    opt(self.candidate_count.map(|v| v.to_string())),
                    opt(self.cell_count.map(|v| v.to_string())),
                    opt(self.oracle_calls.map(|v| v.to_string())),
                    opt(self.wall_ms.map(|v| format!("{v:.3}"))),
                    opt(self.mode_agreement.map(|v| v.to_string())),
                );
                out
            }
            Format::Pretty => {
                let mut out = String::new();
                let support: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
                let _ = writeln!(out, "problem       {}", self.problem);
                let _ = writeln!(
                    out,
                    "mode          {}",
                    format!("{:?}", self.mode).to_lowercase()
                );
                let _ = writeln!(out, "value         {}", self.value);
                let _ = writeln!(out, "support       {{{}}}", support.join(", "));
                if let Some(a) = &self.solution.assignment {
                    let parts: Vec<String> = a.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "assignment    {}", parts.join(" "));
                }
                if let (Some(regime), Some(cx)) = (&self.regime, &self.complexity) {
                    let _ = writeln!(out, "regime        {regime}, candidates bounded by {cx}");
                    let _ = writeln!(
                        out,
                        "measured      r = {}, n = {}: {} cells, {} candidates, {} oracle calls",
                        self.rank.unwrap_or(0),
                        self.n,
                        self.cell_count.unwrap_or(0),
                        self.candidate_count.unwrap_or(0),
                        self.oracle_calls.unwrap_or(0)
                    );
                }
                if let Some(ms) = self.wall_ms {
                    let _ = writeln!(out, "wall time     {ms:.3} ms");
                }
                if self.solution.fallback {
                    let _ = writeln!(
                        out,
                        "note          no support attained an optimum; fallback point reported"
                    );
                }
                if let Some(ok) = self.mode_agreement {
                    let _ = writeln!(
                        out,
                        "agreement     {} (framework {}, oracle {})",
                        if ok { "yes" } else { "NO" },
                        self.framework_value.unwrap_or(f64::NAN),
                        self.oracle_value.unwrap_or(f64::NAN)
                    );
                }
                out
            }
        }
    }
}

/// `|framework − oracle| ≤ 1e−6·(1 + |oracle|)`.
pub fn agrees(framework: f64, oracle: f64) -> bool {
    (framework - oracle).abs() <= 1e-6 * (1.0 + oracle.abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub v: Vec<f64>,
    /// Exact rational entries.
    pub v_exact: Vec<String>,
    /// 1-based.
    pub i: usize,
    pub j: usize,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub verdict: String,
    pub dim: usize,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Verdict of the planar test when the set lives in two dimensions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planar: Option<String>,
}

impl CheckRecord {
    pub fn new(verdict: &Verdict, dim: usize, points: usize, planar: Option<&Verdict>) -> Self {
        let witness = match verdict {
            Verdict::Yes => None,
            Verdict::No { v, i, j, kind } => Some(Witness {
                v: verdict.witness_f64().unwrap_or_default(),
                v_exact: v.iter().map(|x| x.to_string()).collect(),
                i: i + 1,
                j: j + 1,
                kind: format!("{kind:?}").to_lowercase(),
            }),
        };
        let word = |v: &Verdict| if v.is_yes() { "YES" } else { "NO" }.to_string();
        Self {
            verdict: word(verdict),
            dim,
            points,
            witness,
            planar: planar.map(word),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut out = String::from("# comax check report\nverdict,dim,points,v,i,j,kind\n");
                let (v, i, j, k) = match &self.witness {
                    Some(w) => (
                        w.v_exact.join(";"),
                        w.i.to_string(),
                        w.j.to_string(),
                        w.kind.clone(),
                    ),
                    None => Default::default(),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{v},{i},{j},{k}",
                    self.verdict, self.dim, self.points
                );
                out
            }
            Format::Pretty => {
                let mut out = String::new();
                match &self.witness {
                    None => out.push_str("YES\n"),
                    Some(w) => {
                        let _ = writeln!(
                            out,
                            "NO  witness v = ({}), i = {}, j = {} ({})",
                            w.v_exact.join(", "),
                            w.i,
                            w.j,
                            w.kind
                        );
                    }
                }
                if let Some(p) = &self.planar {
                    let _ = writeln!(out, "planar test: {p}");
                }
                out
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
