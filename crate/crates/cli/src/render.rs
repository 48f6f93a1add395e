//! Plain-text tables for terminal output.

use serde::Serialize;
use serde_json::Value;

use triaxis_core::commands::{
    ArchetypesReport, FrontierReport, HouseholdReport, OptionsReport, Report, SatisficeReport,
    ScoreReport, SimulateReport,
};
use triaxis_core::household::{EquilibriumReport, Profile};
use triaxis_core::satisficing::Relaxation;
use triaxis_core::scenario::canonical::format_number as num;
use triaxis_core::trajectory::StrategyReport;
use triaxis_core::{Axis, CareerState, LabeledState};

/// Numeric columns right-aligned, text columns left-aligned.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for r in &self.rows {
            for (i, c) in r.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let numeric: Vec<bool> = (0..widths.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].as_str())
                    .filter(|c| !c.is_empty() && *c != "-")
                    .all(|c| c.parse::<f64>().is_ok())
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if numeric[i] {
                    s.push_str(&format!("{c:>w$}", w = widths[i]));
                } else {
                    s.push_str(&format!("{c:<w$}", w = widths[i]));
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn tag<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}

fn state_cells(s: &CareerState) -> Vec<String> {
    vec![num(s.w()), num(s.a()), num(s.m())]
}

fn states_table(states: &[LabeledState]) -> String {
    let mut t = Table::new(&["option", "W", "A", "M"]);
    for o in states {
        let mut r = vec![o.label.clone()];
        r.extend(state_cells(&o.state));
        t.row(r);
    }
    t.render()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

pub fn report(r: &Report) -> String {
    match r {
        Report::Score(x) => score(x),
        Report::Frontier(x) => frontier(x),
        Report::Simulate(x) => simulate(x),
        Report::Satisfice(x) => satisfice(x),
        Report::Strategy(x) => strategy(x),
        Report::Options(x) => options(x),
        Report::Household(x) => household(x),
        Report::Archetypes(x) => archetypes(x),
    }
}

/// Renders the detail of an infeasible result when it is a satisficing
/// report; anything else falls back to JSON.
pub fn infeasible(detail: &Value) -> String {
    match serde_json::from_value::<SatisficeReport>(detail.clone()) {
        Ok(r) => satisfice(&r),
        Err(_) => format!("{detail:#}\n"),
    }
}

fn score(r: &ScoreReport) -> String {
    let p = &r.preferences;
    let mut out = format!(
        "preferences: lambda_w={} lambda_a={} lambda_m={}\n\n",
        num(p.lambda_w()),
        num(p.lambda_a()),
        num(p.lambda_m())
    );
    let mut t = Table::new(&["role", "W", "A", "M", "utility"]);
    for row in &r.rows {
        let mut cells = vec![row.label.clone()];
        cells.extend(state_cells(&row.state));
        cells.push(num(row.utility));
        t.row(cells);
    }
    out.push_str(&t.render());
    out
}

fn frontier(r: &FrontierReport) -> String {
    let mut out = states_table(&r.frontier);
    if r.dominated.is_empty() {
        out.push_str("\nno dominated roles\n");
    } else {
        out.push_str(&format!("\ndominated: {}\n", r.dominated.join(", ")));
    }
    out
}

fn simulate(r: &SimulateReport) -> String {
    let tr = &r.trajectory;
    let mut out = format!("plan: {}\n\n", r.plan);
    let mut t = Table::new(&["year", "role", "W", "A", "M", "cap", "phase", "trap", "note"]);
    let mut cells = vec!["start".to_string(), String::new()];
    cells.extend(state_cells(&tr.initial));
    cells.extend([String::new(), String::new(), String::new(), String::new()]);
    t.row(cells);
    for e in &tr.entries {
        let mut cells = vec![e.year.to_string(), e.role_id.clone()];
        cells.extend(state_cells(&e.state));
        cells.push(num(e.autonomy_cap));
        cells.push(tag(&e.phase));
        cells.push(if e.trap.is_trap() {
            tag(&e.trap.trap)
        } else {
            "-".into()
        });
        cells.push(
            e.refused_move
                .as_ref()
                .map(|m| format!("refused {m}"))
                .unwrap_or_default(),
        );
        t.row(cells);
    }
    out.push_str(&t.render());
    out.push_str(&format!(
        "\nterminal: W={} A={} M={}  utility={}\n",
        num(tr.terminal_state.w()),
        num(tr.terminal_state.a()),
        num(tr.terminal_state.m()),
        num(tr.terminal_utility)
    ));
    out
}

fn satisfice(r: &SatisficeReport) -> String {
    let th = &r.thresholds;
    let mut out = format!(
        "thresholds: w_min={} a_min={} m_min={}\n\n",
        num(th.get(Axis::W)),
        num(th.get(Axis::A)),
        num(th.get(Axis::M))
    );
    if r.feasible.is_empty() {
        out.push_str("no feasible roles\n");
    } else {
        out.push_str(&states_table(&r.feasible));
    }
    match &r.relaxation {
        None | Some(Relaxation::AlreadyFeasible { .. }) => {}
        Some(Relaxation::Advice(a)) => out.push_str(&format!(
            "\nadvice: lower {} threshold to {} (regret {}) to admit {}\n",
            a.axis,
            num(a.required_threshold),
            num(a.regret),
            a.unlocked_options.join(", ")
        )),
        Some(Relaxation::MultiAxisInfeasible { deficits }) => {
            out.push_str("\nno single-axis relaxation suffices\n\n");
            let mut t = Table::new(&["axis", "threshold", "best", "deficit", "relaxable"]);
            for d in deficits {
                t.row(vec![
                    d.axis.to_string(),
                    num(d.threshold),
                    num(d.best_value),
                    num(d.deficit),
                    d.relaxable.to_string(),
                ]);
            }
            out.push_str(&t.render());
        }
    }
    out
}

fn strategy(r: &StrategyReport) -> String {
    let mut t = Table::new(&["strategy", "outcome", "p", "W", "A", "M", "utility"]);
    for b in &r.branches {
        let mut cells = vec![tag(&b.strategy), tag(&b.outcome), num(b.probability)];
        cells.extend(state_cells(&b.terminal_state));
        cells.push(num(b.utility));
        t.row(cells);
    }
    let mut out = t.render();
    out.push_str(&format!(
        "\nexpected utility: sequential={} simultaneous={}\npreferred: {}\n",
        num(r.sequential_eu),
        num(r.simultaneous_eu),
        tag(&r.preferred)
    ));
    out
}

fn options(r: &OptionsReport) -> String {
    let v = &r.value;
    let list = |xs: &[String]| {
        if xs.is_empty() {
            "-".to_string()
        } else {
            xs.join(", ")
        }
    };
    let mut t = Table::new(&["plan", "terminal W", "max M", "missions"]);
    t.row(vec![
        format!("{} (specialized)", r.specialized),
        num(v.terminal_w_spec),
        num(v.max_meaning_spec),
        list(&v.reachable_missions_spec),
    ]);
    t.row(vec![
        format!("{} (generalized)", r.generalized),
        num(v.terminal_w_gen),
        num(v.max_meaning_gen),
        list(&v.reachable_missions_gen),
    ]);
    let mut out = t.render();
    out.push_str(&format!(
        "\nW gap={}  meaning gap={}\n",
        num(v.w_gap),
        num(v.meaning_gap)
    ));
    out
}

fn profile_cells(p: &Profile) -> Vec<String> {
    vec![
        format!("({}, {})", p.s1, p.s2),
        opt(p.payoff1),
        opt(p.payoff2),
        opt(p.joint_welfare),
    ]
}

fn equilibrium(e: &EquilibriumReport) -> String {
    let mut t = Table::new(&["profile", "payoff 1", "payoff 2", "joint", "kind"]);
    for n in &e.pure_nash_profiles {
        let mut cells = profile_cells(&n.profile);
        cells.push(if n.pareto_suboptimal {
            "nash (pareto-suboptimal)".into()
        } else {
            "nash".into()
        });
        t.row(cells);
    }
    let mut cells = profile_cells(&e.cooperative_optimum);
    cells.push("cooperative".into());
    t.row(cells);
    let mut out = t.render();
    out.push_str(&format!("coordination gap: {}\n", num(e.gap)));
    if let Some(note) = &e.note {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

fn household(r: &HouseholdReport) -> String {
    let mut out = String::new();
    if let Some(t) = r.template {
        out.push_str(&format!("template: {}\n\n", t.name()));
    }
    let many = r.lifecycle.periods.len() > 1;
    for (i, p) in r.lifecycle.periods.iter().enumerate() {
        if many {
            out.push_str(&format!("period {}\n", i + 1));
        }
        out.push_str(&equilibrium(p));
        out.push('\n');
    }
    out.push_str(&format!(
        "combined welfare: cooperative={} nash={}\n",
        num(r.lifecycle.combined_cooperative_welfare),
        num(r.lifecycle.combined_nash_welfare)
    ));
    out
}

fn archetypes(r: &ArchetypesReport) -> String {
    let mut t = Table::new(&["archetype", "W", "A", "M", "levels", "variance"]);
    for a in &r.archetypes {
        let mut cells = vec![a.name.to_string()];
        cells.extend(state_cells(&a.default_state));
        cells.push(a.signature.iter().map(tag).collect::<Vec<_>>().join("/"));
        cells.push(a.variance_note.clone());
        t.row(cells);
    }
    let mut out = t.render();
    out.push('\n');
    let mut t = Table::new(&["from", "to", "W cost", "min W", "note"]);
    for c in &r.transitions {
        t.row(vec![
            c.from.to_string(),
            c.to.to_string(),
            num(c.w_cost),
            num(c.min_w_gate),
            c.note.clone(),
        ]);
    }
    out.push_str(&t.render());
    out
}
