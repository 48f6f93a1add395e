use proptest::prelude::*;
use triaxis_core::coupling::{CouplingParams, GrowthModel, MarketStructure, TrapKind};
use triaxis_core::trajectory::{simulate, CareerPlan, PhaseSchedule, PlanMove, Role, SimulationInputs};
use triaxis_core::{CareerState, ImpactFactors, Preferences};

/// Straight-line re-derivation of one plan, kept free of library helpers
/// other than the data types.
fn oracle(plan: &CareerPlan, roles: &[Role], market: &MarketStructure, c: &CouplingParams, g: &GrowthModel, w0: f64) -> Vec<(f64, f64, f64, bool)> {
    let mut w = w0;
    let mut role: Option<&Role> = None;
    let mut out = Vec::new();
    for year in 0..plan.horizon {
        if let Some(mv) = plan.moves.iter().find(|m| m.year == year) {
            let next = roles.iter().find(|r| r.id == mv.role_id).unwrap();
            if w >= next.entry_min_w {
                w = (w - next.entry_cost_w).max(0.0);
                role = Some(next);
            }
        }
        let r = role.unwrap();
        let f = &r.impact;
        let m = 100.0 * f.scale() * f.neglectedness() * f.tractability() * f.personal_fit() / 625.0;
        let base = match *market {
            MarketStructure::Auction { gamma } => 100.0 * (w / 100.0).powf(gamma),
            MarketStructure::WinnerTakeAll { threshold_w, low_cap, high_cap } => {
                if w < threshold_w { low_cap } else { high_cap }
            }
        };
        let cap = (base * (1.0 + c.beta_meaning * m / 100.0)).min(100.0);
        let trapped = r.offered_autonomy > cap;
        if trapped {
            w *= 1.0 - c.delta_instability;
        } else {
            let we = w.max(g.floor_w);
            w = (w + g.eta * r.practice_quality * we * (1.0 - we / 100.0).powi(2)).clamp(0.0, 100.0);
        }
        out.push((w, r.offered_autonomy.min(cap), cap, trapped));
    }
    out
}

fn arb_role(i: usize) -> impl Strategy<Value = Role> {
    (0u8..=10, 0u8..=100, prop::array::uniform4(0u8..=5), 0u32..250_000, 0u8..=60, 0u8..=20).prop_map(
        move |(q, a, f, income, gate, cost)| Role {
            id: format!("r{i}"),
            practice_quality: q as f64 / 10.0,
            offered_autonomy: a as f64,
            impact: ImpactFactors::new(f[0] as f64, f[1] as f64, f[2] as f64, f[3] as f64).unwrap(),
            income: income as f64,
            entry_min_w: gate as f64,
            entry_cost_w: cost as f64,
        },
    )
}

fn arb_market() -> impl Strategy<Value = MarketStructure> {
    prop_oneof![
        (1u8..=30).prop_map(|g| MarketStructure::Auction { gamma: g as f64 / 10.0 }),
        (0u8..=100, 0u8..=50, 50u8..=100).prop_map(|(t, lo, hi)| MarketStructure::WinnerTakeAll {
            threshold_w: t as f64,
            low_cap: lo as f64,
            high_cap: hi as f64,
        }),
    ]
}

#[derive(Debug, Clone)]
struct Case {
    roles: Vec<Role>,
    plan: CareerPlan,
    market: MarketStructure,
    coupling: CouplingParams,
    w0: f64,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (1usize..=5)
        .prop_flat_map(|n| {
            (
                (0..n).map(arb_role).collect::<Vec<_>>(),
                prop::collection::vec((1u32..=6, 0..n), 0..5),
                1u32..=8,
                arb_market(),
                (0u8..=10, 1u8..=10, prop::option::of(0u8..=100)),
                0u8..=100,
            )
        })
        .prop_map(|(mut roles, gaps, tail, market, (beta, delta, w_star), w0)| {
            // the first role must admit the starting capital
            roles[0].entry_min_w = 0.0;
            let mut moves = vec![PlanMove { year: 0, role_id: "r0".into() }];
            let mut year = 0;
            for (gap, r) in gaps {
                year += gap;
                moves.push(PlanMove { year, role_id: format!("r{r}") });
            }
            Case {
                roles,
                plan: CareerPlan { horizon: year + tail, moves },
                market,
                coupling: CouplingParams {
                    w_star_trap: w_star.map(f64::from),
                    beta_meaning: beta as f64 / 10.0,
                    delta_instability: delta as f64 / 20.0,
                },
                w0: w0 as f64,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simulation_matches_oracle(case in arb_case()) {
        let growth = GrowthModel::default();
        let phases = PhaseSchedule::default();
        let inputs = SimulationInputs {
            roles: &case.roles,
            market: &case.market,
            coupling: &case.coupling,
            growth: &growth,
            phases: &phases,
            initial: CareerState::new(case.w0, 30.0, 30.0).unwrap(),
            prefs: Preferences::default(),
        };
        let t = simulate(&case.plan, &inputs).unwrap();
        let expected = oracle(&case.plan, &case.roles, &case.market, &case.coupling, &growth, case.w0);
        prop_assert_eq!(t.entries.len(), expected.len());
        let mut prev_w = case.w0;
        for (e, (w, a, cap, trapped)) in t.entries.iter().zip(expected) {
            prop_assert!((e.state.w() - w).abs() < 1e-9, "year {} W {} vs {}", e.year, e.state.w(), w);
            prop_assert!((e.state.a() - a).abs() < 1e-9);
            prop_assert!((e.autonomy_cap - cap).abs() < 1e-9);
            prop_assert_eq!(e.trap.trap == TrapKind::FirstTrap, trapped);
            prop_assert!(e.state.a() <= e.autonomy_cap);
            if trapped && prev_w > 0.0 {
                prop_assert!(e.state.w() < prev_w);
            }
            if e.trap.trap == TrapKind::SecondTrap {
                prop_assert!(case.coupling.w_star_trap.is_some());
            }
            prev_w = e.state.w();
        }
        prop_assert_eq!(t.terminal_state, t.entries.last().unwrap().state);
    }

    #[test]
    fn simulation_is_deterministic(case in arb_case()) {
        let growth = GrowthModel::default();
        let phases = PhaseSchedule::default();
        let inputs = SimulationInputs {
            roles: &case.roles,
            market: &case.market,
            coupling: &case.coupling,
            growth: &growth,
            phases: &phases,
            initial: CareerState::new(case.w0, 0.0, 0.0).unwrap(),
            prefs: Preferences::default(),
        };
        prop_assert_eq!(simulate(&case.plan, &inputs).unwrap(), simulate(&case.plan, &inputs).unwrap());
    }
}
