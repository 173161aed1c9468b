use std::sync::Arc;

use biharm_core::families::{CatalogEntry, FamilyBuilder, FamilyParams, FamilyRegistry};
use biharm_core::fields::{ConformalMetric, Constant, Point4, ScalarField, StandardGrid};
use biharm_core::residuals::{
    evaluate_grid, EquationContext, EquationKind, EquationRegistry, ResidualEquation,
};
use biharm_core::solver::{
    ProfileSolver, RadialProfile, SolveOutcome, SolveRequest, SolverRegistry, EquationTag,
};
use biharm_core::Result;

struct Homothety;

impl FamilyBuilder for Homothety {
    fn name(&self) -> &'static str {
        "homothety"
    }
    fn build(&self, params: &FamilyParams) -> Result<CatalogEntry> {
        Ok(CatalogEntry {
            name: format!("homothety({})", params.delta),
            field: Arc::new(Constant(params.delta)),
            a: 0.0,
            big_a: Some(0.0),
            r_h: Some(0.0),
            metric: ConformalMetric::Flat,
            grid_radius: 2.0,
        })
    }
}

struct ValueOnly;

impl ResidualEquation for ValueOnly {
    fn kind(&self) -> EquationKind {
        EquationKind::Eq4d
    }
    fn magnitude(&self, f: &dyn ScalarField, _ctx: &EquationContext, x: &Point4) -> Result<f64> {
        Ok(f.value(x))
    }
}

struct Flat;

impl ProfileSolver for Flat {
    fn name(&self) -> &'static str {
        "flat"
    }
    fn solve(&self, req: &SolveRequest) -> Result<SolveOutcome> {
        let n = req.n.unwrap_or(8);
        let grid: Vec<f64> = (0..=n).map(|i| i as f64).collect();
        let profile = RadialProfile::new(EquationTag::R4Bubble, grid, vec![req.v0; n + 1])?;
        Ok(SolveOutcome {
            solver: self.name(),
            profile,
            converged: true,
            diagnostics: Default::default(),
            note: String::new(),
        })
    }
}

#[test]
fn standard_registries_list_their_strategies() {
    assert!(FamilyRegistry::standard().names().contains(&"bubble"));
    assert_eq!(SolverRegistry::standard().names(), vec!["radial", "s4", "torus"]);
    assert_eq!(EquationRegistry::standard().names().len(), 5);
}

#[test]
fn custom_family_runs_through_the_verifier() {
    let mut families = FamilyRegistry::standard();
    families.register(Arc::new(Homothety));
    let e = families
        .build("homothety", &FamilyParams { delta: 3.0, ..FamilyParams::default() })
        .unwrap();
    let eq = EquationRegistry::standard().get("bfo").unwrap();
    let grid = StandardGrid::new(20, e.grid_radius, 0.05, &[], 0);
    let rep = evaluate_grid(eq.as_ref(), e.field.as_ref(), &EquationContext::flat(0.0, 0.0), &grid);
    assert_eq!(rep.n_failed, 0);
    assert!(rep.sup < 1e-12);
}

#[test]
fn registering_replaces_a_strategy_by_name() {
    let mut eqs = EquationRegistry::empty();
    assert!(eqs.get("eq4d").is_err());
    eqs.register(Arc::new(ValueOnly));
    let grid = StandardGrid::new(10, 1.0, 0.05, &[], 0);
    let rep = evaluate_grid(
        eqs.get("eq4d").unwrap().as_ref(),
        &Constant(2.5),
        &EquationContext::flat(0.0, 0.0),
        &grid,
    );
    assert_eq!(rep.sup, 2.5);

    let mut solvers = SolverRegistry::empty();
    solvers.register(Arc::new(Flat));
    let out = solvers.get("flat").unwrap().solve(&SolveRequest::default()).unwrap();
    assert_eq!(out.profile.values, vec![2.0; 9]);
    assert!(solvers.get("radial").is_err());
}
