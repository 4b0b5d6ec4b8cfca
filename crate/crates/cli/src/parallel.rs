//! Column-parallel patch evaluation and parallel search restarts.
//!
//! Columns are independent once their seeds on the base row are known, and
//! every column is computed by the same sequence of operations whichever thread
//! runs it, so results are bit-identical to the sequential path.

use rayon::prelude::*;

use bjorling_core::bjorling::{DomainGrid, IsotropicMap, SurfacePatch};
use bjorling_core::search::{SearchPlan, SearchResult};
use bjorling_core::strip::Strip;
use bjorling_core::Result;

pub fn evaluate_map(map: &IsotropicMap, grid: &DomainGrid) -> Result<SurfacePatch> {
    let seeds = map.column_seeds(grid)?;
    let columns = seeds
        .par_iter()
        .map(|s| map.eval_column(grid, s))
        .collect::<Result<Vec<_>>>()?;
    SurfacePatch::from_columns(*grid, map.clone(), columns)
}

pub fn evaluate(strip: &Strip, grid: &DomainGrid, quad_tol: f64) -> Result<SurfacePatch> {
    evaluate_map(&IsotropicMap::new(strip.clone(), grid.base, quad_tol), grid)
}

pub fn search(plan: &SearchPlan) -> Result<SearchResult> {
    let outcomes = (0..plan.restart_count())
        .into_par_iter()
        .map(|i| plan.run_restart(i))
        .collect();
    plan.finish(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bjorling_core::bjorling::evaluate_patch;
    use bjorling_core::catalog::builtin;

    #[test]
    fn matches_the_sequential_evaluation_bit_for_bit() {
        for name in ["circle", "enneper_cubic", "ellipse"] {
            let e = builtin(name, &[]).unwrap();
            let seq = evaluate_patch(&e.strip, &e.default_grid, 1e-10).unwrap();
            let par = evaluate(&e.strip, &e.default_grid, 1e-10).unwrap();
            assert_eq!(seq, par, "{name}");
        }
    }
}
