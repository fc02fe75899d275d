use std::collections::BTreeMap;

use num_rational::BigRational;
use qpcover::fixtures::fixture;
use qpcover::grading::{
    build_extended_cyclic_cover, check_nice_grading, check_non_wrapping, find_nice_grading,
};
use qpcover::jacobian::TruncatedJacobian;

type Q = BigRational;

#[test]
fn torus_cover_projectives_have_nice_gradings() {
    let f = fixture::<Q>("torus1p-cover3").unwrap();
    let c = f.cover.unwrap();
    let alg = TruncatedJacobian::build(&f.quiver, &f.potential, 7).unwrap();
    for k in 0..f.quiver.num_vertices() {
        let sup = alg.projective(k).supports(f.quiver.num_vertices());
        let g = find_nice_grading(&c, &sup, k, 1).unwrap().expect("nice grading at bound 1");
        assert!(check_nice_grading(&c, &sup, &g.vertices).unwrap().is_empty());
        // shifting the whole grading keeps it nice
        let shifted: BTreeMap<usize, i64> = g.vertices.iter().map(|(&v, &x)| (v, x + 5)).collect();
        assert!(check_nice_grading(&c, &sup, &shifted).unwrap().is_empty());
    }
}

#[test]
fn sheet_labels_grade_the_torus_example() {
    let f = fixture::<Q>("torus1p-cover3").unwrap();
    let c = f.cover.unwrap();
    let alg = TruncatedJacobian::build(&f.quiver, &f.potential, 7).unwrap();
    let k = f.quiver.vertex_index("a^1").unwrap();
    let sup = alg.projective(k).supports(9);
    let sheets = c.sheets.clone().unwrap();
    let g: BTreeMap<usize, i64> = sup.vertices.iter().map(|&v| (v, sheets[v] as i64)).collect();
    assert!(check_nice_grading(&c, &sup, &g).unwrap().is_empty());
}

#[test]
fn non_wrapping_fixtures() {
    for name in ["liegrass-cover2", "liegrass-cover3", "torus1p-cover3"] {
        let f = fixture::<Q>(name).unwrap();
        let c = f.cover.unwrap();
        assert!(check_non_wrapping(&c, &f.potential, false).unwrap().is_some(), "{name}");
    }
    let f = fixture::<Q>("loopwrap").unwrap();
    assert!(check_non_wrapping(&f.cover.unwrap(), &f.potential, false).unwrap().is_none());
}

#[test]
fn extended_cover_liegrass() {
    let f = fixture::<Q>("liegrass-cover2").unwrap();
    let c = f.cover.unwrap();
    let wa = check_non_wrapping(&c, &f.potential, false).unwrap().unwrap();
    let l = 2;
    let ext = build_extended_cyclic_cover(&c, &wa, l).unwrap();
    assert_eq!(ext.covering.order, 8);
    assert!(ext.covering.validate().is_ok());
    let wbar = f.base_potential.unwrap();
    assert!(ext.covering.lifts_closed(&wbar));
    let sheets = ext.covering.sheets.clone().unwrap();
    // degrees read back from sheet labels
    for (a, ar) in ext.covering.total.arrows().iter().enumerate() {
        let ab = ext.covering.amap[a];
        let diff = sheets[ar.target] as i64 - sheets[ar.source] as i64;
        if diff.abs() < c.order as i64 {
            assert_eq!(diff, ext.degrees[ab]);
        }
    }
    // middle-sheet projectives are graded by the sheet labels
    let w = ext.covering.sigma_potential(&wbar);
    let alg = TruncatedJacobian::build(&ext.covering.total, &w, l).unwrap();
    let nb = ext.covering.base.num_vertices();
    let mid = l * c.order;
    for vb in 0..nb {
        let k = mid * nb + vb;
        let sup = alg.projective(k).supports(ext.covering.total.num_vertices());
        let g: BTreeMap<usize, i64> = sup.vertices.iter().map(|&v| (v, sheets[v] as i64)).collect();
        assert!(check_nice_grading(&ext.covering, &sup, &g).unwrap().is_empty());
    }
}
