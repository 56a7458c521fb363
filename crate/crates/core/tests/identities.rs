use std::collections::BTreeMap;

use polyform::eval_polygonal;
use polyform::identity::{
    builtin_sets, check_complete_residues, recompute_s_grid, recompute_s_sets,
    solve_residue_system, verify_affine_identity, verify_builtin_sets, AffineTarget,
    IdentityClaim, ResidueSystemClaim, Solvability, Window, COMPLETE_RESIDUE_OFFSETS,
};

#[test]
fn builtin_sets_hold_numerically_for_many_m() {
    for set in builtin_sets() {
        for c in &set.claims {
            for m in 3..=50u32 {
                let lhs: i128 = c
                    .terms
                    .iter()
                    .map(|&(a, x)| a as i128 * eval_polygonal(m, x).unwrap() as i128)
                    .sum();
                let rhs = c.target.u as i128 * (m as i128 - 2) + c.target.v as i128;
                assert_eq!(lhs, rhs, "{} at m={m}", c.label);
            }
        }
    }
}

#[test]
fn builtin_sets_pass_symbolically() {
    let reports = verify_builtin_sets();
    for r in &reports {
        assert!(r.passed, "{}: {:?}", r.id, r.failures().collect::<Vec<_>>());
    }
    let sizes: BTreeMap<&str, usize> =
        builtin_sets().iter().map(|s| (s.id, s.claims.len())).collect();
    assert_eq!(sizes["122"], 6);
    assert_eq!(sizes["123"], 7);
    assert_eq!(sizes["124"], 8);
    assert_eq!(sizes["115"], 8);
    assert_eq!(sizes["TT"], 6);
}

#[test]
fn wrong_identity_is_rejected_with_residual() {
    // P(2) + P(1) = (m-2) + 3, not + 4
    let c = IdentityClaim::new("bad", &[(1, 2), (1, 1)], AffineTarget::shifted(1, 4));
    let chk = verify_affine_identity(&c);
    assert!(!chk.passed);
    assert_eq!(chk.residual, (0, -1));
    let ok = IdentityClaim::new("ok", &[(1, 2), (1, 1)], chk.lhs);
    assert!(verify_affine_identity(&ok).passed);
}

#[test]
fn in_m_normalizes() {
    // 3m - 1 = 3(m-2) + 5
    assert_eq!(AffineTarget::in_m(3, -1), AffineTarget::shifted(3, 5));
}

#[test]
fn eight_offsets_cover_all_residues() {
    let targets: Vec<AffineTarget> = COMPLETE_RESIDUE_OFFSETS
        .iter()
        .map(|&b| AffineTarget::shifted(115, b))
        .collect();
    assert!(check_complete_residues(&targets, 8).complete);
    let mut dup = targets.clone();
    dup[1] = dup[0];
    assert!(!check_complete_residues(&dup, 8).complete);
}

#[test]
fn grid_partitions_and_agrees_with_solver() {
    let grid = recompute_s_grid();
    assert_eq!(grid.cells().len(), 161 * 8);
    let total: usize = [
        Solvability::PosOnly,
        Solvability::NegOnly,
        Solvability::Both,
        Solvability::Neither,
    ]
    .iter()
    .map(|&c| grid.class_set(c).len())
    .sum();
    assert_eq!(total, 161 * 8);
    for a in (0..=160).step_by(7).chain([116, 1, 18, 28]) {
        for r in 0..8 {
            let pos = !solve_residue_system(&ResidueSystemClaim::triple(a, r, Window::Positive))
                .unwrap()
                .is_empty();
            let neg = !solve_residue_system(&ResidueSystemClaim::triple(a, r, Window::Negative))
                .unwrap()
                .is_empty();
            let want = match (pos, neg) {
                (true, false) => Solvability::PosOnly,
                (false, true) => Solvability::NegOnly,
                (true, true) => Solvability::Both,
                (false, false) => Solvability::Neither,
            };
            assert_eq!(grid.get(a, r).unwrap().class, want, "({a},{r})");
        }
    }
}

#[test]
fn solutions_satisfy_their_system() {
    let claim = ResidueSystemClaim::triple(116, 3, Window::Positive);
    let sols = solve_residue_system(&claim).unwrap();
    assert!(!sols.is_empty());
    for xs in sols {
        let a: i64 = xs
            .iter()
            .zip([1i64, 2, 4])
            .map(|(&x, w)| w * (x - 1) * x / 2)
            .sum();
        let f: i64 = xs.iter().zip([1i64, 2, 4]).map(|(&x, w)| w * x).sum();
        assert_eq!(a, 116);
        assert_eq!(f.rem_euclid(8), 3);
        assert!((0..100).contains(&f));
    }
    assert!(solve_residue_system(&ResidueSystemClaim::triple(161, 0, Window::Positive)).is_err());
}

#[test]
fn named_cells() {
    let grid = recompute_s_grid();
    assert_eq!(grid.get(116, 3).unwrap().class, Solvability::PosOnly);
    assert_eq!(grid.get(1, 7).unwrap().class, Solvability::NegOnly);
    assert!(grid.get(161, 0).is_none());
}

#[test]
fn reference_diff_is_fully_documented() {
    let s = recompute_s_sets().unwrap();
    assert!(s.diff.is_clean(), "{:?}", s.diff.unexplained().collect::<Vec<_>>());
    assert!(s.grid.class_set(Solvability::PosOnly).contains(&(116, 3)));
    assert!(s.grid.class_set(Solvability::NegOnly).contains(&(1, 7)));
}
