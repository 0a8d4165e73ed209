use super::*;
use crate::basis::Degree;
use crate::law::ConservationLaw;
use crate::mesh::{Mesh, Rect};
use crate::problem::{Problem, DEFAULT_VELOCITY};
use crate::space::{Continuity, Space};
use crate::vec2::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_triangle(degree: Degree) -> Space {
    let mesh = Mesh::with_uniform_marker(
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        vec![[0, 1, 2]],
        1,
    )
    .unwrap();
    Space::new(mesh, degree, Continuity::Continuous).unwrap()
}

/// Structured mesh with jittered interior vertices.
fn jittered(n: usize, seed: u64) -> Mesh {
    let base = Mesh::structured(n, n, Rect::UNIT).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / n as f64;
    let vertices = base
        .vertices()
        .iter()
        .map(|&p| {
            let inside = p.x > 1e-12 && p.x < 1.0 - 1e-12 && p.y > 1e-12 && p.y < 1.0 - 1e-12;
            if inside {
                p + Vec2::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)) * h
            } else {
                p
            }
        })
        .collect();
    Mesh::with_uniform_marker(vertices, base.triangles().to_vec(), 1).unwrap()
}

fn advection() -> Problem {
    Problem::SmoothAdvection {
        velocity: DEFAULT_VELOCITY,
    }
}

fn problems() -> [Problem; 2] {
    [advection(), Problem::Burgers]
}

fn continuity(kind: SchemeKind) -> Continuity {
    if kind.is_discontinuous() {
        Continuity::Discontinuous
    } else {
        Continuity::Continuous
    }
}

/// Every valid (scheme, degree) pair with its discretization.
fn discretizations(problem: Problem, seed: u64) -> Vec<Discretization> {
    let mut out = Vec::new();
    for kind in SchemeKind::ALL {
        for degree in [Degree::P1, Degree::P2] {
            if kind.p1_only() && degree == Degree::P2 {
                continue;
            }
            let space = Space::new(jittered(4, seed), degree, continuity(kind)).unwrap();
            out.push(Discretization::new(space, problem, SchemeConfig::new(kind)).unwrap());
        }
    }
    out
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-0.5..1.5)).collect()
}

#[test]
fn total_residual_examples() {
    let space = unit_triangle(Degree::P1);
    let law = ConservationLaw::Advection {
        velocity: Vec2::new(1.0, 0.0),
    };
    let e = space.element(0);
    let (t, _) = total_exact_flux(&law, e, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 3);
    assert!((t + 0.5).abs() < 1e-15);
    let (t, _) = total_exact_flux(&ConservationLaw::Burgers, e, &[0.3; 6], 3);
    assert!(t.abs() < 1e-15);
}

#[test]
fn galerkin_matches_linear_oracle() {
    // For linear f and P1 data, Phi_i = |K| / 3 a . grad(u^h).
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let space = Space::new(jittered(3, 2), Degree::P1, Continuity::Continuous).unwrap();
    let a = Vec2::new(0.3, -1.7);
    let law = ConservationLaw::Advection { velocity: a };
    let u = random_state(space.num_dofs(), &mut rng);
    for k in 0..space.num_elements() {
        let e = space.element(k);
        let local = space.gather(k, &u);
        let grad: Vec2 = (0..3).map(|i| e.grad_lambda[i] * local[i]).sum();
        let r = galerkin_exact(&law, e, &local, 3);
        for v in &r[..3] {
            assert!((v - e.area / 3.0 * a.dot(grad)).abs() < 1e-14);
        }
    }
}

#[test]
fn rusanov_example() {
    let space = unit_triangle(Degree::P1);
    let law = ConservationLaw::Advection {
        velocity: Vec2::new(1.0, 0.0),
    };
    let e = space.element(0);
    let u = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let split = rusanov_split(&law, e, &u, 3, Some(1.0));
    assert_eq!(split.alpha, 1.0);
    let gal = galerkin_interpolated(&law, e, &u, 3);
    let dissipation = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
    for i in 0..3 {
        assert!((split.values[i] - gal[i] - dissipation[i]).abs() < 1e-15);
    }
}

#[test]
fn n_scheme_example() {
    let space = unit_triangle(Degree::P1);
    let law = ConservationLaw::Advection {
        velocity: Vec2::new(1.0, 0.0),
    };
    let u = [0.4, 1.3, -0.2, 0.0, 0.0, 0.0];
    let split = n_scheme_split(&law, space.element(0), &u).unwrap();
    let expected = [0.0, (u[1] - u[0]) / 2.0, 0.0];
    for i in 0..3 {
        assert!((split.values[i] - expected[i]).abs() < 1e-15);
    }
    let (total, _) = total_exact_flux(&law, space.element(0), &u, 3);
    assert!((split.values.iter().sum::<f64>() - total).abs() < 1e-15);
}

#[test]
fn n_scheme_degenerate_cases() {
    let space = unit_triangle(Degree::P1);
    // No transport: every k vanishes.
    let law = ConservationLaw::Advection { velocity: Vec2::ZERO };
    let split = n_scheme_split(&law, space.element(0), &[1.0, 2.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(split.values.iter().all(|&v| v == 0.0));
}

#[test]
fn monotone_splits_reproduce_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for degree in [Degree::P1, Degree::P2] {
        let space = Space::new(jittered(3, 4), degree, Continuity::Continuous).unwrap();
        let n = space.local_dofs();
        for problem in problems() {
            let law = problem.law();
            let u = random_state(space.num_dofs(), &mut rng);
            for k in 0..space.num_elements() {
                let local = space.gather(k, &u);
                let mut splits = vec![rusanov_split(&law, space.element(k), &local, n, None)];
                if degree == Degree::P1 {
                    splits.push(n_scheme_split(&law, space.element(k), &local).unwrap());
                }
                for s in splits {
                    for i in 0..n {
                        let c: f64 = (0..n).map(|j| s.coefficients[i][j] * (local[i] - local[j])).sum();
                        assert!((c - s.values[i]).abs() < 1e-12 * (1.0 + c.abs()));
                        assert!((0..n).all(|j| s.coefficients[i][j] >= 0.0));
                    }
                }
            }
        }
    }
}

#[test]
fn n_scheme_conserves_exact_flux_for_burgers() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let space = Space::new(jittered(3, 6), Degree::P1, Continuity::Continuous).unwrap();
    let law = ConservationLaw::Burgers;
    let u = random_state(space.num_dofs(), &mut rng);
    for k in 0..space.num_elements() {
        let local = space.gather(k, &u);
        let e = space.element(k);
        let s = n_scheme_split(&law, e, &local).unwrap();
        let (total, _) = total_exact_flux(&law, e, &local, 3);
        assert!((s.values.iter().sum::<f64>() - total).abs() < 1e-13);
    }
}

#[test]
fn supg_stabilization_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let space = Space::new(jittered(3, 8), Degree::P2, Continuity::Continuous).unwrap();
    for problem in problems() {
        let law = problem.law();
        let u = random_state(space.num_dofs(), &mut rng);
        for k in 0..space.num_elements() {
            let e = space.element(k);
            let local = space.gather(k, &u);
            let t = tau(TauRule::Inverse, &law, e, &local, 6);
            assert!(t > 0.0);
            let s = supg_stabilization(&law, e, &local, 6, t);
            let sum: f64 = s.iter().sum();
            let size: f64 = s.iter().map(|v| v.abs()).sum();
            assert!(sum.abs() <= 1e-12 * (1.0 + size));
            assert!(supg_stabilization(&law, e, &local, 6, 0.0).iter().all(|&v| v == 0.0));
            assert!(supg_stabilization(&law, e, &[0.8; 6], 6, t)
                .iter()
                .all(|v| v.abs() < 1e-14));
        }
    }
}

#[test]
fn supg_p1_advection_matches_closed_form() {
    // Linear data: h tau |K| (a . grad phi_i)(a . grad u).
    let space = Space::new(jittered(2, 9), Degree::P1, Continuity::Continuous).unwrap();
    let a = Vec2::new(1.0, 2.0);
    let law = ConservationLaw::Advection { velocity: a };
    let u: Vec<f64> = space.layout().coords().iter().map(|p| p.x * p.x - p.y).collect();
    for k in 0..space.num_elements() {
        let e = space.element(k);
        let local = space.gather(k, &u);
        let sum_k: f64 = (0..3).map(|i| (0.5 * a.dot(e.inward_normals[i])).abs()).sum();
        let t = tau(TauRule::Inverse, &law, e, &local, 3);
        assert!((t - 1.0 / sum_k).abs() < 1e-14 * t);
        let grad: Vec2 = (0..3).map(|i| e.grad_lambda[i] * local[i]).sum();
        let s = supg_stabilization(&law, e, &local, 3, t);
        for i in 0..3 {
            let expected = e.diameter * t * e.area * a.dot(e.grad_lambda[i]) * a.dot(grad);
            assert!((s[i] - expected).abs() < 1e-13 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn jump_terms() {
    let space = Space::new(jittered(2, 10), Degree::P2, Continuity::Continuous).unwrap();
    let linear = space.interpolate(|p| 2.0 * p.x - 0.5 * p.y + 1.0);
    for edge in space.mesh().interior_edges() {
        let r = jump_edge_residual(&space, edge, &linear, 0.3).unwrap();
        assert!(r.values[..r.len].iter().all(|v| v.abs() < 1e-12));
    }
    assert!(jump_edge_residual(&space, space.mesh().boundary_edges()[0], &linear, 0.3).is_none());
}

#[test]
fn jump_matches_direct_evaluation() {
    // Two P1 triangles sharing the diagonal of the unit square.
    let mesh = Mesh::structured(1, 1, Rect::UNIT).unwrap();
    let space = Space::new(mesh, Degree::P1, Continuity::Continuous).unwrap();
    let u = vec![0.3, -1.1, 0.7, 2.0];
    let edge = space.mesh().interior_edges().next().unwrap();
    let r = jump_edge_residual(&space, edge, &u, 0.5).unwrap();
    assert_eq!(r.len, 4);
    let grad = |k: usize| -> Vec2 {
        let e = space.element(k);
        let local = space.gather(k, &u);
        (0..3).map(|i| e.grad_lambda[i] * local[i]).sum()
    };
    let ed = &space.mesh().edges()[edge];
    let (l, rt) = (ed.left.element, ed.right.unwrap().element);
    let jump = grad(l) - grad(rt);
    let h: f64 = 2f64.sqrt();
    for (slot, &d) in r.dofs[..r.len].iter().enumerate() {
        let basis_grad = |k: usize| -> Vec2 {
            let e = space.element(k);
            space
                .element_dofs(k)
                .iter()
                .position(|&x| x == d)
                .map_or(Vec2::ZERO, |i| e.grad_lambda[i])
        };
        let expected = 0.5 * h * h * h * jump.dot(basis_grad(l) - basis_grad(rt));
        assert!((r.values[slot] - expected).abs() < 1e-13);
    }
}

#[test]
fn fv_residual_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let space = Space::new(jittered(3, 12), Degree::P1, Continuity::Continuous).unwrap();
    for problem in problems() {
        let law = problem.law();
        let u = random_state(space.num_dofs(), &mut rng);
        for k in 0..space.num_elements() {
            let e = space.element(k);
            let local = space.gather(k, &u);
            let half: f64 = (0..3).map(|i| 0.5 * law.flux(local[i]).dot(e.inward_normals[i])).sum();
            for flux in [DualFlux::Rusanov, DualFlux::Central] {
                let r = fv_median_dual_residual(&law, e, &local, flux);
                assert!((r.iter().sum::<f64>() - half).abs() < 1e-13);
                let (total, _) = total_interpolated_flux(&law, e, &local, 3);
                assert!((total - half).abs() < 1e-13);
            }
            let c = fv_median_dual_residual(&law, e, &[0.4; 6], DualFlux::Rusanov);
            assert!(c.iter().all(|v| v.abs() < 1e-15));
        }
    }
}

#[test]
fn boundary_residual_cases() {
    let space = unit_triangle(Degree::P1);
    let law = ConservationLaw::Advection {
        velocity: Vec2::new(1.0, 0.0),
    };
    let e = space.element(0);
    let u = [1.0, 0.0, 0.5, 0.0, 0.0, 0.0];
    let ub = [9.0; 3];
    // Face 1 is the hypotenuse, pure outflow for a = (1, 0).
    let out = boundary_residual(&law, &e.faces[1], &u, 3, &ub, FluxForm::Exact, Default::default());
    assert!(out.values.iter().all(|&v| v == 0.0));
    // Face 2 is x = 0, pure inflow: int phi_i (f(u_b) - f(u)) . n.
    let inflow = boundary_residual(&law, &e.faces[2], &u, 3, &ub, FluxForm::Exact, Default::default());
    // Face 2 runs from vertex 2 (u = 0.5) to vertex 0 (u = 1), n = (-1, 0).
    let expected_0 = -(9.0 / 2.0 - (1.0 / 3.0 + 0.5 / 6.0));
    let expected_2 = -(9.0 / 2.0 - (1.0 / 6.0 + 0.5 / 3.0));
    assert!((inflow.values[0] - expected_0).abs() < 1e-14);
    assert!((inflow.values[2] - expected_2).abs() < 1e-14);
    assert_eq!(inflow.values[1], 0.0);
    assert!((inflow.total - expected_0 - expected_2).abs() < 1e-14);
    let trace: Vec<f64> = e.faces[2]
        .points
        .iter()
        .map(|q| crate::space::combine(&q.phi, &u, 3))
        .collect();
    let same = boundary_residual(
        &law,
        &e.faces[2],
        &u,
        3,
        &trace,
        FluxForm::Interpolated,
        Default::default(),
    );
    assert!(same.values.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn dg_interior_fluxes_cancel() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mesh = Mesh::structured(1, 1, Rect::UNIT).unwrap();
    for problem in problems() {
        let space = Space::new(mesh.clone(), Degree::P2, Continuity::Discontinuous).unwrap();
        let disc = Discretization::new(space, problem, SchemeConfig::new(SchemeKind::Dg)).unwrap();
        let u = random_state(disc.num_dofs(), &mut rng);
        let set = disc.residual_set(&u).unwrap();
        let elements: f64 = set.elements().flat_map(|g| g.values.iter()).sum();
        let boundary: f64 = disc
            .space()
            .boundary_faces()
            .map(|side| {
                let face = &disc.space().element(side.element).faces[side.face];
                let local = disc.space().gather(side.element, &u);
                face.points
                    .iter()
                    .map(|q| {
                        q.weight
                            * disc
                                .law()
                                .flux(crate::space::combine(&q.phi, &local, 6))
                                .dot(face.normal)
                    })
                    .sum::<f64>()
            })
            .sum();
        assert!((elements - boundary).abs() < 1e-13);
    }
}

#[test]
fn every_scheme_conserves() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for problem in problems() {
        for disc in discretizations(problem, 18) {
            let u = random_state(disc.num_dofs(), &mut rng);
            let set = disc.residual_set(&u).unwrap();
            let d = set.max_conservation_defect();
            assert!(
                d <= 1e-12,
                "{} P{}: {d:e}",
                disc.config().kind.name(),
                disc.space().degree().order()
            );
        }
    }
}

#[test]
fn constant_states_are_steady() {
    let problem = Problem::ConstantAdvection {
        velocity: DEFAULT_VELOCITY,
        value: 1.0,
    };
    for disc in discretizations(problem, 19) {
        let u = vec![1.0; disc.num_dofs()];
        let r = disc.residual(&u).unwrap();
        let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-13, "{}: {worst:e}", disc.config().kind.name());
    }
}

#[test]
fn decomposition_identity_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for problem in problems() {
        for disc in discretizations(problem, 24) {
            let u = random_state(disc.num_dofs(), &mut rng);
            let v = random_state(disc.num_dofs(), &mut rng);
            let name = disc.config().kind.name();
            let r = decomposition_identity_check(&disc, &u, &v).unwrap();
            assert!(r.holds(1e-11), "{name}: {r:?}");
            let r = decomposition_identity_check(&disc, &u, &u).unwrap();
            assert!(r.holds(1e-11), "{name}: {r:?}");
            let ones = vec![1.0; disc.num_dofs()];
            let r = decomposition_identity_check(&disc, &u, &ones).unwrap();
            assert!(r.holds(1e-12), "{name}: {r:?}");
        }
    }
}

#[test]
fn scheme_requirements() {
    let p2 = Space::new(
        Mesh::structured(2, 2, Rect::UNIT).unwrap(),
        Degree::P2,
        Continuity::Continuous,
    )
    .unwrap();
    let err = Discretization::new(p2.clone(), advection(), SchemeConfig::new(SchemeKind::NScheme));
    assert!(matches!(err, Err(RdsError::SchemeRequirement { .. })));
    let dg = Space::new(
        Mesh::structured(2, 2, Rect::UNIT).unwrap(),
        Degree::P1,
        Continuity::Discontinuous,
    )
    .unwrap();
    let err = Discretization::new(dg, advection(), SchemeConfig::new(SchemeKind::Jump));
    assert!(matches!(err, Err(RdsError::SchemeRequirement { .. })));
    let err = Discretization::new(p2.clone(), advection(), SchemeConfig::new(SchemeKind::Dg));
    assert!(matches!(err, Err(RdsError::SchemeRequirement { .. })));
    let mut cfg = SchemeConfig::new(SchemeKind::LimitedJump);
    cfg.theta_e = -1.0;
    assert!(matches!(
        Discretization::new(p2, advection(), cfg),
        Err(RdsError::InvalidParameter(_))
    ));
}

#[test]
fn scheme_names_round_trip() {
    for kind in SchemeKind::ALL {
        assert_eq!(SchemeKind::from_name(kind.name()).unwrap(), kind);
    }
    assert!(SchemeKind::from_name("weno").is_err());
}
