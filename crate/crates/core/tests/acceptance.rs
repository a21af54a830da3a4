//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rigiscope::geometry::{self, dot};
use rigiscope::linalg;
use rigiscope::polarity::{cube_facet_system, stiffness_verdict, AngleSystem, Stiffness};
use rigiscope::polytopes::{canonical_polytope, flexible_example};
use rigiscope::rigidity::{
    rigidity_matrix, rigidity_matrix_euclidean, rigidity_matrix_projective, rigidity_verdict,
    trivial_motion_space,
};
use rigiscope::transfer::{
    apply_projective_transform, compare_stresses, cone_framework, transfer_framework,
    transfer_matrix, verify_factorization, ProjectiveMap,
};
use rigiscope::{
    Convention, Curvature, Framework, GeometrySpec, RigidityError, Tolerance, Verdict,
};

const SEED: u64 = 0x5eed_2024;
const BATTERY_SIZE: usize = 200;
const FACTORIZATION_TOL: f64 = 1e-9;
const FACTORIZATION_SECONDS: f64 = 5.0;
const ABSOLUTE_MARGIN: f64 = 1e-3;
const DET_TOL: f64 = 1e-12;
const MOTION_TOL: f64 = 1e-8;
const STRESS_ANGLE_TOL: f64 = 1e-8;
const SPHERICAL_SAMPLES: usize = 50;
const CONE_SAMPLES: usize = 30;
const PROJECTIVE_TRIALS: usize = 100;
const CAUCHY_DEHN: &[&str] = &["simplex(3)", "octahedron", "icosahedron", "bipyramid(5)"];
const PH_SCALE: f64 = 0.5;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn battery() -> Vec<Framework> {
    let mut rng = common::rng(SEED);
    (0..BATTERY_SIZE)
        .map(|_| common::random_euclidean(&mut rng))
        .collect()
}

fn canonical_battery(geometry: &GeometrySpec, scale: f64) -> Vec<(String, Framework)> {
    CAUCHY_DEHN
        .iter()
        .map(|name| {
            (
                name.to_string(),
                canonical_polytope(name, geometry, scale, &tol()).unwrap(),
            )
        })
        .collect()
}

fn factorization(battery: &[Framework]) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for fw in battery {
        for k in [Curvature::Positive, Curvature::Negative] {
            let r = verify_factorization(fw, k, &tol()).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_residual);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= FACTORIZATION_TOL && secs < FACTORIZATION_SECONDS,
        format!("max residual {worst:.2e} (tol {FACTORIZATION_TOL:.0e}) over {} frameworks x 2 curvatures in {secs:.2} s", battery.len()),
    )
}

fn rank_equivalence(battery: &[Framework]) -> Outcome {
    let t = tol();
    let mut mismatches = 0;
    let mut checked = 0;
    for fw in battery {
        if fw
            .points
            .iter()
            .any(|p| (dot(p, p).sqrt() - 1.0).abs() < ABSOLUTE_MARGIN)
        {
            continue;
        }
        checked += 1;
        let e = rigidity_verdict(fw, &t).map_err(|e| e.to_string())?;
        let re = rigidity_matrix_euclidean(fw)
            .map_err(|e| e.to_string())?
            .rank(&t)
            .map_err(|e| e.to_string())?
            .rank;
        for g in [
            GeometrySpec::proj_sphere(fw.dimension()),
            GeometrySpec::proj_hyperbolic(fw.dimension()),
        ] {
            let x = common::reinterpret(fw, g);
            let k = x.geometry.curvature().unwrap();
            let rx = rigidity_matrix_projective(&x, k, &t)
                .map_err(|e| e.to_string())?
                .rank(&t)
                .map_err(|e| e.to_string())?
                .rank;
            let v = rigidity_verdict(&x, &t).map_err(|e| e.to_string())?;
            if rx != re || v.verdict != e.verdict || v.rank != e.rank {
                mismatches += 1;
            }
        }
    }

    // One vertex moved onto the unit sphere.
    let mut fw = battery[0].clone();
    let n = fw.dimension();
    let mut p = vec![0.0; n];
    p[0] = 0.6;
    p[1] = 0.8;
    fw.points[0] = p;
    let ph = common::reinterpret(&fw, GeometrySpec::proj_hyperbolic(n));
    let det = transfer_matrix(&ph, Curvature::Negative)
        .map_err(|e| e.to_string())?
        .blocks[0]
        .determinant;
    let raised = matches!(
        rigidity_verdict(&ph, &tol()),
        Err(RigidityError::Absolute { vertex: 0, .. })
    ) && matches!(
        rigidity_matrix_projective(&ph, Curvature::Negative, &tol()),
        Err(RigidityError::Absolute { vertex: 0, .. })
    );
    check(
        mismatches == 0 && checked > 0 && det.abs() <= DET_TOL && raised,
        format!("{mismatches} rank/verdict mismatches over {checked} frameworks x 2 models; on-sphere vertex det(T_p) = {det:.1e}, absolute error raised: {raised}"),
    )
}

fn motion_transfer() -> Outcome {
    let t = tol();
    let mut rng = common::rng(SEED + 3);
    let mut worst: f64 = 0.0;
    let mut dim_mismatch = 0;
    let mut vectors = 0;
    for _ in 0..SPHERICAL_SAMPLES {
        let fw = common::random_spherical(&mut rng);
        let n = fw.dimension();
        let m = rigidity_matrix(&fw, &t).map_err(|e| e.to_string())?;
        let (kernel, _) = linalg::kernel_basis(&m.matrix, &t).map_err(|e| e.to_string())?;
        let euclid =
            transfer_framework(&fw, &GeometrySpec::euclidean(n), &t).map_err(|e| e.to_string())?;
        let re = rigidity_matrix_euclidean(&euclid).map_err(|e| e.to_string())?;
        let (ke, _) = linalg::kernel_basis(&re.matrix, &t).map_err(|e| e.to_string())?;
        if ke.ncols() != kernel.ncols() {
            dim_mismatch += 1;
        }
        for c in 0..kernel.ncols() {
            let u = kernel.column(c);
            let mut w = Vec::with_capacity(n * fw.vertex_count());
            for v in 0..fw.vertex_count() {
                let ui: Vec<f64> = u.rows(v * (n + 1), n + 1).iter().copied().collect();
                let img = geometry::motion_sphere_to_euclid(&fw.points[v], &ui, &t)
                    .map_err(|e| e.to_string())?;
                w.extend_from_slice(&img[..n]);
            }
            let w = DVector::from_vec(w);
            let residual = (&re.matrix * &w).amax() / w.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(residual);
            vectors += 1;
        }
    }
    check(
        worst <= MOTION_TOL && dim_mismatch == 0,
        format!("max R_E residual {worst:.2e} (tol {MOTION_TOL:.0e}) over {vectors} kernel vectors; {dim_mismatch} kernel-dimension mismatches in {SPHERICAL_SAMPLES} frameworks"),
    )
}

fn stress_invariance(battery: &[Framework]) -> Outcome {
    let t = tol();
    let mut rng = common::rng(SEED + 4);
    let mut instances: Vec<Framework> = battery.to_vec();
    for i in 0..40 {
        instances.push(common::random_stressed(&mut rng, 2 + i % 2));
    }
    let mut worst: f64 = 0.0;
    let mut nonempty = 0;
    let mut dim_mismatch = 0;
    for fw in &instances {
        for k in [Curvature::Positive, Curvature::Negative] {
            let c = compare_stresses(fw, k, &t).map_err(|e| e.to_string())?;
            if c.stress_dim_e != c.stress_dim_x {
                dim_mismatch += 1;
            } else if c.stress_dim_e >= 1 {
                nonempty += 1;
                worst = worst.max(c.max_principal_angle.unwrap_or(f64::INFINITY));
            }
        }
    }
    check(
        worst <= STRESS_ANGLE_TOL && nonempty > 0 && dim_mismatch == 0,
        format!("max principal angle {worst:.2e} rad (tol {STRESS_ANGLE_TOL:.0e}) over {nonempty} stressed comparisons; {dim_mismatch} dimension mismatches"),
    )
}

fn coning() -> Outcome {
    let t = tol();
    let mut rng = common::rng(SEED + 5);
    let mut spherical: Vec<Framework> = (0..CONE_SAMPLES)
        .map(|_| common::random_spherical(&mut rng))
        .collect();
    for (_, fw) in canonical_battery(&GeometrySpec::sphere(3), 1.0) {
        spherical.push(fw);
    }
    for name in [
        "square-4-cycle",
        "double-banana-3d",
        "degenerate-collinear-triangle",
    ] {
        let fw = flexible_example(name).unwrap();
        spherical.push(
            transfer_framework(&fw, &GeometrySpec::sphere(fw.dimension()), &t)
                .map_err(|e| e.to_string())?,
        );
    }
    let mut disagreements = 0;
    for fw in &spherical {
        let a = rigidity_verdict(fw, &t).map_err(|e| e.to_string())?;
        let cone = cone_framework(fw).map_err(|e| e.to_string())?;
        let b = rigidity_verdict(&cone, &t).map_err(|e| e.to_string())?;
        if a.verdict != b.verdict || a.internal_dim != b.internal_dim {
            disagreements += 1;
        }
    }
    check(
        disagreements == 0,
        format!(
            "{disagreements} disagreements over {} spherical frameworks and their cones",
            spherical.len()
        ),
    )
}

fn cauchy_dehn() -> Outcome {
    let t = tol();
    let mut lines = Vec::new();
    let mut ok = true;
    for name in CAUCHY_DEHN {
        let mut ranks = Vec::new();
        for (g, scale) in [
            (GeometrySpec::euclidean(3), 1.0),
            (GeometrySpec::proj_sphere(3), 1.0),
            (GeometrySpec::proj_hyperbolic(3), PH_SCALE),
        ] {
            let fw = canonical_polytope(name, &g, scale, &t).map_err(|e| e.to_string())?;
            let r = rigidity_verdict(&fw, &t).map_err(|e| e.to_string())?;
            ok &= r.verdict == Verdict::Rigid;
            ranks.push(r.rank);
        }
        ok &= ranks.iter().all(|&r| r == ranks[0]);
        if *name == "octahedron" {
            ok &= ranks[0] == 12;
        }
        lines.push(format!("{name} rank {}", ranks[0]));
    }
    check(
        ok,
        format!("RIGID with equal ranks in E/PS/PH: {}", lines.join(", ")),
    )
}

fn andreev() -> Outcome {
    let t = tol();
    let mut systems: Vec<(String, AngleSystem, Framework)> = Vec::new();
    for s in [0.2, 0.4, 0.6] {
        let sys = cube_facet_system(s, &t).map_err(|e| e.to_string())?;
        let fw = sys.polar_framework().map_err(|e| e.to_string())?;
        systems.push((format!("cube({s})"), sys, fw));
    }
    for name in CAUCHY_DEHN {
        let fw = canonical_polytope(name, &GeometrySpec::proj_exterior_hyperbolic(3), 3.0, &t)
            .map_err(|e| e.to_string())?;
        let sys = AngleSystem::from_framework(&fw, true, &t).map_err(|e| e.to_string())?;
        systems.push((name.to_string(), sys, fw));
    }
    let mut ok = true;
    let mut stiff = 0;
    for (_, sys, fw) in &systems {
        let s = stiffness_verdict(sys, &t).map_err(|e| e.to_string())?;
        let direct = rigidity_verdict(fw, &t).map_err(|e| e.to_string())?;
        ok &= (s.verdict == Stiffness::Stiff) == (direct.verdict == Verdict::Rigid);
        if s.verdict == Stiffness::Stiff {
            stiff += 1;
        }
    }
    check(
        ok && stiff == systems.len(),
        format!(
            "{stiff}/{} angle systems STIFF; stiffness matches the direct D^3 verdict: {ok}",
            systems.len()
        ),
    )
}

fn random_map(rng: &mut ChaCha8Rng, fw: &Framework) -> ProjectiveMap {
    let n = fw.dimension();
    loop {
        let m = DMatrix::from_fn(n + 1, n + 1, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) + rng.random_range(-0.4..0.4)
        });
        let finite = fw.points.iter().all(|p| {
            let y = &m * DVector::from_vec(geometry::homogenize(p));
            y[n].abs() >= 0.2
        });
        if finite {
            if let Ok(map) = ProjectiveMap::new(m, &tol()) {
                return map;
            }
        }
    }
}

fn projective_invariance(battery: &[Framework]) -> Outcome {
    let t = tol();
    let mut rng = common::rng(SEED + 8);
    let octa = canonical_polytope("octahedron", &GeometrySpec::euclidean(3), 1.0, &t).unwrap();
    let mut frameworks: Vec<Framework> = canonical_battery(&GeometrySpec::euclidean(3), 1.0)
        .into_iter()
        .map(|(_, f)| f)
        .collect();
    frameworks.push(flexible_example("double-banana-3d").unwrap());
    frameworks.push(flexible_example("square-4-cycle").unwrap());
    let mut bad_rank = 0;
    let mut changed = 0;
    let mut compared = 0;
    for trial in 0..PROJECTIVE_TRIALS {
        let map = random_map(&mut rng, &octa);
        let image = apply_projective_transform(&octa, &map, &t).map_err(|e| e.to_string())?;
        if rigidity_matrix_euclidean(&image)
            .map_err(|e| e.to_string())?
            .rank(&t)
            .map_err(|e| e.to_string())?
            .rank
            != 12
        {
            bad_rank += 1;
        }
        let mut subjects = vec![
            &frameworks[trial % frameworks.len()],
            &battery[trial % battery.len()],
        ];
        subjects.push(&battery[(trial * 7 + 3) % battery.len()]);
        for fw in subjects {
            let map = random_map(&mut rng, fw);
            let image = apply_projective_transform(fw, &map, &t).map_err(|e| e.to_string())?;
            let a = rigidity_verdict(fw, &t).map_err(|e| e.to_string())?;
            let b = rigidity_verdict(&image, &t).map_err(|e| e.to_string())?;
            compared += 1;
            if (a.verdict, a.rank) != (b.verdict, b.rank) {
                changed += 1;
            }
        }
    }
    check(
        bad_rank == 0 && changed == 0,
        format!("octahedron rank != 12 in {bad_rank}/{PROJECTIVE_TRIALS} maps; {changed}/{compared} battery verdicts changed"),
    )
}

fn trivial_dimensions() -> Outcome {
    let t = tol();
    let mut rng = common::rng(SEED + 9);
    let mut wrong = 0;
    let mut not_injective = 0;
    let mut cases = 0;
    for n in [2usize, 3] {
        let expected = n * (n + 1) / 2;
        for _ in 0..20 {
            let v = rng.random_range(n + 1..=10);
            let points: Vec<Vec<f64>> = (0..v)
                .map(|_| common::point_in_ball(&mut rng, n, 0.9))
                .collect();
            let e = Framework::new(
                GeometrySpec::euclidean(n),
                Convention::Model,
                points.clone(),
                vec![],
            )
            .unwrap();
            let mut variants = vec![
                common::reinterpret(&e, GeometrySpec::proj_sphere(n)),
                common::reinterpret(&e, GeometrySpec::proj_hyperbolic(n)),
                transfer_framework(&e, &GeometrySpec::sphere(n), &t).map_err(|e| e.to_string())?,
                transfer_framework(&e, &GeometrySpec::hyperboloid(n), &t)
                    .map_err(|e| e.to_string())?,
            ];
            variants.push(e);
            for fw in &variants {
                cases += 1;
                let ts = trivial_motion_space(fw, &t).map_err(|e| e.to_string())?;
                if ts.restricted_dimension != expected {
                    wrong += 1;
                }
                let simplex = fw.with_points(fw.points[..n + 1].to_vec());
                if !trivial_motion_space(&simplex, &t)
                    .map_err(|e| e.to_string())?
                    .is_injective()
                {
                    not_injective += 1;
                }
            }
        }
    }
    check(
        wrong == 0 && not_injective == 0,
        format!("{wrong}/{cases} restricted dimensions differ from n(n+1)/2; {not_injective} non-injective K_(n+1) restrictions"),
    )
}

fn negative_controls() -> Outcome {
    let t = tol();
    let mut counts = Vec::new();
    for name in ["square-4-cycle", "double-banana-3d"] {
        let fw = flexible_example(name).unwrap();
        let n = fw.dimension();
        let outside = fw.with_points(
            fw.points
                .iter()
                .map(|p| p.iter().map(|x| 3.0 * x).collect())
                .collect(),
        );
        let mut variants = vec![
            ("E", fw.clone()),
            (
                "S",
                transfer_framework(&fw, &GeometrySpec::sphere(n), &t).map_err(|e| e.to_string())?,
            ),
            (
                "PS",
                transfer_framework(&fw, &GeometrySpec::proj_sphere(n), &t)
                    .map_err(|e| e.to_string())?,
            ),
            (
                "PH",
                transfer_framework(&fw, &GeometrySpec::proj_hyperbolic(n), &t)
                    .map_err(|e| e.to_string())?,
            ),
            (
                "H",
                transfer_framework(&fw, &GeometrySpec::hyperboloid(n), &t)
                    .map_err(|e| e.to_string())?,
            ),
        ];
        variants.push((
            "PD",
            transfer_framework(&outside, &GeometrySpec::proj_exterior_hyperbolic(n), &t)
                .map_err(|e| e.to_string())?,
        ));
        for (label, v) in variants {
            let r = rigidity_verdict(&v, &t).map_err(|e| e.to_string())?;
            counts.push((format!("{name}/{label}"), r.internal_dim));
        }
    }
    let ok = counts.iter().all(|(_, c)| *c == 1);
    let bad: Vec<String> = counts
        .iter()
        .filter(|(_, c)| *c != 1)
        .map(|(l, c)| format!("{l}={c}"))
        .collect();
    check(
        ok,
        if ok {
            format!(
                "internal flex count 1 in all {} geometry variants",
                counts.len()
            )
        } else {
            format!("flex counts off: {}", bad.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let battery = battery();
    let criteria: Vec<Criterion> = vec![
        (
            "factorization R_X T_K = R_E",
            Box::new(|| factorization(&battery)),
        ),
        (
            "rank and verdict equivalence",
            Box::new(|| rank_equivalence(&battery)),
        ),
        (
            "motion transfer sphere -> Euclidean",
            Box::new(motion_transfer),
        ),
        (
            "stress invariance",
            Box::new(|| stress_invariance(&battery)),
        ),
        ("coning", Box::new(coning)),
        ("Cauchy-Dehn instances", Box::new(cauchy_dehn)),
        ("Andreev stiffness", Box::new(andreev)),
        (
            "projective invariance",
            Box::new(|| projective_invariance(&battery)),
        ),
        ("trivial-space dimensions", Box::new(trivial_dimensions)),
        ("negative controls", Box::new(negative_controls)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
