use tensor_iso::decision::{decide, decide_orbit_distance, DecisionConfig, Verdict};
use tensor_iso::tensor::{load_tensor, load_witness, save_tensor, save_witness};
use tensor_iso::{
    apply_action, sample_haar_triple, sample_tensor, Distribution, RandomModel, ScalarKind, Tensor3,
    TransformTriple, C64,
};

/// Direct six-fold sum over all indices, used as an oracle for the action.
fn naive_action(g: &TransformTriple, a: &Tensor3) -> Vec<C64> {
    let [l, r, t] = g.factors();
    let [n1, n2, n3] = a.dims();
    let mut out = Vec::with_capacity(n1 * n2 * n3);
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                let mut s = C64::new(0.0, 0.0);
                for p in 0..n1 {
                    for q in 0..n2 {
                        for w in 0..n3 {
                            s += l[(i, p)] * r[(j, q)] * t[(k, w)] * a.get(p, q, w);
                        }
                    }
                }
                out.push(s);
            }
        }
    }
    out
}

fn residual(g: &TransformTriple, a: &Tensor3, b: &Tensor3) -> f64 {
    naive_action(g, a)
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn pair(dims: [usize; 3], kind: ScalarKind, seed: u64) -> (Tensor3, Tensor3) {
    let a = sample_tensor(dims, &RandomModel::new(Distribution::Gaussian, kind, seed)).unwrap();
    let g = sample_haar_triple(dims, kind, seed + 1000);
    let b = apply_action(&g, &a).unwrap();
    (a, b)
}

#[test]
fn exact_yes_witnesses_pass_the_naive_oracle() {
    for kind in [ScalarKind::Real, ScalarKind::Complex] {
        for seed in 0..5 {
            let (a, b) = pair([6, 6, 6], kind, seed);
            let d = decide(&a, &b, &DecisionConfig::exact()).unwrap();
            assert_eq!(d.verdict, Verdict::Yes, "{kind:?} seed {seed}");
            let w = d.witness.expect("witness");
            assert!(w.is_unitary());
            assert!(residual(&w, &a, &b) <= 1e-6 * a.frobenius_norm());
        }
    }
}

#[test]
fn rectangular_pairs_are_decided() {
    let (a, b) = pair([3, 5, 7], ScalarKind::Real, 11);
    let d = decide(&a, &b, &DecisionConfig::exact()).unwrap();
    assert_eq!(d.verdict, Verdict::Yes);
    assert!(residual(d.witness.as_ref().unwrap(), &a, &b) <= 1e-6 * a.frobenius_norm());
}

#[test]
fn independent_tensors_are_rejected() {
    for seed in 0..5 {
        let m = RandomModel::new(Distribution::Gaussian, ScalarKind::Real, seed);
        let a = sample_tensor([6, 6, 6], &m).unwrap();
        let b = sample_tensor([6, 6, 6], &m.with_seed(seed + 500)).unwrap();
        let d = decide(&a, &b, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert!(d.witness.is_none());
        assert!(d.diagnostics.rejected_at.is_some());
    }
}

#[test]
fn gapped_accepts_small_perturbations() {
    let (a, b) = pair([5, 5, 5], ScalarKind::Real, 3);
    let e = sample_tensor([5, 5, 5], &RandomModel::new(Distribution::Gaussian, ScalarKind::Real, 77)).unwrap();
    let eps = 1e-6;
    let b = b.add(&e.scaled(0.5 * eps / e.frobenius_norm())).unwrap();
    let d = decide_orbit_distance(&a, &b, &DecisionConfig::gapped(eps)).unwrap();
    assert_eq!(d.verdict, Verdict::Yes);
    assert!(residual(d.witness.as_ref().unwrap(), &a, &b) <= d.gamma_bound);
}

#[test]
fn files_round_trip_through_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = pair([4, 4, 4], ScalarKind::Complex, 8);
    for ext in ["t3b", "json"] {
        let pa = dir.path().join(format!("a.{ext}"));
        let pb = dir.path().join(format!("b.{ext}"));
        save_tensor(&a, &pa).unwrap();
        save_tensor(&b, &pb).unwrap();
        let (a2, b2) = (load_tensor(&pa).unwrap(), load_tensor(&pb).unwrap());
        assert_eq!(a2, a);
        let d = decide(&a2, &b2, &DecisionConfig::exact()).unwrap();
        assert_eq!(d.verdict, Verdict::Yes);
        let pw = dir.path().join(format!("w.{ext}"));
        let w = d.witness.unwrap();
        save_witness(&w, &pw).unwrap();
        assert_eq!(load_witness(&pw).unwrap(), w);
    }
}
