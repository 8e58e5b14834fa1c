//! Definition-route vs attainment-characterization agreement across the
//! supported operator configurations, on seeded random pairs.

use bjortho::admissible::AdmissibleSpec;
use bjortho::operators::{op_orthogonal_characterization, op_orthogonal_definition};
use bjortho::spaces::{NormSpec, SemiNormFamily, SemiNormSpec};
use bjortho::verify::{gen_instance, Instance, InstanceKind};
use bjortho::GuardBand;

#[test]
fn definition_and_characterization_agree_across_configurations() {
    let families: Vec<(SemiNormFamily, &str)> = vec![
        (SemiNormFamily::single(SemiNormSpec::Norm(NormSpec::l2())).unwrap(), "l2"),
        (
            SemiNormFamily::new(vec![SemiNormSpec::coord_abs(0), SemiNormSpec::coord_abs(1)]).unwrap(),
            "coords",
        ),
        (SemiNormFamily::single(SemiNormSpec::Norm(NormSpec::linf())).unwrap(), "linf"),
    ];
    for (fi, (family, name)) in families.iter().enumerate() {
        for dim in [2usize, 3] {
            let mesh = if dim == 2 { 0.005 } else { 0.05 };
            let sample = AdmissibleSpec::unit_sphere(NormSpec::l2()).discretize(mesh, dim).unwrap();
            let mut disagree = 0;
            let mut indeterminate = 0;
            let mut total = 0;
            for index in 0..200u64 {
                let Instance::OperatorPair { t, a } =
                    gen_instance(InstanceKind::OperatorPair, dim, 20_000 + fi as u64, index)
                else {
                    unreachable!()
                };
                let def = op_orthogonal_definition(&t, &a, family, &sample, GuardBand::OPERATOR);
                let ch = op_orthogonal_characterization(&t, &a, family, &sample, GuardBand::OPERATOR);
                let (def, ch) = match (def, ch) {
                    (Ok(d), Ok(c)) => (d, c),
                    _ => continue, // degenerate P(T) = 0 draws
                };
                total += 1;
                if def.is_indeterminate() || ch.state.is_indeterminate() {
                    indeterminate += 1;
                } else if def.verdict != ch.state.verdict {
                    disagree += 1;
                    eprintln!(
                        "family {name} dim {dim} index {index}: def {:?} char {:?} t={t:?} a={a:?}",
                        def, ch.state
                    );
                }
            }
            assert_eq!(disagree, 0, "family {name} dim {dim}");
            assert!(total >= 190, "family {name} dim {dim}: only {total} usable pairs");
            assert!(
                indeterminate * 20 <= total,
                "family {name} dim {dim}: {indeterminate}/{total} indeterminate"
            );
        }
    }
}
