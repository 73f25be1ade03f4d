mod props;

macro_rules! property_tests {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = props::$name() {
                    panic!("{e}");
                }
            }
        )*
    };
}

property_tests!(
    metric_homogeneity,
    metric_euler_identity,
    integrand_homogeneity,
    integrand_basis_independence,
    integrand_euler_identity,
    integrand_gradient_vs_fd,
    integrand_parity,
    integrand_sandwich,
    quadrature_refinement,
    radon_degree_and_linearity,
    binomial_gap_nonnegative,
    mesh_topology,
    area_gradient_vs_fd,
    descent_direction,
    dirichlet_dominates_area,
    area_parametrization_invariance,
    closed_curve_drift_invariance,
);

#[test]
fn every_property_has_a_test() {
    assert_eq!(props::ALL.len(), 17);
}
