macro_rules! example {
    ($test:ident, $file:literal) => {
        #[test]
        fn $test() {
            #[allow(dead_code)]
            mod ex {
                include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
            }
            ex::run_example().expect(concat!($file, " runs"));
        }
    };
}

example!(multigamma, "multigamma.rs");
example!(read_once, "read_once.rs");
example!(split_chain_tours, "split_chain_tours.rs");
example!(approximate_pi, "approximate_pi.rs");
example!(bound_planner, "bound_planner.rs");
example!(ar1_burn_in, "ar1_burn_in.rs");
example!(verify_fixtures, "verify_fixtures.rs");
example!(spec_driven_run, "spec_driven_run.rs");
