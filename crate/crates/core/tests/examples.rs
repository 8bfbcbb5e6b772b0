macro_rules! example_test {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(statevector_basics, "statevector_basics.rs");
example_test!(partition_budget, "partition_budget.rs");
example_test!(fabric_messaging, "fabric_messaging.rs");
example_test!(telegate_remote_cp, "telegate_remote_cp.rs");
example_test!(distributed_qft, "distributed_qft.rs");
example_test!(semiclassical_feed_forward, "semiclassical_feed_forward.rs");
example_test!(parameter_sweep, "parameter_sweep.rs");
