// Compiles every example into this test crate and runs its main.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(project_points);
example!(shape_classes);
example!(compare_baselines);
example!(scale_invariance);
example!(fit_quality_of_life);
example!(meta_audit);

mod plot_data {
    include!("../examples/plot_data.rs");
    // main takes its directory from argv, which belongs to the test harness here
    #[test]
    fn runs() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(write_plots(dir.path()), 10);
        let _: fn() = main;
    }
}
