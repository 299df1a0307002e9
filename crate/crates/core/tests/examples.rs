//! Every runnable example doubles as a test.

mod solve_tiny {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/solve_tiny.rs"));
}

#[test]
fn solve_tiny_example_runs() {
    solve_tiny::run_example().expect("solve_tiny example should run");
}

mod modes {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/modes.rs"));
}

#[test]
fn modes_example_runs() {
    modes::run_example().expect("modes example should run");
}

mod projection_drift {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/projection_drift.rs"));
}

#[test]
fn projection_drift_example_runs() {
    projection_drift::run_example().expect("projection_drift example should run");
}

mod sparse_sampling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sparse_sampling.rs"));
}

#[test]
fn sparse_sampling_example_runs() {
    sparse_sampling::run_example().expect("sparse_sampling example should run");
}

mod potentials {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/potentials.rs"));
}

#[test]
fn potentials_example_runs() {
    potentials::run_example().expect("potentials example should run");
}

mod reference_solvers {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reference_solvers.rs"));
}

#[test]
fn reference_solvers_example_runs() {
    reference_solvers::run_example().expect("reference_solvers example should run");
}

mod instance_io {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/instance_io.rs"));
}

#[test]
fn instance_io_example_runs() {
    instance_io::run_example().expect("instance_io example should run");
}

mod trace_replay {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/trace_replay.rs"));
}

#[test]
fn trace_replay_example_runs() {
    trace_replay::run_example().expect("trace_replay example should run");
}
