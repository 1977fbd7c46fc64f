use bibrace::orbits::{
    census_2dim, Census, CensusOptions, CheckpointLock, CheckpointPolicy, Layer, OrbitOptions, RunStatus,
};
use bibrace::Error;

fn uninterrupted(m: usize) -> Vec<bibrace::orbits::OrbitClass> {
    census_2dim(m, &CensusOptions::default()).unwrap()
}

#[test]
fn suspended_runs_resume_to_the_same_partition() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.bin");
    let policy = CheckpointPolicy { path: path.clone(), interval: 700 };
    let opts = OrbitOptions::default();
    let mut census = Census::new(5, 2, Layer::All, &opts).unwrap();
    census.lock(&path).unwrap();
    assert_eq!(census.run(Some(3000), Some(&policy), &mut |_| {}).unwrap(), RunStatus::Suspended);
    drop(census);
    let mut resumes = 0;
    let classes = loop {
        let mut c = Census::resume(&path, &opts).unwrap();
        resumes += 1;
        if c.run(Some(5000), Some(&policy), &mut |_| {}).unwrap() == RunStatus::Complete {
            break c.classes().unwrap();
        }
    };
    assert!(resumes > 3);
    assert_eq!(classes, uninterrupted(5));
    assert!(!path.with_extension("bin.lock").exists());
}

#[test]
fn resuming_through_census_options() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c4");
    let mut c = Census::new(4, 2, Layer::All, &OrbitOptions::default()).unwrap();
    c.run(Some(50), None, &mut |_| {}).unwrap();
    c.save(&path).unwrap();
    drop(c);
    let opts = CensusOptions { checkpoint: Some(CheckpointPolicy { path: path.clone(), interval: 10 }), resume: true, ..Default::default() };
    assert_eq!(census_2dim(4, &opts).unwrap(), uninterrupted(4));
    assert!(matches!(census_2dim(5, &opts), Err(Error::Checkpoint(_))));
}

#[test]
fn lock_excludes_a_second_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("locked");
    let mut c = Census::new(4, 2, Layer::All, &OrbitOptions::default()).unwrap();
    c.lock(&path).unwrap();
    c.save(&path).unwrap();
    assert!(matches!(Census::resume(&path, &OrbitOptions::default()), Err(Error::Checkpoint(_))));
    assert!(matches!(CheckpointLock::acquire(&path), Err(Error::Checkpoint(_))));
    drop(c);
    let _again = Census::resume(&path, &OrbitOptions::default()).unwrap();
}

#[test]
fn damaged_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("damaged");
    let mut c = Census::new(4, 2, Layer::All, &OrbitOptions::default()).unwrap();
    c.run(Some(100), None, &mut |_| {}).unwrap();
    c.save(&path).unwrap();
    drop(c);
    let good = std::fs::read(&path).unwrap();

    let reject = |bytes: &[u8]| {
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(Census::resume(&path, &OrbitOptions::default()), Err(Error::Checkpoint(_))));
    };
    reject(&good[..good.len() - 3]);
    let mut extra = good.clone();
    extra.push(0);
    reject(&extra);
    let mut version = good.clone();
    version[4] = 99;
    reject(&version);
    let mut magic = good.clone();
    magic[0] = b'X';
    reject(&magic);
    // one more visited bit than the recorded classes account for
    let mut bitmap = good.clone();
    let last = bitmap.len() - 1;
    bitmap[last] ^= 0x80;
    reject(&bitmap);
}
