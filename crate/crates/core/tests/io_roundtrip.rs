use qdlab_core::dpp::ProcessSample;
use qdlab_core::io::{hermitian_from_json, matrix_to_json, ProjectionSystemJson};
use qdlab_core::randmat::random_projection_system;
use qdlab_core::setsys::{arithmetic_progressions, Coloring, SetSystem};
use qdlab_core::Error;

#[test]
fn set_system_json_roundtrip() {
    let s = arithmetic_progressions(5).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    assert!(text.starts_with(r#"{"n":5,"sets":[[1],"#));
    let back: SetSystem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);

    assert!(serde_json::from_str::<SetSystem>(r#"{"n": 3, "sets": [[1, 4]]}"#).is_err());
    assert!(serde_json::from_str::<SetSystem>(r#"{"n": 3, "sets": [[1]], "extra": 1}"#).is_err());
}

#[test]
fn projection_system_json_roundtrip() {
    let sys = random_projection_system::<f64>(4, 3, 17).unwrap();
    let text = serde_json::to_string(&ProjectionSystemJson::from_system(&sys)).unwrap();
    let back = serde_json::from_str::<ProjectionSystemJson>(&text).unwrap().into_system().unwrap();
    assert_eq!(back.len(), 3);
    for (p, q) in sys.iter().zip(back.iter()) {
        assert_eq!(p.rank(), q.rank());
        assert!((p.matrix() - q.matrix()).norm() < 1e-12);
    }

    let wrong_dim = ProjectionSystemJson { n: 5, projections: vec![matrix_to_json(sys.projections()[0].matrix())] };
    assert!(matches!(wrong_dim.into_system(), Err(Error::DimMismatch { .. })));
}

#[test]
fn hermitian_json_rejects_bad_shapes() {
    assert!(hermitian_from_json(&vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]]).is_err());
    assert!(hermitian_from_json(&vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]]).is_err());
}

#[test]
fn samples_and_colorings_serialize_as_lists() {
    let s: ProcessSample = serde_json::from_str("[3, 1]").unwrap();
    assert_eq!(s.points(), &[0, 2]);
    assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
    assert!(serde_json::from_str::<ProcessSample>("[0]").is_err());

    let c: Coloring = serde_json::from_str("[1, -1, 1]").unwrap();
    assert_eq!(c.signs(), &[1, -1, 1]);
    assert!(serde_json::from_str::<Coloring>("[1, 0]").is_err());
}
