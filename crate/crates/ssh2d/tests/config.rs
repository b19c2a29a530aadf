use proptest::prelude::*;
use ssh2d::config::{parse_config, parse_file, ConfigError, RunConfig};
use ssh2d_core::DisorderMode;

fn domain_key(e: ConfigError) -> (String, String) {
    match e {
        ConfigError::Domain { key, constraint } => (key, constraint),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn minimal_config() {
    let cfg = parse_config("N = 20\nM = 20\ngamma = 0.2\nJ = 0.5\n").unwrap();
    assert_eq!(cfg.params.nx, 20);
    assert_eq!(cfg.params.ny, 20);
    assert_eq!(cfg.params.gamma, 0.2);
    assert_eq!(cfg.params.nnn, 0.5);
    assert_eq!(cfg.params.lambda, 1.0);
    assert_eq!(cfg.params.omega, 0.0);
    assert_eq!(cfg.params.kappa, 0.05);
    assert_eq!(cfg.analysis.d_c, 3);
    assert_eq!(cfg.analysis.w_corner, 0.6);
    assert_eq!(cfg.analysis.w_edge, 0.5);
    assert_eq!(cfg.seed, 0);
}

#[test]
fn empty_document_gives_defaults() {
    assert_eq!(parse_config("").unwrap(), RunConfig::default());
}

#[test]
fn zero_width_is_rejected_by_key() {
    let (key, constraint) = domain_key(parse_config("N = 0\nM = 20\ngamma = 0.2\nJ = 0.5\n").unwrap_err());
    assert_eq!(key, "N");
    assert!(constraint.contains("N ≥ 1"), "{constraint}");
}

#[test]
fn negative_damping_only_matters_for_ldos() {
    let cfg = parse_config("kappa = -1.0\n").unwrap();
    let (key, _) = domain_key(cfg.validate(true).unwrap_err());
    assert_eq!(key, "kappa");
    cfg.validate(false).unwrap();
}

#[test]
fn unknown_keys_are_rejected() {
    let e = parse_config("N = 4\nvelocity = 3\n").unwrap_err();
    let ConfigError::Syntax { line, message, .. } = e else {
        panic!("expected a syntax error, got {e:?}")
    };
    assert_eq!(line, 2);
    assert!(message.contains("velocity"), "{message}");

    let e = parse_config("[analysis]\nd_corner = 3\n").unwrap_err();
    assert!(matches!(e, ConfigError::Syntax { line: 2, .. }), "{e:?}");
}

#[test]
fn syntax_errors_carry_the_line() {
    let e = parse_config("N = 4\nM = 4\ngamma = = 0.2\n").unwrap_err();
    let ConfigError::Syntax { line, .. } = e else {
        panic!("expected a syntax error, got {e:?}")
    };
    assert_eq!(line, 3);
    assert!(e.to_string().starts_with("line 3"));
}

#[test]
fn wrong_types_are_syntax_errors() {
    let e = parse_config("N = \"twenty\"\n").unwrap_err();
    assert!(matches!(e, ConfigError::Syntax { line: 1, .. }), "{e:?}");
}

#[test]
fn section_domain_errors_name_the_dotted_key() {
    let cases = [
        ("[analysis]\nw_corner = 1.5\n", "analysis.w_corner"),
        ("[analysis]\ng_min = 0.0\n", "analysis.g_min"),
        ("[ldos]\ne_min = 1.0\ne_max = -1.0\n", "ldos.e_max"),
        ("[ldos]\npoints = 1\n", "ldos.points"),
        ("N = 2\nM = 2\n[ldos]\nsites = [[5, 1]]\n", "ldos.sites"),
        ("[sweep]\nJ_values = []\n", "sweep.J_values"),
        ("[sweep]\nJ_values = [-0.1]\n", "sweep.J_values"),
        ("[ensemble]\nrealizations = 0\n", "ensemble.realizations"),
        ("[ensemble]\neps_max = -0.01\n", "ensemble.eps_max"),
        ("[disorder]\neps_max = -0.01\n", "disorder.eps_max"),
        ("gamma = -0.2\n", "gamma"),
        ("J = nan\n", "J"),
        ("lambda = inf\n", "lambda"),
    ];
    for (text, want) in cases {
        let (key, _) = domain_key(parse_config(text).unwrap_err());
        assert_eq!(key, want, "{text}");
    }
}

#[test]
fn sections_override_defaults() {
    let text = "seed = 9\n[analysis]\nd_c = 2\ng_min = 0.1\n[ldos]\nsites = [[1, 1], [2, 2]]\n\
                [ensemble]\nrealizations = 5\nmode = \"shared\"\n[disorder]\neps_max = 0.02\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.analysis.d_c, 2);
    assert_eq!(cfg.analysis.g_min, Some(0.1));
    assert_eq!(cfg.ldos.sites, Some(vec![(1, 1), (2, 2)]));
    assert_eq!(cfg.ensemble.realizations, 5);
    assert_eq!(cfg.ensemble.mode, DisorderMode::Shared);
    assert_eq!(cfg.disorder.eps_max, 0.02);
    assert_eq!(cfg.ldos_sites(), vec![0, 3]);
}

#[test]
fn written_configs_parse_back() {
    let file = RunConfig::default().to_file();
    let text = toml::to_string(&file).unwrap();
    assert_eq!(parse_file(&text).unwrap(), file);
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        (1usize..30, 1usize..30, 0.0..2.0f64, 0.0..2.0f64, 0.1..2.0f64, -1.0..1.0f64, 0.001..1.0f64),
        (0u64..=i64::MAX as u64, 0usize..6, 0.05..1.0f64, 0.05..1.0f64, prop::option::of(0.001..1.0f64)),
        (-5.0..0.0f64, 0.1..5.0f64, 2usize..3000),
        (prop::collection::vec(0.0..3.0f64, 1..8), 1usize..100, 0.0..0.5f64, any::<bool>(), 0.0..0.5f64),
    )
        .prop_map(|(p, a, l, e)| {
            let mut c = RunConfig::default();
            (c.params.nx, c.params.ny, c.params.gamma, c.params.nnn) = (p.0, p.1, p.2, p.3);
            (c.params.lambda, c.params.omega, c.params.kappa) = (p.4, p.5, p.6);
            c.seed = a.0;
            (c.analysis.d_c, c.analysis.w_corner, c.analysis.w_edge, c.analysis.g_min) = (a.1, a.2, a.3, a.4);
            (c.ldos.e_min, c.ldos.e_max, c.ldos.points) = (l.0, l.1, l.2);
            c.ldos.sites = Some(vec![(1, 1), (2 * p.0, 2 * p.1)]);
            c.sweep_j = e.0;
            c.ensemble.realizations = e.1;
            c.ensemble.eps_max = e.2;
            c.ensemble.mode = if e.3 { DisorderMode::Shared } else { DisorderMode::Independent };
            c.disorder.eps_max = e.4;
            c
        })
}

proptest! {
    #[test]
    fn round_trip(cfg in arb_config()) {
        let text = cfg.to_toml();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
