use astctx::ast::kind;
use astctx::encode::split_statements;
use astctx::ingest::{parse_mini, serialize_ast, load_ast_record};
use astctx::run::RunConfig;
use astctx::synth::random_program;
use astctx::tasks::Variant;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_keeps_every_token_once(seed in any::<u64>()) {
        let ast = parse_mini(&random_program(&mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let trees = split_statements(&ast);
        let mut got: Vec<String> = trees
            .iter()
            .flat_map(|t| t.root.preorder().filter_map(|n| n.token.clone()).collect::<Vec<_>>())
            .collect();
        let mut want: Vec<String> = ast.preorder().filter_map(|n| n.token.clone()).collect();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
        let markers = trees.iter().filter(|t| t.is_end_block()).count();
        prop_assert_eq!(markers, ast.preorder().filter(|n| kind::is_compound(&n.kind)).count());
        // no statement tree contains another statement
        for t in trees.iter().filter(|t| !t.is_end_block()) {
            prop_assert!(t.root.preorder().skip(1).all(|n| !kind::is_statement(&n.kind)));
        }
    }

    #[test]
    fn ast_records_round_trip(seed in any::<u64>()) {
        let ast = parse_mini(&random_program(&mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let back = load_ast_record(serialize_ast(&ast).as_bytes()).unwrap();
        prop_assert_eq!(back, ast);
    }

    #[test]
    fn config_round_trips(
        seed in any::<u64>(),
        dim in 1usize..300,
        hidden in 1usize..300,
        folds in 2usize..10,
        lr in 1e-5f64..1.0,
        variant in 0usize..5,
    ) {
        let v = Variant::ALL[variant];
        let text = format!("seed = {seed}\ndim = {dim}\nhidden = {hidden}\nk_folds = {folds}\nlr = {lr}\nvariant = {v}\n");
        let cfg = RunConfig::from_kv(&text).unwrap();
        prop_assert_eq!(cfg.variant, v);
        prop_assert_eq!(cfg.lr, lr);
        let again = RunConfig::from_kv(&cfg.to_kv()).unwrap();
        prop_assert_eq!(again.to_kv(), cfg.to_kv());
    }

    #[test]
    fn flags_override_file_values(file_dim in 1usize..100, flag_dim in 1usize..100) {
        let text = format!("seed = 1\ndim = {file_dim}\n");
        let cfg = RunConfig::from_kv_with(&text, &[("dim".into(), flag_dim.to_string())]).unwrap();
        prop_assert_eq!(cfg.dim, flag_dim);
    }
}
