use fieldpsi::parse::{parse_polynomial, parse_polynomial_with_vars};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 5] = ["x", "y", "z", "x1", "x2"];

fn atom(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(0..20).to_string(),
        1 => format!("{}/{}", rng.gen_range(0..20), rng.gen_range(1..9)),
        _ => VARS[rng.gen_range(0..VARS.len())].to_string(),
    }
}

fn expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    let nterms = rng.gen_range(1..4);
    let mut out = String::new();
    if rng.gen_bool(0.2) {
        out.push('-');
    }
    for t in 0..nterms {
        if t > 0 {
            out.push_str(if rng.gen_bool(0.5) { " + " } else { "-" });
        }
        let nfactors = rng.gen_range(1..4);
        for f in 0..nfactors {
            if f > 0 {
                out.push_str(if rng.gen_bool(0.5) { "*" } else { " * " });
            }
            let base = if depth > 0 && rng.gen_bool(0.25) { format!("({})", expr(rng, depth - 1)) } else { atom(rng) };
            out.push_str(&base);
            if rng.gen_bool(0.3) {
                out.push_str(&format!("^{}", rng.gen_range(0..4)));
            }
        }
    }
    out
}

#[test]
fn print_then_parse_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let s = expr(&mut rng, 2);
        let e = parse_polynomial(&s).unwrap_or_else(|err| panic!("{s}: {err}"));
        let printed = e.canonical();
        let vars: Vec<&str> = e.vars.iter().map(String::as_str).collect();
        let back = parse_polynomial_with_vars(&printed, &vars).unwrap();
        assert_eq!(back.poly, e.poly, "{s} -> {printed}");
        assert_eq!(back.canonical(), printed);
        // when every variable survives, the plain parse agrees as well
        let plain = parse_polynomial(&printed).unwrap();
        if plain.vars == e.vars {
            assert_eq!(plain.poly, e.poly);
        }
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    for s in ["x^", "", "()", "x +* y", "2 x", "x^-1", "1/", "(x", "x)", "x^y", "3/0"] {
        assert!(parse_polynomial(s).is_err(), "{s}");
    }
}
