use super::{MinorCondition, MinorTerm};
use crate::error::{Error, Result};

/// Keys accepted by [`builtin_key`]; parameterized families take a number suffix.
pub const BUILTIN_KEYS: &[&str] = &[
    "Sigma2",
    "QMalcev",
    "QMinority",
    "QMajority",
    "WNU(k)",
    "QNU(k)",
    "QJ(n)",
    "QHM(n)",
    "gSigma3",
];

const MAX_PARAM: usize = 16;

fn t(symbol: &str, vars: &[&str]) -> MinorTerm {
    MinorTerm::new(symbol, vars)
}

/// `x..x` with `y` at position `at` (or nowhere when `at == k`).
fn xy(k: usize, at: usize) -> Vec<&'static str> {
    (0..k).map(|i| if i == at { "y" } else { "x" }).collect()
}

fn add(c: &mut MinorCondition, lhs: MinorTerm, rhs: MinorTerm) {
    c.add(lhs, rhs).expect("built-in conditions use consistent arities");
}

fn chain(c: &mut MinorCondition, terms: Vec<MinorTerm>) {
    c.add_chain(terms).expect("built-in conditions use consistent arities");
}

fn bad(key: &str, reason: &str) -> Error {
    Error::BadParams {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// The named condition. `params` holds `k` or `n` for the families.
pub fn builtin(name: &str, params: &[usize]) -> Result<MinorCondition> {
    let one = |min: usize| -> Result<usize> {
        match params {
            [p] if *p >= min && *p <= MAX_PARAM => Ok(*p),
            [_] => Err(bad(name, &format!("parameter must lie in {min}..={MAX_PARAM}"))),
            _ => Err(bad(name, "expects exactly one parameter")),
        }
    };
    let none = || -> Result<()> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(bad(name, "takes no parameters"))
        }
    };
    let mut c = MinorCondition::new();
    match name {
        "Sigma2" => {
            none()?;
            add(&mut c, t("f", &["x", "y"]), t("f", &["y", "x"]));
        }
        "QMalcev" => {
            none()?;
            chain(
                &mut c,
                vec![t("f", &["x", "y", "y"]), t("f", &["y", "y", "x"]), t("f", &["x", "x", "x"])],
            );
        }
        "QMinority" => {
            none()?;
            chain(
                &mut c,
                vec![
                    t("f", &["x", "y", "y"]),
                    t("f", &["y", "x", "y"]),
                    t("f", &["y", "y", "x"]),
                    t("f", &["x", "x", "x"]),
                ],
            );
        }
        "QMajority" => {
            none()?;
            return builtin("QNU", &[3]);
        }
        "WNU" | "QNU" => {
            let k = one(2)?;
            // f(x,..,x,y) = f(x,..,y,x) = .. = f(y,x,..,x)
            let terms = (0..k).rev().map(|at| MinorTerm {
                symbol: "f".into(),
                vars: xy(k, at).into_iter().map(String::from).collect(),
            });
            chain(&mut c, terms.collect());
            if name == "QNU" {
                add(
                    &mut c,
                    MinorTerm {
                        symbol: "f".into(),
                        vars: xy(k, k - 1).into_iter().map(String::from).collect(),
                    },
                    MinorTerm {
                        symbol: "f".into(),
                        vars: xy(k, k).into_iter().map(String::from).collect(),
                    },
                );
            }
        }
        "QJ" => {
            let n = one(2)?;
            let s = |i: usize| format!("t{i}");
            add(&mut c, t(&s(0), &["x", "y", "z"]), t(&s(0), &["x", "x", "x"]));
            add(&mut c, t(&s(n), &["x", "y", "z"]), t(&s(n), &["z", "z", "z"]));
            for i in 0..=n {
                add(&mut c, t(&s(i), &["x", "y", "x"]), t(&s(i), &["x", "x", "x"]));
            }
            for i in 0..n {
                if i % 2 == 0 {
                    add(&mut c, t(&s(i), &["x", "x", "z"]), t(&s(i + 1), &["x", "x", "z"]));
                } else {
                    add(&mut c, t(&s(i), &["x", "z", "z"]), t(&s(i + 1), &["x", "z", "z"]));
                }
            }
        }
        "QHM" => {
            let n = one(2)?;
            let s = |i: usize| format!("p{i}");
            add(&mut c, t(&s(0), &["x", "y", "z"]), t(&s(0), &["x", "x", "x"]));
            add(&mut c, t(&s(n), &["x", "y", "z"]), t(&s(n), &["z", "z", "z"]));
            for i in 0..n {
                add(&mut c, t(&s(i), &["x", "x", "y"]), t(&s(i + 1), &["x", "y", "y"]));
            }
        }
        "gSigma3" => {
            none()?;
            add(&mut c, t("r", &["x", "x", "x", "y"]), t("r", &["x", "x", "x", "x"]));
            add(&mut c, t("r", &["x1", "x2", "x3", "y"]), t("r", &["x2", "x3", "x1", "y"]));
        }
        _ => return Err(Error::UnknownKey(name.to_string())),
    }
    Ok(c)
}

/// Splits a key such as `QJ(4)`, `qj4`, `WNU3` or `sigma2` into a built-in name and parameters.
pub fn builtin_key(key: &str) -> Result<(String, Vec<usize>)> {
    let compact: String = key
        .chars()
        .filter(|c| !matches!(c, '(' | ')' | ' ' | '_' | '\''))
        .collect::<String>()
        .to_ascii_lowercase();
    let fixed = [
        ("sigma2", "Sigma2"),
        ("s2", "Sigma2"),
        ("qmalcev", "QMalcev"),
        ("qminority", "QMinority"),
        ("qmajority", "QMajority"),
        ("gsigma3", "gSigma3"),
        ("gs3", "gSigma3"),
    ];
    if let Some((_, name)) = fixed.iter().find(|(k, _)| *k == compact) {
        return Ok((name.to_string(), Vec::new()));
    }
    let split = compact.find(|c: char| c.is_ascii_digit()).unwrap_or(compact.len());
    let (head, digits) = compact.split_at(split);
    let name = match head {
        "wnu" => "WNU",
        "qnu" => "QNU",
        "qj" => "QJ",
        "qhm" => "QHM",
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    let n: usize = digits
        .parse()
        .map_err(|_| bad(key, "expects a numeric parameter"))?;
    Ok((name.to_string(), vec![n]))
}

/// Canonical display key: `Sigma2`, `QJ(4)` and so on.
pub fn builtin_label(name: &str, params: &[usize]) -> String {
    match params {
        [] => name.to_string(),
        ps => format!(
            "{name}({})",
            ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_key(k: &str) -> MinorCondition {
        let (n, p) = builtin_key(k).unwrap();
        builtin(&n, &p).unwrap()
    }

    #[test]
    fn guarded_cyclic() {
        let c = by_key("gSigma3");
        assert_eq!(
            c.to_string(),
            "r(x,x,x,y) = r(x,x,x,x)\nr(x1,x2,x3,y) = r(x2,x3,x1,y)\n"
        );
        assert_eq!(c.symbols(), &[("r".to_string(), 4)]);
    }

    #[test]
    fn qhm3_shape() {
        let c = by_key("QHM(3)");
        assert_eq!(c.identities().len(), 5);
        assert_eq!(c.symbols().len(), 4);
        assert_eq!(c.identities()[4].to_string(), "p2(x,x,y) = p3(x,y,y)");
    }

    #[test]
    fn qj4_shape() {
        let c = by_key("qj4");
        // 2 end identities, 5 absorption identities, 4 links.
        assert_eq!(c.identities().len(), 11);
        assert_eq!(c.symbols().len(), 5);
        assert!(c.to_string().contains("t1(x,z,z) = t2(x,z,z)"));
        assert!(c.to_string().contains("t2(x,x,z) = t3(x,x,z)"));
    }

    #[test]
    fn wnu2_is_sigma2() {
        let w = by_key("WNU(2)");
        let s = by_key("Sigma2");
        assert!(w.is_subset_of(&s) && s.is_subset_of(&w));
    }

    #[test]
    fn wnu_and_qnu() {
        let w = by_key("WNU3");
        assert_eq!(w.to_string(), "f(x,x,y) = f(x,y,x)\nf(x,x,y) = f(y,x,x)\n");
        let q = by_key("QNU(3)");
        assert!(w.is_subset_of(&q));
        assert!(q.to_string().ends_with("f(x,x,y) = f(x,x,x)\n"));
        assert_eq!(by_key("QMajority"), q);
    }

    #[test]
    fn minority_contains_malcev() {
        let mal = by_key("QMalcev");
        let min = by_key("QMinority");
        // f(x,y,y)=f(y,y,x)=f(x,x,x) follows from the minority chain.
        assert!(mal.is_subset_of(&min));
    }

    #[test]
    fn bad_keys() {
        assert!(matches!(builtin("QJ", &[1]), Err(Error::BadParams { .. })));
        assert!(matches!(builtin("WNU", &[]), Err(Error::BadParams { .. })));
        assert!(matches!(builtin("Sigma2", &[2]), Err(Error::BadParams { .. })));
        assert!(matches!(builtin_key("nope"), Err(Error::UnknownKey(_))));
        assert!(builtin_key("QJ").is_err());
    }
}
