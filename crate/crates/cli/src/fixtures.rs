//! Bundled example problems.

pub struct Fixture {
    pub name: &'static str,
    pub about: &'static str,
    /// Problem document, or a Skolem instance document for `skolem_*`.
    pub text: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "diag_b1",
        about: "diag(-1/2, -1/3) with b = (1, 1); target is the corner (2, 3)",
        text: r#"{
  "A": [["-1/2", "0"], ["0", "-1/3"]],
  "B": [["1"], ["1"]],
  "target": {"point": ["2", "3"]}
}"#,
    },
    Fixture {
        name: "diag_b2",
        about: "diag(-1/2, -1/3) with b = (-1, 1); target is the corner (-2, 3)",
        text: r#"{
  "A": [["-1/2", "0"], ["0", "-1/3"]],
  "B": [["-1"], ["1"]],
  "target": {"point": ["-2", "3"]}
}"#,
    },
    Fixture {
        name: "diag_sum",
        about: "both columns together: the Minkowski sum of the two sets",
        text: r#"{
  "A": [["-1/2", "0"], ["0", "-1/3"]],
  "B": [["1", "-1"], ["1", "1"]],
  "target": {"point": ["4", "0"]}
}"#,
    },
    Fixture {
        name: "sqrt2_pair",
        about: "diag(-1, -sqrt 2) with two columns; (2, 0) is an algebraic boundary point",
        text: r#"{
  "A": [["-1", "0"], ["0", {"minpoly": ["-2", "0", "1"], "interval": ["-2", "-1"]}]],
  "B": [["1", "1"], ["-1", "1"]],
  "target": {"point": ["2", "0"]}
}"#,
    },
    Fixture {
        name: "car",
        about: "double integrator with front and rear boosters, horizon 10",
        text: r#"{
  "A": [["0", "1"], ["0", "0"]],
  "B": [["0", "0"], ["0", "1"]],
  "horizon": {"tau": "10"},
  "target": {"point": ["50", "10"]}
}"#,
    },
    Fixture {
        name: "spring",
        about: "spring-mass-damper x'' = -2x - x' + u",
        text: r#"{
  "A": [["0", "1"], ["-2", "-1"]],
  "B": [["0"], ["1"]],
  "target": {"point": ["1/4", "0"]}
}"#,
    },
    Fixture {
        name: "skolem_cos",
        about: "Skolem instance f(t) = e^{-t} cos 2t",
        text: r#"{
  "c": ["1", "0"],
  "A": [["-1", "2"], ["-2", "-1"]],
  "b": ["1", "0"]
}"#,
    },
];

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
