//! The reference systems used across tests, examples and configs.

use crate::linalg::Matrix;
use crate::system::GeneratorSystem;

fn dec(gens: &[[[&str; 2]; 2]]) -> GeneratorSystem {
    let g: Vec<Vec<Vec<String>>> = gens
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
        .collect();
    GeneratorSystem::from_decimal(&g).expect("fixture is valid")
}

/// `{R}` with `R` the quarter turn.
pub fn e1() -> GeneratorSystem {
    dec(&[[["0", "-1"], ["1", "0"]]])
}

/// `{H, R}` with `H = diag(2, 0.5)`.
pub fn e2() -> GeneratorSystem {
    dec(&[[["2", "0"], ["0", "0.5"]], [["0", "-1"], ["1", "0"]]])
}

/// `{diag(0.4, 0.1), 0.3·R}`. Translations `(0,0)` and `(0.5,0.5)` are attached so the
/// attractor-based commands have something to work with.
pub fn e3() -> GeneratorSystem {
    dec(&[[["0.4", "0"], ["0", "0.1"]], [["0", "-0.3"], ["0.3", "0"]]])
        .with_translations(vec![vec![0.0, 0.0], vec![0.5, 0.5]])
        .expect("fixture is valid")
}

/// Two copies of `0.4·I` with translations `(0,0)` and `(0.6,0)`.
pub fn e4() -> GeneratorSystem {
    dec(&[[["0.4", "0"], ["0", "0.4"]], [["0.4", "0"], ["0", "0.4"]]])
        .with_translations(vec![vec![0.0, 0.0], vec![0.6, 0.0]])
        .expect("fixture is valid")
}

/// `{0.4·I, 0.2·I}`.
pub fn e5() -> GeneratorSystem {
    dec(&[[["0.4", "0"], ["0", "0.4"]], [["0.2", "0"], ["0", "0.2"]]])
}

/// `{diag(2,3), diag(1,4)}`: commuting, with common eigenlines.
pub fn diagonal_pair() -> GeneratorSystem {
    GeneratorSystem::new(vec![Matrix::diag(&[2.0, 3.0]), Matrix::diag(&[1.0, 4.0])])
        .expect("fixture is valid")
}

/// Look a fixture up by its short name (`e1` … `e5`, `diag`).
pub fn by_name(name: &str) -> Option<GeneratorSystem> {
    Some(match name.to_ascii_lowercase().as_str() {
        "e1" => e1(),
        "e2" => e2(),
        "e3" => e3(),
        "e4" => e4(),
        "e5" => e5(),
        "diag" | "diagonal_pair" => diagonal_pair(),
        _ => return None,
    })
}
