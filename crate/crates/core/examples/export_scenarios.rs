//! Writes scenario files for the command line into a directory
//! (default `examples/scenarios`).

use causal_lab::cli::ScenarioFile;
use causal_lab::conditions::make_abc_scenario;
use causal_lab::protocol::{abc_lattice, annulus_scenario};
use causal_lab::Exact;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or("examples/scenarios".into()));
    std::fs::create_dir_all(&dir)?;
    let write = |name: &str, f: &ScenarioFile| -> Result<(), Box<dyn std::error::Error>> {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(f)? + "\n")?;
        println!("wrote {}", path.display());
        Ok(())
    };

    for (name, abc) in [("abc_1_1_1.json", (1, 1, 1)), ("abc_0_1_1.json", (0, 1, 1)), ("abc_0_0_0.json", (0, 0, 0))] {
        let sc = make_abc_scenario(
            Exact::from_integer(abc.0),
            Exact::from_integer(abc.1),
            Exact::from_integer(abc.2),
        )?;
        let mut f = ScenarioFile::from_measurement(&sc);
        f.seed = Some(1);
        f.protocol = Some(abc_lattice());
        write(name, &f)?;
    }

    let (sc, lattice) = annulus_scenario()?;
    let mut f = ScenarioFile::from_measurement(&sc);
    f.seed = Some(1);
    f.protocol = Some(lattice);
    write("annulus.json", &f)?;
    Ok(())
}
