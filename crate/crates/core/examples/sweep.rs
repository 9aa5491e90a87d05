//! Drives the command-line front end in-process: a radius sweep in
//! Euclidean space and a length sweep in a Berger sphere, where cells past
//! the fiber period are reported in the error column.

use ekt_cylinders::cli::run;

fn main() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    for args in [
        &["ekt", "sweep", "--rho-range", "0.5:2:4", "--length", "5"][..],
        &["ekt", "sweep", "--kappa", "4", "--tau", "1", "--rho", "0.5", "--length-range", "1:9:5", "--jobs", "2"],
        &["ekt", "critical-length", "--kappa", "-1", "--r", "2.5"],
    ] {
        out.clear();
        err.clear();
        let code = run(args.iter().copied(), &mut out, &mut err);
        println!("$ {}", args.join(" "));
        print!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
        println!("(exit {code})\n");
    }
}
