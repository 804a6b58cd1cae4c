//! The five subcommand bodies. Each resolves its inputs from the merged
//! options, fans work out over the thread pool in canonical order, and
//! emits one CSV table.

use torus_riesz_core::asymptotics::a_constant;
use torus_riesz_core::energy::{expected_energy_closed, replica_energy, summarize};
use torus_riesz_core::dpp::sample_stream;
use torus_riesz_core::lattice::{Lattice, NamedLattice};
use torus_riesz_core::zeta::epstein_zeta;

use crate::par::ordered_map;
use crate::run::{linspace, Failure, Merged};
use crate::table::{float, Table};

/// Epstein zeta over the exponent list; the pole s = d is skipped with a
/// diagnostic comment line in place of its row.
pub fn zeta(m: &Merged) -> Result<(), Failure> {
    let lat = m.lattice()?;
    let s_values = m.s_values()?;
    let ewald = m.ewald()?;
    let threads = m.threads()?;
    let d = lat.dim() as f64;

    let results = ordered_map(&s_values, threads, |&s| {
        if s == d {
            return Ok(None);
        }
        epstein_zeta(&lat, s, &ewald).map(|z| Some(z.value))
    });

    let mut table = Table::new();
    table.header("s,value");
    for (&s, result) in s_values.iter().zip(results) {
        match result? {
            Some(value) => table.row(&[float(s), float(value)]),
            None => table.comment(&format!(
                "s = {} skipped: pole of the Epstein zeta at s = d",
                float(s)
            )),
        }
    }
    table.write(m.out())
}

/// Closed-form expected energy of the support at each exponent.
pub fn expected_energy(m: &Merged) -> Result<(), Failure> {
    let lat = m.lattice()?;
    let supp = m.support(&lat)?;
    let s_values = m.s_values()?;
    let threads = m.threads()?;

    let results = ordered_map(&s_values, threads, |&s| expected_energy_closed(&supp, s));

    let mut table = Table::new();
    table.header("s,t_n,closed_form,poisson_baseline,pair_sum,prefactor_pole,prefactor_pair");
    for result in results {
        let r = result?;
        table.row(&[
            float(r.s),
            r.t_n.to_string(),
            float(r.closed_form),
            float(r.poisson_baseline),
            float(r.pair_sum),
            float(r.prefactor_pole),
            float(r.prefactor_pair),
        ]);
    }
    table.write(m.out())
}

/// Determinantal configurations: t_n rows per replica, coefficients in the
/// fundamental domain [0,1)^d.
pub fn sample(m: &Merged) -> Result<(), Failure> {
    let lat = m.lattice()?;
    let supp = m.support(&lat)?;
    let replicas = m.replicas_or(1);
    let seed = m.seed();
    let threads = m.threads()?;
    let d = lat.dim();

    let indices: Vec<u64> = (0..replicas as u64).collect();
    let draws = ordered_map(&indices, threads, |&replica| {
        sample_stream(&supp, seed, replica)
    });

    let mut table = Table::new();
    let mut header = String::from("replica,point_index");
    for k in 1..=d {
        header.push_str(&format!(",c{k}"));
    }
    table.header(&header);
    for (replica, draw) in draws.into_iter().enumerate() {
        let config = draw?;
        for (index, point) in config.points.iter().enumerate() {
            let mut cells = vec![replica.to_string(), index.to_string()];
            cells.extend(point.coeffs.iter().map(|&c| float(c)));
            table.row(&cells);
        }
    }
    table.write(m.out())
}

/// Monte Carlo expected energy beside the closed form, with the z-score
/// (mean - closed)/stderr as the significance of the discrepancy.
pub fn mc_energy(m: &Merged) -> Result<(), Failure> {
    let lat = m.lattice()?;
    let supp = m.support(&lat)?;
    let s = m.single_s()?;
    let replicas = m.replicas_or(400);
    if replicas < 100 {
        return Err(Failure::Usage(format!(
            "mc-energy needs at least 100 replicas for a usable standard error, got {replicas}"
        )));
    }
    let seed = m.seed();
    let threads = m.threads()?;
    let ewald = m.ewald()?;

    let closed = expected_energy_closed(&supp, s)?;
    let indices: Vec<u64> = (0..replicas as u64).collect();
    let energies = ordered_map(&indices, threads, |&replica| {
        replica_energy(&supp, s, seed, replica, &ewald)
    })
    .into_iter()
    .collect::<Result<Vec<f64>, _>>()?;
    let mc = summarize(&energies, seed);

    let z = if mc.stderr > 0.0 {
        (mc.mean - closed.closed_form) / mc.stderr
    } else if mc.mean == closed.closed_form {
        0.0
    } else {
        f64::INFINITY
    };

    let mut table = Table::new();
    table.header("s,t_n,replicas,seed,mc_mean,mc_stderr,closed_form,z_score");
    table.row(&[
        float(s),
        closed.t_n.to_string(),
        mc.replicas.to_string(),
        mc.seed.to_string(),
        float(mc.mean),
        float(mc.stderr),
        float(closed.closed_form),
        float(z),
    ]);
    table.write(m.out())
}

/// A_{s,d} beside the lattice zeta on a grid over (0.05, d - 0.05), for the
/// hexagonal lattice (d = 2) or D4 (d = 4) at covolume one.
pub fn figure1(m: &Merged, d_flag: Option<usize>, count_flag: Option<usize>) -> Result<(), Failure> {
    let d = d_flag
        .or(m.d)
        .ok_or_else(|| Failure::Usage("figure1 needs --d".into()))?;
    let (name, spec) = match d {
        2 => ("hexagonal", NamedLattice::Hexagonal),
        4 => ("D4", NamedLattice::D4),
        _ => {
            return Err(Failure::Usage(format!(
                "figure1 supports d = 2 or d = 4, got {d}"
            )))
        }
    };
    let count = count_flag.or(m.grid_count).unwrap_or(40);
    if count < 2 {
        return Err(Failure::Usage("--grid-count must be at least 2".into()));
    }
    let lat = Lattice::named(&spec, true)?;
    let ewald = m.ewald()?;
    let threads = m.threads()?;
    let grid = linspace(0.05, d as f64 - 0.05, count);

    let results = ordered_map(&grid, threads, |&s| -> Result<(f64, f64), Failure> {
        let a = a_constant(s, d)?;
        let z = epstein_zeta(&lat, s, &ewald)?.value;
        Ok((a, z))
    });

    let mut table = Table::new();
    table.comment(&format!("lattice: {name}"));
    table.header("s,A_sd,zeta_lattice");
    for (&s, result) in grid.iter().zip(results) {
        let (a, z) = result?;
        table.row(&[float(s), float(a), float(z)]);
    }
    table.write(m.out())
}
