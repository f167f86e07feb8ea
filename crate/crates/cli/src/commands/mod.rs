pub mod berry;
pub mod coherent;
pub mod diagonalize;
pub mod sweep;
pub mod verify;
pub mod wavefunction;

/// Attach the component error name so reports read `Name: message`.
pub fn tagged(e: tcphase_core::Error) -> anyhow::Error {
    let name = e.name();
    anyhow::Error::new(e).context(name)
}
