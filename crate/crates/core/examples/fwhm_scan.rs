//! Leakage as a function of detector FWHM and bin width at a 350 ps delay.
//!
//! Run: cargo run --release --example fwhm_scan

use timeleak::figures::fwhm_scan;

fn main() -> timeleak::Result<()> {
    let fwhms = [20.0, 50.0, 100.0, 200.0, 350.0, 500.0, 1000.0, 2000.0];
    let widths = [1.0, 100.0, 500.0, 1000.0, 4000.0];
    let table = fwhm_scan(0.0, 350.0, &fwhms, &widths, 0.0, 1.0)?;

    print!("{:>9}", "fwhm\\w");
    for w in widths {
        print!("{w:>9}");
    }
    println!();
    for chunk in table.rows.chunks(widths.len()) {
        print!("{:>9}", chunk[0][0]);
        for r in chunk {
            print!("{:>9.4}", r[2]);
        }
        println!();
    }
    Ok(())
}
