use std::io::{self, ErrorKind, Write};

/// Standard output that discards writes once the reader has gone away.
struct Stdout(io::Stdout);

impl Write for Stdout {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self.0.write(buf) {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(buf.len()),
            r => r,
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self.0.flush() {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
            r => r,
        }
    }
}

fn main() {
    let code = trend::cli::run(std::env::args_os(), &mut Stdout(io::stdout()), &mut io::stderr());
    std::process::exit(code);
}
