import io
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent))

from sawlab.cli import main as cli_main


@pytest.fixture(scope="session")
def cli():
    """Run the CLI in-process, caching (exit_code, stdout) per argv."""
    import time

    cache: dict[tuple, tuple[int, str]] = {}
    timings: dict[tuple, float] = {}

    def run(*argv: str) -> tuple[int, str]:
        key = tuple(argv)
        if key not in cache:
            out, err = io.StringIO(), io.StringIO()
            started = time.monotonic()
            try:
                with redirect_stdout(out), redirect_stderr(err):
                    code = cli_main(list(argv))
            except SystemExit as exc:  # argparse usage failures
                code = exc.code if isinstance(exc.code, int) else 2
            timings[key] = time.monotonic() - started
            cache[key] = (code, out.getvalue())
        return cache[key]

    run.seconds = lambda *argv: timings[tuple(argv)]
    return run
