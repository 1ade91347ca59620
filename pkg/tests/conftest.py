import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run the long enumerations (1024/4096-bit)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion.

    Usage: ``with criterion(3, "weights") as note: ...; note("detail")``.
    """
    import contextlib

    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    @contextlib.contextmanager
    def record(number, title):
        details = []
        try:
            yield details.append
        except BaseException as exc:
            if isinstance(exc, pytest.skip.Exception):
                raise
            lines.append((number, "FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0]))
            print(f"[criterion {number}] FAIL {title}")
            raise
        else:
            lines.append((number, "PASS", title, "; ".join(details)))
            print(f"[criterion {number}] PASS {title}: {'; '.join(details)}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, title, detail in sorted(lines, key=lambda x: (x[0], x[2])):
        terminalreporter.write_line(f"{verdict} criterion {number}: {title} ({detail})")
