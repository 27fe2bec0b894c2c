import pytest

ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Store one acceptance outcome; printed in the terminal summary."""
    prev = ACCEPTANCE.get(criterion)
    ok = ok if prev is None else (prev[0] and ok)
    detail = detail if prev is None else f"{prev[1]}; {detail}"
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def species_tiny():
    from vacua.params import DipoleSpecies
    return DipoleSpecies(1e-8)


_ENSEMBLES = {}


def cached_ensemble(rho_bar: float, n_samples: int, seed: int, n: int = 64, zeta0: float = 0.05,
                    g: float = 1e-6):
    """Monte Carlo ensembles are expensive; share them across test modules."""
    key = (rho_bar, n_samples, seed, n, zeta0, g)
    if key not in _ENSEMBLES:
        from vacua.config import ensemble_average
        from vacua.params import DipoleSpecies, MediumSpec
        _ENSEMBLES[key] = ensemble_average(n, MediumSpec(rho_bar, zeta0), DipoleSpecies(g), n_samples, seed=seed)
    return _ENSEMBLES[key]
