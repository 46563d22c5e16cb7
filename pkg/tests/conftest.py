import pytest

# criterion number -> (title, passed, detail); filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}
ACCEPTANCE_TITLES = {
    1: "conjugation identity",
    2: "symbol identities and sign",
    3: "indicial roots, central intervals, Mellin symbol",
    4: "FD vs Bessel Green convergence order, Wronskian",
    5: "uniform b-Sobolev estimate (alpha = 0)",
    6: "sharpness outside the alpha window",
    7: "normal-operator rescaling",
    8: "limiting absorption",
    9: "Grushin block scaling",
}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE[number] = (ACCEPTANCE_TITLES[number], bool(passed), detail)
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {ACCEPTANCE_TITLES[number]} :: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title in ACCEPTANCE_TITLES.items():
        if number in ACCEPTANCE:
            _, passed, detail = ACCEPTANCE[number]
            tag = "PASS" if passed else "FAIL"
        else:
            tag, detail = "NOT RUN", "test errored before recording or was deselected"
        terminalreporter.write_line(f"[{tag}] {number}. {title}: {detail}")
