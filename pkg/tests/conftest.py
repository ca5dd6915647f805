import sys
from pathlib import Path

from hypothesis import strategies as st

from banglambek.formulas import Bang, Over, Under, Var

sys.path.insert(0, str(Path(__file__).parent))

ATOM_NAMES = st.sampled_from(["p", "q", "r", "np", "s", "n", "x1", "a_b", "p'"])


def formulas(max_depth: int = 8, bangs: bool = True):
    """Random formulas whose tree depth is at most ``max_depth``."""
    leaves = ATOM_NAMES.map(Var)
    if max_depth <= 1:
        return leaves
    sub = st.deferred(lambda: formulas(max_depth - 1, bangs))
    options = [leaves, st.builds(Over, sub, sub), st.builds(Under, sub, sub)]
    if bangs:
        options.append(st.builds(Bang, sub))
    return st.one_of(*options)


def formula_depth(f) -> int:
    if isinstance(f, Var):
        return 1
    if isinstance(f, Bang):
        return 1 + formula_depth(f.body)
    return 1 + max(formula_depth(f.num), formula_depth(f.den))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
