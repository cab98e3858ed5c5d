import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from datam.model import DupleType, Glue, TileSystem, TileType  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LABELS = ["a", "b", "c"]


@st.composite
def glues(draw, max_strength=2):
    if draw(st.integers(0, 2)) == 0:
        return Glue()
    return Glue(draw(st.sampled_from(LABELS)), draw(st.integers(1, max_strength)))


@st.composite
def small_systems(draw, max_types=5, duples=True, temperature=None):
    """Small random systems with a single-tile seed. Some grow forever; callers bound them."""
    tau = draw(st.sampled_from([1, 2])) if temperature is None else temperature
    n = draw(st.integers(1, max_types))
    tiles = [TileType(f"t{i}", draw(glues()), draw(glues()), draw(glues()), draw(glues()))
             for i in range(n)]
    dups = []
    if duples and draw(st.booleans()):
        axis = draw(st.sampled_from(["EW", "NS"]))
        g = Glue("d", max(tau, 2))
        a = draw(glues())
        b = draw(glues())
        if axis == "EW":
            tiles += [TileType("da", a, g, draw(glues()), draw(glues())),
                      TileType("db", draw(glues()), b, draw(glues()), g)]
        else:
            tiles += [TileType("da", g, a, draw(glues()), draw(glues())),
                      TileType("db", draw(glues()), b, g, draw(glues()))]
        dups.append(DupleType("da", "db", axis))
    singles = [t.name for t in tiles if not t.name.startswith("d")]
    return TileSystem(tiles, {(0, 0): "t0"}, tau, singletons=singles, duples=dups)


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, collected by test_acceptance
    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
