import pytest

from covertlab.headers import REGISTRY

ENGLISH = (
    "The quick brown fox jumps over the lazy dog while the farmer walks along the "
    "river bank toward the old mill. Every morning he carries a basket of apples and "
    "a loaf of bread, stopping to talk with the miller about the weather, the price of "
    "grain, and the news from the town beyond the hills. In the evening the light fades "
    "slowly over the fields, the birds return to the trees, and the village grows quiet "
    "except for the sound of water turning the great wooden wheel. Children run between "
    "the houses, dogs bark at passing carts, and somewhere a door closes against the cold "
    "wind that comes down from the mountains after sunset. Nobody in the village remembers "
    "when the mill was built, but everyone agrees that it has always been there, grinding "
    "wheat for the bakers and keeping the farmers busy through the long summer months. "
    "When winter arrives the river freezes at the edges and the wheel turns more slowly."
).encode("ascii")


@pytest.fixture
def english():
    return ENGLISH


def non_trapdoor_equal(before, after, config):
    """True when every field outside the channel's trapdoors is unchanged."""
    used = {(t.protocol, t.field) for t in config.trapdoors}
    for a, b in zip(before, after, strict=True):
        if a.index != b.index or a.proto is not b.proto:
            return False
        for name in REGISTRY.field_names(a.proto):
            if (a.proto, name) not in used and a.fields[name] != b.fields[name]:
                return False
    return True


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, line = results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {line}")
