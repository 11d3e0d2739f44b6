"""Process-wide cache of long scenario runs shared by conftest and the acceptance suite."""

from distlsq.harness import parse_config, run_scenario, scenario_source

_TRACES = {}


def cached_run(name, key=None, edit=None):
    """Run builtin ``name`` once per process.

    ``edit`` mutates the raw config mapping before parsing; ``key`` must then
    identify the edited variant.
    """
    key = key or name
    if key not in _TRACES:
        raw = scenario_source(name)
        if edit is not None:
            edit(raw)
        _TRACES[key] = run_scenario(parse_config(raw))
    return _TRACES[key]
