import functools

import pytest

from ilshare.analytic import run_pipeline
from ilshare.counting import count_system
from ilshare.formula import Preset
from ilshare.presets import preset_system

PRESETS = list(Preset)
BIG_HORIZON = 2000


@functools.lru_cache(maxsize=None)
def big_table(preset: Preset):
    """Counts up to complexity 2000, shared by every test module in the run."""
    return count_system(preset_system(preset), BIG_HORIZON)


@functools.lru_cache(maxsize=None)
def pipeline(preset: Preset, prec: int = 256):
    return run_pipeline(preset_system(preset), prec)


@pytest.fixture(params=PRESETS, ids=[p.value for p in PRESETS])
def preset(request):
    return request.param
